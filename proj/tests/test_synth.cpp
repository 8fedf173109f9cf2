#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lotto/errors.hpp"
#include "lotto/screen.hpp"
#include "lotto/synth.hpp"

using namespace lotto;

namespace {

PrizeRegistry shipped_registry() {
    return load_prize_tables_file(std::string(LOTTO_DATA_DIR) + "/prize_tables.json");
}

PopulationSpec tiny_spec() {
    PopulationSpec spec = default_population_spec();
    spec.n_honest = 0;
    spec.n_discounters = 0;
    return spec;
}

ProfileMap reingest(const GroundTruthManifest& manifest) {
    std::ostringstream csv;
    write_synthetic_claims_csv(csv, manifest);
    std::istringstream in(csv.str());
    const ParseResult parsed = parse_claims(in);
    REQUIRE(parsed.errors.empty());
    return aggregate_players(parsed.records);
}

} // namespace

TEST_CASE("a one-store regular always shows zero entropy") {
    PopulationSpec spec = tiny_spec();
    spec.n_honest = 1;
    spec.honest_store_set_size = {{1}, {1.0}};
    spec.honest_wins = {{5}, {1.0}};
    const auto manifest = generate_population(spec, shipped_registry());
    REQUIRE(manifest.players.size() == 1);
    REQUIRE(manifest.players[0].wins.size() == 5);
    REQUIRE(manifest.players[0].stores.size() == 1);

    const auto profiles = reingest(manifest);
    REQUIRE(profiles.size() == 1);
    std::vector<std::int64_t> counts;
    for (const auto& [store, n] : profiles.begin()->second.store_counts) {
        counts.push_back(n);
    }
    CHECK(entropy_from_counts(counts) == 0.0);
}

TEST_CASE("wide-spread discounters approach the uniform entropy ceiling") {
    // 50 draws over 25 near-uniform stores have expected empirical entropy
    // ln(25) - 24/100; averaging over players pins that oracle tightly
    PopulationSpec spec = tiny_spec();
    spec.n_discounters = 40;
    spec.discounter_store_spread = 25;
    spec.discounter_wins = {{50}, {1.0}};
    const auto manifest = generate_population(spec, shipped_registry());
    REQUIRE(manifest.players.size() == 40);
    REQUIRE(manifest.players[0].wins.size() == 50);
    REQUIRE(manifest.players[0].stores.size() == 25);

    const auto profiles = reingest(manifest);
    double mean_e = 0.0;
    for (const auto& [id, profile] : profiles) {
        std::vector<std::int64_t> counts;
        for (const auto& [store, n] : profile.store_counts) counts.push_back(n);
        mean_e += entropy_from_counts(counts) / static_cast<double>(profiles.size());
    }
    CHECK(std::abs(mean_e - std::log(25.0)) < 0.1 * std::log(25.0));
    CHECK(std::abs(mean_e - (std::log(25.0) - 0.24)) < 0.05);
}

TEST_CASE("emitted corpora re-ingest to exactly the manifest") {
    PopulationSpec spec = tiny_spec();
    spec.n_honest = 40;
    spec.n_discounters = 3;
    const auto manifest = generate_population(spec, shipped_registry());
    const auto profiles = reingest(manifest);

    std::size_t emitted_players = 0;
    for (const SynthPlayer& player : manifest.players) {
        if (player.wins.empty()) continue;
        ++emitted_players;
        const auto it = profiles.find(player.player_id);
        REQUIRE(it != profiles.end());
        REQUIRE(it->second.win_count() ==
                static_cast<std::int64_t>(player.wins.size()));
        Cents total = 0;
        for (const SynthWin& win : player.wins) total += win.amount_cents;
        REQUIRE(it->second.total_cents == total);
    }
    REQUIRE(profiles.size() == emitted_players);
}

TEST_CASE("discounters are noisier than honest players by construction") {
    PopulationSpec spec = default_population_spec();
    spec.n_honest = 300;
    spec.n_discounters = 15;
    const auto manifest = generate_population(spec, shipped_registry());
    const auto profiles = reingest(manifest);

    double honest_sum = 0, disc_sum = 0;
    std::int64_t honest_n = 0, disc_n = 0;
    for (const SynthPlayer& player : manifest.players) {
        const auto it = profiles.find(player.player_id);
        REQUIRE(it != profiles.end());
        std::vector<std::int64_t> counts;
        for (const auto& [store, n] : it->second.store_counts) counts.push_back(n);
        const double e = entropy_from_counts(counts);
        if (player.label == "honest") {
            honest_sum += e;
            ++honest_n;
        } else {
            disc_sum += e;
            ++disc_n;
        }
    }
    REQUIRE(honest_n == 300);
    REQUIRE(disc_n == 15);
    CHECK(disc_sum / disc_n > honest_sum / honest_n);
}

TEST_CASE("generation is deterministic under the master seed") {
    PopulationSpec spec = default_population_spec();
    spec.n_honest = 25;
    spec.n_discounters = 2;
    const auto a = generate_population(spec, shipped_registry());
    const auto b = generate_population(spec, shipped_registry());

    std::ostringstream csv_a, csv_b, json_a, json_b;
    write_synthetic_claims_csv(csv_a, a);
    write_synthetic_claims_csv(csv_b, b);
    write_manifest_json(json_a, a);
    write_manifest_json(json_b, b);
    CHECK(csv_a.str() == csv_b.str());
    CHECK(json_a.str() == json_b.str());

    spec.master_seed = 8;
    const auto c = generate_population(spec, shipped_registry());
    std::ostringstream csv_c;
    write_synthetic_claims_csv(csv_c, c);
    CHECK(csv_a.str() != csv_c.str());
}

TEST_CASE("every synthetic claim passes ingest validation") {
    PopulationSpec spec = default_population_spec();
    spec.n_honest = 120;
    spec.n_discounters = 6;
    const auto manifest = generate_population(spec, shipped_registry());
    std::ostringstream csv;
    write_synthetic_claims_csv(csv, manifest);
    std::istringstream in(csv.str());
    const ParseResult parsed = parse_claims(in);
    CHECK(parsed.errors.empty());
    std::size_t expected = 0;
    for (const SynthPlayer& p : manifest.players) expected += p.wins.size();
    CHECK(parsed.records.size() == expected);
}

TEST_CASE("manifests survive a JSON round trip") {
    PopulationSpec spec = default_population_spec();
    spec.n_honest = 12;
    spec.n_discounters = 2;
    const auto manifest = generate_population(spec, shipped_registry());

    std::ostringstream out;
    write_manifest_json(out, manifest);
    std::istringstream in(out.str());
    const auto back = read_manifest_json(in);

    REQUIRE(back.master_seed == manifest.master_seed);
    REQUIRE(back.players.size() == manifest.players.size());
    for (std::size_t i = 0; i < back.players.size(); ++i) {
        const SynthPlayer& x = manifest.players[i];
        const SynthPlayer& y = back.players[i];
        REQUIRE(y.player_id == x.player_id);
        REQUIRE(y.label == x.label);
        REQUIRE(y.stores.size() == x.stores.size());
        REQUIRE(y.wins.size() == x.wins.size());
        for (std::size_t w = 0; w < y.wins.size(); ++w) {
            REQUIRE(y.wins[w].game == x.wins[w].game);
            REQUIRE(y.wins[w].amount_cents == x.wins[w].amount_cents);
            REQUIRE(y.wins[w].date == x.wins[w].date);
            REQUIRE(y.wins[w].store == x.wins[w].store);
        }
    }
}

TEST_CASE("population specs are validated before generation") {
    const PrizeRegistry registry = shipped_registry();

    CHECK_THROWS_AS(generate_population(default_population_spec(), PrizeRegistry{}),
                    ValidationError);

    PopulationSpec bad = default_population_spec();
    bad.n_honest = -1;
    CHECK_THROWS_AS(generate_population(bad, registry), ValidationError);

    bad = default_population_spec();
    bad.games_mix = {{"no such game", 1.0}};
    CHECK_THROWS_AS(generate_population(bad, registry), ValidationError);

    bad = default_population_spec();
    bad.games_mix.back().second += 0.5;
    CHECK_THROWS_AS(generate_population(bad, registry), ValidationError);

    bad = default_population_spec();
    bad.honest_wins.probs.back() = -bad.honest_wins.probs.back();
    CHECK_THROWS_AS(generate_population(bad, registry), ValidationError);

    bad = default_population_spec();
    bad.honest_store_concentration = 0.5;
    CHECK_THROWS_AS(generate_population(bad, registry), ValidationError);
}

TEST_CASE("default and statewide presets are self-consistent") {
    const PrizeRegistry registry = shipped_registry();
    const PopulationSpec small = default_population_spec();
    CHECK_NOTHROW(validate_population_spec(small, registry));
    CHECK(small.n_honest + small.n_discounters == 1979);

    const PopulationSpec big = statewide_population_spec();
    CHECK_NOTHROW(validate_population_spec(big, registry));
    CHECK(big.n_honest + big.n_discounters == 197900);
}
