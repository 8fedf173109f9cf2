#include "lotto/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include <json.hpp>

#include "lotto/csv.hpp"
#include "lotto/errors.hpp"

namespace lotto {

void validate_pmf(const DiscretePmf& pmf, const std::string& what) {
    if (pmf.values.empty() || pmf.values.size() != pmf.probs.size()) {
        throw ValidationError(what + ": malformed distribution");
    }
    double sum = 0.0;
    for (const double p : pmf.probs) {
        if (!(p > 0.0)) throw ValidationError(what + ": probabilities must be positive");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError(what + ": probabilities must sum to 1");
    }
}

std::int64_t sample_pmf(const DiscretePmf& pmf, RandomStream& stream) {
    const double u = stream.next_unit();
    double cum = 0.0;
    for (std::size_t i = 0; i < pmf.values.size(); ++i) {
        cum += pmf.probs[i];
        if (u < cum) return pmf.values[i];
    }
    return pmf.values.back();
}

namespace {

DiscretePmf uniform_pmf(std::int64_t lo, std::int64_t hi) {
    DiscretePmf pmf;
    const double p = 1.0 / static_cast<double>(hi - lo + 1);
    for (std::int64_t v = lo; v <= hi; ++v) {
        pmf.values.push_back(v);
        pmf.probs.push_back(p);
    }
    return pmf;
}

// head probabilities for 1..4 wins, then a geometric tail out to 40
DiscretePmf honest_wins_pmf() {
    DiscretePmf pmf;
    pmf.values = {1, 2, 3, 4};
    pmf.probs = {0.80, 0.09, 0.03, 0.015};
    const double tail_mass = 1.0 - 0.80 - 0.09 - 0.03 - 0.015;
    double total = 0.0;
    for (int k = 5; k <= 40; ++k) total += std::pow(0.82, k - 5);
    for (int k = 5; k <= 40; ++k) {
        pmf.values.push_back(k);
        pmf.probs.push_back(tail_mass * std::pow(0.82, k - 5) / total);
    }
    return pmf;
}

DiscretePmf store_set_size_pmf() {
    DiscretePmf pmf;
    pmf.values = {1, 2, 3, 4, 5, 6};
    pmf.probs = {0.09, 0.31, 0.25, 0.17, 0.10, 0.08};
    return pmf;
}

std::vector<std::pair<std::string, double>> default_games_mix() {
    return {{"$1 scratch Lucky Sevens", 0.24}, {"$2 scratch Cash Burst", 0.22},
            {"$5 scratch Gold Rush", 0.18},   {"$10 scratch Diamond Dash", 0.12},
            {"$20 scratch Platinum Stack", 0.08}, {"$30 scratch Grand Fortune", 0.04},
            {"Pick 4", 0.09},                 {"Mega Draw", 0.03}};
}

const std::vector<std::string> kCities = {
    "SPRINGFIELD", "RIVERTON", "FAIRVIEW",   "GREENVILLE", "MADISON", "CLINTON",
    "GEORGETOWN",  "SALEM",    "ASHLAND",    "DOVER",      "MILTON",  "BRISTOL"};
const std::vector<std::string> kCounties = {"ADAMS",   "BUTLER", "CLARK",
                                            "DOUGLAS", "ESSEX",  "FRANKLIN"};
const std::vector<std::string> kStreets = {"MAIN ST",   "OAK AVE",    "PINE RD",
                                           "MARKET ST", "RIVER BLVD", "HILL DR"};
const std::vector<std::string> kClaimCenters = {
    "CAPITAL CITY CLAIM CENTER", "NORTH REGIONAL OFFICE", "SOUTH REGIONAL OFFICE",
    "LOTTERY HEADQUARTERS"};

struct BigPrizeSampler {
    double mix_cum = 0.0;
    std::string game;
    GameType type = GameType::ScratchOff;
    std::vector<Cents> values;
    std::vector<double> cum; // conditional on a big win
};

std::vector<BigPrizeSampler> build_samplers(const PopulationSpec& spec,
                                            const PrizeRegistry& registry,
                                            Cents threshold) {
    std::vector<BigPrizeSampler> samplers;
    double mix_cum = 0.0;
    for (const auto& [name, weight] : spec.games_mix) {
        const PrizeTable* table = registry.find(name);
        BigPrizeSampler s;
        mix_cum += weight;
        s.mix_cum = mix_cum;
        s.game = name;
        // shipped registry convention: scratch tickets carry "scratch" in the name
        s.type = name.find("scratch") != std::string::npos ? GameType::ScratchOff
                                                           : GameType::Online;
        double big_total = 0.0;
        for (const PrizeEntry& e : table->entries) {
            if (e.value_cents > threshold) big_total += e.probability;
        }
        double cum = 0.0;
        for (const PrizeEntry& e : table->entries) {
            if (e.value_cents <= threshold) continue;
            cum += e.probability / big_total;
            s.values.push_back(e.value_cents);
            s.cum.push_back(cum);
        }
        samplers.push_back(std::move(s));
    }
    return samplers;
}

std::vector<std::size_t> draw_distinct(std::size_t want, std::size_t pool,
                                       RandomStream& stream) {
    std::vector<std::size_t> picks;
    std::set<std::size_t> seen;
    while (picks.size() < want) {
        const std::size_t idx = static_cast<std::size_t>(stream.next_below(pool));
        if (seen.insert(idx).second) picks.push_back(idx);
    }
    return picks;
}

std::size_t pick_weighted(const std::vector<double>& weights, RandomStream& stream) {
    const double u = stream.next_unit();
    double cum = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        cum += weights[i];
        if (u < cum) return i;
    }
    return weights.size() - 1;
}

} // namespace

PopulationSpec default_population_spec() {
    PopulationSpec spec;
    spec.n_honest = 1971;
    spec.n_discounters = 8;
    spec.honest_store_concentration = 1.6;
    spec.honest_store_set_size = store_set_size_pmf();
    spec.discounter_store_spread = 25;
    spec.honest_wins = honest_wins_pmf();
    // narrow win-count band keeps the discounter feature vectors in one
    // tight cloud, so the cluster stage sees them as a single behavior
    spec.discounter_wins = uniform_pmf(60, 70);
    spec.games_mix = default_games_mix();
    spec.master_seed = 7;
    return spec;
}

PopulationSpec statewide_population_spec() {
    PopulationSpec spec = default_population_spec();
    spec.n_honest = 197100;
    spec.n_discounters = 800;
    return spec;
}

void validate_population_spec(const PopulationSpec& spec, const PrizeRegistry& registry) {
    if (registry.tables.empty()) throw ValidationError("prize registry is empty");
    if (spec.n_honest < 0 || spec.n_discounters < 0) {
        throw ValidationError("population counts must be nonnegative");
    }
    if (!(spec.honest_store_concentration >= 1.0)) {
        throw ValidationError("store concentration must be at least 1");
    }
    if (spec.discounter_store_spread < 1) {
        throw ValidationError("discounter store spread must be positive");
    }
    validate_pmf(spec.honest_store_set_size, "store set sizes");
    validate_pmf(spec.honest_wins, "honest win counts");
    validate_pmf(spec.discounter_wins, "discounter win counts");
    for (const std::int64_t v : spec.honest_store_set_size.values) {
        if (v < 1) throw ValidationError("store set sizes must be positive");
    }
    for (const std::int64_t v : spec.honest_wins.values) {
        if (v < 1) throw ValidationError("win counts must be positive");
    }
    for (const std::int64_t v : spec.discounter_wins.values) {
        if (v < 1) throw ValidationError("win counts must be positive");
    }

    if (spec.games_mix.empty()) throw ValidationError("games mix is empty");
    const Cents threshold = ModelConstants{}.big_prize_threshold_cents;
    double sum = 0.0;
    for (const auto& [name, weight] : spec.games_mix) {
        if (!(weight > 0.0)) throw ValidationError("games mix weights must be positive");
        sum += weight;
        const PrizeTable* table = registry.find(name);
        if (table == nullptr) {
            throw ValidationError("games mix names unknown game \"" + name + "\"");
        }
        if (table->p_big(threshold) <= 0.0) {
            throw ValidationError("game \"" + name +
                                  "\" has no prize above the recording threshold");
        }
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError("games mix weights must sum to 1");
    }
}

GroundTruthManifest generate_population(const PopulationSpec& spec,
                                        const PrizeRegistry& registry) {
    validate_population_spec(spec, registry);
    const Cents threshold = ModelConstants{}.big_prize_threshold_cents;
    const auto samplers = build_samplers(spec, registry, threshold);

    const std::int64_t n_players = spec.n_honest + spec.n_discounters;
    std::size_t pool_size = static_cast<std::size_t>(
        std::clamp<std::int64_t>(n_players / 4, 60, 2000));
    pool_size = std::max(pool_size,
                         static_cast<std::size_t>(spec.discounter_store_spread) * 3);

    std::vector<StoreRef> pool;
    pool.reserve(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) {
        char name[40];
        std::snprintf(name, sizeof name, "QUICK STOP #%04zu", i + 1);
        char addr[80];
        std::snprintf(addr, sizeof addr, "%zu %s, %s", 100 + i,
                      kStreets[i % kStreets.size()].c_str(),
                      kCities[i % kCities.size()].c_str());
        pool.push_back({name, addr});
    }

    const std::int64_t day_lo = Date{2006, 3, 31}.to_days();
    const std::int64_t day_hi = Date{2020, 1, 31}.to_days();
    const SeedSpec seeds{spec.master_seed};

    GroundTruthManifest manifest;
    manifest.master_seed = spec.master_seed;
    manifest.players.reserve(static_cast<std::size_t>(n_players));

    for (std::int64_t i = 0; i < n_players; ++i) {
        auto stream = seeds.domain_stream(SeedSpec::kSynth,
                                          static_cast<std::uint64_t>(i));
        const bool honest = i < spec.n_honest;

        SynthPlayer player;
        char id[32];
        if (honest) {
            std::snprintf(id, sizeof id, "H%06lld", static_cast<long long>(i + 1));
        } else {
            std::snprintf(id, sizeof id, "D%04lld",
                          static_cast<long long>(i - spec.n_honest + 1));
        }
        player.player_id = id;
        player.label = honest ? "honest" : "discounter";
        const std::size_t city_idx = static_cast<std::size_t>(
            stream.next_below(kCities.size()));
        player.city = kCities[city_idx];
        player.county = kCounties[city_idx / 2];

        const std::size_t set_size = honest
            ? static_cast<std::size_t>(sample_pmf(spec.honest_store_set_size, stream))
            : static_cast<std::size_t>(spec.discounter_store_spread);
        for (const std::size_t idx : draw_distinct(set_size, pool_size, stream)) {
            player.stores.push_back(pool[idx]);
        }
        double weight_total = 0.0;
        for (std::size_t r = 0; r < set_size; ++r) {
            const double w = honest
                ? std::pow(spec.honest_store_concentration, -static_cast<double>(r))
                : 1.0;
            player.store_weights.push_back(w);
            weight_total += w;
        }
        for (double& w : player.store_weights) w /= weight_total;

        const std::int64_t wins = honest ? sample_pmf(spec.honest_wins, stream)
                                         : sample_pmf(spec.discounter_wins, stream);
        for (std::int64_t w = 0; w < wins; ++w) {
            SynthWin win;
            const double gu = stream.next_unit();
            std::size_t g = samplers.size() - 1;
            for (std::size_t s = 0; s < samplers.size(); ++s) {
                if (gu < samplers[s].mix_cum) {
                    g = s;
                    break;
                }
            }
            win.game = samplers[g].game;
            win.game_type = samplers[g].type;
            const double au = stream.next_unit();
            win.amount_cents = samplers[g].values.back();
            for (std::size_t a = 0; a < samplers[g].cum.size(); ++a) {
                if (au < samplers[g].cum[a]) {
                    win.amount_cents = samplers[g].values[a];
                    break;
                }
            }
            win.date = Date::from_days(static_cast<long>(
                day_lo + static_cast<std::int64_t>(
                             stream.next_below(day_hi - day_lo + 1))));
            win.store = pick_weighted(player.store_weights, stream);
            win.claim_center = kClaimCenters[stream.next_below(kClaimCenters.size())];
            player.wins.push_back(std::move(win));
        }
        manifest.players.push_back(std::move(player));
    }
    return manifest;
}

void write_synthetic_claims_csv(std::ostream& out, const GroundTruthManifest& manifest) {
    out << "winner,city,county,game_type,prize_amount,lottery_game,claim_center,"
           "paid_date,retailer_name,retailer_address\n";
    for (const SynthPlayer& player : manifest.players) {
        for (const SynthWin& win : player.wins) {
            const StoreRef& store = player.stores.at(win.store);
            out << csv_row({player.player_id, player.city, player.county,
                            std::string(to_string(win.game_type)),
                            format_usd(win.amount_cents), win.game, win.claim_center,
                            win.date.iso(), store.name, store.address});
        }
    }
}

void write_manifest_json(std::ostream& out, const GroundTruthManifest& manifest) {
    nlohmann::json doc;
    doc["master_seed"] = manifest.master_seed;
    auto& players = doc["players"] = nlohmann::json::array();
    for (const SynthPlayer& player : manifest.players) {
        nlohmann::json p;
        p["player_id"] = player.player_id;
        p["label"] = player.label;
        p["city"] = player.city;
        p["county"] = player.county;
        auto& stores = p["stores"] = nlohmann::json::array();
        for (std::size_t i = 0; i < player.stores.size(); ++i) {
            stores.push_back({{"name", player.stores[i].name},
                              {"address", player.stores[i].address},
                              {"weight", player.store_weights[i]}});
        }
        auto& wins = p["wins"] = nlohmann::json::array();
        for (const SynthWin& win : player.wins) {
            wins.push_back({{"game", win.game},
                            {"game_type", std::string(to_string(win.game_type))},
                            {"amount_cents", win.amount_cents},
                            {"date", win.date.iso()},
                            {"store", win.store},
                            {"claim_center", win.claim_center}});
        }
        players.push_back(std::move(p));
    }
    out << doc.dump(2) << '\n';
}

GroundTruthManifest read_manifest_json(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
    }
    try {
        GroundTruthManifest manifest;
        manifest.master_seed = doc.at("master_seed").get<std::uint64_t>();
        for (const auto& p : doc.at("players")) {
            SynthPlayer player;
            player.player_id = p.at("player_id").get<std::string>();
            player.label = p.at("label").get<std::string>();
            if (player.label != "honest" && player.label != "discounter") {
                throw ValidationError("manifest has unknown label \"" + player.label +
                                      "\"");
            }
            player.city = p.at("city").get<std::string>();
            player.county = p.at("county").get<std::string>();
            for (const auto& s : p.at("stores")) {
                player.stores.push_back({s.at("name").get<std::string>(),
                                         s.at("address").get<std::string>()});
                player.store_weights.push_back(s.at("weight").get<double>());
            }
            for (const auto& w : p.at("wins")) {
                SynthWin win;
                win.game = w.at("game").get<std::string>();
                if (!try_parse_game_type(w.at("game_type").get<std::string>(),
                                         win.game_type)) {
                    throw ValidationError("manifest has unknown game type");
                }
                win.amount_cents = w.at("amount_cents").get<Cents>();
                if (!try_parse_date(w.at("date").get<std::string>(), win.date)) {
                    throw ValidationError("manifest has unparseable date");
                }
                win.store = w.at("store").get<std::size_t>();
                if (win.store >= player.stores.size()) {
                    throw ValidationError("manifest win references a missing store");
                }
                win.claim_center = w.at("claim_center").get<std::string>();
                player.wins.push_back(std::move(win));
            }
            manifest.players.push_back(std::move(player));
        }
        return manifest;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("manifest is missing fields: ") + e.what());
    }
}

} // namespace lotto
