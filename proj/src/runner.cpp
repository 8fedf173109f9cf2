#include "lotto/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lotto/cluster.hpp"
#include "lotto/csv.hpp"
#include "lotto/errors.hpp"
#include "lotto/montecarlo.hpp"
#include "lotto/prizes.hpp"
#include "lotto/rng.hpp"
#include "lotto/screen.hpp"
#include "lotto/synth.hpp"

#ifdef LOTTO_HAVE_OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;

namespace lotto {

namespace {

nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["claims"] = c.claims_path;
    j["prizes"] = c.prizes_path;
    j["mapping"] = c.mapping_path;
    j["out"] = c.out_dir;
    j["seed"] = c.master_seed;
    j["replicates"] = c.replicates;
    j["level"] = c.interval_level;
    j["k"] = c.cluster_k;
    j["restarts"] = c.restarts;
    j["min_wins"] = c.min_wins;
    j["entropy_threshold"] = c.entropy_threshold;
    j["loss_threshold"] = c.loss_threshold;
    if (c.flag_top_k) j["flag_top_k"] = *c.flag_top_k;
    j["player_key"] = c.player_key == PlayerKeyMode::NameCity ? "name_city" : "name";
    j["players"] = c.players;
    j["synth_preset"] = c.synth_preset;
    return j;
}

void apply_config_json(RunConfig& c, const nlohmann::json& doc) {
    const nlohmann::json& j =
        doc.is_object() && doc.contains("config") ? doc.at("config") : doc;
    if (!j.is_object()) throw ValidationError("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "claims") {
                c.claims_path = value.get<std::string>();
            } else if (key == "prizes") {
                c.prizes_path = value.get<std::string>();
            } else if (key == "mapping") {
                c.mapping_path = value.get<std::string>();
            } else if (key == "out") {
                c.out_dir = value.get<std::string>();
            } else if (key == "seed") {
                c.master_seed = value.get<std::uint64_t>();
            } else if (key == "replicates") {
                c.replicates = value.get<std::int64_t>();
            } else if (key == "level") {
                c.interval_level = value.get<double>();
            } else if (key == "k") {
                c.cluster_k = value.get<int>();
            } else if (key == "restarts") {
                c.restarts = value.get<int>();
            } else if (key == "min_wins") {
                c.min_wins = value.get<std::int64_t>();
            } else if (key == "entropy_threshold") {
                c.entropy_threshold = value.get<double>();
            } else if (key == "loss_threshold") {
                c.loss_threshold = value.get<double>();
            } else if (key == "flag_top_k") {
                if (value.is_null()) {
                    c.flag_top_k.reset();
                } else {
                    c.flag_top_k = value.get<std::int64_t>();
                }
            } else if (key == "player_key") {
                const auto s = value.get<std::string>();
                if (s == "name") {
                    c.player_key = PlayerKeyMode::NameOnly;
                } else if (s == "name_city") {
                    c.player_key = PlayerKeyMode::NameCity;
                } else {
                    throw ValidationError(
                        "config player_key must be \"name\" or \"name_city\"");
                }
            } else if (key == "players") {
                c.players = value.get<std::string>();
            } else if (key == "synth_preset") {
                c.synth_preset = value.get<std::string>();
            } else if (key == "threads") {
                c.threads = value.get<int>();
            } else {
                throw ValidationError("unknown config key \"" + key + "\"");
            }
        } catch (const nlohmann::json::exception&) {
            throw ValidationError("config key \"" + key + "\" has the wrong type");
        }
    }
}

void validate_config(const RunConfig& c) {
    if (c.replicates < 1 || c.replicates > 100000000) {
        throw ValidationError("replicates must be in [1, 1e8]");
    }
    if (!(c.interval_level > 0.0 && c.interval_level < 1.0)) {
        throw ValidationError("interval level must be inside (0, 1)");
    }
    if (c.cluster_k < 1) throw ValidationError("cluster count must be positive");
    if (c.restarts < 1) throw ValidationError("restart count must be positive");
    if (c.min_wins < 1) throw ValidationError("min-wins floor must be positive");
    if (c.flag_top_k && *c.flag_top_k < 1) {
        throw ValidationError("flag-top-k must be positive");
    }
    if (c.synth_preset != "default" && c.synth_preset != "statewide") {
        throw ValidationError("synth preset must be \"default\" or \"statewide\"");
    }
}

void apply_threads(const RunConfig& c) {
#ifdef LOTTO_HAVE_OPENMP
    if (c.threads > 0) omp_set_num_threads(c.threads);
#else
    (void)c;
#endif
}

ModelConstants constants_from(const RunConfig& c) {
    ModelConstants m;
    m.replicates = static_cast<int>(c.replicates);
    m.interval_level = c.interval_level;
    m.cluster_k = c.cluster_k;
    return m;
}

std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "missing";
    std::ostringstream buf;
    buf << in.rdbuf();
    char hex[20];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(buf.str())));
    return hex;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write \"" + path.string() + "\"");
    return out;
}

std::ifstream open_in(const std::string& path, const std::string& hint) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open \"" + path + "\"" + hint);
    return in;
}

ProfileMap load_profiles(const RunConfig& c) {
    auto in = open_in((fs::path(c.out_dir) / "profiles.jsonl").string(),
                      "; run the ingest stage first");
    return read_profiles_jsonl(in);
}

std::set<std::string> read_flagged_ids(const std::string& path) {
    auto in = open_in(path, "; run the screen stage first");
    CsvReader reader(in);
    std::vector<std::string> row;
    if (!reader.next(row)) return {};
    std::size_t id_col = row.size(), flag_col = row.size();
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (row[i] == "player_id") id_col = i;
        if (row[i] == "flagged") flag_col = i;
    }
    if (id_col == row.size() || flag_col == row.size()) {
        throw ValidationError("screening table \"" + path + "\" is malformed");
    }
    std::set<std::string> flagged;
    while (reader.next(row)) {
        if (row.size() > std::max(id_col, flag_col) && row[flag_col] == "1") {
            flagged.insert(row[id_col]);
        }
    }
    return flagged;
}

std::string join_ids(const std::set<std::string>& ids) {
    std::string out;
    for (const std::string& id : ids) {
        if (!out.empty()) out += ", ";
        out += id;
    }
    return out;
}

int fail(std::ostream& console, const std::string& what) {
    console << "error: " << what << '\n';
    return 1;
}

} // namespace

void apply_config_file(RunConfig& config, const std::string& path) {
    auto in = open_in(path, "");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config file \"" + path + "\" is not valid JSON: " +
                              e.what());
    }
    apply_config_json(config, doc);
}

void write_provenance(const RunConfig& config, const std::string& path) {
    nlohmann::json j;
    j["config"] = config_to_json(config);
    j["inputs"]["claims"] = {{"path", config.claims_path},
                             {"fnv1a64", file_hash(config.claims_path)}};
    j["inputs"]["prizes"] = {{"path", config.prizes_path},
                             {"fnv1a64", file_hash(config.prizes_path)}};
    j["inputs"]["mapping"] = {{"path", config.mapping_path},
                              {"fnv1a64", file_hash(config.mapping_path)}};
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

int cmd_ingest(const RunConfig& config, std::ostream& console) {
    try {
        validate_config(config);
        apply_threads(config);
        auto in = open_in(config.claims_path, "");
        const ParseResult parsed = parse_claims(in);
        const ProfileMap profiles = aggregate_players(parsed.records, config.player_key);

        fs::create_directories(config.out_dir);
        const fs::path out_dir(config.out_dir);
        {
            auto out = open_out(out_dir / "profiles.jsonl");
            write_profiles_jsonl(out, profiles);
        }
        {
            auto out = open_out(out_dir / "ingest_errors.csv");
            write_errors_csv(out, parsed.errors);
        }
        write_provenance(config, (out_dir / "provenance.json").string());

        console << "ingested " << parsed.records.size() << " claims into "
                << profiles.size() << " players";
        if (!parsed.errors.empty()) {
            console << "; rejected " << parsed.errors.size()
                    << (parsed.errors.size() == 1 ? " row" : " rows")
                    << " (see ingest_errors.csv)";
        }
        console << '\n';
        return parsed.errors.empty() ? 0 : 2;
    } catch (const std::exception& e) {
        return fail(console, e.what());
    }
}

int cmd_screen(const RunConfig& config, std::ostream& console) {
    try {
        validate_config(config);
        apply_threads(config);
        const ProfileMap profiles = load_profiles(config);
        const ModelConstants constants = constants_from(config);
        std::vector<ScreeningResult> results = screen_players(profiles, constants);

        FlagRule rule{config.entropy_threshold, config.loss_threshold};
        if (config.flag_top_k && !results.empty()) {
            rule = calibrate_top_k(results,
                                   static_cast<std::size_t>(*config.flag_top_k));
            console << "calibrated thresholds from top-" << *config.flag_top_k
                    << ": entropy >= " << rule.entropy_min << ", log loss >= "
                    << rule.logloss_min << '\n';
        }
        const std::set<std::string> flagged = flag_outliers(results, rule);
        const std::int64_t big =
            count_big_players(results, constants.big_player_entropy_threshold);

        fs::create_directories(config.out_dir);
        const fs::path out_dir(config.out_dir);
        {
            auto out = open_out(out_dir / "screening.csv");
            write_screening_csv(out, results);
        }
        {
            nlohmann::json rows = nlohmann::json::array();
            for (const ScreeningResult& r : results) {
                rows.push_back({{"player_id", r.player_id},
                                {"win_count", r.win_count},
                                {"store_count", r.store_count},
                                {"total_reported_cents", r.total_cents},
                                {"mean_net_gain_micros", r.mean_net_gain_micros},
                                {"entropy", r.entropy},
                                {"log_mean_net_loss", r.log_mean_net_loss},
                                {"flagged", r.flagged}});
            }
            auto out = open_out(out_dir / "screening.json");
            out << rows.dump(2) << '\n';
        }
        {
            nlohmann::json summary;
            summary["players"] = results.size();
            summary["big_players"] = big;
            summary["rule"] = {{"entropy_min", rule.entropy_min},
                               {"logloss_min", rule.logloss_min}};
            if (config.flag_top_k) summary["flag_top_k"] = *config.flag_top_k;
            summary["flagged"] = flagged;
            try {
                summary["loss_entropy_correlation"] =
                    correlation_logloss_entropy(results, config.min_wins);
            } catch (const ValidationError&) {
                summary["loss_entropy_correlation"] = nullptr;
            }
            auto out = open_out(out_dir / "screen_summary.json");
            out << summary.dump(2) << '\n';
        }
        {
            auto out = open_out(out_dir / "plot_wins_survival.csv");
            write_wins_survival_csv(out, results);
        }
        {
            auto out = open_out(out_dir / "plot_stores_survival.csv");
            write_stores_survival_csv(out, results);
        }
        {
            auto out = open_out(out_dir / "plot_entropy_ecdf.csv");
            write_entropy_ecdf_csv(out, results, config.min_wins);
        }
        {
            auto out = open_out(out_dir / "plot_loss_entropy.csv");
            write_loss_entropy_csv(out, results);
        }
        write_provenance(config, (out_dir / "provenance.json").string());

        console << "screened " << results.size() << " players; " << big
                << " above the big-player entropy threshold\n";
        if (flagged.empty()) {
            console << "flagged none\n";
        } else {
            console << "flagged " << flagged.size() << ": " << join_ids(flagged)
                    << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        return fail(console, e.what());
    }
}

int cmd_simulate(const RunConfig& config, std::ostream& console) {
    try {
        validate_config(config);
        apply_threads(config);
        const ProfileMap profiles = load_profiles(config);
        const PrizeRegistry registry = load_prize_tables_file(config.prizes_path);
        const GameMapping mapping = load_game_mapping_file(config.mapping_path);
        const ModelConstants constants = constants_from(config);

        std::set<std::string> targets;
        if (config.players == "flagged") {
            targets = read_flagged_ids(
                (fs::path(config.out_dir) / "screening.csv").string());
        } else {
            std::string id;
            std::istringstream list(config.players);
            while (std::getline(list, id, ',')) {
                const auto a = id.find_first_not_of(' ');
                const auto b = id.find_last_not_of(' ');
                if (a == std::string::npos) continue;
                targets.insert(id.substr(a, b - a + 1));
            }
        }
        for (const std::string& id : targets) {
            if (!profiles.count(id)) {
                throw ValidationError("no profile for player \"" + id + "\"");
            }
        }

        const std::vector<ScreeningResult> results = screen_players(profiles, constants);
        std::int64_t big =
            count_big_players(results, constants.big_player_entropy_threshold);
        if (big == 0) {
            console << "no players exceed the big-player entropy threshold; "
                       "using B = 1\n";
            big = 1;
        }
        const auto quantiles = bonferroni_quantiles(constants.interval_level, big);
        const GameResolver resolver =
            [&](const ClaimRecord& record) -> const PrizeTable& {
            return resolve_game(record, registry, mapping);
        };
        const SeedSpec seeds{config.master_seed};

        std::vector<PlayerSimRow> rows;
        std::size_t failures = 0;
        for (const std::string& id : targets) {
            const PlayerProfile& profile = profiles.at(id);
            try {
                std::vector<Cents> totals =
                    simulate_player(profile, resolver, constants, seeds);
                PlayerSimRow row;
                row.summary = summarize(std::move(totals), quantiles, id, big);
                row.win_count = profile.win_count();
                row.total_reported_cents = profile.total_cents;
                row.master_seed = config.master_seed;
                rows.push_back(std::move(row));
            } catch (const ResolutionError& e) {
                console << "skipping \"" << id << "\": " << e.what() << '\n';
                ++failures;
            }
        }

        fs::create_directories(config.out_dir);
        const fs::path out_dir(config.out_dir);
        {
            auto out = open_out(out_dir / "simulation.csv");
            write_simulation_csv(out, rows);
        }
        {
            auto out = open_out(out_dir / "simulation_report.csv");
            write_simulation_report_csv(out, rows);
        }
        {
            nlohmann::json mirror = nlohmann::json::array();
            for (const PlayerSimRow& row : rows) {
                mirror.push_back({{"player_id", row.summary.player_id},
                                  {"win_count", row.win_count},
                                  {"total_reported_cents", row.total_reported_cents},
                                  {"mean_net_gain", row.summary.mean_net_gain},
                                  {"lower_cents", row.summary.lower_cents},
                                  {"upper_cents", row.summary.upper_cents},
                                  {"lower_quantile", row.summary.lower_quantile},
                                  {"upper_quantile", row.summary.upper_quantile},
                                  {"replicates", row.summary.replicates},
                                  {"b_used", row.summary.b_used},
                                  {"master_seed", row.master_seed}});
            }
            auto out = open_out(out_dir / "simulation.json");
            out << mirror.dump(2) << '\n';
        }
        write_provenance(config, (out_dir / "provenance.json").string());

        console << "simulated " << rows.size() << " players at "
                << constants.replicates << " replicates (B = " << big << ")\n";
        return failures == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        return fail(console, e.what());
    }
}

int cmd_cluster(const RunConfig& config, std::ostream& console) {
    try {
        validate_config(config);
        apply_threads(config);
        const ProfileMap profiles = load_profiles(config);
        const std::set<std::string> flagged = read_flagged_ids(
            (fs::path(config.out_dir) / "screening.csv").string());
        const ModelConstants constants = constants_from(config);
        const std::vector<ScreeningResult> results = screen_players(profiles, constants);

        std::vector<FeatureVector> vectors;
        for (const auto& [id, profile] : profiles) {
            if (profile.win_count() >= config.min_wins) {
                vectors.push_back(feature_vector(profile));
            }
        }
        if (vectors.empty()) {
            throw ValidationError("no players with at least " +
                                  std::to_string(config.min_wins) +
                                  " wins to cluster");
        }
        std::set<std::array<double, 6>> distinct;
        for (const FeatureVector& f : vectors) distinct.insert(f.v);

        int k = config.cluster_k;
        if (static_cast<std::size_t>(k) > distinct.size()) {
            k = static_cast<int>(distinct.size());
            console << "reduced k to the " << k << " distinct feature vectors\n";
        }
        const SeedSpec seeds{config.master_seed};
        const KMeansResult clustering = kmeans(vectors, k, seeds, config.restarts);
        const CoClusterReport report = co_cluster_report(clustering.assignments, flagged);
        std::set<std::string> expansion(report.expansion_set.begin(),
                                        report.expansion_set.end());
        std::set<int> flag_clusters;
        for (const auto& [index, entry] : report.clusters) flag_clusters.insert(index);

        std::vector<int> sweep_ks;
        for (const int candidate : {10, 15, 20, 25, 30}) {
            const int clamped =
                std::min<int>(candidate, static_cast<int>(distinct.size()));
            if (std::find(sweep_ks.begin(), sweep_ks.end(), clamped) ==
                sweep_ks.end()) {
                sweep_ks.push_back(clamped);
            }
        }
        const auto sweep =
            stability_sweep(vectors, sweep_ks, seeds, flagged, config.restarts);

        fs::create_directories(config.out_dir);
        const fs::path out_dir(config.out_dir);
        {
            auto out = open_out(out_dir / "clusters.csv");
            write_clusters_csv(out, clustering.assignments, flagged, expansion);
        }
        {
            auto out = open_out(out_dir / "plot_cluster_scatter.csv");
            write_cluster_scatter_csv(out, results, clustering.assignments,
                                      flag_clusters);
        }
        {
            nlohmann::json summary;
            summary["k"] = k;
            summary["restarts"] = config.restarts;
            summary["min_wins"] = config.min_wins;
            summary["clustered_players"] = vectors.size();
            summary["inertia"] = clustering.inertia;
            summary["iterations"] = clustering.iterations;
            summary["best_restart"] = clustering.best_restart;
            summary["expansion_set"] = report.expansion_set;
            auto& clusters = summary["flag_clusters"] = nlohmann::json::array();
            for (const auto& [index, entry] : report.clusters) {
                clusters.push_back({{"cluster_index", index},
                                    {"flagged", entry.flagged},
                                    {"unflagged", entry.unflagged}});
            }
            auto& stability = summary["stability"] = nlohmann::json::array();
            for (const StabilityRow& row : sweep) {
                stability.push_back({{"k", row.k},
                                     {"clusters_with_flagged", row.clusters_with_flagged},
                                     {"co_clustered", row.co_clustered},
                                     {"largest_fraction", row.largest_fraction}});
            }
            auto out = open_out(out_dir / "cluster_summary.json");
            out << summary.dump(2) << '\n';
        }
        write_provenance(config, (out_dir / "provenance.json").string());

        console << "clustered " << vectors.size() << " players into " << k
                << " clusters; " << report.clusters.size()
                << " hold flagged players\n";
        if (expansion.empty()) {
            console << "expansion set is empty\n";
        } else {
            console << "expansion set (" << expansion.size()
                    << "): " << join_ids(expansion) << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        return fail(console, e.what());
    }
}

int cmd_synth(const RunConfig& config, std::ostream& console) {
    try {
        validate_config(config);
        apply_threads(config);
        const PrizeRegistry registry = load_prize_tables_file(config.prizes_path);
        PopulationSpec spec = config.synth_preset == "statewide"
                                  ? statewide_population_spec()
                                  : default_population_spec();
        spec.master_seed = config.master_seed;
        const GroundTruthManifest manifest = generate_population(spec, registry);

        fs::create_directories(config.out_dir);
        const fs::path out_dir(config.out_dir);
        {
            auto out = open_out(out_dir / "synthetic_claims.csv");
            write_synthetic_claims_csv(out, manifest);
        }
        {
            auto out = open_out(out_dir / "synthetic_manifest.json");
            write_manifest_json(out, manifest);
        }
        write_provenance(config, (out_dir / "provenance.json").string());

        std::size_t claims = 0;
        for (const SynthPlayer& p : manifest.players) claims += p.wins.size();
        console << "generated " << claims << " claims for "
                << manifest.players.size() << " players ("
                << config.synth_preset << " preset)\n";
        return 0;
    } catch (const std::exception& e) {
        return fail(console, e.what());
    }
}

int cmd_pipeline(const RunConfig& config, std::ostream& console) {
    int worst = 0;
    for (int (*stage)(const RunConfig&, std::ostream&) :
         {cmd_ingest, cmd_screen, cmd_simulate, cmd_cluster}) {
        const int code = stage(config, console);
        if (code == 1) return 1;
        worst = std::max(worst, code);
    }
    return worst;
}

} // namespace lotto
