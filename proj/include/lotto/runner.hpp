#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "lotto/ingest.hpp"

namespace lotto {

// Resolved run settings. Precedence, lowest to highest: built-in defaults,
// command-line flags, then a config file; a provenance file from an earlier
// run is itself a valid config file and reproduces that run bit for bit.
struct RunConfig {
    std::string claims_path = "data/synthetic/claims.csv";
    std::string prizes_path = "data/prize_tables.json";
    std::string mapping_path = "data/game_mapping.json";
    std::string out_dir = "out";
    std::uint64_t master_seed = 7;
    std::int64_t replicates = 60000;
    double interval_level = 0.80;
    int cluster_k = 25;
    int restarts = 20;
    std::int64_t min_wins = 5;
    // rectangle-screen floors, calibrated on the shipped synthetic corpus
    // so the dispersed heavy losers stand out the way the real outliers did
    double entropy_threshold = 3.0; // nats
    double loss_threshold = 4.5;    // log10 dollars
    std::optional<std::int64_t> flag_top_k; // replaces the thresholds when set
    PlayerKeyMode player_key = PlayerKeyMode::NameOnly;
    std::string players = "flagged";       // simulate target: "flagged" or id list
    std::string synth_preset = "default";  // or "statewide"
    int threads = 0; // 0 = runtime default; never recorded in provenance
};

// Overrides fields present in a JSON config (or provenance) file.
void apply_config_file(RunConfig& config, const std::string& path);

// Resolved config plus content hashes of the input files.
void write_provenance(const RunConfig& config, const std::string& path);

// Exit codes: 0 success, 1 fatal, 2 completed with row errors.
int cmd_ingest(const RunConfig& config, std::ostream& console);
int cmd_screen(const RunConfig& config, std::ostream& console);
int cmd_simulate(const RunConfig& config, std::ostream& console);
int cmd_cluster(const RunConfig& config, std::ostream& console);
int cmd_synth(const RunConfig& config, std::ostream& console);
int cmd_pipeline(const RunConfig& config, std::ostream& console);

} // namespace lotto
