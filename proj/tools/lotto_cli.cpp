#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lotto/errors.hpp"
#include "lotto/runner.hpp"

using namespace lotto;

namespace {

struct Cli {
    RunConfig config;
    std::string config_path;
    std::string player_key = "name";
    std::int64_t flag_top_k = 0;
};

void add_common(CLI::App& cmd, Cli& cli) {
    cmd.add_option("--claims", cli.config.claims_path, "claims CSV")
        ->capture_default_str();
    cmd.add_option("--prizes", cli.config.prizes_path, "prize tables JSON")
        ->capture_default_str();
    cmd.add_option("--mapping", cli.config.mapping_path, "claim-to-game mapping JSON")
        ->capture_default_str();
    cmd.add_option("--out", cli.config.out_dir, "output directory")
        ->capture_default_str();
    cmd.add_option("--seed", cli.config.master_seed, "master seed")
        ->capture_default_str();
    cmd.add_option("--replicates", cli.config.replicates,
                   "simulation replicates per player")
        ->capture_default_str();
    cmd.add_option("--level", cli.config.interval_level,
                   "interval level before multiple-testing adjustment")
        ->capture_default_str();
    cmd.add_option("--k", cli.config.cluster_k, "cluster count")
        ->capture_default_str();
    cmd.add_option("--restarts", cli.config.restarts, "clustering restarts")
        ->capture_default_str();
    cmd.add_option("--min-wins", cli.config.min_wins,
                   "win-count floor for entropy plots and clustering")
        ->capture_default_str();
    cmd.add_option("--entropy-threshold", cli.config.entropy_threshold,
                   "flagging floor on store entropy, nats")
        ->capture_default_str();
    cmd.add_option("--loss-threshold", cli.config.loss_threshold,
                   "flagging floor on expected loss, log10 dollars")
        ->capture_default_str();
    cmd.add_option("--threads", cli.config.threads,
                   "cap worker threads; never changes results");
    cmd.add_option("--config", cli.config_path,
                   "JSON settings file; overrides any flag it names. A "
                   "provenance.json from an earlier run replays that run");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"winner-claim discount screening pipeline"};
    app.require_subcommand(1);
    Cli cli;

    CLI::App* ingest =
        app.add_subcommand("ingest", "parse claims into player profiles");
    CLI::App* screen =
        app.add_subcommand("screen", "closed-form loss and store-entropy screen");
    CLI::App* simulate =
        app.add_subcommand("simulate", "Monte Carlo loss intervals per player");
    CLI::App* cluster =
        app.add_subcommand("cluster", "behavioral clustering and co-cluster expansion");
    CLI::App* synth =
        app.add_subcommand("synth", "generate a labeled synthetic corpus");
    CLI::App* pipeline =
        app.add_subcommand("pipeline", "ingest, screen, simulate and cluster in one run");
    for (CLI::App* cmd : {ingest, screen, simulate, cluster, synth, pipeline}) {
        add_common(*cmd, cli);
    }

    for (CLI::App* cmd : {ingest, pipeline}) {
        cmd->add_option("--player-key", cli.player_key,
                        "identity key: name or name_city")
            ->capture_default_str();
    }
    CLI::Option* topk_opt =
        screen->add_option("--flag-top-k", cli.flag_top_k,
                           "calibrate the thresholds to flag the top K players");
    CLI::Option* topk_pipe_opt =
        pipeline->add_option("--flag-top-k", cli.flag_top_k,
                             "calibrate the thresholds to flag the top K players");
    for (CLI::App* cmd : {simulate, pipeline}) {
        cmd->add_option("--players", cli.config.players,
                        "\"flagged\" or a comma-separated list of player ids")
            ->capture_default_str();
    }
    synth->add_option("--preset", cli.config.synth_preset,
                      "population preset: default or statewide")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cli.player_key == "name") {
            cli.config.player_key = PlayerKeyMode::NameOnly;
        } else if (cli.player_key == "name_city") {
            cli.config.player_key = PlayerKeyMode::NameCity;
        } else {
            throw ValidationError("--player-key must be name or name_city");
        }
        if (topk_opt->count() + topk_pipe_opt->count() > 0) {
            cli.config.flag_top_k = cli.flag_top_k;
        }
        if (!cli.config_path.empty()) apply_config_file(cli.config, cli.config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    if (ingest->parsed()) return cmd_ingest(cli.config, std::cout);
    if (screen->parsed()) return cmd_screen(cli.config, std::cout);
    if (simulate->parsed()) return cmd_simulate(cli.config, std::cout);
    if (cluster->parsed()) return cmd_cluster(cli.config, std::cout);
    if (synth->parsed()) return cmd_synth(cli.config, std::cout);
    if (pipeline->parsed()) return cmd_pipeline(cli.config, std::cout);
    return 1;
}
