#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lotto/dates.hpp"
#include "lotto/ingest.hpp"
#include "lotto/money.hpp"
#include "lotto/prizes.hpp"
#include "lotto/rng.hpp"

namespace lotto {

// Discrete distribution over integer outcomes.
struct DiscretePmf {
    std::vector<std::int64_t> values;
    std::vector<double> probs;
};

void validate_pmf(const DiscretePmf& pmf, const std::string& what);
std::int64_t sample_pmf(const DiscretePmf& pmf, RandomStream& stream);

struct PopulationSpec {
    std::int64_t n_honest = 0;
    std::int64_t n_discounters = 0;
    // rank-decay base for a habitual player's favorite stores: the r-th
    // favorite gets weight concentration^-r
    double honest_store_concentration = 1.6;
    DiscretePmf honest_store_set_size;
    std::int64_t discounter_store_spread = 25;
    DiscretePmf honest_wins;
    DiscretePmf discounter_wins;
    std::vector<std::pair<std::string, double>> games_mix;
    std::uint64_t master_seed = 7;
};

// ~3,900 claims over ~1,980 players; tuned so roughly a tenth of the
// five-plus-win players buy at a single store
PopulationSpec default_population_spec();
// the same shape at the scale of the real dataset (~390k claims)
PopulationSpec statewide_population_spec();

void validate_population_spec(const PopulationSpec& spec, const PrizeRegistry& registry);

struct StoreRef {
    std::string name;
    std::string address;
};

struct SynthWin {
    std::string game;
    GameType game_type = GameType::ScratchOff;
    Cents amount_cents = 0;
    Date date;
    std::size_t store = 0; // index into the player's store list
    std::string claim_center;
};

struct SynthPlayer {
    std::string player_id;
    std::string label; // honest | discounter
    std::string city;
    std::string county;
    std::vector<StoreRef> stores;
    std::vector<double> store_weights;
    std::vector<SynthWin> wins;
};

struct GroundTruthManifest {
    std::uint64_t master_seed = 0;
    std::vector<SynthPlayer> players;
};

// Deterministic under spec.master_seed. Throws ValidationError on an empty
// registry or invalid spec.
GroundTruthManifest generate_population(const PopulationSpec& spec,
                                        const PrizeRegistry& registry);

// Claims in the shape ingest consumes; rows come straight from the manifest.
void write_synthetic_claims_csv(std::ostream& out, const GroundTruthManifest& manifest);

void write_manifest_json(std::ostream& out, const GroundTruthManifest& manifest);
GroundTruthManifest read_manifest_json(std::istream& in);

} // namespace lotto
