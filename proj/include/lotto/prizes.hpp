#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lotto/ingest.hpp"
#include "lotto/money.hpp"

namespace lotto {

struct PrizeEntry {
    Cents value_cents = 0;
    double probability = 0.0;

    friend bool operator==(const PrizeEntry&, const PrizeEntry&) = default;
};

/// A game as a one-prize-per-ticket categorical draw. Probabilities may sum
/// to less than 1; the remainder is "no prize".
struct PrizeTable {
    std::string game_name;
    Cents ticket_cost_cents = 0;
    std::vector<PrizeEntry> entries;

    /// Probability that one ticket pays strictly more than the threshold.
    double p_big(Cents threshold_cents = 60000) const;

    /// Expected small-prize payout per ticket as a fraction of its cost.
    double small_return_rate(Cents threshold_cents = 60000) const;

    /// Expected payout over all prizes as a fraction of ticket cost.
    double total_return_rate() const;

    friend bool operator==(const PrizeTable&, const PrizeTable&) = default;
};

/// Enforce table invariants; throws ValidationError naming the game.
void validate_table(const PrizeTable& table);

struct PrizeRegistry {
    std::map<std::string, PrizeTable> tables;

    const PrizeTable* find(const std::string& game_name) const;

    friend bool operator==(const PrizeRegistry&, const PrizeRegistry&) = default;
};

PrizeRegistry load_prize_tables(std::istream& source);
PrizeRegistry load_prize_tables_file(const std::string& path);
void write_prize_tables(std::ostream& out, const PrizeRegistry& registry);

/// Yearly aggregate return rates.
struct ReturnRates {
    int year = 0;
    double g_all = 0;  // total prize money paid out
    double g_big = 0;  // payout in prizes above the recording threshold
    double s_all = 0;  // total sales
    double R = 0;      // g_all / s_all
    double R_s = 0;    // (g_all - g_big) / s_all
};

ReturnRates return_rates_from_totals(int year, double g_all, double g_big, double s_all);

/// Global model constants; every field can be overridden by configuration.
struct ModelConstants {
    double p_big_default = 0.001226816;  // scratch-off chance of a recorded win
    double mean_ticket_cost = 14.32653;  // dollars
    double small_return_rate = 0.5677;   // expected small-prize return fraction
    Cents big_prize_threshold_cents = 60000;
    int replicates = 60000;
    int cluster_k = 25;
    double big_player_entropy_threshold = std::log(5.0); // nats
    double interval_level = 0.80;

    /// Expected spend net of small-prize returns per recorded win,
    /// (1/p) * mean_cost * (1 - small_return_rate), in micro-dollars.
    Micros unit_loss_micros() const {
        return std::llround(1.0 / p_big_default * mean_ticket_cost *
                            (1.0 - small_return_rate) * 1e6);
    }
};

/// One claim-to-game resolution rule: either an exact lottery name, or a
/// (game type, ticket cost) pair where the cost is read from the claim's
/// lottery name (e.g. "$10 scratch ...").
struct MappingRule {
    std::optional<std::string> name;
    std::optional<GameType> game_type;
    std::optional<Cents> ticket_cost_cents;
    std::string game;
};

struct GameMapping {
    std::vector<MappingRule> rules;
};

GameMapping load_game_mapping(std::istream& source);
GameMapping load_game_mapping_file(const std::string& path);

/// Extract a "$N" price embedded in a game name.
bool try_price_from_name(std::string_view name, Cents& out);

/// Map a claim to its prize table: exact name in the registry first, then
/// the first matching rule. Throws ResolutionError when nothing matches and
/// UnusableTableError when the resolved table cannot pay a recorded prize.
const PrizeTable& resolve_game(const ClaimRecord& record, const PrizeRegistry& registry,
                               const GameMapping& mapping,
                               Cents big_threshold_cents = 60000);

} // namespace lotto
