#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "lotto/errors.hpp"
#include "lotto/ingest.hpp"
#include "lotto/money.hpp"
#include "lotto/prizes.hpp"
#include "lotto/rng.hpp"
#include "lotto/screen.hpp"

namespace lotto {

constexpr std::int64_t kDefaultTicketCap = 1'000'000'000;

/// A prize table compiled for simulation: cumulative probabilities for the
/// per-ticket draw and conditional small-prize probabilities for the
/// geometric shortcut.
struct SimTable {
    Cents cost_cents = 0;
    double p_big = 0.0;
    std::vector<Cents> entry_values;
    std::vector<double> entry_cum; // inclusive cumulative probability
    std::vector<char> entry_is_big;
    std::vector<Cents> small_values;
    std::vector<double> small_cond_probs; // q_x / (1 - p_big)

    SimTable() = default;
    SimTable(const PrizeTable& table, Cents big_threshold_cents = 60000);
};

/// Simulated purchase run behind one recorded win.
struct WinSimOutcome {
    std::int64_t tickets_bought = 0;
    Cents small_prize_total_cents = 0;
    Cents net_gain_cents = 0;
};

namespace detail {
inline WinSimOutcome finish_outcome(const SimTable& table, Cents prize_cents,
                                    std::int64_t tickets, Cents small_total) {
    WinSimOutcome out;
    out.tickets_bought = tickets;
    out.small_prize_total_cents = small_total;
    out.net_gain_cents = prize_cents + small_total - tickets * table.cost_cents;
    return out;
}

[[noreturn]] void throw_ticket_cap(std::int64_t cap);
} // namespace detail

/// Reference engine: buy tickets one at a time until the first prize above
/// the threshold, tallying small prizes. The final ticket contributes the
/// KNOWN recorded prize, not a resampled one.
template <UniformSource S>
WinSimOutcome simulate_win_ticket_loop(const SimTable& table, Cents prize_cents, S& src,
                                       std::int64_t ticket_cap = kDefaultTicketCap) {
    std::int64_t tickets = 0;
    Cents small_total = 0;
    while (true) {
        if (tickets >= ticket_cap) detail::throw_ticket_cap(ticket_cap);
        ++tickets;
        const double u = src.next_unit();
        std::size_t i = 0;
        for (; i < table.entry_cum.size(); ++i) {
            if (u < table.entry_cum[i]) break;
        }
        if (i == table.entry_cum.size()) continue; // no prize
        if (table.entry_is_big[i]) break;
        small_total += table.entry_values[i];
    }
    return detail::finish_outcome(table, prize_cents, tickets, small_total);
}

/// Fast engine, exact in distribution: tickets ~ Geometric(p_big), then
/// small-prize counts for the losing tickets from the conditional
/// multinomial. Scratch avoids a per-call allocation in hot loops.
template <UniformSource S>
WinSimOutcome simulate_win_fast(const SimTable& table, Cents prize_cents, S& src,
                                std::vector<std::int64_t>& scratch,
                                std::int64_t ticket_cap = kDefaultTicketCap) {
    const std::int64_t tickets = sample_geometric(table.p_big, src);
    if (tickets > ticket_cap) detail::throw_ticket_cap(ticket_cap);
    Cents small_total = 0;
    if (tickets > 1 && !table.small_values.empty()) {
        sample_multinomial(tickets - 1, table.small_cond_probs, scratch, src);
        for (std::size_t x = 0; x < scratch.size(); ++x) {
            small_total += scratch[x] * table.small_values[x];
        }
    }
    return detail::finish_outcome(table, prize_cents, tickets, small_total);
}

template <UniformSource S>
WinSimOutcome simulate_win_fast(const SimTable& table, Cents prize_cents, S& src,
                                std::int64_t ticket_cap = kDefaultTicketCap) {
    std::vector<std::int64_t> scratch;
    return simulate_win_fast(table, prize_cents, src, scratch, ticket_cap);
}

enum class SimEngine { Fast, TicketLoop };

using GameResolver = std::function<const PrizeTable&(const ClaimRecord&)>;

/// Per-replicate total net gains for one player (length = replicates).
/// Every (win, replicate) pair draws from its own derived stream, so the
/// result is bit-identical for a given SeedSpec at any thread count.
std::vector<Cents> simulate_player(const PlayerProfile& profile,
                                   const GameResolver& resolver,
                                   const ModelConstants& constants,
                                   const SeedSpec& seeds,
                                   SimEngine engine = SimEngine::Fast);

/// Single-threaded reference used by tests and the benchmark.
std::vector<Cents> simulate_player_serial(const PlayerProfile& profile,
                                          const GameResolver& resolver,
                                          const ModelConstants& constants,
                                          const SeedSpec& seeds,
                                          SimEngine engine = SimEngine::Fast);

/// Multiple-testing-adjusted percentile pair (percent units): the level's
/// two tails are each shrunk by the big-player count B.
std::pair<double, double> bonferroni_quantiles(double level, std::int64_t B);

struct SimulationSummary {
    std::string player_id;
    std::int64_t replicates = 0;
    double mean_net_gain = 0.0; // dollars
    Cents lower_cents = 0;
    Cents upper_cents = 0;
    double lower_quantile = 0.0; // percent
    double upper_quantile = 0.0; // percent
    std::int64_t b_used = 0;
};

/// Nearest-rank empirical quantile: rank = ceil(q * K) clamped to [1, K]
/// over the sorted totals, q given in percent.
Cents nearest_rank_quantile(const std::vector<Cents>& sorted_totals, double q_percent);

SimulationSummary summarize(std::vector<Cents> totals,
                            std::pair<double, double> quantiles,
                            const std::string& player_id, std::int64_t b_used);

/// One output row: the summary plus the player context it reports on.
struct PlayerSimRow {
    SimulationSummary summary;
    std::int64_t win_count = 0;
    Cents total_reported_cents = 0;
    std::uint64_t master_seed = 0;
};

void write_simulation_csv(std::ostream& out, const std::vector<PlayerSimRow>& rows);

/// Same rows rounded to the nearest $1,000 for the report table; rounding
/// happens only here, never in stored summaries.
void write_simulation_report_csv(std::ostream& out,
                                 const std::vector<PlayerSimRow>& rows);

void write_totals_csv(std::ostream& out, const std::string& player_id,
                      const std::vector<Cents>& totals);

} // namespace lotto
