#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lotto/ingest.hpp"
#include "lotto/money.hpp"
#include "lotto/prizes.hpp"

namespace lotto {

/// First-stage screening numbers for one player. Gains are micro-dollars
/// so that per-win sums and break-even comparisons are exact.
struct ScreeningResult {
    std::string player_id;
    Micros mean_net_gain_micros = 0;
    std::vector<Micros> per_win_gains_micros;
    double entropy = 0.0;
    double log_mean_net_loss = 0.0;
    std::int64_t win_count = 0;
    std::int64_t store_count = 0;
    Cents total_cents = 0;
    bool flagged = false;
};

/// Expected net gain of one recorded win: the prize minus the expected
/// spend (net of small prizes) to reach it, (1/p) * mean_cost * (1 - r_s).
Micros per_win_gain_micros(Cents prize_cents, const ModelConstants& constants);

/// log10 of the expected loss in dollars; anything above a $1 loss rounds
/// to 0 so the transform is total and nonnegative.
double log_mean_net_loss(Micros mean_net_gain_micros);

/// Shannon entropy (nats) of the per-store win distribution.
double entropy_from_counts(const std::vector<std::int64_t>& counts);
double entropy(const PlayerProfile& profile);

/// Compute screening results for every player, ordered by player_id.
/// Output is independent of worker-thread count.
std::vector<ScreeningResult> screen_players(const ProfileMap& profiles,
                                            const ModelConstants& constants);

/// Empirical CDF of entropy over players with at least `min_wins` wins:
/// one (entropy, cumulative fraction) point per distinct entropy value.
std::vector<std::pair<double, double>> entropy_ecdf(
    const std::vector<ScreeningResult>& results, std::int64_t min_wins = 5);

/// Pearson correlation between log mean net loss and entropy over players
/// with at least `min_wins` wins. Throws ValidationError when undefined.
double correlation_logloss_entropy(const std::vector<ScreeningResult>& results,
                                   std::int64_t min_wins = 5);

/// Rectangle rule: flag players with entropy >= entropy_min and
/// log mean net loss >= logloss_min.
struct FlagRule {
    double entropy_min = 0.0;
    double logloss_min = 0.0;
};

/// Apply the rule, set each result's `flagged`, return the flagged ids.
std::set<std::string> flag_outliers(std::vector<ScreeningResult>& results,
                                    const FlagRule& rule);

/// Convenience calibration: thresholds at the k-th largest entropy and the
/// k-th largest log loss. Flags exactly k players when the same players
/// top both axes, fewer otherwise.
FlagRule calibrate_top_k(const std::vector<ScreeningResult>& results, std::size_t k);

/// Number of players whose entropy strictly exceeds the threshold; sizes
/// the multiple-testing adjustment.
std::int64_t count_big_players(const std::vector<ScreeningResult>& results,
                               double entropy_threshold);

std::string format_micros_usd(Micros m);

// Tabular emitters for the run report.
void write_screening_csv(std::ostream& out, const std::vector<ScreeningResult>& results);
void write_wins_survival_csv(std::ostream& out,
                             const std::vector<ScreeningResult>& results);
void write_stores_survival_csv(std::ostream& out,
                               const std::vector<ScreeningResult>& results);
void write_entropy_ecdf_csv(std::ostream& out,
                            const std::vector<ScreeningResult>& results,
                            std::int64_t min_wins = 5);
void write_loss_entropy_csv(std::ostream& out,
                            const std::vector<ScreeningResult>& results);

} // namespace lotto
