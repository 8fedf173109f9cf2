#include "lotto/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "lotto/csv.hpp"

namespace lotto {

SimTable::SimTable(const PrizeTable& table, Cents big_threshold_cents) {
    cost_cents = table.ticket_cost_cents;
    p_big = table.p_big(big_threshold_cents);
    if (p_big <= 0.0) {
        throw UnusableTableError("game \"" + table.game_name +
                                 "\" has no prize above the recording threshold");
    }
    double cum = 0.0;
    for (const PrizeEntry& e : table.entries) {
        cum += e.probability;
        entry_values.push_back(e.value_cents);
        entry_cum.push_back(cum);
        entry_is_big.push_back(e.value_cents > big_threshold_cents ? 1 : 0);
    }
    if (p_big < 1.0) {
        for (const PrizeEntry& e : table.entries) {
            if (e.value_cents <= big_threshold_cents) {
                small_values.push_back(e.value_cents);
                small_cond_probs.push_back(e.probability / (1.0 - p_big));
            }
        }
    }
}

namespace detail {

void throw_ticket_cap(std::int64_t cap) {
    throw CapExceededError("simulated purchase run exceeded the ticket cap of " +
                           std::to_string(cap));
}

} // namespace detail

namespace {

std::vector<Cents> simulate_player_impl(const PlayerProfile& profile,
                                        const GameResolver& resolver,
                                        const ModelConstants& constants,
                                        const SeedSpec& seeds, SimEngine engine,
                                        bool parallel) {
    const std::size_t wins = profile.wins.size();
    if (wins == 0) {
        throw ValidationError("player \"" + profile.player_id + "\" has no wins");
    }
    std::vector<SimTable> tables;
    std::vector<Cents> prizes;
    tables.reserve(wins);
    prizes.reserve(wins);
    for (std::size_t j = 0; j < wins; ++j) {
        try {
            tables.emplace_back(resolver(profile.wins[j]),
                                constants.big_prize_threshold_cents);
        } catch (const ValidationError& e) {
            throw ResolutionError("player \"" + profile.player_id + "\", win " +
                                  std::to_string(j) + ": " + e.what());
        }
        prizes.push_back(profile.wins[j].prize_cents);
    }

    const std::int64_t replicates = constants.replicates;
    std::vector<Cents> totals(static_cast<std::size_t>(replicates), 0);

    const auto run_replicate = [&](std::int64_t k, std::vector<std::int64_t>& scratch) {
        Cents sum = 0;
        for (std::size_t j = 0; j < wins; ++j) {
            auto stream = seeds.sim_stream(profile.player_id,
                                           static_cast<std::uint32_t>(j),
                                           static_cast<std::uint32_t>(k));
            const WinSimOutcome outcome =
                engine == SimEngine::Fast
                    ? simulate_win_fast(tables[j], prizes[j], stream, scratch)
                    : simulate_win_ticket_loop(tables[j], prizes[j], stream);
            sum += outcome.net_gain_cents;
        }
        totals[static_cast<std::size_t>(k)] = sum;
    };

    if (parallel) {
#ifdef LOTTO_HAVE_OPENMP
#pragma omp parallel
        {
            std::vector<std::int64_t> scratch;
#pragma omp for schedule(static)
            for (std::int64_t k = 0; k < replicates; ++k) run_replicate(k, scratch);
        }
        return totals;
#endif
    }
    std::vector<std::int64_t> scratch;
    for (std::int64_t k = 0; k < replicates; ++k) run_replicate(k, scratch);
    return totals;
}

} // namespace

std::vector<Cents> simulate_player(const PlayerProfile& profile,
                                   const GameResolver& resolver,
                                   const ModelConstants& constants,
                                   const SeedSpec& seeds, SimEngine engine) {
    return simulate_player_impl(profile, resolver, constants, seeds, engine, true);
}

std::vector<Cents> simulate_player_serial(const PlayerProfile& profile,
                                          const GameResolver& resolver,
                                          const ModelConstants& constants,
                                          const SeedSpec& seeds, SimEngine engine) {
    return simulate_player_impl(profile, resolver, constants, seeds, engine, false);
}

std::pair<double, double> bonferroni_quantiles(double level, std::int64_t B) {
    if (B < 1) {
        throw ValidationError("Bonferroni adjustment is undefined for B = " +
                              std::to_string(B));
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw ValidationError("interval level must lie strictly between 0 and 1");
    }
    const double tail_percent = (1.0 - level) / 2.0 * 100.0;
    const double adjusted = tail_percent / static_cast<double>(B);
    return {adjusted, 100.0 - adjusted};
}

Cents nearest_rank_quantile(const std::vector<Cents>& sorted_totals, double q_percent) {
    const std::int64_t k = static_cast<std::int64_t>(sorted_totals.size());
    if (k == 0) throw ValidationError("quantile of an empty sample");
    auto rank = static_cast<std::int64_t>(
        std::ceil(q_percent / 100.0 * static_cast<double>(k)));
    rank = std::max<std::int64_t>(1, std::min(rank, k));
    return sorted_totals[static_cast<std::size_t>(rank - 1)];
}

SimulationSummary summarize(std::vector<Cents> totals,
                            std::pair<double, double> quantiles,
                            const std::string& player_id, std::int64_t b_used) {
    if (totals.empty()) {
        throw ValidationError("cannot summarize an empty replicate set");
    }
    SimulationSummary s;
    s.player_id = player_id;
    s.replicates = static_cast<std::int64_t>(totals.size());
    s.lower_quantile = quantiles.first;
    s.upper_quantile = quantiles.second;
    s.b_used = b_used;

    std::int64_t sum = 0;
    for (const Cents t : totals) sum += t;
    s.mean_net_gain =
        static_cast<double>(sum) / (100.0 * static_cast<double>(s.replicates));

    std::sort(totals.begin(), totals.end());
    s.lower_cents = nearest_rank_quantile(totals, quantiles.first);
    s.upper_cents = nearest_rank_quantile(totals, quantiles.second);
    return s;
}

namespace {

std::string fmt_dollars(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string fmt_quantile(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

} // namespace

void write_simulation_csv(std::ostream& out, const std::vector<PlayerSimRow>& rows) {
    out << "player_id,win_count,total_reported_winnings,mean_net_gain,lower,upper,"
           "lower_quantile,upper_quantile,replicates,b_used,master_seed\n";
    for (const PlayerSimRow& r : rows) {
        out << csv_escape(r.summary.player_id) << ',' << r.win_count << ','
            << format_usd(r.total_reported_cents) << ','
            << fmt_dollars(r.summary.mean_net_gain) << ','
            << format_usd(r.summary.lower_cents) << ','
            << format_usd(r.summary.upper_cents) << ','
            << fmt_quantile(r.summary.lower_quantile) << ','
            << fmt_quantile(r.summary.upper_quantile) << ',' << r.summary.replicates
            << ',' << r.summary.b_used << ',' << r.master_seed << '\n';
    }
}

void write_simulation_report_csv(std::ostream& out,
                                 const std::vector<PlayerSimRow>& rows) {
    out << "player_id,win_count,total_reported_winnings,mean_net_gain,lower,upper\n";
    for (const PlayerSimRow& r : rows) {
        out << csv_escape(r.summary.player_id) << ',' << r.win_count << ','
            << format_usd(r.total_reported_cents) << ','
            << round_to_thousands(r.summary.mean_net_gain) * 1000 << ','
            << round_to_thousands(cents_to_dollars(r.summary.lower_cents)) * 1000 << ','
            << round_to_thousands(cents_to_dollars(r.summary.upper_cents)) * 1000
            << '\n';
    }
}

void write_totals_csv(std::ostream& out, const std::string& player_id,
                      const std::vector<Cents>& totals) {
    out << "player_id,replicate,net_gain\n";
    for (std::size_t k = 0; k < totals.size(); ++k) {
        out << csv_escape(player_id) << ',' << k << ',' << format_usd(totals[k])
            << '\n';
    }
}

} // namespace lotto
