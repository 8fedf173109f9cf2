#include "lotto/screen.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "lotto/csv.hpp"
#include "lotto/errors.hpp"

namespace lotto {

Micros per_win_gain_micros(Cents prize_cents, const ModelConstants& constants) {
    return cents_to_micros(prize_cents) - constants.unit_loss_micros();
}

double log_mean_net_loss(Micros mean_net_gain_micros) {
    if (mean_net_gain_micros >= -kMicrosPerDollar) return 0.0;
    return std::log10(-static_cast<double>(mean_net_gain_micros) / 1e6);
}

double entropy_from_counts(const std::vector<std::int64_t>& counts) {
    // ln(W) - (sum of w*ln(w)) / W. Algebraically equal to the usual
    // -sum (w/W)*ln(w/W) form, but exactly ln(N) when every count is 1.
    // Counts are summed in sorted order so any relabeling of stores gives
    // the same floating-point result, not just the same value up to ulps.
    std::vector<std::int64_t> sorted;
    sorted.reserve(counts.size());
    for (const std::int64_t w : counts) {
        if (w > 0) sorted.push_back(w);
    }
    if (sorted.size() <= 1) return 0.0;
    std::sort(sorted.begin(), sorted.end());
    std::int64_t total = 0;
    double acc = 0.0;
    for (const std::int64_t w : sorted) {
        total += w;
        if (w > 1) acc += static_cast<double>(w) * std::log(static_cast<double>(w));
    }
    const double e =
        std::log(static_cast<double>(total)) - acc / static_cast<double>(total);
    return e < 0.0 ? 0.0 : e;
}

double entropy(const PlayerProfile& profile) {
    std::vector<std::int64_t> counts;
    counts.reserve(profile.store_counts.size());
    for (const auto& [key, n] : profile.store_counts) counts.push_back(n);
    return entropy_from_counts(counts);
}

std::vector<ScreeningResult> screen_players(const ProfileMap& profiles,
                                            const ModelConstants& constants) {
    std::vector<const PlayerProfile*> order;
    order.reserve(profiles.size());
    for (const auto& [id, p] : profiles) order.push_back(&p);

    std::vector<ScreeningResult> results(order.size());
    const std::int64_t n = static_cast<std::int64_t>(order.size());
#ifdef LOTTO_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        const PlayerProfile& p = *order[static_cast<std::size_t>(i)];
        ScreeningResult& r = results[static_cast<std::size_t>(i)];
        r.player_id = p.player_id;
        r.win_count = p.win_count();
        r.store_count = static_cast<std::int64_t>(p.store_counts.size());
        r.total_cents = p.total_cents;
        r.per_win_gains_micros.reserve(p.wins.size());
        for (const ClaimRecord& w : p.wins) {
            const Micros g = per_win_gain_micros(w.prize_cents, constants);
            r.per_win_gains_micros.push_back(g);
            r.mean_net_gain_micros += g;
        }
        r.entropy = entropy(p);
        r.log_mean_net_loss = log_mean_net_loss(r.mean_net_gain_micros);
    }
    return results;
}

std::vector<std::pair<double, double>> entropy_ecdf(
    const std::vector<ScreeningResult>& results, std::int64_t min_wins) {
    std::vector<double> es;
    for (const ScreeningResult& r : results) {
        if (r.win_count >= min_wins) es.push_back(r.entropy);
    }
    std::sort(es.begin(), es.end());
    std::vector<std::pair<double, double>> points;
    const std::size_t m = es.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (i + 1 == m || es[i + 1] != es[i]) {
            points.emplace_back(es[i],
                                static_cast<double>(i + 1) / static_cast<double>(m));
        }
    }
    return points;
}

double correlation_logloss_entropy(const std::vector<ScreeningResult>& results,
                                   std::int64_t min_wins) {
    // streaming co-moments (Welford update)
    double mx = 0, my = 0, cxx = 0, cyy = 0, cxy = 0;
    std::int64_t n = 0;
    for (const ScreeningResult& r : results) {
        if (r.win_count < min_wins) continue;
        ++n;
        const double x = r.log_mean_net_loss;
        const double y = r.entropy;
        const double dx = x - mx;
        mx += dx / static_cast<double>(n);
        const double dy = y - my;
        my += dy / static_cast<double>(n);
        cxy += dx * (y - my);
        cxx += dx * (x - mx);
        cyy += dy * (y - my);
    }
    if (n < 2 || cxx <= 0.0 || cyy <= 0.0) {
        throw ValidationError(
            "correlation is undefined: need at least two qualifying players with "
            "nonconstant loss and entropy");
    }
    return cxy / std::sqrt(cxx * cyy);
}

std::set<std::string> flag_outliers(std::vector<ScreeningResult>& results,
                                    const FlagRule& rule) {
    std::set<std::string> flagged;
    for (ScreeningResult& r : results) {
        r.flagged = r.entropy >= rule.entropy_min &&
                    r.log_mean_net_loss >= rule.logloss_min;
        if (r.flagged) flagged.insert(r.player_id);
    }
    return flagged;
}

FlagRule calibrate_top_k(const std::vector<ScreeningResult>& results, std::size_t k) {
    if (k == 0 || results.empty()) {
        throw ValidationError("top-k calibration needs k >= 1 and a nonempty screen");
    }
    std::vector<double> es, ls;
    es.reserve(results.size());
    ls.reserve(results.size());
    for (const ScreeningResult& r : results) {
        es.push_back(r.entropy);
        ls.push_back(r.log_mean_net_loss);
    }
    std::sort(es.begin(), es.end(), std::greater<>());
    std::sort(ls.begin(), ls.end(), std::greater<>());
    const std::size_t idx = std::min(k, results.size()) - 1;
    return {es[idx], ls[idx]};
}

std::int64_t count_big_players(const std::vector<ScreeningResult>& results,
                               double entropy_threshold) {
    std::int64_t count = 0;
    for (const ScreeningResult& r : results) {
        if (r.entropy > entropy_threshold) ++count;
    }
    return count;
}

std::string format_micros_usd(Micros m) {
    char buf[48];
    const Micros a = m < 0 ? -m : m;
    std::snprintf(buf, sizeof buf, "%s%lld.%06lld", m < 0 ? "-" : "",
                  static_cast<long long>(a / kMicrosPerDollar),
                  static_cast<long long>(a % kMicrosPerDollar));
    return buf;
}

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

void write_screening_csv(std::ostream& out, const std::vector<ScreeningResult>& results) {
    out << "player_id,win_count,store_count,total_reported_winnings,mean_net_gain,"
           "entropy,log_mean_net_loss,flagged\n";
    for (const ScreeningResult& r : results) {
        out << csv_escape(r.player_id) << ',' << r.win_count << ',' << r.store_count
            << ',' << format_usd(r.total_cents) << ','
            << format_micros_usd(r.mean_net_gain_micros) << ',' << fmt_double(r.entropy)
            << ',' << fmt_double(r.log_mean_net_loss) << ',' << (r.flagged ? 1 : 0)
            << '\n';
    }
}

namespace {

void write_survival(std::ostream& out, const char* label,
                    const std::vector<std::int64_t>& values) {
    std::int64_t max_v = 0;
    for (const std::int64_t v : values) max_v = std::max(max_v, v);
    std::vector<std::int64_t> at_exactly(static_cast<std::size_t>(max_v) + 1, 0);
    for (const std::int64_t v : values) {
        if (v >= 1) ++at_exactly[static_cast<std::size_t>(v)];
    }
    out << label << ",players_with_at_least\n";
    std::int64_t running = 0;
    std::vector<std::int64_t> at_least(static_cast<std::size_t>(max_v) + 1, 0);
    for (std::int64_t x = max_v; x >= 1; --x) {
        running += at_exactly[static_cast<std::size_t>(x)];
        at_least[static_cast<std::size_t>(x)] = running;
    }
    for (std::int64_t x = 1; x <= max_v; ++x) {
        out << x << ',' << at_least[static_cast<std::size_t>(x)] << '\n';
    }
}

} // namespace

void write_wins_survival_csv(std::ostream& out,
                             const std::vector<ScreeningResult>& results) {
    std::vector<std::int64_t> wins;
    wins.reserve(results.size());
    for (const ScreeningResult& r : results) wins.push_back(r.win_count);
    write_survival(out, "wins", wins);
}

void write_stores_survival_csv(std::ostream& out,
                               const std::vector<ScreeningResult>& results) {
    std::vector<std::int64_t> stores;
    stores.reserve(results.size());
    for (const ScreeningResult& r : results) stores.push_back(r.store_count);
    write_survival(out, "stores", stores);
}

void write_entropy_ecdf_csv(std::ostream& out,
                            const std::vector<ScreeningResult>& results,
                            std::int64_t min_wins) {
    out << "entropy,cumulative_fraction\n";
    for (const auto& [e, f] : entropy_ecdf(results, min_wins)) {
        out << fmt_double(e) << ',' << fmt_double(f) << '\n';
    }
}

void write_loss_entropy_csv(std::ostream& out,
                            const std::vector<ScreeningResult>& results) {
    out << "player_id,entropy,log_mean_net_loss,flagged\n";
    for (const ScreeningResult& r : results) {
        out << csv_escape(r.player_id) << ',' << fmt_double(r.entropy) << ','
            << fmt_double(r.log_mean_net_loss) << ',' << (r.flagged ? 1 : 0) << '\n';
    }
}

} // namespace lotto
