#include "lotto/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "lotto/csv.hpp"
#include "lotto/errors.hpp"

namespace lotto {

namespace {

using Vec6 = std::array<double, 6>;

double sq_dist(const Vec6& a, const Vec6& b) {
    double s = 0.0;
    for (int d = 0; d < 6; ++d) {
        const double t = a[d] - b[d];
        s += t * t;
    }
    return s;
}

// Argmin over centroids, lowest index on ties. Fills assign and d2 per point.
void assign_step(const std::vector<Vec6>& points, const std::vector<Vec6>& centers,
                 std::vector<int>& assign, std::vector<double>& d2) {
    const std::int64_t n = static_cast<std::int64_t>(points.size());
#ifdef LOTTO_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t i = 0; i < n; ++i) {
        int best_c = 0;
        double best = sq_dist(points[i], centers[0]);
        for (std::size_t c = 1; c < centers.size(); ++c) {
            const double d = sq_dist(points[i], centers[c]);
            if (d < best) {
                best = d;
                best_c = static_cast<int>(c);
            }
        }
        assign[i] = best_c;
        d2[i] = best;
    }
}

// Each centroid accumulates its members in point order, so the reduction is
// order-fixed regardless of thread count.
void update_step(const std::vector<Vec6>& points, const std::vector<int>& assign,
                 std::vector<Vec6>& centers, std::vector<std::int64_t>& counts) {
    const std::int64_t k = static_cast<std::int64_t>(centers.size());
#ifdef LOTTO_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::int64_t c = 0; c < k; ++c) {
        Vec6 sum{};
        std::int64_t count = 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (assign[i] == c) {
                for (int d = 0; d < 6; ++d) sum[d] += points[i][d];
                ++count;
            }
        }
        counts[c] = count;
        if (count > 0) {
            for (int d = 0; d < 6; ++d) centers[c][d] = sum[d] / static_cast<double>(count);
        }
        // empty clusters keep their old centroid until reseeded below
    }
}

std::vector<Vec6> seed_centers(const std::vector<Vec6>& points, int k,
                               RandomStream& stream) {
    const std::size_t n = points.size();
    std::vector<Vec6> centers;
    centers.reserve(static_cast<std::size_t>(k));
    centers.push_back(points[stream.next_below(n)]);

    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(points[i], centers[0]);

    while (centers.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (const double d : d2) total += d;
        std::size_t pick = n;
        if (total > 0.0) {
            const double u = stream.next_unit() * total;
            double cum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cum += d2[i];
                if (u < cum) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) { // u landed on accumulated rounding slack
                for (std::size_t i = n; i-- > 0;) {
                    if (d2[i] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            // all points coincide with chosen centers; take the first leftover
            for (std::size_t i = 0; i < n && pick == n; ++i) {
                if (std::find(centers.begin(), centers.end(), points[i]) ==
                    centers.end()) {
                    pick = i;
                }
            }
            if (pick == n) pick = 0;
        }
        centers.push_back(points[pick]);
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], sq_dist(points[i], centers.back()));
        }
    }
    return centers;
}

struct LloydRun {
    std::vector<Vec6> centers;
    std::vector<int> assign;
    std::vector<double> d2;
    std::vector<double> trace;
    double inertia = 0.0;
};

LloydRun lloyd(const std::vector<Vec6>& points, int k, RandomStream stream) {
    constexpr int kMaxIters = 500;
    constexpr double kRelTol = 1e-8;
    const std::size_t n = points.size();

    LloydRun run;
    run.centers = seed_centers(points, k, stream);
    run.assign.assign(n, -1);
    run.d2.assign(n, 0.0);

    std::vector<int> prev_assign(n, -1);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
    double prev_inertia = -1.0;
    bool settled = false;

    for (int iter = 0; iter < kMaxIters; ++iter) {
        assign_step(points, run.centers, run.assign, run.d2);
        double inertia = 0.0;
        for (const double d : run.d2) inertia += d;
        run.trace.push_back(inertia);

        if (run.assign == prev_assign) {
            settled = true;
            break;
        }
        if (prev_inertia >= 0.0 &&
            std::abs(prev_inertia - inertia) <= kRelTol * std::max(prev_inertia, 1e-12)) {
            settled = true;
            break;
        }
        prev_assign = run.assign;
        prev_inertia = inertia;

        update_step(points, run.assign, run.centers, counts);

        // reseed empties to the point farthest from the stranded centroid
        std::vector<std::size_t> used;
        for (int c = 0; c < k; ++c) {
            if (counts[c] != 0) continue;
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (std::find(used.begin(), used.end(), i) != used.end()) continue;
                const double d = sq_dist(points[i], run.centers[c]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            run.centers[c] = points[far];
            used.push_back(far);
        }
    }

    if (!settled) { // ran out of iterations right after an update
        assign_step(points, run.centers, run.assign, run.d2);
        double inertia = 0.0;
        for (const double d : run.d2) inertia += d;
        run.trace.push_back(inertia);
    }
    run.inertia = run.trace.back();
    return run;
}

} // namespace

FeatureVector feature_vector(const PlayerProfile& profile) {
    if (profile.wins.empty()) {
        throw ValidationError("player \"" + profile.player_id + "\" has no wins");
    }
    std::vector<std::pair<const StoreKey*, std::int64_t>> ranked;
    ranked.reserve(profile.store_counts.size());
    for (const auto& [key, count] : profile.store_counts) {
        ranked.emplace_back(&key, count);
    }
    // map order already breaks count ties by store key
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });

    FeatureVector f;
    f.player_id = profile.player_id;
    const double total = static_cast<double>(profile.win_count());
    std::int64_t top = 0;
    for (std::size_t i = 0; i < 5 && i < ranked.size(); ++i) {
        f.v[i] = static_cast<double>(ranked[i].second) / total;
        top += ranked[i].second;
    }
    f.v[5] = static_cast<double>(profile.win_count() - top) / total;
    return f;
}

KMeansResult kmeans(const std::vector<FeatureVector>& vectors, int k,
                    const SeedSpec& seeds, int restarts) {
    if (vectors.empty()) {
        throw ValidationError("clustering requires at least one feature vector");
    }
    if (k < 1) throw ValidationError("cluster count must be positive");
    if (restarts < 1) throw ValidationError("restart count must be positive");

    std::vector<Vec6> points;
    points.reserve(vectors.size());
    for (const FeatureVector& f : vectors) points.push_back(f.v);

    std::set<Vec6> distinct(points.begin(), points.end());
    if (static_cast<std::size_t>(k) > distinct.size()) {
        throw ValidationError("cluster count " + std::to_string(k) + " exceeds the " +
                              std::to_string(distinct.size()) +
                              " distinct feature vectors");
    }

    LloydRun best;
    int best_restart = -1;
    for (int r = 0; r < restarts; ++r) {
        LloydRun run = lloyd(points, k,
                             seeds.domain_stream(SeedSpec::kKMeans,
                                                 static_cast<std::uint64_t>(r)));
        if (best_restart < 0 || run.inertia < best.inertia) {
            best = std::move(run);
            best_restart = r;
        }
    }

    KMeansResult result;
    result.centroids = std::move(best.centers);
    result.inertia = best.inertia;
    result.inertia_trace = std::move(best.trace);
    result.iterations = static_cast<int>(result.inertia_trace.size());
    result.best_restart = best_restart;
    result.assignments.reserve(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        result.assignments.push_back({vectors[i].player_id, best.assign[i],
                                      std::sqrt(best.d2[i])});
    }
    return result;
}

CoClusterReport co_cluster_report(const std::vector<ClusterAssignment>& assignments,
                                  const std::set<std::string>& flagged) {
    std::map<int, CoClusterEntry> all;
    std::set<int> keep;
    for (const ClusterAssignment& a : assignments) {
        CoClusterEntry& entry = all[a.cluster_index];
        if (flagged.count(a.player_id)) {
            entry.flagged.push_back(a.player_id);
            keep.insert(a.cluster_index);
        } else {
            entry.unflagged.push_back(a.player_id);
        }
    }

    CoClusterReport report;
    for (const int c : keep) {
        CoClusterEntry entry = all[c];
        std::sort(entry.flagged.begin(), entry.flagged.end());
        std::sort(entry.unflagged.begin(), entry.unflagged.end());
        report.expansion_set.insert(report.expansion_set.end(),
                                    entry.unflagged.begin(), entry.unflagged.end());
        report.clusters.emplace(c, std::move(entry));
    }
    std::sort(report.expansion_set.begin(), report.expansion_set.end());
    return report;
}

std::vector<StabilityRow> stability_sweep(const std::vector<FeatureVector>& vectors,
                                          const std::vector<int>& k_values,
                                          const SeedSpec& seeds,
                                          const std::set<std::string>& flagged,
                                          int restarts) {
    std::vector<StabilityRow> rows;
    rows.reserve(k_values.size());
    for (const int k : k_values) {
        const KMeansResult result = kmeans(vectors, k, seeds, restarts);
        std::map<int, std::int64_t> flagged_per_cluster;
        std::int64_t present = 0;
        for (const ClusterAssignment& a : result.assignments) {
            if (flagged.count(a.player_id)) {
                ++flagged_per_cluster[a.cluster_index];
                ++present;
            }
        }
        StabilityRow row;
        row.k = k;
        row.clusters_with_flagged = static_cast<int>(flagged_per_cluster.size());
        if (present == 0) {
            row.co_clustered = true;
        } else {
            std::int64_t modal = 0;
            for (const auto& [c, count] : flagged_per_cluster) modal = std::max(modal, count);
            row.co_clustered = flagged_per_cluster.size() == 1;
            row.largest_fraction =
                static_cast<double>(modal) / static_cast<double>(present);
        }
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::string fmt_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

void write_clusters_csv(std::ostream& out,
                        const std::vector<ClusterAssignment>& assignments,
                        const std::set<std::string>& flagged,
                        const std::set<std::string>& expansion) {
    out << "player_id,cluster_index,distance_to_centroid,flagged,in_expansion_set\n";
    for (const ClusterAssignment& a : assignments) {
        out << csv_row({a.player_id, std::to_string(a.cluster_index),
                        fmt_real(a.distance_to_centroid),
                        flagged.count(a.player_id) ? "1" : "0",
                        expansion.count(a.player_id) ? "1" : "0"});
    }
}

void write_cluster_scatter_csv(std::ostream& out,
                               const std::vector<ScreeningResult>& screening,
                               const std::vector<ClusterAssignment>& assignments,
                               const std::set<int>& flag_clusters,
                               double entropy_floor) {
    std::map<std::string, int> cluster_of;
    for (const ClusterAssignment& a : assignments) cluster_of[a.player_id] = a.cluster_index;

    out << "entropy,log_mean_net_loss,cluster_tag\n";
    for (const ScreeningResult& r : screening) {
        if (r.entropy < entropy_floor) continue;
        const auto it = cluster_of.find(r.player_id);
        const char* tag = it == cluster_of.end()         ? "none"
                          : flag_clusters.count(it->second) ? "flag-cluster"
                                                            : "other-cluster";
        out << csv_row({fmt_real(r.entropy), fmt_real(r.log_mean_net_loss), tag});
    }
}

} // namespace lotto
