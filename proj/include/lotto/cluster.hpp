#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lotto/ingest.hpp"
#include "lotto/rng.hpp"
#include "lotto/screen.hpp"

namespace lotto {

// Store-behavior features: proportions of a player's wins claimed at their
// five most-visited stores (descending), then everything else.
struct FeatureVector {
    std::string player_id;
    std::array<double, 6> v{};

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Ranks stores by win count descending, ties broken by store key order.
// Throws ValidationError for a player with no wins.
FeatureVector feature_vector(const PlayerProfile& profile);

struct ClusterAssignment {
    std::string player_id;
    int cluster_index = 0;
    double distance_to_centroid = 0.0; // Euclidean

    friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;
};

struct KMeansResult {
    std::vector<std::array<double, 6>> centroids;
    std::vector<ClusterAssignment> assignments; // input order
    double inertia = 0.0;                       // sum of squared distances
    std::vector<double> inertia_trace;          // winning restart, per iteration
    int iterations = 0;
    int best_restart = 0;
};

// Lloyd iterations with distance-weighted seeding; the best of `restarts`
// independent runs (lowest inertia, earliest restart on ties) is returned.
// Deterministic for fixed (vectors, k, seeds, restarts) at any thread count.
// Throws ValidationError if k < 1, k exceeds the number of distinct vectors,
// restarts < 1, or vectors is empty.
KMeansResult kmeans(const std::vector<FeatureVector>& vectors, int k,
                    const SeedSpec& seeds, int restarts = 20);

struct CoClusterEntry {
    std::vector<std::string> flagged;   // sorted
    std::vector<std::string> unflagged; // sorted
};

struct CoClusterReport {
    std::map<int, CoClusterEntry> clusters;  // only clusters holding flagged players
    std::vector<std::string> expansion_set;  // sorted unflagged peers of those clusters
};

CoClusterReport co_cluster_report(const std::vector<ClusterAssignment>& assignments,
                                  const std::set<std::string>& flagged);

struct StabilityRow {
    int k = 0;
    int clusters_with_flagged = 0;
    bool co_clustered = false;    // every present flagged player in one cluster
    double largest_fraction = 0.0; // share of flagged in their modal cluster
};

std::vector<StabilityRow> stability_sweep(const std::vector<FeatureVector>& vectors,
                                          const std::vector<int>& k_values,
                                          const SeedSpec& seeds,
                                          const std::set<std::string>& flagged,
                                          int restarts = 20);

// player_id,cluster_index,distance_to_centroid,flagged,in_expansion_set
void write_clusters_csv(std::ostream& out,
                        const std::vector<ClusterAssignment>& assignments,
                        const std::set<std::string>& flagged,
                        const std::set<std::string>& expansion);

// Scatter rows (entropy, log mean net loss, tag) for players at or above the
// entropy floor. Tag is flag-cluster, other-cluster, or none for players that
// were not clustered.
void write_cluster_scatter_csv(std::ostream& out,
                               const std::vector<ScreeningResult>& screening,
                               const std::vector<ClusterAssignment>& assignments,
                               const std::set<int>& flag_clusters,
                               double entropy_floor = 2.5);

} // namespace lotto
