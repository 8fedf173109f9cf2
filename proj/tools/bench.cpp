// Timing harness for the two hot kernels: the per-player simulator and the
// clusterer. Each runs single-threaded and at the full thread count, checks
// the outputs are bit-identical, and reports the speedup.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "lotto/cluster.hpp"
#include "lotto/ingest.hpp"
#include "lotto/montecarlo.hpp"
#include "lotto/prizes.hpp"
#include "lotto/rng.hpp"

#ifdef LOTTO_HAVE_OPENMP
#include <omp.h>
#endif

using namespace lotto;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void set_threads(int n) {
#ifdef LOTTO_HAVE_OPENMP
    omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int max_threads() {
#ifdef LOTTO_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

PlayerProfile bench_profile(int wins) {
    std::vector<ClaimRecord> records(static_cast<std::size_t>(wins));
    for (std::size_t i = 0; i < records.size(); ++i) {
        records[i].winner_id = "BENCH PLAYER";
        records[i].prize_cents = 70000;
        records[i].lottery_name = "$10 scratch bench";
        records[i].paid_date = {2016, 1 + static_cast<int>(i % 12), 1};
        records[i].retailer_name = "store " + std::to_string(i % 40);
    }
    return aggregate_players(records).begin()->second;
}

std::vector<FeatureVector> bench_vectors(int n) {
    SeedSpec seeds{99};
    auto stream = seeds.domain_stream(SeedSpec::kKMeans, 42);
    std::vector<FeatureVector> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        FeatureVector f;
        f.player_id = "P" + std::to_string(i);
        double left = 1.0;
        for (int d = 0; d < 5; ++d) {
            f.v[d] = left * stream.next_unit() * 0.5;
            left -= f.v[d];
        }
        f.v[5] = left;
        out.push_back(f);
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    int replicates = 60000;
    int wins = 64;
    int points = 20000;
    if (argc > 1) replicates = std::atoi(argv[1]);
    if (argc > 2) wins = std::atoi(argv[2]);
    if (argc > 3) points = std::atoi(argv[3]);
    if (replicates < 1 || wins < 1 || points < 10) {
        std::fprintf(stderr, "usage: %s [replicates] [wins] [points]\n", argv[0]);
        return 1;
    }
    const int threads = max_threads();
    std::printf("threads available: %d\n\n", threads);

    {
        PrizeTable table;
        table.game_name = "$10 scratch bench";
        table.ticket_cost_cents = 1000;
        table.entries = {{70000, 0.0013}, {2000, 0.08}, {1000, 0.12}};
        const GameResolver resolver = [&](const ClaimRecord&) -> const PrizeTable& {
            return table;
        };
        ModelConstants constants;
        constants.replicates = replicates;
        const PlayerProfile profile = bench_profile(wins);
        const SeedSpec seeds{7};

        std::printf("simulate_player: %d wins x %d replicates\n", wins, replicates);
        auto t0 = std::chrono::steady_clock::now();
        const auto serial = simulate_player_serial(profile, resolver, constants, seeds);
        const double t_serial = seconds_since(t0);
        std::printf("  serial reference   %8.3f s\n", t_serial);

        set_threads(threads);
        t0 = std::chrono::steady_clock::now();
        const auto parallel = simulate_player(profile, resolver, constants, seeds);
        const double t_par = seconds_since(t0);
        std::printf("  parallel (%2d thr)  %8.3f s   speedup %.2fx   %s\n\n", threads,
                    t_par, t_serial / t_par,
                    serial == parallel ? "outputs identical" : "OUTPUTS DIFFER");
        if (serial != parallel) return 1;
    }

    {
        const auto vectors = bench_vectors(points);
        const SeedSpec seeds{7};
        const int k = 25, restarts = 4;

        std::printf("kmeans: %d points, k=%d, %d restarts\n", points, k, restarts);
        set_threads(1);
        auto t0 = std::chrono::steady_clock::now();
        const KMeansResult serial = kmeans(vectors, k, seeds, restarts);
        const double t_serial = seconds_since(t0);
        std::printf("  1 thread           %8.3f s   inertia %.6f\n", t_serial,
                    serial.inertia);

        set_threads(threads);
        t0 = std::chrono::steady_clock::now();
        const KMeansResult parallel = kmeans(vectors, k, seeds, restarts);
        const double t_par = seconds_since(t0);
        const bool same = serial.inertia == parallel.inertia &&
                          serial.assignments == parallel.assignments;
        std::printf("  %2d threads         %8.3f s   speedup %.2fx   %s\n", threads,
                    t_par, t_serial / t_par,
                    same ? "outputs identical" : "OUTPUTS DIFFER");
        if (!same) return 1;
    }
    return 0;
}
