#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace lotto {

// ---------------------------------------------------------------------------
// Counter-based random streams.
//
// Every random draw in the project flows from one 64-bit master seed.
// A stream is identified by (master_seed, domain, player, win, replicate)
// and is generated with Philox4x32-10, so any work item can be computed
// on any thread, in any order, and still produce the same numbers.
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(std::string_view text);

/// Output-mixing step of splitmix64; used to spread seed material.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Philox4x32-10 block cipher core (Salmon et al. counter-based RNG).
struct Philox4x32 {
    static constexpr std::uint32_t kMult0 = 0xD2511F53u;
    static constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * ctr[2];
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }
};

/// One independent random stream. Satisfies UniformRandomBitGenerator.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::array<std::uint32_t, 2> key, std::array<std::uint32_t, 3> stream_id)
        : key_(key), id_(stream_id) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    std::uint64_t next_u64() {
        if (have_ == 0) refill();
        const std::uint64_t hi = buf_[--have_];
        const std::uint64_t lo = buf_[--have_];
        return (hi << 32) | lo;
    }

    result_type operator()() { return next_u64(); }

    /// Uniform double in the open interval (0, 1); never 0, safe under log().
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n) {
        // multiply-shift; bias is < 2^-64 per draw, immaterial here
        const unsigned __int128 wide = static_cast<unsigned __int128>(next_u64()) * n;
        return static_cast<std::uint64_t>(wide >> 64);
    }

private:
    void refill() {
        const auto out = Philox4x32::block({block_, id_[0], id_[1], id_[2]}, key_);
        buf_ = out;
        have_ = 4;
        ++block_;
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 3> id_;
    std::uint32_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int have_ = 0;
};

/// Reproducibility contract for a run: every stream is a pure function of
/// the master seed and the work-item coordinates, never of thread schedule.
struct SeedSpec {
    std::uint64_t master_seed = 0;

    // Domain tags keep unrelated consumers of the seed independent.
    static constexpr std::uint32_t kSim = 1;
    static constexpr std::uint32_t kSynth = 2;
    static constexpr std::uint32_t kKMeans = 3;

    /// Stream for (player, win j, replicate k) in the simulator.
    /// Derivation: key = mix64(master ^ mix64(kSim) ^ fnv1a64(player_id)),
    /// counter = (block, win, replicate). Distinct (win, replicate) pairs
    /// are distinct counters, hence disjoint streams by construction.
    RandomStream sim_stream(std::string_view player_id, std::uint32_t win_index,
                            std::uint32_t replicate_index) const {
        const std::uint64_t k = mix64(master_seed ^ mix64(kSim) ^ fnv1a64(player_id));
        return RandomStream({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)},
                            {0, win_index, replicate_index});
    }

    /// Stream for non-simulation consumers (generator, k-means seeding).
    RandomStream domain_stream(std::uint32_t domain, std::uint64_t a = 0,
                               std::uint64_t b = 0) const {
        const std::uint64_t k = mix64(master_seed ^ mix64(domain) ^ mix64(a ^ mix64(b)));
        return RandomStream({static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)},
                            {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                             domain});
    }
};

/// Anything that yields uniforms in (0, 1). Lets tests drive the
/// simulators with scripted draw sequences.
template <class S>
concept UniformSource = requires(S s) {
    { s.next_unit() } -> std::convertible_to<double>;
};

/// Test double: replays a fixed list of uniforms.
class ScriptedSource {
public:
    explicit ScriptedSource(std::vector<double> values) : values_(std::move(values)) {}
    double next_unit();
    std::size_t consumed() const { return pos_; }

private:
    std::vector<double> values_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Samplers. All take an arbitrary UniformSource so the same code paths are
// exercised by Philox streams in production and scripted values in tests.
// ---------------------------------------------------------------------------

double log_factorial(std::int64_t n);

/// Number of trials up to and including the first success, support {1,2,...}.
template <UniformSource S>
std::int64_t sample_geometric(double p, S& src) {
    if (p >= 1.0) return 1;
    // inversion: N = ceil(log(U) / log(1-p)), U in (0,1)
    const double u = src.next_unit();
    const double n = std::ceil(std::log(u) / std::log1p(-p));
    if (!(n >= 1.0)) return 1;
    if (n >= 9.2e18) return INT64_MAX;
    return static_cast<std::int64_t>(n);
}

namespace detail {
std::int64_t binomial_inversion(std::int64_t n, double p, double u);

template <UniformSource S>
std::int64_t binomial_btrs(std::int64_t n, double p, S& src) {
    // Hormann's transformed-rejection sampler; requires p <= 0.5, n*p >= 10.
    const double q = 1.0 - p;
    const double spq = std::sqrt(n * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = n * p + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const std::int64_t m = static_cast<std::int64_t>((n + 1) * p);
    const double h = log_factorial(m) + log_factorial(n - m);

    while (true) {
        double v = src.next_unit();
        double u;
        if (v <= 0.86 * v_r) {
            u = v / v_r - 0.43;
            return static_cast<std::int64_t>(
                std::floor((2.0 * a / (0.5 - std::abs(u)) + b) * u + c));
        }
        if (v >= v_r) {
            u = src.next_unit() - 0.5;
        } else {
            u = v / v_r - 0.93;
            u = (u < 0 ? -0.5 : 0.5) - u;
            v = src.next_unit() * v_r;
        }
        const double us = 0.5 - std::abs(u);
        const double kd = std::floor((2.0 * a / us + b) * u + c);
        if (kd < 0 || kd > static_cast<double>(n)) continue;
        const std::int64_t k = static_cast<std::int64_t>(kd);
        v = v * alpha / (a / (us * us) + b);
        if (std::log(v) <=
            h - log_factorial(k) - log_factorial(n - k) + (k - m) * lpq) {
            return k;
        }
    }
}
} // namespace detail

/// Binomial(n, p) count. Inversion for small n*p, transformed rejection
/// otherwise; both paths are exact in distribution.
template <UniformSource S>
std::int64_t sample_binomial(std::int64_t n, double p, S& src) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - sample_binomial(n, 1.0 - p, src);
    if (static_cast<double>(n) * p <= 30.0) {
        return detail::binomial_inversion(n, p, src.next_unit());
    }
    return detail::binomial_btrs(n, p, src);
}

/// Multinomial counts over `probs` (which may sum to < 1; the remainder is
/// an implicit final category) via sequential conditional binomials.
template <UniformSource S>
void sample_multinomial(std::int64_t n, const std::vector<double>& probs,
                        std::vector<std::int64_t>& counts, S& src) {
    counts.assign(probs.size(), 0);
    double remaining_mass = 1.0;
    std::int64_t remaining = n;
    for (std::size_t i = 0; i < probs.size() && remaining > 0; ++i) {
        double cond = probs[i] / remaining_mass;
        if (cond > 1.0) cond = 1.0;
        const std::int64_t c = sample_binomial(remaining, cond, src);
        counts[i] = c;
        remaining -= c;
        remaining_mass -= probs[i];
        if (remaining_mass <= 0.0) break;
    }
}

} // namespace lotto
