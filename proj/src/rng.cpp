#include "lotto/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace lotto {

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

double ScriptedSource::next_unit() {
    if (pos_ >= values_.size()) {
        throw std::logic_error("ScriptedSource exhausted");
    }
    return values_[pos_++];
}

namespace {

// log(n!) for n < 1024 from a table, Stirling series above. Table is built
// once; lgamma() is avoided because its global sign state is not
// thread-safe on all platforms.
constexpr int kTableSize = 1024;

const double* log_factorial_table() {
    static const auto table = [] {
        static double t[kTableSize];
        t[0] = 0.0;
        for (int i = 1; i < kTableSize; ++i) {
            t[i] = t[i - 1] + std::log(static_cast<double>(i));
        }
        return t;
    }();
    return table;
}

} // namespace

double log_factorial(std::int64_t n) {
    if (n < 0) throw std::domain_error("log_factorial: negative n");
    if (n < kTableSize) return log_factorial_table()[n];
    // Stirling series for ln Gamma(x), x = n + 1
    const double x = static_cast<double>(n) + 1.0;
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    const double series =
        inv / 12.0 * (1.0 - inv2 / 30.0 * (1.0 - inv2 * 2.0 / 7.0));
    return (x - 0.5) * std::log(x) - x + 0.9189385332046727 + series;
}

namespace detail {

std::int64_t binomial_inversion(std::int64_t n, double p, double u) {
    // walk the CDF from 0; usable when n*p is small
    const double q = 1.0 - p;
    const double ratio = p / q;
    double pmf = std::pow(q, static_cast<double>(n));
    double cdf = pmf;
    std::int64_t k = 0;
    while (u > cdf && k < n) {
        ++k;
        pmf *= ratio * static_cast<double>(n - k + 1) / static_cast<double>(k);
        cdf += pmf;
    }
    return k;
}

} // namespace detail

} // namespace lotto
