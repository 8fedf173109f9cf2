#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lotto/rng.hpp"

using namespace lotto;

TEST_CASE("philox4x32-10 known-answer vectors") {
    auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);

    out = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                            {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);

    out = Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                            {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("mix64 matches the splitmix64 output sequence") {
    CHECK(mix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(mix64(1) == 0x910a2dec89025cc1ULL);
}

TEST_CASE("fnv1a64 known values") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("next_unit stays inside the open unit interval") {
    SeedSpec seeds{12345};
    auto s = seeds.sim_stream("JOHN DOE", 0, 0);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.next_unit();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("streams are reproducible and distinct per coordinate") {
    SeedSpec seeds{99};
    auto a1 = seeds.sim_stream("ALICE", 3, 7);
    auto a2 = seeds.sim_stream("ALICE", 3, 7);
    auto b = seeds.sim_stream("ALICE", 3, 8);
    auto c = seeds.sim_stream("ALICE", 4, 7);
    auto d = seeds.sim_stream("BOB", 3, 7);
    auto e = SeedSpec{100}.sim_stream("ALICE", 3, 7);

    bool same = true, diff_rep = false, diff_win = false, diff_player = false,
         diff_seed = false;
    for (int i = 0; i < 64; ++i) {
        const auto v = a1.next_u64();
        same &= (v == a2.next_u64());
        diff_rep |= (v != b.next_u64());
        diff_win |= (v != c.next_u64());
        diff_player |= (v != d.next_u64());
        diff_seed |= (v != e.next_u64());
    }
    CHECK(same);
    CHECK(diff_rep);
    CHECK(diff_win);
    CHECK(diff_player);
    CHECK(diff_seed);
}

TEST_CASE("domain streams with different tags do not collide") {
    SeedSpec seeds{7};
    auto s1 = seeds.domain_stream(SeedSpec::kSynth, 5, 0);
    auto s2 = seeds.domain_stream(SeedSpec::kKMeans, 5, 0);
    bool differs = false;
    for (int i = 0; i < 16; ++i) differs |= (s1.next_u64() != s2.next_u64());
    CHECK(differs);
}

TEST_CASE("next_below is uniform over small ranges") {
    SeedSpec seeds{42};
    auto s = seeds.domain_stream(SeedSpec::kKMeans, 1, 2);
    std::vector<int> hits(10, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const auto v = s.next_below(10);
        REQUIRE(v < 10);
        ++hits[static_cast<std::size_t>(v)];
    }
    for (int h : hits) {
        CHECK(h > draws / 10 - 600);
        CHECK(h < draws / 10 + 600);
    }
}

TEST_CASE("scripted source replays its values then refuses") {
    ScriptedSource src({0.25, 0.75});
    CHECK(src.next_unit() == 0.25);
    CHECK(src.next_unit() == 0.75);
    CHECK_THROWS_AS(src.next_unit(), std::logic_error);
}

TEST_CASE("geometric sampler inverts the CDF") {
    ScriptedSource src({0.6, 0.2, 0.37});
    CHECK(sample_geometric(0.5, src) == 1);
    CHECK(sample_geometric(0.5, src) == 3);
    CHECK(sample_geometric(0.01, src) == 99);

    ScriptedSource one({0.5});
    CHECK(sample_geometric(1.0, one) == 1); // no draw consumed
    CHECK(one.consumed() == 0);
}

TEST_CASE("geometric sampler matches expectation statistically") {
    SeedSpec seeds{2024};
    auto s = seeds.domain_stream(SeedSpec::kSim, 0, 0);
    const double p = 0.001;
    const int n = 20000;
    double total = 0;
    for (int i = 0; i < n; ++i) total += static_cast<double>(sample_geometric(p, s));
    const double mean = total / n;
    // E = 1/p = 1000, sd of the mean ~ 1000/sqrt(n) ~ 7
    CHECK(mean > 1000 - 30);
    CHECK(mean < 1000 + 30);
}

TEST_CASE("binomial inversion walks the exact CDF") {
    ScriptedSource src({0.2, 0.3, 0.8});
    CHECK(sample_binomial(2, 0.5, src) == 0); // cdf(0)=0.25
    CHECK(sample_binomial(2, 0.5, src) == 1); // cdf(1)=0.75
    CHECK(sample_binomial(2, 0.5, src) == 2);
}

TEST_CASE("binomial sampler handles degenerate arguments") {
    ScriptedSource src({});
    CHECK(sample_binomial(0, 0.5, src) == 0);
    CHECK(sample_binomial(5, 0.0, src) == 0);
    CHECK(sample_binomial(5, 1.0, src) == 5);
    CHECK(src.consumed() == 0);
}

TEST_CASE("binomial rejection path matches moments") {
    SeedSpec seeds{77};
    auto s = seeds.domain_stream(SeedSpec::kSim, 9, 9);
    const std::int64_t n = 500;
    const double p = 0.3; // n*p = 150, forces the rejection path
    const int reps = 40000;
    double sum = 0, sum2 = 0;
    for (int i = 0; i < reps; ++i) {
        const auto k = sample_binomial(n, p, s);
        REQUIRE(k >= 0);
        REQUIRE(k <= n);
        sum += static_cast<double>(k);
        sum2 += static_cast<double>(k) * static_cast<double>(k);
    }
    const double mean = sum / reps;
    const double var = sum2 / reps - mean * mean;
    CHECK(mean == doctest::Approx(n * p).epsilon(0.005));
    CHECK(var == doctest::Approx(n * p * (1 - p)).epsilon(0.05));
}

TEST_CASE("binomial p above one-half uses the mirrored distribution") {
    SeedSpec seeds{78};
    auto s = seeds.domain_stream(SeedSpec::kSim, 4, 2);
    const int reps = 30000;
    double sum = 0;
    for (int i = 0; i < reps; ++i) sum += static_cast<double>(sample_binomial(40, 0.9, s));
    CHECK(sum / reps == doctest::Approx(36.0).epsilon(0.01));
}

TEST_CASE("multinomial counts sum to the trial count") {
    SeedSpec seeds{5};
    auto s = seeds.domain_stream(SeedSpec::kSim, 1, 1);
    const std::vector<double> probs{0.2, 0.3, 0.5};
    std::vector<std::int64_t> counts;
    for (int i = 0; i < 200; ++i) {
        sample_multinomial(1000, probs, counts, s);
        std::int64_t total = 0;
        for (auto c : counts) total += c;
        REQUIRE(total == 1000);
    }
}

TEST_CASE("multinomial with leftover mass leaves an implicit remainder") {
    SeedSpec seeds{6};
    auto s = seeds.domain_stream(SeedSpec::kSim, 2, 2);
    const std::vector<double> probs{0.1, 0.2}; // remaining 0.7 is implicit
    std::vector<std::int64_t> counts;
    double first = 0, second = 0;
    const int reps = 20000;
    for (int i = 0; i < reps; ++i) {
        sample_multinomial(100, probs, counts, s);
        std::int64_t total = counts[0] + counts[1];
        REQUIRE(total <= 100);
        first += static_cast<double>(counts[0]);
        second += static_cast<double>(counts[1]);
    }
    CHECK(first / reps == doctest::Approx(10.0).epsilon(0.02));
    CHECK(second / reps == doctest::Approx(20.0).epsilon(0.02));
}

TEST_CASE("log_factorial agrees with lgamma across the table boundary") {
    CHECK(log_factorial(0) == 0.0);
    CHECK(log_factorial(1) == 0.0);
    CHECK(log_factorial(10) == doctest::Approx(15.104412573075514).epsilon(1e-14));
    for (std::int64_t n : {1022, 1023, 1024, 1025, 1500, 100000}) {
        CHECK(log_factorial(n) ==
              doctest::Approx(std::lgamma(static_cast<double>(n) + 1.0)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(log_factorial(-1), std::domain_error);
}
