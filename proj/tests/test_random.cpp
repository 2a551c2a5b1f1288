#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "continuum/random.hpp"

using namespace continuum;

namespace {

struct Moments {
    double mean = 0, var = 0;
};

template <class Draw>
Moments moments(int n, Draw draw) {
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = draw();
        s += x;
        s2 += x * x;
    }
    const double m = s / n;
    return {m, s2 / n - m * m};
}

}  // namespace

TEST(SplitMix, ReferenceOutputs) {
    // First outputs of the reference splitmix64 from state 0.
    std::uint64_t s = 0;
    EXPECT_EQ(splitmix64(s), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(splitmix64(s), 0x6e789e6aa1b965f4ULL);
    EXPECT_EQ(splitmix64(s), 0x06c45d188009454fULL);
}

TEST(Rng, SameSeedSameStream) {
    Rng a(42), b(42), c(43);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs |= x != c.next_u64();
    }
    EXPECT_TRUE(differs);
}

TEST(Rng, HashWordsIsStateless) {
    EXPECT_EQ(hash_words(1, 2, 3), hash_words(1, 2, 3));
    EXPECT_NE(hash_words(1, 2, 3), hash_words(1, 3, 2));
    EXPECT_NE(hash_words(0), hash_words(1));
}

TEST(Rng, UniformMoments) {
    Rng rng(1);
    const auto m = moments(200000, [&] { return rng.uniform(); });
    EXPECT_NEAR(m.mean, 0.5, 3 * std::sqrt(1.0 / 12 / 200000));
    EXPECT_NEAR(m.var, 1.0 / 12, 0.002);
}

TEST(Rng, BelowIsUniform) {
    Rng rng(2);
    const int n = 7, draws = 70000;
    std::vector<int> counts(n);
    for (int i = 0; i < draws; ++i) {
        const auto x = rng.below(n);
        ASSERT_LT(x, static_cast<std::uint64_t>(n));
        ++counts[x];
    }
    double chi2 = 0;
    const double expect = static_cast<double>(draws) / n;
    for (int c : counts) chi2 += (c - expect) * (c - expect) / expect;
    EXPECT_LT(chi2, 22.46);  // chi-square, 6 dof, p = 0.001
    EXPECT_EQ(rng.below(0), 0u);
}

TEST(Rng, NormalMoments) {
    Rng rng(3);
    const auto m = moments(200000, [&] { return rng.normal(); });
    EXPECT_NEAR(m.mean, 0, 0.01);
    EXPECT_NEAR(m.var, 1, 0.01);
}

TEST(Rng, GammaMoments) {
    for (double shape : {0.3, 1.0, 2.5, 9.0}) {
        Rng rng(4);
        const auto m = moments(200000, [&] { return rng.gamma(shape); });
        EXPECT_NEAR(m.mean, shape, 0.02 * shape + 0.005) << shape;
        EXPECT_NEAR(m.var, shape, 0.05 * shape + 0.01) << shape;
    }
}

TEST(Rng, BetaMoments) {
    for (auto [a, b] : {std::pair{1.0, 1.0}, {0.5, 0.5}, {2.0, 5.0}}) {
        Rng rng(5);
        const auto m = moments(200000, [&] { return rng.beta(a, b); });
        EXPECT_NEAR(m.mean, a / (a + b), 0.005);
        EXPECT_NEAR(m.var, a * b / ((a + b) * (a + b) * (a + b + 1)), 0.003);
    }
}

TEST(Rng, PoissonMoments) {
    // Both branches: product method below 30, PTRS above.
    for (double lambda : {0.5, 4.0, 29.0, 31.0, 250.0}) {
        Rng rng(6);
        const auto m = moments(100000, [&] { return static_cast<double>(rng.poisson(lambda)); });
        const double se = std::sqrt(lambda / 100000);
        EXPECT_NEAR(m.mean, lambda, 4 * se) << lambda;
        EXPECT_NEAR(m.var / lambda, 1, 0.03) << lambda;
    }
    Rng rng(7);
    EXPECT_EQ(rng.poisson(0), 0u);
}

TEST(Rng, PoissonPmfMatches) {
    // Chi-square against the exact pmf for a mean in the PTRS branch.
    const double lambda = 40;
    Rng rng(8);
    const int draws = 100000;
    std::map<std::uint64_t, int> counts;
    for (int i = 0; i < draws; ++i) ++counts[rng.poisson(lambda)];
    double chi2 = 0;
    int cells = 0;
    for (std::uint64_t k = 25; k <= 55; ++k) {
        const double p = std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
        const double e = p * draws;
        const double o = counts.count(k) ? counts[k] : 0;
        chi2 += (o - e) * (o - e) / e;
        ++cells;
    }
    EXPECT_LT(chi2, 61.1);  // chi-square, 30 dof, p = 0.001
    EXPECT_EQ(cells, 31);
}

TEST(Zeta, RankRatio) {
    // Oracle: P(1)/P(2) = 2^s for a truncated zeta.
    ZetaSampler z(1000, 1.5);
    Rng rng(9);
    int one = 0, two = 0;
    for (int i = 0; i < 100000; ++i) {
        const auto r = z.sample(rng);
        ASSERT_GE(r, 1u);
        ASSERT_LE(r, 1000u);
        one += r == 1;
        two += r == 2;
    }
    EXPECT_NEAR(static_cast<double>(one) / two, std::pow(2.0, 1.5), 0.1 * std::pow(2.0, 1.5));
}

TEST(Zeta, SingleRank) {
    ZetaSampler z(1, 2.0);
    Rng rng(10);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(z.sample(rng), 1u);
}
