#include "lccad/eval.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace lccad;

TEST(Auroc, Examples) {
    const std::vector<double> s{1, 2, 3, 4};
    EXPECT_EQ(auroc(s, {false, false, true, true}), 1.0);
    EXPECT_EQ(auroc(s, {true, true, false, false}), 0.0);
    EXPECT_EQ(auroc(std::vector<double>{2, 2, 2, 2}, {true, false, true, false}), 0.5);
    EXPECT_THROW(auroc(s, {true, true, true, true}), std::invalid_argument);
    EXPECT_THROW(auroc(s, {true, false}), std::invalid_argument);
}

TEST(Auroc, MatchesPairCountingOracle) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 49;
        std::vector<double> s(n);
        std::vector<bool> l(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng() % 7);  // plenty of ties
            l[i] = rng() % 3 == 0;
        }
        l[0] = true;
        l[1] = false;
        EXPECT_NEAR(auroc(s, l), oracle::auroc_pairs(s, l), 1e-12);
    }
}

TEST(Auroc, InvariantUnderMonotoneTransform) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> nd;
    std::vector<double> s(40), t(40);
    std::vector<bool> l(40);
    for (std::size_t i = 0; i < 40; ++i) {
        s[i] = nd(rng);
        t[i] = std::exp(3 * s[i]) + 1;
        l[i] = i % 4 == 0;
    }
    EXPECT_EQ(auroc(s, l), auroc(t, l));
}

TEST(Ari, Examples) {
    const std::vector<int> a{0, 0, 1, 1};
    EXPECT_EQ(adjusted_rand_index(a, a), 1.0);
    EXPECT_EQ(adjusted_rand_index(a, std::vector<int>{1, 1, 0, 0}), 1.0);
    EXPECT_NEAR(adjusted_rand_index(a, std::vector<int>{0, 1, 0, 1}), -0.5, 1e-15);
    EXPECT_NEAR(oracle::ari_pairs(a, {0, 1, 0, 1}), -0.5, 1e-15);
    EXPECT_EQ(adjusted_rand_index(std::vector<int>{0, 0, 0}, std::vector<int>{1, 1, 1}), 1.0);
    EXPECT_THROW(adjusted_rand_index(a, std::vector<int>{0, 1}), std::invalid_argument);
}

TEST(Ari, MatchesPairCountingOracle) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 49;
        const int ka = 1 + static_cast<int>(rng() % 4), kb = 1 + static_cast<int>(rng() % 4);
        std::vector<int> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = static_cast<int>(rng() % static_cast<unsigned>(ka));
            b[i] = static_cast<int>(rng() % static_cast<unsigned>(kb));
        }
        EXPECT_NEAR(adjusted_rand_index(a, b), oracle::ari_pairs(a, b), 1e-12);
    }
}

TEST(Ari, SymmetricAndPermutationInvariant) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> a(30), b(30), pa(30);
        for (std::size_t i = 0; i < 30; ++i) {
            a[i] = static_cast<int>(rng() % 3);
            b[i] = static_cast<int>(rng() % 3);
            pa[i] = (a[i] + 1) % 3;
        }
        EXPECT_EQ(adjusted_rand_index(a, b), adjusted_rand_index(b, a));
        EXPECT_NEAR(adjusted_rand_index(pa, b), adjusted_rand_index(a, b), 1e-15);
    }
}

TEST(Summarize, MeanAndSampleStd) {
    const auto r = summarize("x", std::vector<double>{1, 2, 3, 4});
    EXPECT_EQ(r.name, "x");
    EXPECT_DOUBLE_EQ(r.mean, 2.5);
    EXPECT_DOUBLE_EQ(r.stddev, std::sqrt(5.0 / 3.0));
    EXPECT_EQ(r.n_seeds, 4u);
    EXPECT_EQ(summarize("y", std::vector<double>{7}).stddev, 0.0);
}
