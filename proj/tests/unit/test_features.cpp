#include "lccad/features.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace lccad;

TEST(RandomFourier, DeterministicAndBounded) {
    const auto a = FeatureMapper::random_fourier(3, 64, 1.5, 7);
    const auto b = FeatureMapper::random_fourier(3, 64, 1.5, 7);
    const auto c = FeatureMapper::random_fourier(3, 64, 1.5, 8);
    EXPECT_EQ(a.freqs(), b.freqs());
    EXPECT_EQ(a.phases(), b.phases());
    EXPECT_NE(a.freqs(), c.freqs());
    EXPECT_EQ(a.freqs().rows(), 64);
    EXPECT_EQ(a.freqs().cols(), 3);
    EXPECT_EQ(a.output_dim(), 64);
    EXPECT_TRUE((a.phases().array() >= 0.0).all() && (a.phases().array() < 2 * M_PI).all());

    const Eigen::Vector3d x(0.3, -2.0, 5.0);
    const Eigen::VectorXd z = a.map(x);
    ASSERT_EQ(z.size(), 64);
    const double bound = std::sqrt(2.0 / 64);
    EXPECT_LE(z.cwiseAbs().maxCoeff(), bound + 1e-15);
}

TEST(RandomFourier, MapAllMatchesMapRowByRow) {
    const auto m = FeatureMapper::random_fourier(2, 16, 1.0, 3);
    Eigen::MatrixXd x(3, 2);
    x << 1, 2, 1, 2, -4, 0.5;
    const Eigen::MatrixXd z = m.map_all(x);
    ASSERT_EQ(z.rows(), 3);
    ASSERT_EQ(z.cols(), 16);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(z.row(i).transpose(), m.map(x.row(i).transpose()));
    EXPECT_EQ(z.row(0), z.row(1));
}

TEST(RandomFourier, FrequencyScaleFollowsBandwidth) {
    const auto m = FeatureMapper::random_fourier(2, 20000, 2.0, 1);
    const double mean = m.freqs().mean();
    const double var = (m.freqs().array() - mean).square().mean();
    EXPECT_NEAR(var, 0.25, 0.01);
}

TEST(RandomFourier, SelfProductNearOne) {
    // |z(x).z(x) - 1| <= 3/sqrt(D) for all 100 seeds.
    const Index dim = 128;
    const Eigen::Vector2d x(0.7, -1.1);
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        const auto m = FeatureMapper::random_fourier(2, dim, 1.0, s);
        const Eigen::VectorXd z = m.map(x);
        worst = std::max(worst, std::abs(z.dot(z) - 1.0));
    }
    EXPECT_LE(worst, 3.0 / std::sqrt(static_cast<double>(dim)));
}

TEST(RandomFourier, FarPairsNearZero) {
    const Index dim = 128;
    const Eigen::Vector2d x(0.0, 0.0), y(20.0, 0.0);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto m = FeatureMapper::random_fourier(2, dim, 1.0, s);
        EXPECT_LE(std::abs(m.map(x).dot(m.map(y))), 4.0 / std::sqrt(static_cast<double>(dim)));
    }
}

TEST(RandomFourier, UnbiasedOverSeeds) {
    const Eigen::Vector3d x(0.2, 0.5, -0.3), y(1.0, -0.4, 0.1);
    const double sigma = 1.3;
    double mean = 0.0;
    const int seeds = 1000;
    for (int s = 0; s < seeds; ++s) {
        const auto m = FeatureMapper::random_fourier(3, 64, sigma, static_cast<std::uint64_t>(s));
        mean += m.map(x).dot(m.map(y)) / seeds;
    }
    const double exact = std::exp(-(x - y).squaredNorm() / (2 * sigma * sigma));
    EXPECT_NEAR(gaussian_kernel(x, y, sigma), exact, 1e-15);
    EXPECT_NEAR(mean, exact, 0.01);
}

TEST(RandomFourier, ErrorShrinksWithDimension) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::vector<std::pair<Eigen::Vector2d, Eigen::Vector2d>> pairs;
    for (int i = 0; i < 50; ++i) pairs.push_back({{nd(rng), nd(rng)}, {nd(rng), nd(rng)}});
    auto error = [&](Index dim) {
        double total = 0.0;
        for (std::uint64_t s = 0; s < 20; ++s) {
            const auto m = FeatureMapper::random_fourier(2, dim, 1.0, s);
            for (const auto& [a, b] : pairs) total += std::abs(m.map(a).dot(m.map(b)) - gaussian_kernel(a, b, 1.0));
        }
        return total;
    };
    double prev = error(32);
    for (Index dim : {64, 128, 256, 512}) {
        const double e = error(dim);
        EXPECT_LT(e, prev) << dim;
        prev = e;
    }
}

TEST(IdentityMap, PassesThrough) {
    const auto m = FeatureMapper::identity(3, 2.5);
    EXPECT_EQ(m.kind(), FeatureMapKind::Identity);
    EXPECT_EQ(m.output_dim(), 3);
    EXPECT_EQ(m.sigma(), 2.5);
    const Eigen::Vector3d x(1, -2, 3);
    EXPECT_EQ(m.map(x), Eigen::VectorXd(x));
}

TEST(MedianHeuristic, SmallExactCases) {
    Eigen::MatrixXd x(3, 1);
    x << 0, 1, 3;  // pairwise distances 1, 2, 3
    EXPECT_DOUBLE_EQ(median_heuristic_bandwidth(x, 0), 2.0);
    EXPECT_DOUBLE_EQ(median_heuristic_bandwidth(Eigen::MatrixXd::Zero(4, 2), 0), 1.0);
}

TEST(MedianHeuristic, SubsampleIsDeterministic) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    Eigen::MatrixXd x(1500, 2);
    for (Index i = 0; i < x.rows(); ++i) x.row(i) << nd(rng), nd(rng);
    const double a = median_heuristic_bandwidth(x, 3, 200);
    EXPECT_EQ(a, median_heuristic_bandwidth(x, 3, 200));
    // The distance between two standard 2-D normals is Rayleigh with scale sqrt 2.
    EXPECT_NEAR(a, 2.0 * std::sqrt(std::log(2.0)), 0.15);
}
