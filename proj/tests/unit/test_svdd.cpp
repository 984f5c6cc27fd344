#include "lccad/svdd.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace lccad;

namespace {

HyperParams params(int k, double nu) {
    HyperParams hp;
    hp.num_classes = k;
    hp.nu = nu;
    return hp;
}

}  // namespace

TEST(UpdateCenters, NuOneGivesClassMeans) {
    Eigen::MatrixXd x(2, 2);
    x << 0, 0, 2, 0;
    auto c = update_centers(x, LatentAssignment({0, 0}, 1), params(1, 1.0));
    EXPECT_EQ(c.centers.row(0), Eigen::RowVector2d(1, 0));
    EXPECT_EQ(c.radii_sq[0], 0.0);

    Eigen::MatrixXd y(3, 2);
    y << 0, 0, 2, 0, 5, 5;
    c = update_centers(y, LatentAssignment({0, 0, 1}, 2), params(2, 1.0));
    EXPECT_EQ(c.centers.row(0), Eigen::RowVector2d(1, 0));
    EXPECT_EQ(c.centers.row(1), Eigen::RowVector2d(5, 5));
    EXPECT_TRUE(c.radii_sq.isZero());
    EXPECT_EQ(c.counts, (std::vector<std::size_t>{2, 1}));
    EXPECT_EQ(c.empty, (std::vector<bool>{false, false}));
}

TEST(UpdateCenters, EmptyClassTakesGlobalMean) {
    Eigen::MatrixXd y(3, 1);
    y << 0, 3, 6;
    const auto c = update_centers(y, LatentAssignment({0, 0, 0}, 2), params(2, 1.0));
    EXPECT_EQ(c.empty, (std::vector<bool>{false, true}));
    EXPECT_EQ(c.counts, (std::vector<std::size_t>{3, 0}));
    EXPECT_DOUBLE_EQ(c.centers(1, 0), 3.0);
    EXPECT_EQ(c.radii_sq[1], 0.0);
}

TEST(UpdateCenters, RadiiVanishWhenNuIsOne) {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd x = oracle::uniform_matrix(rng, 40, 5);
    std::vector<int> s(40);
    for (auto& v : s) v = std::uniform_int_distribution<int>(0, 2)(rng);
    const auto c = update_centers(x, LatentAssignment(s, 3), params(3, 1.0));
    EXPECT_TRUE(c.radii_sq.isZero());
}

TEST(Hypersphere, OptimalRadiusIsQuantile) {
    EXPECT_EQ(svdd_optimal_radius({5, 1, 4, 2, 3}, 2.5), 3.0);
    EXPECT_EQ(svdd_optimal_radius({5, 1, 4, 2, 3}, 1.0), 4.0);
    EXPECT_EQ(svdd_optimal_radius({5, 1, 4, 2, 3}, 5.0), 0.0);
    const std::vector<double> d{5, 1, 4, 2, 3};
    const double best = svdd_objective(d, 3.0, 2.5);
    for (double t = 0.0; t <= 6.0; t += 0.01) EXPECT_GE(svdd_objective(d, t, 2.5) + 1e-12, best);
    EXPECT_DOUBLE_EQ(svdd_objective(d, 3.0, 2.5), 3.0 + 3.0 / 2.5);
}

TEST(Hypersphere, MatchesGridSearchAtHalfNu) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> xs(5);
        for (auto& v : xs) v = u(rng);
        Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(5, 2);
        for (int i = 0; i < 5; ++i) pts(i, 0) = xs[static_cast<std::size_t>(i)];
        const auto fitres = fit_hypersphere(pts, 5 * 0.5);
        const double grid = oracle::hypersphere_grid_search(xs, 2.5, 20000);
        EXPECT_NEAR(fitres.objective, grid, 1e-3) << trial;
        EXPECT_NEAR(fitres.center[1], 0.0, 1e-12);
    }
}

TEST(Hypersphere, UpdateCentersUsesPerClassBudget) {
    Eigen::MatrixXd x(6, 1);
    x << 0, 1, 2, 10, 11, 30;
    const auto c = update_centers(x, LatentAssignment({0, 0, 0, 1, 1, 1}, 2), params(2, 0.5));
    const auto direct = fit_hypersphere(x.bottomRows(3), 1.5);
    EXPECT_NEAR(c.centers(1, 0), direct.center[0], 1e-12);
    EXPECT_NEAR(c.radii_sq[1], direct.radius_sq, 1e-12);
}

TEST(ClassNormalizers, Policies) {
    const LatentAssignment h({0, 0, 0, 1}, 3);
    EXPECT_EQ(class_normalizers(h, ClassCountPolicy::Uniform), (std::vector<double>{4.0 / 3, 4.0 / 3, 4.0 / 3}));
    EXPECT_EQ(class_normalizers(h, ClassCountPolicy::Lagged), (std::vector<double>{3, 1, 0}));
}
