#include "lccad/data.hpp"
#include "lccad/eval.hpp"
#include "lccad/model.hpp"
#include "lccad/svdd.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace lccad;

namespace {

HyperParams kmeans_params(int k, std::uint64_t seed) {
    HyperParams hp;
    hp.num_classes = k;
    hp.theta = 1.0;
    hp.nu = 1.0;
    hp.feature_map = FeatureMapKind::Identity;
    hp.init = InitMethod::Seeds;
    hp.seed = seed;
    hp.max_outer_iters = 500;
    return hp;
}

Eigen::MatrixXd blobs(std::mt19937_64& rng, Index n, Index d, int k, double spread) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXd means = oracle::uniform_matrix(rng, k, d, -spread, spread);
    Eigen::MatrixXd x(n, d);
    for (Index i = 0; i < n; ++i) {
        const int c = static_cast<int>(i % k);
        for (Index j = 0; j < d; ++j) x(i, j) = means(c, j) + nd(rng);
    }
    return x;
}

LccadModel manual_model(const Eigen::MatrixXd& centers, std::vector<int> states) {
    LccadModel m;
    const int k = static_cast<int>(centers.rows());
    m.mapper = FeatureMapper::identity(centers.cols());
    m.cluster.centers = centers;
    m.cluster.radii_sq = Eigen::VectorXd::Zero(k);
    m.cluster.counts.assign(static_cast<std::size_t>(k), 1);
    m.cluster.empty.assign(static_cast<std::size_t>(k), false);
    m.weights = CrfWeights::zeros(k, centers.cols());
    m.assignment = LatentAssignment(std::move(states), k);
    m.hp.num_classes = k;
    return m;
}

}  // namespace

TEST(KMeansPlusPlus, DistinctDeterministicSeeds) {
    std::mt19937_64 rng(1);
    const Eigen::MatrixXd x = blobs(rng, 60, 2, 3, 5.0);
    const auto a = kmeanspp_seeds(x, 3, 9);
    EXPECT_EQ(a, kmeanspp_seeds(x, 3, 9));
    EXPECT_EQ(a.size(), 3u);
    EXPECT_NE(a[0], a[1]);
    EXPECT_NE(a[1], a[2]);
    EXPECT_NE(a[0], a[2]);
    EXPECT_THROW(kmeanspp_seeds(x, 61, 0), std::invalid_argument);
}

TEST(Fit, ReproducesLloydIterationByIteration) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        const int k = 2 + trial % 3;
        const Eigen::MatrixXd x = blobs(rng, 30 + 17 * trial, 2, k, 2.0);
        const auto hp = kmeans_params(k, static_cast<std::uint64_t>(trial));
        const auto fr = fit(FeatureMatrix(x), DependencyGraph::empty(static_cast<std::size_t>(x.rows())), hp);

        const auto seeds = kmeanspp_seeds(x, k, hp.seed);
        Eigen::MatrixXd init(k, 2);
        for (int c = 0; c < k; ++c) init.row(c) = x.row(seeds[static_cast<std::size_t>(c)]);
        const auto expected = oracle::lloyd_sequence(x, init, 500);

        ASSERT_EQ(fr.model.history.size(), expected.size()) << trial;
        for (std::size_t t = 0; t < expected.size(); ++t) EXPECT_EQ(fr.model.history[t].states(), expected[t]);
        EXPECT_TRUE(fr.report.converged);
    }
}

TEST(Fit, KMeansInitEqualsLloydFixedPoint) {
    std::mt19937_64 rng(3);
    const Eigen::MatrixXd x = blobs(rng, 80, 2, 2, 6.0);
    auto hp = kmeans_params(2, 4);
    hp.init = InitMethod::KMeans;
    const auto fr = fit(FeatureMatrix(x), DependencyGraph::empty(80), hp);
    EXPECT_EQ(fr.report.iterations, 2);
    const auto seeds = kmeanspp_seeds(x, 2, 4);
    Eigen::MatrixXd init(2, 2);
    for (int c = 0; c < 2; ++c) init.row(c) = x.row(seeds[static_cast<std::size_t>(c)]);
    EXPECT_EQ(fr.model.assignment.states(), oracle::lloyd_sequence(x, init, 500).back());
}

TEST(Fit, WellSeparatedBlobsMatchKMeans) {
    std::mt19937_64 rng(4);
    const Eigen::MatrixXd x = blobs(rng, 100, 2, 2, 8.0);
    const auto hp = kmeans_params(2, 0);
    const auto fr = fit(FeatureMatrix(x), DependencyGraph::empty(100), hp);
    Eigen::MatrixXd centers(2, 2);
    const auto seeds = kmeanspp_seeds(x, 2, 0);
    for (int c = 0; c < 2; ++c) centers.row(c) = x.row(seeds[static_cast<std::size_t>(c)]);
    const auto lloyd_states = lloyd(x, centers, 500);
    EXPECT_EQ(adjusted_rand_index(fr.model.assignment, LatentAssignment(lloyd_states, 2)), 1.0);
}

TEST(Fit, SingleClassScoresAreDistancesToMean) {
    std::mt19937_64 rng(5);
    const Eigen::MatrixXd x = oracle::uniform_matrix(rng, 50, 3);
    HyperParams hp;
    hp.num_classes = 1;
    hp.theta = 1.0;
    hp.rff_dim = 32;
    const FeatureMatrix fx(x);
    const auto fr = fit(fx, DependencyGraph::chain(50), hp);
    const Eigen::MatrixXd z = fr.model.mapper->map_all(fx);
    const Eigen::RowVectorXd mean = z.colwise().mean();
    const auto s = score(fr.model, fx);
    for (Index i = 0; i < 50; ++i) EXPECT_NEAR(s[i], (mean - z.row(i)).squaredNorm(), 1e-14);
}

TEST(InferStates, CentersIrrelevantAtThetaZero) {
    std::mt19937_64 rng(6);
    const Eigen::MatrixXd z = oracle::uniform_matrix(rng, 12, 4);
    CrfWeights w = CrfWeights::zeros(3, 4);
    w.trans = oracle::uniform_matrix(rng, 3, 3);
    w.emis = oracle::uniform_matrix(rng, 3, 4);
    HyperParams hp;
    hp.num_classes = 3;
    hp.theta = 0.0;
    const std::vector<double> counts{4, 4, 4};
    const auto g = DependencyGraph::grid(3, 4);
    std::optional<LatentAssignment> first;
    for (int trial = 0; trial < 10; ++trial) {
        ClusterModel c;
        c.centers = oracle::uniform_matrix(rng, 3, 4, -10, 10);
        c.radii_sq = oracle::uniform_matrix(rng, 3, 1, 0, 5);
        c.counts = {4, 4, 4};
        c.empty = {false, false, false};
        const auto h = infer_states(z, g, c, w, hp, counts).assignment;
        if (!first) first = h;
        EXPECT_EQ(h, *first);
    }
}

TEST(InferStates, NearestCentroidAtThetaOne) {
    std::mt19937_64 rng(7);
    const Eigen::MatrixXd x = oracle::uniform_matrix(rng, 30, 2);
    ClusterModel c;
    c.centers = oracle::uniform_matrix(rng, 3, 2);
    c.radii_sq = Eigen::VectorXd::Zero(3);
    c.counts = {10, 10, 10};
    c.empty = {false, false, false};
    HyperParams hp;
    hp.num_classes = 3;
    hp.theta = 1.0;
    const std::vector<double> counts{10, 10, 10};
    const auto h = infer_states(x, DependencyGraph::empty(30), c, CrfWeights::zeros(3, 2), hp, counts).assignment;
    for (Index i = 0; i < 30; ++i) {
        Index best;
        (c.centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
        EXPECT_EQ(h[static_cast<std::size_t>(i)], best);
    }
}

TEST(Fit, HypersphereTermNonIncreasingAtThetaOne) {
    ToySpec spec;
    spec.mean_distance = 1.5;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        spec.seed = seed;
        const auto ds = gen_toy(spec);
        HyperParams hp;
        hp.theta = 1.0;
        hp.init = InitMethod::Seeds;
        hp.seed = seed;
        const auto fr = fit(ds.x, ds.graph, hp);
        for (std::size_t t = 1; t < fr.model.trace.size(); ++t) {
            EXPECT_LE(fr.model.trace[t].objective.svdd, fr.model.trace[t - 1].objective.svdd + 1e-12);
        }
        for (const auto& rec : fr.model.trace) EXPECT_EQ(rec.objective.total, rec.objective.svdd);
    }
}

TEST(Fit, ConvergesOnToyData) {
    ToySpec spec;
    spec.mean_distance = 4.0;
    int converged = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        spec.seed = seed;
        const auto ds = gen_toy(spec);
        HyperParams hp;
        hp.seed = seed;
        const auto fr = fit(ds.x, ds.graph, hp);
        converged += fr.report.converged && fr.report.iterations <= 50;
        EXPECT_EQ(fr.model.history.size(), static_cast<std::size_t>(fr.report.iterations));
        EXPECT_TRUE(fr.model.cluster.radii_sq.isZero());
        EXPECT_GT(fr.report.gamma, 0.0);
        EXPECT_GT(fr.report.sigma, 0.0);
    }
    EXPECT_GE(converged, 9);
}

TEST(Fit, RejectsInvalidProblems) {
    const FeatureMatrix x(Eigen::MatrixXd::Random(4, 2));
    HyperParams hp;
    EXPECT_THROW(fit(x, DependencyGraph::chain(5), hp), std::invalid_argument);
    hp.num_classes = 5;
    EXPECT_THROW(fit(x, DependencyGraph::chain(4), hp), std::invalid_argument);
}

TEST(Fit, FixedGammaIsKept) {
    const auto ds = gen_toy(ToySpec{});
    HyperParams hp;
    hp.gamma = 2.5;
    const auto fr = fit(ds.x, ds.graph, hp);
    EXPECT_EQ(fr.report.gamma, 2.5);
    EXPECT_GT(fr.model.weights.norm(), 0.0);
}

TEST(Score, Examples) {
    Eigen::MatrixXd c(1, 2);
    c << 0, 0;
    const auto m = manual_model(c, {0, 0});
    Eigen::MatrixXd x(2, 2);
    x << 3, 4, 0, 0;
    const FeatureMatrix fx(x);
    EXPECT_DOUBLE_EQ(score(m, fx, 0), 25.0);
    EXPECT_DOUBLE_EQ(score(m, fx, 1), 0.0);
    EXPECT_EQ(score(m, fx), Eigen::Vector2d(25.0, 0.0));
    EXPECT_THROW(score(m, fx, 2), std::out_of_range);
    EXPECT_THROW(score(LccadModel{}, fx), std::logic_error);
    EXPECT_THROW(score(m, FeatureMatrix(Eigen::MatrixXd::Zero(3, 2))), std::invalid_argument);
}

TEST(Score, PermutationEquivariant) {
    std::mt19937_64 rng(8);
    const Eigen::MatrixXd c = oracle::uniform_matrix(rng, 2, 3);
    const Eigen::MatrixXd x = oracle::uniform_matrix(rng, 5, 3);
    const std::vector<int> states{0, 1, 1, 0, 1};
    const std::vector<int> perm{3, 0, 4, 1, 2};
    Eigen::MatrixXd px(5, 3);
    std::vector<int> ps(5);
    for (int i = 0; i < 5; ++i) {
        px.row(i) = x.row(perm[static_cast<std::size_t>(i)]);
        ps[static_cast<std::size_t>(i)] = states[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    }
    const auto s = score(manual_model(c, states), FeatureMatrix(x));
    const auto t = score(manual_model(c, ps), FeatureMatrix(px));
    for (int i = 0; i < 5; ++i) EXPECT_EQ(t[i], s[perm[static_cast<std::size_t>(i)]]);
}

TEST(Objective, MixingSpecialCases) {
    std::mt19937_64 rng(9);
    const Eigen::MatrixXd x = oracle::uniform_matrix(rng, 6, 2);
    auto m = manual_model(oracle::uniform_matrix(rng, 2, 2), {0, 1, 0, 1, 1, 0});
    const auto g = DependencyGraph::chain(6);
    m.hp.theta = 1.0;
    m.hp.gamma = 1.0;
    m.weights.emis.setConstant(0.3);
    auto parts = objective(m, x, g);
    EXPECT_EQ(parts.total, parts.svdd);
    EXPECT_TRUE(parts.crf_exact);

    m.hp.theta = 0.0;
    m.weights = CrfWeights::zeros(2, 2);
    parts = objective(m, x, g);
    EXPECT_NEAR(parts.crf, 6 * std::log(2.0), 1e-12);
    EXPECT_NEAR(parts.total, parts.crf, 1e-12);
}
