#pragma once

// MAP inference of latent states over the dependency graph.
//
// Node potential of state t at sample i:
//   vartheta_i(t) = (1-theta) <v_em_t, phi(x_i)> - theta / (n_t nu) * hinge(||c_t - phi(x_i)||^2 - t_t)
// Edge potential for a stored edge (a, b) with states (h_a, h_b):
//   iota(h_a, h_b) = (1-theta) v_trans(h_a, h_b)
// and the MAP problem maximises sum_i vartheta_i(h_i) + sum_E iota(h_a, h_b).

#include "lccad/core.hpp"

#include <span>

namespace lccad {

/// Replaces 1/(n_t nu) * hinge(...) for a class with no members.
inline constexpr double kEmptyClassPenalty = 1e6;

struct NodePotentials {
    Eigen::MatrixXd table;  // n x K
};

struct EdgePotentials {
    Eigen::MatrixXd table;  // K x K, shared by every edge
};

struct Potentials {
    NodePotentials node;
    EdgePotentials edge;
};

/// Hinge loss max(0, x).
inline double hinge(double x) { return x > 0.0 ? x : 0.0; }

/// class_counts supplies n_t for the 1/(n_t nu) factor; classes flagged empty
/// in the cluster model take kEmptyClassPenalty instead.
Potentials build_potentials(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const ClusterModel& cluster,
                            const CrfWeights& weights, const HyperParams& hp,
                            std::span<const double> class_counts);

/// Same, with n_t taken from cluster.counts.
Potentials build_potentials(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const ClusterModel& cluster,
                            const CrfWeights& weights, const HyperParams& hp);

/// Objective value sum_i vartheta_i(h_i) + sum_E iota(h_a, h_b).
double assignment_score(const DependencyGraph& graph, const Potentials& pot, const LatentAssignment& h);

struct LbpOptions {
    int max_iters = 100;
    double damping = 0.5;
    double tolerance = 1e-8;
    bool normalize = true;  // subtract the max from every message after each update
};

struct LbpResult {
    LatentAssignment assignment;
    bool converged = false;
    int iterations = 0;
};

/// Damped synchronous max-product belief propagation. Ties in the decoded
/// max-marginals go to the lowest state index.
LbpResult lbp_map(const DependencyGraph& graph, const Potentials& pot, const LbpOptions& options = {});

struct ExactMapResult {
    LatentAssignment assignment;
    double score = 0.0;
};

/// Largest K^n accepted by the enumeration routines.
inline constexpr double kMaxEnumeration = 1e7;

/// Exhaustive MAP. Enumerates assignments in lexicographic order (node 0
/// most significant); the first maximiser wins. Throws std::length_error
/// when K^n exceeds kMaxEnumeration.
ExactMapResult exact_map(const DependencyGraph& graph, const Potentials& pot);

/// psi(X, H): transition counts (row-major K x K) followed by the per-state
/// sums of mapped features (row-major K x D).
Eigen::VectorXd joint_feature_map(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const LatentAssignment& h,
                                  const DependencyGraph& graph, int num_classes);

/// log sum_H exp(<v, psi(X, H)>) by enumeration. Throws std::length_error
/// when K^n exceeds kMaxEnumeration.
double log_partition_brute(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const DependencyGraph& graph,
                           const CrfWeights& weights, int num_classes);

}  // namespace lccad
