#pragma once

// Latent-class SVDD sub-problem: with the assignment fixed, each class k
// solves
//   min_{c, t >= 0}  t + 1/(n_k nu) * sum_{i in k} hinge(||c - phi(x_i)||^2 - t)
// independently. For nu = 1 the optimum is the class mean with t = 0.

#include "lccad/core.hpp"

#include <span>
#include <vector>

namespace lccad {

/// Normaliser n_k used in the 1/(n_k nu) factor for every class.
std::vector<double> class_normalizers(const LatentAssignment& h, ClassCountPolicy policy);

/// Objective of one hypersphere: t + sum hinge(d_i - t) / budget, where d_i are
/// squared distances and budget = n_k nu.
double svdd_objective(std::span<const double> sq_dists, double radius_sq, double budget);

/// Optimal radius for fixed squared distances: the smallest t such that at
/// most `budget` distances exceed it (0 when budget covers every point).
double svdd_optimal_radius(std::vector<double> sq_dists, double budget);

struct SvddFit {
    Eigen::VectorXd center;
    double radius_sq = 0.0;
    double objective = 0.0;
    int iterations = 0;
};

/// Single hypersphere over the rows of `points`, with `budget` = n_k nu.
/// Block-coordinate descent: exact radius for a fixed center, then a
/// line-searched step towards the weighted mean of the points outside the
/// sphere, until the objective decrease drops below `tolerance`.
SvddFit fit_hypersphere(const Eigen::Ref<const Eigen::MatrixXd>& points, double budget,
                        double tolerance = 1e-6, int max_iters = 1000);

/// Per-class centers and radii for a fixed assignment. Empty classes get the
/// global mean as center, t = 0, and are flagged.
ClusterModel update_centers(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const LatentAssignment& h,
                            const HyperParams& hp);

}  // namespace lccad
