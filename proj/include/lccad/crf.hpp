#pragma once

// CRF weight estimation for a fixed assignment by penalised pseudo-likelihood:
//   L(v) = gamma/2 ||v||^2 - sum_i log P(h_i | h_N(i), x_i, v)
// where the local conditional of node i scores state s by
//   <v_em_s, phi(x_i)> + sum over incident edges of v_trans in stored orientation.

#include "lccad/core.hpp"

#include <functional>

namespace lccad {

/// Value of L(v); writes dL/dv into `gradient` when it is non-null.
double pseudo_likelihood_objective(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const LatentAssignment& h,
                                   const DependencyGraph& graph, double gamma, const CrfWeights& weights,
                                   CrfWeights* gradient = nullptr);

/// Negative log pseudo-likelihood without the penalty.
double negative_log_pseudo_likelihood(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const LatentAssignment& h,
                                      const DependencyGraph& graph, const CrfWeights& weights);

struct DescentOptions {
    double gradient_tolerance = 1e-5;
    int max_iters = 500;
};

struct DescentResult {
    Eigen::VectorXd x;
    double value = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

/// Gradient descent with Armijo backtracking; trial steps use the
/// Barzilai-Borwein length after the first iteration.
DescentResult gradient_descent(const Objective& f, Eigen::VectorXd x0, const DescentOptions& options = {});

struct WeightFit {
    CrfWeights weights;
    double gamma = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Minimises L(v) for the given gamma, warm-started from `start` when given.
WeightFit update_weights(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const LatentAssignment& h,
                         const DependencyGraph& graph, double gamma, const CrfWeights* start = nullptr,
                         const DescentOptions& options = {});

struct GammaTuning {
    WeightFit fit;
    bool target_reached = false;
    int bisection_steps = 0;
};

inline constexpr double kGammaMin = 1e-4;
inline constexpr double kGammaMax = 1e4;

/// Bisects log(gamma) on [kGammaMin, kGammaMax] until the fitted weights have
/// ||v|| within [target - tol, target + tol]. When the target cannot be
/// bracketed the closest endpoint is returned with target_reached = false.
GammaTuning tune_gamma(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const LatentAssignment& h,
                       const DependencyGraph& graph, double target_norm = 1.0, double norm_tolerance = 0.01);

}  // namespace lccad
