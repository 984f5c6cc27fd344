#include "lccad/crf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lccad {

namespace {

// Local conditional scores: emission plus transitions to the fixed neighbour states.
Eigen::MatrixXd local_scores(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const LatentAssignment& h,
                             const DependencyGraph& graph, const CrfWeights& weights) {
    Eigen::MatrixXd scores = mapped * weights.emis.transpose();
    for (const auto& e : graph.edges()) {
        const auto a = static_cast<Index>(e.first);
        const auto b = static_cast<Index>(e.second);
        scores.row(a) += weights.trans.col(h[e.second]).transpose();
        scores.row(b) += weights.trans.row(h[e.first]);
    }
    return scores;
}

void check_shapes(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const LatentAssignment& h,
                  const DependencyGraph& graph, const CrfWeights& weights) {
    if (static_cast<Index>(h.size()) != mapped.rows() || h.size() != graph.num_nodes()) {
        throw std::invalid_argument("pseudo-likelihood size mismatch");
    }
    if (weights.num_classes() != h.num_states() || weights.dim() != mapped.cols()) {
        throw std::invalid_argument("weight shape mismatch");
    }
}

}  // namespace

double negative_log_pseudo_likelihood(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const LatentAssignment& h,
                                      const DependencyGraph& graph, const CrfWeights& weights) {
    check_shapes(mapped, h, graph, weights);
    const Eigen::MatrixXd scores = local_scores(mapped, h, graph, weights);
    double nll = 0.0;
    for (Index i = 0; i < scores.rows(); ++i) {
        const double peak = scores.row(i).maxCoeff();
        const double lse = peak + std::log((scores.row(i).array() - peak).exp().sum());
        nll += lse - scores(i, h[static_cast<std::size_t>(i)]);
    }
    return nll;
}

double pseudo_likelihood_objective(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const LatentAssignment& h,
                                   const DependencyGraph& graph, double gamma, const CrfWeights& weights,
                                   CrfWeights* gradient) {
    check_shapes(mapped, h, graph, weights);
    const Eigen::MatrixXd scores = local_scores(mapped, h, graph, weights);
    const Index n = scores.rows();

    double nll = 0.0;
    // residual(i, s) = P(s | neighbours) - 1[s = h_i]
    Eigen::MatrixXd residual(n, scores.cols());
    for (Index i = 0; i < n; ++i) {
        const double peak = scores.row(i).maxCoeff();
        Eigen::RowVectorXd p = (scores.row(i).array() - peak).exp();
        const double z = p.sum();
        nll += peak + std::log(z) - scores(i, h[static_cast<std::size_t>(i)]);
        residual.row(i) = p / z;
        residual(i, h[static_cast<std::size_t>(i)]) -= 1.0;
    }

    const double penalty = 0.5 * gamma * (weights.trans.squaredNorm() + weights.emis.squaredNorm());
    if (gradient) {
        gradient->emis.noalias() = residual.transpose() * mapped;
        gradient->emis += gamma * weights.emis;
        gradient->trans = gamma * weights.trans;
        for (const auto& e : graph.edges()) {
            gradient->trans.col(h[e.second]) += residual.row(static_cast<Index>(e.first)).transpose();
            gradient->trans.row(h[e.first]) += residual.row(static_cast<Index>(e.second));
        }
    }
    return penalty + nll;
}

DescentResult gradient_descent(const Objective& f, Eigen::VectorXd x0, const DescentOptions& options) {
    constexpr double kArmijo = 1e-4;
    DescentResult r;
    r.x = std::move(x0);
    Eigen::VectorXd grad(r.x.size());
    r.value = f(r.x, &grad);
    r.gradient_norm = grad.norm();

    double step = r.gradient_norm > 0.0 ? 1.0 / r.gradient_norm : 1.0;
    Eigen::VectorXd trial(r.x.size());
    Eigen::VectorXd trial_grad(r.x.size());
    for (int iter = 0; iter < options.max_iters; ++iter) {
        if (r.gradient_norm <= options.gradient_tolerance) {
            r.converged = true;
            return r;
        }
        const double slope = grad.squaredNorm();
        double value = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
            trial = r.x - step * grad;
            value = f(trial, &trial_grad);
            if (value <= r.value - kArmijo * step * slope) {
                accepted = true;
                break;
            }
        }
        r.iterations = iter + 1;
        if (!accepted) break;  // no representable decrease left

        const Eigen::VectorXd s = trial - r.x;
        const Eigen::VectorXd y = trial_grad - grad;
        const double sy = s.dot(y);
        step = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * step;

        r.x.swap(trial);
        grad.swap(trial_grad);
        r.value = value;
        r.gradient_norm = grad.norm();
    }
    r.converged = r.gradient_norm <= options.gradient_tolerance;
    return r;
}

WeightFit update_weights(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const LatentAssignment& h,
                         const DependencyGraph& graph, double gamma, const CrfWeights* start,
                         const DescentOptions& options) {
    if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be non-negative");
    const int k = h.num_states();
    const Index dim = mapped.cols();
    CrfWeights scratch = CrfWeights::zeros(k, dim);
    CrfWeights grad = CrfWeights::zeros(k, dim);

    const Objective objective = [&](const Eigen::VectorXd& flat, Eigen::VectorXd* g) {
        scratch = CrfWeights::from_flat({flat.data(), static_cast<std::size_t>(flat.size())}, k, dim);
        const double value = pseudo_likelihood_objective(mapped, h, graph, gamma, scratch, g ? &grad : nullptr);
        if (g) *g = grad.flatten();
        return value;
    };
    Eigen::VectorXd x0 = start ? start->flatten() : CrfWeights::zeros(k, dim).flatten();
    const auto result = gradient_descent(objective, std::move(x0), options);

    WeightFit fit;
    fit.weights = CrfWeights::from_flat({result.x.data(), static_cast<std::size_t>(result.x.size())}, k, dim);
    fit.gamma = gamma;
    fit.iterations = result.iterations;
    fit.converged = result.converged;
    return fit;
}

GammaTuning tune_gamma(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const LatentAssignment& h,
                       const DependencyGraph& graph, double target_norm, double norm_tolerance) {
    const int k = h.num_states();
    const Index dim = mapped.cols();

    // Far from the optimum v ~= -grad L(0) / gamma, which gives the first guess.
    CrfWeights grad0 = CrfWeights::zeros(k, dim);
    pseudo_likelihood_objective(mapped, h, graph, 0.0, CrfWeights::zeros(k, dim), &grad0);
    const double g0 = grad0.norm();

    GammaTuning out;
    if (g0 == 0.0) {
        // The assignment is already explained by v = 0 for every gamma.
        out.fit = update_weights(mapped, h, graph, kGammaMax);
        return out;
    }

    // Log-space bracket with interpolated probes; a probe that leaves the
    // bracket falls back to the midpoint.
    double lo = std::log(kGammaMin);
    double hi = std::log(kGammaMax);
    double probe = std::clamp(std::log(g0 / target_norm), lo, hi);
    double prev_probe = std::numeric_limits<double>::quiet_NaN();
    double prev_log_norm = 0.0;
    CrfWeights warm = CrfWeights::zeros(k, dim);
    double best_gap = std::numeric_limits<double>::infinity();

    for (int step = 1; step <= 80; ++step) {
        const WeightFit fit = update_weights(mapped, h, graph, std::exp(probe), &warm);
        warm = fit.weights;
        const double norm = fit.weights.norm();
        out.bisection_steps = step;
        const double gap = std::abs(norm - target_norm);
        if (gap < best_gap) {
            best_gap = gap;
            out.fit = fit;
        }
        if (gap <= norm_tolerance) {
            out.target_reached = true;
            return out;
        }
        if (norm > target_norm) {
            lo = probe;
        } else {
            hi = probe;
        }
        if (hi - lo < 1e-12) break;

        double next = 0.5 * (lo + hi);
        const double log_norm = std::log(std::max(norm, 1e-300));
        if (std::isfinite(prev_probe) && probe != prev_probe && norm > 0.0) {
            const double slope = (log_norm - prev_log_norm) / (probe - prev_probe);
            if (slope < 0.0) {
                const double guess = probe + (std::log(target_norm) - log_norm) / slope;
                if (guess > lo && guess < hi) next = guess;
            }
        }
        prev_probe = probe;
        prev_log_norm = log_norm;
        probe = next;
    }
    return out;
}

}  // namespace lccad
