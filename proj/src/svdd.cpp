#include "lccad/svdd.hpp"

#include "lccad/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace lccad {

std::vector<double> class_normalizers(const LatentAssignment& h, ClassCountPolicy policy) {
    const auto k = static_cast<std::size_t>(h.num_states());
    if (policy == ClassCountPolicy::Uniform) {
        return std::vector<double>(k, static_cast<double>(h.size()) / static_cast<double>(k));
    }
    const auto counts = h.counts();
    return {counts.begin(), counts.end()};
}

double svdd_objective(std::span<const double> sq_dists, double radius_sq, double budget) {
    double loss = 0.0;
    for (double d : sq_dists) loss += hinge(d - radius_sq);
    return radius_sq + loss / budget;
}

double svdd_optimal_radius(std::vector<double> sq_dists, double budget) {
    const auto n = sq_dists.size();
    const auto allowed = static_cast<std::size_t>(std::floor(budget + 1e-12));
    if (allowed >= n) return 0.0;
    // (n - allowed)-th smallest, 1-based.
    auto nth = sq_dists.begin() + static_cast<std::ptrdiff_t>(n - allowed - 1);
    std::nth_element(sq_dists.begin(), nth, sq_dists.end());
    return std::max(0.0, *nth);
}

namespace {

std::vector<double> squared_distances(const Eigen::Ref<const Eigen::MatrixXd>& points,
                                      const Eigen::VectorXd& center) {
    std::vector<double> d(static_cast<std::size_t>(points.rows()));
    for (Index i = 0; i < points.rows(); ++i) {
        d[static_cast<std::size_t>(i)] = (points.row(i).transpose() - center).squaredNorm();
    }
    return d;
}

// Objective with the radius optimised out.
double profile_objective(const Eigen::Ref<const Eigen::MatrixXd>& points, const Eigen::VectorXd& center,
                         double budget, double* radius_out = nullptr) {
    const auto d = squared_distances(points, center);
    const double t = svdd_optimal_radius(d, budget);
    if (radius_out) *radius_out = t;
    return svdd_objective(d, t, budget);
}

}  // namespace

SvddFit fit_hypersphere(const Eigen::Ref<const Eigen::MatrixXd>& points, double budget, double tolerance,
                        int max_iters) {
    if (points.rows() < 1) throw std::invalid_argument("hypersphere needs at least one point");
    if (!(budget > 0.0)) throw std::invalid_argument("hypersphere budget must be positive");

    SvddFit fit;
    fit.center = points.colwise().mean().transpose();
    if (budget >= static_cast<double>(points.rows())) {
        // Every point may sit outside: t = 0 and the mean minimises the squared loss.
        fit.objective = profile_objective(points, fit.center, budget, &fit.radius_sq);
        return fit;
    }

    double radius = 0.0;
    double current = profile_objective(points, fit.center, budget, &radius);
    std::vector<std::size_t> order(static_cast<std::size_t>(points.rows()));
    for (int iter = 1; iter <= max_iters; ++iter) {
        fit.iterations = iter;
        const auto d = squared_distances(points, fit.center);

        // Outer points weighted by how much of the budget they consume; the
        // point straddling the boundary gets the fractional remainder.
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return d[a] > d[b]; });
        Eigen::VectorXd target = Eigen::VectorXd::Zero(points.cols());
        double remaining = budget;
        double mass = 0.0;
        for (auto idx : order) {
            if (remaining <= 0.0) break;
            const double w = std::min(1.0, remaining);
            target += w * points.row(static_cast<Index>(idx)).transpose();
            mass += w;
            remaining -= w;
        }
        target /= mass;

        const Eigen::VectorXd step = target - fit.center;
        double eta = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 40; ++halving, eta *= 0.5) {
            const Eigen::VectorXd trial = fit.center + eta * step;
            double trial_radius = 0.0;
            const double value = profile_objective(points, trial, budget, &trial_radius);
            if (value < current) {
                const double decrease = current - value;
                fit.center = trial;
                radius = trial_radius;
                current = value;
                improved = decrease >= tolerance;
                break;
            }
        }
        if (!improved) break;
    }
    fit.radius_sq = radius;
    fit.objective = current;
    return fit;
}

ClusterModel update_centers(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const LatentAssignment& h,
                            const HyperParams& hp) {
    if (static_cast<Index>(h.size()) != mapped.rows()) throw std::invalid_argument("assignment size mismatch");
    const int k = h.num_states();
    ClusterModel model;
    model.centers.resize(k, mapped.cols());
    model.radii_sq = Eigen::VectorXd::Zero(k);
    model.counts = h.counts();
    model.empty.assign(static_cast<std::size_t>(k), false);

    const Eigen::RowVectorXd global_mean = mapped.colwise().mean();
    for (int c = 0; c < k; ++c) {
        const auto count = model.counts[static_cast<std::size_t>(c)];
        if (count == 0) {
            model.centers.row(c) = global_mean;
            model.empty[static_cast<std::size_t>(c)] = true;
            continue;
        }
        Eigen::MatrixXd members(static_cast<Index>(count), mapped.cols());
        Index r = 0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (h[i] == c) members.row(r++) = mapped.row(static_cast<Index>(i));
        }
        if (hp.nu >= 1.0) {
            model.centers.row(c) = members.colwise().mean();
        } else {
            const auto fit = fit_hypersphere(members, static_cast<double>(count) * hp.nu);
            model.centers.row(c) = fit.center.transpose();
            model.radii_sq[c] = fit.radius_sq;
        }
    }
    return model;
}

}  // namespace lccad
