#include "lccad/model.hpp"

#include "lccad/svdd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace lccad {

FeatureMapper make_mapper(const FeatureMatrix& x, const HyperParams& hp) {
    const double sigma = hp.sigma ? *hp.sigma : median_heuristic_bandwidth(x.values(), hp.seed);
    if (hp.feature_map == FeatureMapKind::Identity) return FeatureMapper::identity(x.cols(), sigma);
    return FeatureMapper::random_fourier(x.cols(), hp.rff_dim, sigma, hp.seed);
}

std::vector<Index> kmeanspp_seeds(const Eigen::Ref<const Eigen::MatrixXd>& mapped, int num_classes,
                                  std::uint64_t seed) {
    const Index n = mapped.rows();
    if (num_classes < 1 || num_classes > n) throw std::invalid_argument("cannot seed more classes than samples");
    std::mt19937_64 rng(seed);
    std::vector<Index> seeds;
    seeds.push_back(std::uniform_int_distribution<Index>(0, n - 1)(rng));

    Eigen::VectorXd nearest = (mapped.rowwise() - mapped.row(seeds[0])).rowwise().squaredNorm();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (static_cast<int>(seeds.size()) < num_classes) {
        const double total = nearest.sum();
        Index pick = -1;
        if (total > 0.0) {
            double target = unit(rng) * total;
            for (Index i = 0; i < n; ++i) {
                if (nearest[i] <= 0.0) continue;
                pick = i;
                target -= nearest[i];
                if (target < 0.0) break;
            }
        } else {
            // All remaining points coincide with a seed; take the first unused row.
            for (Index i = 0; i < n && pick < 0; ++i) {
                if (std::find(seeds.begin(), seeds.end(), i) == seeds.end()) pick = i;
            }
        }
        seeds.push_back(pick);
        nearest = nearest.cwiseMin((mapped.rowwise() - mapped.row(pick)).rowwise().squaredNorm());
    }
    return seeds;
}

std::vector<int> lloyd(const Eigen::Ref<const Eigen::MatrixXd>& mapped, Eigen::MatrixXd& centers, int max_iters) {
    const Index n = mapped.rows();
    const Index k = centers.rows();
    std::vector<int> states(static_cast<std::size_t>(n), -1);
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (Index i = 0; i < n; ++i) {
            Index best = 0;
            double best_d = (centers.row(0) - mapped.row(i)).squaredNorm();
            for (Index c = 1; c < k; ++c) {
                const double d = (centers.row(c) - mapped.row(i)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (states[static_cast<std::size_t>(i)] != static_cast<int>(best)) {
                states[static_cast<std::size_t>(i)] = static_cast<int>(best);
                changed = true;
            }
        }
        if (!changed) break;
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, mapped.cols());
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
        for (Index i = 0; i < n; ++i) {
            sums.row(states[static_cast<std::size_t>(i)]) += mapped.row(i);
            counts[states[static_cast<std::size_t>(i)]] += 1.0;
        }
        for (Index c = 0; c < k; ++c) {
            if (counts[c] > 0.0) centers.row(c) = sums.row(c) / counts[c];
        }
    }
    return states;
}

LbpResult infer_states(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const DependencyGraph& graph,
                       const ClusterModel& cluster, const CrfWeights& weights, const HyperParams& hp,
                       std::span<const double> class_counts) {
    const Potentials pot = build_potentials(mapped, cluster, weights, hp, class_counts);
    LbpOptions options;
    options.max_iters = hp.lbp_max_iters;
    options.damping = hp.lbp_damping;
    return lbp_map(graph, pot, options);
}

namespace {

ObjectiveParts objective_impl(const LccadModel& model, const Eigen::Ref<const Eigen::MatrixXd>& mapped,
                              const DependencyGraph& graph, bool allow_exact) {
    const auto& h = model.assignment;
    const auto& hp = model.hp;
    const int k = h.num_states();
    if (static_cast<Index>(h.size()) != mapped.rows()) throw std::invalid_argument("objective size mismatch");

    ObjectiveParts parts;
    const auto norms = class_normalizers(h, hp.count_policy);
    std::vector<double> loss(static_cast<std::size_t>(k), 0.0);
    for (std::size_t i = 0; i < h.size(); ++i) {
        const int c = h[i];
        const double d = (mapped.row(static_cast<Index>(i)) - model.cluster.centers.row(c)).squaredNorm();
        loss[static_cast<std::size_t>(c)] += hinge(d - model.cluster.radii_sq[c]);
    }
    for (int c = 0; c < k; ++c) {
        const double norm = norms[static_cast<std::size_t>(c)];
        parts.svdd += model.cluster.radii_sq[c];
        if (norm > 0.0) parts.svdd += loss[static_cast<std::size_t>(c)] / (norm * hp.nu);
    }

    const double gamma = hp.gamma.value_or(0.0);
    const double penalty = 0.5 * gamma * model.weights.norm() * model.weights.norm();
    const bool exact = allow_exact && static_cast<double>(h.size()) * std::log(static_cast<double>(k)) <=
                                          std::log(kMaxEnumeration);
    if (exact) {
        const Eigen::VectorXd psi = joint_feature_map(mapped, h, graph, k);
        parts.crf = penalty - model.weights.flatten().dot(psi) +
                    log_partition_brute(mapped, graph, model.weights, k);
        parts.crf_exact = true;
    } else {
        parts.crf = penalty + negative_log_pseudo_likelihood(mapped, h, graph, model.weights);
    }
    parts.total = hp.theta * parts.svdd + (1.0 - hp.theta) * parts.crf;
    return parts;
}

std::size_t count_changes(const LatentAssignment& a, const LatentAssignment& b) {
    std::size_t changed = 0;
    for (std::size_t i = 0; i < a.size(); ++i) changed += a[i] != b[i];
    return changed;
}

}  // namespace

FitResult fit(const FeatureMatrix& x, const DependencyGraph& graph, const HyperParams& hp) {
    const auto report = validate_problem(x, graph, hp);
    if (!report.ok()) throw std::invalid_argument(report.message());

    FitResult out;
    LccadModel& model = out.model;
    model.hp = hp;
    model.mapper = make_mapper(x, hp);
    model.hp.sigma = model.mapper->sigma();
    const Eigen::MatrixXd mapped = model.mapper->map_all(x);
    const Index n = mapped.rows();
    const int k = hp.num_classes;

    // c^0 from k-means++ seeds, v^0 = 0.
    const auto seeds = kmeanspp_seeds(mapped, k, hp.seed);
    model.cluster.centers.resize(k, mapped.cols());
    for (int c = 0; c < k; ++c) model.cluster.centers.row(c) = mapped.row(seeds[static_cast<std::size_t>(c)]);
    if (hp.init == InitMethod::KMeans) lloyd(mapped, model.cluster.centers, 100);
    model.cluster.radii_sq = Eigen::VectorXd::Zero(k);
    model.cluster.counts.assign(static_cast<std::size_t>(k), 0);
    model.cluster.empty.assign(static_cast<std::size_t>(k), false);
    model.weights = CrfWeights::zeros(k, mapped.cols());

    const std::vector<double> uniform(static_cast<std::size_t>(k), static_cast<double>(n) / k);
    const bool use_crf = hp.theta < 1.0;
    std::optional<double> gamma = hp.gamma;

    FitReport& rep = out.report;
    for (int iter = 1; iter <= hp.max_outer_iters; ++iter) {
        std::vector<double> counts = uniform;
        if (iter > 1 && hp.count_policy == ClassCountPolicy::Lagged) {
            counts.assign(model.cluster.counts.begin(), model.cluster.counts.end());
        }
        const LbpResult lbp = infer_states(mapped, graph, model.cluster, model.weights, model.hp, counts);
        const LatentAssignment& h = lbp.assignment;
        rep.iterations = iter;

        IterationRecord record;
        record.iteration = iter;
        record.lbp_converged = lbp.converged;
        record.lbp_iterations = lbp.iterations;
        record.changed = iter == 1 ? static_cast<std::size_t>(n) : count_changes(h, model.assignment);
        model.history.push_back(h);

        if (iter > 1 && h == model.assignment) {
            rep.converged = true;
            rep.stop = StopReason::Converged;
            record.objective = objective_impl(model, mapped, graph, false);
            model.trace.push_back(record);
            break;
        }
        // A repeat of anything older than the previous iterate is a cycle.
        bool cycling = false;
        for (std::size_t s = 0; s + 2 < model.history.size(); ++s) {
            if (model.history[s] == h) {
                cycling = true;
                break;
            }
        }

        model.assignment = h;
        model.cluster = update_centers(mapped, h, model.hp);
        if (use_crf && !cycling) {
            if (!gamma) {
                const auto tuned = tune_gamma(mapped, h, graph);
                gamma = tuned.fit.gamma;
                model.hp.gamma = gamma;
                rep.gamma_target_reached = tuned.target_reached;
                model.weights = tuned.fit.weights;
            } else {
                model.hp.gamma = gamma;
                model.weights = update_weights(mapped, h, graph, *gamma, &model.weights).weights;
            }
        }
        record.objective = objective_impl(model, mapped, graph, false);
        model.trace.push_back(record);
        if (cycling) {
            rep.stop = StopReason::Cycling;
            break;
        }
    }

    rep.sigma = model.mapper->sigma();
    rep.gamma = model.hp.gamma.value_or(std::numeric_limits<double>::quiet_NaN());
    rep.final_objective = model.trace.empty() ? ObjectiveParts{} : model.trace.back().objective;
    return out;
}

Eigen::VectorXd score(const LccadModel& model, const FeatureMatrix& x) {
    if (!model.fitted()) throw std::logic_error("model is not fitted");
    if (static_cast<std::size_t>(x.rows()) != model.assignment.size()) {
        throw std::invalid_argument("scores are only defined for the training samples");
    }
    const Eigen::MatrixXd mapped = model.mapper->map_all(x);
    Eigen::VectorXd s(mapped.rows());
    for (Index i = 0; i < mapped.rows(); ++i) {
        s[i] = (model.cluster.centers.row(model.assignment[static_cast<std::size_t>(i)]) - mapped.row(i)).squaredNorm();
    }
    return s;
}

double score(const LccadModel& model, const FeatureMatrix& x, Index i) {
    if (!model.fitted()) throw std::logic_error("model is not fitted");
    if (static_cast<std::size_t>(x.rows()) != model.assignment.size()) {
        throw std::invalid_argument("scores are only defined for the training samples");
    }
    if (i < 0 || i >= x.rows()) throw std::out_of_range("sample index out of range");
    const Eigen::VectorXd phi = model.mapper->map(x.row(i));
    return (model.cluster.centers.row(model.assignment[static_cast<std::size_t>(i)]).transpose() - phi).squaredNorm();
}

ObjectiveParts objective(const LccadModel& model, const Eigen::Ref<const Eigen::MatrixXd>& mapped,
                         const DependencyGraph& graph) {
    if (model.assignment.size() == 0) throw std::logic_error("model is not fitted");
    return objective_impl(model, mapped, graph, true);
}

const char* to_string(StopReason reason) {
    switch (reason) {
        case StopReason::Converged: return "converged";
        case StopReason::Cycling: return "cycling";
        case StopReason::IterationLimit: return "iteration-limit";
    }
    return "unknown";
}

}  // namespace lccad
