#include "lccad/inference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace lccad {

namespace {

void require_enumerable(std::size_t n, int k) {
    if (static_cast<double>(n) * std::log(static_cast<double>(k)) > std::log(kMaxEnumeration) + 1e-12) {
        throw std::length_error("instance too large for exhaustive enumeration");
    }
}

// Visits every assignment in lexicographic order, node 0 most significant.
template <typename Visit>
void for_each_assignment(std::size_t n, int k, Visit&& visit) {
    std::vector<int> states(n, 0);
    while (true) {
        visit(states);
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++states[pos] < k) break;
            states[pos] = 0;
            if (pos == 0) return;
        }
        if (n == 0) return;
    }
}

double raw_score(const DependencyGraph& graph, const Potentials& pot, const std::vector<int>& states) {
    double total = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) total += pot.node.table(static_cast<Index>(i), states[i]);
    for (const auto& e : graph.edges()) total += pot.edge.table(states[e.first], states[e.second]);
    return total;
}

}  // namespace

Potentials build_potentials(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const ClusterModel& cluster,
                            const CrfWeights& weights, const HyperParams& hp,
                            std::span<const double> class_counts) {
    const int k = cluster.num_classes();
    if (weights.num_classes() != k || static_cast<int>(class_counts.size()) != k) {
        throw std::invalid_argument("class count mismatch in potentials");
    }
    if (cluster.dim() != mapped.cols() || weights.dim() != mapped.cols()) {
        throw std::invalid_argument("feature dimension mismatch in potentials");
    }
    const Index n = mapped.rows();
    const double crf_mix = 1.0 - hp.theta;

    Potentials pot;
    pot.edge.table = crf_mix * weights.trans;
    pot.node.table.resize(n, k);
    if (crf_mix != 0.0) {
        pot.node.table.noalias() = crf_mix * (mapped * weights.emis.transpose());
    } else {
        pot.node.table.setZero();
    }
    if (hp.theta == 0.0) return pot;

    for (int t = 0; t < k; ++t) {
        const bool dead = cluster.empty[static_cast<std::size_t>(t)] || !(class_counts[static_cast<std::size_t>(t)] > 0.0);
        const double scale = dead ? 0.0 : 1.0 / (class_counts[static_cast<std::size_t>(t)] * hp.nu);
        const Eigen::RowVectorXd center = cluster.centers.row(t);
        for (Index i = 0; i < n; ++i) {
            const double loss = dead ? kEmptyClassPenalty
                                     : scale * hinge((mapped.row(i) - center).squaredNorm() - cluster.radii_sq[t]);
            pot.node.table(i, t) -= hp.theta * loss;
        }
    }
    return pot;
}

Potentials build_potentials(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const ClusterModel& cluster,
                            const CrfWeights& weights, const HyperParams& hp) {
    std::vector<double> counts(cluster.counts.begin(), cluster.counts.end());
    return build_potentials(mapped, cluster, weights, hp, counts);
}

double assignment_score(const DependencyGraph& graph, const Potentials& pot, const LatentAssignment& h) {
    if (h.size() != graph.num_nodes() || static_cast<Index>(h.size()) != pot.node.table.rows()) {
        throw std::invalid_argument("assignment size mismatch");
    }
    return raw_score(graph, pot, h.states());
}

LbpResult lbp_map(const DependencyGraph& graph, const Potentials& pot, const LbpOptions& options) {
    const Index n = pot.node.table.rows();
    const Index k = pot.node.table.cols();
    if (static_cast<std::size_t>(n) != graph.num_nodes()) throw std::invalid_argument("potentials/graph size mismatch");
    if (pot.edge.table.rows() != k || pot.edge.table.cols() != k) throw std::invalid_argument("edge table shape mismatch");

    const auto& edges = graph.edges();
    const Index num_msgs = 2 * static_cast<Index>(edges.size());
    // Row 2e carries first -> second, row 2e+1 carries second -> first.
    Eigen::MatrixXd messages = Eigen::MatrixXd::Zero(num_msgs, k);
    Eigen::MatrixXd updated(num_msgs, k);
    Eigen::MatrixXd incoming(n, k);

    auto gather = [&](const Eigen::MatrixXd& msgs) {
        incoming.setZero();
        for (std::size_t e = 0; e < edges.size(); ++e) {
            incoming.row(static_cast<Index>(edges[e].second)) += msgs.row(2 * static_cast<Index>(e));
            incoming.row(static_cast<Index>(edges[e].first)) += msgs.row(2 * static_cast<Index>(e) + 1);
        }
    };

    LbpResult result;
    const double keep = options.damping;
    Eigen::VectorXd belief(k);
    for (int iter = 1; iter <= options.max_iters && num_msgs > 0; ++iter) {
        gather(messages);
        for (std::size_t e = 0; e < edges.size(); ++e) {
            for (int dir = 0; dir < 2; ++dir) {
                const Index row = 2 * static_cast<Index>(e) + dir;
                const Index from = static_cast<Index>(dir == 0 ? edges[e].first : edges[e].second);
                // Exclude the message the receiver sent back along this edge.
                belief = pot.node.table.row(from).transpose() + incoming.row(from).transpose() -
                         messages.row(row ^ 1).transpose();
                for (Index s = 0; s < k; ++s) {
                    double best = -std::numeric_limits<double>::infinity();
                    for (Index t = 0; t < k; ++t) {
                        // Sender state t, receiver state s, looked up in stored orientation.
                        const double pair = dir == 0 ? pot.edge.table(t, s) : pot.edge.table(s, t);
                        best = std::max(best, pair + belief[t]);
                    }
                    updated(row, s) = best;
                }
                if (options.normalize) updated.row(row).array() -= updated.row(row).maxCoeff();
            }
        }
        if (keep > 0.0) {
            updated = keep * messages + (1.0 - keep) * updated;
            if (options.normalize) {
                for (Index r = 0; r < num_msgs; ++r) updated.row(r).array() -= updated.row(r).maxCoeff();
            }
        }
        const double change = (updated - messages).cwiseAbs().maxCoeff();
        messages.swap(updated);
        result.iterations = iter;
        if (change < options.tolerance) {
            result.converged = true;
            break;
        }
    }
    if (num_msgs == 0) result.converged = true;

    gather(messages);
    std::vector<int> states(static_cast<std::size_t>(n), 0);
    for (Index i = 0; i < n; ++i) {
        const Eigen::RowVectorXd marginal = pot.node.table.row(i) + incoming.row(i);
        Index best = 0;
        for (Index s = 1; s < k; ++s) {
            if (marginal[s] > marginal[best]) best = s;
        }
        states[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    result.assignment = LatentAssignment(std::move(states), static_cast<int>(k));
    return result;
}

ExactMapResult exact_map(const DependencyGraph& graph, const Potentials& pot) {
    const std::size_t n = graph.num_nodes();
    const int k = static_cast<int>(pot.node.table.cols());
    if (static_cast<Index>(n) != pot.node.table.rows()) throw std::invalid_argument("potentials/graph size mismatch");
    require_enumerable(n, k);

    std::vector<int> best_states(n, 0);
    double best = -std::numeric_limits<double>::infinity();
    for_each_assignment(n, k, [&](const std::vector<int>& states) {
        const double score = raw_score(graph, pot, states);
        if (score > best) {
            best = score;
            best_states = states;
        }
    });
    return {LatentAssignment(std::move(best_states), k), best};
}

Eigen::VectorXd joint_feature_map(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const LatentAssignment& h,
                                  const DependencyGraph& graph, int num_classes) {
    if (static_cast<Index>(h.size()) != mapped.rows() || h.size() != graph.num_nodes()) {
        throw std::invalid_argument("joint feature map size mismatch");
    }
    if (h.num_states() != num_classes) throw std::invalid_argument("assignment state count mismatch");
    const Index k = num_classes;
    const Index dim = mapped.cols();
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(k * k + k * dim);
    for (const auto& e : graph.edges()) psi[h[e.first] * k + h[e.second]] += 1.0;
    for (Index i = 0; i < mapped.rows(); ++i) {
        psi.segment(k * k + h[static_cast<std::size_t>(i)] * dim, dim) += mapped.row(i).transpose();
    }
    return psi;
}

double log_partition_brute(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const DependencyGraph& graph,
                           const CrfWeights& weights, int num_classes) {
    const std::size_t n = graph.num_nodes();
    if (static_cast<Index>(n) != mapped.rows()) throw std::invalid_argument("partition function size mismatch");
    if (weights.num_classes() != num_classes || weights.dim() != mapped.cols()) {
        throw std::invalid_argument("weight shape mismatch");
    }
    require_enumerable(n, num_classes);

    Potentials pot;
    pot.node.table = mapped * weights.emis.transpose();
    pot.edge.table = weights.trans;

    // Streaming log-sum-exp.
    double peak = -std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for_each_assignment(n, num_classes, [&](const std::vector<int>& states) {
        const double value = raw_score(graph, pot, states);
        if (value > peak) {
            acc = acc * std::exp(peak - value) + 1.0;
            peak = value;
        } else {
            acc += std::exp(value - peak);
        }
    });
    return peak + std::log(acc);
}

}  // namespace lccad
