#include "lccad/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace lccad {

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw std::invalid_argument("feature matrix must have at least one row and one column");
    }
    if (!values_.allFinite()) {
        throw std::invalid_argument("feature matrix contains non-finite values");
    }
}

DependencyGraph::DependencyGraph(std::size_t num_nodes, std::vector<Edge> edges)
    : edges_(std::move(edges)), neighbors_(num_nodes), incident_(num_nodes) {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const auto [a, b] = edges_[e];
        if (a >= num_nodes || b >= num_nodes) {
            throw std::invalid_argument("edge endpoint out of range");
        }
        if (a == b) {
            throw std::invalid_argument("self-loop in dependency graph");
        }
        if (!seen.emplace(std::min(a, b), std::max(a, b)).second) {
            throw std::invalid_argument("duplicate edge in dependency graph");
        }
        neighbors_[a].push_back(b);
        neighbors_[b].push_back(a);
        incident_[a].push_back(e);
        incident_[b].push_back(e);
    }
}

DependencyGraph DependencyGraph::empty(std::size_t num_nodes) { return {num_nodes, {}}; }

DependencyGraph DependencyGraph::chain(std::size_t num_nodes) {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i + 1 < num_nodes; ++i) edges.push_back({i, i + 1});
    return {num_nodes, std::move(edges)};
}

DependencyGraph DependencyGraph::grid(std::size_t height, std::size_t width) {
    std::vector<Edge> edges;
    edges.reserve(height * (width ? width - 1 : 0) + (height ? height - 1 : 0) * width);
    for (std::size_t r = 0; r < height; ++r) {
        for (std::size_t c = 0; c + 1 < width; ++c) edges.push_back({r * width + c, r * width + c + 1});
    }
    for (std::size_t r = 0; r + 1 < height; ++r) {
        for (std::size_t c = 0; c < width; ++c) edges.push_back({r * width + c, (r + 1) * width + c});
    }
    return {height * width, std::move(edges)};
}

bool DependencyGraph::is_forest() const {
    // Union-find: an edge joining two nodes already connected closes a cycle.
    std::vector<std::size_t> parent(num_nodes());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto& e : edges_) {
        const auto ra = find(e.first);
        const auto rb = find(e.second);
        if (ra == rb) return false;
        parent[ra] = rb;
    }
    return true;
}

LatentAssignment::LatentAssignment(std::vector<int> states, int num_states)
    : states_(std::move(states)), num_states_(num_states) {
    if (num_states_ < 1) throw std::invalid_argument("number of states must be at least 1");
    for (int s : states_) {
        if (s < 0 || s >= num_states_) throw std::invalid_argument("latent state out of range");
    }
}

std::vector<std::size_t> LatentAssignment::counts() const {
    std::vector<std::size_t> out(static_cast<std::size_t>(num_states_), 0);
    for (int s : states_) ++out[static_cast<std::size_t>(s)];
    return out;
}

void ClusterModel::check() const {
    const auto k = static_cast<std::size_t>(centers.rows());
    if (radii_sq.size() != centers.rows() || counts.size() != k || empty.size() != k) {
        throw std::invalid_argument("cluster model shape mismatch");
    }
    if (!centers.allFinite()) throw std::invalid_argument("cluster centers must be finite");
    if ((radii_sq.array() < 0.0).any() || !radii_sq.allFinite()) {
        throw std::invalid_argument("cluster radii must be finite and non-negative");
    }
}

CrfWeights CrfWeights::zeros(int num_classes, Index dim) {
    return {Eigen::MatrixXd::Zero(num_classes, num_classes), Eigen::MatrixXd::Zero(num_classes, dim)};
}

CrfWeights CrfWeights::from_flat(std::span<const double> flat, int num_classes, Index dim) {
    const Index k = num_classes;
    if (static_cast<Index>(flat.size()) != k * k + k * dim) {
        throw std::invalid_argument("flat weight vector has wrong length");
    }
    CrfWeights w = zeros(num_classes, dim);
    std::size_t pos = 0;
    for (Index a = 0; a < k; ++a)
        for (Index b = 0; b < k; ++b) w.trans(a, b) = flat[pos++];
    for (Index s = 0; s < k; ++s)
        for (Index j = 0; j < dim; ++j) w.emis(s, j) = flat[pos++];
    return w;
}

Eigen::VectorXd CrfWeights::flatten() const {
    Eigen::VectorXd flat(flat_size());
    Index pos = 0;
    for (Index a = 0; a < trans.rows(); ++a)
        for (Index b = 0; b < trans.cols(); ++b) flat[pos++] = trans(a, b);
    for (Index s = 0; s < emis.rows(); ++s)
        for (Index j = 0; j < emis.cols(); ++j) flat[pos++] = emis(s, j);
    return flat;
}

double CrfWeights::norm() const {
    return std::sqrt(trans.squaredNorm() + emis.squaredNorm());
}

std::vector<std::string> HyperParams::violations() const {
    std::vector<std::string> out;
    if (num_classes < 1) out.emplace_back("K must be at least 1");
    if (!(theta >= 0.0 && theta <= 1.0)) out.emplace_back("theta out of range");
    if (!(nu > 0.0 && nu <= 1.0)) out.emplace_back("nu out of range");
    if (gamma && !(*gamma >= 0.0 && std::isfinite(*gamma))) out.emplace_back("gamma out of range");
    if (sigma && !(*sigma > 0.0 && std::isfinite(*sigma))) out.emplace_back("sigma out of range");
    if (rff_dim < 1) out.emplace_back("rff_dim must be at least 1");
    if (max_outer_iters < 1) out.emplace_back("max_outer_iters must be at least 1");
    if (lbp_max_iters < 1) out.emplace_back("lbp_max_iters must be at least 1");
    if (!(lbp_damping >= 0.0 && lbp_damping < 1.0)) out.emplace_back("lbp damping out of range");
    return out;
}

void HyperParams::check() const {
    const ValidationReport report{violations()};
    if (!report.ok()) throw std::invalid_argument(report.message());
}

std::string ValidationReport::message() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i];
    }
    return os.str();
}

ValidationReport validate_problem(const FeatureMatrix& x, const DependencyGraph& graph,
                                  const HyperParams& hp) {
    ValidationReport report{hp.violations()};
    if (static_cast<std::size_t>(x.rows()) != graph.num_nodes()) {
        report.violations.emplace_back("graph/data size mismatch");
    }
    if (hp.num_classes > x.rows()) report.violations.emplace_back("K exceeds number of samples");
    return report;
}

}  // namespace lccad
