#pragma once

// Domain types shared by every stage of the detector: the sample matrix,
// the dependency graph between samples, latent state vectors, per-class
// hyperspheres, CRF weights and hyperparameters.
//
// Types with invariants validate them in their constructors and throw
// std::invalid_argument on violation. States are 0-based everywhere.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lccad {

using Index = Eigen::Index;

/// n x d matrix of raw samples, one row per sample. All values finite.
class FeatureMatrix {
public:
    explicit FeatureMatrix(Eigen::MatrixXd values);

    Index rows() const { return values_.rows(); }
    Index cols() const { return values_.cols(); }
    const Eigen::MatrixXd& values() const { return values_; }
    Eigen::VectorXd row(Index i) const { return values_.row(i).transpose(); }

private:
    Eigen::MatrixXd values_;
};

struct Edge {
    std::size_t first;
    std::size_t second;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected graph over samples. Edge orientation is kept as given since
/// the transition block of the joint feature map is indexed by it.
class DependencyGraph {
public:
    DependencyGraph(std::size_t num_nodes, std::vector<Edge> edges);

    static DependencyGraph empty(std::size_t num_nodes);
    static DependencyGraph chain(std::size_t num_nodes);
    /// 4-neighbourhood grid, row-major node ids. Horizontal edges first.
    static DependencyGraph grid(std::size_t height, std::size_t width);

    std::size_t num_nodes() const { return neighbors_.size(); }
    std::size_t num_edges() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }
    std::span<const std::size_t> neighbors(std::size_t node) const { return neighbors_.at(node); }

    /// Edge ids incident to a node, parallel to neighbors().
    std::span<const std::size_t> incident_edges(std::size_t node) const { return incident_.at(node); }

    /// True when no cycles exist (every connected component is a tree).
    bool is_forest() const;

private:
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> neighbors_;
    std::vector<std::vector<std::size_t>> incident_;
};

/// Per-sample discrete state h_i in {0, ..., K-1}.
class LatentAssignment {
public:
    LatentAssignment() = default;
    LatentAssignment(std::vector<int> states, int num_states);

    std::size_t size() const { return states_.size(); }
    int num_states() const { return num_states_; }
    int operator[](std::size_t i) const { return states_[i]; }
    const std::vector<int>& states() const { return states_; }

    /// Number of samples per state; always has num_states() entries.
    std::vector<std::size_t> counts() const;

    friend bool operator==(const LatentAssignment&, const LatentAssignment&) = default;

private:
    std::vector<int> states_;
    int num_states_ = 0;
};

/// Per-class hypersphere in mapped feature space.
struct ClusterModel {
    Eigen::MatrixXd centers;            // K x D
    Eigen::VectorXd radii_sq;           // K, t_k >= 0
    std::vector<std::size_t> counts;    // n_k from the assignment the centers were fit on
    std::vector<bool> empty;            // class had no members; center is the global mean

    int num_classes() const { return static_cast<int>(centers.rows()); }
    Index dim() const { return centers.cols(); }
    void check() const;
};

/// CRF weight vector v = (v_trans, v_em). Flattened layout is the
/// row-major transition block followed by the row-major emission block.
struct CrfWeights {
    Eigen::MatrixXd trans;  // K x K
    Eigen::MatrixXd emis;   // K x D

    static CrfWeights zeros(int num_classes, Index dim);
    static CrfWeights from_flat(std::span<const double> flat, int num_classes, Index dim);

    int num_classes() const { return static_cast<int>(trans.rows()); }
    Index dim() const { return emis.cols(); }
    Index flat_size() const { return trans.size() + emis.size(); }
    Eigen::VectorXd flatten() const;
    double norm() const;
};

enum class FeatureMapKind { RandomFourier, Identity };

/// How n_t is chosen in the 1/(n_t nu) factor of the SVDD term.
enum class ClassCountPolicy {
    Uniform,  // n_t = n / K for every class
    Lagged,   // n_t = class size from the previous assignment
};

/// How the centers are initialised before the first inference step.
enum class InitMethod {
    Seeds,   // k-means++ seed points
    KMeans,  // k-means++ seeds refined by Lloyd iterations
};

struct HyperParams {
    int num_classes = 2;
    double theta = 0.996;
    double nu = 1.0;
    std::optional<double> gamma;   // nullopt: tuned so that ||v|| = 1 after the first update
    std::optional<double> sigma;   // nullopt: median heuristic
    Index rff_dim = 128;
    std::uint64_t seed = 0;
    int max_outer_iters = 50;
    FeatureMapKind feature_map = FeatureMapKind::RandomFourier;
    ClassCountPolicy count_policy = ClassCountPolicy::Uniform;
    InitMethod init = InitMethod::KMeans;
    int lbp_max_iters = 100;
    double lbp_damping = 0.5;

    /// Range violations, empty when valid.
    std::vector<std::string> violations() const;
    /// Throws std::invalid_argument listing every violation.
    void check() const;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
    std::string message() const;
};

ValidationReport validate_problem(const FeatureMatrix& x, const DependencyGraph& graph,
                                  const HyperParams& hp);

}  // namespace lccad
