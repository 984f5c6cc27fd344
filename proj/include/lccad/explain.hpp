#pragma once

// Feature-wise explanation of per-cluster kernel outlierness.
//
// Cluster k is read as a kernel expansion f_k(x) = sum_j alpha_j K(x, x_j) over
// its members with the exact Gaussian kernel, and its outlierness
// o_k(x) = -log f_k(x) is decomposed over input features as
//
//   R_i = sum_j [Delta_j]_i^2 / ||Delta_j||^2 * resp_j(x) * min(o_k(x), ||Delta_j||^2)
//
// with Delta_j = (x - x_j) / sigma and resp_j the softmax responsibility
// alpha_j K(x, x_j) / sum_j' alpha_j' K(x, x_j').

#include "lccad/core.hpp"

#include <vector>

namespace lccad {

struct LccadModel;

struct SupportSet {
    Eigen::MatrixXd points;  // members in raw input space, one per row
    Eigen::VectorXd alphas;  // positive expansion weights
};

class ExplainContext {
public:
    ExplainContext(std::vector<SupportSet> clusters, double sigma);

    /// Uniform alpha_j = 1/n_k over each cluster's members (the centroid solution).
    static ExplainContext from_model(const LccadModel& model, const FeatureMatrix& x);

    int num_clusters() const { return static_cast<int>(clusters_.size()); }
    const SupportSet& cluster(int k) const;
    double sigma() const { return sigma_; }
    Index input_dim() const { return input_dim_; }

private:
    std::vector<SupportSet> clusters_;
    double sigma_;
    Index input_dim_ = 0;
};

struct Relevance {
    Eigen::VectorXd values;  // R_1..R_d, non-negative
    double outlierness = 0.0;
};

/// o_k(x) = -log sum_j alpha_j K(x, x_j), evaluated in the log domain.
/// Not clamped: negative when f_k(x) > 1.
double outlierness(const ExplainContext& ctx, const Eigen::Ref<const Eigen::VectorXd>& x, int k);

/// Relevances are all zero when o_k(x) <= 0. A support vector that coincides
/// with x contributes nothing.
Relevance relevance(const ExplainContext& ctx, const Eigen::Ref<const Eigen::VectorXd>& x, int k);

struct GridShape {
    Index height = 0;
    Index width = 0;
};

/// Per-sample relevances (row i explains sample i within its inferred class),
/// kept alongside the grid layout they belong to.
struct RelevanceMap {
    GridShape shape;
    Eigen::MatrixXd values;       // n x d
    Eigen::VectorXd outlierness;  // n

    /// Relevance of one input feature laid out as height x width.
    Eigen::MatrixXd channel(Index feature) const;
};

RelevanceMap relevance_map(const LccadModel& model, const FeatureMatrix& x, GridShape shape);

}  // namespace lccad
