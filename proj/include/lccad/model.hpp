#pragma once

// The latent-class contextual anomaly detector. fit() alternates
//   1. MAP inference of the latent states given centers and CRF weights,
//   2. hypersphere updates given the states,
//   3. CRF weight updates given the states,
// until the states stop changing, then scores every sample by its squared
// distance to the center of its class.

#include "lccad/core.hpp"
#include "lccad/crf.hpp"
#include "lccad/features.hpp"
#include "lccad/inference.hpp"

#include <optional>
#include <vector>

namespace lccad {

struct ObjectiveParts {
    double svdd = 0.0;   // sum_k t_k + 1/(n_k nu) sum hinge(...)
    double crf = 0.0;    // gamma/2 ||v||^2 - <v, psi> + log Z, or the pseudo-likelihood surrogate
    double total = 0.0;  // theta * svdd + (1 - theta) * crf
    bool crf_exact = false;
};

struct IterationRecord {
    int iteration = 0;
    std::size_t changed = 0;  // states differing from the previous iteration
    ObjectiveParts objective;
    bool lbp_converged = false;
    int lbp_iterations = 0;
};

enum class StopReason { Converged, Cycling, IterationLimit };

struct FitReport {
    int iterations = 0;
    bool converged = false;  // H^t == H^{t-1}
    StopReason stop = StopReason::IterationLimit;
    ObjectiveParts final_objective;
    double gamma = 0.0;       // resolved regulariser
    double sigma = 0.0;       // resolved bandwidth
    bool gamma_target_reached = true;
};

struct LccadModel {
    ClusterModel cluster;
    CrfWeights weights;
    LatentAssignment assignment;
    HyperParams hp;            // gamma and sigma resolved
    std::optional<FeatureMapper> mapper;
    std::vector<IterationRecord> trace;
    std::vector<LatentAssignment> history;  // H^1, H^2, ... as produced by inference

    bool fitted() const { return mapper.has_value() && assignment.size() > 0; }
};

struct FitResult {
    LccadModel model;
    FitReport report;
};

/// Mapper described by the hyperparameters; sigma falls back to the median heuristic.
FeatureMapper make_mapper(const FeatureMatrix& x, const HyperParams& hp);

/// k-means++ seeding: row indices of the chosen seeds, deterministic in `seed`.
std::vector<Index> kmeanspp_seeds(const Eigen::Ref<const Eigen::MatrixXd>& mapped, int num_classes,
                                  std::uint64_t seed);

/// Lloyd's k-means from the given centers, updated in place; returns the
/// final nearest-center assignment (lowest index wins ties). Empty clusters
/// keep their previous center.
std::vector<int> lloyd(const Eigen::Ref<const Eigen::MatrixXd>& mapped, Eigen::MatrixXd& centers, int max_iters);

/// MAP states for the current centers and weights. class_counts gives n_t.
LbpResult infer_states(const Eigen::Ref<const Eigen::MatrixXd>& mapped, const DependencyGraph& graph,
                       const ClusterModel& cluster, const CrfWeights& weights, const HyperParams& hp,
                       std::span<const double> class_counts);

/// Throws std::invalid_argument when validate_problem fails.
FitResult fit(const FeatureMatrix& x, const DependencyGraph& graph, const HyperParams& hp);

/// s(x_i) = ||c_{h_i} - phi(x_i)||^2 for every training sample. Throws
/// std::logic_error for an unfitted model.
Eigen::VectorXd score(const LccadModel& model, const FeatureMatrix& x);
double score(const LccadModel& model, const FeatureMatrix& x, Index i);

/// Objective components. The CRF part uses the exact log partition function
/// when K^n is small enough to enumerate and the pseudo-likelihood surrogate
/// otherwise; the SVDD part uses the same class normaliser as inference.
ObjectiveParts objective(const LccadModel& model, const Eigen::Ref<const Eigen::MatrixXd>& mapped,
                         const DependencyGraph& graph);

const char* to_string(StopReason reason);

}  // namespace lccad
