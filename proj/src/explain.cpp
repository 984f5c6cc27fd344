#include "lccad/explain.hpp"

#include "lccad/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lccad {

ExplainContext::ExplainContext(std::vector<SupportSet> clusters, double sigma)
    : clusters_(std::move(clusters)), sigma_(sigma) {
    if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) throw std::invalid_argument("bandwidth must be positive");
    for (const auto& c : clusters_) {
        if (c.points.rows() != c.alphas.size()) throw std::invalid_argument("support set shape mismatch");
        if ((c.alphas.array() <= 0.0).any()) throw std::invalid_argument("support weights must be positive");
        if (c.points.rows() > 0) {
            if (input_dim_ == 0) input_dim_ = c.points.cols();
            if (c.points.cols() != input_dim_) throw std::invalid_argument("support set dimension mismatch");
        }
    }
}

ExplainContext ExplainContext::from_model(const LccadModel& model, const FeatureMatrix& x) {
    if (!model.fitted()) throw std::logic_error("model is not fitted");
    const auto& h = model.assignment;
    if (static_cast<std::size_t>(x.rows()) != h.size()) throw std::invalid_argument("explanation size mismatch");
    const auto counts = h.counts();
    std::vector<SupportSet> clusters(counts.size());
    std::vector<Index> fill(counts.size(), 0);
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const auto m = static_cast<Index>(counts[k]);
        clusters[k].points.resize(m, x.cols());
        clusters[k].alphas = Eigen::VectorXd::Constant(m, m > 0 ? 1.0 / static_cast<double>(m) : 0.0);
    }
    for (std::size_t i = 0; i < h.size(); ++i) {
        const auto k = static_cast<std::size_t>(h[i]);
        clusters[k].points.row(fill[k]++) = x.values().row(static_cast<Index>(i));
    }
    return {std::move(clusters), model.mapper->sigma()};
}

const SupportSet& ExplainContext::cluster(int k) const {
    if (k < 0 || k >= num_clusters()) throw std::out_of_range("cluster index out of range");
    return clusters_[static_cast<std::size_t>(k)];
}

namespace {

struct KernelTerms {
    Eigen::MatrixXd delta;     // m x d, scaled differences
    Eigen::VectorXd sq_norm;   // ||Delta_j||^2
    Eigen::VectorXd log_term;  // log alpha_j - ||Delta_j||^2 / 2
    double log_f = 0.0;        // log sum_j alpha_j K(x, x_j)
};

KernelTerms kernel_terms(const ExplainContext& ctx, const Eigen::Ref<const Eigen::VectorXd>& x, int k) {
    const auto& sv = ctx.cluster(k);
    if (sv.points.rows() == 0) throw std::invalid_argument("cannot explain against an empty cluster");
    if (x.size() != sv.points.cols()) throw std::invalid_argument("sample dimension mismatch");
    KernelTerms t;
    t.delta = (-(sv.points.rowwise() - x.transpose())) / ctx.sigma();
    t.sq_norm = t.delta.rowwise().squaredNorm();
    t.log_term = sv.alphas.array().log() - 0.5 * t.sq_norm.array();
    const double peak = t.log_term.maxCoeff();
    t.log_f = peak + std::log((t.log_term.array() - peak).exp().sum());
    return t;
}

}  // namespace

double outlierness(const ExplainContext& ctx, const Eigen::Ref<const Eigen::VectorXd>& x, int k) {
    return -kernel_terms(ctx, x, k).log_f;
}

Relevance relevance(const ExplainContext& ctx, const Eigen::Ref<const Eigen::VectorXd>& x, int k) {
    const KernelTerms t = kernel_terms(ctx, x, k);
    Relevance r;
    r.outlierness = -t.log_f;
    r.values = Eigen::VectorXd::Zero(x.size());
    if (r.outlierness <= 0.0) return r;

    for (Index j = 0; j < t.delta.rows(); ++j) {
        const double sq = t.sq_norm[j];
        if (sq <= 0.0) continue;
        const double resp = std::exp(t.log_term[j] - t.log_f);
        const double share = resp * std::min(r.outlierness, sq) / sq;
        r.values += share * t.delta.row(j).transpose().cwiseAbs2();
    }
    return r;
}

Eigen::MatrixXd RelevanceMap::channel(Index feature) const {
    if (feature < 0 || feature >= values.cols()) throw std::out_of_range("feature index out of range");
    Eigen::MatrixXd out(shape.height, shape.width);
    for (Index r = 0; r < shape.height; ++r)
        for (Index c = 0; c < shape.width; ++c) out(r, c) = values(r * shape.width + c, feature);
    return out;
}

RelevanceMap relevance_map(const LccadModel& model, const FeatureMatrix& x, GridShape shape) {
    if (shape.height < 1 || shape.width < 1 || shape.height * shape.width != x.rows()) {
        throw std::invalid_argument("grid shape does not match the number of samples");
    }
    const ExplainContext ctx = ExplainContext::from_model(model, x);
    RelevanceMap map;
    map.shape = shape;
    map.values.resize(x.rows(), x.cols());
    map.outlierness.resize(x.rows());
    for (Index i = 0; i < x.rows(); ++i) {
        const Relevance r = relevance(ctx, x.values().row(i).transpose(), model.assignment[static_cast<std::size_t>(i)]);
        map.values.row(i) = r.values.transpose();
        map.outlierness[i] = r.outlierness;
    }
    return map;
}

}  // namespace lccad
