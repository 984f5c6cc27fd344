#include "lccad/features.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace lccad {

FeatureMapper FeatureMapper::random_fourier(Index input_dim, Index output_dim, double sigma,
                                            std::uint64_t seed) {
    if (input_dim < 1 || output_dim < 1) throw std::invalid_argument("feature map dimensions must be positive");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("bandwidth must be positive");

    FeatureMapper m;
    m.kind_ = FeatureMapKind::RandomFourier;
    m.input_dim_ = input_dim;
    m.sigma_ = sigma;
    m.seed_ = seed;
    m.freqs_.resize(output_dim, input_dim);
    m.phases_.resize(output_dim);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0 / sigma);
    std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
    for (Index r = 0; r < output_dim; ++r) {
        for (Index c = 0; c < input_dim; ++c) m.freqs_(r, c) = normal(rng);
    }
    for (Index r = 0; r < output_dim; ++r) m.phases_[r] = uniform(rng);
    return m;
}

FeatureMapper FeatureMapper::identity(Index input_dim, double sigma) {
    if (input_dim < 1) throw std::invalid_argument("feature map dimensions must be positive");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("bandwidth must be positive");
    FeatureMapper m;
    m.kind_ = FeatureMapKind::Identity;
    m.input_dim_ = input_dim;
    m.sigma_ = sigma;
    return m;
}

Eigen::VectorXd FeatureMapper::map(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (x.size() != input_dim_) throw std::invalid_argument("sample dimension does not match feature map");
    if (kind_ == FeatureMapKind::Identity) return x;
    const double scale = std::sqrt(2.0 / static_cast<double>(freqs_.rows()));
    Eigen::VectorXd z = freqs_ * x + phases_;
    return scale * z.array().cos().matrix();
}

Eigen::MatrixXd FeatureMapper::map_all(const Eigen::Ref<const Eigen::MatrixXd>& x) const {
    if (x.cols() != input_dim_) throw std::invalid_argument("sample dimension does not match feature map");
    if (kind_ == FeatureMapKind::Identity) return x;
    const double scale = std::sqrt(2.0 / static_cast<double>(freqs_.rows()));
    Eigen::MatrixXd z = x * freqs_.transpose();
    z.rowwise() += phases_.transpose();
    return scale * z.array().cos().matrix();
}

double gaussian_kernel(const Eigen::Ref<const Eigen::VectorXd>& a,
                       const Eigen::Ref<const Eigen::VectorXd>& b, double sigma) {
    return std::exp(-(a - b).squaredNorm() / (2.0 * sigma * sigma));
}

double median_heuristic_bandwidth(const Eigen::Ref<const Eigen::MatrixXd>& x, std::uint64_t seed,
                                  Index max_points) {
    std::vector<Index> rows(static_cast<std::size_t>(x.rows()));
    std::iota(rows.begin(), rows.end(), Index{0});
    if (x.rows() > max_points) {
        std::mt19937_64 rng(seed);
        std::shuffle(rows.begin(), rows.end(), rng);
        rows.resize(static_cast<std::size_t>(max_points));
        std::sort(rows.begin(), rows.end());
    }
    std::vector<double> dists;
    dists.reserve(rows.size() * (rows.size() - 1) / 2);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = i + 1; j < rows.size(); ++j) {
            dists.push_back((x.row(rows[i]) - x.row(rows[j])).norm());
        }
    }
    if (dists.empty()) return 1.0;
    auto mid = dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2);
    std::nth_element(dists.begin(), mid, dists.end());
    return *mid > 0.0 ? *mid : 1.0;
}

}  // namespace lccad
