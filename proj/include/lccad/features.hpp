#pragma once

// Feature map phi into the space where the hyperspheres live. The default is
// a random Fourier feature approximation of the Gaussian kernel,
//   z(x) = sqrt(2/D) cos(W x + b),  W_ij ~ N(0, 1/sigma^2),  b_j ~ U[0, 2pi),
// so that z(x).z(y) ~= exp(-||x-y||^2 / (2 sigma^2)). An identity map is also
// provided for cases where exact Euclidean geometry is wanted.

#include "lccad/core.hpp"

#include <cstdint>

namespace lccad {

class FeatureMapper {
public:
    static FeatureMapper random_fourier(Index input_dim, Index output_dim, double sigma,
                                        std::uint64_t seed);
    /// phi(x) = x. sigma is carried along for kernel-space explanations.
    static FeatureMapper identity(Index input_dim, double sigma = 1.0);

    Eigen::VectorXd map(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    Eigen::MatrixXd map_all(const Eigen::Ref<const Eigen::MatrixXd>& x) const;
    Eigen::MatrixXd map_all(const FeatureMatrix& x) const { return map_all(x.values()); }

    FeatureMapKind kind() const { return kind_; }
    Index input_dim() const { return input_dim_; }
    Index output_dim() const { return kind_ == FeatureMapKind::Identity ? input_dim_ : freqs_.rows(); }
    double sigma() const { return sigma_; }
    std::uint64_t seed() const { return seed_; }
    const Eigen::MatrixXd& freqs() const { return freqs_; }    // D x d
    const Eigen::VectorXd& phases() const { return phases_; }  // D

private:
    FeatureMapper() = default;

    FeatureMapKind kind_ = FeatureMapKind::Identity;
    Index input_dim_ = 0;
    double sigma_ = 1.0;
    std::uint64_t seed_ = 0;
    Eigen::MatrixXd freqs_;
    Eigen::VectorXd phases_;
};

double gaussian_kernel(const Eigen::Ref<const Eigen::VectorXd>& a,
                       const Eigen::Ref<const Eigen::VectorXd>& b, double sigma);

/// Median pairwise Euclidean distance over at most max_points rows
/// (a seeded subsample when there are more). Falls back to 1 when the
/// median is zero.
double median_heuristic_bandwidth(const Eigen::Ref<const Eigen::MatrixXd>& x, std::uint64_t seed,
                                  Index max_points = 1000);

}  // namespace lccad
