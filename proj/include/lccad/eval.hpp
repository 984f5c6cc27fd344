#pragma once

#include "lccad/core.hpp"

#include <span>
#include <string>
#include <vector>

namespace lccad {

/// Area under the ROC curve via the Mann-Whitney statistic with midranks, so
/// tied scores count one half. Throws std::invalid_argument unless both
/// classes are present.
double auroc(std::span<const double> scores, const std::vector<bool>& labels);
double auroc(const Eigen::VectorXd& scores, const std::vector<bool>& labels);

/// Adjusted Rand index from the contingency table of two labelings.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);
double adjusted_rand_index(const LatentAssignment& a, const LatentAssignment& b);

struct MetricResult {
    std::string name;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for a single value
    std::size_t n_seeds = 0;
};

MetricResult summarize(std::string name, std::span<const double> values);

}  // namespace lccad
