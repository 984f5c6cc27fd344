#include "lccad/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace lccad {

double auroc(std::span<const double> scores, const std::vector<bool>& labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

    // Sum of positive midranks (1-based).
    double rank_sum = 0.0;
    std::size_t positives = 0;
    for (std::size_t lo = 0; lo < n;) {
        std::size_t hi = lo;
        while (hi + 1 < n && scores[order[hi + 1]] == scores[order[lo]]) ++hi;
        const double midrank = 0.5 * static_cast<double>(lo + hi) + 1.0;
        for (std::size_t r = lo; r <= hi; ++r) {
            if (labels[order[r]]) {
                rank_sum += midrank;
                ++positives;
            }
        }
        lo = hi + 1;
    }
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) throw std::invalid_argument("AUROC needs both positive and negative labels");
    const double p = static_cast<double>(positives);
    const double u = rank_sum - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(negatives));
}

double auroc(const Eigen::VectorXd& scores, const std::vector<bool>& labels) {
    return auroc(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())), labels);
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw std::invalid_argument("labelings differ in length");
    const auto n = a.size();
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> rows;
    std::map<int, double> cols;
    for (std::size_t i = 0; i < n; ++i) {
        joint[{a[i], b[i]}] += 1.0;
        rows[a[i]] += 1.0;
        cols[b[i]] += 1.0;
    }
    auto pairs = [](double m) { return m * (m - 1.0) / 2.0; };
    double index = 0.0;
    for (const auto& [key, m] : joint) index += pairs(m);
    double sum_rows = 0.0;
    for (const auto& [key, m] : rows) sum_rows += pairs(m);
    double sum_cols = 0.0;
    for (const auto& [key, m] : cols) sum_cols += pairs(m);

    const double total = pairs(static_cast<double>(n));
    const double expected = total > 0.0 ? sum_rows * sum_cols / total : 0.0;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index == expected) return 1.0;  // both labelings trivial
    return (index - expected) / (max_index - expected);
}

double adjusted_rand_index(const LatentAssignment& a, const LatentAssignment& b) {
    return adjusted_rand_index(std::span<const int>(a.states()), std::span<const int>(b.states()));
}

MetricResult summarize(std::string name, std::span<const double> values) {
    MetricResult r;
    r.name = std::move(name);
    r.n_seeds = values.size();
    if (values.empty()) return r;
    r.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - r.mean) * (v - r.mean);
        r.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return r;
}

}  // namespace lccad
