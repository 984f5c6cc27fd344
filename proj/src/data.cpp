#include "lccad/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

namespace lccad {

void ToySpec::check() const {
    if (n_per_class < 1) throw std::invalid_argument("toy spec needs at least one sample per class");
    if (!(std_a > 0.0) || !(std_b > 0.0)) throw std::invalid_argument("class standard deviations must be positive");
    if (!(mean_distance >= 0.0)) throw std::invalid_argument("mean distance must be non-negative");
    if (block_length < 1) throw std::invalid_argument("block length must be positive");
    if (!(contamination >= 0.0 && contamination <= 1.0)) throw std::invalid_argument("contamination out of range");
}

std::vector<bool> label_top_fraction(const Eigen::VectorXd& scores, double fraction) {
    const auto n = static_cast<std::size_t>(scores.size());
    const auto top = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](auto a, auto b) { return scores[static_cast<Index>(a)] > scores[static_cast<Index>(b)]; });
    std::vector<bool> labels(n, false);
    for (std::size_t r = 0; r < std::min(top, n); ++r) labels[order[r]] = true;
    return labels;
}

Dataset gen_toy(const ToySpec& spec) {
    spec.check();
    const Index n = 2 * spec.n_per_class;
    std::vector<int> states(static_cast<std::size_t>(n));
    std::size_t height = 0;
    std::size_t width = 0;
    if (spec.layout == ToyLayout::Chain) {
        for (Index i = 0; i < n; ++i) states[static_cast<std::size_t>(i)] = static_cast<int>((i / spec.block_length) % 2);
    } else {
        // Left half class 0, right half class 1; each half is height x half_width.
        auto rows = static_cast<Index>(std::sqrt(static_cast<double>(spec.n_per_class)));
        while (spec.n_per_class % rows != 0) --rows;
        const Index half = spec.n_per_class / rows;
        height = static_cast<std::size_t>(rows);
        width = static_cast<std::size_t>(2 * half);
        for (Index i = 0; i < n; ++i) states[static_cast<std::size_t>(i)] = (i % (2 * half)) < half ? 0 : 1;
    }

    const Eigen::Vector2d means[2] = {{0.0, 0.0}, {spec.mean_distance, 0.0}};
    const double stds[2] = {spec.std_a, spec.std_b};
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd x(n, 2);
    Eigen::VectorXd scores(n);
    for (Index i = 0; i < n; ++i) {
        const int c = states[static_cast<std::size_t>(i)];
        Eigen::Vector2d noise;
        noise[0] = normal(rng);
        noise[1] = normal(rng);
        x.row(i) = (means[c] + stds[c] * noise).transpose();
        scores[i] = (x.row(i).transpose() - means[c]).squaredNorm() / (2.0 * stds[c] * stds[c]);
    }

    DependencyGraph graph = spec.layout == ToyLayout::Chain ? DependencyGraph::chain(static_cast<std::size_t>(n))
                                                            : DependencyGraph::grid(height, width);
    auto labels = label_top_fraction(scores, spec.contamination);
    return {FeatureMatrix(std::move(x)), std::move(graph),
            GroundTruth{LatentAssignment(std::move(states), 2), std::move(scores), std::move(labels)}};
}

void GridSpec::check() const {
    if (height < 1 || width < 1) throw std::invalid_argument("grid dimensions must be positive");
    if (num_channels < 0) throw std::invalid_argument("channel count must be non-negative");
    if ((shale_std.array() <= 0.0).any() || (sand_std.array() <= 0.0).any()) {
        throw std::invalid_argument("facies standard deviations must be positive");
    }
    if (num_anomalies < 0 || num_anomalies > height * width) throw std::invalid_argument("anomaly count out of range");
    if (anomaly_feature < 0 || anomaly_feature > 1) throw std::invalid_argument("anomaly feature must be 0 or 1");
    if (!(wavelength > 0.0)) throw std::invalid_argument("channel wavelength must be positive");
}

Dataset gen_grid_facies(const GridSpec& spec) {
    spec.check();
    const Index n = spec.height * spec.width;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

    std::vector<int> facies(static_cast<std::size_t>(n), 0);
    for (int ch = 0; ch < spec.num_channels; ++ch) {
        const double base = (ch + 0.5) * static_cast<double>(spec.height) / spec.num_channels;
        const double offset = phase(rng);
        for (Index c = 0; c < spec.width; ++c) {
            const double centre =
                base + spec.amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(c) / spec.wavelength + offset);
            for (Index r = 0; r < spec.height; ++r) {
                if (std::abs(static_cast<double>(r) - centre) < 0.5 * spec.channel_width) {
                    facies[static_cast<std::size_t>(r * spec.width + c)] = 1;
                }
            }
        }
    }

    const Eigen::Vector2d means[2] = {spec.shale_mean, spec.sand_mean};
    const Eigen::Vector2d stds[2] = {spec.shale_std, spec.sand_std};
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd x(n, 2);
    for (Index i = 0; i < n; ++i) {
        const int f = facies[static_cast<std::size_t>(i)];
        for (Index j = 0; j < 2; ++j) x(i, j) = means[f][j] + stds[f][j] * normal(rng);
    }

    std::vector<bool> labels(static_cast<std::size_t>(n), false);
    std::vector<Index> cells(static_cast<std::size_t>(n));
    std::iota(cells.begin(), cells.end(), Index{0});
    std::shuffle(cells.begin(), cells.end(), rng);
    for (Index a = 0; a < spec.num_anomalies; ++a) {
        const Index i = cells[static_cast<std::size_t>(a)];
        const int f = facies[static_cast<std::size_t>(i)];
        x(i, spec.anomaly_feature) += spec.anomaly_magnitude * stds[f][spec.anomaly_feature];
        if (spec.anomaly_magnitude != 0.0) labels[static_cast<std::size_t>(i)] = true;
    }

    Eigen::VectorXd scores(n);
    for (Index i = 0; i < n; ++i) {
        const int f = facies[static_cast<std::size_t>(i)];
        const Eigen::Array2d z = (x.row(i).transpose() - means[f]).array() / stds[f].array();
        scores[i] = 0.5 * z.square().sum();
    }

    return {FeatureMatrix(std::move(x)),
            DependencyGraph::grid(static_cast<std::size_t>(spec.height), static_cast<std::size_t>(spec.width)),
            GroundTruth{LatentAssignment(std::move(facies), 2), std::move(scores), std::move(labels)}};
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

GridData load_grid_csv(const std::filesystem::path& path, Index height, Index width, Index d, bool has_header) {
    using Kind = GridCsvError::Kind;
    if (height < 1 || width < 1 || d < 1) throw std::invalid_argument("grid dimensions must be positive");
    std::ifstream in(path);
    if (!in) throw GridCsvError(Kind::Io, "cannot open " + path.string());

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool skip = has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (skip) {
            skip = false;
            continue;
        }
        const std::string body = trim(line);
        if (body.empty()) continue;

        std::vector<double> values;
        std::stringstream fields(body);
        std::string field;
        while (std::getline(fields, field, ',')) {
            const std::string token = trim(field);
            double v = 0.0;
            const auto* end = token.data() + token.size();
            const auto [ptr, ec] = std::from_chars(token.data(), end, v);
            if (token.empty() || ec != std::errc() || ptr != end) {
                throw GridCsvError(Kind::MalformedRow, "line " + std::to_string(line_no) + ": cannot parse '" + token + "'");
            }
            if (!std::isfinite(v)) {
                throw GridCsvError(Kind::NonFinite, "line " + std::to_string(line_no) + ": non-finite value");
            }
            values.push_back(v);
        }
        if (body.back() == ',' || static_cast<Index>(values.size()) != d) {
            throw GridCsvError(Kind::MalformedRow, "line " + std::to_string(line_no) + ": expected " +
                                                       std::to_string(d) + " columns");
        }
        rows.push_back(std::move(values));
    }
    if (static_cast<Index>(rows.size()) != height * width) {
        throw GridCsvError(Kind::CountMismatch, "expected " + std::to_string(height * width) + " rows, found " +
                                                    std::to_string(rows.size()));
    }

    Eigen::MatrixXd x(height * width, d);
    for (Index i = 0; i < x.rows(); ++i)
        for (Index j = 0; j < d; ++j) x(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return {FeatureMatrix(std::move(x)),
            DependencyGraph::grid(static_cast<std::size_t>(height), static_cast<std::size_t>(width))};
}

}  // namespace lccad
