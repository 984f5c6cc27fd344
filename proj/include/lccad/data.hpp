#pragma once

// Synthetic datasets with known latent classes and anomaly scores, and a
// loader for user-supplied grids.

#include "lccad/core.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace lccad {

struct GroundTruth {
    LatentAssignment true_states;
    Eigen::VectorXd true_scores;      // ||x - mu_c||^2 / (2 sigma_c^2) per feature scale
    std::vector<bool> anomaly_labels;
};

struct Dataset {
    FeatureMatrix x;
    DependencyGraph graph;
    GroundTruth truth;
};

enum class ToyLayout { Chain, Grid };

/// Two 2-D Gaussian classes, mu_0 = (0, 0) and mu_1 = (mean_distance, 0).
struct ToySpec {
    Index n_per_class = 100;
    double mean_distance = 3.0;
    double std_a = 1.0;
    double std_b = 1.0;
    ToyLayout layout = ToyLayout::Chain;
    Index block_length = 10;     // chain: length of each contiguous single-class run
    double contamination = 0.05; // fraction labelled anomalous by true score
    std::uint64_t seed = 0;

    void check() const;
};

/// Samples are laid out so that neighbours in the graph mostly share a class:
/// alternating runs of block_length along a chain, or the left and right
/// halves of a grid.
Dataset gen_toy(const ToySpec& spec);

/// Marks the round(fraction * n) highest scores as anomalous (lower index
/// wins ties).
std::vector<bool> label_top_fraction(const Eigen::VectorXd& scores, double fraction);

/// Synthetic channel facies on a height x width grid. Sand channels are
/// sinusoidal ribbons over a shale background; each facies draws its two
/// features (AI-like, SI-like) from its own Gaussian. Planted anomalies shift
/// one feature of randomly chosen cells by magnitude times that facies' std.
struct GridSpec {
    Index height = 40;
    Index width = 60;
    int num_channels = 2;
    double channel_width = 6.0;   // cells
    double amplitude = 5.0;       // cells
    double wavelength = 30.0;     // cells
    Eigen::Vector2d shale_mean{0.0, 0.0};
    Eigen::Vector2d shale_std{0.4, 0.4};
    Eigen::Vector2d sand_mean{0.6, 2.0};
    Eigen::Vector2d sand_std{0.4, 0.4};
    Index num_anomalies = 30;
    double anomaly_magnitude = 5.0;
    Index anomaly_feature = 1;
    std::uint64_t seed = 0;

    void check() const;
};

/// Facies 0 is shale, facies 1 sand.
Dataset gen_grid_facies(const GridSpec& spec);

/// Distinct loader failures.
class GridCsvError : public std::runtime_error {
public:
    enum class Kind { Io, MalformedRow, CountMismatch, NonFinite };
    GridCsvError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct GridData {
    FeatureMatrix x;
    DependencyGraph graph;
};

/// Row-major grid of d comma-separated numeric columns, optional header row.
GridData load_grid_csv(const std::filesystem::path& path, Index height, Index width, Index d,
                       bool has_header = false);

}  // namespace lccad
