#pragma once

// Experiment runners behind the command-line tool. Each run is split into a
// pure compute step returning in-memory results and a writer that lays the
// results out as CSV tables, PGM heatmaps and a replayable manifest.
//
// Every fit of a run is compared against two reductions of the same model on
// the same feature map settings: k-means (theta = 1, nu = 1) and a single
// hypersphere (K = 1, theta = 1).

#include "lccad/core.hpp"
#include "lccad/data.hpp"
#include "lccad/explain.hpp"
#include "lccad/model.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lccad {

enum class Subcommand { ToySweep, Facies, Analyze };

const char* to_string(Subcommand command);

enum class Method { Lccad, KMeans, Svdd };

inline constexpr std::array<Method, 3> kAllMethods{Method::Lccad, Method::KMeans, Method::Svdd};

const char* to_string(Method method);

/// Hyperparameters of `method` derived from the base configuration, with the
/// seed replaced by `seed`.
HyperParams method_params(const HyperParams& base, Method method, std::uint64_t seed);

/// Configuration problems detected before any work starts.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AnalyzeInput {
    std::filesystem::path path;
    Index height = 0;
    Index width = 0;
    Index dims = 0;
    bool has_header = false;
};

struct RunConfig {
    Subcommand command = Subcommand::ToySweep;
    HyperParams hp;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path out_dir;

    // toy-sweep. Distances are in units of the class-a standard deviation.
    ToySpec toy;
    std::vector<double> deltas;
    double toy_delta = 3.0;  // distance of the contamination study
    std::vector<double> contaminations;

    // facies
    GridSpec grid;

    // analyze
    AnalyzeInput analyze;

    /// Declared defaults for one subcommand.
    static RunConfig defaults(Subcommand command);

    ValidationReport validate() const;
};

/// Flat key=value text, one line per configuration field, accepted back by
/// the command-line tool's --config option. `resolved_comments` lines are
/// appended as '#' comments.
std::string manifest(const RunConfig& config, const std::vector<std::string>& resolved_comments = {});

/// Summary of one fit, as recorded in fits.csv and the manifest.
struct FitSummary {
    std::uint64_t seed = 0;
    Method method = Method::Lccad;
    std::string context;  // e.g. "delta=3"
    int iterations = 0;
    bool converged = false;
    StopReason stop = StopReason::IterationLimit;
    double sigma = 0.0;
    double gamma = 0.0;  // NaN when no CRF weights were trained
    double objective = 0.0;
};

FitSummary summarize_fit(const FitResult& fit, std::uint64_t seed, Method method, std::string context);

struct ToyRecord {
    double delta = 0.0;
    std::uint64_t seed = 0;
    Method method = Method::Lccad;
    double ari = 0.0;
    double auroc = 0.0;
};

struct ContaminationRecord {
    double contamination = 0.0;
    std::uint64_t seed = 0;
    Method method = Method::Lccad;
    double auroc = 0.0;
};

struct ToySweepResult {
    std::vector<ToyRecord> sweep;                   // delta-major, then seed, then method
    std::vector<ContaminationRecord> contamination; // at toy_delta
    std::vector<FitSummary> fits;
};

ToySweepResult run_toy_sweep(const RunConfig& config);

/// results.csv, contamination.csv, summary.csv, fits.csv and manifest.txt.
void write_toy_sweep(const RunConfig& config, const ToySweepResult& result);

struct GridSeedRun {
    std::uint64_t seed = 0;
    Eigen::MatrixXd x;
    std::optional<GroundTruth> truth;
    std::array<LatentAssignment, 3> states;  // indexed like kAllMethods
    std::array<Eigen::VectorXd, 3> scores;
    std::array<FitSummary, 3> fits;
    RelevanceMap relevance;                  // of the LCCAD fit
};

struct GridRunResult {
    GridShape shape;
    std::vector<GridSeedRun> runs;
};

/// Mean ARI of inferred against true states and AUROC of scores against
/// planted anomalies; NaN without ground truth.
struct GridMetrics {
    double ari = 0.0;
    double auroc = 0.0;
};

GridMetrics grid_metrics(const GridSeedRun& run, Method method);

GridRunResult run_facies(const RunConfig& config);

/// Throws IoError when the input cannot be read and ConfigError when its
/// content does not match the declared shape.
GridRunResult run_analyze(const RunConfig& config);

/// metrics.csv, summary.csv, fits.csv, manifest.txt and one seed_<s>/
/// directory per seed holding nodes.csv, the heatmaps and heatmaps.json.
void write_grid_run(const RunConfig& config, const GridRunResult& result);

/// Validates, computes and writes the run selected by config.command.
void execute(const RunConfig& config);

}  // namespace lccad
