// Command-line front end: toy-sweep, facies and analyze runs.
//
// Exit codes: 0 success, 1 invalid configuration or input, 2 I/O failure.

#include "lccad/artifacts.hpp"
#include "lccad/experiments.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>

using namespace lccad;

namespace {

struct ParamText {
    std::string gamma = "auto";
    std::string sigma = "auto";
    std::vector<double> shale_mean, shale_std, sand_mean, sand_std;
};

std::optional<double> auto_or_number(const std::string& text, const char* name) {
    if (text == "auto") return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(std::string(name) + " must be a number or 'auto'");
}

Eigen::Vector2d two(const std::vector<double>& v, const Eigen::Vector2d& fallback, const char* name) {
    if (v.empty()) return fallback;
    if (v.size() != 2) throw ConfigError(std::string(name) + " needs exactly two values");
    return {v[0], v[1]};
}

void add_common(CLI::App* app, RunConfig& c, ParamText& text) {
    auto& hp = c.hp;
    app->add_option("--classes", hp.num_classes, "number of latent classes K")->capture_default_str();
    app->add_option("--theta", hp.theta, "mixing weight between hypersphere and CRF terms")->capture_default_str();
    app->add_option("--nu", hp.nu, "outlier fraction")->capture_default_str();
    app->add_option("--gamma", text.gamma, "CRF regulariser, or 'auto'")->capture_default_str();
    app->add_option("--sigma", text.sigma, "kernel bandwidth, or 'auto' for the median heuristic")
        ->capture_default_str();
    app->add_option("--rff-dim", hp.rff_dim, "random Fourier feature dimension")->capture_default_str();
    app->add_option("--feature-map", hp.feature_map, "rff or identity")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, FeatureMapKind>{{"rff", FeatureMapKind::RandomFourier},
                                                  {"identity", FeatureMapKind::Identity}}));
    app->add_option("--count-policy", hp.count_policy, "class size used in node potentials: uniform or lagged")
        ->transform(CLI::CheckedTransformer(std::map<std::string, ClassCountPolicy>{
            {"uniform", ClassCountPolicy::Uniform}, {"lagged", ClassCountPolicy::Lagged}}));
    app->add_option("--init", hp.init, "center initialisation: kmeans or seeds")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, InitMethod>{{"kmeans", InitMethod::KMeans}, {"seeds", InitMethod::Seeds}}));
    app->add_option("--max-outer-iters", hp.max_outer_iters, "alternating optimisation rounds")->capture_default_str();
    app->add_option("--lbp-max-iters", hp.lbp_max_iters, "belief propagation sweeps per inference")->capture_default_str();
    app->add_option("--lbp-damping", hp.lbp_damping, "weight of the previous message in [0, 1)")->capture_default_str();
    app->add_option("--seeds", c.seeds, "random seeds, one run each")->capture_default_str();
    app->add_option("--out", c.out_dir, "output directory")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Latent-class contextual anomaly detection experiments"};
    app.set_config("--config", "", "flat key=value file, e.g. a manifest.txt from an earlier run");
    app.require_subcommand(1);

    RunConfig toy = RunConfig::defaults(Subcommand::ToySweep);
    RunConfig facies = RunConfig::defaults(Subcommand::Facies);
    RunConfig analyze = RunConfig::defaults(Subcommand::Analyze);
    ParamText toy_text, facies_text, analyze_text;

    auto* toy_cmd = app.add_subcommand("toy-sweep", "ARI over class distances and AUROC over contamination levels");
    add_common(toy_cmd, toy, toy_text);
    toy_cmd->add_option("--deltas", toy.deltas, "class mean distances in units of std-a")->capture_default_str();
    toy_cmd->add_option("--toy-delta", toy.toy_delta, "class mean distance of the contamination study")
        ->capture_default_str();
    toy_cmd->add_option("--contaminations", toy.contaminations, "anomaly fractions of the contamination study")->capture_default_str();
    toy_cmd->add_option("--contamination", toy.toy.contamination, "anomaly fraction for the distance sweep")
        ->capture_default_str();
    toy_cmd->add_option("--n-per-class", toy.toy.n_per_class, "samples per class")->capture_default_str();
    toy_cmd->add_option("--std-a", toy.toy.std_a, "standard deviation of class a")->capture_default_str();
    toy_cmd->add_option("--std-b", toy.toy.std_b, "standard deviation of class b")->capture_default_str();
    toy_cmd->add_option("--layout", toy.toy.layout, "chain or grid")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, ToyLayout>{{"chain", ToyLayout::Chain}, {"grid", ToyLayout::Grid}}));
    toy_cmd->add_option("--block-length", toy.toy.block_length, "chain layout: length of each single-class run")->capture_default_str();

    auto* facies_cmd = app.add_subcommand("facies", "synthetic channel facies with planted anomalies");
    add_common(facies_cmd, facies, facies_text);
    auto& g = facies.grid;
    facies_cmd->add_option("--height", g.height, "grid rows")->capture_default_str();
    facies_cmd->add_option("--width", g.width, "grid columns")->capture_default_str();
    facies_cmd->add_option("--channels", g.num_channels, "number of sand channels")->capture_default_str();
    facies_cmd->add_option("--channel-width", g.channel_width, "channel width in cells")->capture_default_str();
    facies_cmd->add_option("--amplitude", g.amplitude, "channel meander amplitude in cells")->capture_default_str();
    facies_cmd->add_option("--wavelength", g.wavelength, "channel meander wavelength in cells")->capture_default_str();
    facies_cmd->add_option("--shale-mean", facies_text.shale_mean, "shale feature means (two values)")->expected(2);
    facies_cmd->add_option("--shale-std", facies_text.shale_std, "shale feature standard deviations (two values)")->expected(2);
    facies_cmd->add_option("--sand-mean", facies_text.sand_mean, "sand feature means (two values)")->expected(2);
    facies_cmd->add_option("--sand-std", facies_text.sand_std, "sand feature standard deviations (two values)")->expected(2);
    facies_cmd->add_option("--anomalies", g.num_anomalies, "number of planted anomalies")->capture_default_str();
    facies_cmd->add_option("--anomaly-magnitude", g.anomaly_magnitude, "shift in units of the class standard deviation")->capture_default_str();
    facies_cmd->add_option("--anomaly-feature", g.anomaly_feature, "feature column that receives the shift")->capture_default_str();

    auto* analyze_cmd = app.add_subcommand("analyze", "run on a row-major CSV grid");
    add_common(analyze_cmd, analyze, analyze_text);
    auto& a = analyze.analyze;
    analyze_cmd->add_option("--input", a.path, "CSV file, one row per grid cell")->required();
    analyze_cmd->add_option("--height", a.height, "grid rows")->required();
    analyze_cmd->add_option("--width", a.width, "grid columns")->required();
    analyze_cmd->add_option("--dims", a.dims, "feature columns per row")->required();
    analyze_cmd->add_flag("--header", a.has_header, "skip the first CSV line");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    RunConfig* config = &toy;
    ParamText* text = &toy_text;
    if (facies_cmd->parsed()) {
        config = &facies;
        text = &facies_text;
    } else if (analyze_cmd->parsed()) {
        config = &analyze;
        text = &analyze_text;
    }

    try {
        config->hp.gamma = auto_or_number(text->gamma, "gamma");
        config->hp.sigma = auto_or_number(text->sigma, "sigma");
        if (config == &facies) {
            g.shale_mean = two(text->shale_mean, g.shale_mean, "shale-mean");
            g.shale_std = two(text->shale_std, g.shale_std, "shale-std");
            g.sand_mean = two(text->sand_mean, g.sand_mean, "sand-mean");
            g.sand_std = two(text->sand_std, g.sand_std, "sand-std");
        }
        execute(*config);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    std::printf("wrote %s\n", config->out_dir.string().c_str());
    return 0;
}
