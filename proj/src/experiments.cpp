#include "lccad/experiments.hpp"

#include "lccad/artifacts.hpp"
#include "lccad/eval.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace lccad {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t method_index(Method m) { return static_cast<std::size_t>(m); }

/// Shortest text that parses back to the same double.
std::string exact_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class T>
std::string list(const std::vector<T>& values) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_floating_point_v<T>) {
            out += exact_number(values[i]);
        } else {
            out += std::to_string(values[i]);
        }
    }
    return out + "]";
}

std::string pair(const Eigen::Vector2d& v) { return list(std::vector<double>{v[0], v[1]}); }

std::string quoted(const std::filesystem::path& p) { return "\"" + p.generic_string() + "\""; }

const char* to_string(FeatureMapKind kind) { return kind == FeatureMapKind::Identity ? "identity" : "rff"; }
const char* to_string(ClassCountPolicy p) { return p == ClassCountPolicy::Lagged ? "lagged" : "uniform"; }
const char* to_string(InitMethod m) { return m == InitMethod::Seeds ? "seeds" : "kmeans"; }
const char* to_string(ToyLayout l) { return l == ToyLayout::Grid ? "grid" : "chain"; }

/// Fraction f of n samples labelled anomalous leaves both classes non-empty.
bool usable_fraction(double f, Index n) {
    const auto k = std::llround(f * static_cast<double>(n));
    return f > 0.0 && f < 1.0 && k >= 1 && k < n;
}

Eigen::MatrixXd as_grid(const Eigen::VectorXd& v, GridShape shape) {
    Eigen::MatrixXd out(shape.height, shape.width);
    for (Index r = 0; r < shape.height; ++r)
        for (Index c = 0; c < shape.width; ++c) out(r, c) = v[r * shape.width + c];
    return out;
}

Eigen::VectorXd states_vector(const LatentAssignment& h) {
    Eigen::VectorXd v(static_cast<Index>(h.size()));
    for (std::size_t i = 0; i < h.size(); ++i) v[static_cast<Index>(i)] = h[i];
    return v;
}

std::string fits_csv(const std::vector<FitSummary>& fits) {
    std::string out = "seed,method,context,iterations,converged,stop,sigma,gamma,objective\n";
    for (const auto& f : fits) {
        out += std::to_string(f.seed) + "," + to_string(f.method) + "," + f.context + "," +
               std::to_string(f.iterations) + "," + (f.converged ? "1" : "0") + "," + to_string(f.stop) + "," +
               format_number(f.sigma) + "," + format_number(f.gamma) + "," + format_number(f.objective) + "\n";
    }
    return out;
}

std::vector<std::string> resolved_comments(const std::vector<FitSummary>& fits) {
    std::vector<std::string> out;
    for (const auto& f : fits) {
        if (f.method != Method::Lccad) continue;
        out.push_back("resolved seed=" + std::to_string(f.seed) + " " + f.context + " sigma=" + exact_number(f.sigma) +
                      " gamma=" + exact_number(f.gamma));
    }
    return out;
}

GridSeedRun run_grid_seed(const FeatureMatrix& x, const DependencyGraph& graph, GridShape shape,
                          const HyperParams& hp, std::uint64_t seed) {
    GridSeedRun run;
    run.seed = seed;
    run.x = x.values();
    for (Method m : kAllMethods) {
        const FitResult fr = fit(x, graph, method_params(hp, m, seed));
        const auto i = method_index(m);
        run.states[i] = fr.model.assignment;
        run.scores[i] = score(fr.model, x);
        run.fits[i] = summarize_fit(fr, seed, m, "grid");
        if (m == Method::Lccad) run.relevance = relevance_map(fr.model, x, shape);
    }
    return run;
}

}  // namespace

const char* to_string(Subcommand command) {
    switch (command) {
        case Subcommand::ToySweep: return "toy-sweep";
        case Subcommand::Facies: return "facies";
        case Subcommand::Analyze: return "analyze";
    }
    return "unknown";
}

const char* to_string(Method method) {
    switch (method) {
        case Method::Lccad: return "lccad";
        case Method::KMeans: return "kmeans";
        case Method::Svdd: return "svdd";
    }
    return "unknown";
}

HyperParams method_params(const HyperParams& base, Method method, std::uint64_t seed) {
    HyperParams hp = base;
    hp.seed = seed;
    switch (method) {
        case Method::Lccad: break;
        case Method::KMeans:
            hp.theta = 1.0;
            hp.nu = 1.0;
            break;
        case Method::Svdd:
            hp.num_classes = 1;
            hp.theta = 1.0;
            break;
    }
    return hp;
}

RunConfig RunConfig::defaults(Subcommand command) {
    RunConfig c;
    c.command = command;
    c.out_dir = "results";
    switch (command) {
        case Subcommand::ToySweep:
            c.seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
            for (int i = 0; i <= 12; ++i) c.deltas.push_back(0.5 * i);
            c.contaminations = {0.01, 0.02, 0.05, 0.1};
            break;
        case Subcommand::Facies: c.seeds = {0, 1, 2, 3, 4}; break;
        case Subcommand::Analyze: c.seeds = {0}; break;
    }
    return c;
}

ValidationReport RunConfig::validate() const {
    ValidationReport r;
    r.violations = hp.violations();
    if (seeds.empty()) r.violations.push_back("seeds must not be empty");
    if (out_dir.empty()) r.violations.push_back("output directory must not be empty");
    switch (command) {
        case Subcommand::ToySweep: {
            try {
                toy.check();
            } catch (const std::invalid_argument& e) {
                r.violations.push_back(e.what());
            }
            const Index n = 2 * toy.n_per_class;
            if (deltas.empty()) r.violations.push_back("deltas must not be empty");
            for (double d : deltas) {
                if (!std::isfinite(d) || d < 0.0) r.violations.push_back("delta out of range");
            }
            if (!std::isfinite(toy_delta) || toy_delta < 0.0) r.violations.push_back("toy delta out of range");
            if (contaminations.empty()) r.violations.push_back("contaminations must not be empty");
            for (double f : contaminations) {
                if (!usable_fraction(f, n)) r.violations.push_back("contamination out of range");
            }
            if (!usable_fraction(toy.contamination, n)) r.violations.push_back("contamination out of range");
            break;
        }
        case Subcommand::Facies:
            try {
                grid.check();
            } catch (const std::invalid_argument& e) {
                r.violations.push_back(e.what());
            }
            break;
        case Subcommand::Analyze:
            if (analyze.path.empty()) r.violations.push_back("input path must not be empty");
            if (analyze.height < 1 || analyze.width < 1 || analyze.dims < 1) {
                r.violations.push_back("grid height, width and dims must be positive");
            }
            break;
    }
    return r;
}

std::string manifest(const RunConfig& config, const std::vector<std::string>& resolved) {
    const auto& hp = config.hp;
    std::ostringstream m;
    m << "# replay: lccad --config manifest.txt " << to_string(config.command) << "\n";
    m << "[" << to_string(config.command) << "]\n";
    m << "classes=" << hp.num_classes << "\n";
    m << "theta=" << exact_number(hp.theta) << "\n";
    m << "nu=" << exact_number(hp.nu) << "\n";
    m << "gamma=" << (hp.gamma ? exact_number(*hp.gamma) : "auto") << "\n";
    m << "sigma=" << (hp.sigma ? exact_number(*hp.sigma) : "auto") << "\n";
    m << "rff-dim=" << hp.rff_dim << "\n";
    m << "feature-map=" << to_string(hp.feature_map) << "\n";
    m << "count-policy=" << to_string(hp.count_policy) << "\n";
    m << "init=" << to_string(hp.init) << "\n";
    m << "max-outer-iters=" << hp.max_outer_iters << "\n";
    m << "lbp-max-iters=" << hp.lbp_max_iters << "\n";
    m << "lbp-damping=" << exact_number(hp.lbp_damping) << "\n";
    m << "seeds=" << list(config.seeds) << "\n";
    m << "out=" << quoted(config.out_dir) << "\n";
    switch (config.command) {
        case Subcommand::ToySweep: {
            const auto& t = config.toy;
            m << "deltas=" << list(config.deltas) << "\n";
            m << "toy-delta=" << exact_number(config.toy_delta) << "\n";
            m << "contaminations=" << list(config.contaminations) << "\n";
            m << "contamination=" << exact_number(t.contamination) << "\n";
            m << "n-per-class=" << t.n_per_class << "\n";
            m << "std-a=" << exact_number(t.std_a) << "\n";
            m << "std-b=" << exact_number(t.std_b) << "\n";
            m << "layout=" << to_string(t.layout) << "\n";
            m << "block-length=" << t.block_length << "\n";
            break;
        }
        case Subcommand::Facies: {
            const auto& g = config.grid;
            m << "height=" << g.height << "\n";
            m << "width=" << g.width << "\n";
            m << "channels=" << g.num_channels << "\n";
            m << "channel-width=" << exact_number(g.channel_width) << "\n";
            m << "amplitude=" << exact_number(g.amplitude) << "\n";
            m << "wavelength=" << exact_number(g.wavelength) << "\n";
            m << "shale-mean=" << pair(g.shale_mean) << "\n";
            m << "shale-std=" << pair(g.shale_std) << "\n";
            m << "sand-mean=" << pair(g.sand_mean) << "\n";
            m << "sand-std=" << pair(g.sand_std) << "\n";
            m << "anomalies=" << g.num_anomalies << "\n";
            m << "anomaly-magnitude=" << exact_number(g.anomaly_magnitude) << "\n";
            m << "anomaly-feature=" << g.anomaly_feature << "\n";
            break;
        }
        case Subcommand::Analyze: {
            const auto& a = config.analyze;
            m << "input=" << quoted(a.path) << "\n";
            m << "height=" << a.height << "\n";
            m << "width=" << a.width << "\n";
            m << "dims=" << a.dims << "\n";
            m << "header=" << (a.has_header ? "true" : "false") << "\n";
            break;
        }
    }
    for (const auto& line : resolved) m << "# " << line << "\n";
    return m.str();
}

FitSummary summarize_fit(const FitResult& fr, std::uint64_t seed, Method method, std::string context) {
    FitSummary s;
    s.seed = seed;
    s.method = method;
    s.context = std::move(context);
    s.iterations = fr.report.iterations;
    s.converged = fr.report.converged;
    s.stop = fr.report.stop;
    s.sigma = fr.report.sigma;
    s.gamma = fr.report.gamma;
    s.objective = fr.report.final_objective.total;
    return s;
}

ToySweepResult run_toy_sweep(const RunConfig& config) {
    ToySweepResult result;
    auto run_cell = [&](double delta, std::uint64_t seed, const std::string& context,
                        auto&& consume) {
        ToySpec spec = config.toy;
        spec.mean_distance = delta * spec.std_a;
        spec.seed = seed;
        const Dataset ds = gen_toy(spec);
        for (Method m : kAllMethods) {
            const FitResult fr = fit(ds.x, ds.graph, method_params(config.hp, m, seed));
            result.fits.push_back(summarize_fit(fr, seed, m, context));
            consume(m, ds, fr.model, score(fr.model, ds.x));
        }
    };

    for (double delta : config.deltas) {
        for (auto seed : config.seeds) {
            run_cell(delta, seed, "delta=" + format_number(delta),
                     [&](Method m, const Dataset& ds, const LccadModel& model, const Eigen::VectorXd& s) {
                         const auto labels = label_top_fraction(ds.truth.true_scores, config.toy.contamination);
                         result.sweep.push_back({delta, seed, m, adjusted_rand_index(model.assignment, ds.truth.true_states),
                                                 auroc(s, labels)});
                     });
        }
    }
    for (auto seed : config.seeds) {
        run_cell(config.toy_delta, seed, "contamination-study",
                 [&](Method m, const Dataset& ds, const LccadModel&, const Eigen::VectorXd& s) {
                     for (double f : config.contaminations) {
                         result.contamination.push_back(
                             {f, seed, m, auroc(s, label_top_fraction(ds.truth.true_scores, f))});
                     }
                 });
    }
    return result;
}

void write_toy_sweep(const RunConfig& config, const ToySweepResult& result) {
    const auto& dir = config.out_dir;
    ensure_directory(dir);

    std::string results = "delta,seed,method,ari,auroc\n";
    for (const auto& r : result.sweep) {
        results += format_number(r.delta) + "," + std::to_string(r.seed) + "," + to_string(r.method) + "," +
                   format_number(r.ari) + "," + format_number(r.auroc) + "\n";
    }
    write_file_atomic(dir / "results.csv", results);

    std::string contamination = "contamination,seed,method,auroc\n";
    for (const auto& r : result.contamination) {
        contamination += format_number(r.contamination) + "," + std::to_string(r.seed) + "," + to_string(r.method) +
                         "," + format_number(r.auroc) + "\n";
    }
    write_file_atomic(dir / "contamination.csv", contamination);

    std::string summary = "study,x,method,metric,mean,std,n_seeds\n";
    auto add = [&](const char* study, double x, Method m, const char* metric, const std::vector<double>& v) {
        const auto s = summarize(metric, v);
        summary += std::string(study) + "," + format_number(x) + "," + to_string(m) + "," + metric + "," +
                   format_number(s.mean) + "," + format_number(s.stddev) + "," + std::to_string(s.n_seeds) + "\n";
    };
    for (double delta : config.deltas) {
        for (Method m : kAllMethods) {
            std::vector<double> ari, auc;
            for (const auto& r : result.sweep) {
                if (r.delta == delta && r.method == m) {
                    ari.push_back(r.ari);
                    auc.push_back(r.auroc);
                }
            }
            add("delta", delta, m, "ari", ari);
            add("delta", delta, m, "auroc", auc);
        }
    }
    for (double f : config.contaminations) {
        for (Method m : kAllMethods) {
            std::vector<double> auc;
            for (const auto& r : result.contamination) {
                if (r.contamination == f && r.method == m) auc.push_back(r.auroc);
            }
            add("contamination", f, m, "auroc", auc);
        }
    }
    write_file_atomic(dir / "summary.csv", summary);
    write_file_atomic(dir / "fits.csv", fits_csv(result.fits));
    write_file_atomic(dir / "manifest.txt", manifest(config, resolved_comments(result.fits)));
}

GridMetrics grid_metrics(const GridSeedRun& run, Method method) {
    if (!run.truth) return {kNaN, kNaN};
    const auto i = method_index(method);
    return {adjusted_rand_index(run.states[i], run.truth->true_states), auroc(run.scores[i], run.truth->anomaly_labels)};
}

GridRunResult run_facies(const RunConfig& config) {
    GridRunResult result;
    result.shape = {config.grid.height, config.grid.width};
    for (auto seed : config.seeds) {
        GridSpec spec = config.grid;
        spec.seed = seed;
        Dataset ds = gen_grid_facies(spec);
        GridSeedRun run = run_grid_seed(ds.x, ds.graph, result.shape, config.hp, seed);
        run.truth = std::move(ds.truth);
        result.runs.push_back(std::move(run));
    }
    return result;
}

GridRunResult run_analyze(const RunConfig& config) {
    const auto& a = config.analyze;
    std::optional<GridData> data;
    try {
        data.emplace(load_grid_csv(a.path, a.height, a.width, a.dims, a.has_header));
    } catch (const GridCsvError& e) {
        if (e.kind() == GridCsvError::Kind::Io) throw IoError(e.what());
        throw ConfigError(e.what());
    }
    GridRunResult result;
    result.shape = {a.height, a.width};
    for (auto seed : config.seeds) {
        result.runs.push_back(run_grid_seed(data->x, data->graph, result.shape, config.hp, seed));
    }
    return result;
}

void write_grid_run(const RunConfig& config, const GridRunResult& result) {
    const auto& dir = config.out_dir;
    ensure_directory(dir);
    const GridShape shape = result.shape;

    std::string metrics = "seed,method,ari,auroc\n";
    std::vector<FitSummary> fits;
    for (const auto& run : result.runs) {
        for (Method m : kAllMethods) {
            const auto g = grid_metrics(run, m);
            metrics += std::to_string(run.seed) + "," + to_string(m) + "," + format_number(g.ari) + "," +
                       format_number(g.auroc) + "\n";
            fits.push_back(run.fits[method_index(m)]);
        }

        const auto seed_dir = dir / ("seed_" + std::to_string(run.seed));
        ensure_directory(seed_dir);
        const Index n = run.x.rows();
        const Index d = run.x.cols();

        std::string nodes = "node,row,col";
        for (Index f = 0; f < d; ++f) nodes += ",x" + std::to_string(f);
        nodes += ",state,score,outlierness";
        for (Index f = 0; f < d; ++f) nodes += ",relevance" + std::to_string(f);
        nodes += ",score_kmeans,score_svdd";
        if (run.truth) nodes += ",true_state,anomaly";
        nodes += "\n";
        for (Index i = 0; i < n; ++i) {
            nodes += std::to_string(i) + "," + std::to_string(i / shape.width) + "," + std::to_string(i % shape.width);
            for (Index f = 0; f < d; ++f) nodes += "," + format_number(run.x(i, f));
            const auto si = static_cast<std::size_t>(i);
            nodes += "," + std::to_string(run.states[0][si]) + "," + format_number(run.scores[0][i]) + "," +
                     format_number(run.relevance.outlierness[i]);
            for (Index f = 0; f < d; ++f) nodes += "," + format_number(run.relevance.values(i, f));
            nodes += "," + format_number(run.scores[1][i]) + "," + format_number(run.scores[2][i]);
            if (run.truth) {
                nodes += "," + std::to_string(run.truth->true_states[si]) + "," +
                         (run.truth->anomaly_labels[si] ? "1" : "0");
            }
            nodes += "\n";
        }
        write_file_atomic(seed_dir / "nodes.csv", nodes);

        nlohmann::ordered_json meta = nlohmann::ordered_json::object();
        auto heatmap = [&](const std::string& name, const Eigen::MatrixXd& values) {
            HeatmapScale scale;
            write_file_atomic(seed_dir / (name + ".pgm"), encode_pgm(values, &scale));
            meta[name + ".pgm"] = {{"width", values.cols()}, {"height", values.rows()}, {"maxval", 255},
                                   {"min", scale.min}, {"max", scale.max}};
        };
        heatmap("states", as_grid(states_vector(run.states[0]), shape));
        heatmap("score", as_grid(run.scores[0], shape));
        heatmap("outlierness", as_grid(run.relevance.outlierness, shape));
        for (Index f = 0; f < d; ++f) heatmap("relevance" + std::to_string(f), run.relevance.channel(f));
        heatmap("score_kmeans", as_grid(run.scores[1], shape));
        heatmap("score_svdd", as_grid(run.scores[2], shape));
        if (run.truth) {
            heatmap("true_states", as_grid(states_vector(run.truth->true_states), shape));
            Eigen::VectorXd anomalies(n);
            for (Index i = 0; i < n; ++i) anomalies[i] = run.truth->anomaly_labels[static_cast<std::size_t>(i)];
            heatmap("anomalies", as_grid(anomalies, shape));
        }
        write_file_atomic(seed_dir / "heatmaps.json", meta.dump(2) + "\n");
    }
    write_file_atomic(dir / "metrics.csv", metrics);

    std::string summary = "method,metric,mean,std,n_seeds\n";
    for (Method m : kAllMethods) {
        std::vector<double> ari, auc;
        for (const auto& run : result.runs) {
            const auto g = grid_metrics(run, m);
            ari.push_back(g.ari);
            auc.push_back(g.auroc);
        }
        for (const auto& [metric, values] : {std::pair{"ari", ari}, std::pair{"auroc", auc}}) {
            const auto s = summarize(metric, values);
            summary += std::string(to_string(m)) + "," + metric + "," + format_number(s.mean) + "," +
                       format_number(s.stddev) + "," + std::to_string(s.n_seeds) + "\n";
        }
    }
    write_file_atomic(dir / "summary.csv", summary);
    write_file_atomic(dir / "fits.csv", fits_csv(fits));
    write_file_atomic(dir / "manifest.txt", manifest(config, resolved_comments(fits)));
}

void execute(const RunConfig& config) {
    if (const auto report = config.validate(); !report.ok()) throw ConfigError(report.message());
    ensure_directory(config.out_dir);
    try {
        switch (config.command) {
            case Subcommand::ToySweep: write_toy_sweep(config, run_toy_sweep(config)); break;
            case Subcommand::Facies: write_grid_run(config, run_facies(config)); break;
            case Subcommand::Analyze: write_grid_run(config, run_analyze(config)); break;
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace lccad
