#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vrnmf/driver.hpp"
#include "vrnmf/io.hpp"
#include "vrnmf/metrics.hpp"
#include "vrnmf/parallel.hpp"
#include "vrnmf/synth.hpp"
#include "vrnmf/tuning.hpp"

namespace vrnmf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const IoError*>(&e)) return kIoFailure;
    if (dynamic_cast<const ContractError*>(&e) || dynamic_cast<const DimensionError*>(&e)) return kBadArguments;
    return kSolverError;
}

// Options shared by every subcommand that runs the solver.
struct SolverFlags {
    std::string regularizer = "det";
    double lambda = 0.0;
    std::optional<double> lambda_tilde;
    int max_iter = 300;
    int inner_iters = 50;
    int h_iters = 300;
    double h_tol = 1e-8;
    std::optional<double> delta;
    int trace_every = 1;
    std::uint64_t seed = 0;
    std::optional<double> early_exit;
    int threads = 0;

    void add_to(CLI::App& app, bool with_lambda) {
        app.add_option("--regularizer", regularizer, "det, logdet or nuclear")
            ->check(CLI::IsMember({"det", "logdet", "nuclear"}, CLI::ignore_case));
        if (with_lambda) {
            auto* abs = app.add_option("--lambda", lambda, "Regularization weight")->check(CLI::NonNegativeNumber);
            app.add_option("--lambda-tilde", lambda_tilde,
                           "Relative weight; lambda = value * fit(W0,H0) / |V(W0)|")
                ->check(CLI::NonNegativeNumber)
                ->excludes(abs);
        }
        app.add_option("--max-iter", max_iter, "Outer iterations")->check(CLI::PositiveNumber);
        app.add_option("--inner-iters", inner_iters, "Inner W iterations per outer iteration")
            ->check(CLI::PositiveNumber);
        app.add_option("--h-iters", h_iters, "Max APG iterations per H column")->check(CLI::PositiveNumber);
        app.add_option("--h-tol", h_tol, "Relative iterate change tolerance for H")->check(CLI::PositiveNumber);
        app.add_option("--delta", delta, "Log-det delta (default: 1e-8 trace(W0^T W0)/r)")
            ->check(CLI::PositiveNumber);
        app.add_option("--trace-every", trace_every, "Record the objective every k iterations")
            ->check(CLI::PositiveNumber);
        app.add_option("--seed", seed, "Seed recorded in the manifest");
        app.add_option("--early-exit", early_exit, "Stop when the relative objective change drops below this");
        app.add_option("--threads", threads, "Worker threads (0 = VRNMF_THREADS or hardware)");
    }

    SolverConfig config() const {
        SolverConfig cfg;
        cfg.lambda = lambda;
        cfg.kind.tag = parse_regularizer(regularizer);
        cfg.kind.delta = delta;
        cfg.outer_iters = max_iter;
        cfg.w_inner_iters = inner_iters;
        cfg.h_opts.max_iters = h_iters;
        cfg.h_opts.rel_tol = h_tol;
        cfg.trace_every = trace_every;
        cfg.seed = seed;
        cfg.early_exit_rel_change = early_exit;
        cfg.threads = threads;
        cfg.validate();
        return cfg;
    }
};

json run_manifest(const SolverConfig& cfg, const RunResult& result, const DenseMatrix& x,
                  const std::optional<MatchedScore>& score, double seconds) {
    json doc;
    doc["tool"] = "vrnmf";
    doc["version"] = VRNMF_VERSION;
    doc["seed"] = cfg.seed;
    doc["config"] = io::to_json(cfg);
    doc["resolved_delta"] = result.kind.delta ? json(*result.kind.delta) : json(nullptr);
    doc["m"] = x.rows();
    doc["n"] = x.cols();
    doc["rank"] = result.factors.rank();
    doc["status"] = std::string(to_string(result.status));
    doc["iterations"] = result.iterations;
    doc["final_objective"] = io::to_json(result.trace.back().objective);
    const double rel = relative_residual(x, result.factors.w, result.factors.h);
    doc["final_relative_fit"] = rel;
    doc["final_relative_fit_percent"] = 100.0 * rel;
    if (score) {
        doc["mrsa"] = score->score;
        doc["mrsa_pairs"] = score->pair_scores;
        doc["matching"] = score->permutation;
    } else {
        doc["mrsa"] = nullptr;
    }
    doc["seconds"] = seconds;
    doc["warnings"] = result.warnings;
    doc["trace"] = io::to_json(result.trace);
    return doc;
}

// ---------------------------------------------------------------- unmix

struct UnmixArgs {
    std::string input;
    std::string truth;
    std::string out;
    Eigen::Index rank = 0;
    SolverFlags solver;
};

int cmd_unmix(const UnmixArgs& args) {
    SolverConfig cfg = args.solver.config();
    const DenseMatrix x = io::read_matrix(args.input);
    std::optional<DenseMatrix> truth;
    if (!args.truth.empty()) truth = io::read_matrix(args.truth);
    if (truth && (truth->rows() != x.rows() || truth->cols() != args.rank)) {
        throw DimensionError("--truth must be m x rank");
    }
    if (args.rank > std::min(x.rows(), x.cols())) {
        throw DimensionError("--rank exceeds min(m, n) of the input");
    }
    io::ensure_directory(args.out);

    const auto t0 = Clock::now();
    const FactorPair start = initialize(x, args.rank, cfg.h_opts, cfg.threads);
    cfg.kind = resolve_kind(cfg.kind, start.w);
    std::optional<double> scale;
    if (args.solver.lambda_tilde) {
        scale = lambda_scale(x, start, cfg.kind);
        cfg.lambda = *args.solver.lambda_tilde * *scale;
    }
    const RunResult result = run_from(x, start, cfg);
    const double seconds = seconds_since(t0);

    std::optional<MatchedScore> score;
    if (truth) score = mrsa_matched(result.factors.w, *truth);
    json manifest = run_manifest(cfg, result, x, score, seconds);
    manifest["command"] = "unmix";
    manifest["input"] = args.input;
    manifest["truth"] = args.truth.empty() ? json(nullptr) : json(args.truth);
    manifest["lambda_tilde"] = args.solver.lambda_tilde ? json(*args.solver.lambda_tilde) : json(nullptr);
    manifest["lambda_scale"] = scale ? json(*scale) : json(nullptr);

    const fs::path out(args.out);
    io::write_matrix(out / "W.csv", result.factors.w);
    io::write_matrix(out / "H.csv", result.factors.h);
    io::write_trace(out / "trace.csv", result.trace);
    io::write_json(out / "manifest.json", manifest);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "status " << to_string(result.status) << ", relative fit "
              << io::format_double(manifest["final_relative_fit"].get<double>());
    if (score) std::cout << ", mrsa " << score->score;
    std::cout << '\n';
    return kOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string endmembers;
    std::string out;
    Eigen::Index n = 1000;
    std::string purity;
    double alpha = 0.1;
    double sigma = 0.0;
    bool noise_is_variance = false;
    std::uint64_t seed = 0;
    std::optional<std::int64_t> max_resamples;
};

Vector to_vector(const std::vector<double>& values) {
    return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

int cmd_synth(const SynthArgs& args) {
    SyntheticSpec spec;
    spec.w_true = io::read_matrix(args.endmembers);
    spec.n = args.n;
    spec.purity = args.purity.empty() ? Vector::Ones(spec.w_true.cols()) : to_vector(io::parse_list(args.purity));
    spec.dirichlet_alpha = args.alpha;
    spec.noise_sigma = args.sigma;
    spec.noise_is_variance = args.noise_is_variance;
    spec.seed = args.seed;
    spec.max_resamples = args.max_resamples;
    const SyntheticData data = synth_generate(spec);

    io::ensure_directory(args.out);
    const fs::path out(args.out);
    io::write_matrix(out / "X.csv", data.x);
    io::write_matrix(out / "Htrue.csv", data.h_true);
    json doc = io::to_json(spec);
    doc["tool"] = "vrnmf";
    doc["version"] = VRNMF_VERSION;
    doc["endmembers"] = args.endmembers;
    doc["draws"] = data.draws;
    doc["acceptance_rate"] = data.acceptance_rate;
    io::write_json(out / "spec.json", doc);
    return kOk;
}

// ---------------------------------------------------------------- tune

struct TuneArgs {
    std::string input;
    std::string truth;
    std::string out;
    Eigen::Index rank = 0;
    SolverFlags solver;
    TuneOptions tune;
    int grid = 0;
};

int cmd_tune(const TuneArgs& args) {
    const SolverConfig cfg = args.solver.config();
    const DenseMatrix x = io::read_matrix(args.input);
    const DenseMatrix truth = io::read_matrix(args.truth);
    const Eigen::Index rank = args.rank > 0 ? args.rank : truth.cols();
    io::ensure_directory(args.out);

    const auto t0 = Clock::now();
    TuneResult result;
    if (args.grid > 0) {
        const SolverScorer scorer(x, truth, rank, cfg);
        result = grid_search([&](double t) { return scorer(t); }, args.grid, args.tune);
        result.lambda_scale = scorer.lambda_scale;
        result.lambda = result.lambda_tilde * scorer.lambda_scale;
    } else {
        result = tune_lambda(x, truth, rank, cfg, args.tune);
    }
    json doc = io::to_json(result);
    doc["tool"] = "vrnmf";
    doc["version"] = VRNMF_VERSION;
    doc["command"] = "tune";
    doc["method"] = args.grid > 0 ? "grid" : "bisection";
    doc["input"] = args.input;
    doc["truth"] = args.truth;
    doc["rank"] = rank;
    doc["seed"] = cfg.seed;
    doc["config"] = io::to_json(cfg);
    doc["search"] = {{"lower", args.tune.lower},
                     {"upper", args.tune.upper},
                     {"max_rounds", args.tune.max_rounds},
                     {"improvement_tol", args.tune.improvement_tol},
                     {"grid_points", args.grid}};
    doc["seconds"] = seconds_since(t0);
    io::write_json(fs::path(args.out) / "tune.json", doc);
    std::cout << "lambda_tilde " << io::format_double(result.lambda_tilde) << ", lambda "
              << io::format_double(result.lambda) << ", mrsa " << result.mrsa << '\n';
    return kOk;
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
    std::string estimate;
    std::string truth;
    std::string scores;
    std::string scores_column = "mrsa";
    std::string thresholds;
    std::string curve;
    std::string abundances;
    Eigen::Index width = 0;
    Eigen::Index height = 0;
    std::string segment;
    std::string ppm;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
}

// One score per row. A non-numeric first line is a header naming the column.
std::vector<double> read_scores(const fs::path& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<double> scores;
    std::string line;
    std::size_t index = 0;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (first) {
            first = false;
            const auto it = std::find(cells.begin(), cells.end(), column);
            if (it != cells.end()) {
                index = static_cast<std::size_t>(it - cells.begin());
                continue;
            }
        }
        if (index >= cells.size()) throw IoError(path.string() + ": short row");
        if (cells[index].empty()) continue;  // failed cell in an aggregate
        try {
            scores.push_back(std::stod(cells[index]));
        } catch (const std::exception&) {
            throw IoError(path.string() + ": cannot parse '" + cells[index] + "'");
        }
    }
    return scores;
}

std::vector<double> default_thresholds() {
    std::vector<double> t;
    for (int k = 0; k <= 80; ++k) t.push_back(0.25 * k);
    return t;
}

std::string format_curve(const std::vector<std::pair<double, double>>& curve) {
    std::string text = "threshold,fraction\n";
    for (const auto& [t, f] : curve) text += io::format_double(t) + ',' + io::format_double(f) + '\n';
    return text;
}

int cmd_score(const ScoreArgs& args) {
    bool did_something = false;
    if (!args.estimate.empty() || !args.truth.empty()) {
        if (args.estimate.empty() || args.truth.empty()) {
            throw ContractError("--estimate and --truth must be given together");
        }
        const DenseMatrix w = io::read_matrix(args.estimate);
        const DenseMatrix w_true = io::read_matrix(args.truth);
        const MatchedScore score = mrsa_matched(w, w_true);
        std::array<char, 64> buf{};
        std::snprintf(buf.data(), buf.size(), "%.6f", score.score);
        std::cout << buf.data() << '\n';
        did_something = true;
    }
    if (!args.curve.empty()) {
        if (args.scores.empty()) throw ContractError("--curve needs --scores");
        const auto scores = read_scores(args.scores, args.scores_column);
        const auto thresholds = args.thresholds.empty() ? default_thresholds() : io::parse_list(args.thresholds);
        io::write_text(args.curve, format_curve(recovery_curve(scores, thresholds)));
        did_something = true;
    }
    if (!args.segment.empty() || !args.ppm.empty()) {
        if (args.abundances.empty()) throw ContractError("--segment/--ppm need --abundances");
        const DenseMatrix h = io::read_matrix(args.abundances);
        const LabelGrid labels = segmentation_map(h, args.width, args.height);
        if (!args.segment.empty()) io::write_text(args.segment, io::format_labels(labels));
        if (!args.ppm.empty()) io::write_label_ppm(args.ppm, labels);
        did_something = true;
    }
    if (!did_something) {
        throw ContractError("score: nothing to do (give --estimate/--truth, --curve or --segment)");
    }
    return kOk;
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    std::string config;
    std::string out;
    int threads = 0;
};

struct BenchCell {
    std::size_t id = 0;
    std::vector<double> purity;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string method;
    // results
    bool ok = false;
    double lambda_tilde = 0.0;
    double lambda = 0.0;
    double mrsa = 0.0;
    double relative_fit = 0.0;
    double seconds = 0.0;
    std::string status;
};

std::vector<std::vector<double>> purity_grid(const json& cfg, Eigen::Index r) {
    std::vector<std::vector<double>> vectors;
    if (cfg.contains("purity_vectors")) {
        vectors = cfg["purity_vectors"].get<std::vector<std::vector<double>>>();
    } else if (cfg.contains("purity_levels")) {
        const auto levels = cfg["purity_levels"].get<std::vector<double>>();
        if (levels.empty()) throw ContractError("bench: purity_levels is empty");
        // Full product over the r endmembers (the MRSA cube for r = 3).
        std::vector<std::size_t> idx(static_cast<std::size_t>(r), 0);
        while (true) {
            std::vector<double> p;
            for (auto k : idx) p.push_back(levels[k]);
            vectors.push_back(std::move(p));
            std::size_t d = 0;
            while (d < idx.size() && ++idx[d] == levels.size()) idx[d++] = 0;
            if (d == idx.size()) break;
        }
    } else {
        vectors.push_back(std::vector<double>(static_cast<std::size_t>(r), 1.0));
    }
    for (const auto& p : vectors) {
        if (static_cast<Eigen::Index>(p.size()) != r) throw ContractError("bench: purity vector length != r");
    }
    return vectors;
}

int cmd_bench(const BenchArgs& args) {
    const fs::path config_path(args.config);
    const json cfg = io::read_json(config_path);
    fs::path endmembers_path;
    Eigen::Index n = 1000;
    double alpha = 0.1;
    bool noise_is_variance = false;
    bool tune = true;
    std::optional<double> fixed_lambda_tilde;
    std::vector<double> sigmas{0.0};
    std::vector<std::uint64_t> seeds{0};
    std::vector<std::string> methods{"det"};
    std::vector<double> thresholds = default_thresholds();
    SolverConfig base;
    TuneOptions tune_opts;
    try {
        endmembers_path = cfg.at("endmembers").get<std::string>();
        if (endmembers_path.is_relative()) endmembers_path = config_path.parent_path() / endmembers_path;
        n = cfg.value("n", n);
        alpha = cfg.value("alpha", alpha);
        noise_is_variance = cfg.value("noise_is_variance", noise_is_variance);
        sigmas = cfg.value("sigmas", sigmas);
        seeds = cfg.value("seeds", seeds);
        methods = cfg.value("regularizers", methods);
        thresholds = cfg.value("thresholds", thresholds);
        if (cfg.contains("lambda_tilde")) {
            fixed_lambda_tilde = cfg["lambda_tilde"].get<double>();
            tune = false;
        }
        tune = cfg.value("tune", tune);
        if (cfg.contains("solver")) base = io::solver_config_from_json(cfg["solver"]);
        tune_opts.max_rounds = cfg.value("max_rounds", tune_opts.max_rounds);
    } catch (const json::exception& e) {
        throw ContractError(std::string("bench config: ") + e.what());
    }
    if (!tune && !fixed_lambda_tilde) throw ContractError("bench: set \"tune\": true or a fixed \"lambda_tilde\"");
    for (const auto& m : methods) {
        if (m != "spa") parse_regularizer(m);
    }
    const DenseMatrix w_true = io::read_matrix(endmembers_path);
    const Eigen::Index r = w_true.cols();
    const auto purities = purity_grid(cfg, r);

    // One dataset per (purity, sigma, seed); every method runs on it.
    struct Dataset {
        std::size_t first_cell;
        std::vector<double> purity;
        double sigma;
        std::uint64_t seed;
    };
    std::vector<Dataset> datasets;
    std::vector<BenchCell> cells;
    for (const auto& p : purities) {
        for (const double sigma : sigmas) {
            for (const auto seed : seeds) {
                datasets.push_back({cells.size(), p, sigma, seed});
                for (const auto& method : methods) {
                    BenchCell cell;
                    cell.id = cells.size();
                    cell.purity = p;
                    cell.sigma = sigma;
                    cell.seed = seed;
                    cell.method = method;
                    cells.push_back(std::move(cell));
                }
            }
        }
    }

    const fs::path out(args.out);
    io::ensure_directory(out / "cells");
    std::mutex log_mutex;
    const int threads = resolve_threads(args.threads);

    parallel_for_chunks(datasets.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t d = begin; d < end; ++d) {
            const Dataset& ds = datasets[d];
            std::optional<SyntheticData> data;
            SyntheticSpec spec;
            spec.w_true = w_true;
            spec.n = n;
            spec.purity = to_vector(ds.purity);
            spec.dirichlet_alpha = alpha;
            spec.noise_sigma = ds.sigma;
            spec.noise_is_variance = noise_is_variance;
            spec.seed = ds.seed;
            std::string data_error;
            try {
                data = synth_generate(spec);
            } catch (const std::exception& e) {
                data_error = e.what();
            }
            for (std::size_t c = ds.first_cell; c < ds.first_cell + methods.size(); ++c) {
                BenchCell& cell = cells[c];
                char name[32];
                std::snprintf(name, sizeof(name), "cell_%05zu", cell.id);
                const fs::path dir = out / "cells" / name;
                json manifest;
                const auto t0 = Clock::now();
                try {
                    io::ensure_directory(dir);
                    if (!data) throw InfeasibleError(data_error);
                    SolverConfig cfg_cell = base;
                    cfg_cell.seed = ds.seed;
                    cfg_cell.threads = 1;
                    if (cell.method == "spa") {
                        const SpaResult spa = spa_init(data->x, r);
                        const MatchedScore score = mrsa_matched(spa.w0, w_true);
                        cell.mrsa = score.score;
                        const FactorPair start = initialize(data->x, r, cfg_cell.h_opts, 1);
                        cell.relative_fit = relative_residual(data->x, start.w, start.h);
                        cell.status = "completed";
                        manifest = {{"tool", "vrnmf"}, {"version", VRNMF_VERSION}, {"method", "spa"},
                                    {"mrsa", cell.mrsa}, {"spa_indices", spa.indices},
                                    {"final_relative_fit", cell.relative_fit}};
                    } else {
                        cfg_cell.kind.tag = parse_regularizer(cell.method);
                        const SolverScorer scorer(data->x, w_true, r, cfg_cell);
                        TuneResult tuned;
                        if (tune) {
                            tuned = bisection_search([&](double t) { return scorer(t); }, tune_opts);
                        } else {
                            tuned.lambda_tilde = *fixed_lambda_tilde;
                        }
                        cell.lambda_tilde = tuned.lambda_tilde;
                        cell.lambda = tuned.lambda_tilde * scorer.lambda_scale;
                        SolverConfig final_cfg = scorer.cfg;
                        final_cfg.lambda = cell.lambda;
                        const RunResult result = run_from(data->x, scorer.start, final_cfg);
                        const MatchedScore score = mrsa_matched(result.factors.w, w_true);
                        cell.mrsa = score.score;
                        cell.relative_fit = relative_residual(data->x, result.factors.w, result.factors.h);
                        cell.status = std::string(to_string(result.status));
                        manifest = run_manifest(final_cfg, result, data->x, score, seconds_since(t0));
                        manifest["method"] = cell.method;
                        manifest["lambda_tilde"] = cell.lambda_tilde;
                        manifest["lambda_scale"] = scorer.lambda_scale;
                        if (tune) manifest["tuning"] = io::to_json(tuned);
                    }
                    cell.ok = true;
                } catch (const std::exception& e) {
                    cell.ok = false;
                    cell.status = std::string("failed: ") + e.what();
                    manifest = {{"tool", "vrnmf"}, {"version", VRNMF_VERSION}, {"method", cell.method},
                                {"error", e.what()}};
                    const std::lock_guard lock(log_mutex);
                    std::cerr << name << ": " << e.what() << '\n';
                }
                cell.seconds = seconds_since(t0);
                manifest["cell"] = cell.id;
                manifest["synthetic"] = io::to_json(spec);
                manifest["endmembers"] = endmembers_path.string();
                manifest["seconds"] = cell.seconds;
                try {
                    io::write_json(dir / "manifest.json", manifest);
                } catch (const std::exception& e) {
                    const std::lock_guard lock(log_mutex);
                    std::cerr << name << ": " << e.what() << '\n';
                }
            }
        }
    });

    std::string aggregate = "cell";
    for (Eigen::Index i = 0; i < r; ++i) aggregate += ",p_" + std::to_string(i + 1);
    aggregate += ",sigma,seed,regularizer,lambda_tilde,lambda,mrsa,relative_fit,seconds,status\n";
    bool any_ok = false;
    for (const auto& cell : cells) {
        aggregate += std::to_string(cell.id);
        for (const double p : cell.purity) aggregate += ',' + io::format_double(p);
        aggregate += ',' + io::format_double(cell.sigma) + ',' + std::to_string(cell.seed) + ',' + cell.method;
        if (cell.ok) {
            aggregate += ',' + io::format_double(cell.lambda_tilde) + ',' + io::format_double(cell.lambda) + ',' +
                         io::format_double(cell.mrsa) + ',' + io::format_double(cell.relative_fit);
        } else {
            aggregate += ",,,,";
        }
        std::string status = cell.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        aggregate += ',' + io::format_double(cell.seconds) + ',' + status + '\n';
        any_ok = any_ok || cell.ok;
    }
    io::write_text(out / "aggregate.csv", aggregate);

    for (const auto& method : methods) {
        std::vector<double> scores;
        for (const auto& cell : cells) {
            if (cell.ok && cell.method == method) scores.push_back(cell.mrsa);
        }
        if (!scores.empty()) {
            io::write_text(out / ("recovery_" + method + ".csv"), format_curve(recovery_curve(scores, thresholds)));
        }
    }
    std::cout << cells.size() << " cells, " << std::count_if(cells.begin(), cells.end(), [](auto& c) { return c.ok; })
              << " succeeded\n";
    return any_ok ? kOk : kAllCellsFailed;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Volume-regularized NMF for hyperspectral unmixing"};
    app.require_subcommand(1);
    app.set_version_flag("--version", VRNMF_VERSION);

    UnmixArgs unmix;
    auto* unmix_cmd = app.add_subcommand("unmix", "Factor X ~ WH with a volume regularizer");
    unmix_cmd->add_option("--input", unmix.input, "Data matrix X (CSV, m x n)")->required();
    unmix_cmd->add_option("--rank", unmix.rank, "Number of endmembers r")->required()->check(CLI::PositiveNumber);
    unmix_cmd->add_option("--out", unmix.out, "Output directory")->required();
    unmix_cmd->add_option("--truth", unmix.truth, "Reference endmembers (CSV, m x r) for MRSA");
    unmix.solver.add_to(*unmix_cmd, true);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic mixtures from endmembers");
    synth_cmd->add_option("--endmembers", synth.endmembers, "Endmember matrix W (CSV, m x r)")->required();
    synth_cmd->add_option("--out", synth.out, "Output directory")->required();
    synth_cmd->add_option("--n", synth.n, "Number of pixels")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--purity", synth.purity, "Comma separated purity caps p_1,...,p_r (default all 1)");
    synth_cmd->add_option("--alpha", synth.alpha, "Dirichlet parameter")->check(CLI::PositiveNumber);
    synth_cmd->add_option("--sigma", synth.sigma, "Gaussian noise standard deviation")
        ->check(CLI::NonNegativeNumber);
    synth_cmd->add_flag("--noise-variance", synth.noise_is_variance, "Interpret --sigma as a variance");
    synth_cmd->add_option("--seed", synth.seed, "Random seed");
    synth_cmd->add_option("--max-resamples", synth.max_resamples, "Total Dirichlet draws allowed");

    TuneArgs tune;
    auto* tune_cmd = app.add_subcommand("tune", "Tune lambda by bisection against known endmembers");
    tune_cmd->add_option("--input", tune.input, "Data matrix X (CSV)")->required();
    tune_cmd->add_option("--truth", tune.truth, "Reference endmembers (CSV, m x r)")->required();
    tune_cmd->add_option("--out", tune.out, "Output directory")->required();
    tune_cmd->add_option("--rank", tune.rank, "Rank (default: columns of --truth)");
    tune_cmd->add_option("--lower", tune.tune.lower, "Lower end of the lambda~ interval");
    tune_cmd->add_option("--upper", tune.tune.upper, "Upper end of the lambda~ interval");
    tune_cmd->add_option("--max-rounds", tune.tune.max_rounds, "Bisection rounds")->check(CLI::NonNegativeNumber);
    tune_cmd->add_option("--tol", tune.tune.improvement_tol, "Stop when midpoint MRSA changes by at most this");
    tune_cmd->add_option("--grid", tune.grid, "Use an equally spaced grid of this many points instead");
    tune.solver.add_to(*tune_cmd, false);

    ScoreArgs score;
    auto* score_cmd = app.add_subcommand("score", "MRSA, recovery curves and segmentation maps");
    score_cmd->add_option("--estimate", score.estimate, "Estimated endmembers (CSV)");
    score_cmd->add_option("--truth", score.truth, "Reference endmembers (CSV)");
    score_cmd->add_option("--scores", score.scores, "CSV of MRSA values (header column --scores-column)");
    score_cmd->add_option("--scores-column", score.scores_column, "Column to read when --scores has a header");
    score_cmd->add_option("--thresholds", score.thresholds, "Comma separated ascending thresholds");
    score_cmd->add_option("--curve", score.curve, "Write the recovery curve CSV here");
    score_cmd->add_option("--abundances", score.abundances, "Abundance matrix H (CSV, r x n)");
    score_cmd->add_option("--width", score.width, "Image width");
    score_cmd->add_option("--height", score.height, "Image height");
    score_cmd->add_option("--segment", score.segment, "Write the label grid here");
    score_cmd->add_option("--ppm", score.ppm, "Write a PPM rendering of the label grid here");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run a recovery benchmark sweep");
    bench_cmd->add_option("--config", bench.config, "Bench config (JSON)")->required();
    bench_cmd->add_option("--out", bench.out, "Output directory")->required();
    bench_cmd->add_option("--threads", bench.threads, "Parallel trials (0 = VRNMF_THREADS or hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n";
        const CLI::App* failing = &app;
        for (auto* sub : app.get_subcommands()) failing = sub;
        std::cerr << failing->help();
        return kBadArguments;
    }

    try {
        if (*unmix_cmd) return cmd_unmix(unmix);
        if (*synth_cmd) return cmd_synth(synth);
        if (*tune_cmd) return cmd_tune(tune);
        if (*score_cmd) return cmd_score(score);
        if (*bench_cmd) return cmd_bench(bench);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kBadArguments;
}

}  // namespace vrnmf::cli
