#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "vrnmf/driver.hpp"
#include "vrnmf/errors.hpp"
#include "vrnmf/io.hpp"
#include "vrnmf/metrics.hpp"
#include "vrnmf/solver_h.hpp"
#include "vrnmf/synth.hpp"
#include "vrnmf/tuning.hpp"

namespace py = pybind11;
using namespace vrnmf;

namespace {

RegularizerKind make_kind(const std::string& name, std::optional<double> delta) {
    RegularizerKind kind{parse_regularizer(name), std::nullopt};
    if (delta) {
        if (kind.tag != RegularizerTag::LogDet) {
            throw ContractError("delta applies to the logdet regularizer only");
        }
        kind.delta = delta;
    }
    kind.validate();
    return kind;
}

py::dict objective_dict(const ObjectiveValue& v) {
    py::dict d;
    d["fit"] = v.fit;
    d["volume"] = v.volume;
    d["lambda"] = v.lambda;
    d["total"] = v.total;
    return d;
}

SolverConfig make_config(const std::string& regularizer, double lam, std::optional<double> delta, int outer_iters,
                         int inner_iters, int h_iters, double h_tol, std::uint64_t seed, int trace_every,
                         std::optional<double> early_exit, int threads) {
    SolverConfig cfg;
    cfg.kind = make_kind(regularizer, delta);
    cfg.lambda = lam;
    cfg.outer_iters = outer_iters;
    cfg.w_inner_iters = inner_iters;
    cfg.h_opts.max_iters = h_iters;
    cfg.h_opts.rel_tol = h_tol;
    cfg.seed = seed;
    cfg.trace_every = trace_every;
    cfg.early_exit_rel_change = early_exit;
    cfg.threads = threads;
    return cfg;
}

py::dict tune_dict(const TuneResult& t) {
    py::dict d;
    d["lambda_tilde"] = t.lambda_tilde;
    d["lambda"] = t.lambda;
    d["mrsa"] = t.mrsa;
    d["lambda_scale"] = t.lambda_scale;
    d["rounds"] = t.bisection_rounds;
    py::list evals;
    for (const auto& e : t.evaluations) {
        py::dict item;
        item["lambda_tilde"] = e.lambda_tilde;
        item["mrsa"] = e.mrsa;
        item["failed"] = e.failed;
        evals.append(item);
    }
    d["evaluations"] = evals;
    return d;
}

}  // namespace

PYBIND11_MODULE(_vrnmf, m) {
    m.doc() = "Volume-regularized nonnegative matrix factorization";
    m.attr("__version__") = VRNMF_VERSION;

    static py::exception<Error> base(m, "VrnmfError", PyExc_RuntimeError);
    static py::exception<DimensionError> dim(m, "DimensionError", base.ptr());
    static py::exception<ContractError> contract(m, "ContractError", base.ptr());
    static py::exception<DegeneracyError> degeneracy(m, "DegeneracyError", base.ptr());
    static py::exception<UndefinedError> undefined(m, "UndefinedError", base.ptr());
    static py::exception<InfeasibleError> infeasible(m, "InfeasibleError", base.ptr());
    static py::exception<IoError> io_error(m, "IoError", base.ptr());
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const DimensionError& e) {
            py::set_error(dim, e.what());
        } catch (const ContractError& e) {
            py::set_error(contract, e.what());
        } catch (const DegeneracyError& e) {
            py::set_error(degeneracy, e.what());
        } catch (const UndefinedError& e) {
            py::set_error(undefined, e.what());
        } catch (const InfeasibleError& e) {
            py::set_error(infeasible, e.what());
        } catch (const IoError& e) {
            py::set_error(io_error, e.what());
        } catch (const Error& e) {
            py::set_error(base, e.what());
        }
    });

    m.def("project_simplex", &project_simplex, py::arg("h"),
          "Euclidean projection onto {h >= 0, sum(h) <= 1}.");
    m.def("svt", &svt, py::arg("y"), py::arg("theta"), "Singular value soft-thresholding.");
    m.def(
        "null_space_basis", [](const DenseMatrix& a) { return null_space_basis(a); }, py::arg("a"),
        "Orthonormal basis of the orthogonal complement of range(a).");
    m.def(
        "spectral_norm_sq", [](const DenseMatrix& a) { return spectral_norm_sq(a); }, py::arg("a"),
        "Largest eigenvalue of a symmetric PSD matrix.");

    m.def(
        "eval_volume",
        [](const DenseMatrix& w, const std::string& regularizer, std::optional<double> delta) {
            RegularizerKind kind = make_kind(regularizer, delta);
            return eval_volume(w, resolve_kind(kind, w));
        },
        py::arg("w"), py::arg("regularizer") = "det", py::arg("delta") = py::none());
    m.def(
        "eval_objective",
        [](const DenseMatrix& x, const DenseMatrix& w, const DenseMatrix& h, double lam,
           const std::string& regularizer, std::optional<double> delta) {
            RegularizerKind kind = make_kind(regularizer, delta);
            return objective_dict(eval_objective(x, w, h, lam, resolve_kind(kind, w)));
        },
        py::arg("x"), py::arg("w"), py::arg("h"), py::arg("lam") = 0.0, py::arg("regularizer") = "det",
        py::arg("delta") = py::none());

    m.def(
        "solve_h",
        [](const DenseMatrix& w, const DenseMatrix& x, std::optional<DenseMatrix> h0, int max_iters, double rel_tol,
           int threads) {
            ApgOptions opts;
            opts.max_iters = max_iters;
            opts.rel_tol = rel_tol;
            const DenseMatrix start = h0 ? *h0 : DenseMatrix::Zero(w.cols(), x.cols());
            py::gil_scoped_release release;
            return solve_h(w, x, start, opts, threads);
        },
        py::arg("w"), py::arg("x"), py::arg("h0") = py::none(), py::arg("max_iters") = 300,
        py::arg("rel_tol") = 1e-8, py::arg("threads") = 1,
        "Column-wise least squares over the unit simplex.");

    m.def(
        "spa_init",
        [](const DenseMatrix& x, Eigen::Index r) {
            const SpaResult s = spa_init(x, r);
            return py::make_tuple(s.w0, s.indices);
        },
        py::arg("x"), py::arg("r"), "Successive projection: returns (W0, column indices).");

    m.def(
        "run",
        [](const DenseMatrix& x, Eigen::Index r, const std::string& regularizer, double lam,
           std::optional<double> lambda_tilde, std::optional<double> delta, int outer_iters, int inner_iters,
           int h_iters, double h_tol, std::uint64_t seed, int trace_every, std::optional<double> early_exit,
           int threads) {
            SolverConfig cfg = make_config(regularizer, lam, delta, outer_iters, inner_iters, h_iters, h_tol, seed,
                                           trace_every, early_exit, threads);
            RunResult result;
            {
                py::gil_scoped_release release;
                const FactorPair start = initialize(x, r, cfg.h_opts, cfg.threads);
                cfg.kind = resolve_kind(cfg.kind, start.w);
                if (lambda_tilde) {
                    cfg.lambda = *lambda_tilde * lambda_scale(x, start, cfg.kind);
                }
                result = run_from(x, start, cfg);
            }
            py::dict d;
            d["w"] = result.factors.w;
            d["h"] = result.factors.h;
            d["status"] = std::string(to_string(result.status));
            d["iterations"] = result.iterations;
            d["lambda"] = cfg.lambda;
            d["delta"] = result.kind.delta ? py::cast(*result.kind.delta) : py::none();
            py::list trace;
            for (const auto& p : result.trace) {
                py::dict item = objective_dict(p.objective);
                item["iteration"] = p.iteration;
                item["seconds"] = p.seconds;
                trace.append(item);
            }
            d["trace"] = trace;
            d["warnings"] = result.warnings;
            return d;
        },
        py::arg("x"), py::arg("r"), py::kw_only(), py::arg("regularizer") = "det", py::arg("lam") = 0.0,
        py::arg("lambda_tilde") = py::none(), py::arg("delta") = py::none(), py::arg("outer_iters") = 300,
        py::arg("inner_iters") = 50, py::arg("h_iters") = 300, py::arg("h_tol") = 1e-8, py::arg("seed") = 0,
        py::arg("trace_every") = 1, py::arg("early_exit") = py::none(), py::arg("threads") = 1,
        "Factor X ~ WH from the SPA start. lambda_tilde overrides lam with lambda_tilde * fit/|volume| at the start.");

    m.def(
        "synth_generate",
        [](const DenseMatrix& w_true, Eigen::Index n, const Vector& purity, double alpha, double sigma,
           bool noise_is_variance, std::uint64_t seed, std::optional<std::int64_t> max_resamples) {
            SyntheticSpec spec;
            spec.w_true = w_true;
            spec.n = n;
            spec.purity = purity;
            spec.dirichlet_alpha = alpha;
            spec.noise_sigma = sigma;
            spec.noise_is_variance = noise_is_variance;
            spec.seed = seed;
            spec.max_resamples = max_resamples;
            SyntheticData data;
            {
                py::gil_scoped_release release;
                data = synth_generate(spec);
            }
            py::dict d;
            d["x"] = data.x;
            d["h_true"] = data.h_true;
            d["draws"] = data.draws;
            d["acceptance_rate"] = data.acceptance_rate;
            return d;
        },
        py::arg("w_true"), py::arg("n"), py::arg("purity"), py::kw_only(), py::arg("alpha") = 0.1,
        py::arg("sigma") = 0.0, py::arg("noise_is_variance") = false, py::arg("seed") = 0,
        py::arg("max_resamples") = py::none());

    m.def(
        "mrsa_pair", [](const Vector& x, const Vector& y) { return mrsa_pair(x, y); }, py::arg("x"), py::arg("y"));
    m.def(
        "mrsa_matched",
        [](const DenseMatrix& w, const DenseMatrix& w_true) {
            const MatchedScore s = mrsa_matched(w, w_true);
            return py::make_tuple(s.score, s.permutation, s.pair_scores);
        },
        py::arg("w"), py::arg("w_true"), "Mean MRSA under the optimal column matching: (score, permutation, pairs).");

    m.def(
        "tune_lambda",
        [](const DenseMatrix& x, const DenseMatrix& w_true, Eigen::Index r, const std::string& regularizer,
           std::optional<double> delta, int outer_iters, std::uint64_t seed, double lower, double upper,
           int max_rounds, double improvement_tol, std::optional<int> grid) {
            SolverConfig cfg = make_config(regularizer, 0.0, delta, outer_iters, 50, 300, 1e-8, seed, 1,
                                           std::nullopt, 1);
            TuneOptions opts;
            opts.lower = lower;
            opts.upper = upper;
            opts.max_rounds = max_rounds;
            opts.improvement_tol = improvement_tol;
            TuneResult result;
            {
                py::gil_scoped_release release;
                if (grid) {
                    const SolverScorer scorer(x, w_true, r, cfg);
                    result = grid_search(scorer, *grid, opts);
                    result.lambda_scale = scorer.lambda_scale;
                    result.lambda = result.lambda_tilde * scorer.lambda_scale;
                } else {
                    result = tune_lambda(x, w_true, r, cfg, opts);
                }
            }
            return tune_dict(result);
        },
        py::arg("x"), py::arg("w_true"), py::arg("r"), py::kw_only(), py::arg("regularizer") = "det",
        py::arg("delta") = py::none(), py::arg("outer_iters") = 300, py::arg("seed") = 0, py::arg("lower") = 1e-6,
        py::arg("upper") = 0.5, py::arg("max_rounds") = 20, py::arg("improvement_tol") = 1e-4,
        py::arg("grid") = py::none(), "Pick lambda_tilde minimizing MRSA by greedy bisection or a uniform grid.");

    m.def("recovery_curve", &recovery_curve, py::arg("scores"), py::arg("thresholds"));
    m.def("segmentation_map", &segmentation_map, py::arg("h"), py::arg("width"), py::arg("height"));

    m.def(
        "read_matrix", [](const std::string& path) { return io::read_matrix(path); }, py::arg("path"));
    m.def(
        "write_matrix", [](const std::string& path, const DenseMatrix& a) { io::write_matrix(path, a); },
        py::arg("path"), py::arg("a"));
}
