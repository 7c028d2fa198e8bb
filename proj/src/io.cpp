#include "vrnmf/io.hpp"

#include <array>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vrnmf::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", value);
    return buf.data();
}

namespace {

double parse_double(const std::string& token, const fs::path& path, std::size_t line) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || begin == end) {
        throw IoError(path.string() + ":" + std::to_string(line) + ": cannot parse '" + token + "' as a number");
    }
    return value;
}

}  // namespace

DenseMatrix read_matrix(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string token;
        while (std::getline(ss, token, ',')) {
            row.push_back(parse_double(token, path, line_no));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                          std::to_string(rows.front().size()) + " values, found " + std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw IoError(path.string() + ": no data");
    }
    DenseMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
    }
    if (!m.allFinite()) {
        throw IoError(path.string() + ": contains NaN or Inf");
    }
    return m;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << text;
    if (!out) {
        throw IoError("write to " + path.string() + " failed");
    }
}

void write_matrix(const fs::path& path, const DenseMatrix& m) {
    std::string text;
    text.reserve(static_cast<std::size_t>(m.size()) * 24);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) text += ',';
            text += format_double(m(i, j));
        }
        text += '\n';
    }
    write_text(path, text);
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

void write_trace(const fs::path& path, const ConvergenceTrace& trace) {
    std::string text = "iteration,fit,volume,lambda,total,seconds\n";
    for (const auto& p : trace) {
        text += std::to_string(p.iteration) + ',' + format_double(p.objective.fit) + ',' +
                format_double(p.objective.volume) + ',' + format_double(p.objective.lambda) + ',' +
                format_double(p.objective.total) + ',' + format_double(p.seconds) + '\n';
    }
    write_text(path, text);
}

std::string format_labels(const LabelGrid& labels) {
    std::string text;
    for (Eigen::Index i = 0; i < labels.rows(); ++i) {
        for (Eigen::Index j = 0; j < labels.cols(); ++j) {
            if (j > 0) text += ' ';
            text += std::to_string(labels(i, j));
        }
        text += '\n';
    }
    return text;
}

void write_label_ppm(const fs::path& path, const LabelGrid& labels) {
    static constexpr std::array<std::array<int, 3>, 12> palette{{
        {{31, 119, 180}},
        {{255, 127, 14}},
        {{44, 160, 44}},
        {{214, 39, 40}},
        {{148, 103, 189}},
        {{140, 86, 75}},
        {{227, 119, 194}},
        {{127, 127, 127}},
        {{188, 189, 34}},
        {{23, 190, 207}},
        {{255, 255, 255}},
        {{0, 0, 0}},
    }};
    std::string text = "P3\n" + std::to_string(labels.cols()) + " " + std::to_string(labels.rows()) + "\n255\n";
    for (Eigen::Index i = 0; i < labels.rows(); ++i) {
        for (Eigen::Index j = 0; j < labels.cols(); ++j) {
            const auto& c = palette[static_cast<std::size_t>((labels(i, j) - 1) % 12)];
            text += std::to_string(c[0]) + ' ' + std::to_string(c[1]) + ' ' + std::to_string(c[2]);
            text += (j + 1 == labels.cols()) ? '\n' : ' ';
        }
    }
    write_text(path, text);
}

json to_json(const SolverConfig& cfg) {
    json doc;
    doc["lambda"] = cfg.lambda;
    doc["regularizer"] = std::string(to_string(cfg.kind.tag));
    doc["delta"] = cfg.kind.delta ? json(*cfg.kind.delta) : json(nullptr);
    doc["outer_iters"] = cfg.outer_iters;
    doc["h_max_iters"] = cfg.h_opts.max_iters;
    doc["h_rel_tol"] = cfg.h_opts.rel_tol;
    doc["h_restart"] = cfg.h_opts.restart;
    doc["w_inner_iters"] = cfg.w_inner_iters;
    doc["w_rel_tol"] = cfg.w_rel_tol;
    doc["seed"] = cfg.seed;
    doc["trace_every"] = cfg.trace_every;
    doc["early_exit_rel_change"] =
        cfg.early_exit_rel_change ? json(*cfg.early_exit_rel_change) : json(nullptr);
    return doc;
}

SolverConfig solver_config_from_json(const json& doc) {
    SolverConfig cfg;
    try {
        cfg.lambda = doc.value("lambda", cfg.lambda);
        cfg.kind.tag = parse_regularizer(doc.value("regularizer", std::string("det")));
        if (doc.contains("delta") && !doc["delta"].is_null()) cfg.kind.delta = doc["delta"].get<double>();
        cfg.outer_iters = doc.value("outer_iters", cfg.outer_iters);
        cfg.h_opts.max_iters = doc.value("h_max_iters", cfg.h_opts.max_iters);
        cfg.h_opts.rel_tol = doc.value("h_rel_tol", cfg.h_opts.rel_tol);
        cfg.h_opts.restart = doc.value("h_restart", cfg.h_opts.restart);
        cfg.w_inner_iters = doc.value("w_inner_iters", cfg.w_inner_iters);
        cfg.w_rel_tol = doc.value("w_rel_tol", cfg.w_rel_tol);
        cfg.seed = doc.value("seed", cfg.seed);
        cfg.trace_every = doc.value("trace_every", cfg.trace_every);
        if (doc.contains("early_exit_rel_change") && !doc["early_exit_rel_change"].is_null()) {
            cfg.early_exit_rel_change = doc["early_exit_rel_change"].get<double>();
        }
    } catch (const json::exception& e) {
        throw ContractError(std::string("solver config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json to_json(const ObjectiveValue& value) {
    return {{"fit", value.fit}, {"volume", value.volume}, {"lambda", value.lambda}, {"total", value.total}};
}

json to_json(const ConvergenceTrace& trace) {
    json arr = json::array();
    for (const auto& p : trace) {
        json item = to_json(p.objective);
        item["iteration"] = p.iteration;
        item["seconds"] = p.seconds;
        arr.push_back(std::move(item));
    }
    return arr;
}

json to_json(const TuneResult& result) {
    json evals = json::array();
    for (const auto& e : result.evaluations) {
        evals.push_back({{"lambda_tilde", e.lambda_tilde}, {"mrsa", e.mrsa}, {"failed", e.failed}});
    }
    return {{"lambda_tilde", result.lambda_tilde},
            {"lambda", result.lambda},
            {"lambda_scale", result.lambda_scale},
            {"mrsa", result.mrsa},
            {"bisection_rounds", result.bisection_rounds},
            {"evaluations", evals}};
}

json to_json(const SyntheticSpec& spec) {
    std::vector<double> purity(spec.purity.data(), spec.purity.data() + spec.purity.size());
    json doc;
    doc["m"] = spec.w_true.rows();
    doc["r"] = spec.w_true.cols();
    doc["n"] = spec.n;
    doc["purity"] = purity;
    doc["dirichlet_alpha"] = spec.dirichlet_alpha;
    doc["noise_sigma"] = spec.noise_sigma;
    doc["noise_is_variance"] = spec.noise_is_variance;
    doc["seed"] = spec.seed;
    doc["max_resamples"] = spec.max_resamples.value_or(1000 * static_cast<std::int64_t>(spec.n));
    return doc;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        try {
            out.push_back(parse_double(token, "<argument>", 1));
        } catch (const IoError& e) {
            throw ContractError(e.what());
        }
    }
    return out;
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw IoError("cannot create directory " + dir.string() + (ec ? ": " + ec.message() : ""));
    }
}

}  // namespace vrnmf::io
