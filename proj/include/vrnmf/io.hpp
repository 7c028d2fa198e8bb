#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "vrnmf/driver.hpp"
#include "vrnmf/metrics.hpp"
#include "vrnmf/synth.hpp"
#include "vrnmf/tuning.hpp"

namespace vrnmf::io {

/// Plain CSV: one matrix row per line, comma separated, no header, values
/// printed with 17 significant digits, LF line endings.
DenseMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const DenseMatrix& m);

/// Format used by write_matrix for a single value.
std::string format_double(double value);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
void write_text(const std::filesystem::path& path, const std::string& text);

/// Iteration, fit, volume, lambda, total, seconds.
void write_trace(const std::filesystem::path& path, const ConvergenceTrace& trace);

/// Space separated integer labels, one grid row per line.
std::string format_labels(const LabelGrid& labels);
/// Plain PPM (P3) rendering with a fixed 12-color palette.
void write_label_ppm(const std::filesystem::path& path, const LabelGrid& labels);

nlohmann::json to_json(const SolverConfig& cfg);
nlohmann::json to_json(const ObjectiveValue& value);
nlohmann::json to_json(const ConvergenceTrace& trace);
nlohmann::json to_json(const TuneResult& result);
/// Spec without the endmember matrix itself (recorded by file path).
nlohmann::json to_json(const SyntheticSpec& spec);

/// Inverse of to_json(SolverConfig); missing keys keep their defaults.
SolverConfig solver_config_from_json(const nlohmann::json& doc);

/// Parse "0.9,0.8,0.7" into a vector.
std::vector<double> parse_list(const std::string& text);

void ensure_directory(const std::filesystem::path& dir);

}  // namespace vrnmf::io
