#pragma once

#include <optional>
#include <string>

#include "nlazf/simulation.hpp"

namespace nlazf {

/// Bad or missing configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure (CLI exit code 3).
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

std::string tool_version();

/// Command-line values that take precedence over file values.
struct ConfigOverrides {
    std::optional<int> m;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<std::string> precoder;  // "zf", "nlazf" or "both"
};

/// Reads a JSON sweep configuration, applies defaults and overrides, and
/// validates. Errors name the offending key.
SimConfig parse_config(const std::string& path, const ConfigOverrides& overrides = {});
SimConfig parse_config_text(const std::string& text, const ConfigOverrides& overrides = {});

/// Exact JSON echo of a resolved configuration; parse_config_text of this
/// string reproduces the identical SimConfig.
std::string config_to_json_text(const SimConfig& config);

/// 17-significant-digit decimal form; parses back to the identical double.
std::string format_double(double value);

std::string sweep_csv_text(const SweepResult& result, bool linear_output = false);
std::string table_csv_text(const SweepResult& result);

struct ManifestInfo {
    std::string sweep_csv_path;
    std::string table_csv_path;
    int threads = 1;
    double wall_clock_seconds = 0.0;
};

std::string manifest_text(const SweepResult& result, const ManifestInfo& info);

/// Resolved configuration embedded in a manifest produced by manifest_text.
SimConfig manifest_config(const std::string& manifest_json_text);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// Single-instance solve request (explicit channel and PA array).
struct SolveSpec {
    Eigen::MatrixXcd channel;
    std::vector<PACoefficients> pa;
    std::vector<double> power;
    double tol = 1e-4;
    std::optional<int> max_iter;  // default depends on the algorithm
    int algorithm = 2;            // 1 or 2
    std::optional<double> eps;    // algorithm 1 step size
};

SolveSpec parse_solve_config(const std::string& path);
SolveSpec parse_solve_config_text(const std::string& text);

}  // namespace nlazf
