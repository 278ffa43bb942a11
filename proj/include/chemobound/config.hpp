#pragma once

/// @file config.hpp
/// @brief Strict INI-style run configuration.
///
///   # comment
///   [grid]
///   cells = 64, 64
///   [model]
///   chi = 1
///   ...
///
/// Unknown sections or keys are errors. Errors carry the offending line.

#include <array>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemobound/diagnostics.hpp"
#include "chemobound/grid.hpp"
#include "chemobound/model.hpp"
#include "chemobound/stepper.hpp"

namespace chemobound {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct IniEntry {
    std::string key;
    std::string value;
    int line = 0;
};

struct IniSection {
    std::string name;
    int line = 0;
    std::vector<IniEntry> entries;
};

/// Parses sections of `key = value` lines. Throws ConfigError with line info.
std::vector<IniSection> parse_ini(const std::string& text);

double parse_real(const std::string& text, const std::string& field, int line);
long parse_integer(const std::string& text, const std::string& field, int line);
std::vector<double> parse_real_list(const std::string& text, const std::string& field, int line);

/// Named initial-data generator with its parameters.
struct InitialCondition {
    std::string generator = "uniform";  ///< uniform | gaussian-bump | random-perturbation
    double u = 1.0;                     ///< uniform / random-perturbation base density
    double v = 1.0;                     ///< chemoattractant level
    double amplitude = 10.0;            ///< bump height or u noise amplitude
    double width = 0.1;                 ///< bump standard deviation
    std::array<double, 3> center{-1.0, -1.0, -1.0};  ///< negative: domain center
    double background = 0.0;            ///< density added under the bump
    double v_amplitude = 0.0;           ///< v noise amplitude (random-perturbation)
};

struct RunConfig {
    GridSpec grid;
    ModelParams params;
    SolverConfig solver;
    DiagConfig diag;
    InitialCondition initial;
    std::filesystem::path output_dir = "out";
    unsigned long long seed = 0;
    bool write_snapshots = true;

    void validate() const;
};

RunConfig parse_run_config(const std::vector<IniSection>& sections);
RunConfig load_config(const std::filesystem::path& path);

/// Reads a whole file; throws IoError.
std::string read_text_file(const std::filesystem::path& path);

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Environment variable that, when set, prefixes relative output directories.
inline constexpr const char* kOutputRootEnv = "CHEMOBOUND_OUTPUT_ROOT";
std::filesystem::path resolve_output_dir(const std::filesystem::path& dir);

}  // namespace chemobound
