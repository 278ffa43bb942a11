#pragma once

/// @file harness.hpp
/// @brief Initial data, persistence, single runs, parameter sweeps and plots.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chemobound/config.hpp"
#include "chemobound/diagnostics.hpp"
#include "chemobound/stepper.hpp"

namespace chemobound {

/// u0, v0 >= 0 from a named generator. "random-perturbation" draws from a
/// seeded mt19937_64, so equal seeds give identical fields on every platform.
State make_initial(const InitialCondition& ic, const GridSpec& grid, std::uint64_t seed);

// ---- CSV ------------------------------------------------------------------

/// Fixed leading columns of a series CSV; u_p{p} and gradv_b{beta} follow.
const std::vector<std::string>& series_base_columns();
std::vector<std::string> series_columns(const std::vector<double>& p_list, const std::vector<double>& beta_list);

/// Series CSV text (%.17g values, '\n' line ends).
std::string series_csv(const DiagSeries& series);
/// t,window_u_sq,window_grad_v_sq,window_lap_v_sq
std::string windows_csv(const DiagSeries& series);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a column; throws SchemaError when missing.
    std::size_t column(const std::string& name) const;
};

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// RFC-4180 parse: quoted fields, doubled quotes, CRLF or LF.
CsvTable parse_csv(const std::string& text);
/// Quotes a field when it contains a comma, quote or line break.
std::string csv_field(const std::string& s);

/// Writes text to a file, creating parent directories; throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& text);

// ---- snapshots ------------------------------------------------------------

/// 64-byte little-endian header then u and v as float64, axis 0 fastest:
///   0  char[8]   magic "CHMBSNP1"
///   8  uint32    format version (1)
///   12 uint32    dim
///   16 uint32[3] cells (unused axes 1)
///   28 uint32    field count (2)
///   32 float64   time
///   40 float64[3] lengths (unused axes 1)
inline constexpr char kSnapshotMagic[9] = "CHMBSNP1";
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const std::filesystem::path& path, const State& state);
State read_snapshot(const std::filesystem::path& path);

// ---- single runs ----------------------------------------------------------

struct ExperimentResult {
    Trajectory trajectory;
    DiagSeries series;
    RunOutcome outcome;
    double sup_v0 = 0.0;
    double threshold_m = 0.0;
    double margin = 0.0;  ///< m - threshold_m
    double max_mass_defect = 0.0;
    bool nonnegative = true;
    std::filesystem::path output_dir;  ///< empty when nothing was written
};

/// Runs cfg with diagnostics hooks. When persist is set, writes series.csv,
/// windows.csv, snapshots/snap_NNNN.bin (if enabled) and manifest.json under
/// resolve_output_dir(cfg.output_dir). Solver failures are recorded, not thrown.
ExperimentResult run_experiment(const RunConfig& cfg, bool persist = true);

/// Manifest contents: full config, version, seed, status and outcome.
std::string manifest_json(const RunConfig& cfg, const ExperimentResult& result);

// ---- sweeps ---------------------------------------------------------------

/// Axes left empty take the base value. sup_v0 sets the initial v level.
struct SweepSpec {
    RunConfig base;
    std::vector<double> m;
    std::vector<double> mu;
    std::vector<double> chi;
    std::vector<double> sup_v0;
    std::vector<double> lambda0;
    std::vector<int> resolution;  ///< cells per axis
    std::vector<std::uint64_t> seeds;

    void validate() const;
    /// Number of runs, points times seeds.
    std::size_t size() const;
};

/// [sweep] section with list-valued keys m, mu, chi, sup_v0, lambda0,
/// resolution, seeds; every other section as in a run config.
SweepSpec parse_sweep_spec(const std::vector<IniSection>& sections);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

struct SweepRow {
    double m = 0.0;
    double mu = 0.0;
    double chi = 0.0;
    double sup_v0 = 0.0;
    double lambda0 = 0.0;
    int resolution = 0;
    std::uint64_t seed = 0;
    double threshold_m = 0.0;
    double margin = 0.0;
    std::string verdict;
    double peak_sup_u = 0.0;
    double entropy_peak = 0.0;
    std::string status;  ///< run status, or "error" when the run threw
    std::string error;
};

struct SweepResult {
    std::vector<SweepRow> rows;      ///< sorted by (m, mu, chi, seed, sup_v0, lambda0, resolution)
    std::vector<std::string> findings;  ///< monotonicity-in-m violations
};

/// Run configuration for a single sweep row.
RunConfig sweep_point_config(const SweepSpec& spec, const SweepRow& row);

/// Runs every point with up to `parallelism` workers. When persist is set,
/// each row writes into <output_dir>/point_NNNN and the table lands in
/// <output_dir>/sweep.csv with summary.txt beside it.
SweepResult run_sweep(const SweepSpec& spec, int parallelism, bool persist = true);

std::string sweep_csv(const SweepResult& result);
std::string sweep_summary(const SweepSpec& spec, const SweepResult& result);

/// Flags, for each group of rows differing only in m, every m whose verdict is
/// not Bounded although some smaller m in the group is.
std::vector<std::string> monotonicity_audit(const std::vector<SweepRow>& rows);

const std::vector<std::string>& sweep_columns();

// ---- plots ----------------------------------------------------------------

enum class PlotKind { Series, Sweep };

struct PlotReport {
    std::vector<std::filesystem::path> files;
    std::size_t points = 0;                   ///< data rows drawn
    std::optional<bool> sup_v_nonincreasing;  ///< series only, when data present
};

/// Renders SVG next to out_dir: series.svg (one panel per functional) or
/// sweep.svg (verdict heatmap over (m, mu/chi) with the threshold curve).
/// Throws SchemaError naming the offending column.
PlotReport emit_plots(const std::string& csv_text, PlotKind kind, const std::filesystem::path& out_dir);

std::string series_svg(const CsvTable& table, PlotReport& report);
std::string sweep_svg(const CsvTable& table, PlotReport& report);

}  // namespace chemobound
