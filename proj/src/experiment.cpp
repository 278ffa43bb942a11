#include "chemobound/harness.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace chemobound {

namespace {

using ordered_json = nlohmann::ordered_json;

// JSON has no infinities; those become strings.
ordered_json real(double x) {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

ordered_json config_json(const RunConfig& cfg) {
    ordered_json j;
    const GridSpec& g = cfg.grid;
    std::vector<int> cells(g.cell_counts().begin(), g.cell_counts().begin() + g.dim());
    std::vector<double> lengths(g.lengths().begin(), g.lengths().begin() + g.dim());
    j["grid"] = {{"dim", g.dim()}, {"cells", cells}, {"lengths", lengths}};
    j["model"] = {{"chi", cfg.params.chi},
                  {"mu", cfg.params.mu},
                  {"m", cfg.params.m},
                  {"c_d", cfg.params.c_d},
                  {"lambda0", cfg.params.lambda0}};
    const SolverConfig& s = cfg.solver;
    j["solver"] = {{"dt_init", s.dt_init},
                   {"dt_max", s.dt_max},
                   {"cfl_safety", s.cfl_safety},
                   {"t_end", s.t_end},
                   {"snapshot_every", s.snapshot_every},
                   {"max_linear_iters", s.max_linear_iters},
                   {"linear_tol", s.linear_tol},
                   {"positivity_tol", s.positivity_tol},
                   {"max_halvings", s.max_halvings}};
    const DiagConfig& d = cfg.diag;
    j["diagnostics"] = {{"p_list", d.p_list},
                        {"beta_list", d.beta_list},
                        {"tau", d.tau},
                        {"entropy_floor", d.entropy_floor},
                        {"window_fraction", d.window_fraction},
                        {"plateau_tol", d.plateau_tol},
                        {"growth_factor", d.growth_factor},
                        {"slope_tol", d.slope_tol}};
    const InitialCondition& ic = cfg.initial;
    ordered_json init{{"generator", ic.generator}};
    if (ic.generator == "uniform") {
        init["u"] = ic.u;
        init["v"] = ic.v;
    } else if (ic.generator == "gaussian-bump") {
        std::vector<double> center(ic.center.begin(), ic.center.begin() + g.dim());
        init["amplitude"] = ic.amplitude;
        init["width"] = ic.width;
        init["center"] = center;
        init["background"] = ic.background;
        init["v"] = ic.v;
    } else {
        init["u"] = ic.u;
        init["v"] = ic.v;
        init["amplitude"] = ic.amplitude;
        init["v_amplitude"] = ic.v_amplitude;
    }
    j["initial"] = init;
    j["run"] = {{"output_dir", cfg.output_dir.generic_string()},
                {"seed", cfg.seed},
                {"write_snapshots", cfg.write_snapshots}};
    return j;
}

}  // namespace

std::string manifest_json(const RunConfig& cfg, const ExperimentResult& result) {
    ordered_json j;
    j["version"] = CHEMOBOUND_VERSION;
    j["seed"] = cfg.seed;
    j["config"] = config_json(cfg);
    const Trajectory& traj = result.trajectory;
    j["status"] = to_string(traj.status);
    j["failure"] = traj.failure;
    j["final_time"] = traj.final_time;
    j["accepted_steps"] = traj.accepted_steps;
    j["rejected_steps"] = traj.rejected_steps;
    j["snapshot_times"] = ordered_json::array();
    for (const auto& s : traj.snapshots) j["snapshot_times"].push_back(s.t);
    const RunOutcome& o = result.outcome;
    j["outcome"] = {{"verdict", to_string(o.verdict)},
                    {"peak_sup_u", real(o.peak_sup_u)},
                    {"plateau_ratio", real(o.plateau_ratio)},
                    {"log_slope", real(o.log_slope)},
                    {"v_max_principle_ok", o.v_max_principle_ok},
                    {"entropy_peak", real(o.entropy_peak)},
                    {"growth_ratio", real(o.growth_ratio)},
                    {"complete", o.complete}};
    j["sup_v0"] = result.sup_v0;
    j["threshold_m"] = real(result.threshold_m);
    j["margin"] = real(result.margin);
    j["max_mass_defect"] = real(result.max_mass_defect);
    j["nonnegative"] = result.nonnegative;
    return j.dump(2) + "\n";
}

ExperimentResult run_experiment(const RunConfig& cfg, bool persist) {
    cfg.validate();
    ExperimentResult result;
    const State initial = make_initial(cfg.initial, cfg.grid, cfg.seed);
    DiagRecorder recorder(cfg.params, cfg.diag);
    result.trajectory = run(initial, cfg.params, cfg.solver, recorder.hooks());
    result.max_mass_defect = recorder.max_mass_defect();
    result.nonnegative = recorder.nonnegative();
    result.series = recorder.take_series();
    result.outcome = classify_run(result.series, cfg.solver.t_end, result.trajectory.status, cfg.diag);
    result.sup_v0 = initial.v.max();
    result.threshold_m = threshold_m(cfg.params, result.sup_v0, cfg.grid.dim());
    result.margin = cfg.params.m - result.threshold_m;

    if (persist) {
        const std::filesystem::path dir = resolve_output_dir(cfg.output_dir);
        result.output_dir = dir;
        write_text_file(dir / "series.csv", series_csv(result.series));
        write_text_file(dir / "windows.csv", windows_csv(result.series));
        if (cfg.write_snapshots) {
            const auto& snaps = result.trajectory.snapshots;
            for (std::size_t k = 0; k < snaps.size(); ++k) {
                char name[32];
                std::snprintf(name, sizeof name, "snap_%04zu.bin", k);
                write_snapshot(dir / "snapshots" / name, snaps[k]);
            }
        }
        write_text_file(dir / "manifest.json", manifest_json(cfg, result));
    }
    return result;
}

}  // namespace chemobound
