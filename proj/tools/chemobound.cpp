#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "chemobound/config.hpp"
#include "chemobound/harness.hpp"
#include "chemobound/oracle.hpp"

using namespace chemobound;

namespace {

enum Exit { kOk = 0, kInvalidInput = 1, kIoFailure = 2, kInternal = 3 };

int cmd_run(const std::string& path) {
    const RunConfig cfg = load_config(path);
    const ExperimentResult r = run_experiment(cfg);
    std::cout << "status: " << to_string(r.trajectory.status) << "\n"
              << "verdict: " << to_string(r.outcome.verdict) << "\n"
              << "peak_sup_u: " << r.outcome.peak_sup_u << "\n"
              << "threshold_m: " << r.threshold_m << " margin: " << r.margin << "\n"
              << "output: " << r.output_dir.string() << "\n";
    return kOk;
}

int cmd_sweep(const std::string& path, int jobs) {
    const SweepSpec spec = load_sweep_spec(path);
    std::cout << "sweep: " << spec.size() << " runs, " << jobs << " jobs\n" << std::flush;
    const SweepResult result = run_sweep(spec, jobs);
    std::cout << sweep_summary(spec, result) << "output: " << resolve_output_dir(spec.base.output_dir).string()
              << "\n";
    return kOk;
}

int cmd_oracle(const std::string& which) {
    const GridSpec grid = GridSpec::square(4, 1.0);
    const double horizon = 5.0, dt = 0.01;
    bool all_ok = true;
    bool matched = false;
    for (double u0 : {0.0, 0.5, 1.0, 2.0}) {
        char name[32];
        std::snprintf(name, sizeof name, "homogeneous-%g", u0);
        if (!which.empty() && which != name) continue;
        matched = true;
        const HomogeneousCheck c = homogeneous_check(u0, 1.0, 1.0, horizon, dt, grid);
        const bool ok = c.status == RunStatus::Completed && c.max_error <= 5.0 * dt &&
                        (c.max_error == 0.0 || c.order >= 0.9);
        all_ok = all_ok && ok;
        std::printf("%-16s dt=%g max_error=%.3e max_error(dt/2)=%.3e order=%.3f %s\n", name, dt, c.max_error,
                    c.max_error_half, c.order, ok ? "ok" : "FAILED");
    }
    if (!matched) {
        std::cerr << "unknown oracle case '" << which << "'\n";
        return kInvalidInput;
    }
    return all_ok ? kOk : kInternal;
}

int cmd_mms(const std::string& which, int levels) {
    if (levels < 2) {
        std::cerr << "--levels must be at least 2\n";
        return kInvalidInput;
    }
    std::vector<MMSCase> cases;
    if (which.empty()) {
        cases = mms_cases();
    } else {
        cases.push_back(mms_case(which));
    }
    for (const auto& c : cases) {
        const MMSStudy s = mms_study(c, c.params, levels, c.dim == 1 ? 32 : 16);
        std::printf("%s (dim %d, m=%g, chi=%g, mu=%g)\n", c.name.c_str(), c.dim, c.params.m, c.params.chi, c.params.mu);
        for (std::size_t k = 0; k < s.levels.size(); ++k) {
            const auto& lv = s.levels[k];
            std::printf("  n=%-4d h=%.4e dt=%.3e err_u=%.4e err_v=%.4e", lv.cells, lv.h, lv.dt, lv.error_u, lv.error_v);
            if (k > 0) std::printf(" order_u=%.3f", s.orders_u[k - 1]);
            std::printf("\n");
        }
        std::printf("  fitted order_u=%.3f\n", s.fitted_order_u);
    }
    return kOk;
}

int cmd_plot(const std::string& path, const std::string& kind, const std::string& out) {
    const std::string text = read_text_file(path);
    const std::filesystem::path dir = out.empty() ? std::filesystem::path(path).parent_path() : std::filesystem::path(out);
    const PlotReport report = emit_plots(text, kind == "series" ? PlotKind::Series : PlotKind::Sweep, dir);
    if (report.sup_v_nonincreasing) {
        std::cout << "sup_v nonincreasing: " << (*report.sup_v_nonincreasing ? "yes" : "NO") << "\n";
    }
    for (const auto& f : report.files) std::cout << "wrote " << f.string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-volume chemotaxis simulator with boundedness diagnostics"};
    app.set_version_flag("--version", std::string(CHEMOBOUND_VERSION));
    app.require_subcommand(1);

    std::string config_path;
    auto* run_cmd = app.add_subcommand("run", "Run one configuration");
    run_cmd->add_option("config", config_path, "Run configuration file")->required();

    std::string sweep_path;
    int jobs = 1;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep");
    sweep_cmd->add_option("spec", sweep_path, "Sweep specification file")->required();
    sweep_cmd->add_option("--jobs,-j", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

    std::string oracle_case;
    auto* oracle_cmd = app.add_subcommand("oracle-check", "Compare homogeneous runs with the closed form");
    oracle_cmd->add_option("--case", oracle_case, "homogeneous-0, homogeneous-0.5, homogeneous-1 or homogeneous-2");

    std::string mms_name;
    int levels = 3;
    auto* mms_cmd = app.add_subcommand("mms", "Manufactured-solution convergence study");
    mms_cmd->add_option("--case", mms_name, "steady, cos1d-heat, cos1d-porous, cos1d-chemo or cos2d");
    mms_cmd->add_option("--levels", levels, "Number of refinement levels");

    std::string csv_path, kind, plot_out;
    auto* plot_cmd = app.add_subcommand("plot", "Render SVG plots from a series or sweep CSV");
    plot_cmd->add_option("csv", csv_path, "CSV file")->required();
    plot_cmd->add_option("--kind", kind, "series or sweep")->required()->check(CLI::IsMember({"series", "sweep"}));
    plot_cmd->add_option("--out", plot_out, "Output directory (default: beside the CSV)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalidInput;
    }

    try {
        if (*run_cmd) return cmd_run(config_path);
        if (*sweep_cmd) return cmd_sweep(sweep_path, jobs);
        if (*oracle_cmd) return cmd_oracle(oracle_case);
        if (*mms_cmd) return cmd_mms(mms_name, levels);
        if (*plot_cmd) return cmd_plot(csv_path, kind, plot_out);
    } catch (const ConfigError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const SchemaError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const IoError& e) {
        std::cerr << "I/O failure: " << e.what() << "\n";
        return kIoFailure;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "I/O failure: " << e.what() << "\n";
        return kIoFailure;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}
