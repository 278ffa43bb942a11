// Acceptance checks: prints one PASS/FAIL line per criterion and exits
// nonzero when any fails. Pass criterion numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "chemobound/diagnostics.hpp"
#include "chemobound/harness.hpp"
#include "chemobound/oracle.hpp"

using namespace chemobound;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

struct SuiteCase {
    std::string name;
    RunConfig cfg;
};

RunConfig base_config(int dim, double m, const std::string& data, double mu) {
    RunConfig cfg;
    cfg.grid = dim == 1 ? GridSpec::line(128) : GridSpec::square(64);
    cfg.params.chi = 1.0;
    cfg.params.mu = mu;
    cfg.params.m = m;
    cfg.solver.t_end = 10.0;
    cfg.solver.dt_max = 0.05;
    cfg.solver.snapshot_every = 1.0;
    cfg.diag.tau = DiagConfig::default_tau(cfg.solver.t_end);
    cfg.initial.generator = data;
    if (data == "gaussian-bump") {
        cfg.initial.amplitude = 10.0;
        cfg.initial.width = 0.1;
        cfg.initial.background = 0.1;
        cfg.initial.v = 1.0;
    } else {
        cfg.initial.u = 1.0;
        cfg.initial.amplitude = 0.5;
        cfg.initial.v = 1.0;
        cfg.initial.v_amplitude = 0.5;
    }
    cfg.seed = 1234;
    cfg.write_snapshots = false;
    return cfg;
}

std::vector<SuiteCase> suite() {
    std::vector<SuiteCase> cases;
    for (int dim : {1, 2}) {
        for (double m : {0.9, 1.0, 1.5, 2.0}) {
            for (const char* data : {"gaussian-bump", "random-perturbation"}) {
                cases.push_back({std::to_string(dim) + "d m=" + fmt("%g", m) + " " + data, base_config(dim, m, data, 1.0)});
            }
        }
    }
    for (int dim : {1, 2}) {
        cases.push_back({std::to_string(dim) + "d m=1.5 gaussian-bump mu=0", base_config(dim, 1.5, "gaussian-bump", 0.0)});
    }
    return cases;
}

struct SuiteRun {
    std::string name;
    bool mu_zero = false;
    double sup_v0 = 0.0;
    double max_sup_v = 0.0;
    bool nonnegative = true;
    double max_mass_defect = 0.0;
    double mass_drift = 0.0;
    RunStatus status = RunStatus::Completed;
    std::string csv;
};

const std::vector<SuiteRun>& suite_runs() {
    static std::vector<SuiteRun> runs = [] {
        std::vector<SuiteRun> out;
        for (const auto& c : suite()) {
            const ExperimentResult r = run_experiment(c.cfg, false);
            SuiteRun s;
            s.name = c.name;
            s.mu_zero = c.cfg.params.mu == 0.0;
            s.sup_v0 = r.sup_v0;
            for (const auto& rec : r.series.records()) {
                s.max_sup_v = std::max(s.max_sup_v, rec.sup_v);
                s.nonnegative = s.nonnegative && rec.min_u >= 0.0 && rec.min_v >= 0.0;
            }
            s.nonnegative = s.nonnegative && r.nonnegative;
            s.max_mass_defect = r.max_mass_defect;
            const auto& recs = r.series.records();
            s.mass_drift = std::abs(recs.back().mass - recs.front().mass) / recs.front().mass;
            s.status = r.trajectory.status;
            s.csv = series_csv(r.series);
            out.push_back(std::move(s));
        }
        return out;
    }();
    return runs;
}

Outcome criterion1() {
    const auto& runs = suite_runs();
    double worst = -1e300;
    std::string detail;
    bool ok = runs.size() >= 12;
    for (const auto& r : runs) {
        const double excess = r.max_sup_v - r.sup_v0;
        worst = std::max(worst, excess);
        if (!(excess <= 1e-12) || r.status != RunStatus::Completed) {
            ok = false;
            detail += " [" + r.name + " excess " + fmt("%.3e", excess) + " status " + to_string(r.status) + "]";
        }
    }
    return {ok, std::to_string(runs.size()) + " configs, max(sup v - sup v0) = " + fmt("%.3e", worst) + detail};
}

Outcome criterion2() {
    const auto& runs = suite_runs();
    bool ok = true;
    double worst_defect = 0.0, worst_drift = 0.0;
    std::string detail;
    for (const auto& r : runs) {
        worst_defect = std::max(worst_defect, r.max_mass_defect);
        if (!r.nonnegative) {
            ok = false;
            detail += " [" + r.name + " negative value]";
        }
        if (!(r.max_mass_defect <= 1e-10)) {
            ok = false;
            detail += " [" + r.name + " defect " + fmt("%.3e", r.max_mass_defect) + "]";
        }
        if (r.mu_zero) {
            worst_drift = std::max(worst_drift, r.mass_drift);
            if (!(r.mass_drift <= 1e-12)) {
                ok = false;
                detail += " [" + r.name + " drift " + fmt("%.3e", r.mass_drift) + "]";
            }
        }
    }
    return {ok, "min u, min v >= 0 on all steps; max step defect/(1+mass) = " + fmt("%.3e", worst_defect) +
                    "; mu=0 drift = " + fmt("%.3e", worst_drift) + detail};
}

Outcome criterion3() {
    const GridSpec g = GridSpec::square(4);
    const double dt = 0.01;
    bool ok = true;
    std::string detail;
    for (double u0 : {0.0, 0.5, 1.0, 2.0}) {
        const HomogeneousCheck c = homogeneous_check(u0, 1.0, 1.0, 5.0, dt, g);
        const bool within = c.status == RunStatus::Completed && c.max_error <= 5 * dt;
        // An exact run (u0 = 0 is a fixed point of the scheme) has no order to observe.
        const bool order_ok = c.max_error == 0.0 || c.order >= 0.9;
        ok = ok && within && order_ok;
        detail += " u0=" + fmt("%g", u0) + ": err=" + fmt("%.2e", c.max_error) + " order=" + fmt("%.3f", c.order);
    }
    return {ok, "dt=0.01, horizon 5;" + detail};
}

Outcome criterion4() {
    bool ok = true;
    std::string detail;
    for (const char* name : {"cos1d-heat", "cos1d-porous", "cos1d-chemo"}) {
        const MMSCase c = mms_case(name);
        const MMSStudy s = mms_study(c, c.params, 3, 32);
        const double need = c.params.chi > 0.0 ? 0.9 : 1.8;
        double lowest = 1e300;
        for (double o : s.orders_u) lowest = std::min(lowest, o);
        const bool pass = lowest >= need && s.fitted_order_u >= need;
        ok = ok && pass;
        detail += std::string(" ") + name + " (m=" + fmt("%g", c.params.m) + ", chi=" + fmt("%g", c.params.chi) +
                  "): orders " + fmt("%.3f", s.orders_u[0]) + "," + fmt("%.3f", s.orders_u[1]) + " need " +
                  fmt("%g", need) + ";";
    }
    return {ok, "32->64->128:" + detail};
}

Outcome criterion5() {
    bool ok = true;
    std::string detail;
    for (auto [mu, chi] : {std::pair{1.0, 1.0}, std::pair{0.5, 2.0}}) {
        RunConfig cfg = base_config(2, 2.0, "gaussian-bump", mu);
        cfg.params.chi = chi;
        cfg.solver.t_end = 30.0;
        cfg.diag.tau = DiagConfig::default_tau(cfg.solver.t_end);
        const ExperimentResult r = run_experiment(cfg, false);
        const double shift = cfg.grid.domain_volume() / std::numbers::e;
        std::vector<double> y;
        for (double e : r.series.entropy()) y.push_back(e + shift);
        const double variation = trailing_variation(r.series.times(), y, 0.2);
        const EntropyAudit audit = audit_entropy(r.series, cfg.params, cfg.grid.domain_volume());
        const bool pass = r.trajectory.status == RunStatus::Completed && r.margin > 0.0 && variation < 0.01 &&
                          audit.report.ok();
        ok = ok && pass;
        detail += " (mu,chi)=(" + fmt("%g", mu) + "," + fmt("%g", chi) + "): variation " + fmt("%.2e", variation) +
                  ", violations " + std::to_string(audit.report.violation_times.size()) + ", margin " +
                  fmt("%.3e", audit.report.margin) + ";";
    }
    return {ok, "64^2, m=2, horizon 30;" + detail};
}

Outcome criterion6() {
    const auto start = std::chrono::steady_clock::now();
    SweepSpec spec;
    spec.base = base_config(2, 1.5, "gaussian-bump", 1.0);
    spec.base.grid = GridSpec::square(128);
    spec.base.solver.t_end = 50.0;
    spec.base.solver.snapshot_every = 5.0;
    spec.base.diag.tau = DiagConfig::default_tau(50.0);
    spec.m = {1.1, 1.25, 1.5, 2.0};
    bool ok = true;
    std::string detail;
    int rows = 0;
    for (auto [mu, chi] : {std::pair{1.0, 1.0}, std::pair{0.5, 2.0}}) {
        spec.mu = {mu};
        spec.chi = {chi};
        const SweepResult r = run_sweep(spec, 1, false);
        for (const auto& row : r.rows) {
            ++rows;
            const bool pass = row.verdict == "Bounded" && row.margin > 0.0;
            ok = ok && pass;
            if (!pass) {
                detail += " [m=" + fmt("%g", row.m) + " mu=" + fmt("%g", row.mu) + " chi=" + fmt("%g", row.chi) + ": " +
                          row.verdict + ", " + row.status + "]";
            }
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    ok = ok && rows == 8 && secs < 1800.0;
    return {ok, std::to_string(rows) + " points at 128^2, horizon 50, " + fmt("%.0f", secs) + " s" + detail};
}

// Sampled exact solutions of y' + A y = h(t).
struct Ode {
    std::vector<double> t, y, h;
};

Ode exact_ode(double A, double y0, int kind, double p, double T, double dt) {
    Ode o;
    const int n = static_cast<int>(std::round(T / dt));
    for (int k = 0; k <= n; ++k) {
        const double t = k * dt;
        double y = 0.0, h = 0.0;
        if (kind == 0) {  // h = p
            h = p;
            y = p / A + (y0 - p / A) * std::exp(-A * t);
        } else if (kind == 1) {  // h = p e^{-t}, A != 1
            h = p * std::exp(-t);
            y = y0 * std::exp(-A * t) + p * (std::exp(-t) - std::exp(-A * t)) / (A - 1.0);
        } else {  // h = p (1 + sin t)
            h = p * (1.0 + std::sin(t));
            const double c = p * (A * std::sin(t) - std::cos(t)) / (A * A + 1.0);
            const double c0 = -p / (A * A + 1.0);
            y = p / A + c + (y0 - p / A - c0) * std::exp(-A * t);
        }
        o.t.push_back(t);
        o.y.push_back(y);
        o.h.push_back(h);
    }
    return o;
}

Outcome criterion7() {
    int correct = 0, total = 0;
    std::string detail;
    struct Pos {
        double A, y0;
        int kind;
        double p, tau;
    };
    const Pos positives[] = {{1, 0, 0, 1, 1},   {2, 4, 0, 1, 1},     {0.5, 1, 0, 2, 0.5}, {3, 10, 0, 0.1, 1},
                             {2, 1, 1, 3, 1},   {0.5, 0, 1, 1, 0.3}, {1, 2, 2, 1, 1},     {4, 0.5, 2, 2, 0.25},
                             {0.2, 5, 2, 0.5, 1}, {1.5, 0, 0, 0, 1}};
    for (const Pos& c : positives) {
        const Ode o = exact_ode(c.A, c.y0, c.kind, c.p, 20.0, 1e-3);
        const GronwallReport r = gronwall_verify(o.t, o.y, o.h, c.A, c.tau);
        ++total;
        if (r.ok() && r.margin >= 0.0) {
            ++correct;
        } else {
            detail += " [positive " + std::to_string(total) + " flagged]";
        }
    }
    // Negative controls: each series exceeds its own bound from a known time.
    for (int k = 0; k < 10; ++k) {
        const double A = 0.5 + 0.3 * k, tau = k % 2 ? 1.0 : 0.5;
        Ode o = exact_ode(A, 1.0 + k, k % 3, 1.0 + 0.2 * k, 10.0, 1e-2);
        const double B = gronwall_verify(o.t, o.y, o.h, A, tau).B;
        const double bound = gronwall_bound(o.y.front(), A, B, tau);
        const double t_bad = 2.0 + 0.5 * k;
        for (std::size_t i = 0; i < o.t.size(); ++i) {
            if (o.t[i] < t_bad - 1e-9) continue;
            const double s = o.t[i] - t_bad;
            switch (k % 5) {
                case 0: o.y[i] = 2.0 * bound; break;                       // jump
                case 1: o.y[i] = bound * (1.0 + 1e-6) + s; break;          // barely over, then drifting
                case 2: o.y[i] = bound * std::exp(0.5 * s) * 1.01; break;  // exponential escape
                case 3: if (s < 1e-9) o.y[i] = 1.5 * bound; break;         // single spike
                case 4: o.y[i] = bound + 0.1 + s * s; break;               // quadratic growth
            }
        }
        const GronwallReport r = gronwall_verify(o.t, o.y, o.h, A, tau);
        ++total;
        if (!r.ok() && r.first_violation && std::abs(*r.first_violation - t_bad) < 1e-6) {
            ++correct;
        } else {
            detail += " [negative " + std::to_string(k + 1) + " missed]";
        }
    }
    return {correct == total, std::to_string(correct) + "/" + std::to_string(total) + " synthetic cases classified" + detail};
}

Outcome criterion8() {
    const auto& first = suite_runs();
    const auto cases = suite();
    bool ok = true;
    std::string detail;
    for (std::size_t k = 0; k < cases.size(); ++k) {
        const ExperimentResult again = run_experiment(cases[k].cfg, false);
        if (series_csv(again.series) != first[k].csv) {
            ok = false;
            detail += " [" + cases[k].name + " differs]";
        }
    }
    return {ok, std::to_string(cases.size()) + " suite configs rerun with fixed seed, series CSV byte-identical" + detail};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"v maximum principle", criterion1},  {"positivity and mass balance", criterion2},
        {"homogeneous oracle", criterion3},   {"spatial convergence", criterion4},
        {"entropy boundedness", criterion5},  {"threshold sweep", criterion6},
        {"Gronwall checker", criterion7},     {"determinism", criterion8},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k + 1);
        if (!only.empty() && !only.count(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
