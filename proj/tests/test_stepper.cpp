#include <cmath>
#include <numbers>

#include <doctest.h>

#include "chemobound/oracle.hpp"
#include "chemobound/stepper.hpp"
#include "test_util.hpp"

using namespace chemobound;
using testutil::random_field;

namespace {

ModelParams params(double chi, double mu, double m) {
    ModelParams p;
    p.chi = chi;
    p.mu = mu;
    p.m = m;
    return p;
}

State bump_state(const GridSpec& g, double amplitude = 5.0) {
    State s{Field(g), Field(g, 1.0), 0.0};
    for (std::size_t c = 0; c < g.size(); ++c) {
        const auto x = g.cell_center(c);
        double r2 = 0.0;
        for (int a = 0; a < g.dim(); ++a) r2 += (x[a] - 0.5) * (x[a] - 0.5);
        s.u[c] = 0.1 + amplitude * std::exp(-r2 / 0.02);
        s.v[c] = 0.5 + 0.5 * std::cos(3.0 * x[0]);
    }
    return s;
}

}  // namespace

TEST_CASE("solver config validation") {
    SolverConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.dt_init = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.cfl_safety = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = SolverConfig{};
    cfg.linear_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK(to_string(RunStatus::DtUnderflow) == "dt_underflow");
    CHECK(to_string(RunStatus::PositivityFailure) == "positivity_failure");
}

TEST_CASE("zero density leaves v undepleted") {
    const GridSpec g = GridSpec::square(8);
    const State s{Field(g, 0.0), Field(g, 0.7), 0.0};
    for (double dt : {1e-4, 0.1, 3.0}) {
        const State n = step(s, dt, params(1, 1, 1.5), {});
        for (std::size_t c = 0; c < g.size(); ++c) {
            CHECK(n.u[c] == 0.0);
            CHECK(n.v[c] == doctest::Approx(0.7).epsilon(1e-14));
        }
        CHECK(n.t == doctest::Approx(dt));
    }
}

TEST_CASE("u = 1, v = 0 is a fixed point") {
    const GridSpec g = GridSpec::line(9);
    const State s{Field(g, 1.0), Field(g, 0.0), 0.0};
    for (double dt : {1e-3, 0.3}) {
        const State n = step(s, dt, params(2, 1, 2), {});
        for (std::size_t c = 0; c < g.size(); ++c) {
            CHECK(n.u[c] == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(n.v[c] == 0.0);
        }
    }
}

TEST_CASE("homogeneous logistic run reaches the closed form at t = ln 3") {
    const GridSpec g = GridSpec::square(4);
    SolverConfig cfg;
    cfg.t_end = std::log(3.0);
    cfg.dt_init = cfg.dt_max = 1e-4;
    cfg.snapshot_every = cfg.t_end;
    const Trajectory traj = run({Field(g, 0.5), Field(g, 1.0), 0.0}, params(1, 1, 1.5), cfg);
    REQUIRE(traj.status == RunStatus::Completed);
    const State& last = traj.snapshots.back();
    CHECK(last.t == cfg.t_end);
    for (std::size_t c = 0; c < g.size(); ++c) {
        CHECK(std::abs(last.u[c] - 0.75) <= 1e-3);
        CHECK(std::abs(last.v[c] - 0.5) <= 1e-3);
    }
}

TEST_CASE("choose_dt with zero advection") {
    const GridSpec g = GridSpec::square(16);
    SolverConfig cfg;
    cfg.dt_max = 0.5;
    const State s{Field(g, 2.0), Field(g, 3.0), 0.0};
    CHECK(choose_dt(s, params(1, 1, 1), cfg) == doctest::Approx(cfg.cfl_safety / 2.0));
    CHECK(choose_dt(s, params(1, 0, 1), cfg) == cfg.dt_max);
}

TEST_CASE("choose_dt halves when chi doubles in the advection-limited regime") {
    const GridSpec g = GridSpec::square(32);
    SolverConfig cfg;
    cfg.dt_max = 10.0;
    const State s = bump_state(g);
    const double dt1 = choose_dt(s, params(1, 0, 1), cfg);
    const double dt2 = choose_dt(s, params(2, 0, 1), cfg);
    CHECK(dt2 <= 0.5 * dt1 * (1 + 1e-12));
}

TEST_CASE("choose_dt agrees with a brute-force face scan") {
    const GridSpec g = GridSpec::square(64);
    State s{Field(g, 1.0), Field(g), 0.0};
    for (std::size_t c = 0; c < g.size(); ++c) {
        const auto x = g.cell_center(c);
        s.v[c] = 1.0 + 0.3 * std::sin(2.1 * x[0] + 0.4) * std::cos(3.3 * x[1]) + 0.1 * x[0] * x[1];
    }
    const ModelParams p = params(1.7, 0.2, 1.5);
    SolverConfig cfg;
    cfg.dt_max = 10.0;
    double dt = cfg.dt_max;
    for (int a = 0; a < 2; ++a) {
        double vmax = 0.0;
        const int n0 = g.cells(0), n1 = g.cells(1);
        for (int j = 0; j < n1; ++j) {
            for (int i = 0; i < n0; ++i) {
                const int ii = a == 0 ? i + 1 : i, jj = a == 1 ? j + 1 : j;
                if (ii >= n0 || jj >= n1) continue;
                const double diff = s.v[ii + n0 * jj] - s.v[i + n0 * j];
                vmax = std::max(vmax, std::abs(p.chi * diff / g.spacing(a)));
            }
        }
        dt = std::min(dt, cfg.cfl_safety * g.spacing(a) / (4.0 * vmax));
    }
    dt = std::min(dt, cfg.cfl_safety / (p.mu * s.u.max()));
    CHECK(choose_dt(s, p, cfg) == doctest::Approx(dt).epsilon(1e-12));
}

TEST_CASE("pure heat flow conserves mass") {
    const GridSpec g(2, {20, 16, 1}, {1, 1, 1});
    SolverConfig cfg;
    cfg.t_end = 1.0;
    cfg.dt_max = 0.01;
    cfg.snapshot_every = 0.25;
    const State s0{random_field(g, 4, 0.0, 2.0), random_field(g, 5, 0.0, 1.0), 0.0};
    const double m0 = integrate(s0.u);
    double worst = 0.0;
    RunHooks hooks;
    hooks.on_step = [&](const StepEvent& e) { worst = std::max(worst, std::abs(integrate(e.after.u) - m0) / m0); };
    const Trajectory traj = run(s0, params(0, 0, 1), cfg, hooks);
    REQUIRE(traj.status == RunStatus::Completed);
    CHECK(worst <= 1e-12);
}

TEST_CASE("accepted steps are nonnegative and respect the v maximum principle") {
    for (double m : {0.9, 1.0, 2.0}) {
        const GridSpec g = GridSpec::square(24);
        SolverConfig cfg;
        cfg.t_end = 1.0;
        cfg.dt_max = 0.02;
        cfg.snapshot_every = 0.5;
        State s0 = bump_state(g, 8.0);
        const double sup_v0 = s0.v.max();
        double prev_sup = sup_v0;
        bool ok = true, mono = true;
        double v_mass = integrate(s0.v);
        bool v_decreasing = true;
        RunHooks hooks;
        hooks.on_step = [&](const StepEvent& e) {
            ok = ok && e.after.u.min() >= 0.0 && e.after.v.min() >= 0.0;
            mono = mono && e.after.v.max() <= prev_sup;
            prev_sup = e.after.v.max();
            const double vm = integrate(e.after.v);
            v_decreasing = v_decreasing && vm < v_mass;
            v_mass = vm;
        };
        const Trajectory traj = run(s0, params(2, 1, m), cfg, hooks);
        CHECK(traj.status == RunStatus::Completed);
        CHECK(ok);
        CHECK(mono);
        CHECK(v_decreasing);
        CHECK(prev_sup <= sup_v0 * (1 + 1e-12));
    }
}

TEST_CASE("snapshots land on schedule and the run ends at t_end") {
    const GridSpec g = GridSpec::line(16);
    SolverConfig cfg;
    cfg.t_end = 1.0;
    cfg.dt_max = 0.03;
    cfg.snapshot_every = 0.1;
    std::size_t last_index = 0;
    double dt_sum = 0.0;
    RunHooks hooks;
    hooks.on_step = [&](const StepEvent& e) {
        CHECK(e.index == last_index + 1);
        last_index = e.index;
        dt_sum += e.dt;
        CHECK(e.after.t > e.before.t);
    };
    const Trajectory traj = run(bump_state(g), params(1, 1, 1.5), cfg, hooks);
    REQUIRE(traj.status == RunStatus::Completed);
    REQUIRE(traj.snapshots.size() == 11);
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        CHECK(traj.snapshots[k].t == doctest::Approx(0.1 * k).epsilon(1e-12));
        if (k) CHECK(traj.snapshots[k].t > traj.snapshots[k - 1].t);
    }
    CHECK(traj.final_time == cfg.t_end);
    CHECK(traj.snapshots.back().t == cfg.t_end);
    CHECK(last_index == traj.accepted_steps);
    CHECK(dt_sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unsolvable steps end in dt_underflow with the failure recorded") {
    const GridSpec g = GridSpec::square(16);
    SolverConfig cfg;
    cfg.t_end = 1.0;
    cfg.dt_max = 0.5;
    cfg.dt_init = 0.5;
    cfg.max_linear_iters = 1;
    cfg.linear_tol = 1e-15;
    cfg.max_halvings = 3;
    const Trajectory traj = run(bump_state(g), params(1, 1, 1.5), cfg);
    CHECK(traj.status == RunStatus::DtUnderflow);
    CHECK(traj.final_time < cfg.t_end);
    CHECK(traj.rejected_steps >= 4);
    CHECK_FALSE(traj.failure.empty());
    CHECK(traj.snapshots.back().t < cfg.t_end);
}

TEST_CASE("runs are deterministic") {
    const GridSpec g = GridSpec::square(16);
    SolverConfig cfg;
    cfg.t_end = 0.5;
    cfg.snapshot_every = 0.25;
    const Trajectory a = run(bump_state(g), params(1, 1, 1.2), cfg);
    const Trajectory b = run(bump_state(g), params(1, 1, 1.2), cfg);
    REQUIRE(a.snapshots.size() == b.snapshots.size());
    for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
        CHECK(a.snapshots[k].u.values() == b.snapshots[k].u.values());
        CHECK(a.snapshots[k].v.values() == b.snapshots[k].v.values());
    }
}

TEST_CASE("homogeneous runs track the closed form at first order") {
    const GridSpec g = GridSpec::line(3);
    for (double u0 : {0.5, 1.0, 2.0}) {
        const HomogeneousCheck c = homogeneous_check(u0, 1.0, 1.0, 5.0, 0.01, g);
        CHECK(c.status == RunStatus::Completed);
        CHECK(c.max_error <= 5 * 0.01);
        CHECK(c.order >= 0.9);
    }
}
