#include "chemobound/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace chemobound {

void SolverConfig::validate() const {
    auto fail = [](const char* field, const char* what) {
        std::ostringstream msg;
        msg << "solver: " << field << " " << what;
        throw std::invalid_argument(msg.str());
    };
    if (!(dt_init > 0.0)) fail("dt_init", "must be positive");
    if (!(dt_max > 0.0)) fail("dt_max", "must be positive");
    if (dt_init > dt_max) fail("dt_init", "must not exceed dt_max");
    if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) fail("cfl_safety", "must lie in (0, 1]");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) fail("t_end", "must be positive");
    if (!(snapshot_every > 0.0)) fail("snapshot_every", "must be positive");
    if (max_linear_iters < 1) fail("max_linear_iters", "must be at least 1");
    if (!(linear_tol > 0.0)) fail("linear_tol", "must be positive");
    if (!(positivity_tol >= 0.0)) fail("positivity_tol", "must be nonnegative");
    if (max_halvings < 0) fail("max_halvings", "must be nonnegative");
}

std::string to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Completed: return "completed";
        case RunStatus::DtUnderflow: return "dt_underflow";
        case RunStatus::PositivityFailure: return "positivity_failure";
    }
    return "unknown";
}

namespace {

void check_positivity(const Field& f, double tol, const char* name) {
    const double lo = f.min();
    if (!f.all_finite() || lo < -tol) {
        std::ostringstream msg;
        msg << "step: " << name << " min " << lo << " below -positivity_tol";
        throw StepError(StepError::Kind::Positivity, msg.str());
    }
}

}  // namespace

State step(const State& state, double dt, const ModelParams& params, const SolverConfig& cfg,
           const Forcing& forcing, StepStats* stats) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    const GridSpec& spec = state.u.spec();
    const Field& u = state.u;
    const double t_new = state.t + dt;

    Field f_u(spec, 0.0), f_v(spec, 0.0);
    if (forcing) forcing.evaluate(t_new, f_u, f_v);

    SolveOptions opts;
    opts.tol = cfg.linear_tol;
    opts.max_iters = cfg.max_linear_iters;

    State next;
    next.t = t_new;
    try {
        // v: (I - dt lap + dt u^n) v^{n+1} = v^n
        FaceField kappa_v(spec);
        for (int a = 0; a < spec.dim(); ++a) {
            auto& ka = kappa_v.axis(a);
            std::fill(ka.begin(), ka.end(), dt);
        }
        Field sigma_v(spec);
        Field rhs_v(spec);
        for (std::size_t c = 0; c < u.size(); ++c) {
            sigma_v[c] = dt * u[c];
            rhs_v[c] = state.v[c] + dt * f_v[c];
        }
        const ImplicitOperator op_v(std::move(kappa_v), std::move(sigma_v));
        SolveResult sv = solve_m_matrix(op_v, rhs_v, opts);
        next.v = std::move(sv.x);
        check_positivity(next.v, cfg.positivity_tol, "v");

        // u: explicit upwind chemotaxis and logistic, implicit frozen-coefficient diffusion
        FaceField velocity = grad_faces(next.v);
        for (int a = 0; a < spec.dim(); ++a) {
            for (auto& w : velocity.axis(a)) w *= params.chi;
        }
        const Field chemo = div_faces(upwind_flux(u, velocity));
        Field rhs_u(spec);
        for (std::size_t c = 0; c < u.size(); ++c) {
            rhs_u[c] = u[c] + dt * params.mu * (u[c] - u[c] * u[c]) - dt * chemo[c] + dt * f_u[c];
        }
        FaceField kappa_u = face_diffusivity(u, params);
        for (int a = 0; a < spec.dim(); ++a) {
            for (auto& k : kappa_u.axis(a)) k *= dt;
        }
        const ImplicitOperator op_u(std::move(kappa_u), Field(spec, 0.0));
        SolveResult su = solve_m_matrix(op_u, rhs_u, opts);
        next.u = std::move(su.x);
        check_positivity(next.u, cfg.positivity_tol, "u");

        if (stats) {
            stats->v_iterations = sv.iterations;
            stats->u_iterations = su.iterations;
            stats->polish_sweeps = sv.polish_sweeps + su.polish_sweeps;
        }
    } catch (const SolveFailure& e) {
        throw StepError(StepError::Kind::LinearSolve, e.what());
    }
    return next;
}

std::array<double, 3> face_speeds(const Field& v, double chi) {
    const FaceField g = grad_faces(v);
    std::array<double, 3> speeds{0.0, 0.0, 0.0};
    for (int a = 0; a < v.spec().dim(); ++a) speeds[a] = chi * g.max_abs(a);
    return speeds;
}

double choose_dt(const State& state, const ModelParams& params, const SolverConfig& cfg) {
    const GridSpec& spec = state.u.spec();
    const double eps = std::numeric_limits<double>::min();
    const auto speeds = face_speeds(state.v, params.chi);
    double dt = cfg.dt_max;
    for (int a = 0; a < spec.dim(); ++a) {
        dt = std::min(dt, cfg.cfl_safety * spec.spacing(a) / (2.0 * spec.dim() * speeds[a] + eps));
    }
    const double growth = params.mu * state.u.max();
    if (growth > 0.0) dt = std::min(dt, cfg.cfl_safety / growth);
    return dt;
}

Trajectory run(const State& initial, const ModelParams& params, const SolverConfig& cfg, const RunHooks& hooks,
               const Forcing& forcing) {
    params.validate();
    cfg.validate();
    initial.validate();

    Trajectory traj;
    traj.snapshots.push_back(initial);
    if (hooks.on_start) hooks.on_start(initial);

    State current = initial;
    const double t_end = cfg.t_end;
    const double t_slack = 1e-12 * std::max(1.0, t_end);
    long snapshot_index = 1;
    double next_snapshot = initial.t + cfg.snapshot_every;

    while (t_end - current.t > t_slack) {
        double dt = choose_dt(current, params, cfg);
        if (traj.accepted_steps == 0) dt = std::min(dt, cfg.dt_init);

        // Land exactly on snapshot times and on t_end.
        double landing = current.t + dt;
        bool exact = false;
        const double stop = std::min(next_snapshot, t_end);
        if (landing >= stop - t_slack) {
            landing = stop;
            dt = stop - current.t;
            exact = true;
        }

        bool accepted = false;
        bool only_positivity = true;
        State next;
        for (int halving = 0; halving <= cfg.max_halvings; ++halving) {
            try {
                next = step(current, dt, params, cfg, forcing);
                accepted = true;
                break;
            } catch (const StepError& e) {
                ++traj.rejected_steps;
                traj.failure = e.what();
                only_positivity = only_positivity && e.kind() == StepError::Kind::Positivity;
                dt *= 0.5;
                exact = false;
            }
        }
        if (!accepted) {
            traj.status = only_positivity ? RunStatus::PositivityFailure : RunStatus::DtUnderflow;
            break;
        }
        if (exact) next.t = landing;

        ++traj.accepted_steps;
        if (hooks.on_step) hooks.on_step(StepEvent{current, next, dt, traj.accepted_steps});
        current = std::move(next);

        if (current.t >= next_snapshot - t_slack) {
            traj.snapshots.push_back(current);
            while (next_snapshot <= current.t + t_slack) {
                ++snapshot_index;
                next_snapshot = initial.t + static_cast<double>(snapshot_index) * cfg.snapshot_every;
            }
        }
    }

    if (traj.snapshots.back().t < current.t) traj.snapshots.push_back(current);
    traj.final_time = current.t;
    return traj;
}

}  // namespace chemobound
