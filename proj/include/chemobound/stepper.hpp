#pragma once

/// @file stepper.hpp
/// @brief Positivity-preserving IMEX time integration with step rejection.
///
/// One step advances v first by backward Euler with lagged consumption,
///   (I - dt lap + dt u^n) v^{n+1} = v^n,
/// then u with frozen-coefficient implicit diffusion, explicit upwind
/// chemotaxis driven by chi grad v^{n+1}, and an explicit logistic term:
///   (I - dt div(D(u^n) grad)) u^{n+1} = u^n + dt mu (u^n - (u^n)^2) - dt div(F_up).
/// Both systems are M-matrices, so nonnegative right-hand sides yield
/// nonnegative solutions without any clipping.

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chemobound/linear_solve.hpp"
#include "chemobound/model.hpp"

namespace chemobound {

struct SolverConfig {
    double dt_init = 1e-3;
    double dt_max = 1e-2;
    double cfl_safety = 0.45;
    double t_end = 1.0;
    double snapshot_every = 1.0;
    int max_linear_iters = 20000;
    double linear_tol = 1e-12;
    double positivity_tol = 0.0;
    int max_halvings = 20;

    void validate() const;
};

enum class RunStatus { Completed, DtUnderflow, PositivityFailure };

std::string to_string(RunStatus status);

/// Optional source terms added to the u and v equations, evaluated at the
/// new time level. Used by manufactured-solution studies.
struct Forcing {
    std::function<void(double t, Field& f_u, Field& f_v)> evaluate;
    explicit operator bool() const { return static_cast<bool>(evaluate); }
};

class StepError : public std::runtime_error {
public:
    enum class Kind { LinearSolve, Positivity };
    StepError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

struct StepStats {
    int v_iterations = 0;
    int u_iterations = 0;
    int polish_sweeps = 0;
};

/// Advances `state` by dt. Throws StepError when the linear solves fail or a
/// value falls below -cfg.positivity_tol.
State step(const State& state, double dt, const ModelParams& params, const SolverConfig& cfg,
           const Forcing& forcing = {}, StepStats* stats = nullptr);

/// Largest advective velocity component chi |(grad v)_i| on faces normal to each axis.
std::array<double, 3> face_speeds(const Field& v, double chi);

/// cfl * min_i h_i / (2N max|chi (grad v)_i| + eps), capped by dt_max and by
/// dt mu max(u) <= cfl.
double choose_dt(const State& state, const ModelParams& params, const SolverConfig& cfg);

struct StepEvent {
    const State& before;
    const State& after;
    double dt;
    std::size_t index;  ///< 1-based count of accepted steps
};

struct RunHooks {
    std::function<void(const State&)> on_start;
    std::function<void(const StepEvent&)> on_step;
};

struct Trajectory {
    std::vector<State> snapshots;
    RunStatus status = RunStatus::Completed;
    double final_time = 0.0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::string failure;  ///< last rejection message when status != Completed
};

/// Integrates to cfg.t_end. Rejected steps are retried with dt halved up to
/// cfg.max_halvings times; beyond that the run stops with DtUnderflow, or
/// PositivityFailure when every rejection in the cascade was a positivity
/// violation. Snapshots are taken at t0, every snapshot_every, and at the end.
Trajectory run(const State& initial, const ModelParams& params, const SolverConfig& cfg,
               const RunHooks& hooks = {}, const Forcing& forcing = {});

}  // namespace chemobound
