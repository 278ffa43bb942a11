#pragma once

/// @file oracle.hpp
/// @brief Ground truth for verification: closed-form spatially homogeneous
/// solutions, manufactured solutions with hand-derived forcing, and
/// refined reference runs.

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "chemobound/model.hpp"
#include "chemobound/stepper.hpp"

namespace chemobound {

/// Spatially constant solution (u(t), v(t)):
///   u = u0 e^{mu t} / (1 - u0 + u0 e^{mu t}),
///   v = v0 (u0 e^{mu t} + 1 - u0)^{-1/mu}   (v = v0 e^{-u0 t} when mu = 0).
std::pair<double, double> homogeneous_solution(double u0, double v0, double mu, double t);

struct HomogeneousCheck {
    double u0 = 0.0;
    double dt = 0.0;
    double max_error = 0.0;       ///< max over steps and cells of |u - u_exact|, |v - v_exact|
    double max_error_half = 0.0;  ///< same with dt / 2
    double order = 0.0;           ///< log2(max_error / max_error_half); 0 when both vanish
    RunStatus status = RunStatus::Completed;
};

/// Runs constant data (u0, v0) at fixed dt and dt/2 to `horizon` on `grid`
/// and compares every accepted step with homogeneous_solution.
HomogeneousCheck homogeneous_check(double u0, double v0, double mu, double horizon, double dt, const GridSpec& grid);

/// Manufactured pair on the unit box [0,1]^dim, with phi = prod_i cos(pi x_i):
///   u* = a + b phi e^{-t},   v* = c (1 + phi) e^{-t}.
/// Normal derivatives vanish on every face.
struct MMSCase {
    std::string name;
    int dim = 1;
    double a = 1.0;
    double b = 0.5;
    double c = 0.5;
    ModelParams params;  ///< parameters the case is studied with by default
    double t_end = 0.1;

    double u_star(const std::array<double, 3>& x, double t) const;
    double v_star(const std::array<double, 3>& x, double t) const;
};

/// Registered cases: "steady", "cos1d-heat", "cos1d-porous", "cos1d-chemo", "cos2d".
std::vector<MMSCase> mms_cases();
/// Throws std::invalid_argument for an unknown name.
MMSCase mms_case(const std::string& name);

struct ForcingValue {
    double f_u = 0.0;
    double f_v = 0.0;
};

/// f_u = u*_t - div(D(u*) grad u*) + chi div(u* grad v*) - mu (u* - u*^2)
/// f_v = v*_t - lap v* + u* v*
ForcingValue mms_forcing(const MMSCase& mms, const ModelParams& params, const std::array<double, 3>& x, double t);

/// Samples mms_forcing at cell centers for use by the stepper.
Forcing mms_grid_forcing(const MMSCase& mms, const ModelParams& params, const GridSpec& grid);

/// u*, v* sampled at cell centers at time t.
State mms_state(const MMSCase& mms, const GridSpec& grid, double t);

struct MMSLevel {
    int cells = 0;
    double h = 0.0;
    double dt = 0.0;
    double error_u = 0.0;  ///< discrete L2 error at t_end
    double error_v = 0.0;
    RunStatus status = RunStatus::Completed;
};

struct MMSStudy {
    std::vector<MMSLevel> levels;
    std::vector<double> orders_u;  ///< log2 ratios between consecutive levels
    std::vector<double> orders_v;
    double fitted_order_u = 0.0;   ///< least-squares slope of log error vs log h
};

/// Runs the case on `levels` grids starting at `base_cells` per axis and
/// doubling, with dt = dt_factor h^2 so temporal error tracks h^2.
MMSStudy mms_study(const MMSCase& mms, const ModelParams& params, int levels, int base_cells, double dt_factor = 0.25);

/// Piecewise-constant injection onto a grid `factor` times finer per axis.
Field prolong(const Field& coarse, int factor);
/// Cell averaging onto a grid `factor` times coarser per axis.
Field restrict_average(const Field& fine, int factor);

/// Same scheme on a grid and dt `refinement` times finer, snapshots restricted
/// back to the coarse grid. refinement = 1 is a plain run.
Trajectory reference_run(const State& initial, const ModelParams& params, const SolverConfig& cfg, int refinement);

}  // namespace chemobound
