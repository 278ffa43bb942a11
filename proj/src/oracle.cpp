#include "chemobound/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chemobound {

std::pair<double, double> homogeneous_solution(double u0, double v0, double mu, double t) {
    if (u0 < 0.0 || v0 < 0.0) throw std::invalid_argument("homogeneous_solution: negative initial data");
    if (mu == 0.0) return {u0, v0 * std::exp(-u0 * t)};
    const double g = std::exp(mu * t);
    const double denom = 1.0 - u0 + u0 * g;
    if (!(denom > 0.0)) throw std::invalid_argument("homogeneous_solution: logistic denominator vanishes");
    return {u0 * g / denom, v0 * std::pow(denom, -1.0 / mu)};
}

namespace {

double homogeneous_error(double u0, double v0, double mu, double horizon, double dt, const GridSpec& grid,
                         RunStatus& status) {
    ModelParams params;
    params.mu = mu;
    params.chi = 1.0;
    params.m = 1.5;
    SolverConfig cfg;
    cfg.t_end = horizon;
    cfg.dt_init = dt;
    cfg.dt_max = dt;
    cfg.cfl_safety = 1.0;
    cfg.snapshot_every = horizon;
    double err = 0.0;
    RunHooks hooks;
    hooks.on_step = [&](const StepEvent& e) {
        const auto [u, v] = homogeneous_solution(u0, v0, mu, e.after.t);
        for (std::size_t c = 0; c < grid.size(); ++c) {
            err = std::max({err, std::abs(e.after.u[c] - u), std::abs(e.after.v[c] - v)});
        }
    };
    const Trajectory traj = run(State{Field(grid, u0), Field(grid, v0), 0.0}, params, cfg, hooks);
    status = traj.status;
    return err;
}

}  // namespace

HomogeneousCheck homogeneous_check(double u0, double v0, double mu, double horizon, double dt, const GridSpec& grid) {
    HomogeneousCheck check;
    check.u0 = u0;
    check.dt = dt;
    RunStatus first = RunStatus::Completed, second = RunStatus::Completed;
    check.max_error = homogeneous_error(u0, v0, mu, horizon, dt, grid, first);
    check.max_error_half = homogeneous_error(u0, v0, mu, horizon, 0.5 * dt, grid, second);
    check.status = first != RunStatus::Completed ? first : second;
    if (check.max_error > 0.0 && check.max_error_half > 0.0) check.order = std::log2(check.max_error / check.max_error_half);
    return check;
}

namespace {

constexpr double pi = std::numbers::pi;

// phi, |grad phi|^2 and lap phi for phi = prod cos(pi x_i).
struct PhiValues {
    double phi;
    double grad_sq;
    double lap;
};

PhiValues phi_values(int dim, const std::array<double, 3>& x) {
    std::array<double, 3> cs{1.0, 1.0, 1.0}, sn{0.0, 0.0, 0.0};
    for (int i = 0; i < dim; ++i) {
        cs[i] = std::cos(pi * x[i]);
        sn[i] = std::sin(pi * x[i]);
    }
    PhiValues out{1.0, 0.0, 0.0};
    for (int i = 0; i < dim; ++i) out.phi *= cs[i];
    for (int i = 0; i < dim; ++i) {
        double partial = -pi * sn[i];
        for (int j = 0; j < dim; ++j) {
            if (j != i) partial *= cs[j];
        }
        out.grad_sq += partial * partial;
    }
    out.lap = -dim * pi * pi * out.phi;
    return out;
}

}  // namespace

double MMSCase::u_star(const std::array<double, 3>& x, double t) const {
    return a + b * phi_values(dim, x).phi * std::exp(-t);
}

double MMSCase::v_star(const std::array<double, 3>& x, double t) const {
    return c * (1.0 + phi_values(dim, x).phi) * std::exp(-t);
}

std::vector<MMSCase> mms_cases() {
    std::vector<MMSCase> cases;
    auto params = [](double m, double chi, double mu) {
        ModelParams p;
        p.m = m;
        p.chi = chi;
        p.mu = mu;
        return p;
    };
    cases.push_back({"steady", 1, 1.0, 0.0, 0.0, params(1.5, 1.0, 1.0), 0.1});
    cases.push_back({"cos1d-heat", 1, 1.0, 0.5, 0.5, params(1.0, 0.0, 1.0), 0.1});
    cases.push_back({"cos1d-porous", 1, 1.0, 0.5, 0.5, params(2.0, 0.0, 1.0), 0.1});
    cases.push_back({"cos1d-chemo", 1, 1.0, 0.5, 0.5, params(1.5, 1.0, 1.0), 0.1});
    cases.push_back({"cos2d", 2, 1.5, 0.5, 0.4, params(1.5, 0.5, 0.8), 0.1});
    return cases;
}

MMSCase mms_case(const std::string& name) {
    for (auto& c : mms_cases()) {
        if (c.name == name) return c;
    }
    throw std::invalid_argument("unknown MMS case '" + name + "'");
}

ForcingValue mms_forcing(const MMSCase& mms, const ModelParams& p, const std::array<double, 3>& x, double t) {
    const PhiValues ph = phi_values(mms.dim, x);
    const double e = std::exp(-t);

    const double u = mms.a + mms.b * ph.phi * e;
    const double u_t = -mms.b * ph.phi * e;
    const double grad_u_sq = mms.b * mms.b * e * e * ph.grad_sq;
    const double lap_u = mms.b * e * ph.lap;

    const double v = mms.c * (1.0 + ph.phi) * e;
    const double v_t = -v;
    const double lap_v = mms.c * e * ph.lap;
    const double grad_u_dot_grad_v = mms.b * mms.c * e * e * ph.grad_sq;

    const double d = p.c_d * std::pow(u + 1.0, p.m - 1.0);
    const double d_prime = p.c_d * (p.m - 1.0) * std::pow(u + 1.0, p.m - 2.0);
    const double div_diffusion = d_prime * grad_u_sq + d * lap_u;
    const double div_taxis = grad_u_dot_grad_v + u * lap_v;

    ForcingValue f;
    f.f_u = u_t - div_diffusion + p.chi * div_taxis - p.mu * (u - u * u);
    f.f_v = v_t - lap_v + u * v;
    return f;
}

Forcing mms_grid_forcing(const MMSCase& mms, const ModelParams& params, const GridSpec& grid) {
    std::vector<std::array<double, 3>> centers(grid.size());
    for (std::size_t c = 0; c < grid.size(); ++c) centers[c] = grid.cell_center(c);
    Forcing forcing;
    forcing.evaluate = [mms, params, centers = std::move(centers)](double t, Field& f_u, Field& f_v) {
        for (std::size_t c = 0; c < centers.size(); ++c) {
            const ForcingValue f = mms_forcing(mms, params, centers[c], t);
            f_u[c] = f.f_u;
            f_v[c] = f.f_v;
        }
    };
    return forcing;
}

State mms_state(const MMSCase& mms, const GridSpec& grid, double t) {
    State s{Field(grid), Field(grid), t};
    for (std::size_t c = 0; c < grid.size(); ++c) {
        const auto x = grid.cell_center(c);
        s.u[c] = mms.u_star(x, t);
        s.v[c] = mms.v_star(x, t);
    }
    return s;
}

MMSStudy mms_study(const MMSCase& mms, const ModelParams& params, int levels, int base_cells, double dt_factor) {
    if (levels < 2) throw std::invalid_argument("mms_study: need at least two levels");
    MMSStudy study;
    int n = base_cells;
    for (int level = 0; level < levels; ++level, n *= 2) {
        std::array<int, 3> cells{1, 1, 1};
        std::array<double, 3> lengths{1.0, 1.0, 1.0};
        for (int a = 0; a < mms.dim; ++a) cells[a] = n;
        const GridSpec grid(mms.dim, cells, lengths);

        MMSLevel lv;
        lv.cells = n;
        lv.h = grid.spacing(0);
        // Whole number of steps so every level ends exactly at t_end.
        const double dt_target = dt_factor * lv.h * lv.h;
        const double steps = std::ceil(mms.t_end / dt_target);
        lv.dt = mms.t_end / steps;

        SolverConfig cfg;
        cfg.t_end = mms.t_end;
        cfg.dt_init = lv.dt;
        cfg.dt_max = lv.dt;
        cfg.snapshot_every = mms.t_end;
        cfg.cfl_safety = 1.0;

        const Trajectory traj = run(mms_state(mms, grid, 0.0), params, cfg, {}, mms_grid_forcing(mms, params, grid));
        lv.status = traj.status;
        const State& last = traj.snapshots.back();
        const State exact = mms_state(mms, grid, last.t);
        double eu = 0.0, ev = 0.0;
        for (std::size_t c = 0; c < grid.size(); ++c) {
            eu += (last.u[c] - exact.u[c]) * (last.u[c] - exact.u[c]);
            ev += (last.v[c] - exact.v[c]) * (last.v[c] - exact.v[c]);
        }
        lv.error_u = std::sqrt(eu * grid.cell_volume());
        lv.error_v = std::sqrt(ev * grid.cell_volume());
        study.levels.push_back(lv);
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < study.levels.size(); ++k) {
        const auto& lv = study.levels[k];
        if (k > 0) {
            const auto& prev = study.levels[k - 1];
            study.orders_u.push_back(std::log2(prev.error_u / lv.error_u));
            study.orders_v.push_back(std::log2(prev.error_v / lv.error_v));
        }
        const double lx = std::log(lv.h), ly = std::log(lv.error_u);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double n_levels = static_cast<double>(study.levels.size());
    study.fitted_order_u = (n_levels * sxy - sx * sy) / (n_levels * sxx - sx * sx);
    return study;
}

namespace {

GridSpec scaled_grid(const GridSpec& spec, int factor, bool finer) {
    std::array<int, 3> cells = spec.cell_counts();
    for (int a = 0; a < spec.dim(); ++a) {
        if (finer) {
            cells[a] *= factor;
        } else {
            if (cells[a] % factor != 0) throw std::invalid_argument("restrict_average: cells not divisible by factor");
            cells[a] /= factor;
        }
    }
    return GridSpec(spec.dim(), cells, spec.lengths());
}

}  // namespace

Field prolong(const Field& coarse, int factor) {
    const GridSpec fine_spec = scaled_grid(coarse.spec(), factor, true);
    Field fine(fine_spec);
    for (std::size_t c = 0; c < fine_spec.size(); ++c) {
        auto idx = fine_spec.multi_index(c);
        std::size_t coarse_index = 0;
        for (int a = 0; a < fine_spec.dim(); ++a) coarse_index += coarse.spec().stride(a) * (idx[a] / factor);
        fine[c] = coarse[coarse_index];
    }
    return fine;
}

Field restrict_average(const Field& fine, int factor) {
    const GridSpec coarse_spec = scaled_grid(fine.spec(), factor, false);
    Field coarse(coarse_spec, 0.0);
    for (std::size_t c = 0; c < fine.size(); ++c) {
        auto idx = fine.spec().multi_index(c);
        std::size_t coarse_index = 0;
        for (int a = 0; a < coarse_spec.dim(); ++a) coarse_index += coarse_spec.stride(a) * (idx[a] / factor);
        coarse[coarse_index] += fine[c];
    }
    const double children = std::pow(static_cast<double>(factor), coarse_spec.dim());
    for (auto& x : coarse.values()) x /= children;
    return coarse;
}

Trajectory reference_run(const State& initial, const ModelParams& params, const SolverConfig& cfg, int refinement) {
    if (refinement < 1) throw std::invalid_argument("reference_run: refinement must be >= 1");
    if (refinement == 1) return run(initial, params, cfg);

    const State fine_initial{prolong(initial.u, refinement), prolong(initial.v, refinement), initial.t};
    SolverConfig fine_cfg = cfg;
    fine_cfg.dt_init = cfg.dt_init / refinement;
    fine_cfg.dt_max = cfg.dt_max / refinement;
    Trajectory traj = run(fine_initial, params, fine_cfg);
    for (auto& s : traj.snapshots) {
        s.u = restrict_average(s.u, refinement);
        s.v = restrict_average(s.v, refinement);
    }
    return traj;
}

}  // namespace chemobound
