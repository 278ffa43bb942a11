#pragma once

/// @file diagnostics.hpp
/// @brief Functionals tracked along a trajectory, the ODE-comparison audit
/// y' + A y <= h  =>  y <= max{y0 + B, B/(A tau) + 2B}, and run classification.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "chemobound/model.hpp"
#include "chemobound/stepper.hpp"

namespace chemobound {

struct DiagConfig {
    std::vector<double> p_list{2.0, 3.0, 4.0};  ///< exponents p > 1 for int u^p
    std::vector<double> beta_list{1.5, 2.0};    ///< exponents beta > 1 for int |grad v|^(2 beta)
    double tau = 1.0;                           ///< window length for space-time integrals
    double entropy_floor = 1e-12;
    double window_fraction = 0.2;  ///< trailing fraction of the horizon used by classify_run
    double plateau_tol = 0.01;
    double growth_factor = 1e3;
    double slope_tol = 0.05;

    void validate() const;
    /// min(1, t_end / 6)
    static double default_tau(double t_end);
};

struct DiagRecord {
    double t = 0.0;
    double mass = 0.0;
    double sup_u = 0.0;
    double sup_v = 0.0;
    double min_u = 0.0;
    double min_v = 0.0;
    double entropy = 0.0;
    double dirichlet = 0.0;
    double sup_grad_v = 0.0;
    double dissipation = 0.0;
    std::vector<double> lp;             ///< int u^p, one per p_list entry
    std::vector<double> grad_v_powers;  ///< int |grad v|^(2 beta), one per beta_list entry
    double u_sq = 0.0;                  ///< int u^2
    double lap_v_sq = 0.0;              ///< int (lap v)^2
};

/// Trailing-window space-time integrals over [t - tau, t] (trapezoid in time).
struct WindowRecord {
    double u_sq = 0.0;
    double grad_v_sq = 0.0;
    double lap_v_sq = 0.0;
};

class DiagSeries {
public:
    DiagSeries() = default;
    DiagSeries(std::vector<double> p_list, std::vector<double> beta_list, double tau);

    /// Appends a record; times must be strictly increasing.
    void append(DiagRecord record);

    const std::vector<DiagRecord>& records() const { return records_; }
    const std::vector<WindowRecord>& windows() const { return windows_; }
    const std::vector<double>& p_list() const { return p_list_; }
    const std::vector<double>& beta_list() const { return beta_list_; }
    double tau() const { return tau_; }
    bool empty() const { return records_.empty(); }
    std::size_t size() const { return records_.size(); }

    std::vector<double> times() const;
    std::vector<double> sup_u() const;
    std::vector<double> entropy() const;

private:
    double trailing(std::size_t field) const;

    std::vector<double> p_list_;
    std::vector<double> beta_list_;
    double tau_ = 1.0;
    std::vector<DiagRecord> records_;
    std::vector<WindowRecord> windows_;
    std::vector<std::array<double, 3>> cumulative_;  // running time integrals of u_sq, dirichlet, lap_v_sq
};

/// Integral of max(u, floor) ln max(u, floor).
double entropy(const Field& u, double floor);

/// Face sum of D(ubar) |grad u|^2 / max(ubar, floor), ubar the face mean of u.
double dissipation(const Field& u, const ModelParams& params, double floor);

DiagRecord functional_snapshot(const State& state, const ModelParams& params, const DiagConfig& cfg);

double gronwall_bound(double y0, double A, double B, double tau);

struct GronwallReport {
    double B = 0.0;       ///< largest window integral of h
    double bound = 0.0;   ///< max{y0 + B, B/(A tau) + 2B}
    double margin = 0.0;  ///< min over samples of bound - y
    std::vector<double> violation_times;
    std::optional<double> first_violation;
    bool ok() const { return violation_times.empty(); }
};

/// Checks y(t_k) <= gronwall_bound(y(t_0), A, B, tau) at every sample, with
/// B the largest integral of h (trapezoid) over any window of length tau.
GronwallReport gronwall_verify(const std::vector<double>& times, const std::vector<double>& y,
                               const std::vector<double>& h, double A, double tau);

/// Smallest nonnegative forcing compatible with the samples: on each step
/// interval g = max(0, dy/dt + A ybar); sample k receives the larger of its two
/// adjacent interval values.
std::vector<double> fitted_forcing(const std::vector<double>& times, const std::vector<double>& y, double A);

struct EntropyAudit {
    GronwallReport report;
    double fitted_constant = 0.0;  ///< constant C added to (chi^2/mu) int (lap v)^2
};

/// Audits y = int u ln u + |Omega|/e (shifted to be nonnegative) with A = 1 and
/// forcing h = (chi^2/mu) int (lap v)^2 + C, C fitted from the series. With
/// mu = 0 the forcing is fitted_forcing alone.
EntropyAudit audit_entropy(const DiagSeries& series, const ModelParams& params, double domain_volume);

/// Audits int u^p (index into p_list) against fitted_forcing with rate A.
GronwallReport audit_lp(const DiagSeries& series, std::size_t p_index, double A);

enum class Verdict { Bounded, Growing, Inconclusive };

std::string to_string(Verdict verdict);

struct RunOutcome {
    Verdict verdict = Verdict::Inconclusive;
    double peak_sup_u = 0.0;
    double plateau_ratio = 0.0;  ///< (max - min) / max of sup_u over the trailing window
    double log_slope = 0.0;      ///< least-squares d ln sup_u / dt over the trailing window
    bool v_max_principle_ok = true;
    double entropy_peak = 0.0;
    double growth_ratio = 0.0;  ///< peak_sup_u / sup_u(0)
    bool complete = false;      ///< series reaches the horizon
};

/// Bounded: full horizon, plateau_ratio < plateau_tol, growth_ratio <= growth_factor.
/// Growing: dt_underflow, growth_ratio >= growth_factor, or log_slope > slope_tol.
/// Otherwise Inconclusive.
RunOutcome classify_run(const DiagSeries& series, double horizon, RunStatus status, const DiagConfig& cfg);

/// Relative spread (max - min) / scale of the trailing `fraction` of a series.
/// `scale` <= 0 selects max |y| over the trailing window.
double trailing_variation(const std::vector<double>& times, const std::vector<double>& y, double fraction,
                          double scale = 0.0);

/// Records functional snapshots on every accepted step and audits the
/// per-step mass balance int u^{n+1} - int u^n = dt mu (int u^n - int (u^n)^2).
class DiagRecorder {
public:
    DiagRecorder(ModelParams params, DiagConfig cfg);

    RunHooks hooks();
    void on_start(const State& state);
    void on_step(const StepEvent& event);

    const DiagSeries& series() const { return series_; }
    DiagSeries take_series() { return std::move(series_); }
    /// Largest |defect| / (1 + int u^n) over all steps.
    double max_mass_defect() const { return max_mass_defect_; }
    /// True while every recorded u, v minimum is >= 0.
    bool nonnegative() const { return nonnegative_; }

private:
    ModelParams params_;
    DiagConfig cfg_;
    DiagSeries series_;
    double max_mass_defect_ = 0.0;
    bool nonnegative_ = true;
};

}  // namespace chemobound
