#include "chemobound/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace chemobound {

void DiagConfig::validate() const {
    if (p_list.empty()) throw std::invalid_argument("diagnostics: p_list must be nonempty");
    if (beta_list.empty()) throw std::invalid_argument("diagnostics: beta_list must be nonempty");
    for (double p : p_list) {
        if (!(p > 1.0)) throw std::invalid_argument("diagnostics: p_list entries must exceed 1");
    }
    for (double b : beta_list) {
        if (!(b > 1.0)) throw std::invalid_argument("diagnostics: beta_list entries must exceed 1");
    }
    if (!(tau > 0.0)) throw std::invalid_argument("diagnostics: tau must be positive");
    if (!(entropy_floor > 0.0)) throw std::invalid_argument("diagnostics: entropy_floor must be positive");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
        throw std::invalid_argument("diagnostics: window_fraction must lie in (0, 1]");
    }
    if (!(plateau_tol > 0.0)) throw std::invalid_argument("diagnostics: plateau_tol must be positive");
    if (!(growth_factor > 1.0)) throw std::invalid_argument("diagnostics: growth_factor must exceed 1");
    if (!(slope_tol > 0.0)) throw std::invalid_argument("diagnostics: slope_tol must be positive");
}

double DiagConfig::default_tau(double t_end) { return std::min(1.0, t_end / 6.0); }

DiagSeries::DiagSeries(std::vector<double> p_list, std::vector<double> beta_list, double tau)
    : p_list_(std::move(p_list)), beta_list_(std::move(beta_list)), tau_(tau) {}

void DiagSeries::append(DiagRecord record) {
    const std::array<double, 3> values{record.u_sq, record.dirichlet, record.lap_v_sq};
    if (records_.empty()) {
        cumulative_.push_back({0.0, 0.0, 0.0});
    } else {
        const DiagRecord& prev = records_.back();
        if (!(record.t > prev.t)) throw std::invalid_argument("diag series: times must be strictly increasing");
        const double dt = record.t - prev.t;
        const std::array<double, 3> before{prev.u_sq, prev.dirichlet, prev.lap_v_sq};
        std::array<double, 3> cum = cumulative_.back();
        for (int i = 0; i < 3; ++i) cum[i] += 0.5 * dt * (before[i] + values[i]);
        cumulative_.push_back(cum);
    }
    records_.push_back(std::move(record));
    windows_.push_back({trailing(0), trailing(1), trailing(2)});
}

// Integral over [max(t0, t - tau), t] of the piecewise-linear interpolant of
// the `field`-th windowed quantity, t the newest sample.
double DiagSeries::trailing(std::size_t field) const {
    const std::size_t last = records_.size() - 1;
    const double t = records_[last].t;
    const double start = t - tau_;
    if (start <= records_.front().t) return cumulative_[last][field];

    auto value = [&](std::size_t k) {
        const DiagRecord& r = records_[k];
        return field == 0 ? r.u_sq : field == 1 ? r.dirichlet : r.lap_v_sq;
    };
    // First sample strictly after `start`.
    std::size_t lo = 0, hi = last;
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (records_[mid].t > start) hi = mid; else lo = mid + 1;
    }
    const std::size_t k = lo;  // records_[k-1].t <= start < records_[k].t
    const double ta = records_[k - 1].t, tb = records_[k].t;
    const double fa = value(k - 1), fb = value(k);
    const double fs = fa + (fb - fa) * (start - ta) / (tb - ta);
    const double partial = 0.5 * (tb - start) * (fs + fb);
    return cumulative_[last][field] - cumulative_[k][field] + partial;
}

std::vector<double> DiagSeries::times() const {
    std::vector<double> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.t);
    return out;
}

std::vector<double> DiagSeries::sup_u() const {
    std::vector<double> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.sup_u);
    return out;
}

std::vector<double> DiagSeries::entropy() const {
    std::vector<double> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.entropy);
    return out;
}

double entropy(const Field& u, double floor) {
    double sum = 0.0;
    for (double x : u.values()) {
        const double y = std::max(x, floor);
        sum += y * std::log(y);
    }
    return sum * u.spec().cell_volume();
}

double dissipation(const Field& u, const ModelParams& params, double floor) {
    const GridSpec& spec = u.spec();
    const FaceField g = grad_faces(u);
    double sum = 0.0;
    for (int a = 0; a < spec.dim(); ++a) {
        const std::size_t n = static_cast<std::size_t>(spec.cells(a));
        const std::size_t s = spec.stride(a);
        const auto& ga = g.axis(a);
        for_each_line(spec, a, [&](std::size_t c0, std::size_t f0) {
            for (std::size_t k = 1; k < n; ++k) {
                const double grad = ga[f0 + k * s];
                if (grad == 0.0) continue;
                const double ubar = 0.5 * (u[c0 + (k - 1) * s] + u[c0 + k * s]);
                sum += diffusivity(ubar, params) * grad * grad / std::max(ubar, floor);
            }
        });
    }
    return sum * spec.cell_volume();
}

DiagRecord functional_snapshot(const State& state, const ModelParams& params, const DiagConfig& cfg) {
    const Field& u = state.u;
    const Field& v = state.v;
    const double vol = u.spec().cell_volume();

    DiagRecord r;
    r.t = state.t;
    r.mass = integrate(u);
    r.sup_u = u.max();
    r.min_u = u.min();
    r.sup_v = v.max();
    r.min_v = v.min();
    r.entropy = entropy(u, cfg.entropy_floor);
    r.dissipation = dissipation(u, params, cfg.entropy_floor);

    const FaceField grad_v = grad_faces(v);
    r.dirichlet = face_energy(grad_v);
    const Field grad_norm = cell_gradient_norm(grad_v);
    r.sup_grad_v = grad_norm.max();

    for (double p : cfg.p_list) {
        double s = 0.0;
        for (double x : u.values()) s += std::pow(x, p);
        r.lp.push_back(s * vol);
    }
    for (double beta : cfg.beta_list) {
        double s = 0.0;
        for (double x : grad_norm.values()) s += std::pow(x, 2.0 * beta);
        r.grad_v_powers.push_back(s * vol);
    }
    double usq = 0.0;
    for (double x : u.values()) usq += x * x;
    r.u_sq = usq * vol;

    const Field lap = laplacian_neumann(v);
    double lsq = 0.0;
    for (double x : lap.values()) lsq += x * x;
    r.lap_v_sq = lsq * vol;
    return r;
}

double gronwall_bound(double y0, double A, double B, double tau) {
    if (!(A > 0.0) || !(tau > 0.0)) throw std::invalid_argument("gronwall_bound: A and tau must be positive");
    return std::max(y0 + B, B / (A * tau) + 2.0 * B);
}

namespace {

// Trapezoid integral of the piecewise-linear interpolant of (times, h) over [a, b].
class PiecewiseLinearIntegral {
public:
    PiecewiseLinearIntegral(const std::vector<double>& t, const std::vector<double>& h) : t_(t), h_(h), cum_(t.size(), 0.0) {
        for (std::size_t k = 1; k < t.size(); ++k) cum_[k] = cum_[k - 1] + 0.5 * (t[k] - t[k - 1]) * (h[k] + h[k - 1]);
    }

    double integral(double a, double b) const { return at(b) - at(a); }

private:
    double at(double s) const {
        if (s <= t_.front()) return 0.0;
        if (s >= t_.back()) return cum_.back();
        const auto it = std::upper_bound(t_.begin(), t_.end(), s);
        const std::size_t k = static_cast<std::size_t>(it - t_.begin()) - 1;
        const double hs = h_[k] + (h_[k + 1] - h_[k]) * (s - t_[k]) / (t_[k + 1] - t_[k]);
        return cum_[k] + 0.5 * (s - t_[k]) * (h_[k] + hs);
    }

    const std::vector<double>& t_;
    const std::vector<double>& h_;
    std::vector<double> cum_;
};

}  // namespace

GronwallReport gronwall_verify(const std::vector<double>& times, const std::vector<double>& y,
                               const std::vector<double>& h, double A, double tau) {
    if (times.size() != y.size() || times.size() != h.size()) {
        throw std::invalid_argument("gronwall_verify: series lengths differ");
    }
    if (times.empty()) throw std::invalid_argument("gronwall_verify: empty series");
    GronwallReport report;
    const PiecewiseLinearIntegral H(times, h);
    const double t0 = times.front();
    const double T = times.back();
    if (T - t0 <= tau) {
        report.B = H.integral(t0, T);
    } else {
        for (double tk : times) {
            if (tk + tau <= T) report.B = std::max(report.B, H.integral(tk, tk + tau));
            if (tk - tau >= t0) report.B = std::max(report.B, H.integral(tk - tau, tk));
        }
    }
    report.bound = gronwall_bound(y.front(), A, report.B, tau);
    report.margin = std::numeric_limits<double>::infinity();
    const double slack = 1e-12 * std::max(1.0, std::abs(report.bound));
    for (std::size_t k = 0; k < y.size(); ++k) {
        report.margin = std::min(report.margin, report.bound - y[k]);
        if (y[k] > report.bound + slack) {
            report.violation_times.push_back(times[k]);
            if (!report.first_violation) report.first_violation = times[k];
        }
    }
    return report;
}

std::vector<double> fitted_forcing(const std::vector<double>& times, const std::vector<double>& y, double A) {
    const std::size_t n = times.size();
    std::vector<double> h(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double dt = times[k + 1] - times[k];
        const double g = std::max(0.0, (y[k + 1] - y[k]) / dt + 0.5 * A * (y[k] + y[k + 1]));
        h[k] = std::max(h[k], g);
        h[k + 1] = std::max(h[k + 1], g);
    }
    return h;
}

EntropyAudit audit_entropy(const DiagSeries& series, const ModelParams& params, double domain_volume) {
    const auto& recs = series.records();
    const std::vector<double> times = series.times();
    std::vector<double> y;
    y.reserve(recs.size());
    const double shift = domain_volume / std::numbers::e;
    for (const auto& r : recs) y.push_back(std::max(0.0, r.entropy + shift));

    constexpr double A = 1.0;
    EntropyAudit audit;
    std::vector<double> h;
    if (params.mu > 0.0) {
        const double weight = params.chi * params.chi / params.mu;
        const std::vector<double> needed = fitted_forcing(times, y, A);
        double c = 0.0;
        for (std::size_t k = 0; k < recs.size(); ++k) c = std::max(c, needed[k] - weight * recs[k].lap_v_sq);
        audit.fitted_constant = c;
        h.reserve(recs.size());
        for (const auto& r : recs) h.push_back(weight * r.lap_v_sq + c);
    } else {
        h = fitted_forcing(times, y, A);
    }
    audit.report = gronwall_verify(times, y, h, A, series.tau());
    return audit;
}

GronwallReport audit_lp(const DiagSeries& series, std::size_t p_index, double A) {
    if (p_index >= series.p_list().size()) throw std::out_of_range("audit_lp: p index out of range");
    std::vector<double> y;
    for (const auto& r : series.records()) y.push_back(r.lp[p_index]);
    const std::vector<double> times = series.times();
    return gronwall_verify(times, y, fitted_forcing(times, y, A), A, series.tau());
}

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::Bounded: return "Bounded";
        case Verdict::Growing: return "Growing";
        case Verdict::Inconclusive: return "Inconclusive";
    }
    return "unknown";
}

double trailing_variation(const std::vector<double>& times, const std::vector<double>& y, double fraction,
                          double scale) {
    if (times.empty()) return 0.0;
    const double t_from = times.back() - fraction * (times.back() - times.front());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double mag = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < t_from) continue;
        lo = std::min(lo, y[k]);
        hi = std::max(hi, y[k]);
        mag = std::max(mag, std::abs(y[k]));
    }
    const double denom = scale > 0.0 ? scale : mag;
    if (denom == 0.0) return 0.0;
    return (hi - lo) / denom;
}

RunOutcome classify_run(const DiagSeries& series, double horizon, RunStatus status, const DiagConfig& cfg) {
    RunOutcome out;
    if (series.empty()) return out;
    const auto& recs = series.records();

    const double sup_v0 = recs.front().sup_v;
    double prev_v = sup_v0;
    for (const auto& r : recs) {
        out.peak_sup_u = std::max(out.peak_sup_u, r.sup_u);
        out.entropy_peak = std::max(out.entropy_peak, r.entropy);
        if (r.sup_v > prev_v * (1.0 + 1e-14) || r.sup_v > sup_v0 * (1.0 + 1e-12)) out.v_max_principle_ok = false;
        prev_v = r.sup_v;
    }
    const double u0 = recs.front().sup_u;
    out.growth_ratio = u0 > 0.0 ? out.peak_sup_u / u0 : (out.peak_sup_u > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    out.complete = status == RunStatus::Completed && recs.back().t >= horizon * (1.0 - 1e-9);

    // Trailing window [horizon (1 - w), horizon].
    const double t_from = horizon * (1.0 - cfg.window_fraction);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    int count = 0;
    for (const auto& r : recs) {
        if (r.t < t_from) continue;
        lo = std::min(lo, r.sup_u);
        hi = std::max(hi, r.sup_u);
        if (r.sup_u > 0.0) {
            const double ly = std::log(r.sup_u);
            st += r.t;
            sy += ly;
            stt += r.t * r.t;
            sty += r.t * ly;
            ++count;
        }
    }
    out.plateau_ratio = hi > 0.0 ? (hi - lo) / hi : 0.0;
    if (count >= 2) {
        const double denom = count * stt - st * st;
        if (denom > 0.0) out.log_slope = (count * sty - st * sy) / denom;
    }

    if (status == RunStatus::DtUnderflow || out.growth_ratio >= cfg.growth_factor) {
        out.verdict = Verdict::Growing;
    } else if (!out.complete) {
        out.verdict = Verdict::Inconclusive;
    } else if (out.log_slope > cfg.slope_tol) {
        out.verdict = Verdict::Growing;
    } else if (out.plateau_ratio < cfg.plateau_tol) {
        out.verdict = Verdict::Bounded;
    } else {
        out.verdict = Verdict::Inconclusive;
    }
    return out;
}

DiagRecorder::DiagRecorder(ModelParams params, DiagConfig cfg)
    : params_(params), cfg_(std::move(cfg)), series_(cfg_.p_list, cfg_.beta_list, cfg_.tau) {
    cfg_.validate();
}

RunHooks DiagRecorder::hooks() {
    RunHooks h;
    h.on_start = [this](const State& s) { on_start(s); };
    h.on_step = [this](const StepEvent& e) { on_step(e); };
    return h;
}

void DiagRecorder::on_start(const State& state) {
    DiagRecord r = functional_snapshot(state, params_, cfg_);
    nonnegative_ = nonnegative_ && r.min_u >= 0.0 && r.min_v >= 0.0;
    series_.append(std::move(r));
}

void DiagRecorder::on_step(const StepEvent& event) {
    const DiagRecord& prev = series_.records().back();
    const double mass_before = prev.mass;
    const double sq_before = prev.u_sq;
    DiagRecord r = functional_snapshot(event.after, params_, cfg_);
    const double defect = std::abs(r.mass - mass_before - event.dt * params_.mu * (mass_before - sq_before));
    max_mass_defect_ = std::max(max_mass_defect_, defect / (1.0 + mass_before));
    nonnegative_ = nonnegative_ && r.min_u >= 0.0 && r.min_v >= 0.0;
    series_.append(std::move(r));
}

}  // namespace chemobound
