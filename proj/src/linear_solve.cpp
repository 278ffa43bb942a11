#include "chemobound/linear_solve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace chemobound {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Index of the low-side face (normal to `axis`) of `cell`.
std::size_t low_face(const GridSpec& spec, int axis, std::size_t cell) {
    const std::size_t s = spec.stride(axis);
    const std::size_t n = static_cast<std::size_t>(spec.cells(axis));
    return cell + s * (cell / (s * n));
}

}  // namespace

ImplicitOperator::ImplicitOperator(FaceField conductance, Field reaction)
    : coef_(std::move(conductance)), reaction_(std::move(reaction)), diag_(reaction_.spec(), 1.0) {
    const GridSpec& spec = reaction_.spec();
    if (coef_.spec() != spec) throw std::invalid_argument("implicit operator: grid mismatch");
    for (int a = 0; a < spec.dim(); ++a) {
        const std::size_t n = static_cast<std::size_t>(spec.cells(a));
        const std::size_t s = spec.stride(a);
        const double inv_h2 = 1.0 / (spec.spacing(a) * spec.spacing(a));
        auto& ca = coef_.axis(a);
        for_each_line(spec, a, [&](std::size_t c0, std::size_t f0) {
            ca[f0] = 0.0;
            ca[f0 + n * s] = 0.0;
            for (std::size_t k = 1; k < n; ++k) {
                double& kappa = ca[f0 + k * s];
                if (!(kappa >= 0.0)) throw std::invalid_argument("implicit operator: negative conductance");
                kappa *= inv_h2;
                diag_[c0 + (k - 1) * s] += kappa;
                diag_[c0 + k * s] += kappa;
            }
        });
    }
    for (std::size_t c = 0; c < diag_.size(); ++c) {
        if (!(reaction_[c] >= 0.0)) throw std::invalid_argument("implicit operator: negative reaction");
        diag_[c] += reaction_[c];
    }
}

ImplicitOperator ImplicitOperator::identity(const GridSpec& spec) {
    return ImplicitOperator(FaceField(spec), Field(spec, 0.0));
}

Field ImplicitOperator::apply(const Field& x) const {
    Field y(spec());
    apply(x, y);
    return y;
}

void ImplicitOperator::apply(const Field& x, Field& y) const {
    const GridSpec& spec = this->spec();
    for (std::size_t c = 0; c < x.size(); ++c) y[c] = x[c] + reaction_[c] * x[c];
    for (int a = 0; a < spec.dim(); ++a) {
        const std::size_t n = static_cast<std::size_t>(spec.cells(a));
        const std::size_t s = spec.stride(a);
        const auto& ca = coef_.axis(a);
        for_each_line(spec, a, [&](std::size_t c0, std::size_t f0) {
            for (std::size_t k = 1; k < n; ++k) {
                const std::size_t lo = c0 + (k - 1) * s;
                const double flux = ca[f0 + k * s] * (x[lo + s] - x[lo]);
                y[lo] -= flux;
                y[lo + s] += flux;
            }
        });
    }
}

Field ImplicitOperator::diagonal() const { return diag_; }

void ImplicitOperator::gauss_seidel_sweep(const Field& rhs, Field& x) const {
    const GridSpec& spec = this->spec();
    const int dim = spec.dim();
    for (std::size_t c = 0; c < x.size(); ++c) {
        double num = rhs[c];
        for (int a = 0; a < dim; ++a) {
            const std::size_t s = spec.stride(a);
            const std::size_t f = low_face(spec, a, c);
            const auto& ca = coef_.axis(a);
            // Boundary faces carry zero coefficient; skip them to stay in range.
            if (ca[f] > 0.0) num += ca[f] * x[c - s];
            if (ca[f + s] > 0.0) num += ca[f + s] * x[c + s];
        }
        x[c] = num / diag_[c];
    }
}

double norm2(const Field& f) { return std::sqrt(dot(f.values(), f.values())); }

SolveResult solve_spd(const ImplicitOperator& op, const Field& rhs, const SolveOptions& opts) {
    const GridSpec& spec = op.spec();
    SolveResult result;
    result.x = rhs;
    const double bnorm = norm2(rhs);
    if (bnorm == 0.0) {
        result.x = Field(spec, 0.0);
        return result;
    }
    const double target = opts.tol * bnorm;
    const Field diag = op.diagonal();

    Field r(spec), z(spec), p(spec), q(spec);
    Field& x = result.x;
    auto true_residual = [&]() {
        op.apply(x, q);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - q[i];
        return norm2(r);
    };

    double rnorm = true_residual();
    int iters = 0;
    // Outer loop restarts from the true residual if recursion drifted.
    for (int restart = 0; restart < 4 && rnorm > target; ++restart) {
        auto precondition = [&]() {
            if (opts.jacobi_preconditioner) {
                for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] / diag[i];
            } else {
                z.values() = r.values();
            }
        };
        precondition();
        p.values() = z.values();
        double rz = dot(r.values(), z.values());
        while (rnorm > target && iters < opts.max_iters) {
            op.apply(p, q);
            const double pq = dot(p.values(), q.values());
            if (!(pq > 0.0)) break;
            const double alpha = rz / pq;
            for (std::size_t i = 0; i < x.size(); ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            ++iters;
            rnorm = norm2(r);
            precondition();
            const double rz_next = dot(r.values(), z.values());
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
        }
        rnorm = true_residual();
        if (iters >= opts.max_iters) break;
    }

    result.iterations = iters;
    result.residual = rnorm / bnorm;
    if (!(rnorm <= target)) {
        std::ostringstream msg;
        msg << "conjugate gradients did not converge: relative residual " << result.residual << " after "
            << iters << " iterations";
        throw SolveFailure(msg.str(), iters, result.residual);
    }
    return result;
}

SolveResult solve_m_matrix(const ImplicitOperator& op, const Field& rhs, const SolveOptions& opts,
                           int max_polish_sweeps) {
    SolveResult result = solve_spd(op, rhs, opts);
    const double upper = rhs.max();
    Field& x = result.x;
    bool inside = true;
    for (double xi : x.values()) inside = inside && xi >= 0.0 && xi <= upper;
    if (inside || rhs.min() < 0.0) return result;

    for (auto& xi : x.values()) xi = std::clamp(xi, 0.0, upper);
    const double bnorm = norm2(rhs);
    Field ax(op.spec());
    double rel = 0.0;
    for (int sweep = 1; sweep <= max_polish_sweeps; ++sweep) {
        op.gauss_seidel_sweep(rhs, x);
        op.apply(x, ax);
        double r2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) r2 += (rhs[i] - ax[i]) * (rhs[i] - ax[i]);
        rel = std::sqrt(r2) / bnorm;
        result.polish_sweeps = sweep;
        if (rel <= opts.tol) {
            result.residual = rel;
            return result;
        }
    }
    std::ostringstream msg;
    msg << "positivity-preserving Gauss-Seidel polish did not reach tolerance: relative residual " << rel;
    throw SolveFailure(msg.str(), result.iterations + result.polish_sweeps, rel);
}

}  // namespace chemobound
