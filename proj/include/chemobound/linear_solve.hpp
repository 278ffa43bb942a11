#pragma once

/// @file linear_solve.hpp
/// @brief Symmetric M-matrix systems arising from the implicit steps.
///
/// Operators have the form  A x = (1 + sigma) x - div(kappa grad x)  with
/// kappa >= 0 on faces and sigma >= 0 on cells. Such A is symmetric positive
/// definite, has nonpositive off-diagonals and row sums >= 1.

#include <cstddef>
#include <stdexcept>
#include <string>

#include "chemobound/grid.hpp"

namespace chemobound {

class ImplicitOperator {
public:
    /// Identity plus `reaction` (sigma) minus div(kappa grad). Boundary
    /// conductances are ignored (zero flux).
    ImplicitOperator(FaceField conductance, Field reaction);

    static ImplicitOperator identity(const GridSpec& spec);

    const GridSpec& spec() const { return reaction_.spec(); }

    Field apply(const Field& x) const;
    void apply(const Field& x, Field& y) const;
    Field diagonal() const;

    /// One forward Gauss-Seidel sweep in place. Every update is a ratio of
    /// sums of nonnegative terms whenever rhs >= 0 and x >= 0, so the iterate
    /// stays in [0, max rhs].
    void gauss_seidel_sweep(const Field& rhs, Field& x) const;

private:
    FaceField coef_;  // kappa / h^2 on interior faces
    Field reaction_;
    Field diag_;
};

struct SolveOptions {
    double tol = 1e-12;          ///< relative residual target ||b - Ax|| <= tol ||b||
    int max_iters = 5000;
    bool jacobi_preconditioner = false;
};

struct SolveResult {
    Field x;
    int iterations = 0;
    double residual = 0.0;  ///< final true residual norm, relative to ||b||
    int polish_sweeps = 0;
};

class SolveFailure : public std::runtime_error {
public:
    SolveFailure(const std::string& what, int iterations, double residual)
        : std::runtime_error(what), iterations_(iterations), residual_(residual) {}
    int iterations() const { return iterations_; }
    double residual() const { return residual_; }

private:
    int iterations_;
    double residual_;
};

double norm2(const Field& f);

/// Conjugate gradients from the initial guess x0 = rhs. Throws SolveFailure
/// carrying the final residual when max_iters is exhausted.
SolveResult solve_spd(const ImplicitOperator& op, const Field& rhs, const SolveOptions& opts);

/// solve_spd for rhs >= 0, followed (only if the CG iterate left the box
/// [0, max rhs] containing the exact solution) by Gauss-Seidel sweeps from
/// the projected iterate until the residual target is met again.
SolveResult solve_m_matrix(const ImplicitOperator& op, const Field& rhs, const SolveOptions& opts,
                           int max_polish_sweeps = 500);

}  // namespace chemobound
