#pragma once

/// @file model.hpp
/// @brief Right-hand sides of the consumption chemotaxis system
///
///   u_t = div(D(u) grad u) - chi div(u grad v) + mu (u - u^2)
///   v_t = lap v - u v
///
/// with D(u) = c_d (u + 1)^(m - 1) and zero-flux boundaries, plus the
/// boundedness threshold on m.

#include "chemobound/grid.hpp"

namespace chemobound {

struct ModelParams {
    double chi = 1.0;      ///< chemosensitivity; 0 only in verification runs
    double mu = 1.0;       ///< logistic rate, >= 0
    double m = 1.0;        ///< diffusion exponent
    double c_d = 1.0;      ///< diffusivity floor constant, > 0
    double lambda0 = 1.0;  ///< maximal-regularity constant, > 0

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct State {
    Field u;
    Field v;
    double t = 0.0;

    /// Throws std::invalid_argument on grid mismatch, negative or non-finite values.
    void validate() const;
};

/// c_d (u + 1)^(m - 1). Throws std::domain_error for u < 0.
double diffusivity(double u, const ModelParams& params);

/// Arithmetic mean of D(u) on interior faces; boundary faces are zero.
FaceField face_diffusivity(const Field& u, const ModelParams& params);

/// Upwinded advective flux u * w on each face: the donor cell is the one the
/// face velocity w points away from. Boundary faces are zero.
FaceField upwind_flux(const Field& u, const FaceField& velocity);

/// Discrete div(D(u) grad u) - chi div(u grad v) + mu (u - u^2).
Field rhs_u(const State& state, const ModelParams& params);

/// Discrete lap v - u v.
Field rhs_v(const State& state, const ModelParams& params);

/// 1 - mu / (chi (1 + 8 lambda0 sup_v0)) for dim <= 2, and 1 for dim >= 3.
double threshold_m(const ModelParams& params, double sup_v0, int dim);

}  // namespace chemobound
