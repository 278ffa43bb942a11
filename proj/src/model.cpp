#include "chemobound/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chemobound {

namespace {

void require(bool ok, const char* field, const char* what) {
    if (!ok) {
        std::ostringstream msg;
        msg << "model: " << field << " " << what;
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

void ModelParams::validate() const {
    require(std::isfinite(chi) && chi >= 0.0, "chi", "must be nonnegative");
    require(std::isfinite(mu) && mu >= 0.0, "mu", "must be nonnegative");
    require(std::isfinite(m), "m", "must be finite");
    require(std::isfinite(c_d) && c_d > 0.0, "c_d", "must be positive");
    require(std::isfinite(lambda0) && lambda0 > 0.0, "lambda0", "must be positive");
}

void State::validate() const {
    if (u.spec() != v.spec()) throw std::invalid_argument("state: u and v live on different grids");
    if (u.size() != u.spec().size() || v.size() != v.spec().size()) {
        throw std::invalid_argument("state: field size does not match grid");
    }
    if (!u.all_finite() || !v.all_finite()) throw std::invalid_argument("state: non-finite value");
    if (u.min() < 0.0) throw std::invalid_argument("state: u has a negative value");
    if (v.min() < 0.0) throw std::invalid_argument("state: v has a negative value");
    if (!(t >= 0.0)) throw std::invalid_argument("state: negative time");
}

double diffusivity(double u, const ModelParams& params) {
    if (u < 0.0) throw std::domain_error("diffusivity: negative density (positivity violated upstream)");
    if (params.m == 1.0) return params.c_d;
    return params.c_d * std::pow(u + 1.0, params.m - 1.0);
}

FaceField face_diffusivity(const Field& u, const ModelParams& params) {
    const GridSpec& spec = u.spec();
    std::vector<double> cell_d(u.size());
    for (std::size_t c = 0; c < u.size(); ++c) cell_d[c] = diffusivity(u[c], params);

    FaceField d(spec);
    for (int a = 0; a < spec.dim(); ++a) {
        const std::size_t n = static_cast<std::size_t>(spec.cells(a));
        const std::size_t s = spec.stride(a);
        auto& da = d.axis(a);
        for_each_line(spec, a, [&](std::size_t c0, std::size_t f0) {
            for (std::size_t k = 1; k < n; ++k) {
                da[f0 + k * s] = 0.5 * (cell_d[c0 + (k - 1) * s] + cell_d[c0 + k * s]);
            }
        });
    }
    return d;
}

FaceField upwind_flux(const Field& u, const FaceField& velocity) {
    const GridSpec& spec = u.spec();
    FaceField flux(spec);
    for (int a = 0; a < spec.dim(); ++a) {
        const std::size_t n = static_cast<std::size_t>(spec.cells(a));
        const std::size_t s = spec.stride(a);
        const auto& wa = velocity.axis(a);
        auto& fa = flux.axis(a);
        for_each_line(spec, a, [&](std::size_t c0, std::size_t f0) {
            for (std::size_t k = 1; k < n; ++k) {
                const double w = wa[f0 + k * s];
                const double donor = w > 0.0 ? u[c0 + (k - 1) * s] : u[c0 + k * s];
                fa[f0 + k * s] = w * donor;
            }
        });
    }
    return flux;
}

Field rhs_u(const State& state, const ModelParams& params) {
    const Field& u = state.u;
    const GridSpec& spec = u.spec();

    FaceField diff = grad_faces(u);
    const FaceField d = face_diffusivity(u, params);
    FaceField velocity = grad_faces(state.v);
    for (int a = 0; a < spec.dim(); ++a) {
        for (std::size_t f = 0; f < diff.axis(a).size(); ++f) {
            diff.axis(a)[f] *= d.axis(a)[f];
            velocity.axis(a)[f] *= params.chi;
        }
    }
    const FaceField chemo = upwind_flux(u, velocity);
    for (int a = 0; a < spec.dim(); ++a) {
        for (std::size_t f = 0; f < diff.axis(a).size(); ++f) diff.axis(a)[f] -= chemo.axis(a)[f];
    }

    Field out = div_faces(diff);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += params.mu * (u[c] - u[c] * u[c]);
    return out;
}

Field rhs_v(const State& state, const ModelParams&) {
    Field out = laplacian_neumann(state.v);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] -= state.u[c] * state.v[c];
    return out;
}

double threshold_m(const ModelParams& params, double sup_v0, int dim) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("threshold_m: dim must be 1, 2 or 3");
    if (dim >= 3) return 1.0;
    if (params.chi == 0.0) return -std::numeric_limits<double>::infinity();
    return 1.0 - params.mu / (params.chi * (1.0 + params.lambda0 * sup_v0 * 8.0));
}

}  // namespace chemobound
