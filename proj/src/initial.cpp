#include "chemobound/harness.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace chemobound {

namespace {

// Uniform draw in [0, 1) from the top 53 bits, identical on every platform.
double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void require_nonnegative(double x, const char* what) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw std::invalid_argument(std::string("initial: '") + what + "' must be finite and nonnegative");
    }
}

}  // namespace

State make_initial(const InitialCondition& ic, const GridSpec& grid, std::uint64_t seed) {
    State s{Field(grid, 0.0), Field(grid, 0.0), 0.0};
    require_nonnegative(ic.v, "v");

    if (ic.generator == "uniform") {
        require_nonnegative(ic.u, "u");
        s.u = Field(grid, ic.u);
        s.v = Field(grid, ic.v);
    } else if (ic.generator == "gaussian-bump") {
        require_nonnegative(ic.amplitude, "amplitude");
        require_nonnegative(ic.background, "background");
        if (!(ic.width > 0.0)) throw std::invalid_argument("initial: 'width' must be positive");
        std::array<double, 3> center{};
        for (int a = 0; a < grid.dim(); ++a) {
            center[a] = ic.center[a] < 0.0 ? 0.5 * grid.lengths()[a] : ic.center[a];
        }
        const double two_w2 = 2.0 * ic.width * ic.width;
        for (std::size_t c = 0; c < grid.size(); ++c) {
            const auto x = grid.cell_center(c);
            double r2 = 0.0;
            for (int a = 0; a < grid.dim(); ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
            s.u[c] = ic.background + ic.amplitude * std::exp(-r2 / two_w2);
        }
        s.v = Field(grid, ic.v);
    } else if (ic.generator == "random-perturbation") {
        require_nonnegative(ic.u, "u");
        require_nonnegative(ic.amplitude, "amplitude");
        require_nonnegative(ic.v_amplitude, "v_amplitude");
        std::mt19937_64 rng(seed);
        for (std::size_t c = 0; c < grid.size(); ++c) {
            s.u[c] = std::max(0.0, ic.u + ic.amplitude * (2.0 * unit_draw(rng) - 1.0));
        }
        for (std::size_t c = 0; c < grid.size(); ++c) {
            s.v[c] = std::max(0.0, ic.v + ic.v_amplitude * (2.0 * unit_draw(rng) - 1.0));
        }
    } else {
        throw std::invalid_argument("initial: unknown generator '" + ic.generator + "'");
    }
    return s;
}

}  // namespace chemobound
