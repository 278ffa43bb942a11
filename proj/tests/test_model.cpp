#include <cmath>
#include <limits>
#include <stdexcept>

#include <doctest.h>

#include "chemobound/model.hpp"
#include "test_util.hpp"

using namespace chemobound;
using testutil::random_field;

namespace {

ModelParams params(double chi, double mu, double m) {
    ModelParams p;
    p.chi = chi;
    p.mu = mu;
    p.m = m;
    return p;
}

}  // namespace

TEST_CASE("diffusivity values") {
    for (double m : {0.5, 1.0, 2.0, 3.7}) CHECK(diffusivity(0.0, params(1, 1, m)) == 1.0);
    ModelParams p = params(1, 1, 1);
    p.c_d = 2.5;
    for (double u : {0.0, 0.3, 7.0}) CHECK(diffusivity(u, p) == 2.5);
    CHECK(diffusivity(1.0, params(1, 1, 2)) == 2.0);
    CHECK_THROWS_AS(diffusivity(-1e-3, p), std::domain_error);
}

TEST_CASE("diffusivity monotonicity follows m") {
    for (double u = 0.0; u < 5.0; u += 0.25) {
        CHECK(diffusivity(u + 0.25, params(1, 1, 1.5)) > diffusivity(u, params(1, 1, 1.5)));
        CHECK(diffusivity(u + 0.25, params(1, 1, 0.8)) < diffusivity(u, params(1, 1, 0.8)));
    }
}

TEST_CASE("model params validation") {
    CHECK_NOTHROW(params(1, 1, 1.5).validate());
    CHECK_NOTHROW(params(0, 0, 1).validate());
    CHECK_THROWS_AS(params(-1, 1, 1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(params(1, -1, 1).validate(), std::invalid_argument);
    ModelParams p = params(1, 1, 1);
    p.c_d = 0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = params(1, 1, std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("state validation") {
    const GridSpec g = GridSpec::line(5);
    CHECK_NOTHROW(State{Field(g, 1), Field(g, 0), 0}.validate());
    CHECK_THROWS(State{Field(g, -1), Field(g, 0), 0}.validate());
    CHECK_THROWS(State{Field(g, 1), Field(GridSpec::line(6), 0), 0}.validate());
}

TEST_CASE("rhs_u on constant states") {
    const GridSpec g = GridSpec::square(6);
    const ModelParams p = params(1.3, 0.7, 1.5);
    const Field steady = rhs_u({Field(g, 1.0), Field(g, 2.0), 0}, p);
    for (double x : steady.values()) CHECK(x == 0.0);
    const Field logistic = rhs_u({Field(g, 1.8), Field(g, 0.4), 0}, p);
    for (double x : logistic.values()) {
        CHECK(x == doctest::Approx(0.7 * (1.8 - 1.8 * 1.8)).epsilon(1e-14));
    }
    const Field attractor = rhs_v({Field(g, 1.0), Field(g, 0.0), 0}, p);
    for (double x : attractor.values()) CHECK(x == 0.0);
}

TEST_CASE("rhs_u integrates to the logistic balance") {
    for (const GridSpec& g : {GridSpec::line(31), GridSpec(2, {12, 9, 1}, {1, 2, 1}), GridSpec::cube(5)}) {
        for (unsigned seed = 1; seed <= 5; ++seed) {
            const ModelParams p = params(0.5 * seed, 0.3 * seed, 0.6 + 0.3 * seed);
            const State s{random_field(g, seed, 0.1, 3.0), random_field(g, seed + 100, 0.0, 2.0), 0};
            Field u2(g);
            for (std::size_t c = 0; c < g.size(); ++c) u2[c] = s.u[c] * s.u[c];
            const double expected = p.mu * (integrate(s.u) - integrate(u2));
            double scale = 0.0;
            const Field r = rhs_u(s, p);
            for (double x : r.values()) scale += std::abs(x) * g.cell_volume();
            CHECK(std::abs(integrate(r) - expected) <= 1e-10 * std::max(scale, std::abs(expected)));
        }
    }
}

TEST_CASE("rhs_v examples") {
    const GridSpec g(2, {8, 8, 1}, {1, 1, 1});
    const ModelParams p = params(1, 1, 1);
    const Field zero_v = rhs_v({random_field(g, 1), Field(g, 0.0), 0}, p);
    for (double x : zero_v.values()) CHECK(x == 0.0);
    const Field consumed = rhs_v({Field(g, 1.0), Field(g, 0.6), 0}, p);
    for (double x : consumed.values()) CHECK(x == doctest::Approx(-0.6));
    const State s{random_field(g, 2, 0, 3), random_field(g, 3, 0, 2), 0};
    Field uv(g);
    for (std::size_t c = 0; c < g.size(); ++c) uv[c] = s.u[c] * s.v[c];
    CHECK(integrate(rhs_v(s, p)) == doctest::Approx(-integrate(uv)).epsilon(1e-12));
}

TEST_CASE("upwind flux takes the donor cell") {
    const GridSpec g = GridSpec::line(4);
    FaceField w(g);
    w.axis(0) = {0.0, 2.0, -1.0, 0.5, 0.0};
    const FaceField f = upwind_flux(Field(g, {1, 2, 3, 4}), w);
    const std::vector<double> expected{0.0, 2.0, -3.0, 1.5, 0.0};
    CHECK(f.axis(0) == expected);
}

TEST_CASE("threshold_m values") {
    ModelParams p = params(1, 1, 1.5);
    CHECK(threshold_m(p, 1.0, 3) == 1.0);
    CHECK(threshold_m(params(9, 0.01, 1), 5.0, 3) == 1.0);
    CHECK(threshold_m(p, 1.0, 2) == doctest::Approx(1.0 - 1.0 / 9.0).epsilon(1e-15));
    CHECK(threshold_m(params(1, 1e-14, 1), 1.0, 2) == doctest::Approx(1.0));
    CHECK(threshold_m(params(2, 0.5, 1), 1.0, 2) == doctest::Approx(1.0 - 0.5 / 18.0));
    CHECK(threshold_m(params(0, 1, 1), 1.0, 2) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("threshold_m monotonicity in two dimensions") {
    const ModelParams base = params(1, 1, 1);
    for (int dim : {1, 2}) {
        double prev = -1e300;
        for (double chi = 0.2; chi < 5; chi += 0.3) {
            ModelParams p = base;
            p.chi = chi;
            const double t = threshold_m(p, 1.0, dim);
            CHECK(t > prev);
            prev = t;
        }
        prev = 1e300;
        for (double mu = 0.1; mu < 5; mu += 0.3) {
            ModelParams p = base;
            p.mu = mu;
            const double t = threshold_m(p, 1.0, dim);
            CHECK(t < prev);
            prev = t;
        }
        prev = -1e300;
        for (double lam = 0.1; lam < 5; lam += 0.3) {
            ModelParams p = base;
            p.lambda0 = lam;
            const double t = threshold_m(p, 1.0, dim);
            CHECK(t > prev);
            prev = t;
        }
        prev = -1e300;
        for (double sv = 0.0; sv < 5; sv += 0.3) {
            const double t = threshold_m(base, sv, dim);
            CHECK(t > prev);
            prev = t;
        }
    }
}
