#include <cmath>

#include <doctest.h>

#include "chemobound/linear_solve.hpp"
#include "test_util.hpp"

using namespace chemobound;
using testutil::random_field;

namespace {

FaceField uniform_faces(const GridSpec& g, double value) {
    FaceField f(g);
    for (int a = 0; a < g.dim(); ++a) std::fill(f.axis(a).begin(), f.axis(a).end(), value);
    return f;
}

double relative_residual(const ImplicitOperator& op, const Field& x, const Field& b) {
    const Field ax = op.apply(x);
    Field r(b.spec());
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = b[i] - ax[i];
    return norm2(r) / norm2(b);
}

ImplicitOperator random_operator(const GridSpec& g, unsigned seed) {
    FaceField kappa(g);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 2e-3);
    for (int a = 0; a < g.dim(); ++a) {
        for (auto& x : kappa.axis(a)) x = dist(rng);
    }
    return ImplicitOperator(kappa, random_field(g, seed + 1, 0.0, 0.5));
}

}  // namespace

TEST_CASE("identity operator returns rhs exactly") {
    const GridSpec g = GridSpec::square(8);
    const Field b = random_field(g, 1, -1, 1);
    const SolveResult r = solve_spd(ImplicitOperator::identity(g), b, {});
    CHECK(r.x.values() == b.values());
}

TEST_CASE("I - dt lap maps constants to themselves") {
    const GridSpec g = GridSpec::square(16);
    const ImplicitOperator op(uniform_faces(g, 0.1), Field(g, 0.0));
    const SolveResult r = solve_spd(op, Field(g, 2.5), {});
    for (double x : r.x.values()) CHECK(x == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("operator is symmetric with the documented diagonal") {
    const GridSpec g(2, {6, 7, 1}, {1, 2, 1});
    const ImplicitOperator op = random_operator(g, 4);
    const Field x = random_field(g, 5, -1, 1), y = random_field(g, 6, -1, 1);
    CHECK(testutil::dot(op.apply(x), y) == doctest::Approx(testutil::dot(x, op.apply(y))).epsilon(1e-13));
    const Field d = op.diagonal();
    for (std::size_t c = 0; c < g.size(); ++c) {
        Field e(g, 0.0);
        e[c] = 1.0;
        CHECK(op.apply(e)[c] == doctest::Approx(d[c]).epsilon(1e-14));
    }
}

TEST_CASE("random SPD stencil system on 32x32 meets tolerance on recomputed residual") {
    const GridSpec g = GridSpec::square(32);
    for (unsigned seed : {10u, 20u, 30u}) {
        const ImplicitOperator op = random_operator(g, seed);
        const Field b = random_field(g, seed + 7, -1, 1);
        for (bool jacobi : {false, true}) {
            SolveOptions opts;
            opts.tol = 1e-10;
            opts.jacobi_preconditioner = jacobi;
            const SolveResult r = solve_spd(op, b, opts);
            CHECK(relative_residual(op, r.x, b) <= opts.tol);
            CHECK(r.residual <= opts.tol);
        }
    }
}

TEST_CASE("non-convergence reports the final residual") {
    const GridSpec g = GridSpec::square(32);
    const ImplicitOperator op(uniform_faces(g, 10.0), Field(g, 0.0));
    SolveOptions opts;
    opts.max_iters = 2;
    opts.tol = 1e-14;
    try {
        solve_spd(op, random_field(g, 3), opts);
        FAIL("expected SolveFailure");
    } catch (const SolveFailure& e) {
        CHECK(e.residual() > opts.tol);
        CHECK(e.iterations() >= 2);
    }
}

TEST_CASE("M-matrix solve keeps nonnegative rhs inside [0, max rhs]") {
    const GridSpec g = GridSpec::square(24);
    for (unsigned seed = 1; seed <= 4; ++seed) {
        const ImplicitOperator op(uniform_faces(g, 0.05 * seed), random_field(g, seed, 0.0, 0.1));
        Field b = random_field(g, seed + 50, 0.0, 1.0);
        for (std::size_t c = 0; c < g.size(); c += 3) b[c] = 0.0;
        const SolveResult r = solve_m_matrix(op, b, {});
        CHECK(r.x.min() >= 0.0);
        CHECK(r.x.max() <= b.max());
        CHECK(relative_residual(op, r.x, b) <= 1e-12);
    }
}

TEST_CASE("Gauss-Seidel sweeps stay in the invariant box and converge") {
    const GridSpec g = GridSpec::line(20);
    const ImplicitOperator op(uniform_faces(g, 0.02), Field(g, 0.1));
    const Field b = random_field(g, 9);
    Field x(g, 0.0);
    for (int k = 0; k < 200; ++k) {
        op.gauss_seidel_sweep(b, x);
        CHECK(x.min() >= 0.0);
        CHECK(x.max() <= b.max());
    }
    CHECK(relative_residual(op, x, b) <= 1e-12);
}
