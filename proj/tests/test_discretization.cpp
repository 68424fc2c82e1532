#include <doctest.h>

#include <cmath>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/operators.hpp"
#include "kirchhoff/random_fields.hpp"
#include "kirchhoff/rng.hpp"

using namespace kirchhoff;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

Field sampled_sine(const Mesh& m, int mode = 1) { return sine_mode(m, mode, mode); }

// Test-side oracle: inverse power iteration on the discrete operator.
double first_eigenvalue_by_power_iteration(const Mesh& m) {
    Rng rng(99);
    Field v = fourier_random(m, rng);
    double lambda_prev = 0.0;
    for (int it = 0; it < 500; ++it) {
        v = solve_poisson(v);
        const double norm = std::sqrt(l2_norm_sq(v));
        REQUIRE(norm > 0.0);
        v *= 1.0 / norm;
        const double lambda = grad_norm_sq(v) / l2_norm_sq(v);
        if (it > 2 && std::abs(lambda - lambda_prev) <= 1e-10 * lambda) return lambda;
        lambda_prev = lambda;
    }
    return lambda_prev;
}

double max_abs_diff(const Field& u, const Field& v) {
    double worst = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) worst = std::max(worst, std::abs(u[i] - v[i]));
    return worst;
}

} // namespace

TEST_SUITE("discretization") {

TEST_CASE("mesh invariants") {
    const Mesh m = Mesh::interval(1.0, 255);
    CHECK(m.spacing(0) == 1.0 / 256.0);
    CHECK(m.node_count() == 255);
    const Mesh r = Mesh::rectangle(2.0, 1.0, 31, 15);
    CHECK(r.spacing(0) == doctest::Approx(2.0 / 32.0).epsilon(1e-15));
    CHECK(r.spacing(1) == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
    CHECK(r.node_count() == 31u * 15u);
    CHECK_THROWS_AS(Mesh::interval(-1.0, 5), StructuralError);
    CHECK_THROWS_AS(Mesh::interval(1.0, 0), StructuralError);
}

TEST_CASE("laplacian hand stencils") {
    const Mesh m1 = Mesh::interval(1.0, 9);
    CHECK(max_abs_diff(laplacian(Field::zero(m1)), Field::zero(m1)) == 0.0);

    // Single interior node, h = 1/2: (0 - 2 + 0)/h^2 = -8.
    const Mesh tiny = Mesh::interval(1.0, 1);
    const Field one(tiny, {1.0});
    CHECK(laplacian(one)[0] == doctest::Approx(-8.0).epsilon(1e-15));
}

TEST_CASE("laplacian converges on the sine eigenfunction at order 2") {
    double err_coarse = 0.0, err_fine = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        const int n = pass == 0 ? 63 : 127;
        const Mesh m = Mesh::interval(1.0, n);
        const Field u = sampled_sine(m);
        Field expected = u;
        expected *= -kPi * kPi;
        const double err = max_abs_diff(laplacian(u), expected);
        (pass == 0 ? err_coarse : err_fine) = err;
    }
    CHECK(err_fine < err_coarse);
    const double order = std::log2(err_coarse / err_fine);
    CHECK(order >= 1.9);
}

TEST_CASE("grad_norm_sq hand value and analytic limit") {
    const Mesh tiny = Mesh::interval(1.0, 1);
    CHECK(grad_norm_sq(Field(tiny, {1.0})) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(grad_norm_sq(Field::zero(tiny)) == 0.0);

    // integral of (pi cos(pi x))^2 over (0,1) = pi^2/2
    double err_coarse = 0.0, err_fine = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        const int n = pass == 0 ? 63 : 127;
        const Field u = sampled_sine(Mesh::interval(1.0, n));
        const double err = std::abs(grad_norm_sq(u) - kPi * kPi / 2.0);
        (pass == 0 ? err_coarse : err_fine) = err;
    }
    const double order = std::log2(err_coarse / err_fine);
    CHECK(order >= 1.9); // mesh-refinement invariant
}

TEST_CASE("lp_norm quadrature") {
    const Mesh tiny = Mesh::interval(1.0, 1);
    CHECK(lp_norm(Field(tiny, {1.0}), 2.0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(lp_norm(Field::zero(tiny), 3.7) == 0.0);
    CHECK_THROWS_AS(lp_norm(Field(tiny, {1.0}), 0.5), std::domain_error);

    // integral of sin^6 over (0,1) = 5/16
    const Field u = sampled_sine(Mesh::interval(1.0, 255));
    CHECK(lp_norm(u, 6.0) ==
          doctest::Approx(std::pow(5.0 / 16.0, 1.0 / 6.0)).epsilon(1e-4));
}

TEST_CASE("inner product basics and sine orthogonality") {
    const Mesh m = Mesh::interval(1.0, 63);
    Rng rng(7);
    const Field u = fourier_random(m, rng);
    CHECK(inner(u, Field::zero(m)) == 0.0);
    const double l2 = lp_norm(u, 2.0);
    CHECK(inner(u, u) == doctest::Approx(l2 * l2).epsilon(1e-13));

    // Discrete sine modes are exactly orthogonal.
    CHECK(std::abs(inner(sine_mode(m, 1), sine_mode(m, 2))) < 1e-14);

    const Mesh other = Mesh::interval(1.0, 31);
    CHECK_THROWS_AS(inner(u, Field::zero(other)), StructuralError);
}

TEST_CASE("first eigenvalue closed form") {
    const Mesh m = Mesh::interval(1.0, 3);
    CHECK(first_eigenvalue(m) ==
          doctest::Approx(32.0 * (1.0 - std::cos(kPi / 4.0))).epsilon(1e-15));

    // Monotone convergence to pi^2 from below as the mesh refines.
    double prev = 0.0;
    for (int n : {15, 31, 63, 127, 255}) {
        const double lam = first_eigenvalue(Mesh::interval(1.0, n));
        CHECK(lam > prev);
        CHECK(lam < kPi * kPi);
        prev = lam;
    }
    CHECK(prev == doctest::Approx(kPi * kPi).epsilon(1e-4));

    // Tensor-product structure on the unit square.
    const Mesh sq = Mesh::rectangle(1.0, 1.0, 31, 31);
    CHECK(first_eigenvalue(sq) ==
          doctest::Approx(2.0 * first_eigenvalue(Mesh::interval(1.0, 31))).epsilon(1e-14));
}

TEST_CASE("first eigenvalue matches inverse power iteration") {
    for (const Mesh& m : {Mesh::interval(1.0, 63), Mesh::rectangle(1.0, 1.0, 15, 15)}) {
        const double closed = first_eigenvalue(m);
        const double iterated = first_eigenvalue_by_power_iteration(m);
        CHECK(std::abs(closed - iterated) <= 1e-9 * closed);
    }
}

TEST_CASE("poisson solve: zero, inverse consistency, analytic solution") {
    const Mesh m = Mesh::interval(1.0, 127);
    CHECK(max_abs_diff(solve_poisson(Field::zero(m)), Field::zero(m)) == 0.0);

    Rng rng(11);
    const Field u = fourier_random(m, rng);
    Field minus_lap = laplacian(u);
    minus_lap *= -1.0;
    CHECK(max_abs_diff(solve_poisson(minus_lap), u) < 1e-10);

    // -phi'' = pi^2 sin(pi x) has phi = sin(pi x); discretely exact for the
    // discrete eigenfunction pair, O(h^2) against the continuum forcing.
    Field rhs = sampled_sine(m);
    rhs *= kPi * kPi;
    const Field phi = solve_poisson(rhs);
    CHECK(max_abs_diff(phi, sampled_sine(m)) < 5e-4);
}

TEST_CASE("poisson solve in 2D via conjugate gradient") {
    const Mesh m = Mesh::rectangle(1.0, 1.0, 31, 31);
    Rng rng(13);
    const Field u = fourier_random(m, rng);
    Field minus_lap = laplacian(u);
    minus_lap *= -1.0;
    const Field back = solve_poisson(minus_lap);
    CHECK(max_abs_diff(back, u) <= 1e-8 * std::max(1.0, std::sqrt(l2_norm_sq(u))));
}

TEST_CASE("h_minus1_norm: eigenfunction value and homogeneity") {
    const Mesh m = Mesh::interval(1.0, 63);
    CHECK(h_minus1_norm(Field::zero(m)) == 0.0);

    Field e1 = first_eigenfunction(m);
    e1 *= 1.0 / lp_norm(e1, 2.0);
    const double expected = 1.0 / std::sqrt(first_eigenvalue(m));
    CHECK(h_minus1_norm(e1) == doctest::Approx(expected).epsilon(1e-10));

    Rng rng(17);
    const Field r = fourier_random(m, rng);
    Field r3 = r;
    r3 *= -3.0;
    CHECK(h_minus1_norm(r3) == doctest::Approx(3.0 * h_minus1_norm(r)).epsilon(1e-12));
}

TEST_CASE("self-adjointness and Dirichlet-form consistency") {
    for (const Mesh& m : {Mesh::interval(1.0, 63), Mesh::rectangle(1.0, 2.0, 15, 11)}) {
        Rng rng(23);
        for (int trial = 0; trial < 50; ++trial) {
            const Field u = fourier_random(m, rng);
            const Field v = fourier_random(m, rng);
            Field lu = laplacian(u);
            lu *= -1.0;
            Field lv = laplacian(v);
            lv *= -1.0;
            const double left = inner(lu, v);
            const double right = inner(u, lv);
            const double scale = std::max({std::abs(left), std::abs(right), 1e-300});
            CHECK(std::abs(left - right) <= 1e-12 * scale);

            const double form = grad_norm_sq(u);
            CHECK(std::abs(inner(lu, u) - form) <= 1e-12 * form);
        }
    }
}

TEST_CASE("Poincare inequality for random fields") {
    const Mesh m = Mesh::interval(1.0, 63);
    const double lambda1 = first_eigenvalue(m);
    Rng rng(29);
    for (int trial = 0; trial < 1000; ++trial) {
        const Field u = random_direction(m, rng);
        CHECK(lambda1 * l2_norm_sq(u) <= grad_norm_sq(u) * (1.0 + 1e-10));
    }
}

TEST_CASE("homogeneity of the norms") {
    const Mesh m = Mesh::interval(1.0, 63);
    Rng rng(31);
    const Field u = fourier_random(m, rng);
    Field cu = u;
    cu *= -2.5;
    CHECK(grad_norm_sq(cu) == doctest::Approx(6.25 * grad_norm_sq(u)).epsilon(1e-13));
    CHECK(lp_norm(cu, 6.0) == doctest::Approx(2.5 * lp_norm(u, 6.0)).epsilon(1e-13));
}

} // TEST_SUITE
