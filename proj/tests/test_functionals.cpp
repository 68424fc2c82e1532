#include <doctest.h>

#include <cmath>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/functionals.hpp"
#include "kirchhoff/operators.hpp"
#include "kirchhoff/random_fields.hpp"
#include "kirchhoff/rng.hpp"

using namespace kirchhoff;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

ModelParams random_params(Rng& rng, int n = 1) {
    ModelParams p;
    p.a = std::exp(rng.uniform(std::log(0.25), std::log(4.0)));
    p.b = std::exp(rng.uniform(std::log(0.25), std::log(4.0)));
    p.q = rng.uniform(3.2, 8.0);
    p.n = n;
    return p;
}

// Test-side oracle: plain bisection on I(lambda*u) without the production
// bracketing/Newton path.
double lambda_star_by_bisection(double A, double B, const ModelParams& p) {
    auto I_of_lambda = [&](double l) {
        return p.a * l * l * A + p.b * std::pow(l, 4.0) * A * A - std::pow(l, p.q + 1.0) * B;
    };
    double lo = 1e-8, hi = 1e8;
    REQUIRE(I_of_lambda(lo) > 0.0);
    REQUIRE(I_of_lambda(hi) < 0.0);
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(lo * hi);
        (I_of_lambda(mid) > 0.0 ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

} // namespace

TEST_SUITE("functionals") {

TEST_CASE("parameter validation") {
    CHECK(validate_params(ModelParams{1.0, 1.0, 5.0, 1}).ok());
    CHECK_FALSE(validate_params(ModelParams{-1.0, 1.0, 5.0, 1}).ok());
    CHECK_FALSE(validate_params(ModelParams{1.0, 0.0, 5.0, 1}).ok());
    CHECK_FALSE(validate_params(ModelParams{1.0, 1.0, 2.5, 1}).ok());

    // q = 3 gate: provisional without S, decided once S is supplied.
    CHECK(validate_params(ModelParams{1.0, 0.1, 3.0, 1}).ok());
    CHECK(validate_params(ModelParams{1.0, 0.01, 3.0, 1}, 0.5).ok()); // S^4 = 0.0625 > b
    CHECK_FALSE(validate_params(ModelParams{1.0, 0.1, 3.0, 1}, 0.5).ok());
    CHECK_THROWS_AS(ensure_valid(ModelParams{1.0, 0.1, 3.0, 1}, 0.5), std::domain_error);
}

TEST_CASE("J, I, E on the sine profile") {
    const ModelParams p{1.0, 1.0, 5.0, 1};
    const Mesh m = Mesh::interval(1.0, 255);
    const Field u = sine_mode(m, 1);

    // Continuum references from the closed-form integrals of sin^2, cos^2, sin^6.
    const double A = kPi * kPi / 2.0;
    const double B = 5.0 / 16.0;
    CHECK(energy_J(u, p) == doctest::Approx(0.5 * A + 0.25 * A * A - B / 6.0).epsilon(1e-3));
    CHECK(nehari_I(u, p) == doctest::Approx(A + A * A - B).epsilon(1e-3));
    CHECK(kirchhoff_energy_E(u, p) == doctest::Approx(0.5 * A + 0.25 * A * A).epsilon(1e-3));

    CHECK(energy_J(Field::zero(m), p) == 0.0);
    CHECK(nehari_I(Field::zero(m), p) == 0.0);
    CHECK(kirchhoff_energy_E(Field::zero(m), p) == 0.0);
}

TEST_CASE("E - J equals the reaction integral") {
    const Mesh m = Mesh::interval(1.0, 63);
    Rng rng(40);
    for (int trial = 0; trial < 20; ++trial) {
        const ModelParams p = random_params(rng);
        const Field u = random_direction(m, rng);
        const double B = std::pow(lp_norm(u, p.q + 1.0), p.q + 1.0);
        CHECK(kirchhoff_energy_E(u, p) - energy_J(u, p) ==
              doctest::Approx(B / (p.q + 1.0)).epsilon(1e-12));
    }
}

TEST_CASE("homogeneous scaling of J") {
    const Mesh m = Mesh::interval(1.0, 63);
    const ModelParams p{1.0, 1.0, 5.0, 1};
    Rng rng(41);
    const Field u = random_direction(m, rng);
    const double A = grad_norm_sq(u);
    const double B = std::pow(lp_norm(u, p.q + 1.0), p.q + 1.0);
    Field two_u = u;
    two_u *= 2.0;
    CHECK(energy_J(two_u, p) == doctest::Approx(fiber_energy(2.0, A, B, p)).epsilon(1e-12));
}

TEST_CASE("decomposition identity on random draws") {
    const Mesh m = Mesh::interval(1.0, 63);
    Rng rng(42);
    for (int trial = 0; trial < 1000; ++trial) {
        const ModelParams p = random_params(rng);
        const Field u = random_direction(m, rng);
        const double J = energy_J(u, p);
        const auto [first, second] = decomposition_check(u, p);
        const double A = grad_norm_sq(u);
        const double B = std::pow(lp_norm(u, p.q + 1.0), p.q + 1.0);
        const double scale = 0.5 * p.a * A + 0.25 * p.b * A * A + B / (p.q + 1.0);
        CHECK(std::abs(first - J) <= 1e-12 * scale);
        CHECK(std::abs(second - J) <= 1e-12 * scale);
    }
    const ModelParams p{1.0, 1.0, 5.0, 1};
    const auto zero = decomposition_check(Field::zero(m), p);
    CHECK(zero.first == 0.0);
    CHECK(zero.second == 0.0);
}

TEST_CASE("first variation pairs to I along the field itself") {
    const Mesh m = Mesh::interval(1.0, 63);
    Rng rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        const ModelParams p = random_params(rng);
        const Field u = random_direction(m, rng);
        const double A = grad_norm_sq(u);
        const double B = std::pow(lp_norm(u, p.q + 1.0), p.q + 1.0);
        const double paired = inner(j_prime_residual(u, p), u);
        const double I = nehari_I(u, p);
        CHECK(std::abs(paired - I) <= 1e-10 * std::max(p.a * A + p.b * A * A, B));
    }
}

TEST_CASE("gradient matches central finite differences of J") {
    const Mesh m = Mesh::interval(1.0, 63);
    const ModelParams p{1.0, 1.0, 5.0, 1};
    Rng rng(44);
    Field u = fourier_random(m, rng);
    u *= 1.0 / std::sqrt(grad_norm_sq(u));
    const Field r = j_prime_residual(u, p);
    const double eps = 1e-5;
    for (int dir = 0; dir < 20; ++dir) {
        Field v = fourier_random(m, rng);
        v *= 1.0 / std::sqrt(grad_norm_sq(v));
        const double fd =
            (energy_J(axpy(u, eps, v), p) - energy_J(axpy(u, -eps, v), p)) / (2.0 * eps);
        const double paired = inner(r, v);
        CHECK(std::abs(fd - paired) <= 1e-5 * std::max(std::abs(paired), 1e-12));
    }
    CHECK(grad_norm_sq(j_prime_residual(Field::zero(m), p)) == 0.0);
}

TEST_CASE("I-prime pairing identities") {
    const Mesh m = Mesh::interval(1.0, 63);
    Rng rng(45);
    const ModelParams p{1.0, 1.0, 5.0, 1};
    const Field u = random_direction(m, rng);
    CHECK(i_prime_pairing(u, Field::zero(m), p) == 0.0);

    const double A = grad_norm_sq(u);
    const double B = std::pow(lp_norm(u, p.q + 1.0), p.q + 1.0);
    CHECK(i_prime_pairing(u, u, p) ==
          doctest::Approx(2.0 * p.a * A + 4.0 * p.b * A * A - (p.q + 1.0) * B).epsilon(1e-10));

    // On the manifold the substitution B = aA + bA^2 gives a strictly negative value.
    const Field w = nehari_project(u, p);
    const double Aw = grad_norm_sq(w);
    const double expected = -p.a * (p.q - 1.0) * Aw - p.b * (p.q - 3.0) * Aw * Aw;
    CHECK(i_prime_pairing(w, w, p) == doctest::Approx(expected).epsilon(1e-7));
    CHECK(i_prime_pairing(w, w, p) < 0.0);
}

TEST_CASE("fiber root closed forms and bisection oracle") {
    const ModelParams p{1.0, 1.0, 5.0, 1};
    CHECK(fiber_lambda_star(1.0, 2.0, p).lambda_star == doctest::Approx(1.0).epsilon(1e-12));
    const double golden = std::sqrt((1.0 + std::sqrt(5.0)) / 2.0);
    CHECK(fiber_lambda_star(1.0, 1.0, p).lambda_star == doctest::Approx(golden).epsilon(1e-12));
    CHECK_THROWS_AS(fiber_lambda_star(0.0, 1.0, p), DegenerateInputError);
    CHECK_THROWS_AS(fiber_lambda_star(1.0, 0.0, p), DegenerateInputError);

    // q = 3 has a root only when B > b*A^2: a*A = (B - b*A^2) * l^2.
    const ModelParams cubic{1.0, 1.0, 3.0, 1};
    CHECK_THROWS_AS(fiber_lambda_star(1.0, 0.5, cubic), DegenerateInputError);
    CHECK(fiber_lambda_star(1.0, 3.0, cubic).lambda_star ==
          doctest::Approx(std::sqrt(1.0 / 2.0)).epsilon(1e-10));

    Rng rng(46);
    for (int trial = 0; trial < 50; ++trial) {
        const ModelParams pr = random_params(rng);
        const double A = std::exp(rng.uniform(-3.0, 3.0));
        const double B = std::exp(rng.uniform(-3.0, 3.0));
        const double mine = fiber_lambda_star(A, B, pr).lambda_star;
        CHECK(mine == doctest::Approx(lambda_star_by_bisection(A, B, pr)).epsilon(1e-9));
        const double I_proj = pr.a * mine * mine * A + pr.b * std::pow(mine, 4.0) * A * A -
                              std::pow(mine, pr.q + 1.0) * B;
        CHECK(std::abs(I_proj) <= 1e-10 * std::max(pr.a * A, B) *
                                      std::max(1.0, std::pow(mine, pr.q + 1.0)));
    }
}

TEST_CASE("fiber map is unimodal with its peak at lambda_star") {
    const Mesh m = Mesh::interval(1.0, 63);
    Rng rng(47);
    for (int trial = 0; trial < 20; ++trial) {
        const ModelParams p = random_params(rng);
        const Field u = random_direction(m, rng);
        const double A = grad_norm_sq(u);
        const double B = std::pow(lp_norm(u, p.q + 1.0), p.q + 1.0);
        const double ls = fiber_lambda_star(A, B, p).lambda_star;

        const int grid = 1000;
        int argmax = 0;
        double best = -1e300;
        int slope_changes = 0;
        double prev_diff = 0.0;
        double prev_val = 0.0;
        for (int i = 1; i <= grid; ++i) {
            const double lambda = 2.0 * ls * i / grid;
            const double val = fiber_energy(lambda, A, B, p);
            if (val > best) {
                best = val;
                argmax = i;
            }
            if (i > 1) {
                const double diff = val - prev_val;
                if (i > 2 && diff * prev_diff < 0.0) ++slope_changes;
                prev_diff = diff;
            }
            prev_val = val;
        }
        CHECK(slope_changes == 1); // increases to the peak, then decreases
        CHECK(std::abs(2.0 * ls * argmax / grid - ls) <= 2.0 * ls * 2.0 / grid);
    }
}

TEST_CASE("nehari projection properties") {
    const Mesh m = Mesh::interval(1.0, 127);
    const ModelParams p{1.0, 1.0, 5.0, 1};

    const Field u = sine_mode(m, 1);
    const Field w = nehari_project(u, p);
    const double Aw = grad_norm_sq(w);
    const double Bw = std::pow(lp_norm(w, p.q + 1.0), p.q + 1.0);
    CHECK(std::abs(nehari_I(w, p)) <= nehari_tolerance(Aw, Bw, p));

    // Already on the manifold: lambda* = 1.
    CHECK(fiber_lambda_star(Aw, Bw, p).lambda_star == doctest::Approx(1.0).epsilon(1e-8));

    // Ray invariance: u and 2u meet the manifold at the same point.
    Field two_u = u;
    two_u *= 2.0;
    const Field w2 = nehari_project(two_u, p);
    double worst = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) worst = std::max(worst, std::abs(w[i] - w2[i]));
    CHECK(worst <= 1e-8 * lp_norm(w, 2.0));

    CHECK_THROWS_AS(nehari_project(Field::zero(m), p), DegenerateInputError);
}

TEST_CASE("d0 formula") {
    CHECK(d0_lower_bound(ModelParams{1.0, 1.0, 5.0, 1}, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(d0_lower_bound(ModelParams{2.0, 1.0, 5.0, 1}, 1.0) ==
          doctest::Approx(2.0 / 3.0 * std::sqrt(2.0)).epsilon(1e-15));

    // Monotone decreasing in S.
    double prev = 1e300;
    for (double S = 0.25; S <= 4.0; S *= 1.3) {
        const double v = d0_lower_bound(ModelParams{1.0, 1.0, 5.0, 1}, S);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("projected sine dominates the explicit floor") {
    const Mesh m = Mesh::interval(1.0, 127);
    const ModelParams p{1.0, 1.0, 5.0, 1};
    const SobolevEstimate sob = sobolev_constant(m, p.q);
    const double d0 = d0_lower_bound(p, sob.S);
    const Field w = nehari_project(sine_mode(m, 1), p);
    CHECK(energy_J(w, p) >= d0);
}

TEST_CASE("sobolev constant: Rayleigh case and certified lower bounds") {
    const Mesh m = Mesh::interval(1.0, 63);

    // q + 1 = 2 reduces to the first eigenvalue.
    const SobolevEstimate rayleigh = sobolev_constant(m, 1.0);
    CHECK(rayleigh.S ==
          doctest::Approx(1.0 / std::sqrt(first_eigenvalue(m))).epsilon(1e-10));

    // Any single field certifies a lower bound for the sup.
    const SobolevEstimate est = sobolev_constant(m, 5.0);
    Rng rng(48);
    for (int trial = 0; trial < 25; ++trial) {
        const Field w = random_direction(m, rng);
        const double bound = lp_norm(w, 6.0) / std::sqrt(grad_norm_sq(w));
        CHECK(bound <= est.S * (1.0 + 1e-12));
    }
    CHECK(est.converged);
}

TEST_CASE("sobolev constant is Cauchy under refinement") {
    double prev = 0.0;
    bool have_prev = false;
    for (int n : {63, 127, 255}) {
        const double S = sobolev_constant(Mesh::interval(1.0, n), 5.0).S;
        if (have_prev) CHECK(std::abs(S - prev) <= 0.01 * S);
        prev = S;
        have_prev = true;
    }
}

TEST_CASE("strong monotonicity of the gradient-part variation") {
    const Mesh m = Mesh::interval(1.0, 63);
    Rng rng(49);
    for (int trial = 0; trial < 1000; ++trial) {
        const ModelParams p = random_params(rng);
        const Field u = random_direction(m, rng);
        const Field v = random_direction(m, rng);
        const Field diff = u - v;
        const double lhs = e_prime_pairing(u, diff, p) - e_prime_pairing(v, diff, p);
        const double floor = p.a * grad_norm_sq(diff);
        const double Au = grad_norm_sq(u);
        const double Av = grad_norm_sq(v);
        const double roundoff = 1e-10 * (p.a + p.b * (Au + Av)) * (Au + Av);
        CHECK(lhs >= floor - roundoff);
    }
}

} // TEST_SUITE
