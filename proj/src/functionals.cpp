#include "kirchhoff/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/operators.hpp"
#include "kirchhoff/random_fields.hpp"

namespace kirchhoff {

namespace {

// |u|^{q-1} u, nodewise.
Field reaction_term(const Field& u, double q) {
    Field f = u;
    for (double& x : f.values) x = std::pow(std::abs(x), q - 1.0) * x;
    return f;
}

double b_integral(const Field& u, double q) {
    const double s = lp_norm(u, q + 1.0);
    return std::pow(s, q + 1.0);
}

} // namespace

double energy_J_of(double A, double B, const ModelParams& p) {
    return 0.5 * p.a * A + 0.25 * p.b * A * A - B / (p.q + 1.0);
}

double nehari_I_of(double A, double B, const ModelParams& p) {
    return p.a * A + p.b * A * A - B;
}

double fiber_energy(double lambda, double A, double B, const ModelParams& p) {
    const double l2 = lambda * lambda;
    return 0.5 * p.a * l2 * A + 0.25 * p.b * l2 * l2 * A * A -
           std::pow(lambda, p.q + 1.0) * B / (p.q + 1.0);
}

double energy_J(const Field& u, const ModelParams& p) {
    return energy_J_of(grad_norm_sq(u), b_integral(u, p.q), p);
}

double nehari_I(const Field& u, const ModelParams& p) {
    return nehari_I_of(grad_norm_sq(u), b_integral(u, p.q), p);
}

double kirchhoff_energy_E(const Field& u, const ModelParams& p) {
    const double A = grad_norm_sq(u);
    return 0.5 * p.a * A + 0.25 * p.b * A * A;
}

Field j_prime_residual(const Field& u, const ModelParams& p) {
    const double A = grad_norm_sq(u);
    Field r = laplacian(u);
    const Field f = reaction_term(u, p.q);
    const double coeff = p.a + p.b * A;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = -coeff * r[i] - f[i];
    return r;
}

double i_prime_pairing(const Field& u, const Field& v, const ModelParams& p) {
    require_same_mesh(u, v, "i_prime_pairing");
    const double A = grad_norm_sq(u);
    Field neg_lap = laplacian(u);
    neg_lap *= -1.0;
    const double dirichlet = inner(neg_lap, v);
    return (2.0 * p.a + 4.0 * p.b * A) * dirichlet - (p.q + 1.0) * inner(reaction_term(u, p.q), v);
}

double e_prime_pairing(const Field& u, const Field& w, const ModelParams& p) {
    require_same_mesh(u, w, "e_prime_pairing");
    const double A = grad_norm_sq(u);
    Field neg_lap = laplacian(u);
    neg_lap *= -1.0;
    return (p.a + p.b * A) * inner(neg_lap, w);
}

std::pair<double, double> decomposition_check(const Field& u, const ModelParams& p) {
    const double A = grad_norm_sq(u);
    const double B = b_integral(u, p.q);
    const double I = nehari_I_of(A, B, p);
    const double q = p.q;
    const double first = p.a * (q - 1.0) / (2.0 * (q + 1.0)) * A +
                         p.b * (q - 3.0) / (4.0 * (q + 1.0)) * A * A + I / (q + 1.0);
    const double second = 0.25 * p.a * A + (q - 3.0) / (4.0 * (q + 1.0)) * B + 0.25 * I;
    return {first, second};
}

double nehari_tolerance(double A, double B, const ModelParams& p) {
    return 1e-8 * std::max(p.a * A, B);
}

FiberResult fiber_lambda_star(double A, double B, const ModelParams& p) {
    if (!(A > 0.0) || !(B > 0.0))
        throw DegenerateInputError("fiber_lambda_star: needs ||grad u|| > 0 and ||u||_{q+1} > 0");

    // g(l) = a*A + b*l^2*A^2 - l^{q-1}*B has g(0+) > 0 and exactly one sign change
    // for q > 3; for q = 3 a root exists only if B > b*A^2.
    const auto g = [&](double l) {
        return p.a * A + p.b * l * l * A * A - std::pow(l, p.q - 1.0) * B;
    };
    if (p.q == 3.0 && !(B > p.b * A * A))
        throw DegenerateInputError(
            "fiber_lambda_star: q = 3 with ||u||_4^4 <= b*||grad u||^4 has no projection");

    FiberResult out;
    double lo = 1.0, hi = 1.0;
    int iters = 0;
    if (g(1.0) > 0.0) {
        while (g(hi) > 0.0) {
            hi *= 2.0;
            if (++iters > 2000) throw NumericalError("fiber_lambda_star: bracket expansion failed");
        }
        lo = hi / 2.0;
    } else {
        while (g(lo) <= 0.0) {
            lo *= 0.5;
            if (++iters > 2000) throw NumericalError("fiber_lambda_star: bracket contraction failed");
        }
        hi = lo * 2.0;
    }
    out.bracket = {lo, hi};

    while ((hi - lo) > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        ++iters;
    }
    double lambda = 0.5 * (lo + hi);

    // Newton polish on g; two steps take the root to machine accuracy.
    for (int k = 0; k < 3; ++k) {
        const double gp = 2.0 * p.b * lambda * A * A - (p.q - 1.0) * std::pow(lambda, p.q - 2.0) * B;
        if (gp == 0.0) break;
        const double next = lambda - g(lambda) / gp;
        if (!(next > 0.5 * lo) || !(next < 2.0 * hi) || !std::isfinite(next)) break;
        lambda = next;
        ++iters;
    }
    out.lambda_star = lambda;
    out.iterations = iters;
    return out;
}

Field nehari_project(const Field& u, const ModelParams& p) {
    const double A = grad_norm_sq(u);
    const double B = b_integral(u, p.q);
    if (!(A > 0.0) || !(B > 0.0))
        throw DegenerateInputError("nehari_project: zero field has no Nehari representative");
    const FiberResult fr = fiber_lambda_star(A, B, p);
    Field out = u;
    out *= fr.lambda_star;
    return out;
}

double d0_lower_bound(const ModelParams& p, double S) {
    if (!(S > 0.0)) throw std::domain_error("d0_lower_bound: S must be positive");
    const double q = p.q;
    return p.a * (q - 1.0) / (2.0 * (q + 1.0)) *
           std::pow(p.a / std::pow(S, q + 1.0), 2.0 / (q - 1.0));
}

namespace {

// One ascent run for the ratio ||w||_{q+1} / ||grad w||_2, starting from `w`.
// Direction is the inverse-Laplacian preconditioned gradient of log(ratio); with
// unit Dirichlet norm and full step this is the classical normalized inverse
// iteration for the extremal equation.
SobolevStartLog sobolev_ascent(Field w, double q, int max_iter, double tol, int start_id) {
    SobolevStartLog log;
    log.start_id = start_id;

    auto normalize = [](Field& f) {
        const double A = grad_norm_sq(f);
        if (A > 0.0) f *= 1.0 / std::sqrt(A);
        return A > 0.0;
    };
    if (!normalize(w)) return log;

    const double r = q + 1.0;
    double ratio = lp_norm(w, r);
    int it = 0;
    while (it < max_iter) {
        ++it;
        Field driver = w;
        for (double& x : driver.values) x = std::pow(std::abs(x), q - 1.0) * x;
        const Field precond = solve_poisson(driver);
        const double B = std::pow(ratio, r); // A == 1 after normalization

        // d = P/B - w is the preconditioned gradient of log ratio at unit norm;
        // the full step eta = 1 is the classical normalized inverse iteration.
        double eta = 1.0;
        bool improved = false;
        double gain = 0.0;
        for (int back = 0; back < 40 && !improved; ++back, eta *= 0.5) {
            Field trial = w;
            for (std::size_t i = 0; i < trial.size(); ++i)
                trial[i] = w[i] + eta * (precond[i] / B - w[i]);
            if (!normalize(trial)) continue;
            const double trial_ratio = lp_norm(trial, r);
            if (trial_ratio > ratio) {
                gain = (trial_ratio - ratio) / ratio;
                w = std::move(trial);
                ratio = trial_ratio;
                improved = true;
            }
        }
        if (!improved || gain < tol) {
            log.converged = true;
            break;
        }
    }
    log.ratio = ratio;
    log.iterations = it;
    return log;
}

} // namespace

SobolevEstimate sobolev_constant(const Mesh& m, double q, const SobolevOptions& opts) {
    if (!(q + 1.0 >= 2.0)) throw std::domain_error("sobolev_constant: needs q + 1 >= 2");

    SobolevEstimate est;
    for (int s = 0; s < opts.starts; ++s) {
        Field w0 = Field::zero(m);
        if (s == 0) {
            w0 = first_eigenfunction(m);
        } else if (s == 1) {
            w0 = gaussian_bump(m, 0.5, 0.1);
        } else {
            Rng rng(Rng::derive_seed(opts.seed, static_cast<std::uint64_t>(s)));
            w0 = random_direction(m, rng);
        }
        est.starts.push_back(sobolev_ascent(std::move(w0), q, opts.max_iterations, opts.ratio_tol, s));
    }

    for (const auto& log : est.starts) {
        if (log.ratio > est.S) {
            est.S = log.ratio;
            est.best_start = log.start_id;
            est.converged = log.converged;
        }
    }
    if (!(est.S > 0.0)) throw NumericalError("sobolev_constant: all starts degenerate");
    return est;
}

} // namespace kirchhoff
