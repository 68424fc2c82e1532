#include "kirchhoff/well.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/operators.hpp"
#include "kirchhoff/random_fields.hpp"

namespace kirchhoff {

WellReport well_depth(const Mesh& m, const ModelParams& p, const WellOptions& opts) {
    SobolevEstimate sob = sobolev_constant(m, p.q, opts.sobolev);
    ensure_valid(p, sob.S); // completes the q = 3 gate once S is known
    const double d0 = d0_lower_bound(p, sob.S);

    GroundStateReport ground = ground_state(m, p, opts.ground);
    std::vector<double> start_J;
    for (const auto& l : ground.starts)
        start_J.push_back(l.converged ? l.J : std::numeric_limits<double>::quiet_NaN());

    return WellReport{
        .d_est = ground.J,
        .d0 = d0,
        .S = sob.S,
        .num_starts = static_cast<int>(ground.starts.size()),
        .best_start_id = ground.start_id,
        .start_J = std::move(start_J),
        .ground = std::move(ground),
        .sobolev = std::move(sob),
    };
}

std::string to_string(StateClass c) {
    switch (c) {
        case StateClass::InsideW: return "InsideW";
        case StateClass::InsideV: return "InsideV";
        case StateClass::OnNehari: return "OnNehari";
        case StateClass::EnergyAboveD: return "EnergyAboveD";
        case StateClass::Zero: return "Zero";
    }
    return "unknown";
}

StateClass classify(const Field& u, const ModelParams& p, double d) {
    if (!(d > 0.0)) throw std::domain_error("classify: well depth must be positive");
    if (lp_norm(u, 2.0) == 0.0) return StateClass::Zero;

    const double A = grad_norm_sq(u);
    const double B = std::pow(lp_norm(u, p.q + 1.0), p.q + 1.0);
    const double I = nehari_I_of(A, B, p);
    const double J = energy_J_of(A, B, p);
    const double tol = nehari_tolerance(A, B, p);

    if (std::abs(I) <= tol && A > 0.0) return StateClass::OnNehari;
    if (I > tol && J < d) return StateClass::InsideW;
    if (I < -tol && J < d) return StateClass::InsideV;
    return StateClass::EnergyAboveD;
}

LevelSetBounds level_set_bounds(double s, const ModelParams& p, const Mesh& m, double d, double G,
                                double S) {
    if (!(s > d)) throw std::domain_error("level_set_bounds: requires s > d");
    if (!(G > 0.0) || !(S > 0.0))
        throw std::domain_error("level_set_bounds: G and S must be positive");

    LevelSetBounds b;
    b.s = s;
    b.G = G;
    const double q = p.q;
    const double n = static_cast<double>(p.n);
    b.gamma = q + 1.0 - n * (q - 1.0) / 2.0;
    if (!(b.gamma > 0.0)) throw std::domain_error("level_set_bounds: gamma must be positive");
    b.theta = std::pow(2.0 * (q + 1.0) * d / (q - 1.0), 1.0 / (q + 1.0)) / S;

    const double lambda1 = first_eigenvalue(m);
    b.K2 = std::sqrt(2.0 * (q + 1.0) * s / (p.a * lambda1 * (q - 1.0)));

    b.low_branch = q <= 1.0 + 4.0 / n;
    const double base = std::pow(p.a / G, 1.0 / b.gamma);
    const double expo = (4.0 - n * (q - 1.0)) / (2.0 * b.gamma);
    if (b.low_branch) {
        b.K1 = base * std::pow(b.theta, expo);
    } else {
        const double grad_cap = 2.0 * (q + 1.0) * s / (p.a * (q - 1.0)); // bound on ||grad u||^2
        b.K1 = base * std::pow(grad_cap, expo / 2.0);
    }
    return b;
}

double gn_ratio(const Field& u, const ModelParams& p) {
    const double A = grad_norm_sq(u);
    const double M = l2_norm_sq(u);
    if (!(A > 0.0) || !(M > 0.0)) return 0.0;
    const double B = std::pow(lp_norm(u, p.q + 1.0), p.q + 1.0);
    const double n = static_cast<double>(p.n);
    const double pexp = n * (p.q - 1.0) / 2.0;
    const double gamma = p.q + 1.0 - pexp;
    return B / (std::pow(A, pexp / 2.0) * std::pow(M, gamma / 2.0));
}

namespace {

// Preconditioned ascent on log(gn ratio); scale-invariant, so iterates are kept
// at unit Dirichlet norm.
double refine_gn_ratio(Field u, const ModelParams& p, int max_iter) {
    const double n = static_cast<double>(p.n);
    const double pexp = n * (p.q - 1.0) / 2.0;
    const double gamma = p.q + 1.0 - pexp;

    auto normalize = [](Field& f) {
        const double A = grad_norm_sq(f);
        if (A > 0.0) f *= 1.0 / std::sqrt(A);
        return A > 0.0;
    };
    if (!normalize(u)) return 0.0;

    double ratio = gn_ratio(u, p);
    for (int it = 0; it < max_iter && ratio > 0.0; ++it) {
        const double B = std::pow(lp_norm(u, p.q + 1.0), p.q + 1.0);
        const double M = l2_norm_sq(u);
        Field driver = u;
        for (double& x : driver.values) x = std::pow(std::abs(x), p.q - 1.0) * x;
        const Field Pq = solve_poisson(driver);
        const Field P2 = solve_poisson(u);

        // d = (q+1) P_q / B - pexp * u / A - gamma * P_2 / M, with A = 1.
        Field dir = u;
        for (std::size_t i = 0; i < dir.size(); ++i)
            dir[i] = (p.q + 1.0) * Pq[i] / B - pexp * u[i] - gamma * P2[i] / M;

        double eta = 1.0;
        bool improved = false;
        double gain = 0.0;
        for (int back = 0; back < 40 && !improved; ++back, eta *= 0.5) {
            Field trial = axpy(u, eta, dir);
            if (!normalize(trial)) continue;
            const double trial_ratio = gn_ratio(trial, p);
            if (trial_ratio > ratio) {
                gain = (trial_ratio - ratio) / ratio;
                u = std::move(trial);
                ratio = trial_ratio;
                improved = true;
            }
        }
        if (!improved || gain < 1e-12) break;
    }
    return ratio;
}

} // namespace

GnEstimate gn_constant_estimate(const Mesh& m, const ModelParams& p, int samples,
                                const GnOptions& opts) {
    if (samples < 1) throw std::domain_error("gn_constant_estimate: needs samples >= 1");

    GnEstimate est;
    std::vector<double> ratios;

    auto consider = [&](const Field& f, int id) {
        const double r = refine_gn_ratio(f, p, opts.refine_iterations);
        ratios.push_back(r);
        if (r > est.G) {
            est.G = r;
            est.best_sample = id;
        }
    };

    // Deterministic structured seeds first, then the random families.
    int id = 0;
    consider(first_eigenfunction(m), id++);
    consider(sine_mode(m, 2, 2), id++);
    for (double width : {0.2, 0.08, 0.03, 0.01}) consider(gaussian_bump(m, 0.5, width), id++);
    {
        // Single-node spike: the narrowest representable bump.
        Field spike = Field::zero(m);
        spike[spike.size() / 2] = 1.0;
        consider(spike, id++);
    }
    while (id < samples + 7) {
        Rng rng(Rng::derive_seed(opts.seed, static_cast<std::uint64_t>(id)));
        consider(random_direction(m, rng), id++);
    }

    est.samples = id;
    est.G_safe = est.G * opts.safety;
    std::sort(ratios.rbegin(), ratios.rend());
    ratios.resize(std::min<std::size_t>(ratios.size(), 5));
    est.top_ratios = std::move(ratios);
    if (!(est.G > 0.0)) throw NumericalError("gn_constant_estimate: all samples degenerate");
    return est;
}

LevelSetSampleSet sample_nehari_levelset(double s, const ModelParams& p, const Mesh& m, int count,
                                         std::uint64_t seed) {
    if (count < 1) throw std::domain_error("sample_nehari_levelset: needs count >= 1");

    LevelSetSampleSet set;
    set.attempted = count;
    for (int i = 0; i < count; ++i) {
        Rng rng(Rng::derive_seed(seed, static_cast<std::uint64_t>(i)));
        Field dir = random_direction(m, rng);
        if (!(grad_norm_sq(dir) > 0.0)) continue;
        Field u = Field::zero(m);
        try {
            u = nehari_project(dir, p);
        } catch (const DegenerateInputError&) {
            continue; // q = 3 rays without a fiber critical point
        }
        const double J = energy_J(u, p);
        if (!(J < s)) continue;
        set.l2_norms.push_back(std::sqrt(l2_norm_sq(u)));
        set.grad_norms_sq.push_back(grad_norm_sq(u));
        set.energies.push_back(J);
        set.fields.push_back(std::move(u));
    }
    if (!set.fields.empty()) {
        set.empirical_lambda_s = *std::min_element(set.l2_norms.begin(), set.l2_norms.end());
        set.empirical_Lambda_s = *std::max_element(set.l2_norms.begin(), set.l2_norms.end());
    }
    return set;
}

} // namespace kirchhoff
