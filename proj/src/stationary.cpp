#include "kirchhoff/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/functionals.hpp"
#include "kirchhoff/operators.hpp"
#include "kirchhoff/random_fields.hpp"

namespace kirchhoff {

double stationary_residual(const Field& u, const ModelParams& p) {
    return h_minus1_norm(j_prime_residual(u, p));
}

std::pair<double, double> lagrange_consistency_check(const Field& v0, const ModelParams& p) {
    return {i_prime_pairing(v0, v0, p), nehari_I(v0, p)};
}

namespace {

GroundStateStart minimize_from(Field u, const ModelParams& p, const GroundStateOptions& opts,
                               int start_id, Field* out_field) {
    GroundStateStart log;
    log.start_id = start_id;

    u = nehari_project(u, p);
    double J = energy_J(u, p);

    // Phase 1: projected gradient with backtracking on J. Stops when J-decreases
    // sink below floating-point resolution of J, which happens long before the
    // residual target is reached on large-energy problems.
    int it = 0;
    double residual = stationary_residual(u, p);
    while (it < opts.max_iterations && residual > opts.residual_tol) {
        ++it;
        const Field grad = j_prime_residual(u, p);
        const Field direction = solve_poisson(grad); // descent direction in the H^1_0 metric

        double eta = 1.0;
        bool moved = false;
        for (int back = 0; back < 60 && !moved; ++back, eta *= 0.5) {
            Field trial = axpy(u, -eta, direction);
            if (!(grad_norm_sq(trial) > 0.0)) continue;
            if (!(lp_norm(trial, p.q + 1.0) > 0.0)) continue;
            trial = nehari_project(trial, p);
            const double J_trial = energy_J(trial, p);
            if (J_trial < J) {
                u = std::move(trial);
                J = J_trial;
                moved = true;
            }
        }
        residual = stationary_residual(u, p);
        if (!moved) break;
    }

    // Phase 2: same step, judged on the dual-norm residual instead of J. The
    // iterate is already in the basin of one critical point, and the residual has
    // numerical headroom down to ~1e-12 where J differences do not.
    while (it < opts.max_iterations && residual > opts.residual_tol) {
        ++it;
        const Field grad = j_prime_residual(u, p);
        const Field direction = solve_poisson(grad);

        double eta = 1.0;
        bool moved = false;
        for (int back = 0; back < 40 && !moved; ++back, eta *= 0.5) {
            Field trial = axpy(u, -eta, direction);
            if (!(grad_norm_sq(trial) > 0.0)) continue;
            if (!(lp_norm(trial, p.q + 1.0) > 0.0)) continue;
            trial = nehari_project(trial, p);
            const double res_trial = stationary_residual(trial, p);
            if (res_trial < residual) {
                u = std::move(trial);
                residual = res_trial;
                moved = true;
            }
        }
        if (!moved) break; // at the floating-point residual floor
    }
    J = energy_J(u, p);

    const double A = grad_norm_sq(u);
    const double lq = lp_norm(u, p.q + 1.0);
    log.J = J;
    log.abs_I = std::abs(nehari_I(u, p));
    log.residual = residual;
    log.iterations = it;
    log.converged = residual <= opts.residual_tol &&
                    log.abs_I <= nehari_tolerance(A, std::pow(lq, p.q + 1.0), p);
    *out_field = std::move(u);
    return log;
}

Field start_field(const Mesh& m, std::uint64_t seed, int start_id) {
    if (start_id == 0) return first_eigenfunction(m);
    if (start_id == 1) return gaussian_bump(m, 0.5, 0.12);
    Rng rng(Rng::derive_seed(seed, static_cast<std::uint64_t>(start_id)));
    return random_direction(m, rng);
}

} // namespace

GroundStateReport ground_state(const Mesh& m, const ModelParams& p, const GroundStateOptions& opts) {
    ensure_valid(p);
    if (opts.starts < 1) throw std::domain_error("ground_state: needs at least one start");

    struct StartOutcome {
        GroundStateStart log;
        Field field = Field(Mesh::interval(1.0, 1), {0.0});
    };

    auto run_start = [&](int s) {
        StartOutcome out;
        out.field = Field::zero(m);
        out.log = minimize_from(start_field(m, opts.seed, s), p, opts, s, &out.field);
        return out;
    };

    // Starts are independent; reduce by (J, id) afterwards so scheduling cannot
    // change the result.
    std::vector<std::future<StartOutcome>> futures;
    futures.reserve(static_cast<std::size_t>(opts.starts));
    for (int s = 0; s < opts.starts; ++s)
        futures.push_back(std::async(std::launch::async, run_start, s));

    std::vector<StartOutcome> outcomes;
    outcomes.reserve(futures.size());
    for (auto& f : futures) outcomes.push_back(f.get());

    GroundStateReport rep(Field::zero(m));
    bool have_best = false;
    for (auto& o : outcomes) {
        rep.starts.push_back(o.log);
        if (!o.log.converged) continue;
        if (!have_best || o.log.J < rep.J) {
            have_best = true;
            rep.v0 = std::move(o.field);
            rep.J = o.log.J;
            rep.abs_I = o.log.abs_I;
            rep.residual = o.log.residual;
            rep.iterations = o.log.iterations;
            rep.start_id = o.log.start_id;
        }
    }
    if (!have_best) {
        std::ostringstream msg;
        msg << "ground_state: no start converged; per-start (J, residual, iterations):";
        for (const auto& l : rep.starts)
            msg << " [" << l.start_id << ": " << l.J << ", " << l.residual << ", " << l.iterations
                << "]";
        throw NumericalError(msg.str());
    }
    return rep;
}

namespace {

// Unconstrained descent on J toward the nearest critical point, used to polish an
// almost-stationary late-time state. Small fields slide to the zero solution.
Field polish_to_stationary(Field u, const ModelParams& p, double tol, int max_iter) {
    double J = energy_J(u, p);
    for (int it = 0; it < max_iter; ++it) {
        if (stationary_residual(u, p) <= tol) break;
        const Field grad = j_prime_residual(u, p);
        const Field direction = solve_poisson(grad);
        double eta = 1.0;
        bool moved = false;
        for (int back = 0; back < 60 && !moved; ++back, eta *= 0.5) {
            Field trial = axpy(u, -eta, direction);
            const double J_trial = energy_J(trial, p);
            if (J_trial < J) {
                u = std::move(trial);
                J = J_trial;
                moved = true;
            }
        }
        if (!moved) break;
    }
    return u;
}

} // namespace

OmegaLimitReport omega_limit_analysis(const Trajectory& traj, const ModelParams& p,
                                      const OmegaLimitOptions& opts) {
    if (traj.outcome == Outcome::BlowUp)
        throw std::domain_error("omega_limit_analysis: trajectory is not global");
    if (traj.snapshots.empty() || traj.snapshots.size() != traj.snapshot_rows.size())
        throw StructuralError("omega_limit_analysis: trajectory lacks stored snapshot fields");

    OmegaLimitReport rep(Field::zero(traj.snapshots.front().mesh));

    // Running minima of the discrete velocity pick out the paper-style sequence
    // t_k along which the state approaches stationarity.
    double best_vel = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const std::size_t row = traj.snapshot_rows[k];
        const double vel = traj.velocity[row];
        const bool is_final = k + 1 == traj.snapshots.size();
        if (row == 0 && traj.snapshots.size() > 1) continue; // no arriving step yet
        if (vel <= best_vel || is_final) {
            best_vel = std::min(best_vel, vel);
            rep.times.push_back(traj.times[row]);
            rep.residuals.push_back(stationary_residual(traj.snapshots[k], p));
            rep.energies.push_back(traj.energy[row]);
            rep.velocities.push_back(vel);
        }
    }

    const Field& last = traj.snapshots.back();
    const double last_h1 = std::sqrt(grad_norm_sq(last));
    const double last_residual = rep.residuals.empty() ? stationary_residual(last, p)
                                                       : rep.residuals.back();
    if (last_h1 <= opts.zero_threshold) {
        rep.u_star_is_zero = true; // zero solves the stationary problem
        rep.u_star = Field::zero(last.mesh);
    } else if (last_residual <= opts.residual_tol) {
        rep.u_star = last;
    } else {
        rep.u_star = polish_to_stationary(last, p, opts.residual_tol, opts.polish_max_iterations);
        rep.u_star_polished = true;
    }

    Field diff = last - rep.u_star;
    rep.final_distance = std::sqrt(grad_norm_sq(diff));
    rep.J_limit = traj.energy[traj.snapshot_rows.back()];
    return rep;
}

} // namespace kirchhoff
