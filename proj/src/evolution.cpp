#include "kirchhoff/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/operators.hpp"

namespace kirchhoff {

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::GlobalDecay: return "GlobalDecay";
        case Outcome::BlowUp: return "BlowUp";
        case Outcome::ReachedTEnd: return "ReachedTEnd";
    }
    return "unknown";
}

namespace {

Field reaction(const Field& u, double q) {
    Field f = u;
    for (double& x : f.values) x = std::pow(std::abs(x), q - 1.0) * x;
    return f;
}

Field semi_implicit_step(const Field& u, double dt, const ModelParams& p, bool with_reaction,
                         double coeff_A) {
    Field rhs = u;
    rhs *= 1.0 / dt;
    if (with_reaction) rhs += reaction(u, p.q);
    return solve_helmholtz(1.0 / dt, p.a + p.b * coeff_A, rhs);
}

} // namespace

Field step(const Field& u, double dt, const ModelParams& p, Scheme scheme, bool include_reaction) {
    if (!(dt > 0.0)) throw std::domain_error("step: dt must be positive");
    const double A_lag = grad_norm_sq(u);
    Field next = semi_implicit_step(u, dt, p, include_reaction, A_lag);
    if (scheme == Scheme::SemiImplicit) return next;

    // Fixed-point sweeps on the nonlocal coefficient.
    double A_prev = grad_norm_sq(next);
    for (int sweep = 0; sweep < 50; ++sweep) {
        next = semi_implicit_step(u, dt, p, include_reaction, A_prev);
        const double A_new = grad_norm_sq(next);
        if (std::abs(A_new - A_prev) <= 1e-10 * std::max(A_new, 1e-300)) return next;
        A_prev = A_new;
    }
    std::ostringstream msg;
    msg << "fully implicit step: coefficient fixed point did not stabilize at dt = " << dt;
    throw NumericalError(msg.str());
}

namespace {

struct RowScalars {
    double l2sq, h1sq, lq1, J, I, H;
};

RowScalars measure(const Field& u, const ModelParams& p) {
    RowScalars r{};
    r.l2sq = l2_norm_sq(u);
    r.h1sq = grad_norm_sq(u);
    r.lq1 = lp_norm(u, p.q + 1.0);
    const double B = std::pow(r.lq1, p.q + 1.0);
    r.J = energy_J_of(r.h1sq, B, p);
    r.I = nehari_I_of(r.h1sq, B, p);
    r.H = r.J + r.l2sq;
    return r;
}

void push_row(Trajectory& t, double time, const RowScalars& s, double D, double vel) {
    t.times.push_back(time);
    t.l2sq.push_back(s.l2sq);
    t.h1sq.push_back(s.h1sq);
    t.lq1.push_back(s.lq1);
    t.energy.push_back(s.J);
    t.nehari.push_back(s.I);
    t.aux.push_back(s.H);
    t.dissipation.push_back(D);
    t.velocity.push_back(vel);
}

} // namespace

Trajectory simulate(const Field& u0, const ModelParams& p, const TimeStepConfig& cfg) {
    if (!(cfg.t_end > 0.0)) throw std::domain_error("simulate: t_end must be positive");
    if (!(cfg.dt > 0.0) || cfg.dt_min > cfg.dt)
        throw std::domain_error("simulate: needs 0 < dt_min <= dt");
    if (cfg.snapshot_stride < 1) throw std::domain_error("simulate: snapshot_stride must be >= 1");
    if (!all_finite(u0)) throw StructuralError("simulate: initial field has non-finite values");

    Trajectory traj;
    Field u = u0;
    RowScalars s = measure(u, p);
    const double h1sq_floor = 1e-14 * s.h1sq;
    double D = 0.0;
    double t = 0.0;
    push_row(traj, t, s, D, 0.0);
    traj.snapshot_rows.push_back(0);
    traj.snapshots.push_back(u);

    if (s.h1sq == 0.0) {
        traj.outcome = Outcome::GlobalDecay;
        return traj;
    }

    double dt = cfg.dt;
    const double initial_h1sq = s.h1sq;
    long clean_steps = 0;
    long accepted = 0;
    traj.outcome = Outcome::ReachedTEnd;

    while (t < cfg.t_end) {
        dt = std::min(dt, cfg.t_end - t);
        bool accepted_step = false;
        Field next = u;
        RowScalars sn{};

        while (!accepted_step) {
            bool step_ok = true;
            try {
                next = step(u, dt, p, cfg.scheme);
            } catch (const NumericalError&) {
                step_ok = false;
            }
            if (step_ok && !all_finite(next)) step_ok = false;
            if (step_ok) {
                sn = measure(next, p);
                // Discrete shadow of the energy identity: J must not increase.
                const double tol_step = 1e-8 * std::max(1.0, std::abs(s.J));
                if (!std::isfinite(sn.J) || sn.J > s.J + tol_step) step_ok = false;
                // Growth rate limiter (adaptive runs): a step may not multiply the
                // mass by more than 1 + growth_cap, otherwise the blow-up time
                // would be an artifact of dt rather than of the dynamics.
                if (step_ok && cfg.adaptive && sn.l2sq > s.l2sq * (1.0 + cfg.growth_cap))
                    step_ok = false;
            }
            if (step_ok) {
                accepted_step = true;
                break;
            }
            if (!cfg.adaptive) {
                std::ostringstream msg;
                msg << "time step failed at t = " << t << " with dt = " << dt
                    << " (non-adaptive run)";
                throw NumericalError(msg.str());
            }
            clean_steps = 0;
            dt *= 0.5;
            if (dt < cfg.dt_min) {
                // dt exhausted: growing gradients mean the continuation is a
                // numerical blow-up, anything else is a genuine solver failure.
                if (s.h1sq >= 2.0 * initial_h1sq || s.I < 0.0) {
                    traj.outcome = Outcome::BlowUp;
                    traj.blowup_time = t;
                    if (traj.snapshot_rows.back() != traj.rows() - 1) {
                        traj.snapshot_rows.push_back(traj.rows() - 1);
                        traj.snapshots.push_back(u);
                    }
                    return traj;
                }
                std::ostringstream msg;
                msg << "time step collapsed below dt_min = " << cfg.dt_min << " at t = " << t
                    << " without gradient growth (h1sq = " << s.h1sq << ", I = " << s.I << ")";
                throw NumericalError(msg.str());
            }
        }

        Field diff = next - u;
        const double vel = std::sqrt(l2_norm_sq(diff)) / dt;
        D += dt * vel * vel;
        t += dt;
        u = std::move(next);
        s = sn;
        ++accepted;
        push_row(traj, t, s, D, vel);

        const bool final_row = !(t < cfg.t_end);
        if (accepted % cfg.snapshot_stride == 0 || final_row) {
            traj.snapshot_rows.push_back(traj.rows() - 1);
            traj.snapshots.push_back(u);
        }

        if (std::sqrt(s.h1sq) >= cfg.blowup_cap) {
            traj.outcome = Outcome::BlowUp;
            traj.blowup_time = t;
            break;
        }
        if (s.h1sq <= h1sq_floor) {
            traj.outcome = Outcome::GlobalDecay;
            break;
        }

        if (cfg.adaptive) {
            ++clean_steps;
            if (clean_steps >= 20 && dt < cfg.dt) {
                dt = std::min(2.0 * dt, cfg.dt);
                clean_steps = 0;
            }
        }
    }

    if (traj.snapshot_rows.back() != traj.rows() - 1) {
        traj.snapshot_rows.push_back(traj.rows() - 1);
        traj.snapshots.push_back(u);
    }
    return traj;
}

double energy_identity_residual(const Trajectory& traj) {
    if (traj.rows() < 1) throw StructuralError("energy_identity_residual: empty trajectory");
    const double J0 = traj.energy.front();
    const double scale = std::max(1.0, std::abs(J0));
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.rows(); ++k)
        worst = std::max(worst, std::abs(traj.dissipation[k] + traj.energy[k] - J0) / scale);
    return worst;
}

double dl2_identity_check(const Trajectory& traj) {
    if (traj.rows() < 3) return 0.0;
    double worst = 0.0;
    for (std::size_t k = 1; k + 1 < traj.rows(); ++k) {
        const double dmdt =
            (traj.l2sq[k + 1] - traj.l2sq[k - 1]) / (traj.times[k + 1] - traj.times[k - 1]);
        const double denom = std::max(1.0, 2.0 * std::abs(traj.nehari[k]));
        worst = std::max(worst, std::abs(dmdt + 2.0 * traj.nehari[k]) / denom);
    }
    return worst;
}

DecayRates decay_rates(double J0, double d0, const ModelParams& p, double lambda1) {
    if (!(d0 > 0.0)) throw std::domain_error("decay_rates: d0 must be positive");
    if (!(J0 > 0.0) || !(J0 < d0))
        throw std::domain_error("decay_rates: requires 0 < J(u0) < d0");
    DecayRates r;
    r.lambda1 = lambda1;
    r.ratio = std::pow(J0 / d0, (p.q - 1.0) / 2.0);
    r.C1 = 2.0 * p.a * lambda1 * (1.0 - r.ratio);
    r.alpha = 8.0 * (1.0 - r.ratio) / (2.0 - 4.0 * r.ratio / (p.q + 1.0));
    r.C2 = p.a * lambda1 * r.alpha * (p.q - 1.0) /
           (p.a * lambda1 * (p.q - 1.0) + 2.0 * (p.q + 1.0));
    return r;
}

namespace {

DecayCheck run_check(const std::string& name, const Trajectory& traj,
                     const std::vector<double>& lhs, double amplitude, double rate,
                     double slack) {
    DecayCheck c;
    c.name = name;
    c.max_violation = -1e300;
    for (std::size_t k = 0; k < traj.rows(); ++k) {
        const double bound = amplitude * std::exp(-rate * traj.times[k]);
        const double violation = (lhs[k] - bound) / std::max(bound, 1e-300);
        if (violation > c.max_violation) {
            c.max_violation = violation;
            c.worst_time = traj.times[k];
        }
    }
    c.pass = c.max_violation <= slack;
    return c;
}

} // namespace

DecayReport verify_decay(const Trajectory& traj, const DecayRates& rates, const ModelParams& p,
                         double S, double slack) {
    if (!(rates.ratio < 1.0) || !(rates.C1 > 0.0))
        throw std::domain_error("verify_decay: rates outside the J(u0) < d0 regime");
    if (traj.rows() < 2) throw StructuralError("verify_decay: trajectory too short");

    const double J0 = traj.energy.front();
    const double m0 = traj.l2sq.front();
    const double q = p.q;
    const double front_factor = 2.0 * (q + 1.0) / (p.a * (q - 1.0)) * (J0 + m0);

    DecayReport rep;
    rep.rates = rates;
    rep.slack = slack;

    std::vector<double> lq1sq(traj.rows());
    for (std::size_t k = 0; k < traj.rows(); ++k) lq1sq[k] = traj.lq1[k] * traj.lq1[k];

    rep.checks[0] = run_check("l2sq_vs_C1", traj, traj.l2sq, m0, rates.C1, slack);
    rep.checks[1] = run_check("h1sq_vs_C2", traj, traj.h1sq, front_factor, rates.C2, slack);
    rep.checks[2] = run_check("lq1sq_vs_C2", traj, lq1sq, S * S * front_factor, rates.C2, slack);
    rep.checks[3] = run_check("H_vs_C2", traj, traj.aux, J0 + m0, rates.C2, slack);

    // Least-squares slope of log(l2sq), restricted above the noise floor.
    const double floor = 1e-12 * std::max(m0, 1e-300);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < traj.rows(); ++k) {
        if (traj.l2sq[k] <= floor) continue;
        const double x = traj.times[k];
        const double y = std::log(traj.l2sq[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count >= 2) {
        const double nc = static_cast<double>(count);
        const double denom = nc * sxx - sx * sx;
        if (denom > 0.0) rep.empirical_rate_l2 = -(nc * sxy - sx * sy) / denom;
    }

    rep.all_pass = true;
    for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
    return rep;
}

} // namespace kirchhoff
