#pragma once

#include <array>
#include <string>
#include <vector>

#include "kirchhoff/functionals.hpp"
#include "kirchhoff/mesh.hpp"
#include "kirchhoff/model.hpp"

namespace kirchhoff {

enum class Scheme { SemiImplicit, FullyImplicit };

struct TimeStepConfig {
    double dt = 1e-4;          // initial step
    double t_end = 1.0;
    Scheme scheme = Scheme::SemiImplicit;
    double blowup_cap = 1e6;   // threshold on ||grad u||_2
    double dt_min = 1e-11;
    bool adaptive = true;
    int snapshot_stride = 100; // accepted steps between stored fields
    // Adaptive runs also reject steps whose relative ||u||_2^2 growth exceeds
    // this cap, so blow-up is resolved on the solution's own timescale.
    double growth_cap = 0.05;
};

enum class Outcome { GlobalDecay, BlowUp, ReachedTEnd };

std::string to_string(Outcome o);

/// Scalar series are recorded at every accepted step; full fields are stored
/// every snapshot_stride accepted steps (plus the initial and final states).
struct Trajectory {
    std::vector<double> times;
    std::vector<double> l2sq;      // ||u||_2^2
    std::vector<double> h1sq;      // ||grad u||_2^2
    std::vector<double> lq1;       // ||u||_{q+1}
    std::vector<double> energy;    // J(u)
    std::vector<double> nehari;    // I(u)
    std::vector<double> aux;       // H = J + ||u||_2^2
    std::vector<double> dissipation; // D(t), cumulative
    std::vector<double> velocity;  // ||du/dt||_2 of the arriving step; 0 at t = 0

    Outcome outcome = Outcome::ReachedTEnd;
    double blowup_time = 0.0; // meaningful only for Outcome::BlowUp

    std::vector<std::size_t> snapshot_rows; // row index of each stored field
    std::vector<Field> snapshots;

    std::size_t rows() const { return times.size(); }
};

/// One time step. SemiImplicit: one linear solve with the Kirchhoff coefficient
/// lagged at u. FullyImplicit: fixed-point iteration on that coefficient until
/// ||grad u||^2 stabilizes to 1e-10 relative (max 50 sweeps); the reaction stays
/// explicit in both schemes. `include_reaction = false` drops the source term
/// (pure Kirchhoff diffusion), used by scheme-order tests.
Field step(const Field& u, double dt, const ModelParams& p, Scheme scheme,
           bool include_reaction = true);

/// March until t_end, numerical blow-up, or decay to zero
/// (||grad u||^2 below 1e-14 of its initial value).
Trajectory simulate(const Field& u0, const ModelParams& p, const TimeStepConfig& cfg);

/// max over rows of |D(t) + J(u(t)) - J(u0)| / max(1, |J(u0)|).
double energy_identity_residual(const Trajectory& traj);

/// max over interior rows of |d/dt ||u||_2^2 + 2 I(u)| / max(1, 2|I(u)|),
/// central-differenced on the recorded series.
double dl2_identity_check(const Trajectory& traj);

struct DecayRates {
    double C1 = 0.0;
    double C2 = 0.0;
    double alpha = 0.0;
    double lambda1 = 0.0;
    double ratio = 0.0; // (J(u0)/d0)^{(q-1)/2}, must be < 1
};

/// Explicit decay constants; requires 0 < J0 < d0.
DecayRates decay_rates(double J0, double d0, const ModelParams& p, double lambda1);

struct DecayCheck {
    std::string name;
    double max_violation = 0.0; // max over rows of (lhs - rhs)/max(rhs, tiny)
    double worst_time = 0.0;
    bool pass = false;
};

struct DecayReport {
    std::array<DecayCheck, 4> checks;
    double empirical_rate_l2 = 0.0; // fitted exponent of ||u||_2^2
    double slack = 0.0;
    bool all_pass = false;
    DecayRates rates;
};

/// Checks the four exponential bounds at every recorded row with the given
/// relative slack, and fits the empirical L^2 decay exponent.
DecayReport verify_decay(const Trajectory& traj, const DecayRates& rates, const ModelParams& p,
                         double S, double slack = 0.02);

} // namespace kirchhoff
