#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kirchhoff/evolution.hpp"
#include "kirchhoff/mesh.hpp"
#include "kirchhoff/model.hpp"

namespace kirchhoff {

struct GroundStateOptions {
    int starts = 8;
    int max_iterations = 4000;
    double residual_tol = 1e-6; // on ||J'(u)||_{H^-1}
    std::uint64_t seed = 20250;
};

struct GroundStateStart {
    int start_id = 0;
    double J = 0.0;
    double abs_I = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct GroundStateReport {
    explicit GroundStateReport(Field f) : v0(std::move(f)) {}

    Field v0;
    double J = 0.0;
    double abs_I = 0.0;
    double residual = 0.0;
    int iterations = 0;
    int start_id = 0;
    std::vector<GroundStateStart> starts;
};

/// Nehari-constrained minimization of J: from each random start, descend along the
/// inverse-Laplacian preconditioned gradient with backtracking on J, re-projecting
/// onto the manifold after every step; returns the converged run of minimal J.
/// Throws NumericalError when no start converges.
GroundStateReport ground_state(const Mesh& m, const ModelParams& p,
                               const GroundStateOptions& opts = {});

/// ||J'(u)||_{H^-1}; zero exactly at discrete stationary solutions.
double stationary_residual(const Field& u, const ModelParams& p);

/// (<I'(v0), v0>, I(v0)). At a ground state the first entry is strictly negative
/// (the Lagrange multiplier vanishes) and the second is ~0.
std::pair<double, double> lagrange_consistency_check(const Field& v0, const ModelParams& p);

struct OmegaLimitOptions {
    double residual_tol = 1e-6;
    double zero_threshold = 1e-6; // on ||grad u|| of the final snapshot
    int polish_max_iterations = 2000;
};

struct OmegaLimitReport {
    explicit OmegaLimitReport(Field star) : u_star(std::move(star)) {}

    std::vector<double> times;      // selected t_k
    std::vector<double> residuals;  // ||J'(u(t_k))||_{H^-1}
    std::vector<double> energies;   // J(u(t_k))
    std::vector<double> velocities; // ||du/dt||_2 at t_k
    Field u_star;
    bool u_star_is_zero = false;
    bool u_star_polished = false;
    double final_distance = 0.0; // ||grad(u(t_K) - u*)||_2
    double J_limit = 0.0;
};

/// Late-time analysis of a global trajectory: picks snapshot times where the
/// discrete velocity reaches a running minimum, measures stationarity there, and
/// produces the limit candidate u*.
OmegaLimitReport omega_limit_analysis(const Trajectory& traj, const ModelParams& p,
                                      const OmegaLimitOptions& opts = {});

} // namespace kirchhoff
