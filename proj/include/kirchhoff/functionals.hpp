#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kirchhoff/mesh.hpp"
#include "kirchhoff/model.hpp"

namespace kirchhoff {

/// J(u) = (a/2)||grad u||^2 + (b/4)||grad u||^4 - ||u||_{q+1}^{q+1}/(q+1)
double energy_J(const Field& u, const ModelParams& p);

/// I(u) = a||grad u||^2 + b||grad u||^4 - ||u||_{q+1}^{q+1}
double nehari_I(const Field& u, const ModelParams& p);

/// E(u) = (a/2)||grad u||^2 + (b/4)||grad u||^4, the gradient part of J.
double kirchhoff_energy_E(const Field& u, const ModelParams& p);

/// Scalar forms in terms of A = ||grad u||^2 and B = ||u||_{q+1}^{q+1}.
double energy_J_of(double A, double B, const ModelParams& p);
double nehari_I_of(double A, double B, const ModelParams& p);

/// J(lambda*u) as a function of lambda along the ray through (A, B).
double fiber_energy(double lambda, double A, double B, const ModelParams& p);

/// Field r with inner(r, v) equal to the first variation of J at u in direction v:
/// r = -(a + b*A)*laplacian(u) - |u|^{q-1} u.
Field j_prime_residual(const Field& u, const ModelParams& p);

/// First variation of I at u paired with v.
double i_prime_pairing(const Field& u, const Field& v, const ModelParams& p);

/// First variation of the gradient part E at u paired with w:
/// (a + b*A) * inner(-laplacian(u), w). Strongly monotone in u.
double e_prime_pairing(const Field& u, const Field& w, const ModelParams& p);

/// Both algebraic rearrangements of J through I; each must equal energy_J(u, p).
std::pair<double, double> decomposition_check(const Field& u, const ModelParams& p);

/// Scale-aware manifold tolerance: |I| <= 1e-8 * max(a*A, B).
double nehari_tolerance(double A, double B, const ModelParams& p);

struct FiberResult {
    double lambda_star = 0.0;
    int iterations = 0;
    std::pair<double, double> bracket{0.0, 0.0};
};

/// Unique positive root of a*l^2*A + b*l^4*A^2 = l^{q+1}*B, by doubling/halving
/// bracket around 1 plus bisection to 1e-12 relative, then a Newton polish.
/// Throws DegenerateInputError if A or B vanishes (no ray projection exists),
/// or if q == 3 and B <= b*A^2 (the fiber map has no critical point).
FiberResult fiber_lambda_star(double A, double B, const ModelParams& p);

/// lambda_star * u; lands on the Nehari manifold within nehari_tolerance.
Field nehari_project(const Field& u, const ModelParams& p);

/// d0 = [a(q-1)/(2(q+1))] * (a/S^{q+1})^{2/(q-1)}, the explicit well-depth floor.
double d0_lower_bound(const ModelParams& p, double S);

struct SobolevOptions {
    int starts = 8;
    int max_iterations = 2000;
    double ratio_tol = 1e-13;
    std::uint64_t seed = 7771;
};

struct SobolevStartLog {
    int start_id = 0;
    double ratio = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct SobolevEstimate {
    double S = 0.0;
    int best_start = 0;
    bool converged = false; // at least the best start converged
    std::vector<SobolevStartLog> starts;
};

/// Best discrete value of sup ||w||_{q+1} / ||grad w||_2, by multi-start ascent
/// preconditioned with the inverse Laplacian. Any iterate certifies a lower bound.
/// Non-convergence is reported in the log rather than thrown.
SobolevEstimate sobolev_constant(const Mesh& m, double q, const SobolevOptions& opts = {});

} // namespace kirchhoff
