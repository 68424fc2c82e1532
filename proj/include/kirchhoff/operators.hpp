#pragma once

#include "kirchhoff/mesh.hpp"

namespace kirchhoff {

/// Central-difference Dirichlet Laplacian: 3-point stencil in 1D, 5-point in 2D.
/// Signed so that -laplacian is symmetric positive definite on interior nodes.
Field laplacian(const Field& u);

/// alpha*u - beta*laplacian(u); the operator inverted by the implicit time step.
Field apply_helmholtz(double alpha, double beta, const Field& u);

/// Discrete Dirichlet form: sum over all grid edges (boundary edges included) of
/// (difference/h)^2 times the cell measure. Satisfies
/// inner(-laplacian(u), u) == grad_norm_sq(u) exactly (same sums rearranged).
double grad_norm_sq(const Field& u);

/// (sum |u_i|^r * cell)^{1/r}, midpoint quadrature. Requires r >= 1.
double lp_norm(const Field& u, double r);

/// L^2 inner product: sum u_i v_i * cell.
double inner(const Field& u, const Field& v);

double l2_norm_sq(const Field& u);

/// Smallest eigenvalue of the discrete Dirichlet Laplacian, closed form:
/// per axis (2/h^2)(1 - cos(pi*h/extent)), summed across axes.
double first_eigenvalue(const Mesh& m);

/// Product of first sine modes per axis; exact discrete eigenvector for
/// first_eigenvalue. Not normalized.
Field first_eigenfunction(const Mesh& m);

/// Solve (alpha*I - beta*Laplacian) phi = rhs with zero boundary, alpha >= 0, beta > 0.
/// 1D: direct tridiagonal elimination. 2D: conjugate gradient, relative tolerance 1e-12.
/// Throws NumericalError if the residual exceeds 1e-10 relative.
Field solve_helmholtz(double alpha, double beta, const Field& rhs);

/// phi with -laplacian(phi) = r, zero boundary.
Field solve_poisson(const Field& r);

/// sqrt(inner(r, solve_poisson(r))): dual norm of r against the Dirichlet form.
double h_minus1_norm(const Field& r);

bool all_finite(const Field& u);

} // namespace kirchhoff
