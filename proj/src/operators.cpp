#include "kirchhoff/operators.hpp"

#include <cmath>
#include <sstream>

#include "kirchhoff/errors.hpp"

namespace kirchhoff {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

double value_or_zero(const std::vector<double>& v, int i, int n) {
    return (i < 0 || i >= n) ? 0.0 : v[static_cast<std::size_t>(i)];
}

} // namespace

Field laplacian(const Field& u) {
    Field out = Field::zero(u.mesh);
    const Mesh& m = u.mesh;
    if (m.dimension() == 1) {
        const int n = m.interior_nodes(0);
        const double ih2 = 1.0 / (m.spacing(0) * m.spacing(0));
        for (int i = 0; i < n; ++i) {
            const double left = value_or_zero(u.values, i - 1, n);
            const double right = value_or_zero(u.values, i + 1, n);
            out[static_cast<std::size_t>(i)] =
                (left - 2.0 * u[static_cast<std::size_t>(i)] + right) * ih2;
        }
    } else {
        const int nx = m.interior_nodes(0);
        const int ny = m.interior_nodes(1);
        const double ihx2 = 1.0 / (m.spacing(0) * m.spacing(0));
        const double ihy2 = 1.0 / (m.spacing(1) * m.spacing(1));
        for (int iy = 0; iy < ny; ++iy) {
            for (int ix = 0; ix < nx; ++ix) {
                const std::size_t k = m.flat_index(ix, iy);
                const double c = u[k];
                const double xl = ix > 0 ? u[m.flat_index(ix - 1, iy)] : 0.0;
                const double xr = ix < nx - 1 ? u[m.flat_index(ix + 1, iy)] : 0.0;
                const double yl = iy > 0 ? u[m.flat_index(ix, iy - 1)] : 0.0;
                const double yr = iy < ny - 1 ? u[m.flat_index(ix, iy + 1)] : 0.0;
                out[k] = (xl - 2.0 * c + xr) * ihx2 + (yl - 2.0 * c + yr) * ihy2;
            }
        }
    }
    return out;
}

Field apply_helmholtz(double alpha, double beta, const Field& u) {
    Field lap = laplacian(u);
    Field out = u;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = alpha * u[i] - beta * lap[i];
    return out;
}

double grad_norm_sq(const Field& u) {
    const Mesh& m = u.mesh;
    double acc = 0.0;
    if (m.dimension() == 1) {
        const int n = m.interior_nodes(0);
        const double h = m.spacing(0);
        for (int e = 0; e <= n; ++e) {
            const double lo = value_or_zero(u.values, e - 1, n);
            const double hi = value_or_zero(u.values, e, n);
            const double d = (hi - lo) / h;
            acc += d * d * h;
        }
    } else {
        const int nx = m.interior_nodes(0);
        const int ny = m.interior_nodes(1);
        const double hx = m.spacing(0);
        const double hy = m.spacing(1);
        const double cell = hx * hy;
        for (int iy = 0; iy < ny; ++iy) {
            for (int ex = 0; ex <= nx; ++ex) {
                const double lo = ex > 0 ? u[m.flat_index(ex - 1, iy)] : 0.0;
                const double hi = ex < nx ? u[m.flat_index(ex, iy)] : 0.0;
                const double d = (hi - lo) / hx;
                acc += d * d * cell;
            }
        }
        for (int ix = 0; ix < nx; ++ix) {
            for (int ey = 0; ey <= ny; ++ey) {
                const double lo = ey > 0 ? u[m.flat_index(ix, ey - 1)] : 0.0;
                const double hi = ey < ny ? u[m.flat_index(ix, ey)] : 0.0;
                const double d = (hi - lo) / hy;
                acc += d * d * cell;
            }
        }
    }
    return acc;
}

double lp_norm(const Field& u, double r) {
    if (r < 1.0) throw std::domain_error("lp_norm: exponent must satisfy r >= 1");
    const double cell = u.mesh.cell_measure();
    double acc = 0.0;
    for (double x : u.values) acc += std::pow(std::abs(x), r) * cell;
    return std::pow(acc, 1.0 / r);
}

double inner(const Field& u, const Field& v) {
    require_same_mesh(u, v, "inner");
    const double cell = u.mesh.cell_measure();
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
    return acc * cell;
}

double l2_norm_sq(const Field& u) { return inner(u, u); }

double first_eigenvalue(const Mesh& m) {
    double lambda = 0.0;
    for (int ax = 0; ax < m.dimension(); ++ax) {
        const double h = m.spacing(ax);
        lambda += 2.0 / (h * h) * (1.0 - std::cos(kPi * h / m.extent(ax)));
    }
    return lambda;
}

Field first_eigenfunction(const Mesh& m) {
    Field e = Field::zero(m);
    if (m.dimension() == 1) {
        const int n = m.interior_nodes(0);
        for (int i = 0; i < n; ++i)
            e[static_cast<std::size_t>(i)] = std::sin(kPi * m.coordinate(0, i) / m.extent(0));
    } else {
        const int nx = m.interior_nodes(0);
        const int ny = m.interior_nodes(1);
        for (int iy = 0; iy < ny; ++iy)
            for (int ix = 0; ix < nx; ++ix)
                e[m.flat_index(ix, iy)] = std::sin(kPi * m.coordinate(0, ix) / m.extent(0)) *
                                          std::sin(kPi * m.coordinate(1, iy) / m.extent(1));
    }
    return e;
}

namespace {

Field solve_tridiagonal(double alpha, double beta, const Field& rhs) {
    const Mesh& m = rhs.mesh;
    const int n = m.interior_nodes(0);
    const double h = m.spacing(0);
    const double diag = alpha + 2.0 * beta / (h * h);
    const double off = -beta / (h * h);

    // Thomas algorithm; the matrix is strictly diagonally dominant for beta > 0.
    std::vector<double> c(static_cast<std::size_t>(n), 0.0);
    std::vector<double> d(static_cast<std::size_t>(n), 0.0);
    double denom = diag;
    c[0] = off / denom;
    d[0] = rhs[0] / denom;
    for (int i = 1; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        denom = diag - off * c[k - 1];
        c[k] = off / denom;
        d[k] = (rhs[k] - off * d[k - 1]) / denom;
    }
    Field x = Field::zero(m);
    x[static_cast<std::size_t>(n - 1)] = d[static_cast<std::size_t>(n - 1)];
    for (int i = n - 2; i >= 0; --i) {
        const auto k = static_cast<std::size_t>(i);
        x[k] = d[k] - c[k] * x[k + 1];
    }
    return x;
}

Field solve_cg(double alpha, double beta, const Field& rhs) {
    const double rhs_norm = std::sqrt(l2_norm_sq(rhs));
    Field x = Field::zero(rhs.mesh);
    if (rhs_norm == 0.0) return x;

    const double rel_tol = 1e-12;
    const std::size_t max_iter = 20 * rhs.size() + 100;

    Field r = rhs;
    Field p = r;
    double rr = inner(r, r);
    for (std::size_t it = 0; it < max_iter; ++it) {
        if (std::sqrt(rr) <= rel_tol * rhs_norm) break;
        Field ap = apply_helmholtz(alpha, beta, p);
        const double pap = inner(p, ap);
        if (!(pap > 0.0)) {
            std::ostringstream msg;
            msg << "conjugate gradient breakdown: p^T A p = " << pap << " at iteration " << it;
            throw NumericalError(msg.str());
        }
        const double step = rr / pap;
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        const double rr_new = inner(r, r);
        const double mix = rr_new / rr;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = r[i] + mix * p[i];
        rr = rr_new;
    }
    return x;
}

} // namespace

Field solve_helmholtz(double alpha, double beta, const Field& rhs) {
    if (!(beta > 0.0) || alpha < 0.0)
        throw std::domain_error("solve_helmholtz: needs beta > 0 and alpha >= 0");

    Field x = rhs.mesh.dimension() == 1 ? solve_tridiagonal(alpha, beta, rhs)
                                        : solve_cg(alpha, beta, rhs);

    // Residual guard shared by both backends.
    const double rhs_norm = std::sqrt(l2_norm_sq(rhs));
    if (rhs_norm > 0.0) {
        Field ax = apply_helmholtz(alpha, beta, x);
        ax -= rhs;
        const double res = std::sqrt(l2_norm_sq(ax));
        if (!(res <= 1e-10 * rhs_norm)) {
            std::ostringstream msg;
            msg << "linear solve failed: relative residual " << res / rhs_norm << " (alpha=" << alpha
                << ", beta=" << beta << ", n=" << rhs.size() << ")";
            throw NumericalError(msg.str());
        }
    }
    return x;
}

Field solve_poisson(const Field& r) { return solve_helmholtz(0.0, 1.0, r); }

double h_minus1_norm(const Field& r) {
    Field phi = solve_poisson(r);
    const double v = inner(r, phi);
    return std::sqrt(v > 0.0 ? v : 0.0);
}

bool all_finite(const Field& u) {
    for (double x : u.values)
        if (!std::isfinite(x)) return false;
    return true;
}

} // namespace kirchhoff
