#include "kirchhoff/random_fields.hpp"

#include <algorithm>
#include <cmath>

namespace kirchhoff {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
}

Field sine_mode(const Mesh& m, int mode_x, int mode_y) {
    Field u = Field::zero(m);
    if (m.dimension() == 1) {
        for (int i = 0; i < m.interior_nodes(0); ++i)
            u[static_cast<std::size_t>(i)] =
                std::sin(mode_x * kPi * m.coordinate(0, i) / m.extent(0));
    } else {
        for (int iy = 0; iy < m.interior_nodes(1); ++iy)
            for (int ix = 0; ix < m.interior_nodes(0); ++ix)
                u[m.flat_index(ix, iy)] =
                    std::sin(mode_x * kPi * m.coordinate(0, ix) / m.extent(0)) *
                    std::sin(mode_y * kPi * m.coordinate(1, iy) / m.extent(1));
    }
    return u;
}

Field gaussian_bump(const Mesh& m, double center_frac_x, double width_frac, double center_frac_y) {
    Field u = Field::zero(m);
    const double w = std::max(width_frac, 1e-6) * m.extent(0);
    const double cx = center_frac_x * m.extent(0);
    if (m.dimension() == 1) {
        for (int i = 0; i < m.interior_nodes(0); ++i) {
            const double dx = m.coordinate(0, i) - cx;
            u[static_cast<std::size_t>(i)] = std::exp(-dx * dx / (2.0 * w * w));
        }
    } else {
        const double cy = center_frac_y * m.extent(1);
        for (int iy = 0; iy < m.interior_nodes(1); ++iy)
            for (int ix = 0; ix < m.interior_nodes(0); ++ix) {
                const double dx = m.coordinate(0, ix) - cx;
                const double dy = m.coordinate(1, iy) - cy;
                u[m.flat_index(ix, iy)] = std::exp(-(dx * dx + dy * dy) / (2.0 * w * w));
            }
    }
    return u;
}

Field fourier_random(const Mesh& m, Rng& rng, int max_modes) {
    Field u = Field::zero(m);
    if (m.dimension() == 1) {
        const int kmax = std::min(max_modes, m.interior_nodes(0));
        for (int k = 1; k <= kmax; ++k) {
            const double c = rng.normal() / (static_cast<double>(k) * k);
            for (int i = 0; i < m.interior_nodes(0); ++i)
                u[static_cast<std::size_t>(i)] +=
                    c * std::sin(k * kPi * m.coordinate(0, i) / m.extent(0));
        }
    } else {
        const int kx_max = std::min(max_modes, m.interior_nodes(0));
        const int ky_max = std::min(max_modes, m.interior_nodes(1));
        for (int ky = 1; ky <= ky_max; ++ky)
            for (int kx = 1; kx <= kx_max; ++kx) {
                const double c = rng.normal() / static_cast<double>(kx * kx + ky * ky);
                for (int iy = 0; iy < m.interior_nodes(1); ++iy)
                    for (int ix = 0; ix < m.interior_nodes(0); ++ix)
                        u[m.flat_index(ix, iy)] +=
                            c * std::sin(kx * kPi * m.coordinate(0, ix) / m.extent(0)) *
                            std::sin(ky * kPi * m.coordinate(1, iy) / m.extent(1));
            }
    }
    return u;
}

Field random_direction(const Mesh& m, Rng& rng) {
    // One draw in four is a localized bump; the rest are smooth Fourier series.
    if (rng.uniform() < 0.25) {
        const double cx = rng.uniform(0.2, 0.8);
        const double cy = rng.uniform(0.2, 0.8);
        const double w = rng.uniform(0.02, 0.2);
        Field u = gaussian_bump(m, cx, w, cy);
        if (rng.uniform() < 0.5) u *= -1.0;
        return u;
    }
    Field u = fourier_random(m, rng);
    // Guard against an (astronomically unlikely) all-zero draw.
    bool nonzero = false;
    for (double x : u.values)
        if (x != 0.0) nonzero = true;
    if (!nonzero) u = sine_mode(m, 1, 1);
    return u;
}

} // namespace kirchhoff
