#pragma once

#include "kirchhoff/mesh.hpp"
#include "kirchhoff/rng.hpp"

namespace kirchhoff {

/// sin(mode*pi*x/L) per axis (product form in 2D).
Field sine_mode(const Mesh& m, int mode_x, int mode_y = 1);

/// Gaussian bump exp(-|x - c|^2 / (2 w^2)) with the boundary value subtracted off
/// implicitly by the zero extension (width small against the domain).
Field gaussian_bump(const Mesh& m, double center_frac_x, double width_frac,
                    double center_frac_y = 0.5);

/// Random Fourier-sine series with coefficients ~ N(0,1) * k^{-2}
/// ((kx^2+ky^2)^{-1} in 2D): smooth random directions.
Field fourier_random(const Mesh& m, Rng& rng, int max_modes = 32);

/// Mixture used for sampling directions: mostly smooth Fourier draws, sometimes
/// localized bumps; never the zero field.
Field random_direction(const Mesh& m, Rng& rng);

} // namespace kirchhoff
