#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kirchhoff/functionals.hpp"
#include "kirchhoff/mesh.hpp"
#include "kirchhoff/model.hpp"
#include "kirchhoff/stationary.hpp"

namespace kirchhoff {

struct WellOptions {
    GroundStateOptions ground;
    SobolevOptions sobolev;
};

struct WellReport {
    double d_est = 0.0;
    double d0 = 0.0;
    double S = 0.0;
    int num_starts = 0;
    int best_start_id = 0;
    std::vector<double> start_J; // per start; NaN where a start failed
    GroundStateReport ground;
    SobolevEstimate sobolev;
};

/// Estimates the well depth d = inf_N J by multi-start Nehari minimization and
/// reports it next to the explicit floor d0 computed from the Sobolev estimate.
WellReport well_depth(const Mesh& m, const ModelParams& p, const WellOptions& opts = {});

enum class StateClass { InsideW, InsideV, OnNehari, EnergyAboveD, Zero };

std::string to_string(StateClass c);

/// Placement of u against the well of depth d: sign of I against the scale-aware
/// manifold tolerance, energy against d.
StateClass classify(const Field& u, const ModelParams& p, double d);

struct LevelSetBounds {
    double s = 0.0;
    double K1 = 0.0;
    double K2 = 0.0;
    double G = 0.0;
    double gamma = 0.0;
    double theta = 0.0;
    bool low_branch = true; // q <= 1 + 4/n
    double empirical_lambda_s = 0.0;
    double empirical_Lambda_s = 0.0;
    int sample_count = 0;
};

/// K1/K2 bounds for the L^2 norm over the Nehari level set {J < s}, s > d.
/// K2 uses the discrete first eigenvalue; K1 uses the supplied Gagliardo-Nirenberg
/// estimate G (conditional on its quality).
LevelSetBounds level_set_bounds(double s, const ModelParams& p, const Mesh& m, double d, double G,
                                double S);

struct GnOptions {
    int refine_iterations = 80;
    double safety = 1.1; // multiply G before it feeds K1
    std::uint64_t seed = 5117;
};

struct GnEstimate {
    double G = 0.0;       // raw supremum over samples
    double G_safe = 0.0;  // G * safety
    int samples = 0;
    int best_sample = -1;
    std::vector<double> top_ratios; // a few largest refined ratios, descending
};

/// Estimated Gagliardo-Nirenberg constant: supremum of
/// ||u||_{q+1}^{q+1} / (||grad u||_2^{n(q-1)/2} ||u||_2^{q+1-n(q-1)/2})
/// over random smooth fields, rescaled eigenfunctions and localized bumps, each
/// refined by preconditioned gradient ascent on the (scale-invariant) ratio.
GnEstimate gn_constant_estimate(const Mesh& m, const ModelParams& p, int samples,
                                const GnOptions& opts = {});

/// The GN ratio of a single field (certified lower bound for G).
double gn_ratio(const Field& u, const ModelParams& p);

struct LevelSetSampleSet {
    std::vector<Field> fields; // retained: on the manifold with J < s
    std::vector<double> l2_norms;
    std::vector<double> grad_norms_sq;
    std::vector<double> energies;
    double empirical_lambda_s = 0.0;
    double empirical_Lambda_s = 0.0;
    int attempted = 0;
};

/// Draws `count` random directions, projects each onto the Nehari manifold and
/// retains those with J < s. An empty result signals insufficient sampling (the
/// level set itself is never empty for s > d).
LevelSetSampleSet sample_nehari_levelset(double s, const ModelParams& p, const Mesh& m, int count,
                                         std::uint64_t seed);

} // namespace kirchhoff
