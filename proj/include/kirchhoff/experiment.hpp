#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kirchhoff/config.hpp"
#include "kirchhoff/evolution.hpp"
#include "kirchhoff/well.hpp"

namespace kirchhoff {

struct CheckEntry {
    std::string name;
    std::string status; // "PASS", "FAIL" or "SKIPPED(<reason>)"
    std::string detail;
    bool failed() const { return status == "FAIL"; }
};

struct RunReport {
    ExperimentConfig cfg;
    double S = 0.0;
    double d0 = 0.0;
    double lambda1 = 0.0;
    std::optional<double> d_est;
    std::string threshold_used; // which depth the classification is relative to
    StateClass u0_class = StateClass::Zero;
    double J0 = 0.0;
    double I0 = 0.0;
    Outcome outcome = Outcome::ReachedTEnd;
    double final_time = 0.0;
    double blowup_time = 0.0;
    double energy_residual = 0.0;
    std::vector<CheckEntry> checks;
    std::vector<std::string> files; // relative to the output directory

    bool any_fail() const {
        for (const auto& c : checks)
            if (c.failed()) return true;
        return false;
    }
};

/// Output root override: if the KIRCHHOFF_OUT environment variable is set, the
/// configured directory is placed underneath it.
std::string resolve_output_dir(const std::string& configured);

/// Constructs the initial state described by the init spec on mesh m.
Field build_initial_field(const Mesh& m, const InitSpec& init, std::uint64_t seed);

/// One full experiment: thresholds, classification, time integration, enabled
/// analyses, CSV + JSON emission. Throws ConfigError for late-stage validation
/// failures and NumericalError when the numerics give up.
RunReport run_experiment(const ExperimentConfig& cfg);

struct SweepRow {
    double value = 0.0;
    std::string outcome;
    double J0 = 0.0;
    double I0 = 0.0;
    std::string classification;
    std::string error; // empty on success
};

struct SweepReport {
    std::string axis;
    std::vector<SweepRow> rows;
    std::string summary_path;
};

/// Runs one experiment per value of the (numeric) axis key, children in
/// parallel, each in its own subdirectory; failures are recorded per row and do
/// not stop the sweep.
SweepReport run_sweep(const ExperimentConfig& base, const std::string& axis,
                      const std::vector<double>& values);

} // namespace kirchhoff
