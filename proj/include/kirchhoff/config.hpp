#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kirchhoff/evolution.hpp"
#include "kirchhoff/mesh.hpp"
#include "kirchhoff/model.hpp"

namespace kirchhoff {

enum class InitFamily { SineMode, GaussianBump, FourierRandom, File };

std::string to_string(InitFamily f);

struct InitSpec {
    InitFamily family = InitFamily::SineMode;
    double amplitude = 1e-3;
    int mode_x = 1;
    int mode_y = 1;
    double center_x = 0.5; // fractions of the extent
    double center_y = 0.5;
    double width = 0.1;
    std::string file;
};

struct MeshSpec {
    int dimension = 1;
    double extent_x = 1.0;
    double extent_y = 1.0;
    int nodes_x = 255;
    int nodes_y = 255;

    Mesh build() const {
        return dimension == 1 ? Mesh::interval(extent_x, nodes_x)
                              : Mesh::rectangle(extent_x, extent_y, nodes_x, nodes_y);
    }
};

struct AnalysisToggles {
    bool verify_decay = false;
    bool omega_limit = false;
    bool well_depth = false;
    bool bounds = false;
    double decay_slack = 0.02;
    double bounds_s_factor = 2.0; // s = factor * d_est
    int bounds_samples = 2000;    // projection attempts
    int gn_samples = 200;         // random GN samples on top of the structured family
};

/// Everything one run needs, parsed from flat `section.key = value` text.
struct ExperimentConfig {
    MeshSpec mesh;
    ModelParams model;
    InitSpec init;
    TimeStepConfig time;
    AnalysisToggles analysis;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
};

struct ParseResult {
    std::optional<ExperimentConfig> config;
    std::vector<std::string> errors; // all problems, each with key / line context
    bool ok() const { return config.has_value(); }
};

/// Parses and validates; reports every error rather than stopping at the first.
ParseResult parse_config(const std::string& text);

ParseResult parse_config_file(const std::string& path);

/// Applies one `key = value` assignment; returns an error message or nullopt.
/// Used by the parser and by sweeps overriding one axis.
std::optional<std::string> apply_key(ExperimentConfig& cfg, const std::string& key,
                                     const std::string& value);

/// True if `key` names a numeric scalar field (valid sweep axis).
bool is_numeric_key(const std::string& key);

/// Post-assignment invariant checks (mesh sizes, model ranges, time step sanity).
std::vector<std::string> validate_config(const ExperimentConfig& cfg);

/// Carries the full error list of a rejected configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::vector<std::string>& errors)
        : std::runtime_error(join(errors)), errors_(errors) {}
    const std::vector<std::string>& errors() const { return errors_; }

private:
    static std::string join(const std::vector<std::string>& errors) {
        std::string all = "configuration rejected:";
        for (const auto& e : errors) all += "\n  - " + e;
        return all;
    }
    std::vector<std::string> errors_;
};

} // namespace kirchhoff
