#include "kirchhoff/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kirchhoff/errors.hpp"
#include "kirchhoff/experiment.hpp"
#include "kirchhoff/io.hpp"
#include "kirchhoff/operators.hpp"
#include "kirchhoff/rng.hpp"
#include "kirchhoff/stationary.hpp"
#include "kirchhoff/well.hpp"

namespace kirchhoff::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

ExperimentConfig load_config(const CommonArgs& args) {
    const ParseResult parsed = parse_config_file(args.config_path);
    if (!parsed.ok()) throw ConfigError(parsed.errors);
    ExperimentConfig cfg = *parsed.config;
    if (args.seed) cfg.seed = *args.seed;
    if (args.out_dir) cfg.output_dir = *args.out_dir;
    return cfg;
}

std::string ensure_outdir(const ExperimentConfig& cfg) {
    const std::string dir = resolve_output_dir(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

void print_checks(const RunReport& rep) {
    for (const auto& c : rep.checks)
        std::cout << "  [" << c.status << "] " << c.name
                  << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
}

int cmd_simulate(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const RunReport rep = run_experiment(cfg);
    std::cout << "outcome: " << to_string(rep.outcome)
              << "  classification: " << to_string(rep.u0_class) << " (vs " << rep.threshold_used
              << ")\n"
              << "J0 = " << format_float(rep.J0) << "  I0 = " << format_float(rep.I0)
              << "  d0 = " << format_float(rep.d0) << "\n";
    if (rep.outcome == Outcome::BlowUp)
        std::cout << "numerical blow-up at t = " << format_float(rep.blowup_time) << "\n";
    print_checks(rep);
    std::cout << "report: " << (fs::path(resolve_output_dir(cfg.output_dir)) / "report.json").string()
              << "\n";
    return rep.any_fail() ? kExitCheckFailed : kExitOk;
}

int cmd_ground_state(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const Mesh mesh = cfg.mesh.build();
    const ModelParams p{cfg.model.a, cfg.model.b, cfg.model.q, cfg.mesh.dimension};

    SobolevOptions sopts;
    sopts.seed = Rng::derive_seed(cfg.seed, 2);
    const SobolevEstimate sob = sobolev_constant(mesh, p.q, sopts);
    ensure_valid(p, sob.S);
    const double d0 = d0_lower_bound(p, sob.S);

    GroundStateOptions gopts;
    gopts.seed = Rng::derive_seed(cfg.seed, 3);
    const GroundStateReport gs = ground_state(mesh, p, gopts);

    const std::string dir = ensure_outdir(cfg);
    write_field_csv((fs::path(dir) / "ground_state.csv").string(), gs.v0);

    ordered_json j;
    j["J"] = gs.J;
    j["abs_I"] = gs.abs_I;
    j["residual"] = gs.residual;
    j["iterations"] = gs.iterations;
    j["start_id"] = gs.start_id;
    j["S"] = sob.S;
    j["d0"] = d0;
    j["d_est"] = gs.J;
    j["starts"] = ordered_json::array();
    for (const auto& s : gs.starts)
        j["starts"].push_back({{"id", s.start_id},
                               {"J", s.J},
                               {"residual", s.residual},
                               {"iterations", s.iterations},
                               {"converged", s.converged}});
    write_text_file((fs::path(dir) / "ground_state.json").string(), j.dump(2) + "\n");

    std::cout << "J(v0) = " << format_float(gs.J) << "  |I(v0)| = " << format_float(gs.abs_I)
              << "  residual = " << format_float(gs.residual) << "  d0 = " << format_float(d0)
              << "\n"
              << "field: " << (fs::path(dir) / "ground_state.csv").string() << "\n";
    return kExitOk;
}

int cmd_well_depth(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const Mesh mesh = cfg.mesh.build();
    const ModelParams p{cfg.model.a, cfg.model.b, cfg.model.q, cfg.mesh.dimension};

    WellOptions wopts;
    wopts.sobolev.seed = Rng::derive_seed(cfg.seed, 2);
    wopts.ground.seed = Rng::derive_seed(cfg.seed, 3);
    const WellReport rep = well_depth(mesh, p, wopts);

    const std::string dir = ensure_outdir(cfg);
    write_field_csv((fs::path(dir) / "ground_state.csv").string(), rep.ground.v0);
    ordered_json j;
    j["d_est"] = rep.d_est;
    j["d0"] = rep.d0;
    j["S"] = rep.S;
    j["num_starts"] = rep.num_starts;
    j["best_start_id"] = rep.best_start_id;
    j["start_J"] = ordered_json::array();
    for (double v : rep.start_J)
        j["start_J"].push_back(std::isfinite(v) ? ordered_json(v) : ordered_json());
    write_text_file((fs::path(dir) / "well_depth.json").string(), j.dump(2) + "\n");

    std::cout << "d_est = " << format_float(rep.d_est) << "  d0 = " << format_float(rep.d0)
              << "  S = " << format_float(rep.S) << "  (" << rep.num_starts << " starts)\n";
    return kExitOk;
}

int cmd_classify(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args);
    const Mesh mesh = cfg.mesh.build();
    const ModelParams p{cfg.model.a, cfg.model.b, cfg.model.q, cfg.mesh.dimension};

    SobolevOptions sopts;
    sopts.seed = Rng::derive_seed(cfg.seed, 2);
    const SobolevEstimate sob = sobolev_constant(mesh, p.q, sopts);
    ensure_valid(p, sob.S);
    double depth = d0_lower_bound(p, sob.S);
    std::string threshold = "d0";
    if (cfg.analysis.well_depth) {
        GroundStateOptions gopts;
        gopts.seed = Rng::derive_seed(cfg.seed, 3);
        depth = ground_state(mesh, p, gopts).J;
        threshold = "d_est";
    }

    const Field u0 = build_initial_field(mesh, cfg.init, cfg.seed);
    const StateClass cls = classify(u0, p, depth);
    const double J0 = energy_J(u0, p);
    const double I0 = nehari_I(u0, p);

    const std::string dir = ensure_outdir(cfg);
    ordered_json j;
    j["classification"] = to_string(cls);
    j["threshold_used"] = threshold;
    j["depth"] = depth;
    j["J0"] = J0;
    j["I0"] = I0;
    write_text_file((fs::path(dir) / "classify.json").string(), j.dump(2) + "\n");

    std::cout << to_string(cls) << " (J0 = " << format_float(J0) << ", I0 = " << format_float(I0)
              << ", depth " << threshold << " = " << format_float(depth) << ")\n";
    return kExitOk;
}

int cmd_bounds(const CommonArgs& args) {
    ExperimentConfig cfg = load_config(args);
    const Mesh mesh = cfg.mesh.build();
    const ModelParams p{cfg.model.a, cfg.model.b, cfg.model.q, cfg.mesh.dimension};

    WellOptions wopts;
    wopts.sobolev.seed = Rng::derive_seed(cfg.seed, 2);
    wopts.ground.seed = Rng::derive_seed(cfg.seed, 3);
    const WellReport well = well_depth(mesh, p, wopts);
    const double s_level = cfg.analysis.bounds_s_factor * well.d_est;

    GnOptions gopts;
    gopts.seed = Rng::derive_seed(cfg.seed, 4);
    const GnEstimate gn = gn_constant_estimate(mesh, p, cfg.analysis.gn_samples, gopts);
    LevelSetBounds lsb = level_set_bounds(s_level, p, mesh, well.d_est, gn.G_safe, well.S);

    const LevelSetSampleSet samples = sample_nehari_levelset(
        s_level, p, mesh, cfg.analysis.bounds_samples, Rng::derive_seed(cfg.seed, 5));
    lsb.empirical_lambda_s = samples.empirical_lambda_s;
    lsb.empirical_Lambda_s = samples.empirical_Lambda_s;
    lsb.sample_count = static_cast<int>(samples.fields.size());

    const std::string dir = ensure_outdir(cfg);
    std::ostringstream csv;
    csv << "l2,H1sq,J\n";
    for (std::size_t k = 0; k < samples.fields.size(); ++k)
        csv << format_float(samples.l2_norms[k]) << ',' << format_float(samples.grad_norms_sq[k])
            << ',' << format_float(samples.energies[k]) << '\n';
    write_text_file((fs::path(dir) / "nehari_samples.csv").string(), csv.str());

    ordered_json j;
    j["s"] = lsb.s;
    j["K1"] = lsb.K1;
    j["K2"] = lsb.K2;
    j["theta"] = lsb.theta;
    j["gamma"] = lsb.gamma;
    j["G_est"] = gn.G;
    j["G_safe"] = gn.G_safe;
    j["G_note"] = "K1 is conditional on the sampled Gagliardo-Nirenberg estimate";
    j["d_est"] = well.d_est;
    j["retained"] = lsb.sample_count;
    j["attempted"] = samples.attempted;
    j["empirical_lambda_s"] = lsb.empirical_lambda_s;
    j["empirical_Lambda_s"] = lsb.empirical_Lambda_s;
    write_text_file((fs::path(dir) / "bounds.json").string(), j.dump(2) + "\n");

    std::cout << "K1 = " << format_float(lsb.K1) << " <= lambda_s = "
              << format_float(lsb.empirical_lambda_s) << " <= Lambda_s = "
              << format_float(lsb.empirical_Lambda_s) << " <= K2 = " << format_float(lsb.K2)
              << "  (" << lsb.sample_count << " samples)\n";

    const bool ok = lsb.sample_count > 0 && lsb.K1 <= lsb.empirical_lambda_s &&
                    lsb.empirical_Lambda_s <= lsb.K2;
    return ok ? kExitOk : kExitCheckFailed;
}

int cmd_sweep(const CommonArgs& args, const std::string& axis, const std::string& values_csv) {
    const ExperimentConfig cfg = load_config(args);
    std::vector<double> values;
    std::stringstream ss(values_csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t pos = 0;
            const double v = std::stod(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
            values.push_back(v);
        } catch (...) {
            throw ConfigError({"sweep value '" + item + "' is not a number"});
        }
    }

    const SweepReport sweep = run_sweep(cfg, axis, values);
    std::cout << "axis: " << axis << "  runs: " << sweep.rows.size() << "\n";
    for (const auto& row : sweep.rows)
        std::cout << "  " << format_float(row.value) << " -> "
                  << (row.error.empty() ? row.outcome + " (" + row.classification + ")"
                                        : "ERROR: " + row.error)
                  << "\n";
    std::cout << "summary: " << sweep.summary_path << "\n";
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Potential-well laboratory for a nonlocal parabolic Kirchhoff equation"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string axis, values_csv;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", common.config_path, "configuration file")->required();
        sub->add_option("--seed", [&](const CLI::results_t& r) {
            common.seed = std::stoull(r.at(0));
            return true;
        }, "override the config seed");
        sub->add_option("--out", [&](const CLI::results_t& r) {
            common.out_dir = r.at(0);
            return true;
        }, "override output.dir");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "integrate the evolution problem");
    add_common(simulate);
    CLI::App* ground = app.add_subcommand("ground-state", "compute the Nehari ground state");
    add_common(ground);
    CLI::App* well = app.add_subcommand("well-depth", "estimate the potential-well depth");
    add_common(well);
    CLI::App* classify_cmd = app.add_subcommand("classify", "classify the initial state");
    add_common(classify_cmd);
    CLI::App* bounds = app.add_subcommand("bounds", "level-set bounds and Nehari sampling");
    add_common(bounds);
    CLI::App* sweep = app.add_subcommand("sweep", "run one experiment per axis value");
    add_common(sweep);
    sweep->add_option("--axis", axis, "numeric configuration key to vary")->required();
    sweep->add_option("--values", values_csv, "comma-separated list of axis values")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(common);
        if (ground->parsed()) return cmd_ground_state(common);
        if (well->parsed()) return cmd_well_depth(common);
        if (classify_cmd->parsed()) return cmd_classify(common);
        if (bounds->parsed()) return cmd_bounds(common);
        if (sweep->parsed()) return cmd_sweep(common, axis, values_csv);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const StructuralError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}

int run(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args);
}

} // namespace kirchhoff::cli
