// Command-line driver: surface validation, geometry dumps, the identity and
// strain check suites, and the Korn thickness sweep.
//
// Exit codes: 0 pass, 1 check failure, 2 usage/config error, 3 numerical failure.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "shellkorn/shellfem.hpp"
#include "shellkorn/sweep.hpp"

namespace {

using shellkorn::BandSpec;

struct CommonArgs {
    std::string config_path;
    std::string preset;
    int grid = 0;
    uint64_t seed = 1;
    bool seed_set = false;
    bool single_thread = false;
    std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "key=value config file");
    cmd->add_option("--preset", args.preset,
                    "surface preset (mixed_inflection, torus_outer, torus_inner, cylinder, "
                    "custom_revolution); overrides the config file");
    cmd->add_option("--grid", args.grid, "grid cells per direction; overrides the config file");
    cmd->add_option("--seed", args.seed, "random seed")->each([&args](const std::string&) {
        args.seed_set = true;
    });
    cmd->add_flag("--single-thread", args.single_thread,
                  "run strictly sequentially (bit-reproducible output); this build is always "
                  "sequential, the flag documents intent");
    cmd->add_option("--out", args.out_dir, "output directory");
}

// config file first, then command-line overrides
std::map<std::string, std::string> effective_config(const CommonArgs& args) {
    std::map<std::string, std::string> kv;
    if (!args.config_path.empty()) kv = shellkorn::load_config_file(args.config_path);
    if (!args.preset.empty()) kv["preset"] = args.preset;
    if (args.grid > 0) {
        kv["n_t"] = std::to_string(args.grid);
        kv["n_s"] = std::to_string(args.grid);
    }
    if (args.seed_set) kv["seed"] = std::to_string(args.seed);
    return kv;
}

uint64_t config_seed(const std::map<std::string, std::string>& kv, uint64_t fallback) {
    auto it = kv.find("seed");
    return it == kv.end() ? fallback : std::stoull(it->second);
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + name;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    return out;
}

std::string canonical_text(const std::map<std::string, std::string>& kv) {
    std::string text;
    for (const auto& [k, v] : kv) text += k + "=" + v + "\n";
    return text;
}

int cmd_validate_surface(const CommonArgs& args) {
    const auto kv = effective_config(args);
    BandSpec band = shellkorn::band_from_config(kv);
    band.validate();
    shellkorn::SurfacePatch patch = shellkorn::build_patch(band);
    shellkorn::ValidationReport report = shellkorn::validate_curvature_assumptions(patch);
    const std::string hash = shellkorn::hash_hex(shellkorn::fnv1a_hash(canonical_text(kv)));
    auto out = open_output(args.out_dir, "report.txt");
    shellkorn::write_validation_report(report, shellkorn::preset_name(band.preset), hash, out);
    out.close();
    std::ostringstream echo;
    shellkorn::write_validation_report(report, shellkorn::preset_name(band.preset), hash, echo);
    std::cout << echo.str();
    return report.all_pass() ? 0 : 1;
}

int cmd_dump_geometry(const CommonArgs& args) {
    const auto kv = effective_config(args);
    BandSpec band = shellkorn::band_from_config(kv);
    band.validate();
    shellkorn::SurfacePatch patch = shellkorn::build_patch(band);
    const std::string hash = shellkorn::hash_hex(shellkorn::fnv1a_hash(canonical_text(kv)));
    auto out = open_output(args.out_dir, "geometry.csv");
    shellkorn::write_geometry_csv(patch, out, hash);
    std::cout << "wrote " << args.out_dir << "/geometry.csv (" << patch.num_nodes()
              << " nodes)\n";
    return 0;
}

int cmd_identities(const CommonArgs& args) {
    const auto kv = effective_config(args);
    BandSpec band = shellkorn::band_from_config(kv);
    const int base_grid = args.grid > 0 ? args.grid : 64;
    const std::vector<int> grids = {base_grid, 2 * base_grid};
    const uint64_t seed = config_seed(kv, args.seed);
    shellkorn::IdentitiesRun run = shellkorn::run_identities(band, grids, seed);
    auto out = open_output(args.out_dir, "identities.csv");
    shellkorn::write_identities_csv(run, out);
    if (run.exit_code == 0) {
        std::cout << "all identities pass (grids " << grids[0] << "/" << grids[1] << ")\n";
    } else {
        std::cout << "FAIL: identity " << run.first_failure << "\n";
    }
    return run.exit_code;
}

int cmd_strain_check(const CommonArgs& args, int samples) {
    const auto kv = effective_config(args);
    BandSpec band = shellkorn::band_from_config(kv);
    const int grid = args.grid > 0 ? args.grid : 64;
    const uint64_t seed = config_seed(kv, args.seed);
    shellkorn::StrainCheckRun run = shellkorn::run_strain_check(band, grid, samples, seed);
    auto out = open_output(args.out_dir, "strain.csv");
    shellkorn::write_strain_csv(run, out);
    if (run.exit_code == 0) {
        std::cout << "strain checks pass (" << samples << " samples, grids " << grid << "/"
                  << 2 * grid << ")\n";
    } else {
        std::cout << "FAIL: " << run.first_failure << "\n";
    }
    return run.exit_code;
}

int cmd_korn_sweep(const CommonArgs& args, const std::vector<double>& thicknesses, int n_xi,
                   double tol) {
    const auto kv = effective_config(args);
    shellkorn::SweepConfig cfg;
    cfg.band = shellkorn::band_from_config(kv);
    if (auto it = kv.find("thicknesses"); it != kv.end() && thicknesses.empty()) {
        cfg.thicknesses.clear();
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) cfg.thicknesses.push_back(std::stod(item));
    }
    if (!thicknesses.empty()) cfg.thicknesses = thicknesses;
    if (auto it = kv.find("n_xi"); it != kv.end() && n_xi == 0) cfg.n_xi = std::stoi(it->second);
    if (n_xi > 0) cfg.n_xi = n_xi;
    if (auto it = kv.find("tol"); it != kv.end() && tol == 0.0) cfg.tol = std::stod(it->second);
    if (tol > 0.0) cfg.tol = tol;
    cfg.seed = config_seed(kv, args.seed);

    shellkorn::SweepResult result = shellkorn::run_korn_sweep(cfg);
    auto csv = open_output(args.out_dir, "korn_sweep.csv");
    shellkorn::write_sweep_csv(result, csv);
    auto rep = open_output(args.out_dir, "report.txt");
    shellkorn::write_sweep_report(result, rep);
    rep.close();
    std::ostringstream echo;
    shellkorn::write_sweep_report(result, echo);
    std::cout << echo.str();
    return result.fitted ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thin-shell Korn-constant scaling toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    int samples = 50;
    std::vector<double> thicknesses;
    int n_xi = 0;
    double tol = 0.0;

    CLI::App* validate = app.add_subcommand("validate-surface",
                                            "check the curvature-type assumptions of a preset");
    add_common(validate, args);
    CLI::App* dump = app.add_subcommand("dump-geometry", "write per-node geometry as CSV");
    add_common(dump, args);
    CLI::App* idents = app.add_subcommand(
        "identities", "covariant-calculus identity suite with a grid refinement study");
    add_common(idents, args);
    CLI::App* strain = app.add_subcommand(
        "strain-check", "strain-system residuals and inequality monitors on random fields");
    add_common(strain, args);
    strain->add_option("--samples", samples, "number of random displacement samples");
    CLI::App* sweep =
        app.add_subcommand("korn-sweep", "Korn-constant thickness sweep with power-law fit");
    add_common(sweep, args);
    sweep->add_option("--thicknesses", thicknesses, "shell thicknesses, descending")
        ->delimiter(',');
    sweep->add_option("--n-xi", n_xi, "through-thickness element count (2 or 4)");
    sweep->add_option("--tol", tol, "eigensolver relative-residual tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (validate->parsed()) return cmd_validate_surface(args);
        if (dump->parsed()) return cmd_dump_geometry(args);
        if (idents->parsed()) return cmd_identities(args);
        if (strain->parsed()) return cmd_strain_check(args, samples);
        if (sweep->parsed()) return cmd_korn_sweep(args, thicknesses, n_xi, tol);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
