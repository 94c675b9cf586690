#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "shellkorn/eigensolve.hpp"
#include "shellkorn/geometry.hpp"
#include "shellkorn/strain.hpp"
#include "shellkorn/tensorcalc.hpp"

// Run orchestration: flat key=value configuration, the Korn thickness sweep
// with its power-law fit, the identity and strain check drivers, and the CSV /
// report writers shared by the command-line tool and the tests.

namespace shellkorn {

// ---- configuration -----------------------------------------------------------

// FNV-1a, 64 bit; hashes the canonical key=value serialization of a run.
uint64_t fnv1a_hash(const std::string& text);
std::string hash_hex(uint64_t h);

// Flat key=value text; '#' starts a comment, blank lines and [section]
// headers are ignored. Later keys override earlier ones.
// Throws std::invalid_argument on a malformed line.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> load_config_file(const std::string& path);

// BandSpec from a key/value map: preset selects the defaults, explicit keys
// (b0, b1, period, n_t, n_s, torus_major, torus_minor, torus_phi0,
// cylinder_radius, profile_coeffs) override them. Unknown keys are ignored so
// one file can configure several subcommands.
BandSpec band_from_config(const std::map<std::string, std::string>& kv);

// ---- Korn thickness sweep -----------------------------------------------------

struct SweepConfig {
    BandSpec band;  // grid fields are ignored; resolution follows the layer rule
    std::vector<double> thicknesses{0.15, 0.106, 0.075, 0.053, 0.03};
    int n_xi = 2;
    double tol = 1e-8;
    uint64_t seed = 1;

    // resolution rule: n_s = max(32, ceil(3 (b0+b1) / h^{2/3}),
    // ceil(2.25 (b0+b1) / h)), rounded up to even; n_t = 2 n_s. The first
    // bound resolves the ~h^{2/3} boundary layer, the second keeps the
    // element size proportional to h so locking does not bias the fitted
    // exponent.
    static int layer_ns(double b0, double b1, double h);

    // Throws std::invalid_argument: needs >= 3 strictly decreasing positive
    // thicknesses and a valid band.
    void validate() const;

    std::string canonical() const;  // key=value lines, used for the config hash
};

struct SweepRow {
    double h = 0.0;
    int n_t = 0, n_s = 0, n_xi = 0;
    double lambda_min = 0.0;
    double residual = 0.0;
    int iterations = 0;
    double seconds = 0.0;
    bool converged = false;
    std::string note;  // empty, or why the row was skipped
};

struct SweepResult {
    std::string preset;
    std::string config_hash;
    std::vector<SweepRow> rows;  // sorted by h descending
    bool fitted = false;         // every row converged
    PowerFit fit;
};

// Builds one shell mesh per thickness, assembles the two Korn forms, solves
// for the smallest Rayleigh quotient, and fits log lambda against log h.
// A focal-bound violation produces a skipped row; a non-converged eigensolve
// suppresses the fit but keeps the rows.
SweepResult run_korn_sweep(const SweepConfig& cfg);

// ---- identity and strain drivers -----------------------------------------------

struct IdentitiesRun {
    std::string config_hash;
    ResidualReport report;
    int exit_code = 0;          // 0 pass, 1 first failing identity
    std::string first_failure;  // identity id, empty when passing
};

// grids must be >= 2 successive doublings (e.g. {64, 128}); each adjacent
// pair contributes one refinement study.
IdentitiesRun run_identities(const BandSpec& band, const std::vector<int>& grids, uint64_t seed);

struct StrainSampleRow {
    int sample = 0;
    int grid = 0;
    double displacement_ratio = 0.0;
    double normal_ratio = 0.0;
    StrainSystemResiduals res;
};

struct StrainCheckRun {
    std::string config_hash;
    std::vector<StrainSampleRow> rows;  // one row per (sample, grid)
    int exit_code = 0;
    std::string first_failure;
};

// For each sample: an unclamped random displacement drives the first-order
// system residuals and the first inequality monitor, a clamped one drives the
// second monitor; everything is evaluated at grid and 2*grid. Passing means
// residual order >= 1.9 per sample and both monitor maxima stable under
// refinement (fine max within 50% of the coarse max, no fine sample above
// 10x the coarse max).
StrainCheckRun run_strain_check(const BandSpec& band, int grid, int samples, uint64_t seed);

// ---- output writers (full-precision scientific CSV) ----------------------------

void write_geometry_csv(const SurfacePatch& patch, std::ostream& out,
                        const std::string& config_hash);
void write_identities_csv(const IdentitiesRun& run, std::ostream& out);
void write_strain_csv(const StrainCheckRun& run, std::ostream& out);
void write_sweep_csv(const SweepResult& result, std::ostream& out);
void write_sweep_report(const SweepResult& result, std::ostream& out);
void write_validation_report(const ValidationReport& report, const std::string& preset,
                             const std::string& config_hash, std::ostream& out);

}  // namespace shellkorn
