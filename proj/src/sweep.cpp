#include "shellkorn/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "shellkorn/shellfem.hpp"

namespace shellkorn {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(16) << v;
    return os.str();
}

}  // namespace

uint64_t fnv1a_hash(const std::string& text) {
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash_hex(uint64_t h) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') continue;  // section header
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
        kv[key] = trim(line.substr(eq + 1));
    }
    return kv;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

BandSpec band_from_config(const std::map<std::string, std::string>& kv) {
    BandSpec band;
    auto get = [&kv](const char* key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    try {
        if (auto* v = get("preset")) band.preset = preset_from_name(*v);
        if (auto* v = get("b0")) band.b0 = std::stod(*v);
        if (auto* v = get("b1")) band.b1 = std::stod(*v);
        if (auto* v = get("period")) band.period = std::stod(*v);
        if (auto* v = get("n_t")) band.n_t = std::stoi(*v);
        if (auto* v = get("n_s")) band.n_s = std::stoi(*v);
        if (auto* v = get("torus_major")) band.torus_major = std::stod(*v);
        if (auto* v = get("torus_minor")) band.torus_minor = std::stod(*v);
        if (auto* v = get("torus_phi0")) band.torus_phi0 = std::stod(*v);
        if (auto* v = get("cylinder_radius")) band.cylinder_radius = std::stod(*v);
        if (auto* v = get("profile_coeffs")) band.profile_coeffs = parse_double_list(*v);
    } catch (const std::logic_error& e) {
        throw std::invalid_argument(std::string("bad config value: ") + e.what());
    }
    return band;
}

// ---- Korn thickness sweep -----------------------------------------------------

int SweepConfig::layer_ns(double b0, double b1, double h) {
    // two requirements: resolve the ~h^{2/3} boundary layer, and keep the
    // element size proportional to the shell thickness. The second dominates
    // at small h: with trilinear elements and full quadrature, elements wider
    // than a few h stiffen the bending-dominated minimizers (shear locking)
    // and flatten the fitted exponent.
    const int layer = static_cast<int>(std::ceil(3.0 * (b0 + b1) / std::pow(h, 2.0 / 3.0)));
    const int locking = static_cast<int>(std::ceil(2.25 * (b0 + b1) / h));
    const int n = std::max({32, layer, locking});
    return n + (n % 2);  // even, for the quadrature rule shared with the patch grid
}

void SweepConfig::validate() const {
    if (thicknesses.size() < 3)
        throw std::invalid_argument("sweep needs at least 3 thickness values for the fit");
    for (size_t k = 0; k < thicknesses.size(); ++k) {
        if (!(thicknesses[k] > 0.0))
            throw std::invalid_argument("thickness values must be positive");
        if (k > 0 && !(thicknesses[k] < thicknesses[k - 1]))
            throw std::invalid_argument("thickness values must be strictly decreasing");
    }
    if (n_xi != 2 && n_xi != 4)
        throw std::invalid_argument("n_xi must be 2 or 4");
    if (!(tol > 0.0)) throw std::invalid_argument("eigensolver tolerance must be positive");
    BandSpec probe = band;
    probe.n_t = layer_ns(band.b0, band.b1, thicknesses.front()) * 2;
    probe.n_s = layer_ns(band.b0, band.b1, thicknesses.front());
    probe.validate();
}

std::string SweepConfig::canonical() const {
    std::ostringstream os;
    os << "preset=" << preset_name(band.preset) << "\n"
       << "b0=" << fmt(band.b0) << "\nb1=" << fmt(band.b1) << "\nperiod=" << fmt(band.period)
       << "\ntorus_major=" << fmt(band.torus_major) << "\ntorus_minor=" << fmt(band.torus_minor)
       << "\ntorus_phi0=" << fmt(band.torus_phi0)
       << "\ncylinder_radius=" << fmt(band.cylinder_radius) << "\nprofile_coeffs=";
    for (size_t k = 0; k < band.profile_coeffs.size(); ++k)
        os << (k ? "," : "") << fmt(band.profile_coeffs[k]);
    os << "\nthicknesses=";
    for (size_t k = 0; k < thicknesses.size(); ++k) os << (k ? "," : "") << fmt(thicknesses[k]);
    os << "\nn_xi=" << n_xi << "\ntol=" << fmt(tol) << "\nseed=" << seed << "\n";
    return os.str();
}

SweepResult run_korn_sweep(const SweepConfig& cfg) {
    cfg.validate();
    SweepResult result;
    result.preset = preset_name(cfg.band.preset);
    result.config_hash = hash_hex(fnv1a_hash(cfg.canonical()));

    bool all_converged = true;
    for (double h : cfg.thicknesses) {
        SweepRow row;
        row.h = h;
        row.n_s = SweepConfig::layer_ns(cfg.band.b0, cfg.band.b1, h);
        row.n_t = 2 * row.n_s;
        row.n_xi = cfg.n_xi;
        BandSpec band = cfg.band;
        band.n_t = row.n_t;
        band.n_s = row.n_s;
        try {
            SurfacePatch patch = build_patch(band);
            if (cfg.band.preset == Preset::MixedInflection) {
                ValidationReport rep = validate_curvature_assumptions(patch);
                if (!rep.all_pass())
                    throw std::runtime_error("surface fails the curvature assumptions");
            }
            ShellMesh mesh = build_shell_mesh(patch, h, row.n_t, row.n_s, cfg.n_xi);
            FormPair forms = assemble_forms(mesh);
            EigOptions opts;
            opts.tol = cfg.tol;
            opts.seed = cfg.seed;
            EigReport eig = smallest_eig(forms.A, forms.B, opts);
            row.lambda_min = eig.lambda_min;
            row.residual = eig.rel_residual;
            row.iterations = eig.iterations;
            row.seconds = eig.seconds;
            row.converged = eig.converged;
            if (!eig.converged) {
                all_converged = false;
                row.note = "eigensolver did not converge";
            }
        } catch (const std::invalid_argument& e) {
            // focal bound / mesh degeneracy: warn, skip the thickness
            row.note = e.what();
            all_converged = false;
        }
        result.rows.push_back(std::move(row));
    }

    std::vector<std::pair<double, double>> pts;
    for (const SweepRow& r : result.rows)
        if (r.converged) pts.emplace_back(r.h, r.lambda_min);
    if (all_converged && pts.size() >= 3) {
        result.fit = fit_exponent(pts);
        result.fitted = true;
    }
    return result;
}

// ---- identity and strain drivers -----------------------------------------------

IdentitiesRun run_identities(const BandSpec& band, const std::vector<int>& grids, uint64_t seed) {
    if (grids.size() < 2)
        throw std::invalid_argument("need >= 2 grids for order estimate");
    for (size_t k = 1; k < grids.size(); ++k)
        if (grids[k] != 2 * grids[k - 1])
            throw std::invalid_argument("grids must be successive doublings");

    IdentitiesRun run;
    {
        std::ostringstream os;
        os << "preset=" << preset_name(band.preset) << "\ngrids=";
        for (size_t k = 0; k < grids.size(); ++k) os << (k ? "," : "") << grids[k];
        os << "\nseed=" << seed << "\n";
        run.config_hash = hash_hex(fnv1a_hash(os.str()));
    }
    for (size_t k = 0; k + 1 < grids.size(); ++k) {
        BandSpec spec = band;
        spec.n_t = grids[k];
        spec.n_s = grids[k];
        ResidualReport rep = identity_suite(spec, seed);
        if (run.report.results.empty()) {
            run.report = rep;
        } else {
            run.report.results.insert(run.report.results.end(), rep.results.begin(),
                                      rep.results.end());
        }
        for (const IdentityResult& r : rep.results) {
            const bool pass = r.exact || r.order >= 1.9;
            if (!pass && run.first_failure.empty()) run.first_failure = r.id;
        }
    }
    run.exit_code = run.first_failure.empty() ? 0 : 1;
    return run;
}

StrainCheckRun run_strain_check(const BandSpec& band, int grid, int samples, uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("need at least one sample");
    if (grid < 8 || grid % 2 != 0) throw std::invalid_argument("grid must be even and >= 8");

    StrainCheckRun run;
    {
        std::ostringstream os;
        os << "preset=" << preset_name(band.preset) << "\ngrid=" << grid
           << "\nsamples=" << samples << "\nseed=" << seed << "\n";
        run.config_hash = hash_hex(fnv1a_hash(os.str()));
    }

    BandSpec coarse = band, fine = band;
    coarse.n_t = coarse.n_s = grid;
    fine.n_t = fine.n_s = 2 * grid;
    const SurfacePatch pc = build_patch(coarse);
    const SurfacePatch pf = build_patch(fine);
    const uint64_t base = seed * 6364136223846793005ULL;

    // residuals that are exact by construction stay at roundoff level;
    // the substantive ones must shrink at second order
    const double exact_tol = 1e-10;
    std::vector<double> max11(2, 0.0), max12(2, 0.0);
    std::vector<std::vector<double>> fine11(1), fine12(1);

    for (int k = 0; k < samples; ++k) {
        auto fu = random_displacement(band, base + 2 * k + 1, false);
        auto fc = random_displacement(band, base + 2 * k + 2, true);
        StrainSampleRow rows[2];
        for (int lev = 0; lev < 2; ++lev) {
            const SurfacePatch& p = lev == 0 ? pc : pf;
            Displacement yu(p, fu, ClampSet::None);
            Displacement yc(p, fc, ClampSet::BothEdges);
            StrainSampleRow& row = rows[lev];
            row.sample = k;
            row.grid = lev == 0 ? grid : 2 * grid;
            row.res = strain_system_residuals(yu);
            row.displacement_ratio = displacement_bound_ratio(yu);
            row.normal_ratio = normal_bound_ratio(yc);
            max11[lev] = std::max(max11[lev], row.displacement_ratio);
            if (std::isfinite(row.normal_ratio)) max12[lev] = std::max(max12[lev], row.normal_ratio);
            if (lev == 1) {
                fine11[0].push_back(row.displacement_ratio);
                if (std::isfinite(row.normal_ratio)) fine12[0].push_back(row.normal_ratio);
            }
            run.rows.push_back(row);
        }
        auto check_order = [&](double rc, double rf, const char* what) {
            if (rc <= exact_tol && rf <= exact_tol) return;
            const double order = convergence_order(rc, rf);
            if (order < 1.9 && run.first_failure.empty()) {
                std::ostringstream os;
                os << what << " order " << order << " < 1.9 at sample " << k;
                run.first_failure = os.str();
            }
        };
        check_order(rows[0].res.gradient_row, rows[1].res.gradient_row, "first-order system (gradient row)");
        check_order(rows[0].res.trace_row, rows[1].res.trace_row, "first-order system (trace row)");
        check_order(rows[0].res.aux_gradient_row, rows[1].res.aux_gradient_row, "second system (gradient row)");
        check_order(rows[0].res.aux_divergence_row, rows[1].res.aux_divergence_row, "second system (divergence row)");
    }

    auto check_stability = [&](double mc, double mf, const std::vector<double>& fine_vals,
                               const char* what) {
        if (!run.first_failure.empty()) return;
        if (std::abs(mf - mc) > 0.5 * mc) {
            std::ostringstream os;
            os << what << " max ratio drifts under refinement (" << mc << " -> " << mf << ")";
            run.first_failure = os.str();
            return;
        }
        for (double v : fine_vals)
            if (v > 10.0 * mc) {
                std::ostringstream os;
                os << what << " sample ratio " << v << " exceeds 10x the coarse max " << mc;
                run.first_failure = os.str();
                return;
            }
    };
    check_stability(max11[0], max11[1], fine11[0], "first inequality monitor");
    check_stability(max12[0], max12[1], fine12[0], "second inequality monitor");

    run.exit_code = run.first_failure.empty() ? 0 : 1;
    return run;
}

// ---- output writers -------------------------------------------------------------

void write_geometry_csv(const SurfacePatch& patch, std::ostream& out,
                        const std::string& config_hash) {
    out << "# config_hash=" << config_hash << "\n";
    out << "t,s,x,y,z,kappa,trPi,Pi_tt\n";
    for (int j = 0; j <= patch.n_s(); ++j)
        for (int i = 0; i < patch.n_t(); ++i) {
            const NodeGeometry& nd = patch.node(i, j);
            out << fmt(patch.t_coord(i)) << ',' << fmt(patch.s_coord(j)) << ','
                << fmt(nd.position.x()) << ',' << fmt(nd.position.y()) << ','
                << fmt(nd.position.z()) << ',' << fmt(nd.gauss_curv) << ','
                << fmt(nd.mean_trace) << ',' << fmt(nd.second_form(0, 0)) << "\n";
        }
}

void write_identities_csv(const IdentitiesRun& run, std::ostream& out) {
    out << "# config_hash=" << run.config_hash << "\n";
    out << "identity_id,grid,residual,order\n";
    for (const IdentityResult& r : run.report.results) {
        out << r.id << ',' << run.report.grid_coarse << ',' << fmt(r.residual_coarse) << ','
            << fmt(r.order) << "\n";
        out << r.id << ',' << run.report.grid_fine << ',' << fmt(r.residual_fine) << ','
            << fmt(r.order) << "\n";
    }
}

void write_strain_csv(const StrainCheckRun& run, std::ostream& out) {
    out << "# config_hash=" << run.config_hash << "\n";
    out << "sample_id,grid,displacement_bound_ratio,normal_bound_ratio,res_gradient_row,res_trace_row,"
           "res_aux_gradient_row,res_aux_divergence_row\n";
    for (const StrainSampleRow& r : run.rows)
        out << r.sample << ',' << r.grid << ',' << fmt(r.displacement_ratio) << ',' << fmt(r.normal_ratio) << ','
            << fmt(r.res.gradient_row) << ',' << fmt(r.res.trace_row) << ','
            << fmt(r.res.aux_gradient_row) << ',' << fmt(r.res.aux_divergence_row) << "\n";
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
    out << "# config_hash=" << result.config_hash << "\n";
    // wall time stays in the human-readable report: the CSV must be
    // byte-identical across runs of the same config
    out << "h,n_t,n_s,n_xi,lambda_min,residual,iterations,converged,note\n";
    for (const SweepRow& r : result.rows)
        out << fmt(r.h) << ',' << r.n_t << ',' << r.n_s << ',' << r.n_xi << ','
            << fmt(r.lambda_min) << ',' << fmt(r.residual) << ',' << r.iterations << ','
            << (r.converged ? 1 : 0) << ',' << r.note << "\n";
}

void write_sweep_report(const SweepResult& result, std::ostream& out) {
    out << "Korn thickness sweep\n";
    out << "preset: " << result.preset << "\n";
    out << "config_hash: " << result.config_hash << "\n\n";
    out << "      h        n_t   n_s  n_xi   lambda_min      rel_residual  iters   seconds\n";
    for (const SweepRow& r : result.rows) {
        if (!r.note.empty() && r.iterations == 0) {
            out << std::setw(11) << r.h << "  skipped: " << r.note << "\n";
            continue;
        }
        out << std::setw(11) << std::setprecision(4) << r.h << std::setw(7) << r.n_t
            << std::setw(6) << r.n_s << std::setw(6) << r.n_xi << std::setw(16)
            << std::scientific << std::setprecision(6) << r.lambda_min << std::setw(16)
            << r.residual << std::defaultfloat << std::setw(7) << r.iterations << std::setw(10)
            << std::setprecision(4) << r.seconds << (r.converged ? "" : "  NOT CONVERGED")
            << "\n";
    }
    out << "\n";
    if (result.fitted) {
        out << "fitted scaling lambda_min ~ h^beta\n";
        out << "beta = " << std::setprecision(6) << result.fit.slope << " +/- "
            << result.fit.stderr_slope << "\n";
    } else {
        out << "no fit: not all sweep rows converged\n";
    }
}

void write_validation_report(const ValidationReport& report, const std::string& preset,
                             const std::string& config_hash, std::ostream& out) {
    out << "surface validation\n";
    out << "preset: " << preset << "\n";
    out << "config_hash: " << config_hash << "\n\n";
    for (const ValidationCondition& c : report.conditions) {
        out << (c.pass ? "PASS " : "FAIL ") << c.id << "  value=" << std::scientific
            << std::setprecision(6) << c.value << "  witness=(" << c.witness_i << ','
            << c.witness_j << ")";
        if (!c.detail.empty()) out << "  " << c.detail;
        out << "\n";
    }
    out << "\n"
        << (report.mixed_type() ? "surface is mixed type\n" : "surface is not mixed type\n")
        << (report.all_pass() ? "all conditions hold\n" : "some conditions fail\n");
}

}  // namespace shellkorn
