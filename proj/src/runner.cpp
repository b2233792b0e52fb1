#include "convdiff/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace convdiff {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct ConfigReader {
    std::filesystem::path path;
    std::filesystem::path dir;
    std::string section;
    int line_no = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + msg);
    }
};

double to_double(ConfigReader& r, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) r.fail("bad number '" + v + "'");
        return x;
    } catch (const std::logic_error&) {
        r.fail("bad number '" + v + "'");
    }
}

int to_int(ConfigReader& r, const std::string& v) {
    try {
        size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) r.fail("bad integer '" + v + "'");
        return x;
    } catch (const std::logic_error&) {
        r.fail("bad integer '" + v + "'");
    }
}

void apply_key(ConfigReader& r, RunConfig& cfg, const std::string& key, const std::string& value) {
    auto path_of = [&](const std::string& v) {
        std::filesystem::path p(v);
        return p.is_absolute() ? p : r.dir / p;
    };
    if (r.section == "files") {
        if (key == "geometry") cfg.geometry_file = path_of(value);
        else if (key == "cross_sections") cfg.cross_section_file = path_of(value);
        else r.fail("unknown files key '" + key + "'");
    } else if (r.section == "problem") {
        if (key == "kind") {
            if (value == "assembly") cfg.kind = RunConfig::Kind::assembly;
            else if (value == "core") cfg.kind = RunConfig::Kind::core;
            else r.fail("kind must be assembly or core");
        } else if (key == "rods") {
            if (value == "withdrawn") cfg.rods = RodState::withdrawn;
            else if (value == "inserted") cfg.rods = RodState::inserted;
            else r.fail("rods must be withdrawn or inserted");
        } else if (key == "core_map") {
            cfg.core_map = parse_core_map(value);
            cfg.core_map_given = true;
        } else {
            r.fail("unknown problem key '" + key + "'");
        }
    } else if (r.section == "discretisation") {
        if (key == "scheme") {
            if (value == "fv") cfg.scheme = Scheme::fv;
            else if (value == "convfem") cfg.scheme = Scheme::convfem;
            else r.fail("scheme must be fv or convfem");
        } else if (key == "vacuum_mode") {
            if (value == "absorption") cfg.vacuum_mode = VacuumMode::absorption;
            else if (value == "zero_halo") cfg.vacuum_mode = VacuumMode::zero_halo;
            else r.fail("vacuum_mode must be absorption or zero_halo");
        } else if (key == "allow_convfem_reflective") {
            cfg.allow_convfem_reflective = value == "true" || value == "1";
        } else if (key == "d_scatter") {
            if (value == "full_row") cfg.d_scatter = DScatterConvention::full_row;
            else if (value == "out_scatter") cfg.d_scatter = DScatterConvention::out_scatter;
            else r.fail("d_scatter must be full_row or out_scatter");
        } else {
            r.fail("unknown discretisation key '" + key + "'");
        }
    } else if (r.section == "solver") {
        SolveControls& c = cfg.controls;
        if (key == "n_levels") c.n_levels = to_int(r, value);
        else if (key == "jacobi_iters_per_level") c.jacobi_iters_per_level = to_int(r, value);
        else if (key == "mg_cycles") c.mg_cycles = to_int(r, value);
        else if (key == "sweeps_per_power") c.sweeps_per_power = to_int(r, value);
        else if (key == "max_power_iters") c.max_power_iters = to_int(r, value);
        else if (key == "k_tol") c.k_tol = to_double(r, value);
        else if (key == "flux_tol") c.flux_tol = to_double(r, value);
        else if (key == "oracle_tol") c.oracle_tol = to_double(r, value);
        else if (key == "oracle_max_sweeps") c.oracle_max_sweeps = to_int(r, value);
        else if (key == "multigroup_mode") {
            if (value == "gauss_seidel") c.multigroup_mode = MultigroupMode::gauss_seidel;
            else if (value == "jacobi") c.multigroup_mode = MultigroupMode::jacobi;
            else r.fail("multigroup_mode must be gauss_seidel or jacobi");
        } else r.fail("unknown solver key '" + key + "'");
    } else if (r.section == "compare") {
        if (key == "linf_bound") cfg.compare_bound = to_double(r, value);
        else r.fail("unknown compare key '" + key + "'");
    } else if (r.section == "bench") {
        if (key == "repeats") cfg.bench_repeats = to_int(r, value);
        else if (key == "jacobi_iters") cfg.bench_jacobi_iters = to_int(r, value);
        else r.fail("unknown bench key '" + key + "'");
    } else if (r.section == "output") {
        if (key == "directory") {
            cfg.output_dir = value; // resolved against the working directory
        } else if (key == "seed") {
            cfg.seed = static_cast<unsigned>(to_int(r, value));
        } else {
            r.fail("unknown output key '" + key + "'");
        }
    } else {
        r.fail("key outside any known section");
    }
}

void validate_config(const RunConfig& cfg) {
    const SolveControls& c = cfg.controls;
    if (cfg.geometry_file.empty() || cfg.cross_section_file.empty())
        throw ParseError("config must set [files] geometry and cross_sections");
    if (c.max_power_iters < 1 || c.sweeps_per_power < 1 || c.mg_cycles < 1 ||
        c.jacobi_iters_per_level < 1 || c.n_levels < 1 || c.oracle_max_sweeps < 1)
        throw ParseError("config: iteration caps must be >= 1");
    if (!(c.k_tol > 0.0) || !(c.flux_tol > 0.0) || !(c.oracle_tol > 0.0) ||
        !(cfg.compare_bound > 0.0))
        throw ParseError("config: tolerances must be > 0");
    if (cfg.bench_repeats < 1 || cfg.bench_jacobi_iters < 1)
        throw ParseError("config: bench settings must be >= 1");
    if (cfg.scheme == Scheme::convfem && cfg.vacuum_mode == VacuumMode::absorption)
        throw ParseError("config: convfem supports only vacuum_mode = zero_halo");
}

void write_flux_csv(const std::filesystem::path& dir, const EigenSolveState& state) {
    for (size_t g = 0; g < state.phi.size(); ++g) {
        std::ofstream out(dir / ("flux_g" + std::to_string(g + 1) + ".csv"));
        const GridField& phi = state.phi[g];
        for (int j = phi.jend() - 1; j >= phi.jbegin(); --j) {
            for (int i = phi.ibegin(); i < phi.iend(); ++i) {
                if (i != phi.ibegin()) out << ',';
                out << fmt(phi(i, j));
            }
            out << '\n';
        }
    }
}

void write_history_csv(const std::filesystem::path& dir, const EigenSolveState& state) {
    std::ofstream out(dir / "keff_history.csv");
    out << "power_iter,k_eff\n";
    for (const auto& [it, k] : state.keff_history) out << it << ',' << fmt(k) << '\n';
}

void write_summary(const std::filesystem::path& dir, const RunConfig& cfg,
                   const BuiltProblem& built, const EigenSolveState& state,
                   const std::vector<double>& residuals, double wall_seconds) {
    std::ofstream out(dir / "summary.txt");
    out << "k_eff " << fmt(state.k_eff) << '\n';
    out << "converged " << (state.converged ? "yes" : "no") << '\n';
    out << "power_iterations " << state.power_iterations << '\n';
    out << "multigroup_iterations " << state.multigroup_iterations << '\n';
    out << "inner_iterations " << state.inner_iterations << '\n';
    out << "last_k_change " << fmt(state.last_k_change) << '\n';
    out << "last_flux_change " << fmt(state.last_flux_change) << '\n';
    for (size_t g = 0; g < residuals.size(); ++g)
        out << "residual_linf_g" << g + 1 << ' ' << fmt(residuals[g]) << '\n';
    out << "interior_cells " << built.fields.interior_cells() << '\n';
    out << "halo_cells " << built.fields.halo_cells() << '\n';
    out << "dof " << built.fields.dof() << '\n';
    out << "dx_cm " << fmt(built.fields.dx) << '\n';
    out << "groups " << built.fields.n_groups << '\n';
    out << "scheme " << (cfg.scheme == Scheme::fv ? "fv" : "convfem") << '\n';
    out << "seed " << cfg.seed << '\n';
    out << "wall_seconds " << wall_seconds << '\n';
}

} // namespace

CoreMap parse_core_map(const std::string& text) {
    CoreMap map;
    std::istringstream ss(text);
    std::string row;
    int r = 0;
    while (std::getline(ss, row, '/')) {
        if (r >= 3 || row.size() != 3) throw ParseError("core map must be 3 rows of 3 W/I flags");
        for (int c = 0; c < 3; ++c) {
            if (row[c] == 'W') map.assemblies[r * 3 + c] = RodState::withdrawn;
            else if (row[c] == 'I') map.assemblies[r * 3 + c] = RodState::inserted;
            else throw ParseError("core map flags must be W or I");
        }
        ++r;
    }
    if (r != 3) throw ParseError("core map must be 3 rows of 3 W/I flags");
    return map;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string() + ": cannot open file");
    RunConfig cfg;
    ConfigReader r;
    r.path = path;
    r.dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");

    std::string raw;
    while (std::getline(in, raw)) {
        ++r.line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const auto b = raw.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = raw.find_last_not_of(" \t\r");
        const std::string line = raw.substr(b, e - b + 1);
        if (line.front() == '[' && line.back() == ']') {
            r.section = line.substr(1, line.size() - 2);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) r.fail("expected key = value");
        auto trim = [](const std::string& s) {
            const auto sb = s.find_first_not_of(" \t");
            if (sb == std::string::npos) return std::string();
            const auto se = s.find_last_not_of(" \t");
            return s.substr(sb, se - sb + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) r.fail("expected key = value");
        apply_key(r, cfg, key, value);
    }
    validate_config(cfg);
    return cfg;
}

BuiltProblem build_problem(const RunConfig& config) {
    const CrossSectionLibrary lib =
        load_cross_sections(config.cross_section_file.string(), config.d_scatter);
    const GeometryFile geo = load_geometry(config.geometry_file.string());

    const bool core = config.kind == RunConfig::Kind::core ||
                      (config.kind == RunConfig::Kind::from_geometry && geo.has_core);
    if (core && !geo.has_core && !config.core_map_given)
        throw ParseError("core run requested but no [core] block or core_map given");

    const int halo = config.scheme == Scheme::convfem ? 2 : 1;
    BuiltProblem built;
    if (core) {
        const CoreMap map = config.core_map_given ? config.core_map : geo.core;
        built.fields = build_core(map, geo.lattice, lib, halo);
    } else {
        built.fields = build_assembly(geo.lattice, lib, config.rods, halo);
    }

    DiscretiseOptions opt;
    opt.scheme = config.scheme;
    opt.vacuum_mode = config.vacuum_mode;
    opt.allow_convfem_reflective = config.allow_convfem_reflective;
    built.problem = discretise(built.fields.d_raw, built.fields.sigma_as_raw, built.fields.dx,
                               built.fields.dy, built.fields.bc, opt);
    return built;
}

int run_solve(const RunConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    const BuiltProblem built = build_problem(config);
    const auto hierarchies = build_hierarchies(built.problem, config.controls);
    const EigenSolveState state =
        solve_eigenvalue(built.fields, built.problem, hierarchies, config.controls);
    const auto residuals = coupled_residuals(state, built.fields, built.problem);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::filesystem::create_directories(config.output_dir);
    write_flux_csv(config.output_dir, state);
    write_history_csv(config.output_dir, state);
    write_summary(config.output_dir, config, built, state, residuals, wall);
    return state.converged ? 0 : 2;
}

int run_compare(const RunConfig& config) {
    const BuiltProblem built = build_problem(config);
    const auto hierarchies = build_hierarchies(built.problem, config.controls);
    const EigenSolveState mg_state =
        solve_eigenvalue(built.fields, built.problem, hierarchies, config.controls);
    const EigenSolveState ref_state =
        reference_eigensolve(built.fields, built.problem, config.controls);

    std::filesystem::create_directories(config.output_dir);
    std::ofstream out(config.output_dir / "compare_report.csv");
    out << "metric,group,value\n";
    bool ok = true;
    for (int g = 0; g < built.fields.n_groups; ++g) {
        GridField diff = mg_state.phi[g];
        for (int j = diff.jbegin(); j < diff.jend(); ++j)
            for (int i = diff.ibegin(); i < diff.iend(); ++i) diff(i, j) -= ref_state.phi[g](i, j);
        const FieldNorms n = norms(diff);
        out << "flux_linf," << g + 1 << ',' << fmt(n.linf) << '\n';
        out << "flux_l2," << g + 1 << ',' << fmt(n.l2) << '\n';
        if (!(n.linf <= config.compare_bound)) ok = false;
    }
    out << "keff_abs_diff,," << fmt(std::fabs(mg_state.k_eff - ref_state.k_eff)) << '\n';
    out << "linf_bound,," << fmt(config.compare_bound) << '\n';
    out << "status,," << (ok ? "pass" : "fail") << '\n';
    return ok ? 0 : 3;
}

int run_bench(const RunConfig& config) {
    const BuiltProblem built = build_problem(config);
    const ProblemFields& f = built.fields;
    const DiscretisedProblem& p = built.problem;

    // Fixed flat-flux sources; the timed section is the Jacobi sweeps alone.
    std::vector<GridField> phi;
    for (int g = 0; g < f.n_groups; ++g) {
        GridField x(f.nx, f.ny, f.halo);
        x.fill_interior(1.0);
        phi.push_back(std::move(x));
    }
    const auto fiss = fission_source(phi, f.nu_sigma_f, f.chi, 1.0);
    std::vector<GridField> sources;
    sources.reserve(f.n_groups);
    for (int g = 0; g < f.n_groups; ++g)
        sources.push_back(
            assemble_group_source(g, phi, phi, fiss[g], f.sigma_s, MultigroupMode::jacobi));

    std::filesystem::create_directories(config.output_dir);
    std::ofstream out(config.output_dir / "bench.csv");
    out << "repeat_index,seconds\n";
    double tmin = 0.0, tmax = 0.0, tsum = 0.0;
    for (int rep = 0; rep < config.bench_repeats; ++rep) {
        for (auto& x : phi) {
            x.fill_interior(1.0);
            x.zero_halo();
        }
        const auto t0 = std::chrono::steady_clock::now();
        for (int it = 0; it < config.bench_jacobi_iters; ++it)
            for (int g = 0; g < f.n_groups; ++g)
                phi[g] = jacobi_step(phi[g], sources[g], p.groups[g].inv_diag, p.groups[g].d,
                                     p.od_filter);
        const double sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out << rep << ',' << fmt(sec) << '\n';
        tsum += sec;
        tmin = rep == 0 ? sec : std::min(tmin, sec);
        tmax = rep == 0 ? sec : std::max(tmax, sec);
    }
    out << "min," << fmt(tmin) << '\n';
    out << "max," << fmt(tmax) << '\n';
    out << "mean," << fmt(tsum / config.bench_repeats) << '\n';
    return 0;
}

} // namespace convdiff
