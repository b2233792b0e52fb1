#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "convdiff/runner.hpp"
#include "harness.hpp"

using namespace convdiff;
using namespace testutil;

namespace {

namespace fs = std::filesystem;

const fs::path kDataDir = CONVDIFF_DATA_DIR;
const char* kCliPath = CONVDIFF_CLI_PATH;

fs::path scratch_dir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / "convdiff_cli_test";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Mini config with solver-section overrides appended last so they win.
fs::path write_config(const std::string& name, const std::string& solver_extra) {
    const fs::path path = scratch_dir() / name;
    std::ofstream out(path);
    out << "[files]\n"
        << "geometry = " << (kDataDir / "mini.geom").string() << "\n"
        << "cross_sections = " << (kDataDir / "xs_synth_2g.xs").string() << "\n"
        << "[discretisation]\nscheme = fv\nvacuum_mode = absorption\n"
        << "[solver]\n"
        << "n_levels = 4\njacobi_iters_per_level = 8\nmg_cycles = 300\n"
        << "max_power_iters = 100\nk_tol = 1e-10\nflux_tol = 1e-10\n"
        << "oracle_tol = 1e-13\noracle_max_sweeps = 500000\n"
        << solver_extra;
    return path;
}

int run_cli(const std::string& args) {
    const int status = std::system((std::string(kCliPath) + " " + args).c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void test_config_parsing() {
    const RunConfig cfg = load_run_config(kDataDir / "mini.cfg");
    record("config: shipped mini.cfg parses",
           cfg.controls.n_levels == 4 && cfg.controls.jacobi_iters_per_level == 8 &&
               cfg.controls.mg_cycles == 300 && cfg.scheme == Scheme::fv &&
               fs::equivalent(cfg.geometry_file, kDataDir / "mini.geom"));

    const fs::path bad = scratch_dir() / "bad.cfg";
    {
        std::ofstream out(bad);
        out << "[solver]\nmg_cycles is ten\n";
    }
    record("config: malformed line is a parse error",
           throws<ParseError>([&] { load_run_config(bad); }));

    const fs::path invalid = write_config("invalid.cfg", "k_tol = -1\n");
    record("config: non-positive tolerance rejected",
           throws<ParseError>([&] { load_run_config(invalid); }));

    const fs::path badcombo = write_config("badcombo.cfg", "");
    {
        std::ofstream out(badcombo, std::ios::app);
        out << "[discretisation]\nscheme = convfem\nvacuum_mode = absorption\n";
    }
    record("config: convfem with absorption vacuum rejected",
           throws<ParseError>([&] { load_run_config(badcombo); }));

    record("config: core map override parses",
           parse_core_map("WWI/WIW/IWW").at(0, 2) == RodState::inserted &&
               parse_core_map("WWI/WIW/IWW").at(2, 0) == RodState::inserted);
    record("config: malformed core map rejected",
           throws<ParseError>([] { parse_core_map("WW/WIW/IWW"); }));
}

void test_solve_artifacts() {
    RunConfig cfg = load_run_config(write_config("solve.cfg", ""));
    cfg.output_dir = scratch_dir() / "solve_out";
    const int rc = run_solve(cfg);
    record("solve: converged run exits 0", rc == 0);
    record("solve: flux, history and summary files written",
           fs::exists(cfg.output_dir / "flux_g1.csv") && fs::exists(cfg.output_dir / "flux_g2.csv") &&
               fs::exists(cfg.output_dir / "keff_history.csv") &&
               fs::exists(cfg.output_dir / "summary.txt"));

    // Flux CSV shape and value sanity: 40 rows by 40 columns, all finite and
    // non-negative after convergence.
    std::ifstream flux(cfg.output_dir / "flux_g1.csv");
    int rows = 0;
    bool clean = true;
    std::string line;
    while (std::getline(flux, line)) {
        ++rows;
        std::istringstream ss(line);
        std::string cell;
        int cols = 0;
        while (std::getline(ss, cell, ',')) {
            ++cols;
            const double v = std::stod(cell);
            clean = clean && std::isfinite(v) && v >= 0.0;
        }
        clean = clean && cols == 40;
    }
    record("solve: flux CSV is 40x40, finite and non-negative", rows == 40 && clean);

    const std::string summary = read_file(cfg.output_dir / "summary.txt");
    record("solve: summary reports k_eff and convergence",
           summary.find("k_eff ") != std::string::npos &&
               summary.find("converged yes") != std::string::npos);

    std::ifstream hist(cfg.output_dir / "keff_history.csv");
    std::getline(hist, line);
    record("solve: history header is power_iter,k_eff", line == "power_iter,k_eff");

    // Budget exhaustion surfaces as exit 2 with a partial history.
    RunConfig tiny = load_run_config(write_config("tiny.cfg", "max_power_iters = 1\nk_tol = 1e-15\nflux_tol = 1e-15\n"));
    tiny.output_dir = scratch_dir() / "tiny_out";
    record("solve: budget exhaustion exits 2", run_solve(tiny) == 2);
    std::ifstream th(tiny.output_dir / "keff_history.csv");
    int hist_rows = -1; // header
    while (std::getline(th, line)) ++hist_rows;
    record("solve: partial history written on non-convergence", hist_rows == 1);
}

void test_determinism() {
    RunConfig cfg = load_run_config(write_config("det.cfg", ""));
    cfg.output_dir = scratch_dir() / "det_a";
    run_solve(cfg);
    cfg.output_dir = scratch_dir() / "det_b";
    run_solve(cfg);
    bool identical = true;
    for (const char* name : {"flux_g1.csv", "flux_g2.csv", "keff_history.csv"})
        identical = identical && read_file(scratch_dir() / "det_a" / name) ==
                                     read_file(scratch_dir() / "det_b" / name);
    record("determinism: repeated solves produce byte-identical outputs", identical);
}

void test_compare() {
    RunConfig cfg = load_run_config(write_config("compare.cfg", ""));
    cfg.output_dir = scratch_dir() / "cmp_out";
    record("compare: matched pipelines exit 0", run_compare(cfg) == 0);
    const std::string report = read_file(cfg.output_dir / "compare_report.csv");
    record("compare: report carries per-group and k metrics",
           report.find("flux_linf,1,") != std::string::npos &&
               report.find("flux_l2,2,") != std::string::npos &&
               report.find("keff_abs_diff,,") != std::string::npos &&
               report.find("status,,pass") != std::string::npos);

    RunConfig loose = load_run_config(
        write_config("loose.cfg", "mg_cycles = 1\njacobi_iters_per_level = 1\nn_levels = 1\n"
                                  "max_power_iters = 4\n"));
    loose.output_dir = scratch_dir() / "cmp_loose";
    record("compare: starved multigrid budget is detected with exit 3", run_compare(loose) == 3);
    record("compare: failing report says so",
           read_file(loose.output_dir / "compare_report.csv").find("status,,fail") !=
               std::string::npos);
}

void test_bench() {
    RunConfig cfg = load_run_config(write_config("bench.cfg", ""));
    cfg.output_dir = scratch_dir() / "bench_out";
    cfg.bench_repeats = 3;
    record("bench: smoke run exits 0", run_bench(cfg) == 0);
    std::ifstream in(cfg.output_dir / "bench.csv");
    std::string line;
    std::getline(in, line);
    record("bench: header is repeat_index,seconds", line == "repeat_index,seconds");
    int data_rows = 0;
    double tmin = -1, tmax = -1, tmean = -1;
    while (std::getline(in, line)) {
        if (line.rfind("min,", 0) == 0) tmin = std::stod(line.substr(4));
        else if (line.rfind("max,", 0) == 0) tmax = std::stod(line.substr(4));
        else if (line.rfind("mean,", 0) == 0) tmean = std::stod(line.substr(5));
        else ++data_rows;
    }
    record("bench: three timing rows and a min/max/mean footer",
           data_rows == 3 && tmin >= 0 && tmax >= 0 && tmean >= 0);
    record("bench: min <= mean <= max", tmin <= tmean && tmean <= tmax);
}

void test_cli_binary() {
    const fs::path cfg = write_config("cli.cfg", "");
    const fs::path out = scratch_dir() / "cli_out";
    record("cli: solve subcommand exits 0",
           run_cli("solve " + cfg.string() + " --output-dir " + out.string()) == 0);
    record("cli: artifacts written through the binary", fs::exists(out / "flux_g1.csv"));
    record("cli: missing arguments exit 1", run_cli("") == 1);
    record("cli: unknown command exits 1", run_cli("frobnicate " + cfg.string()) == 1);
    record("cli: missing config exits 1", run_cli("solve /nonexistent.cfg") == 1);
    record("cli: bench honours --repeats",
           run_cli("bench " + cfg.string() + " --output-dir " + (scratch_dir() / "cli_bench").string() +
                   " --repeats 2") == 0);
    std::ifstream in(scratch_dir() / "cli_bench" / "bench.csv");
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    record("cli: bench wrote 2 rows plus header and footer", lines == 1 + 2 + 3);
}

} // namespace

int main() {
    test_config_parsing();
    test_solve_artifacts();
    test_determinism();
    test_compare();
    test_bench();
    test_cli_binary();
    return summary("cli");
}
