#pragma once

#include <filesystem>
#include <string>

#include "convdiff/eigen.hpp"
#include "convdiff/oracle.hpp"

namespace convdiff {

/// Everything one CLI run needs, parsed from a sectioned key = value file.
/// Relative input paths are resolved against the config file's directory;
/// the output directory is taken relative to the working directory.
struct RunConfig {
    std::filesystem::path geometry_file;
    std::filesystem::path cross_section_file;

    enum class Kind { from_geometry, assembly, core };
    Kind kind = Kind::from_geometry;
    RodState rods = RodState::withdrawn;
    bool core_map_given = false;
    CoreMap core_map{};

    Scheme scheme = Scheme::fv;
    VacuumMode vacuum_mode = VacuumMode::absorption;
    bool allow_convfem_reflective = false;
    DScatterConvention d_scatter = DScatterConvention::full_row;

    SolveControls controls;

    double compare_bound = 1e-8;
    int bench_repeats = 400;
    int bench_jacobi_iters = 100;

    std::filesystem::path output_dir = "out";
    unsigned seed = 0;
};

RunConfig load_run_config(const std::filesystem::path& path);

/// Parse a core map override of the form "WWI/WIW/IWW" (rows top to bottom).
CoreMap parse_core_map(const std::string& text);

struct BuiltProblem {
    ProblemFields fields;
    DiscretisedProblem problem;
};

BuiltProblem build_problem(const RunConfig& config);

/// Solve and write flux_g{g}.csv, keff_history.csv and summary.txt into the
/// output directory. Returns 0 on convergence, 2 otherwise.
int run_solve(const RunConfig& config);

/// Run the multigrid and reference pipelines on the same problem and write
/// compare_report.csv. Returns 0 iff every group's pointwise linf difference
/// is within the configured bound, else 3.
int run_compare(const RunConfig& config);

/// Time repeated batches of Jacobi iterations over all groups and write
/// bench.csv. Informational; always returns 0.
int run_bench(const RunConfig& config);

} // namespace convdiff
