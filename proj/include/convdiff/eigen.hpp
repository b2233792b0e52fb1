#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "convdiff/geometry.hpp"
#include "convdiff/multigrid.hpp"

namespace convdiff {

enum class MultigroupMode { gauss_seidel, jacobi };

struct SolveControls {
    int max_power_iters = 100;
    double k_tol = 1e-10;
    double flux_tol = 1e-10;
    int sweeps_per_power = 1;
    int mg_cycles = 100; // multigrid iterations per group per sweep
    int jacobi_iters_per_level = 2;
    int n_levels = 3;
    MultigroupMode multigroup_mode = MultigroupMode::gauss_seidel;
    double oracle_tol = 1e-12; // relative residual target of the reference solver
    long oracle_max_sweeps = 500000;
};

struct EigenSolveState {
    std::vector<GridField> phi;
    double k_eff = 1.0;
    std::vector<GridField> fission_src;
    std::vector<std::pair<int, double>> keff_history; // (power iteration, k_eff)
    long power_iterations = 0;
    long multigroup_iterations = 0;
    long inner_iterations = 0; // multigrid cycles or Gauss-Seidel sweeps
    bool converged = false;
    double last_k_change = 0.0;
    double last_flux_change = 0.0;
};

/// Solves one group's linear system for the given source, updating phi in
/// place; returns the number of inner iterations spent.
using GroupSolver = std::function<long(int group, const GridField& source, GridField& phi)>;

/// Per-group fission source lambda * chi_g * sum_g' nu sigma_f_g' phi_g'.
std::vector<GridField> fission_source(const std::vector<GridField>& phi,
                                      const std::vector<GridField>& nu_sigma_f,
                                      const std::vector<GridField>& chi, double lambda);

/// Scatter plus fission source of group g. In gauss_seidel mode groups below
/// g read the freshly updated fluxes and groups >= g (including the
/// within-group term) read the previous sweep's fluxes; jacobi mode reads the
/// previous fluxes throughout.
GridField assemble_group_source(int g, const std::vector<GridField>& phi_new,
                                const std::vector<GridField>& phi_old, const GridField& fission_g,
                                const std::vector<std::vector<GridField>>& sigma_s,
                                MultigroupMode mode);

/// One multi-group iteration over state.phi with the given per-group solver.
void multigroup_sweep(EigenSolveState& state, const ProblemFields& fields, MultigroupMode mode,
                      const GroupSolver& solve_group);

/// Total fission production sum_g sum_cells nu sigma_f_g phi_g (interior).
double fission_production(const std::vector<GridField>& phi,
                          const std::vector<GridField>& nu_sigma_f);

/// Outer power iteration for the dominant (k_eff, phi) pair. Flux starts flat
/// at one (or from `initial_flux` when given), k at one; each step rebuilds
/// the fission source with lambda = 1/k, runs the configured sweeps, rescales
/// k by the fission-production ratio and normalises the flux so its maximum
/// over all groups is one.
EigenSolveState power_iteration(const ProblemFields& fields, const SolveControls& controls,
                                const GroupSolver& solve_group,
                                const std::vector<GridField>* initial_flux = nullptr);

/// Power iteration with the multigrid pipeline as the per-group solver.
EigenSolveState solve_eigenvalue(const ProblemFields& fields, const DiscretisedProblem& problem,
                                 const std::vector<MultigridHierarchy>& hierarchies,
                                 const SolveControls& controls);

/// Hierarchies of every group, built with the control settings.
std::vector<MultigridHierarchy> build_hierarchies(const DiscretisedProblem& problem,
                                                  const SolveControls& controls);

/// Per-group interior linf residual of the coupled fixed point at the
/// current state (sources rebuilt from state.phi and state.k_eff).
std::vector<double> coupled_residuals(const EigenSolveState& state, const ProblemFields& fields,
                                      const DiscretisedProblem& problem);

} // namespace convdiff
