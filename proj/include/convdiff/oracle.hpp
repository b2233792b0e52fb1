#pragma once

#include <vector>

#include "convdiff/eigen.hpp"

namespace convdiff {

/// Explicit sparse form of one group's discretised system, assembled
/// independently of the convolution machinery. One row per interior cell;
/// halo cells carry zero flux and therefore produce no columns, their
/// diffusivity enters the diagonal only.
struct SparseSystem {
    int n = 0;
    int nx = 0, ny = 0, halo = 0; // grid shape behind the row index map
    std::vector<double> diag;
    std::vector<int> off_ptr; // size n + 1
    std::vector<int> off_col;
    std::vector<double> off_val;
    std::vector<double> rhs;

    int row_of(int i, int j) const { return (j - halo) * nx + (i - halo); }
};

/// Assemble the system of `group` with the given source as right-hand side.
SparseSystem assemble_sparse_system(const DiscretisedProblem& problem, int group,
                                    const GridField& source);

/// Replace the right-hand side with the interior of `source`.
void set_rhs(SparseSystem& system, const GridField& source);

std::vector<double> matvec(const SparseSystem& system, const std::vector<double>& x);

struct GaussSeidelResult {
    long iterations = 0;
    double final_relative_residual = 0.0;
};

/// In-place Gauss-Seidel sweeps in ascending row order until the linf
/// residual drops below tol * linf(rhs) (absolute tol for a zero rhs).
/// Throws NonConvergence when the iteration cap is hit.
GaussSeidelResult gauss_seidel_solve(const SparseSystem& system, std::vector<double>& x,
                                     double tol, long max_iters);

/// The power-iteration driver with per-group Gauss-Seidel solves of the
/// explicitly assembled systems; the reference path for equivalence tests.
EigenSolveState reference_eigensolve(const ProblemFields& fields,
                                     const DiscretisedProblem& problem,
                                     const SolveControls& controls);

} // namespace convdiff
