#include "convdiff/oracle.hpp"

#include <cmath>
#include <string>

namespace convdiff {

namespace {

// Five-point coefficients written out directly from the face-averaged
// diffusivities; the independent route the convolution path is tested against.
void assemble_fv(SparseSystem& sys, const DiscretisedProblem& problem, int group) {
    const GridField& d = problem.groups[group].d;
    const GridField& sas = problem.groups[group].sigma_as;
    const double ax = 2.0 * problem.dx * problem.dx;
    const double ay = 2.0 * problem.dy * problem.dy;
    for (int j = d.jbegin(); j < d.jend(); ++j) {
        for (int i = d.ibegin(); i < d.iend(); ++i) {
            const double a00 = (d(i - 1, j) + 2.0 * d(i, j) + d(i + 1, j)) / ax +
                               (d(i, j - 1) + 2.0 * d(i, j) + d(i, j + 1)) / ay + sas(i, j);
            if (!(a00 > 0.0))
                throw NonPositiveDiagonal("assemble_sparse_system: a00 = " + std::to_string(a00));
            sys.diag.push_back(a00);
            // (v, u) ascending to keep the sweep deterministic
            if (j - 1 >= d.jbegin()) {
                sys.off_col.push_back(sys.row_of(i, j - 1));
                sys.off_val.push_back(-(d(i, j - 1) + d(i, j)) / ay);
            }
            if (i - 1 >= d.ibegin()) {
                sys.off_col.push_back(sys.row_of(i - 1, j));
                sys.off_val.push_back(-(d(i - 1, j) + d(i, j)) / ax);
            }
            if (i + 1 < d.iend()) {
                sys.off_col.push_back(sys.row_of(i + 1, j));
                sys.off_val.push_back(-(d(i, j) + d(i + 1, j)) / ax);
            }
            if (j + 1 < d.jend()) {
                sys.off_col.push_back(sys.row_of(i, j + 1));
                sys.off_val.push_back(-(d(i, j) + d(i, j + 1)) / ay);
            }
            sys.off_ptr.push_back(static_cast<int>(sys.off_col.size()));
        }
    }
}

// General stencil: off-diagonal coefficient w^{uv} (D_ij + D_nb)/2, diagonal
// w^{00} D - 1/2 sum_uv w^{uv} D_nb + sigma_as.
void assemble_stencil(SparseSystem& sys, const DiscretisedProblem& problem, int group) {
    const GridField& d = problem.groups[group].d;
    const GridField& sas = problem.groups[group].sigma_as;
    const StencilFilter& w = problem.filter;
    const int l = w.halo_required();
    for (int j = d.jbegin(); j < d.jend(); ++j) {
        for (int i = d.ibegin(); i < d.iend(); ++i) {
            double conv_d = 0.0;
            for (int v = -l; v <= l; ++v)
                for (int u = -l; u <= l; ++u) conv_d += w.at(u, v) * d(i + u, j + v);
            const double a00 = w.at(0, 0) * d(i, j) - 0.5 * conv_d + sas(i, j);
            if (!(a00 > 0.0))
                throw NonPositiveDiagonal("assemble_sparse_system: a00 = " + std::to_string(a00));
            sys.diag.push_back(a00);
            for (int v = -l; v <= l; ++v) {
                for (int u = -l; u <= l; ++u) {
                    if (u == 0 && v == 0) continue;
                    if (w.at(u, v) == 0.0) continue;
                    const int ni = i + u, nj = j + v;
                    const bool interior = ni >= d.ibegin() && ni < d.iend() && nj >= d.jbegin() &&
                                          nj < d.jend();
                    if (!interior) continue; // halo flux is pinned to zero
                    sys.off_col.push_back(sys.row_of(ni, nj));
                    sys.off_val.push_back(w.at(u, v) * (d(i, j) + d(ni, nj)) / 2.0);
                }
            }
            sys.off_ptr.push_back(static_cast<int>(sys.off_col.size()));
        }
    }
}

double linf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) {
        const double a = std::fabs(x);
        if (a > m) m = a;
    }
    return m;
}

double residual_linf(const SparseSystem& sys, const std::vector<double>& x) {
    double m = 0.0;
    for (int r = 0; r < sys.n; ++r) {
        double acc = sys.rhs[r] - sys.diag[r] * x[r];
        for (int k = sys.off_ptr[r]; k < sys.off_ptr[r + 1]; ++k)
            acc -= sys.off_val[k] * x[sys.off_col[k]];
        const double a = std::fabs(acc);
        if (a > m) m = a;
    }
    return m;
}

} // namespace

SparseSystem assemble_sparse_system(const DiscretisedProblem& problem, int group,
                                    const GridField& source) {
    const GridField& d = problem.groups.at(group).d;
    SparseSystem sys;
    sys.nx = d.nx_interior();
    sys.ny = d.ny_interior();
    sys.halo = d.halo();
    sys.n = sys.nx * sys.ny;
    sys.diag.reserve(sys.n);
    sys.off_ptr.reserve(sys.n + 1);
    sys.off_ptr.push_back(0);
    if (problem.options.scheme == Scheme::fv)
        assemble_fv(sys, problem, group);
    else
        assemble_stencil(sys, problem, group);
    set_rhs(sys, source);
    return sys;
}

void set_rhs(SparseSystem& system, const GridField& source) {
    if (source.nx_interior() != system.nx || source.ny_interior() != system.ny ||
        source.halo() != system.halo)
        throw DimensionMismatch("set_rhs: source shape does not match the system");
    system.rhs.resize(system.n);
    for (int j = source.jbegin(); j < source.jend(); ++j)
        for (int i = source.ibegin(); i < source.iend(); ++i)
            system.rhs[system.row_of(i, j)] = source(i, j);
}

std::vector<double> matvec(const SparseSystem& system, const std::vector<double>& x) {
    std::vector<double> y(system.n, 0.0);
    for (int r = 0; r < system.n; ++r) {
        double acc = system.diag[r] * x[r];
        for (int k = system.off_ptr[r]; k < system.off_ptr[r + 1]; ++k)
            acc += system.off_val[k] * x[system.off_col[k]];
        y[r] = acc;
    }
    return y;
}

GaussSeidelResult gauss_seidel_solve(const SparseSystem& system, std::vector<double>& x,
                                     double tol, long max_iters) {
    if (static_cast<int>(x.size()) != system.n)
        throw DimensionMismatch("gauss_seidel_solve: initial guess size mismatch");
    const double bnorm = linf(system.rhs);
    const double threshold = tol * (bnorm > 0.0 ? bnorm : 1.0);
    double resid = residual_linf(system, x);
    if (resid <= threshold) return {0, bnorm > 0.0 ? resid / bnorm : resid};
    const double first_resid = resid;
    for (long sweep = 1; sweep <= max_iters; ++sweep) {
        for (int r = 0; r < system.n; ++r) {
            double acc = system.rhs[r];
            for (int k = system.off_ptr[r]; k < system.off_ptr[r + 1]; ++k)
                acc -= system.off_val[k] * x[system.off_col[k]];
            x[r] = acc / system.diag[r];
        }
        resid = residual_linf(system, x);
        if (resid <= threshold) return {sweep, bnorm > 0.0 ? resid / bnorm : resid};
    }
    throw NonConvergence("gauss_seidel_solve: residual " + std::to_string(resid) + " (from " +
                         std::to_string(first_resid) + ") above " + std::to_string(threshold) +
                         " after " + std::to_string(max_iters) + " sweeps");
}

EigenSolveState reference_eigensolve(const ProblemFields& fields,
                                     const DiscretisedProblem& problem,
                                     const SolveControls& controls) {
    // The matrices stay fixed across power steps, only sources change.
    std::vector<SparseSystem> systems;
    systems.reserve(fields.n_groups);
    const GridField zero(fields.nx, fields.ny, fields.halo);
    for (int g = 0; g < fields.n_groups; ++g)
        systems.push_back(assemble_sparse_system(problem, g, zero));

    GroupSolver gs_solver = [&](int g, const GridField& s, GridField& phi) -> long {
        SparseSystem& sys = systems[g];
        set_rhs(sys, s);
        std::vector<double> x(sys.n);
        for (int j = phi.jbegin(); j < phi.jend(); ++j)
            for (int i = phi.ibegin(); i < phi.iend(); ++i) x[sys.row_of(i, j)] = phi(i, j);
        const GaussSeidelResult res =
            gauss_seidel_solve(sys, x, controls.oracle_tol, controls.oracle_max_sweeps);
        for (int j = phi.jbegin(); j < phi.jend(); ++j)
            for (int i = phi.ibegin(); i < phi.iend(); ++i) phi(i, j) = x[sys.row_of(i, j)];
        phi.zero_halo();
        return res.iterations;
    };
    return power_iteration(fields, controls, gs_solver);
}

} // namespace convdiff
