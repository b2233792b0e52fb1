#include "convdiff/eigen.hpp"

#include <cmath>

namespace convdiff {

std::vector<GridField> fission_source(const std::vector<GridField>& phi,
                                      const std::vector<GridField>& nu_sigma_f,
                                      const std::vector<GridField>& chi, double lambda) {
    const int n_groups = static_cast<int>(phi.size());
    GridField total(phi[0].nx_interior(), phi[0].ny_interior(), phi[0].halo());
    for (int g = 0; g < n_groups; ++g) {
        for (int j = total.jbegin(); j < total.jend(); ++j) {
            const double* rf = nu_sigma_f[g].row(j);
            const double* rp = phi[g].row(j);
            double* rt = total.row(j);
            for (int i = total.ibegin(); i < total.iend(); ++i) rt[i] += rf[i] * rp[i];
        }
    }
    std::vector<GridField> out;
    out.reserve(n_groups);
    for (int g = 0; g < n_groups; ++g) {
        GridField s(total.nx_interior(), total.ny_interior(), total.halo());
        for (int j = s.jbegin(); j < s.jend(); ++j) {
            const double* rc = chi[g].row(j);
            const double* rt = total.row(j);
            double* rs = s.row(j);
            for (int i = s.ibegin(); i < s.iend(); ++i) rs[i] = lambda * rc[i] * rt[i];
        }
        out.push_back(std::move(s));
    }
    return out;
}

GridField assemble_group_source(int g, const std::vector<GridField>& phi_new,
                                const std::vector<GridField>& phi_old, const GridField& fission_g,
                                const std::vector<std::vector<GridField>>& sigma_s,
                                MultigroupMode mode) {
    GridField s = fission_g;
    const int n_groups = static_cast<int>(phi_old.size());
    for (int gp = 0; gp < n_groups; ++gp) {
        const GridField& src =
            (mode == MultigroupMode::gauss_seidel && gp < g) ? phi_new[gp] : phi_old[gp];
        if (!s.same_shape(src) || !s.same_shape(sigma_s[gp][g]))
            throw DimensionMismatch("assemble_group_source: field shapes differ");
        for (int j = s.jbegin(); j < s.jend(); ++j) {
            const double* rc = sigma_s[gp][g].row(j);
            const double* rp = src.row(j);
            double* rs = s.row(j);
            for (int i = s.ibegin(); i < s.iend(); ++i) rs[i] += rc[i] * rp[i];
        }
    }
    return s;
}

void multigroup_sweep(EigenSolveState& state, const ProblemFields& fields, MultigroupMode mode,
                      const GroupSolver& solve_group) {
    const std::vector<GridField> phi_old = state.phi;
    for (int g = 0; g < fields.n_groups; ++g) {
        const GridField s =
            assemble_group_source(g, state.phi, phi_old, state.fission_src[g], fields.sigma_s, mode);
        state.inner_iterations += solve_group(g, s, state.phi[g]);
    }
    ++state.multigroup_iterations;
}

double fission_production(const std::vector<GridField>& phi,
                          const std::vector<GridField>& nu_sigma_f) {
    double p = 0.0;
    for (size_t g = 0; g < phi.size(); ++g) {
        for (int j = phi[g].jbegin(); j < phi[g].jend(); ++j) {
            const double* rf = nu_sigma_f[g].row(j);
            const double* rp = phi[g].row(j);
            for (int i = phi[g].ibegin(); i < phi[g].iend(); ++i) p += rf[i] * rp[i];
        }
    }
    return p;
}

EigenSolveState power_iteration(const ProblemFields& fields, const SolveControls& controls,
                                const GroupSolver& solve_group,
                                const std::vector<GridField>* initial_flux) {
    bool fissile = false;
    for (int g = 0; g < fields.n_groups && !fissile; ++g)
        fissile = norms(fields.nu_sigma_f[g]).linf > 0.0;
    if (!fissile) throw NoFissileMaterial("power_iteration: no cell produces fission neutrons");

    EigenSolveState state;
    if (initial_flux) {
        if (static_cast<int>(initial_flux->size()) != fields.n_groups)
            throw DimensionMismatch("power_iteration: initial flux group count mismatch");
        state.phi = *initial_flux;
        for (auto& phi : state.phi) phi.zero_halo();
    } else {
        state.phi.reserve(fields.n_groups);
        for (int g = 0; g < fields.n_groups; ++g) {
            GridField phi(fields.nx, fields.ny, fields.halo);
            phi.fill_interior(1.0);
            state.phi.push_back(std::move(phi));
        }
    }

    double k = 1.0;
    for (int m = 1; m <= controls.max_power_iters; ++m) {
        state.fission_src = fission_source(state.phi, fields.nu_sigma_f, fields.chi, 1.0 / k);
        const double production_before = fission_production(state.phi, fields.nu_sigma_f);
        const std::vector<GridField> phi_before = state.phi;

        for (int sweep = 0; sweep < controls.sweeps_per_power; ++sweep)
            multigroup_sweep(state, fields, controls.multigroup_mode, solve_group);

        const double production_after = fission_production(state.phi, fields.nu_sigma_f);
        const double k_new = k * production_after / production_before;

        double flux_max = 0.0;
        for (const auto& phi : state.phi) {
            for (int j = phi.jbegin(); j < phi.jend(); ++j) {
                const double* r = phi.row(j);
                for (int i = phi.ibegin(); i < phi.iend(); ++i)
                    if (r[i] > flux_max) flux_max = r[i];
            }
        }
        if (!(flux_max > 0.0) || !std::isfinite(flux_max))
            throw NonConvergence("power_iteration: flux collapsed at iteration " +
                                 std::to_string(m));
        const double scale = 1.0 / flux_max;
        double flux_change = 0.0;
        for (int g = 0; g < fields.n_groups; ++g) {
            GridField& phi = state.phi[g];
            for (int j = phi.jbegin(); j < phi.jend(); ++j) {
                double* r = phi.row(j);
                const double* rb = phi_before[g].row(j);
                for (int i = phi.ibegin(); i < phi.iend(); ++i) {
                    r[i] *= scale;
                    const double d = std::fabs(r[i] - rb[i]);
                    if (d > flux_change) flux_change = d;
                }
            }
        }

        state.keff_history.emplace_back(m, k_new);
        state.power_iterations = m;
        state.last_k_change = std::fabs(k_new - k);
        state.last_flux_change = flux_change;
        k = k_new;
        state.k_eff = k;
        if (state.last_k_change < controls.k_tol && flux_change < controls.flux_tol) {
            state.converged = true;
            break;
        }
    }
    return state;
}

std::vector<MultigridHierarchy> build_hierarchies(const DiscretisedProblem& problem,
                                                  const SolveControls& controls) {
    std::vector<MultigridHierarchy> h;
    h.reserve(problem.n_groups());
    for (int g = 0; g < problem.n_groups(); ++g)
        h.push_back(build_hierarchy(problem, controls.n_levels, g, controls.jacobi_iters_per_level));
    return h;
}

EigenSolveState solve_eigenvalue(const ProblemFields& fields, const DiscretisedProblem& problem,
                                 const std::vector<MultigridHierarchy>& hierarchies,
                                 const SolveControls& controls) {
    if (static_cast<int>(hierarchies.size()) != problem.n_groups())
        throw DimensionMismatch("solve_eigenvalue: one hierarchy per group required");
    GroupSolver mg_solver = [&](int g, const GridField& s, GridField& phi) -> long {
        for (int c = 0; c < controls.mg_cycles; ++c) phi = mg_cycle(phi, s, hierarchies[g]);
        return controls.mg_cycles;
    };
    return power_iteration(fields, controls, mg_solver);
}

std::vector<double> coupled_residuals(const EigenSolveState& state, const ProblemFields& fields,
                                      const DiscretisedProblem& problem) {
    const auto fiss =
        fission_source(state.phi, fields.nu_sigma_f, fields.chi, 1.0 / state.k_eff);
    std::vector<double> out;
    out.reserve(fields.n_groups);
    for (int g = 0; g < fields.n_groups; ++g) {
        const GridField s = assemble_group_source(g, state.phi, state.phi, fiss[g],
                                                  fields.sigma_s, MultigroupMode::jacobi);
        const GridField r = residual(state.phi[g], s, problem.groups[g].diag, problem.groups[g].d,
                                     problem.od_filter);
        out.push_back(norms(r).linf);
    }
    return out;
}

} // namespace convdiff
