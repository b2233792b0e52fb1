#include "convdiff/multigrid.hpp"

#include <string>

namespace convdiff {

namespace {

void require_shape(const GridField& a, const GridField& b, const char* op) {
    if (!a.same_shape(b)) throw DimensionMismatch(std::string(op) + ": field shapes differ");
}

} // namespace

GridField jacobi_step(const GridField& phi, const GridField& s, const GridField& inv_diag,
                      const GridField& d, const StencilFilter& od_filter) {
    require_shape(phi, s, "jacobi_step");
    require_shape(phi, inv_diag, "jacobi_step");
    require_shape(phi, d, "jacobi_step");
    const GridField conv_phi = conv_apply(phi, od_filter);
    const GridField conv_dphi = conv_apply(hadamard_product(d, phi), od_filter);
    GridField out(phi.nx_interior(), phi.ny_interior(), phi.halo());
    for (int j = phi.jbegin(); j < phi.jend(); ++j) {
        const double* rs = s.row(j);
        const double* ri = inv_diag.row(j);
        const double* rd = d.row(j);
        const double* c1 = conv_phi.row(j);
        const double* c2 = conv_dphi.row(j);
        double* ro = out.row(j);
        for (int i = phi.ibegin(); i < phi.iend(); ++i)
            ro[i] = ri[i] * (rs[i] - 0.5 * (rd[i] * c1[i] + c2[i]));
    }
    return out;
}

GridField residual(const GridField& phi, const GridField& s, const GridField& diag,
                   const GridField& d, const StencilFilter& od_filter) {
    require_shape(phi, s, "residual");
    require_shape(phi, diag, "residual");
    require_shape(phi, d, "residual");
    const GridField conv_phi = conv_apply(phi, od_filter);
    const GridField conv_dphi = conv_apply(hadamard_product(d, phi), od_filter);
    GridField out(phi.nx_interior(), phi.ny_interior(), phi.halo());
    for (int j = phi.jbegin(); j < phi.jend(); ++j) {
        const double* rs = s.row(j);
        const double* rdg = diag.row(j);
        const double* rp = phi.row(j);
        const double* rd = d.row(j);
        const double* c1 = conv_phi.row(j);
        const double* c2 = conv_dphi.row(j);
        double* ro = out.row(j);
        for (int i = phi.ibegin(); i < phi.iend(); ++i)
            ro[i] = rs[i] - (rdg[i] * rp[i] + 0.5 * (rd[i] * c1[i] + c2[i]));
    }
    return out;
}

GridField restrict_half(const GridField& fine) {
    if (fine.nx_interior() % 2 != 0 || fine.ny_interior() % 2 != 0)
        throw OddDimensions("restrict_half: fine interior dims must be even, got " +
                            std::to_string(fine.nx_interior()) + "x" +
                            std::to_string(fine.ny_interior()));
    GridField coarse(fine.nx_interior() / 2, fine.ny_interior() / 2, fine.halo());
    const int h = fine.halo();
    for (int j = coarse.jbegin(); j < coarse.jend(); ++j) {
        const int jf = h + 2 * (j - h);
        const double* r0 = fine.row(jf);
        const double* r1 = fine.row(jf + 1);
        double* rc = coarse.row(j);
        for (int i = coarse.ibegin(); i < coarse.iend(); ++i) {
            const int fi = h + 2 * (i - h);
            rc[i] = 0.25 * r0[fi] + 0.25 * r0[fi + 1] + 0.25 * r1[fi] + 0.25 * r1[fi + 1];
        }
    }
    return coarse;
}

GridField harmonic_coarsen(const GridField& fine) {
    if (fine.nx_interior() % 2 != 0 || fine.ny_interior() % 2 != 0)
        throw OddDimensions("harmonic_coarsen: fine interior dims must be even");
    GridField coarse(fine.nx_interior() / 2, fine.ny_interior() / 2, fine.halo());
    const int h = fine.halo();
    for (int j = coarse.jbegin(); j < coarse.jend(); ++j) {
        const int jf = h + 2 * (j - h);
        const double* r0 = fine.row(jf);
        const double* r1 = fine.row(jf + 1);
        double* rc = coarse.row(j);
        for (int i = coarse.ibegin(); i < coarse.iend(); ++i) {
            const int fi = h + 2 * (i - h);
            const double a = r0[fi], b = r0[fi + 1], c = r1[fi], d = r1[fi + 1];
            if (a == 0.0 || b == 0.0 || c == 0.0 || d == 0.0) {
                rc[i] = 0.0;
            } else {
                rc[i] = 4.0 / (1.0 / a + 1.0 / b + 1.0 / c + 1.0 / d);
            }
        }
    }
    return coarse;
}

MultigridHierarchy build_hierarchy(const DiscretisedProblem& problem, int n_levels, int group,
                                   int jacobi_iters_per_level) {
    if (n_levels < 1 || jacobi_iters_per_level < 1)
        throw IndivisibleDims("build_hierarchy: n_levels and jacobi_iters_per_level must be >= 1");
    const GridField& fine = problem.d_raw.at(group);
    const int divisor = 1 << (n_levels - 1);
    if (fine.nx_interior() % divisor != 0 || fine.ny_interior() % divisor != 0)
        throw IndivisibleDims("build_hierarchy: interior dims " +
                              std::to_string(fine.nx_interior()) + "x" +
                              std::to_string(fine.ny_interior()) + " not divisible by " +
                              std::to_string(divisor));
    if (fine.nx_interior() / divisor < 4 || fine.ny_interior() / divisor < 4)
        throw IndivisibleDims("build_hierarchy: coarsest interior would be below 4x4");

    MultigridHierarchy hier;
    hier.jacobi_iters_per_level = jacobi_iters_per_level;
    hier.levels.reserve(n_levels);

    MgLevel finest;
    finest.coeffs = problem.groups.at(group);
    finest.filter = problem.filter;
    finest.od_filter = problem.od_filter;
    finest.dx = problem.dx;
    finest.dy = problem.dy;
    hier.levels.push_back(std::move(finest));

    GridField raw_d = problem.d_raw[group];
    GridField raw_sas = problem.sigma_as_raw[group];
    double dx = problem.dx, dy = problem.dy;
    for (int level = 1; level < n_levels; ++level) {
        raw_d = harmonic_coarsen(raw_d);
        raw_sas = harmonic_coarsen(raw_sas);
        dx *= 2.0;
        dy *= 2.0;
        MgLevel lev;
        lev.dx = dx;
        lev.dy = dy;
        lev.filter = problem.options.scheme == Scheme::convfem ? build_convfem_filter(dx)
                                                               : build_fv_filter(dx, dy);
        lev.od_filter = off_diagonal_filter(lev.filter);
        lev.coeffs = build_group_coefficients(raw_d, raw_sas, lev.filter, dx, dy, problem.bc,
                                              problem.options);
        hier.levels.push_back(std::move(lev));
    }
    return hier;
}

GridField mg_cycle(const GridField& phi, const GridField& s, const MultigridHierarchy& hierarchy) {
    const int n_levels = hierarchy.n_levels();
    const MgLevel& top = hierarchy.finest();
    require_shape(phi, top.coeffs.diag, "mg_cycle");
    require_shape(s, top.coeffs.diag, "mg_cycle");

    std::vector<GridField> r;
    r.reserve(n_levels);
    r.push_back(residual(phi, s, top.coeffs.diag, top.coeffs.d, top.od_filter));
    for (int level = 1; level < n_levels; ++level) r.push_back(restrict_half(r.back()));

    // Correction at the coarsest level, smoothed from zeros.
    const MgLevel& bottom = hierarchy.levels.back();
    GridField dphi(r.back().nx_interior(), r.back().ny_interior(), r.back().halo());
    for (int it = 0; it < hierarchy.jacobi_iters_per_level; ++it)
        dphi = jacobi_step(dphi, r.back(), bottom.coeffs.inv_diag, bottom.coeffs.d,
                           bottom.od_filter);

    for (int level = n_levels - 2; level >= 0; --level) {
        const MgLevel& lev = hierarchy.levels[level];
        dphi = upsample2x(dphi);
        for (int it = 0; it < hierarchy.jacobi_iters_per_level; ++it)
            dphi = jacobi_step(dphi, r[level], lev.coeffs.inv_diag, lev.coeffs.d, lev.od_filter);
    }

    GridField out = phi;
    for (int j = out.jbegin(); j < out.jend(); ++j) {
        const double* rc = dphi.row(j);
        double* ro = out.row(j);
        for (int i = out.ibegin(); i < out.iend(); ++i) ro[i] += rc[i];
    }
    out.zero_halo();
    return out;
}

} // namespace convdiff
