#include "convdiff/discretisation.hpp"

#include <string>

namespace convdiff {

namespace {

constexpr double kQuadWeights[5][5] = {
    {-5.0, 50.0, -15.0, 50.0, -5.0},
    {50.0, -320.0, -660.0, -320.0, 50.0},
    {-15.0, -660.0, 3600.0, -660.0, -15.0},
    {50.0, -320.0, -660.0, -320.0, 50.0},
    {-5.0, 50.0, -15.0, 50.0, -5.0},
};

bool is_x_edge(Edge e) { return e == Edge::left || e == Edge::right; }

// Halo band of one edge over the full transverse extent: the halo cell in
// layer l takes minus the interior value mirrored across the boundary face.
void negate_mirror_band(GridField& d, Edge e) {
    const int h = d.halo();
    for (int layer = 0; layer < h; ++layer) {
        if (is_x_edge(e)) {
            const int ih = e == Edge::left ? h - 1 - layer : d.nx_total() - h + layer;
            const int im = e == Edge::left ? h + layer : d.nx_total() - h - 1 - layer;
            for (int j = 0; j < d.ny_total(); ++j) d(ih, j) = -d(im, j);
        } else {
            const int jh = e == Edge::bottom ? h - 1 - layer : d.ny_total() - h + layer;
            const int jm = e == Edge::bottom ? h + layer : d.ny_total() - h - 1 - layer;
            for (int i = 0; i < d.nx_total(); ++i) d(i, jh) = -d(i, jm);
        }
    }
}

void zero_band(GridField& f, Edge e) {
    const int h = f.halo();
    if (is_x_edge(e)) {
        const int i0 = e == Edge::left ? 0 : f.nx_total() - h;
        for (int j = 0; j < f.ny_total(); ++j)
            for (int i = i0; i < i0 + h; ++i) f(i, j) = 0.0;
    } else {
        const int j0 = e == Edge::bottom ? 0 : f.ny_total() - h;
        for (int j = j0; j < j0 + h; ++j)
            for (int i = 0; i < f.nx_total(); ++i) f(i, j) = 0.0;
    }
}

// Bare-surface sink on the interior cells adjacent to the edge.
void augment_absorption(GridField& sigma_as, Edge e, double dx, double dy) {
    if (is_x_edge(e)) {
        const int i = e == Edge::left ? sigma_as.ibegin() : sigma_as.iend() - 1;
        const double add = 1.0 / (2.0 * dx);
        for (int j = sigma_as.jbegin(); j < sigma_as.jend(); ++j) sigma_as(i, j) += add;
    } else {
        const int j = e == Edge::bottom ? sigma_as.jbegin() : sigma_as.jend() - 1;
        const double add = 1.0 / (2.0 * dy);
        for (int i = sigma_as.ibegin(); i < sigma_as.iend(); ++i) sigma_as(i, j) += add;
    }
}

bool zero_style(const BoundaryTags& bc, VacuumMode mode, Edge e) {
    return bc[static_cast<int>(e)] == BoundaryKind::vacuum && mode == VacuumMode::zero_halo;
}

// The edge bands above write corner halo cells from stale neighbours; settle
// them deterministically. A corner touching a zeroed edge is zeroed, any
// other corner mirrors the diagonally opposite interior cell with one
// negation, which keeps zero-sum stencils annihilating constant fields.
void fix_halo_corners(GridField& d, const BoundaryTags& bc, VacuumMode mode) {
    const int h = d.halo();
    if (h == 0) return;
    const Edge x_edges[2] = {Edge::left, Edge::right};
    const Edge y_edges[2] = {Edge::bottom, Edge::top};
    for (Edge ex : x_edges) {
        for (Edge ey : y_edges) {
            const int i0 = ex == Edge::left ? 0 : d.nx_total() - h;
            const int j0 = ey == Edge::bottom ? 0 : d.ny_total() - h;
            const bool zero = zero_style(bc, mode, ex) || zero_style(bc, mode, ey);
            for (int j = j0; j < j0 + h; ++j) {
                for (int i = i0; i < i0 + h; ++i) {
                    if (zero) {
                        d(i, j) = 0.0;
                    } else {
                        const int im = ex == Edge::left ? 2 * h - 1 - i
                                                        : 2 * (d.nx_total() - h) - 1 - i;
                        const int jm = ey == Edge::bottom ? 2 * h - 1 - j
                                                          : 2 * (d.ny_total() - h) - 1 - j;
                        d(i, j) = -d(im, jm);
                    }
                }
            }
        }
    }
}

// Eq-style constraint of the 5x5 reflective path: the two interior lines
// next to the boundary must agree rowwise so a single mirrored value exists.
void check_boundary_homogeneity(const GridField& d, Edge e) {
    if (is_x_edge(e)) {
        const int i0 = e == Edge::left ? d.ibegin() : d.iend() - 1;
        const int i1 = e == Edge::left ? d.ibegin() + 1 : d.iend() - 2;
        for (int j = d.jbegin(); j < d.jend(); ++j)
            if (d(i0, j) != d(i1, j))
                throw UnsupportedCombination(
                    "reflective 5x5 boundary needs homogeneous diffusivity in the two "
                    "interior lines next to the edge; differs at row j=" + std::to_string(j));
    } else {
        const int j0 = e == Edge::bottom ? d.jbegin() : d.jend() - 1;
        const int j1 = e == Edge::bottom ? d.jbegin() + 1 : d.jend() - 2;
        for (int i = d.ibegin(); i < d.iend(); ++i)
            if (d(i, j0) != d(i, j1))
                throw UnsupportedCombination(
                    "reflective 5x5 boundary needs homogeneous diffusivity in the two "
                    "interior lines next to the edge; differs at column i=" + std::to_string(i));
    }
}

constexpr Edge kAllEdges[4] = {Edge::left, Edge::right, Edge::bottom, Edge::top};

} // namespace

StencilFilter build_fv_filter(double dx, double dy) {
    if (dx <= 0.0 || dy <= 0.0) throw NonPositiveSpacing("build_fv_filter: dx, dy must be > 0");
    StencilFilter w(3);
    w.at(-1, 0) = -1.0 / (dx * dx);
    w.at(1, 0) = -1.0 / (dx * dx);
    w.at(0, -1) = -1.0 / (dy * dy);
    w.at(0, 1) = -1.0 / (dy * dy);
    w.at(0, 0) = 2.0 / (dx * dx) + 2.0 / (dy * dy);
    return w;
}

StencilFilter build_convfem_filter(double dx) {
    if (dx <= 0.0) throw NonPositiveSpacing("build_convfem_filter: dx must be > 0");
    StencilFilter w(5);
    for (int v = -2; v <= 2; ++v)
        for (int u = -2; u <= 2; ++u) w.at(u, v) = kQuadWeights[v + 2][u + 2] / 900.0 / (dx * dx);
    return w;
}

StencilFilter off_diagonal_filter(const StencilFilter& filter) {
    StencilFilter w = filter;
    w.at(0, 0) = 0.0;
    return w;
}

GridField diffusion_apply(const GridField& phi, const GridField& d, const StencilFilter& filter) {
    if (!phi.same_shape(d)) throw DimensionMismatch("diffusion_apply: phi and D differ in shape");
    const GridField conv_dphi = conv_apply(hadamard_product(d, phi), filter);
    const GridField conv_phi = conv_apply(phi, filter);
    const GridField conv_d = conv_apply(d, filter);
    GridField out(phi.nx_interior(), phi.ny_interior(), phi.halo());
    for (int j = phi.jbegin(); j < phi.jend(); ++j) {
        const double* rp = phi.row(j);
        const double* rd = d.row(j);
        const double* c1 = conv_dphi.row(j);
        const double* c2 = conv_phi.row(j);
        const double* c3 = conv_d.row(j);
        double* ro = out.row(j);
        for (int i = phi.ibegin(); i < phi.iend(); ++i)
            ro[i] = 0.5 * (c1[i] + rd[i] * c2[i] - rp[i] * c3[i]);
    }
    return out;
}

GridField diagonal_coefficients(const GridField& d, const GridField& sigma_as,
                                const StencilFilter& filter) {
    if (!d.same_shape(sigma_as))
        throw DimensionMismatch("diagonal_coefficients: D and sigma_as differ in shape");
    const GridField conv_d = conv_apply(d, filter);
    const double w00 = filter.at(0, 0);
    GridField out(d.nx_interior(), d.ny_interior(), d.halo());
    for (int j = d.jbegin(); j < d.jend(); ++j) {
        const double* rd = d.row(j);
        const double* rc = conv_d.row(j);
        const double* rs = sigma_as.row(j);
        double* ro = out.row(j);
        for (int i = d.ibegin(); i < d.iend(); ++i) {
            const double a00 = w00 * rd[i] - 0.5 * rc[i] + rs[i];
            if (!(a00 > 0.0))
                throw NonPositiveDiagonal("diagonal_coefficients: a00 = " + std::to_string(a00) +
                                          " at (" + std::to_string(i) + ", " + std::to_string(j) +
                                          ")");
            ro[i] = a00;
        }
    }
    return out;
}

GridField compute_sigma_as(const GridField& sigma_a, const GridField& sigma_s_out) {
    if (!sigma_a.same_shape(sigma_s_out))
        throw DimensionMismatch("compute_sigma_as: fields differ in shape");
    GridField out(sigma_a.nx_interior(), sigma_a.ny_interior(), sigma_a.halo());
    for (int j = 0; j < sigma_a.ny_total(); ++j) {
        const double* ra = sigma_a.row(j);
        const double* rs = sigma_s_out.row(j);
        double* ro = out.row(j);
        for (int i = 0; i < sigma_a.nx_total(); ++i) ro[i] = ra[i] + rs[i];
    }
    return out;
}

void apply_reflective_halo(GridField& d, GridField& phi, Edge edge) {
    if (d.halo() < 1) throw HaloTooShallow("apply_reflective_halo: needs halo >= 1");
    if (!d.same_shape(phi))
        throw DimensionMismatch("apply_reflective_halo: D and phi differ in shape");
    negate_mirror_band(d, edge);
    zero_band(phi, edge);
}

void apply_vacuum(DiscretisedProblem& problem, Edge edge, VacuumMode mode) {
    if (mode == VacuumMode::absorption && problem.filter.size() != 3)
        throw UnsupportedCombination(
            "vacuum absorption mode needs the 3x3 stencil; use zero_halo for wider filters");
    for (auto& g : problem.groups) {
        if (mode == VacuumMode::absorption) {
            augment_absorption(g.sigma_as, edge, problem.dx, problem.dy);
            negate_mirror_band(g.d, edge);
        } else {
            zero_band(g.d, edge);
        }
    }
    rebuild_diagonals(problem);
}

void rebuild_diagonals(DiscretisedProblem& problem) {
    for (auto& g : problem.groups) {
        g.diag = diagonal_coefficients(g.d, g.sigma_as, problem.filter);
        g.inv_diag = hadamard_inverse(g.diag, Region::interior);
    }
}

GroupCoefficients build_group_coefficients(const GridField& d_raw, const GridField& sigma_as_raw,
                                           const StencilFilter& filter, double dx, double dy,
                                           const BoundaryTags& bc, const DiscretiseOptions& opt) {
    if (d_raw.halo() < filter.halo_required())
        throw HaloTooShallow("build_group_coefficients: field halo too shallow for the filter");
    GroupCoefficients g;
    g.d = d_raw;
    g.sigma_as = sigma_as_raw;
    for (Edge e : kAllEdges) {
        if (bc[static_cast<int>(e)] == BoundaryKind::reflective) {
            if (filter.size() > 3) {
                if (!opt.allow_convfem_reflective)
                    throw UnsupportedCombination(
                        "reflective edges with the 5x5 filter are gated behind "
                        "allow_convfem_reflective");
                check_boundary_homogeneity(g.d, e);
            }
            negate_mirror_band(g.d, e);
        } else if (opt.vacuum_mode == VacuumMode::absorption) {
            if (filter.size() != 3)
                throw UnsupportedCombination(
                    "vacuum absorption mode needs the 3x3 stencil; use zero_halo instead");
            augment_absorption(g.sigma_as, e, dx, dy);
            negate_mirror_band(g.d, e);
        } else {
            zero_band(g.d, e);
        }
    }
    fix_halo_corners(g.d, bc, opt.vacuum_mode);
    g.diag = diagonal_coefficients(g.d, g.sigma_as, filter);
    g.inv_diag = hadamard_inverse(g.diag, Region::interior);
    return g;
}

DiscretisedProblem discretise(std::vector<GridField> d_raw, std::vector<GridField> sigma_as_raw,
                              double dx, double dy, const BoundaryTags& bc,
                              const DiscretiseOptions& opt) {
    if (d_raw.empty() || d_raw.size() != sigma_as_raw.size())
        throw DimensionMismatch("discretise: group field counts differ or are empty");
    DiscretisedProblem p;
    p.options = opt;
    p.dx = dx;
    p.dy = dy;
    p.bc = bc;
    if (opt.scheme == Scheme::convfem) {
        if (dx != dy) throw UnsupportedCombination("ConvFEM discretisation requires dx == dy");
        p.filter = build_convfem_filter(dx);
    } else {
        p.filter = build_fv_filter(dx, dy);
    }
    p.od_filter = off_diagonal_filter(p.filter);
    p.groups.reserve(d_raw.size());
    for (size_t g = 0; g < d_raw.size(); ++g)
        p.groups.push_back(
            build_group_coefficients(d_raw[g], sigma_as_raw[g], p.filter, dx, dy, bc, opt));
    p.d_raw = std::move(d_raw);
    p.sigma_as_raw = std::move(sigma_as_raw);
    return p;
}

} // namespace convdiff
