#include <cmath>

#include "convdiff/discretisation.hpp"
#include "harness.hpp"

using namespace convdiff;
using namespace testutil;

namespace {

// Direct five-point evaluation with face-averaged diffusivities, written
// independently of the convolution machinery.
GridField five_point_direct(const GridField& phi, const GridField& d, double dx, double dy) {
    GridField out(phi.nx_interior(), phi.ny_interior(), phi.halo());
    const double ax = 2.0 * dx * dx, ay = 2.0 * dy * dy;
    for (int j = phi.jbegin(); j < phi.jend(); ++j) {
        for (int i = phi.ibegin(); i < phi.iend(); ++i) {
            double acc = -(d(i - 1, j) + d(i, j)) / ax * phi(i - 1, j);
            acc -= (d(i, j) + d(i + 1, j)) / ax * phi(i + 1, j);
            acc -= (d(i, j - 1) + d(i, j)) / ay * phi(i, j - 1);
            acc -= (d(i, j) + d(i, j + 1)) / ay * phi(i, j + 1);
            acc += ((d(i - 1, j) + 2.0 * d(i, j) + d(i + 1, j)) / ax +
                    (d(i, j - 1) + 2.0 * d(i, j) + d(i, j + 1)) / ay) *
                   phi(i, j);
            out(i, j) = acc;
        }
    }
    return out;
}

void test_fv_filter() {
    const StencilFilter w = build_fv_filter(1.0, 1.0);
    bool exact = w.at(0, 0) == 4.0 && w.at(-1, 0) == -1.0 && w.at(1, 0) == -1.0 &&
                 w.at(0, -1) == -1.0 && w.at(0, 1) == -1.0 && w.at(-1, -1) == 0.0 &&
                 w.at(1, -1) == 0.0 && w.at(-1, 1) == 0.0 && w.at(1, 1) == 0.0;
    record("fv filter: unit spacing weights are exact", exact);

    const StencilFilter wy = build_fv_filter(1.0, 2.0);
    record("fv filter: dy = 2 gives centre 2.5 and y-neighbours -0.25",
           wy.at(0, 0) == 2.5 && wy.at(0, 1) == -0.25 && wy.at(0, -1) == -0.25 &&
               wy.at(1, 0) == -1.0);
    record("fv filter: weights sum to zero", w.weight_sum() == 0.0 && wy.weight_sum() == 0.0);

    const StencilFilter wr = build_fv_filter(0.063, 0.063);
    record("fv filter: zero sum at the assembly spacing", wr.weight_sum() == 0.0);

    record("fv filter: non-positive spacing is rejected",
           throws<NonPositiveSpacing>([] { build_fv_filter(0.0, 1.0); }));

    bool symmetric = true;
    for (int v = -1; v <= 1; ++v)
        for (int u = -1; u <= 1; ++u)
            symmetric = symmetric && wy.at(u, v) == wy.at(-u, v) && wy.at(u, v) == wy.at(u, -v);
    record("fv filter: symmetric under u -> -u and v -> -v", symmetric);
}

void test_convfem_filter() {
    const StencilFilter w = build_convfem_filter(1.0);
    record("convfem filter: centre weight is 3600/900 = 4", w.at(0, 0) == 4.0);

    const double expected[5][5] = {{-5, 50, -15, 50, -5},
                                   {50, -320, -660, -320, 50},
                                   {-15, -660, 3600, -660, -15},
                                   {50, -320, -660, -320, 50},
                                   {-5, 50, -15, 50, -5}};
    bool exact = true;
    for (int v = -2; v <= 2; ++v)
        for (int u = -2; u <= 2; ++u) exact = exact && w.at(u, v) == expected[v + 2][u + 2] / 900.0;
    record("convfem filter: every entry equals its integer / 900", exact);

    const double sum = std::fabs(w.weight_sum());
    record("convfem filter: 25 weights sum below 1e-15", sum <= 1e-15, qoi(sum, 1e-15));

    const StencilFilter w2 = build_convfem_filter(2.0);
    bool quartered = true;
    for (int v = -2; v <= 2; ++v)
        for (int u = -2; u <= 2; ++u) quartered = quartered && w2.at(u, v) == w.at(u, v) / 4.0;
    record("convfem filter: dx = 2 divides every weight by 4", quartered);

    bool symmetric = true;
    for (int v = -2; v <= 2; ++v)
        for (int u = -2; u <= 2; ++u)
            symmetric = symmetric && w.at(u, v) == w.at(-u, v) && w.at(u, v) == w.at(u, -v);
    record("convfem filter: symmetric under u -> -u and v -> -v", symmetric);
}

void test_off_diagonal() {
    const StencilFilter w = build_fv_filter(1.0, 1.0);
    const StencilFilter od = off_diagonal_filter(w);
    record("off-diagonal filter: fv centre zeroed, neighbours kept",
           od.at(0, 0) == 0.0 && od.at(1, 0) == -1.0 && od.at(0, 1) == -1.0);

    StencilFilter ident(3);
    ident.at(0, 0) = 1.0;
    record("off-diagonal filter: identity becomes the zero filter",
           off_diagonal_filter(ident).weight_sum() == 0.0);

    const StencilFilter q = build_convfem_filter(1.0);
    const StencilFilter qod = off_diagonal_filter(q);
    bool same = qod.at(0, 0) == 0.0;
    for (int v = -2; v <= 2; ++v)
        for (int u = -2; u <= 2; ++u)
            if (u != 0 || v != 0) same = same && qod.at(u, v) == q.at(u, v);
    record("off-diagonal filter: convfem off-centre weights bit-identical", same);
}

void test_diffusion_apply() {
    std::mt19937 rng(31);
    const StencilFilter w = build_fv_filter(1.0, 1.0);

    // Constant-coefficient reduction.
    const GridField phi = random_field(rng, 8, 8, 1, -1.0, 1.0);
    GridField dc(8, 8, 1, 1.3);
    const GridField lhs = diffusion_apply(phi, dc, w);
    const GridField conv_phi = conv_apply(phi, w);
    double worst = 0.0;
    for (int j = phi.jbegin(); j < phi.jend(); ++j)
        for (int i = phi.ibegin(); i < phi.iend(); ++i)
            worst = std::max(worst, std::fabs(lhs(i, j) - 1.3 * conv_phi(i, j)));
    record("diffusion: constant D reduces to D * conv(phi)", worst <= 1e-14, qoi(worst, 1e-14));

    // Constant flux is annihilated.
    GridField cphi(8, 8, 1, 0.8);
    const GridField dvar = random_field(rng, 8, 8, 1, 0.2, 2.0);
    const double ann = norms(diffusion_apply(cphi, dvar, w)).linf;
    record("diffusion: constant flux gives zero", ann <= 1e-13, qoi(ann, 1e-13));

    // Equivalence against the direct five-point evaluation.
    double worst_rel = 0.0;
    for (int n : {8, 16, 32, 64}) {
        const double dx = 0.4, dy = 0.7;
        const StencilFilter wf = build_fv_filter(dx, dy);
        const GridField p = random_field(rng, n, n, 1, -1.0, 1.0);
        const GridField d = random_field(rng, n, n, 1, 0.1, 2.0);
        const GridField a = diffusion_apply(p, d, wf);
        const GridField b = five_point_direct(p, d, dx, dy);
        worst_rel = std::max(worst_rel, rel_linf(a, b));
    }
    record("diffusion: matches the direct five-point stencil up to 64x64", worst_rel <= 1e-13,
           qoi(worst_rel, 1e-13));

    record("diffusion: shape mismatch rejected", throws<DimensionMismatch>([&] {
               diffusion_apply(phi, GridField(9, 8, 1, 1.0), w);
           }));
}

void test_diagonal_coefficients() {
    std::mt19937 rng(37);
    const StencilFilter w = build_fv_filter(1.0, 1.0);

    GridField ones(6, 6, 1, 1.0);
    GridField zero_sas(6, 6, 1);
    const GridField diag = diagonal_coefficients(ones, zero_sas, w);
    bool all4 = true;
    for (int j = diag.jbegin(); j < diag.jend(); ++j)
        for (int i = diag.ibegin(); i < diag.iend(); ++i) all4 = all4 && diag(i, j) == 4.0;
    record("diagonal: uniform D at unit spacing gives exactly 4", all4);

    // Against the direct centre coefficient.
    const double dx = 0.5, dy = 0.8;
    const StencilFilter wf = build_fv_filter(dx, dy);
    const GridField d = random_field(rng, 10, 10, 1, 0.2, 2.0);
    const GridField sas = random_field(rng, 10, 10, 1, 0.0, 0.4);
    const GridField a00 = diagonal_coefficients(d, sas, wf);
    double worst = 0.0;
    for (int j = d.jbegin(); j < d.jend(); ++j) {
        for (int i = d.ibegin(); i < d.iend(); ++i) {
            const double direct = (d(i - 1, j) + 2.0 * d(i, j) + d(i + 1, j)) / (2.0 * dx * dx) +
                                  (d(i, j - 1) + 2.0 * d(i, j) + d(i, j + 1)) / (2.0 * dy * dy) +
                                  sas(i, j);
            worst = std::max(worst, std::fabs(a00(i, j) - direct) / direct);
        }
    }
    record("diagonal: matches the direct centre coefficient", worst <= 1e-13, qoi(worst, 1e-13));

    // Adding a constant removal shifts the diagonal by exactly that constant.
    GridField shifted_sas = sas;
    for (int j = 0; j < shifted_sas.ny_total(); ++j)
        for (int i = 0; i < shifted_sas.nx_total(); ++i) shifted_sas(i, j) += 0.25;
    const GridField shifted = diagonal_coefficients(d, shifted_sas, wf);
    worst = 0.0;
    for (int j = d.jbegin(); j < d.jend(); ++j)
        for (int i = d.ibegin(); i < d.iend(); ++i)
            worst = std::max(worst, std::fabs(shifted(i, j) - (a00(i, j) + 0.25)) / shifted(i, j));
    record("diagonal: constant removal shift", worst <= 1e-15, qoi(worst, 1e-15));

    GridField bad_sas(6, 6, 1, -10.0);
    record("diagonal: non-positive centre is rejected", throws<NonPositiveDiagonal>([&] {
               diagonal_coefficients(ones, bad_sas, w);
           }));
}

void test_compute_sigma_as() {
    std::mt19937 rng(41);
    const GridField sa = random_field(rng, 5, 5, 1, 0.0, 0.5);
    GridField zero(5, 5, 1);
    const GridField no_scatter = compute_sigma_as(sa, zero);
    bool same = true;
    for (int j = 0; j < sa.ny_total(); ++j)
        for (int i = 0; i < sa.nx_total(); ++i) same = same && no_scatter(i, j) == sa(i, j);
    record("sigma_as: zero out-scatter leaves sigma_a", same);

    GridField a(1, 1, 0), b(1, 1, 0);
    a(0, 0) = 0.1;
    b(0, 0) = 0.2;
    record("sigma_as: 0.1 + 0.2", compute_sigma_as(a, b)(0, 0) == 0.1 + 0.2);

    const GridField so = random_field(rng, 5, 5, 1, 0.0, 0.5);
    const GridField sum = compute_sigma_as(sa, so);
    same = true;
    for (int j = 0; j < sa.ny_total(); ++j)
        for (int i = 0; i < sa.nx_total(); ++i) same = same && sum(i, j) == sa(i, j) + so(i, j);
    record("sigma_as: matches the per-cell loop", same);
}

void test_reflective_halo() {
    GridField d(4, 4, 1, 0.5);
    GridField phi(4, 4, 1, 1.0);
    apply_reflective_halo(d, phi, Edge::left);
    bool ok = true;
    for (int j = 0; j < d.ny_total(); ++j) ok = ok && d(0, j) == -0.5 && phi(0, j) == 0.0;
    record("reflective: left halo gets -D_mirror and zero flux", ok);
    double face = 0.0;
    for (int j = d.jbegin(); j < d.jend(); ++j)
        face = std::max(face, std::fabs((d(0, j) + d(1, j)) / 2.0));
    record("reflective: face-averaged diffusivity is exactly zero", face == 0.0);

    // Two halo layers mirror the two interior lines.
    GridField d2(6, 6, 2, 0.0);
    GridField p2(6, 6, 2, 1.0);
    for (int j = 0; j < d2.ny_total(); ++j)
        for (int i = d2.ibegin(); i < d2.iend(); ++i) d2(i, j) = i == 2 ? 0.7 : 0.9;
    apply_reflective_halo(d2, p2, Edge::left);
    record("reflective: halo depth 2 mirrors layer by layer",
           d2(1, 3) == -0.7 && d2(0, 3) == -0.9 && p2(0, 3) == 0.0 && p2(1, 3) == 0.0);

    GridField flat(4, 4, 0);
    GridField pflat(4, 4, 0);
    record("reflective: zero halo is rejected",
           throws<HaloTooShallow>([&] { apply_reflective_halo(flat, pflat, Edge::left); }));
}

void test_vacuum() {
    // One-group problem at the assembly spacing; absorption augmentation on
    // every edge, corners picking up both directions.
    const double dx = 0.063;
    GridField d(6, 6, 1, 1.4);
    GridField sas(6, 6, 1, 0.0);
    sas.fill_interior(0.1);
    const BoundaryTags vac{BoundaryKind::vacuum, BoundaryKind::vacuum, BoundaryKind::vacuum,
                           BoundaryKind::vacuum};
    DiscretiseOptions opt;
    const DiscretisedProblem p = discretise({d}, {sas}, dx, dx, vac, opt);
    const GridField& s = p.groups[0].sigma_as;
    const double edge_val = 0.1 + 1.0 / (2.0 * dx);
    const double corner_val = 0.1 + 1.0 / (2.0 * dx) + 1.0 / (2.0 * dx);
    record("vacuum absorption: edge cells gain 1/(2 dx) = 7.936...",
           s(2, 1) == edge_val && s(1, 2) == edge_val && std::fabs(edge_val - 0.1 - 7.9365079365079367) < 1e-12);
    record("vacuum absorption: corner cells gain both directions", s(1, 1) == corner_val);
    record("vacuum absorption: interior cells untouched", s(3, 3) == 0.1);
    record("vacuum absorption: halo diffusivity negated", p.groups[0].d(0, 3) == -1.4);

    // Unit spacing corner gains exactly one.
    GridField d1(4, 4, 1, 1.0);
    GridField sas1(4, 4, 1, 0.0);
    const DiscretisedProblem p1 = discretise({d1}, {sas1}, 1.0, 1.0, vac, opt);
    record("vacuum absorption: unit-spacing corner gains 1.0",
           p1.groups[0].sigma_as(1, 1) == 1.0);

    // zero_halo leaves sigma alone and zeroes halo diffusivity.
    DiscretiseOptions zh;
    zh.vacuum_mode = VacuumMode::zero_halo;
    const DiscretisedProblem pz = discretise({d}, {sas}, dx, dx, vac, zh);
    record("vacuum zero_halo: no removal augmentation", pz.groups[0].sigma_as(1, 1) == 0.1);
    record("vacuum zero_halo: halo diffusivity zeroed",
           pz.groups[0].d(0, 3) == 0.0 && pz.groups[0].d(0, 0) == 0.0);

    DiscretiseOptions bad;
    bad.scheme = Scheme::convfem;
    bad.vacuum_mode = VacuumMode::absorption;
    record("vacuum absorption with the 5x5 filter is rejected",
           throws<UnsupportedCombination>([&] {
               GridField dq(8, 8, 2, 1.0);
               GridField sq(8, 8, 2, 0.1);
               discretise({dq}, {sq}, 1.0, 1.0, vac, bad);
           }));

    // The public per-edge op agrees with the assembled treatment.
    DiscretisedProblem pe = discretise({d}, {sas}, dx, dx,
                                       BoundaryTags{BoundaryKind::reflective, BoundaryKind::reflective,
                                                    BoundaryKind::reflective, BoundaryKind::reflective},
                                       opt);
    apply_vacuum(pe, Edge::left, VacuumMode::absorption);
    record("apply_vacuum: augments the left interior line",
           pe.groups[0].sigma_as(1, 3) == edge_val && pe.groups[0].sigma_as(2, 3) == 0.1);
}

void test_convfem_reflective_gate() {
    const BoundaryTags refl{BoundaryKind::reflective, BoundaryKind::reflective,
                            BoundaryKind::reflective, BoundaryKind::reflective};
    GridField d(8, 8, 2, 0.9);
    GridField sas(8, 8, 2, 0.0);
    sas.fill_interior(0.2);
    DiscretiseOptions opt;
    opt.scheme = Scheme::convfem;
    opt.vacuum_mode = VacuumMode::zero_halo;
    record("convfem reflective: gated off by default", throws<UnsupportedCombination>([&] {
               discretise({d}, {sas}, 1.0, 1.0, refl, opt);
           }));

    opt.allow_convfem_reflective = true;
    const DiscretisedProblem p = discretise({d}, {sas}, 1.0, 1.0, refl, opt);
    record("convfem reflective: homogeneous boundary passes, both layers negated",
           p.groups[0].d(0, 4) == -0.9 && p.groups[0].d(1, 4) == -0.9 &&
               p.groups[0].d(0, 0) == -0.9);

    GridField dbad = d;
    dbad(2, 4) = 1.7; // first interior column no longer matches the second
    record("convfem reflective: inhomogeneous boundary fails fast",
           throws<UnsupportedCombination>([&] { discretise({dbad}, {sas}, 1.0, 1.0, refl, opt); }));
}

} // namespace

int main() {
    test_fv_filter();
    test_convfem_filter();
    test_off_diagonal();
    test_diffusion_apply();
    test_diagonal_coefficients();
    test_compute_sigma_as();
    test_reflective_halo();
    test_vacuum();
    test_convfem_reflective_gate();
    return summary("discretisation");
}
