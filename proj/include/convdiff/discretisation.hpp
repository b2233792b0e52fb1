#pragma once

#include <array>
#include <vector>

#include "convdiff/field.hpp"

namespace convdiff {

enum class Scheme { fv, convfem };
enum class VacuumMode { absorption, zero_halo };
enum class BoundaryKind { reflective, vacuum };

enum class Edge : int { left = 0, right = 1, bottom = 2, top = 3 };

using BoundaryTags = std::array<BoundaryKind, 4>; // indexed by Edge

struct DiscretiseOptions {
    Scheme scheme = Scheme::fv;
    VacuumMode vacuum_mode = VacuumMode::absorption;
    // The 5x5 filter supports reflective edges only when the two interior
    // lines next to the boundary are rowwise homogeneous; the path is gated
    // here and the homogeneity is checked at setup.
    bool allow_convfem_reflective = false;
};

/// Per-group coefficient fields with boundary constraints baked in.
struct GroupCoefficients {
    GridField d;        // diffusivity, halo constrained per BC tags
    GridField sigma_as; // removal cross-section, vacuum augmentation included
    GridField diag;     // centre stencil coefficient a^{0,0}
    GridField inv_diag; // componentwise reciprocal of diag (interior)
};

/// A fully discretised multi-group diffusion problem on one grid level.
struct DiscretisedProblem {
    DiscretiseOptions options;
    double dx = 0.0, dy = 0.0;
    BoundaryTags bc{};
    StencilFilter filter;    // full stencil weights
    StencilFilter od_filter; // same weights with the centre zeroed
    std::vector<GroupCoefficients> groups;
    // Raw material fields before any boundary treatment; coarser grid levels
    // are derived from these, never from the constrained fields.
    std::vector<GridField> d_raw;
    std::vector<GridField> sigma_as_raw;

    int n_groups() const { return static_cast<int>(groups.size()); }
};

/// 3x3 five-point diffusion stencil: +-x neighbours -1/dx^2, +-y neighbours
/// -1/dy^2, centre 2/dx^2 + 2/dy^2, corners zero.
StencilFilter build_fv_filter(double dx, double dy);

/// 5x5 stencil of the quadratic 9-noded rectangular element, scaled 1/dx^2.
/// Restricted to square cells (dx = dy).
StencilFilter build_convfem_filter(double dx);

/// Copy of `filter` with the centre weight set to zero.
StencilFilter off_diagonal_filter(const StencilFilter& filter);

/// Variable-coefficient diffusion operator evaluated as three convolutions:
/// 1/2 (conv(D*phi) + D*conv(phi) - phi*conv(D)) on the interior.
GridField diffusion_apply(const GridField& phi, const GridField& d, const StencilFilter& filter);

/// Centre coefficient a^{0,0} = w^{0,0} D - 1/2 conv(D) + sigma_as on the
/// interior. Throws NonPositiveDiagonal if any interior value is <= 0.
GridField diagonal_coefficients(const GridField& d, const GridField& sigma_as,
                                const StencilFilter& filter);

/// sigma_as = sigma_a + precomputed out-scatter sum, componentwise.
GridField compute_sigma_as(const GridField& sigma_a, const GridField& sigma_s_out);

/// Zero-net-current treatment for one edge: halo flux zeroed and halo
/// diffusivity set to minus the mirrored interior value, layer by layer.
void apply_reflective_halo(GridField& d, GridField& phi, Edge edge);

/// Bare-surface treatment for one edge of an assembled problem. Mode
/// `absorption` (3x3 stencil only) adds 1/(2 dx) or 1/(2 dy) to the removal
/// term of interior cells on the edge and gives the halo the reflective
/// diffusivity treatment; mode `zero_halo` zeroes halo diffusivity instead.
/// Diagonals are rebuilt afterwards.
void apply_vacuum(DiscretisedProblem& problem, Edge edge, VacuumMode mode);

/// Recompute diag / inv_diag of every group from the current fields.
void rebuild_diagonals(DiscretisedProblem& problem);

/// Build constrained coefficients for one group from raw material fields.
/// Applies every edge treatment from the tags, fixes halo corners, then
/// derives the diagonal fields.
GroupCoefficients build_group_coefficients(const GridField& d_raw, const GridField& sigma_as_raw,
                                           const StencilFilter& filter, double dx, double dy,
                                           const BoundaryTags& bc, const DiscretiseOptions& opt);

/// Assemble a DiscretisedProblem from per-group raw material fields.
DiscretisedProblem discretise(std::vector<GridField> d_raw, std::vector<GridField> sigma_as_raw,
                              double dx, double dy, const BoundaryTags& bc,
                              const DiscretiseOptions& opt);

} // namespace convdiff
