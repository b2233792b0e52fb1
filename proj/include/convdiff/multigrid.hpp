#pragma once

#include <vector>

#include "convdiff/discretisation.hpp"
#include "convdiff/field.hpp"

namespace convdiff {

struct MgLevel {
    GroupCoefficients coeffs;
    StencilFilter filter;
    StencilFilter od_filter;
    double dx = 0.0, dy = 0.0;
};

/// Grid-level sequence of one energy group, finest first. Interior dims halve
/// and spacings double at each level; every level is rediscretised from
/// harmonically coarsened material fields with the boundary treatment
/// reapplied from scratch.
struct MultigridHierarchy {
    std::vector<MgLevel> levels;
    int jacobi_iters_per_level = 2;

    int n_levels() const { return static_cast<int>(levels.size()); }
    const MgLevel& finest() const { return levels.front(); }
};

/// One Jacobi iteration in convolution form:
/// phi' = inv_diag * (s - 1/2 (D * conv(phi; w_od) + conv(D*phi; w_od))).
/// The halo of the result is zeroed.
GridField jacobi_step(const GridField& phi, const GridField& s, const GridField& inv_diag,
                      const GridField& d, const StencilFilter& od_filter);

/// r = s - (diag*phi + 1/2 (D * conv(phi; w_od) + conv(D*phi; w_od))) on the
/// interior.
GridField residual(const GridField& phi, const GridField& s, const GridField& diag,
                   const GridField& d, const StencilFilter& od_filter);

/// Stride-2 application of the 2x2 quarter-weight filter: each coarse cell is
/// the mean of its 2x2 fine block. Fine interior dims must be even.
GridField restrict_half(const GridField& fine);

/// 2x2-block harmonic mean, 4 / sum(1/v); zero if any block entry is zero.
GridField harmonic_coarsen(const GridField& fine);

/// Build the level sequence for one group. The finest interior dims must be
/// divisible by 2^(n_levels-1) and the coarsest interior must be >= 4x4.
MultigridHierarchy build_hierarchy(const DiscretisedProblem& problem, int n_levels, int group,
                                   int jacobi_iters_per_level);

/// One sawtooth cycle: restrict the fine residual down the hierarchy, smooth
/// a zero-initialised correction at the coarsest level, then upsample and
/// smooth on each finer level; returns phi plus the final correction.
GridField mg_cycle(const GridField& phi, const GridField& s, const MultigridHierarchy& hierarchy);

} // namespace convdiff
