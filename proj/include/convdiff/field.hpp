#pragma once

#include <vector>

#include "convdiff/errors.hpp"

namespace convdiff {

/// A 2D scalar field over a halo-padded regular grid.
///
/// The grid stores nx_total x ny_total values where the outermost `halo`
/// layers encode boundary conditions and the rest is the solved interior.
/// Index convention: i runs along x, j along y; storage is row-major by j,
/// so (i, j) and (i+1, j) are adjacent in memory. Indices are always given
/// in total-grid coordinates; the interior is halo <= i < nx_total - halo
/// (and likewise for j).
class GridField {
public:
    GridField() = default;

    GridField(int nx_interior, int ny_interior, int halo, double value = 0.0)
        : nx_(nx_interior + 2 * halo), ny_(ny_interior + 2 * halo), halo_(halo),
          values_(static_cast<size_t>(nx_) * ny_, value) {
        if (nx_interior < 1 || ny_interior < 1 || halo < 0)
            throw DimensionMismatch("GridField: interior dims must be >= 1 and halo >= 0");
    }

    int nx_total() const { return nx_; }
    int ny_total() const { return ny_; }
    int halo() const { return halo_; }
    int nx_interior() const { return nx_ - 2 * halo_; }
    int ny_interior() const { return ny_ - 2 * halo_; }

    // Interior bounds in total-grid coordinates, [ibegin, iend).
    int ibegin() const { return halo_; }
    int iend() const { return nx_ - halo_; }
    int jbegin() const { return halo_; }
    int jend() const { return ny_ - halo_; }

    double operator()(int i, int j) const { return values_[static_cast<size_t>(j) * nx_ + i]; }
    double& operator()(int i, int j) { return values_[static_cast<size_t>(j) * nx_ + i]; }

    const double* row(int j) const { return values_.data() + static_cast<size_t>(j) * nx_; }
    double* row(int j) { return values_.data() + static_cast<size_t>(j) * nx_; }

    bool same_shape(const GridField& o) const {
        return nx_ == o.nx_ && ny_ == o.ny_ && halo_ == o.halo_;
    }

    void fill(double v) { values_.assign(values_.size(), v); }

    void fill_interior(double v) {
        for (int j = jbegin(); j < jend(); ++j) {
            double* r = row(j);
            for (int i = ibegin(); i < iend(); ++i) r[i] = v;
        }
    }

    void zero_halo() {
        if (halo_ == 0) return;
        for (int j = 0; j < ny_; ++j) {
            const bool halo_row = j < jbegin() || j >= jend();
            double* r = row(j);
            if (halo_row) {
                for (int i = 0; i < nx_; ++i) r[i] = 0.0;
            } else {
                for (int i = 0; i < ibegin(); ++i) r[i] = 0.0;
                for (int i = iend(); i < nx_; ++i) r[i] = 0.0;
            }
        }
    }

    bool all_finite() const;

private:
    int nx_ = 0, ny_ = 0, halo_ = 0;
    std::vector<double> values_;
};

/// A small odd-sized square stencil of fixed weights, indexed by offsets
/// (u, v) in [-l, l]^2 with l = halo_required().
class StencilFilter {
public:
    StencilFilter() = default;

    explicit StencilFilter(int size) : size_(size), w_(static_cast<size_t>(size) * size, 0.0) {
        if (size < 1 || size % 2 == 0)
            throw DimensionMismatch("StencilFilter: size must be odd and positive");
    }

    int size() const { return size_; }
    int halo_required() const { return (size_ - 1) / 2; }

    double at(int u, int v) const {
        const int l = halo_required();
        return w_[static_cast<size_t>(v + l) * size_ + (u + l)];
    }
    double& at(int u, int v) {
        const int l = halo_required();
        return w_[static_cast<size_t>(v + l) * size_ + (u + l)];
    }

    /// Sum of all weights in fixed (v outer, u inner, ascending) order.
    double weight_sum() const;

private:
    int size_ = 0;
    std::vector<double> w_;
};

enum class Region { interior, all };

struct FieldNorms {
    double linf;
    double l2;
    double sum;
};

/// Sliding dot product of `filter` over `field`, stride 1. Interior cells of
/// the output hold the weighted neighbourhood sum; halo cells are zeroed.
/// Per-cell summation runs v outer, u inner, ascending, so results are
/// bit-reproducible.
GridField conv_apply(const GridField& field, const StencilFilter& filter);

/// Componentwise product over all cells including the halo.
GridField hadamard_product(const GridField& a, const GridField& b);

/// Componentwise reciprocal over the requested region; cells outside the
/// region are set to zero. Throws ZeroDivisor naming the first zero cell.
GridField hadamard_inverse(const GridField& a, Region region);

/// Copies each coarse interior value into its 2x2 block of fine cells.
/// The fine field keeps the halo depth of the coarse one; its halo is zeroed.
GridField upsample2x(const GridField& coarse);

/// Interior-only max-abs, root-sum-square and plain sum.
FieldNorms norms(const GridField& a);

} // namespace convdiff
