#include "convdiff/field.hpp"

#include <cmath>
#include <string>

namespace convdiff {

bool GridField::all_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) return false;
    return true;
}

double StencilFilter::weight_sum() const {
    const int l = halo_required();
    double s = 0.0;
    for (int v = -l; v <= l; ++v)
        for (int u = -l; u <= l; ++u) s += at(u, v);
    return s;
}

namespace {

void require_same_shape(const GridField& a, const GridField& b, const char* op) {
    if (!a.same_shape(b))
        throw DimensionMismatch(std::string(op) + ": fields differ in dimensions or halo");
}

// 3x3 kernel unrolled in the same (v outer, u inner) order as the generic loop.
void conv_3x3(GridField& out, const GridField& x, const StencilFilter& w) {
    const double w00 = w.at(-1, -1), w10 = w.at(0, -1), w20 = w.at(1, -1);
    const double w01 = w.at(-1, 0), w11 = w.at(0, 0), w21 = w.at(1, 0);
    const double w02 = w.at(-1, 1), w12 = w.at(0, 1), w22 = w.at(1, 1);
    for (int j = x.jbegin(); j < x.jend(); ++j) {
        const double* rm = x.row(j - 1);
        const double* r0 = x.row(j);
        const double* rp = x.row(j + 1);
        double* ro = out.row(j);
        for (int i = x.ibegin(); i < x.iend(); ++i) {
            // Strictly sequential adds, same association as the generic loop.
            double acc = w00 * rm[i - 1];
            acc += w10 * rm[i];
            acc += w20 * rm[i + 1];
            acc += w01 * r0[i - 1];
            acc += w11 * r0[i];
            acc += w21 * r0[i + 1];
            acc += w02 * rp[i - 1];
            acc += w12 * rp[i];
            acc += w22 * rp[i + 1];
            ro[i] = acc;
        }
    }
}

} // namespace

GridField conv_apply(const GridField& field, const StencilFilter& filter) {
    const int l = filter.halo_required();
    if (field.halo() < l)
        throw HaloTooShallow("conv_apply: field halo " + std::to_string(field.halo()) +
                             " < filter requirement " + std::to_string(l));
    GridField out(field.nx_interior(), field.ny_interior(), field.halo());
    if (l == 1) {
        conv_3x3(out, field, filter);
        return out;
    }
    for (int j = field.jbegin(); j < field.jend(); ++j) {
        double* ro = out.row(j);
        for (int i = field.ibegin(); i < field.iend(); ++i) {
            double acc = 0.0;
            for (int v = -l; v <= l; ++v) {
                const double* r = field.row(j + v);
                for (int u = -l; u <= l; ++u) acc += filter.at(u, v) * r[i + u];
            }
            ro[i] = acc;
        }
    }
    return out;
}

GridField hadamard_product(const GridField& a, const GridField& b) {
    require_same_shape(a, b, "hadamard_product");
    GridField out(a.nx_interior(), a.ny_interior(), a.halo());
    for (int j = 0; j < a.ny_total(); ++j) {
        const double* ra = a.row(j);
        const double* rb = b.row(j);
        double* ro = out.row(j);
        for (int i = 0; i < a.nx_total(); ++i) ro[i] = ra[i] * rb[i];
    }
    return out;
}

GridField hadamard_inverse(const GridField& a, Region region) {
    GridField out(a.nx_interior(), a.ny_interior(), a.halo());
    const int i0 = region == Region::all ? 0 : a.ibegin();
    const int i1 = region == Region::all ? a.nx_total() : a.iend();
    const int j0 = region == Region::all ? 0 : a.jbegin();
    const int j1 = region == Region::all ? a.ny_total() : a.jend();
    for (int j = j0; j < j1; ++j) {
        const double* ra = a.row(j);
        double* ro = out.row(j);
        for (int i = i0; i < i1; ++i) {
            if (ra[i] == 0.0)
                throw ZeroDivisor("hadamard_inverse: zero value at (" + std::to_string(i) +
                                  ", " + std::to_string(j) + ")");
            ro[i] = 1.0 / ra[i];
        }
    }
    return out;
}

GridField upsample2x(const GridField& coarse) {
    GridField fine(2 * coarse.nx_interior(), 2 * coarse.ny_interior(), coarse.halo());
    const int h = coarse.halo();
    for (int j = coarse.jbegin(); j < coarse.jend(); ++j) {
        const double* rc = coarse.row(j);
        const int jf = h + 2 * (j - h);
        double* r0 = fine.row(jf);
        double* r1 = fine.row(jf + 1);
        for (int i = coarse.ibegin(); i < coarse.iend(); ++i) {
            const int fi = h + 2 * (i - h);
            r0[fi] = r0[fi + 1] = r1[fi] = r1[fi + 1] = rc[i];
        }
    }
    return fine;
}

FieldNorms norms(const GridField& a) {
    double linf = 0.0, sq = 0.0, sum = 0.0;
    for (int j = a.jbegin(); j < a.jend(); ++j) {
        const double* r = a.row(j);
        for (int i = a.ibegin(); i < a.iend(); ++i) {
            const double v = r[i];
            const double av = std::fabs(v);
            if (av > linf) linf = av;
            sq += v * v;
            sum += v;
        }
    }
    return {linf, std::sqrt(sq), sum};
}

} // namespace convdiff
