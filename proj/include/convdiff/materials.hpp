#pragma once

#include <string>
#include <vector>

#include "convdiff/errors.hpp"

namespace convdiff {

/// Scatter convention used when deriving D from cross-sections: either the
/// full row sum of the scattering matrix or the out-scatter part only.
enum class DScatterConvention { full_row, out_scatter };

/// Multi-group cross-section set of one material. All values in 1/cm except
/// nu (neutrons per fission) and chi (fractions summing to one).
struct Material {
    std::string name;
    int n_groups = 0;
    std::vector<double> sigma_a;
    std::vector<std::vector<double>> sigma_s; // sigma_s[g][g'] scatters g -> g'
    std::vector<double> nu;
    std::vector<double> sigma_f;
    std::vector<double> chi;
    std::vector<double> d; // cm; derived from cross-sections when not supplied

    bool fissile() const {
        for (int g = 0; g < n_groups; ++g)
            if (nu[g] * sigma_f[g] > 0.0) return true;
        return false;
    }

    double nu_sigma_f(int g) const { return nu[g] * sigma_f[g]; }

    double sigma_s_out(int g) const {
        double s = 0.0;
        for (int gp = 0; gp < n_groups; ++gp)
            if (gp != g) s += sigma_s[g][gp];
        return s;
    }
};

struct CrossSectionLibrary {
    std::vector<Material> materials;
    int n_groups = 0;

    const Material& find(const std::string& name) const;
    int index_of(const std::string& name) const; // -1 when absent
};

/// Parse a sectioned plain-text cross-section file. Materials without a `d`
/// line get D_g = 1 / (3 (sigma_a_g + sigma_s_g)) with sigma_s_g summed per
/// the chosen convention.
CrossSectionLibrary load_cross_sections(const std::string& path,
                                        DScatterConvention convention = DScatterConvention::full_row);

} // namespace convdiff
