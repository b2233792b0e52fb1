#pragma once

#include <array>
#include <string>
#include <vector>

#include "convdiff/discretisation.hpp"
#include "convdiff/field.hpp"
#include "convdiff/materials.hpp"

namespace convdiff {

enum class CellType { fuel, guide, moderator };
enum class RodState { withdrawn, inserted };
enum class MaterialRole { fuel, moderator, control };

/// Description of a rectangular lattice of square lattice-cells, each
/// rasterised onto cells_per_lattice_cell^2 computational cells with a
/// centred square inner region (rod) surrounded by moderator.
struct LatticeSpec {
    int lattice_nx = 17;
    int lattice_ny = 17;
    std::vector<CellType> cell_map; // row-major, row 0 at the TOP of the lattice
    int cells_per_lattice_cell = 20;
    int inner_region_cells = 12;
    double pitch_cm = 1.26;
    BoundaryTags bc{BoundaryKind::vacuum, BoundaryKind::vacuum, BoundaryKind::vacuum,
                    BoundaryKind::vacuum};
    std::string fuel_material = "fuel";
    std::string moderator_material = "moderator";
    std::string control_material = "control";

    CellType cell(int row, int col) const { return cell_map[row * lattice_nx + col]; }
};

/// Rod states of the 3x3 assembly block of the quarter core, row 0 at the top.
struct CoreMap {
    std::array<RodState, 9> assemblies{};
    RodState at(int row, int col) const { return assemblies[row * 3 + col]; }
};

/// Per-cell material data rasterised onto the computational grid, plus the
/// per-group coefficient fields derived from it. material_id is interior-only,
/// row-major with j = 0 at the bottom interior row.
struct ProblemFields {
    int nx = 0, ny = 0; // interior dims
    int halo = 1;
    double dx = 0.0, dy = 0.0;
    int n_groups = 0;
    BoundaryTags bc{};
    std::vector<int> material_id;
    std::vector<std::string> material_names;
    std::vector<GridField> d_raw;
    std::vector<GridField> sigma_a;
    std::vector<GridField> sigma_s_out;
    std::vector<GridField> sigma_as_raw;
    std::vector<GridField> nu_sigma_f;
    std::vector<GridField> chi;
    std::vector<std::vector<GridField>> sigma_s; // [from group][to group]

    int material_at(int i, int j) const { return material_id[j * nx + i]; }
    long interior_cells() const { return static_cast<long>(nx) * ny; }
    long halo_cells() const {
        return static_cast<long>(nx + 2 * halo) * (ny + 2 * halo) - interior_cells();
    }
    long dof() const { return interior_cells() * n_groups; }
};

/// The standard 17x17 lattice with 264 fuel positions and 25 guide positions.
LatticeSpec default_assembly_spec(int cells_per_lattice_cell = 20);

/// Material roles of one lattice-cell's computational cells: the centred
/// inner square takes the rod material, the remainder is moderator.
std::vector<MaterialRole> rasterise_lattice_cell(CellType type, const LatticeSpec& spec,
                                                 RodState rods);

/// Rasterise the full lattice and build per-group material fields.
ProblemFields build_assembly(const LatticeSpec& spec, const CrossSectionLibrary& lib,
                             RodState rods, int halo = 1);

/// Quarter core: a 3x3 block of assemblies in the top-left of a 4x4
/// assembly-width domain, the remaining L-strip filled with moderator as the
/// reflector. Reflective tags on the two symmetry edges (left, top), vacuum
/// on the outer edges.
ProblemFields build_core(const CoreMap& core_map, const LatticeSpec& spec,
                         const CrossSectionLibrary& lib, int halo = 1);

struct GeometryFile {
    LatticeSpec lattice;
    bool has_core = false;
    CoreMap core;
};

/// Parse a geometry file: a [lattice] block with scalar keys and bare map
/// rows of F/G/M codes, optionally followed by a [core] block of W/I rows.
GeometryFile load_geometry(const std::string& path);

} // namespace convdiff
