#include "convdiff/geometry.hpp"

#include <fstream>
#include <sstream>

namespace convdiff {

namespace {

// 25 guide positions of the standard symmetric 17x17 pattern.
constexpr const char* kDefaultMap[17] = {
    "FFFFFFFFFFFFFFFFF", //
    "FFFFFFFFFFFFFFFFF", //
    "FFFFFGFFGFFGFFFFF", //
    "FFFGFFFFFFFFFGFFF", //
    "FFFFFFFFFFFFFFFFF", //
    "FFGFFGFFGFFGFFGFF", //
    "FFFFFFFFFFFFFFFFF", //
    "FFFFFFFFFFFFFFFFF", //
    "FFGFFGFFGFFGFFGFF", //
    "FFFFFFFFFFFFFFFFF", //
    "FFFFFFFFFFFFFFFFF", //
    "FFGFFGFFGFFGFFGFF", //
    "FFFFFFFFFFFFFFFFF", //
    "FFFGFFFFFFFFFGFFF", //
    "FFFFFGFFGFFGFFFFF", //
    "FFFFFFFFFFFFFFFFF", //
    "FFFFFFFFFFFFFFFFF", //
};

CellType cell_type_of(char c, const std::string& context) {
    switch (c) {
    case 'F': return CellType::fuel;
    case 'G': return CellType::guide;
    case 'M': return CellType::moderator;
    default: throw ParseError(context + ": bad cell code '" + std::string(1, c) + "'");
    }
}

struct MaterialIds {
    int fuel, moderator, control;
};

MaterialIds resolve_materials(const LatticeSpec& spec, const CrossSectionLibrary& lib) {
    MaterialIds ids{lib.index_of(spec.fuel_material), lib.index_of(spec.moderator_material),
                    lib.index_of(spec.control_material)};
    if (ids.fuel < 0) throw UnknownMaterial("unknown fuel material '" + spec.fuel_material + "'");
    if (ids.moderator < 0)
        throw UnknownMaterial("unknown moderator material '" + spec.moderator_material + "'");
    if (ids.control < 0)
        throw UnknownMaterial("unknown control material '" + spec.control_material + "'");
    return ids;
}

int role_id(MaterialRole role, const MaterialIds& ids) {
    switch (role) {
    case MaterialRole::fuel: return ids.fuel;
    case MaterialRole::control: return ids.control;
    default: return ids.moderator;
    }
}

// Paint one lattice-cell's material ids into the interior grid. (i0, j0) is
// the bottom-left interior cell of the block.
void paint_cell(std::vector<int>& material_id, int nx, int i0, int j0, CellType type,
                const LatticeSpec& spec, RodState rods, const MaterialIds& ids) {
    const auto roles = rasterise_lattice_cell(type, spec, rods);
    const int c = spec.cells_per_lattice_cell;
    for (int cj = 0; cj < c; ++cj)
        for (int ci = 0; ci < c; ++ci)
            material_id[(j0 + cj) * nx + (i0 + ci)] = role_id(roles[cj * c + ci], ids);
}

ProblemFields fields_from_materials(std::vector<int> material_id, int nx, int ny,
                                    const CrossSectionLibrary& lib, double dx, double dy, int halo,
                                    const BoundaryTags& bc) {
    ProblemFields f;
    f.nx = nx;
    f.ny = ny;
    f.halo = halo;
    f.dx = dx;
    f.dy = dy;
    f.n_groups = lib.n_groups;
    f.bc = bc;
    f.material_id = std::move(material_id);
    f.material_names.reserve(lib.materials.size());
    for (const auto& m : lib.materials) f.material_names.push_back(m.name);

    const int G = lib.n_groups;
    auto raster = [&](auto&& per_cell) {
        GridField out(nx, ny, halo);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                out(i + halo, j + halo) = per_cell(lib.materials[f.material_id[j * nx + i]]);
        return out;
    };

    for (int g = 0; g < G; ++g) {
        f.d_raw.push_back(raster([&](const Material& m) { return m.d[g]; }));
        f.sigma_a.push_back(raster([&](const Material& m) { return m.sigma_a[g]; }));
        f.sigma_s_out.push_back(raster([&](const Material& m) { return m.sigma_s_out(g); }));
        f.nu_sigma_f.push_back(raster([&](const Material& m) { return m.nu_sigma_f(g); }));
        f.chi.push_back(raster([&](const Material& m) { return m.chi[g]; }));
        f.sigma_as_raw.push_back(compute_sigma_as(f.sigma_a[g], f.sigma_s_out[g]));
    }
    f.sigma_s.resize(G);
    for (int gf = 0; gf < G; ++gf)
        for (int gt = 0; gt < G; ++gt)
            f.sigma_s[gf].push_back(raster([&](const Material& m) { return m.sigma_s[gf][gt]; }));
    return f;
}

} // namespace

LatticeSpec default_assembly_spec(int cells_per_lattice_cell) {
    LatticeSpec spec;
    spec.cells_per_lattice_cell = cells_per_lattice_cell;
    spec.inner_region_cells = 3 * cells_per_lattice_cell / 5;
    spec.cell_map.reserve(17 * 17);
    const std::string context = "default map";
    for (int r = 0; r < 17; ++r)
        for (int c = 0; c < 17; ++c) spec.cell_map.push_back(cell_type_of(kDefaultMap[r][c], context));
    return spec;
}

std::vector<MaterialRole> rasterise_lattice_cell(CellType type, const LatticeSpec& spec,
                                                 RodState rods) {
    const int c = spec.cells_per_lattice_cell;
    const int inner = spec.inner_region_cells;
    if (inner > c || (c - inner) % 2 != 0)
        throw GridIndivisible("inner region of " + std::to_string(inner) +
                              " cells cannot be centred in " + std::to_string(c));
    std::vector<MaterialRole> roles(static_cast<size_t>(c) * c, MaterialRole::moderator);
    if (type == CellType::moderator) return roles;
    const MaterialRole inner_role =
        type == CellType::fuel
            ? MaterialRole::fuel
            : (rods == RodState::withdrawn ? MaterialRole::moderator : MaterialRole::control);
    const int off = (c - inner) / 2;
    for (int cj = off; cj < off + inner; ++cj)
        for (int ci = off; ci < off + inner; ++ci) roles[cj * c + ci] = inner_role;
    return roles;
}

ProblemFields build_assembly(const LatticeSpec& spec, const CrossSectionLibrary& lib,
                             RodState rods, int halo) {
    if (static_cast<int>(spec.cell_map.size()) != spec.lattice_nx * spec.lattice_ny)
        throw GridIndivisible("lattice map size does not match lattice dims");
    const MaterialIds ids = resolve_materials(spec, lib);
    const int c = spec.cells_per_lattice_cell;
    const int nx = spec.lattice_nx * c;
    const int ny = spec.lattice_ny * c;
    std::vector<int> material_id(static_cast<size_t>(nx) * ny, ids.moderator);
    for (int r = 0; r < spec.lattice_ny; ++r) {
        const int j0 = (spec.lattice_ny - 1 - r) * c; // map row 0 is the top
        for (int col = 0; col < spec.lattice_nx; ++col)
            paint_cell(material_id, nx, col * c, j0, spec.cell(r, col), spec, rods, ids);
    }
    const double dx = spec.pitch_cm / c;
    return fields_from_materials(std::move(material_id), nx, ny, lib, dx, dx, halo, spec.bc);
}

ProblemFields build_core(const CoreMap& core_map, const LatticeSpec& spec,
                         const CrossSectionLibrary& lib, int halo) {
    if (static_cast<int>(spec.cell_map.size()) != spec.lattice_nx * spec.lattice_ny)
        throw GridIndivisible("lattice map size does not match lattice dims");
    if (spec.lattice_nx != spec.lattice_ny)
        throw GridIndivisible("core construction needs a square assembly lattice");
    const MaterialIds ids = resolve_materials(spec, lib);
    const int c = spec.cells_per_lattice_cell;
    const int assembly_cells = spec.lattice_nx * c;
    const int n = 4 * assembly_cells; // 3x3 assemblies plus a reflector strip
    std::vector<int> material_id(static_cast<size_t>(n) * n, ids.moderator);
    for (int r = 0; r < 3; ++r) {
        for (int col = 0; col < 3; ++col) {
            const RodState rods = core_map.at(r, col);
            const int i0 = col * assembly_cells;
            const int j0 = (3 - r) * assembly_cells; // map row 0 abuts the top edge
            for (int lr = 0; lr < spec.lattice_ny; ++lr) {
                const int cell_j0 = j0 + (spec.lattice_ny - 1 - lr) * c;
                for (int lc = 0; lc < spec.lattice_nx; ++lc)
                    paint_cell(material_id, n, i0 + lc * c, cell_j0, spec.cell(lr, lc), spec, rods,
                               ids);
            }
        }
    }
    const double dx = spec.pitch_cm / c;
    const BoundaryTags bc{BoundaryKind::reflective, BoundaryKind::vacuum, BoundaryKind::vacuum,
                          BoundaryKind::reflective}; // left, right, bottom, top
    return fields_from_materials(std::move(material_id), n, n, lib, dx, dx, halo, bc);
}

GeometryFile load_geometry(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    GeometryFile geo;
    geo.lattice.cell_map.clear();
    std::vector<std::string> map_rows;
    std::vector<std::string> core_rows;
    enum { none, lattice, core } section = none;
    bool inner_given = false;

    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto fail = [&](const std::string& msg) -> void {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " + msg);
        };
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const auto b = raw.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto e = raw.find_last_not_of(" \t\r");
        const std::string line = raw.substr(b, e - b + 1);

        if (line == "[lattice]") {
            section = lattice;
            continue;
        }
        if (line == "[core]") {
            section = core;
            geo.has_core = true;
            continue;
        }
        if (section == lattice) {
            std::istringstream ss(line);
            std::string key;
            ss >> key;
            const bool is_map_row = line.find_first_not_of("FGM") == std::string::npos;
            if (is_map_row) {
                map_rows.push_back(line);
            } else if (key == "pitch_cm") {
                if (!(ss >> geo.lattice.pitch_cm) || geo.lattice.pitch_cm <= 0)
                    fail("bad pitch_cm");
            } else if (key == "cells_per_lattice_cell") {
                if (!(ss >> geo.lattice.cells_per_lattice_cell) ||
                    geo.lattice.cells_per_lattice_cell < 1)
                    fail("bad cells_per_lattice_cell");
            } else if (key == "inner_region_cells") {
                if (!(ss >> geo.lattice.inner_region_cells) || geo.lattice.inner_region_cells < 0)
                    fail("bad inner_region_cells");
                inner_given = true;
            } else if (key == "fuel_material") {
                ss >> geo.lattice.fuel_material;
            } else if (key == "moderator_material") {
                ss >> geo.lattice.moderator_material;
            } else if (key == "control_material") {
                ss >> geo.lattice.control_material;
            } else {
                fail("unknown lattice key '" + key + "'");
            }
        } else if (section == core) {
            if (line.find_first_not_of("WI") != std::string::npos || line.size() != 3)
                fail("core rows must be 3 characters of W or I");
            core_rows.push_back(line);
        } else {
            fail("data before any section header");
        }
    }

    if (map_rows.empty()) throw ParseError(path + ": no lattice map rows");
    geo.lattice.lattice_ny = static_cast<int>(map_rows.size());
    geo.lattice.lattice_nx = static_cast<int>(map_rows.front().size());
    for (const auto& row : map_rows) {
        if (static_cast<int>(row.size()) != geo.lattice.lattice_nx)
            throw ParseError(path + ": lattice map rows differ in length");
        for (char ch : row) geo.lattice.cell_map.push_back(cell_type_of(ch, path));
    }
    if (!inner_given)
        geo.lattice.inner_region_cells = 3 * geo.lattice.cells_per_lattice_cell / 5;
    if (geo.has_core) {
        if (core_rows.size() != 3) throw ParseError(path + ": [core] needs exactly 3 rows");
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c)
                geo.core.assemblies[r * 3 + c] =
                    core_rows[r][c] == 'W' ? RodState::withdrawn : RodState::inserted;
    }
    return geo;
}

} // namespace convdiff
