#include "convdiff/materials.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace convdiff {

const Material& CrossSectionLibrary::find(const std::string& name) const {
    const int idx = index_of(name);
    if (idx < 0) throw UnknownMaterial("unknown material '" + name + "'");
    return materials[idx];
}

int CrossSectionLibrary::index_of(const std::string& name) const {
    for (size_t i = 0; i < materials.size(); ++i)
        if (materials[i].name == name) return static_cast<int>(i);
    return -1;
}

namespace {

struct LineReader {
    std::ifstream in;
    std::string path;
    int line_no = 0;

    explicit LineReader(const std::string& p) : in(p), path(p) {
        if (!in) throw ParseError(p + ": cannot open file");
    }

    bool next(std::string& line) {
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            // trim
            const auto b = line.find_first_not_of(" \t\r");
            if (b == std::string::npos) continue;
            const auto e = line.find_last_not_of(" \t\r");
            line = line.substr(b, e - b + 1);
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(path + ":" + std::to_string(line_no) + ": " + msg);
    }
};

std::vector<double> parse_values(LineReader& r, std::istringstream& ss, int expected,
                                 const std::string& what) {
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    if (!ss.eof()) r.fail("malformed number in " + what);
    if (static_cast<int>(vals.size()) != expected)
        r.fail(what + ": expected " + std::to_string(expected) + " values, got " +
               std::to_string(vals.size()));
    return vals;
}

void validate(const Material& m, LineReader& r, DScatterConvention convention, Material& out) {
    if (m.n_groups <= 0) r.fail("material '" + m.name + "': missing groups line");
    auto check_nonneg = [&](const std::vector<double>& v, const char* what) {
        if (static_cast<int>(v.size()) != m.n_groups)
            r.fail("material '" + m.name + "': missing or short " + std::string(what));
        for (double x : v)
            if (x < 0.0)
                throw NegativeCrossSection("material '" + m.name + "': negative " +
                                           std::string(what));
    };
    check_nonneg(m.sigma_a, "sigma_a");
    check_nonneg(m.nu, "nu");
    check_nonneg(m.sigma_f, "sigma_f");
    check_nonneg(m.chi, "chi");
    if (static_cast<int>(m.sigma_s.size()) != m.n_groups)
        r.fail("material '" + m.name + "': expected " + std::to_string(m.n_groups) +
               " sigma_s_row lines");
    for (int g = 0; g < m.n_groups; ++g) {
        if (static_cast<int>(m.sigma_s[g].size()) != m.n_groups)
            r.fail("material '" + m.name + "': missing sigma_s_row " + std::to_string(g + 1));
        for (double x : m.sigma_s[g])
            if (x < 0.0) throw NegativeCrossSection("material '" + m.name + "': negative sigma_s");
    }

    double chi_sum = 0.0;
    for (double c : m.chi) chi_sum += c;
    out = m;
    if (out.fissile()) {
        if (std::fabs(chi_sum - 1.0) > 1e-12)
            r.fail("material '" + m.name + "': chi sums to " + std::to_string(chi_sum) +
                   ", expected 1 for fissile materials");
    } else if (chi_sum != 0.0) {
        r.fail("material '" + m.name + "': chi must be all zero for non-fissile materials");
    }

    if (out.d.empty()) {
        out.d.resize(m.n_groups);
        for (int g = 0; g < m.n_groups; ++g) {
            double sig_s = 0.0;
            for (int gp = 0; gp < m.n_groups; ++gp) {
                if (convention == DScatterConvention::out_scatter && gp == g) continue;
                sig_s += m.sigma_s[g][gp];
            }
            const double denom = 3.0 * (m.sigma_a[g] + sig_s);
            if (denom <= 0.0)
                r.fail("material '" + m.name + "': cannot derive D for group " +
                       std::to_string(g + 1) + " (zero removal)");
            out.d[g] = 1.0 / denom;
        }
    } else {
        check_nonneg(out.d, "d");
    }
}

} // namespace

CrossSectionLibrary load_cross_sections(const std::string& path, DScatterConvention convention) {
    LineReader r(path);
    CrossSectionLibrary lib;
    Material cur;
    bool open = false;

    auto flush = [&]() {
        if (!open) return;
        Material m;
        validate(cur, r, convention, m);
        if (lib.index_of(m.name) >= 0) r.fail("duplicate material '" + m.name + "'");
        lib.materials.push_back(std::move(m));
        cur = Material{};
        open = false;
    };

    std::string line;
    while (r.next(line)) {
        if (line.front() == '[') {
            flush();
            std::istringstream ss(line);
            std::string bracket, name;
            ss >> bracket >> name;
            if (bracket != "[material" || name.empty() || name.back() != ']')
                r.fail("expected section header '[material <name>]'");
            name.pop_back();
            cur.name = name;
            open = true;
            continue;
        }
        if (!open) r.fail("data line outside a [material] section");
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "groups") {
            if (!(ss >> cur.n_groups) || cur.n_groups <= 0) r.fail("bad groups count");
            cur.sigma_s.assign(cur.n_groups, {});
        } else if (key == "sigma_a") {
            cur.sigma_a = parse_values(r, ss, cur.n_groups, "sigma_a");
        } else if (key == "sigma_s_row") {
            int g;
            if (!(ss >> g) || g < 1 || g > cur.n_groups) r.fail("bad sigma_s_row group index");
            cur.sigma_s[g - 1] = parse_values(r, ss, cur.n_groups, "sigma_s_row");
        } else if (key == "nu") {
            cur.nu = parse_values(r, ss, cur.n_groups, "nu");
        } else if (key == "sigma_f") {
            cur.sigma_f = parse_values(r, ss, cur.n_groups, "sigma_f");
        } else if (key == "chi") {
            cur.chi = parse_values(r, ss, cur.n_groups, "chi");
        } else if (key == "d") {
            cur.d = parse_values(r, ss, cur.n_groups, "d");
        } else {
            r.fail("unknown key '" + key + "'");
        }
    }
    flush();

    if (lib.materials.empty()) throw ParseError(path + ": no materials defined");
    lib.n_groups = lib.materials.front().n_groups;
    for (const auto& m : lib.materials)
        if (m.n_groups != lib.n_groups)
            throw InconsistentGroups("material '" + m.name + "' has " +
                                     std::to_string(m.n_groups) + " groups, expected " +
                                     std::to_string(lib.n_groups));
    return lib;
}

} // namespace convdiff
