#include "wshift/io.hpp"

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace wshift {

namespace {

void check_fields(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where + ": unknown field \"" + key + "\"");
    }
}

const json& field(const json& j, const char* name, const std::string& where) {
    const auto it = j.find(name);
    if (it == j.end()) throw ConfigError(where + ": missing field \"" + name + "\"");
    return *it;
}

double real_of(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + ": value must be finite");
    return v;
}

Index integer_of(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
    return j.get<Index>();
}

std::vector<cplx> complex_list(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a non-empty array");
    std::vector<cplx> out;
    out.reserve(j.size());
    for (std::size_t k = 0; k < j.size(); ++k) out.push_back(parse_complex(j[k], where + "[" + std::to_string(k) + "]"));
    return out;
}

json complex_list_to_json(const std::vector<cplx>& v) {
    json a = json::array();
    for (const auto& z : v) a.push_back(complex_to_json(z));
    return a;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError(where + ": not a number: \"" + s + "\"");
    }
    if (used != s.size()) throw ConfigError(where + ": not a number: \"" + s + "\"");
    return v;
}

}  // namespace

cplx parse_complex(const json& j, const std::string& where) {
    if (j.is_number()) return {real_of(j, where), 0.0};
    if (j.is_array() && j.size() == 2) return {real_of(j[0], where), real_of(j[1], where)};
    throw ConfigError(where + ": expected a number or a [re, im] pair");
}

SequenceSpec parse_sequence(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    const auto& kind_j = field(j, "kind", where);
    if (!kind_j.is_string()) throw ConfigError(where + ".kind: expected a string");
    const auto kind = kind_j.get<std::string>();
    try {
        if (kind == "constant") {
            check_fields(j, where, {"kind", "value"});
            return SequenceSpec::constant(parse_complex(field(j, "value", where), where + ".value"));
        }
        if (kind == "periodic") {
            check_fields(j, where, {"kind", "values"});
            return SequenceSpec::periodic(complex_list(field(j, "values", where), where + ".values"));
        }
        if (kind == "step") {
            check_fields(j, where, {"kind", "left", "right"});
            return SequenceSpec::step(parse_complex(field(j, "left", where), where + ".left"),
                                      parse_complex(field(j, "right", where), where + ".right"));
        }
        if (kind == "explicit") {
            check_fields(j, where, {"kind", "start", "values", "left", "right"});
            return SequenceSpec::explicit_table(integer_of(field(j, "start", where), where + ".start"),
                                                complex_list(field(j, "values", where), where + ".values"),
                                                parse_complex(field(j, "left", where), where + ".left"),
                                                parse_complex(field(j, "right", where), where + ".right"));
        }
        if (kind == "random") {
            check_fields(j, where, {"kind", "seed", "start", "end", "modulus", "left", "right", "phase"});
            RandomSeq r;
            const auto& seed = field(j, "seed", where);
            if (!seed.is_number_unsigned()) throw ConfigError(where + ".seed: expected a non-negative integer");
            r.seed = seed.get<std::uint64_t>();
            r.first = integer_of(field(j, "start", where), where + ".start");
            r.last = integer_of(field(j, "end", where), where + ".end");
            const auto& mod = field(j, "modulus", where);
            if (!mod.is_array() || mod.size() != 2) throw ConfigError(where + ".modulus: expected [lo, hi]");
            r.modulus_lo = real_of(mod[0], where + ".modulus");
            r.modulus_hi = real_of(mod[1], where + ".modulus");
            r.left = parse_complex(field(j, "left", where), where + ".left");
            r.right = parse_complex(field(j, "right", where), where + ".right");
            if (const auto it = j.find("phase"); it != j.end()) {
                if (!it->is_boolean()) throw ConfigError(where + ".phase: expected a boolean");
                r.random_phase = it->get<bool>();
            }
            return SequenceSpec::random(r);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ": unknown kind \"" + kind + "\"");
}

ShiftModel parse_model(const json& j) {
    check_fields(j, "model", {"weights", "diagonals", "step"});
    auto w = parse_sequence(field(j, "weights", "model"), "model.weights");
    auto d = parse_sequence(field(j, "diagonals", "model"), "model.diagonals");
    Index step = 1;
    if (const auto it = j.find("step"); it != j.end()) step = integer_of(*it, "model.step");
    if (step < 1 || step > 64) throw ConfigError("model.step must be in [1, 64]");
    try {
        return ShiftModel(std::move(w), std::move(d), static_cast<int>(step));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }
}

json complex_to_json(cplx z) {
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

json sequence_to_json(const SequenceSpec& spec) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            json j;
            if constexpr (std::is_same_v<T, ConstantSeq>) {
                j["kind"] = "constant";
                j["value"] = complex_to_json(p.value);
            } else if constexpr (std::is_same_v<T, PeriodicSeq>) {
                j["kind"] = "periodic";
                j["values"] = complex_list_to_json(p.values);
            } else if constexpr (std::is_same_v<T, StepSeq>) {
                j["kind"] = "step";
                j["left"] = complex_to_json(p.left);
                j["right"] = complex_to_json(p.right);
            } else if constexpr (std::is_same_v<T, ExplicitSeq>) {
                j["kind"] = "explicit";
                j["start"] = p.start;
                j["values"] = complex_list_to_json(p.values);
                j["left"] = complex_to_json(p.left);
                j["right"] = complex_to_json(p.right);
            } else {
                j["kind"] = "random";
                j["seed"] = p.seed;
                j["start"] = p.first;
                j["end"] = p.last;
                j["modulus"] = json::array({p.modulus_lo, p.modulus_hi});
                j["left"] = complex_to_json(p.left);
                j["right"] = complex_to_json(p.right);
                j["phase"] = p.random_phase;
            }
            return j;
        },
        spec.payload());
}

json model_to_json(const ShiftModel& model) {
    json j;
    j["weights"] = sequence_to_json(model.weights());
    j["diagonals"] = sequence_to_json(model.diagonals());
    j["step"] = model.step();
    return j;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json real_to_json(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

std::string grid_to_csv(const RegionGrid& grid) {
    std::string out = "re,im,class,r_plus,r_minus,margin\n";
    for (const auto& [p, s] : grid.samples) {
        const cplx z = grid.at(p);
        const auto& rep = s.representative();
        out += format_double(z.real());
        out += ',';
        out += format_double(z.imag());
        out += ',';
        out += s.in_spectrum ? "inside" : "outside";
        out += ',';
        out += format_double(rep.r_plus);
        out += ',';
        out += format_double(rep.r_minus);
        out += ',';
        out += format_double(rep.margin);
        out += '\n';
    }
    return out;
}

RegionGrid grid_from_csv(const std::string& text, const RegionGrid& shape) {
    RegionGrid g;
    g.box = shape.box;
    g.nx = shape.nx;
    g.ny = shape.ny;
    g.max_depth = shape.max_depth;
    g.k_max = shape.k_max;
    g.eps = shape.eps;
    g.components = 1;

    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "re,im,class,r_plus,r_minus,margin")
        throw ConfigError("grid csv: missing or wrong header");
    const double dx = g.fine_dx();
    const double dy = g.fine_dy();
    const auto xmax = static_cast<std::int64_t>(g.nx) * g.scale();
    const auto ymax = static_cast<std::int64_t>(g.ny) * g.scale();
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const std::string where = "grid csv line " + std::to_string(row);
        const auto f = split(line, ',');
        if (f.size() != 6) throw ConfigError(where + ": expected 6 fields");
        const double re = parse_double(f[0], where);
        const double im = parse_double(f[1], where);
        const auto x = static_cast<std::int64_t>(std::llround((re - g.box.x0) / dx));
        const auto y = static_cast<std::int64_t>(std::llround((im - g.box.y0) / dy));
        const LatticePoint p{x, y};
        if (x < 0 || y < 0 || x > xmax || y > ymax || g.at(p) != cplx(re, im))
            throw ConfigError(where + ": point is not on the grid lattice");
        if (f[2] != "inside" && f[2] != "outside") throw ConfigError(where + ": class must be inside or outside");
        ComponentSample c;
        c.in_spectrum = f[2] == "inside";
        c.r_plus = parse_double(f[3], where);
        c.r_minus = parse_double(f[4], where);
        c.margin = parse_double(f[5], where);
        std::optional<double> rm;
        if (!std::isnan(c.r_minus)) rm = c.r_minus;
        c.label = exact_label(c.r_plus, rm);
        GridSample s;
        s.in_spectrum = c.in_spectrum;
        s.parts.push_back(c);
        if (!g.samples.emplace(p, std::move(s)).second) throw ConfigError(where + ": duplicate point");
    }
    for (std::int64_t iy = 0; iy <= g.ny; ++iy)
        for (std::int64_t ix = 0; ix <= g.nx; ++ix)
            if (!g.find({ix * g.scale(), iy * g.scale()})) throw ConfigError("grid csv: base lattice point missing");
    rebuild_cells(g);
    return g;
}

json grid_to_json(const RegionGrid& grid) {
    json j;
    j["box"] = json::array({grid.box.x0, grid.box.x1, grid.box.y0, grid.box.y1});
    j["nx"] = grid.nx;
    j["ny"] = grid.ny;
    j["max_depth"] = grid.max_depth;
    j["k_max"] = grid.k_max;
    j["eps"] = grid.eps;
    j["components"] = grid.components;
    j["warnings"] = grid.warnings;
    json points = json::array();
    for (const auto& [p, s] : grid.samples) {
        const cplx z = grid.at(p);
        json parts = json::array();
        for (const auto& c : s.parts) {
            parts.push_back({{"r_plus", real_to_json(c.r_plus)},
                             {"r_minus", real_to_json(c.r_minus)},
                             {"label", to_string(c.label)},
                             {"margin", real_to_json(c.margin)}});
        }
        points.push_back({{"re", z.real()},
                          {"im", z.imag()},
                          {"class", s.in_spectrum ? "inside" : "outside"},
                          {"parts", std::move(parts)}});
    }
    j["points"] = std::move(points);
    json cells = json::array();
    for (const auto& c : grid.leaves) {
        const cplx lo = grid.at({c.x, c.y});
        cells.push_back({{"re", lo.real()},
                         {"im", lo.imag()},
                         {"width", grid.cell_width(c)},
                         {"height", grid.fine_dy() * static_cast<double>(c.size)},
                         {"depth", c.depth},
                         {"class", to_string(c.cls)}});
    }
    j["cells"] = std::move(cells);
    return j;
}

std::string grid_to_pgm(const RegionGrid& grid) {
    std::string out = "P5 " + std::to_string(grid.nx) + " " + std::to_string(grid.ny) + " 255\n";
    out.reserve(out.size() + static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny));
    for (int iy = grid.ny - 1; iy >= 0; --iy)
        for (int ix = 0; ix < grid.nx; ++ix) {
            const auto c = grid.base_classes[static_cast<std::size_t>(iy) * static_cast<std::size_t>(grid.nx) +
                                             static_cast<std::size_t>(ix)];
            out += static_cast<char>(c == CellClass::inside ? 255 : c == CellClass::boundary ? 128 : 0);
        }
    return out;
}

json boundary_to_json(const BoundaryPolyline& boundary) {
    json comps = json::array();
    for (const auto& c : boundary.components) {
        json verts = json::array();
        for (const auto& v : c.vertices) verts.push_back(json::array({v.real(), v.imag()}));
        comps.push_back({{"closed", c.closed}, {"vertices", std::move(verts)}});
    }
    return json{{"components", std::move(comps)}};
}

json estimate_to_json(const RadiusEstimate& e) {
    return {{"value", real_to_json(e.value)},
            {"method", to_string(e.method)},
            {"k_used", e.k_used},
            {"uncertainty", real_to_json(e.uncertainty)}};
}

json membership_to_json(const MembershipResult& m) {
    json j;
    j["lambda"] = json::array({m.lambda.real(), m.lambda.imag()});
    j["in_spectrum"] = m.in_spectrum;
    j["label"] = to_string(m.label);
    j["margin"] = real_to_json(m.margin);
    j["r_plus"] = estimate_to_json(m.r_plus);
    j["r_minus"] = m.r_minus ? estimate_to_json(*m.r_minus) : json(nullptr);
    return j;
}

json report_to_json(const CompareReport& r) {
    auto points = [](const std::vector<cplx>& v) {
        json a = json::array();
        for (const auto& z : v) a.push_back(json::array({z.real(), z.imag()}));
        return a;
    };
    json j;
    j["n_used"] = r.n_used;
    j["delta"] = r.delta;
    j["max_eigenvalue_to_region"] = real_to_json(r.max_eigenvalue_to_region);
    j["max_eigenvalue_to_boundary"] = real_to_json(r.max_eigenvalue_to_boundary);
    j["inside_cells"] = r.inside_cells;
    j["inside_coverage"] = r.inside_coverage;
    j["circulant_eigenvalues"] = points(r.circulant_eigenvalues);
    j["zero_boundary"] = {
        {"note", "zero-boundary truncations of shifts suffer finite-section pollution; entries listed under "
                 "discrepancies lie farther than delta from the scanned spectrum"},
        {"eigenvalues", points(r.zero_boundary_eigenvalues)},
        {"discrepancies", points(r.zero_boundary_discrepancies)}};
    return j;
}

std::string eigenvalues_to_csv(const std::vector<cplx>& values) {
    std::string out = "re,im\n";
    for (const auto& z : values) out += format_double(z.real()) + "," + format_double(z.imag()) + "\n";
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("write failed for " + path.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot move output into place at " + path.string());
    }
}

}  // namespace wshift
