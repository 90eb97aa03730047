#include "mrt/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mrt/error.hpp"

namespace mrt {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& tok, double& out) {
    std::string t = trim(tok);
    if (t.empty()) return false;
    const char* first = t.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
    return ec == std::errc() && ptr == t.data() + t.size();
}

DiscreteMeasure build(int dim, const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) fail_input("measure has no atoms");
    PointMatrix pts(dim, static_cast<Eigen::Index>(rows.size()));
    std::vector<double> w;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (int d = 0; d < dim; ++d) pts(d, static_cast<Eigen::Index>(i)) = rows[i][static_cast<std::size_t>(d)];
        w.push_back(rows[i][static_cast<std::size_t>(dim)]);
    }
    return DiscreteMeasure(std::move(pts), std::move(w));
}

}  // namespace

DiscreteMeasure parse_csv(std::istream& in) {
    int dim = 0;
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty()) continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (t[0] == '#') {
            std::string body = trim(t.substr(1));
            if (body.rfind("dim=", 0) == 0) {
                double d;
                if (!parse_double(body.substr(4), d) || d < 1 || d != std::floor(d))
                    fail_input(where + "malformed dimension header");
                if (!rows.empty() && static_cast<int>(d) != dim) fail_input(where + "dimension header after rows disagrees");
                dim = static_cast<int>(d);
            }
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(t);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            double v;
            if (!parse_double(tok, v)) fail_input(where + "malformed number '" + trim(tok) + "'");
            if (!std::isfinite(v)) fail_input(where + "non-finite value");
            row.push_back(v);
        }
        if (row.size() < 2) fail_input(where + "a row needs coordinates and a weight");
        if (dim == 0) dim = static_cast<int>(row.size()) - 1;
        if (static_cast<int>(row.size()) != dim + 1)
            fail_input(where + "expected " + std::to_string(dim + 1) + " values, found " + std::to_string(row.size()));
        if (!(row.back() > 0)) fail_input(where + "nonpositive weight");
        rows.push_back(std::move(row));
    }
    return build(dim, rows);
}

DiscreteMeasure parse_json_measure(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const std::exception& e) {
        fail_input(std::string("malformed json: ") + e.what());
    }
    if (!j.is_object() || !j.contains("dim") || !j.contains("atoms")) fail_input("json measure needs \"dim\" and \"atoms\"");
    if (!j["dim"].is_number_integer() || j["dim"].get<int>() < 1) fail_input("\"dim\" must be a positive integer");
    const int dim = j["dim"].get<int>();
    if (!j["atoms"].is_array()) fail_input("\"atoms\" must be an array");
    std::vector<std::vector<double>> rows;
    std::size_t idx = 0;
    for (const Json& a : j["atoms"]) {
        const std::string where = "atom " + std::to_string(idx++) + ": ";
        if (!a.is_array() || static_cast<int>(a.size()) != dim + 1)
            fail_input(where + "expected " + std::to_string(dim + 1) + " numbers");
        std::vector<double> row;
        for (const Json& v : a) {
            if (!v.is_number()) fail_input(where + "non-numeric entry");
            row.push_back(v.get<double>());
        }
        if (!(row.back() > 0)) fail_input(where + "nonpositive weight");
        rows.push_back(std::move(row));
    }
    return build(dim, rows);
}

DiscreteMeasure load_measure(const std::string& path, const std::string& format) {
    std::string fmt = format;
    if (fmt.empty()) {
        auto dot = path.rfind('.');
        fmt = dot == std::string::npos ? "" : path.substr(dot + 1);
    }
    std::ifstream in(path);
    if (!in) fail_input("cannot open " + path);
    if (fmt == "csv") return parse_csv(in);
    if (fmt == "json") {
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_json_measure(ss.str());
    }
    fail_input("unknown input format '" + fmt + "'");
}

Json point_json(const Point& x) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(x[i]);
    return a;
}

Json measure_json(const DiscreteMeasure& mu) {
    Json j;
    j["dim"] = mu.dim();
    Json atoms = Json::array();
    for (int i = 0; i < mu.size(); ++i) {
        Json a = point_json(mu.point(i));
        a.push_back(mu.weight(i));
        atoms.push_back(std::move(a));
    }
    j["atoms"] = std::move(atoms);
    return j;
}

Json curve_json(const CurveConstruction& c) {
    const CurveGraph& g = c.graph;
    Json j;
    Json verts = Json::array();
    for (const Point& v : g.vertices) verts.push_back(point_json(v));
    j["vertices"] = std::move(verts);
    Json segs = Json::array();
    for (int id : g.last().segments) {
        const CurveSegment& s = g.segments[static_cast<std::size_t>(id)];
        segs.push_back(Json{{"a", s.a}, {"b", s.b}, {"kind", s.kind == SegmentKind::edge ? "edge" : "bridge"}, {"gen", s.gen}});
    }
    j["segments"] = std::move(segs);
    j["points"] = g.last().points;
    j["length"] = Json{{"naive", c.acct.naive_length}, {"dedup", c.acct.dedup_length}};
    const CurveAccounting& a = c.acct;
    j["accounting"] = Json{{"edge_sum", a.edge_sum},       {"bridge_sum", a.bridge_sum}, {"phantom_sum", a.phantom_sum},
                           {"core_sum", a.core_sum},       {"alpha_sum", a.alpha_sum},   {"limit_error", a.limit_error},
                           {"k0", c.k0},                   {"K", c.nets.K()},            {"r0", c.nets.r0},
                           {"cstar", c.nets.cstar},        {"epsilon", c.epsilon},       {"bridges", c.bridges.size()},
                           {"t2_bridges", c.t2_bridges.size()}};
    return j;
}

namespace {

void dump_string(std::string& out, const std::string& s) {
    out += Json(s).dump();
}

void dump_rec(std::string& out, const Json& j, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent < 0) return;
        out += '\n';
        out.append(static_cast<std::size_t>(indent * d), ' ');
    };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(depth + 1);
                dump_string(out, it.key());
                out += indent < 0 ? ":" : ": ";
                dump_rec(out, it.value(), indent, depth + 1);
            }
            newline(depth);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            // Arrays of scalars stay on one line.
            bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
            out += '[';
            bool first = true;
            for (const Json& e : j) {
                if (!first) out += flat && indent >= 0 ? ", " : ",";
                first = false;
                if (!flat) newline(depth + 1);
                dump_rec(out, e, indent, depth + 1);
            }
            if (!flat) newline(depth);
            out += ']';
            return;
        }
        case Json::value_t::number_float: {
            double v = j.get<double>();
            if (!std::isfinite(v)) {
                out += std::isnan(v) ? "\"nan\"" : (v > 0 ? "\"inf\"" : "\"-inf\"");
                return;
            }
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out += buf;
            // Keep the value a float on re-read.
            if (std::string(buf).find_first_of(".eEn") == std::string::npos) out += ".0";
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
    std::string out;
    dump_rec(out, j, indent, 0);
    out += '\n';
    return out;
}

void save_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) fail_input("cannot write " + path);
    f << text;
    if (!f) fail_input("failed writing " + path);
}

}  // namespace mrt
