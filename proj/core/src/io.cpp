#include "enclosure/io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "enclosure/errors.hpp"

namespace enclosure::io {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- JSON helpers

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError("missing key '" + key + "' in " + where);
    return *it;
}

double number(const json& v, const std::string& what) {
    if (!v.is_number()) throw ConfigError(what + " must be a number");
    return v.get<double>();
}

Vec3 vec3(const json& v, const std::string& what) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(what + " must be an array of 3 numbers");
    return {number(v[0], what), number(v[1], what), number(v[2], what)};
}

json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

// ---------------------------------------------------------------- gzip lines

class GzFile {
public:
    GzFile(const fs::path& path, const char* mode) : f_(gzopen(path.c_str(), mode)) {
        if (!f_) throw FormatError("cannot open " + path.string());
        gzbuffer(f_, 1 << 20);
    }
    ~GzFile() {
        if (f_) gzclose(f_);
    }
    GzFile(const GzFile&) = delete;
    GzFile& operator=(const GzFile&) = delete;

    void write(const std::string& s) {
        if (s.empty()) return;
        if (gzwrite(f_, s.data(), static_cast<unsigned>(s.size())) != static_cast<int>(s.size())) {
            throw FormatError("gzip write failed");
        }
    }

    bool read_line(std::string& line) {
        line.clear();
        char buf[1 << 16];
        while (gzgets(f_, buf, sizeof buf)) {
            line.append(buf);
            if (!line.empty() && line.back() == '\n') {
                line.pop_back();
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return true;
            }
        }
        return !line.empty();
    }

    void close() {
        if (f_ && gzclose(f_) != Z_OK) {
            f_ = nullptr;
            throw FormatError("gzip close failed");
        }
        f_ = nullptr;
    }

private:
    gzFile f_;
};

std::string vec_text(const Vec3& v) { return format_double(v.x) + " " + format_double(v.y) + " " + format_double(v.z); }

Vec3 parse_vec_text(const std::string& s) {
    std::istringstream in(s);
    std::string a, b, c;
    if (!(in >> a >> b >> c)) throw FormatError("expected three numbers, got '" + s + "'");
    return {parse_double(a), parse_double(b), parse_double(c)};
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string header_block(const std::vector<std::pair<std::string, std::string>>& fields,
                         const std::vector<std::string>& columns) {
    std::string out;
    for (const auto& [k, v] : fields) out += "# " + k + ": " + v + "\n";
    out += "# columns: " + join(columns, ',') + "\n";
    return out;
}

// Reads the leading '#' block; `first` receives the first data line (empty at EOF).
Header read_header(GzFile& f, std::string& first) {
    Header h;
    std::string line;
    first.clear();
    while (f.read_line(line)) {
        if (line.empty() || line[0] != '#') {
            first = line;
            break;
        }
        const auto body = line.substr(line.find_first_not_of("# "));
        const auto colon = body.find(": ");
        if (colon == std::string::npos) continue;
        const auto key = body.substr(0, colon);
        const auto value = body.substr(colon + 2);
        if (key == "columns") {
            h.columns = split(value, ',');
        } else {
            h.fields[key] = value;
        }
    }
    return h;
}

std::size_t column_index(const Header& h, const std::string& name) {
    auto it = std::find(h.columns.begin(), h.columns.end(), name);
    if (it == h.columns.end()) throw FormatError("missing column '" + name + "'");
    return static_cast<std::size_t>(it - h.columns.begin());
}

// Splits a CSV row into doubles without allocating per field.
void parse_row(const std::string& line, std::vector<double>& out) {
    out.clear();
    const char* p = line.data();
    const char* end = p + line.size();
    while (p <= end) {
        const char* comma = std::find(p, end, ',');
        double v = 0.0;
        auto res = std::from_chars(p, comma, v);
        if (res.ec != std::errc() || res.ptr != comma) {
            throw FormatError("bad number '" + std::string(p, comma) + "'");
        }
        out.push_back(v);
        p = comma + 1;
    }
}

std::string formulation_name(Formulation f) {
    return f == Formulation::scattered_field ? "scattered_field" : "total_field";
}

Formulation formulation_from(const std::string& s) {
    if (s == "scattered_field") return Formulation::scattered_field;
    if (s == "total_field") return Formulation::total_field;
    throw FormatError("unknown formulation '" + s + "'");
}

// ---------------------------------------------------------------- binary

constexpr char kSnapshotMagic[8] = {'E', 'N', 'C', 'S', 'N', 'A', 'P', '1'};

template <typename T>
void put_le(std::ostream& out, T v) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(v);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(bytes.data(), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
    std::array<char, sizeof(T)> bytes{};
    if (!in.read(bytes.data(), sizeof(T))) throw FormatError("truncated snapshot");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
}

std::string fnv1a_stream(std::istream& in) {
    std::uint64_t h = 1469598103934665603ull;
    std::vector<char> buf(1 << 20);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[static_cast<std::size_t>(i)]);
            h *= 1099511628211ull;
        }
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

json probe_result_json(const ProbeResult& r) {
    json v = json::array();
    for (const auto& tv : r.verdicts) v.push_back({{"T", tv.T}, {"verdict", to_string(tv.verdict)}});
    return {{"probe_id", r.probe_id},
            {"center", to_json(r.center)},
            {"eta", r.eta},
            {"dist_estimate", r.dist_estimate},
            {"d_partialD_estimate", r.d_partialD_estimate},
            {"fit_window", json::array({r.tau_lo, r.tau_hi})},
            {"fit_r2", r.fit_r2},
            {"poor_fit", r.poor_fit},
            {"model", to_string(r.model)},
            {"variant", to_string(r.variant)},
            {"verdicts", v},
            {"supT_estimate", r.supT_estimate ? json(*r.supT_estimate) : json(nullptr)}};
}

ProbeResult probe_result_from(const json& j) {
    try {
        ProbeResult r;
        r.probe_id = j.at("probe_id").get<std::string>();
        r.center = vec3(j.at("center"), "center");
        r.eta = j.at("eta").get<double>();
        r.dist_estimate = j.at("dist_estimate").get<double>();
        r.d_partialD_estimate = j.at("d_partialD_estimate").get<double>();
        r.tau_lo = j.at("fit_window").at(0).get<double>();
        r.tau_hi = j.at("fit_window").at(1).get<double>();
        r.fit_r2 = j.at("fit_r2").get<double>();
        r.poor_fit = j.at("poor_fit").get<bool>();
        r.model = fit_model_from_string(j.at("model").get<std::string>());
        r.variant = variant_from_string(j.at("variant").get<std::string>());
        for (const auto& v : j.at("verdicts")) {
            r.verdicts.push_back({v.at("T").get<double>(), verdict_from_string(v.at("verdict").get<std::string>())});
        }
        if (!j.at("supT_estimate").is_null()) r.supT_estimate = j.at("supT_estimate").get<double>();
        return r;
    } catch (const json::exception& e) {
        throw FormatError(std::string("probe result: ") + e.what());
    } catch (const ConfigError& e) {
        throw FormatError(std::string("probe result: ") + e.what());
    }
}

}  // namespace

// ---------------------------------------------------------------- text utils

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    while (b < e && *b == ' ') ++b;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) throw FormatError("bad number '" + s + "'");
    return v;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out << text;
    if (!out) throw FormatError("write failed for " + path.string());
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::istringstream in(bytes);
    return fnv1a_stream(in);
}

const std::string& Header::get(const std::string& key) const {
    auto it = fields.find(key);
    if (it == fields.end()) throw FormatError("header lacks '" + key + "'");
    return it->second;
}

double Header::number(const std::string& key) const { return parse_double(get(key)); }

// ---------------------------------------------------------------- scenes

SceneConfig parse_scene(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("scene is not valid JSON: ") + e.what());
    }
    reject_unknown(j, {"omega_box", "obstacles", "probe", "T", "grid", "tau_grid", "M"}, "scene");

    SceneConfig c;
    const auto& box = require(j, "omega_box", "scene");
    reject_unknown(box, {"min", "max"}, "omega_box");
    c.omega = {vec3(require(box, "min", "omega_box"), "omega_box.min"), vec3(require(box, "max", "omega_box"), "omega_box.max")};

    if (auto it = j.find("obstacles"); it != j.end()) {
        if (!it->is_array()) throw ConfigError("obstacles must be an array");
        for (const auto& o : *it) {
            reject_unknown(o, {"center", "radius"}, "obstacle");
            c.obstacles.push_back({vec3(require(o, "center", "obstacle"), "obstacle.center"),
                                   number(require(o, "radius", "obstacle"), "obstacle.radius")});
        }
    }

    const auto& probe = require(j, "probe", "scene");
    reject_unknown(probe, {"center", "radius"}, "probe");
    c.probe = {vec3(require(probe, "center", "probe"), "probe.center"), number(require(probe, "radius", "probe"), "probe.radius")};

    c.T = number(require(j, "T", "scene"), "T");
    const auto& grid = require(j, "grid", "scene");
    reject_unknown(grid, {"h", "dt"}, "grid");
    c.h = number(require(grid, "h", "grid"), "grid.h");
    c.dt = number(require(grid, "dt", "grid"), "grid.dt");

    if (auto it = j.find("tau_grid"); it != j.end()) {
        reject_unknown(*it, {"min", "max", "count", "spacing"}, "tau_grid");
        if (auto f = it->find("min"); f != it->end()) c.tau_spec.min = number(*f, "tau_grid.min");
        if (auto f = it->find("max"); f != it->end()) c.tau_spec.max = number(*f, "tau_grid.max");
        if (auto f = it->find("count"); f != it->end()) {
            if (!f->is_number_integer()) throw ConfigError("tau_grid.count must be an integer");
            c.tau_spec.count = f->get<int>();
        }
        if (auto f = it->find("spacing"); f != it->end()) {
            const auto s = f->is_string() ? f->get<std::string>() : std::string();
            if (s == "linear") {
                c.tau_spec.spacing = TauSpacing::linear;
            } else if (s == "log") {
                c.tau_spec.spacing = TauSpacing::log;
            } else {
                throw ConfigError("tau_grid.spacing must be \"linear\" or \"log\"");
            }
        }
    }
    c.tau_grid = c.tau_spec.expand();

    if (auto it = j.find("M"); it != j.end() && !it->is_null()) c.localization_M = number(*it, "M");
    return c;
}

SceneConfig read_scene(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError("scene file not found: " + path.string());
    return parse_scene(read_text(path));
}

namespace {

json scene_json(const SceneConfig& c) {
    json obstacles = json::array();
    for (const auto& o : c.obstacles) obstacles.push_back({{"center", to_json(o.center)}, {"radius", o.radius}});
    json j = {{"omega_box", {{"min", to_json(c.omega.min)}, {"max", to_json(c.omega.max)}}},
              {"obstacles", obstacles},
              {"probe", {{"center", to_json(c.probe.center)}, {"radius", c.probe.radius}}},
              {"T", c.T},
              {"grid", {{"h", c.h}, {"dt", c.dt}}},
              {"tau_grid",
               {{"min", c.tau_spec.min},
                {"max", c.tau_spec.max},
                {"count", c.tau_spec.count},
                {"spacing", c.tau_spec.spacing == TauSpacing::log ? "log" : "linear"}}}};
    if (c.localization_M) j["M"] = *c.localization_M;
    return j;
}

}  // namespace

std::string scene_to_json(const SceneConfig& config) { return scene_json(config).dump(2) + "\n"; }

void write_scene(const fs::path& path, const SceneConfig& config) { write_text(path, scene_to_json(config)); }

std::string scene_hash(const SceneConfig& config) { return fnv1a_hex(scene_json(config).dump()); }

// ---------------------------------------------------------------- traces

void write_trace(const fs::path& path, const BoundaryTrace& trace, const TraceMeta& meta) {
    GzFile f(path, "wb6");
    std::vector<std::string> columns = {"face_id", "x", "y", "z", "nx", "ny", "nz", "area"};
    for (std::size_t n = 0; n <= trace.steps; ++n) columns.push_back("u_" + std::to_string(n));
    f.write(header_block({{"format", "enclosure-trace/1"},
                          {"scene_hash", meta.scene_hash},
                          {"units", "length and time nondimensional, wave speed 1"},
                          {"formulation", formulation_name(meta.formulation)},
                          {"probe_center", vec_text(meta.probe_center)},
                          {"probe_radius", format_double(meta.probe_radius)},
                          {"amplitude", format_double(meta.amplitude)},
                          {"dt", format_double(trace.dt)},
                          {"steps", std::to_string(trace.steps)},
                          {"faces", std::to_string(trace.face_count())}},
                         columns));
    std::string line;
    const std::size_t nf = trace.face_count();
    for (std::size_t fi = 0; fi < nf; ++fi) {
        const auto& face = trace.faces[fi];
        line = std::to_string(fi);
        for (double v : {face.center.x, face.center.y, face.center.z, face.normal.x, face.normal.y, face.normal.z, face.area}) {
            line += ',';
            line += format_double(v);
        }
        for (std::size_t n = 0; n <= trace.steps; ++n) {
            line += ',';
            line += format_double(trace.samples[n * nf + fi]);
        }
        line += '\n';
        f.write(line);
    }
    f.close();
}

BoundaryTrace read_trace(const fs::path& path, TraceMeta* meta) {
    GzFile f(path, "rb");
    std::string line;
    const Header h = read_header(f, line);
    if (h.get("format") != "enclosure-trace/1") throw FormatError(path.string() + " is not a trace file");
    BoundaryTrace t;
    t.dt = h.number("dt");
    t.steps = static_cast<std::size_t>(std::stoull(h.get("steps")));
    const auto nf = static_cast<std::size_t>(std::stoull(h.get("faces")));
    if (h.columns.size() != 8 + t.steps + 1) throw FormatError("trace column count does not match its header");
    t.faces.resize(nf);
    t.samples.assign((t.steps + 1) * nf, 0.0);
    std::vector<double> row;
    for (std::size_t fi = 0; fi < nf; ++fi) {
        if (fi > 0 && !f.read_line(line)) throw FormatError("trace ends after " + std::to_string(fi) + " faces");
        parse_row(line, row);
        if (row.size() != h.columns.size()) throw FormatError("trace row " + std::to_string(fi) + " has wrong length");
        if (static_cast<std::size_t>(row[0]) != fi) throw FormatError("trace rows out of order");
        auto& face = t.faces[fi];
        face.center = {row[1], row[2], row[3]};
        face.normal = {row[4], row[5], row[6]};
        face.area = row[7];
        for (std::size_t n = 0; n <= t.steps; ++n) t.samples[n * nf + fi] = row[8 + n];
    }
    if (meta) {
        meta->scene_hash = h.get("scene_hash");
        meta->formulation = formulation_from(h.get("formulation"));
        meta->probe_center = parse_vec_text(h.get("probe_center"));
        meta->probe_radius = h.number("probe_radius");
        meta->amplitude = h.number("amplitude");
    }
    return t;
}

void write_accumulators(const fs::path& path, const LaplaceAccumulator& acc, const std::string& hash) {
    std::vector<std::string> columns = {"face_id"};
    std::vector<std::string> taus;
    for (double tau : acc.taus) {
        columns.push_back("w_tau_" + format_double(tau));
        taus.push_back(format_double(tau));
    }
    std::string out = header_block({{"format", "enclosure-accumulators/1"},
                                    {"scene_hash", hash},
                                    {"T", format_double(acc.T)},
                                    {"taus", join(taus, ' ')}},
                                   columns);
    const std::size_t nf = acc.boundary.empty() ? 0 : acc.boundary[0].size();
    for (std::size_t fi = 0; fi < nf; ++fi) {
        out += std::to_string(fi);
        for (const auto& col : acc.boundary) {
            out += ',';
            out += format_double(col[fi]);
        }
        out += '\n';
    }
    write_text(path, out);
}

LaplaceAccumulator read_accumulators(const fs::path& path) {
    GzFile f(path, "rb");
    std::string line;
    const Header h = read_header(f, line);
    if (h.get("format") != "enclosure-accumulators/1") throw FormatError(path.string() + " is not an accumulator file");
    LaplaceAccumulator acc;
    acc.T = h.number("T");
    std::istringstream in(h.get("taus"));
    for (std::string s; in >> s;) acc.taus.push_back(parse_double(s));
    acc.boundary.assign(acc.taus.size(), {});
    std::vector<double> row;
    while (!line.empty()) {
        parse_row(line, row);
        if (row.size() != acc.taus.size() + 1) throw FormatError("accumulator row has wrong length");
        for (std::size_t q = 0; q < acc.taus.size(); ++q) acc.boundary[q].push_back(row[q + 1]);
        if (!f.read_line(line)) break;
    }
    return acc;
}

// ---------------------------------------------------------------- snapshots

void write_snapshot(const fs::path& path, const GridField& field, double t, const std::string& hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path.string());
    out.write(kSnapshotMagic, sizeof kSnapshotMagic);
    char h[16] = {};
    std::memcpy(h, hash.data(), std::min<std::size_t>(hash.size(), 16));
    out.write(h, 16);
    const auto& l = field.lattice;
    put_le<std::int32_t>(out, l.nx);
    put_le<std::int32_t>(out, l.ny);
    put_le<std::int32_t>(out, l.nz);
    put_le<double>(out, l.h);
    put_le<double>(out, t);
    put_le<double>(out, l.origin.x);
    put_le<double>(out, l.origin.y);
    put_le<double>(out, l.origin.z);
    for (int k = 0; k < l.nz; ++k) {
        for (int j = 0; j < l.ny; ++j) {
            for (int i = 0; i < l.nx; ++i) put_le<double>(out, field.at(i, j, k));
        }
    }
    if (!out) throw FormatError("write failed for " + path.string());
}

GridField read_snapshot(const fs::path& path, double* t, std::string* hash) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    char magic[8];
    if (!in.read(magic, 8) || std::memcmp(magic, kSnapshotMagic, 8) != 0) {
        throw FormatError(path.string() + " is not a snapshot");
    }
    char h[17] = {};
    if (!in.read(h, 16)) throw FormatError("truncated snapshot");
    Lattice l;
    l.nx = get_le<std::int32_t>(in);
    l.ny = get_le<std::int32_t>(in);
    l.nz = get_le<std::int32_t>(in);
    l.h = get_le<double>(in);
    const double time = get_le<double>(in);
    l.origin.x = get_le<double>(in);
    l.origin.y = get_le<double>(in);
    l.origin.z = get_le<double>(in);
    if (l.nx <= 0 || l.ny <= 0 || l.nz <= 0) throw FormatError("snapshot has bad dimensions");
    GridField field(l);
    for (int k = 0; k < l.nz; ++k) {
        for (int j = 0; j < l.ny; ++j) {
            for (int i = 0; i < l.nx; ++i) field.at(i, j, k) = get_le<double>(in);
        }
    }
    if (t) *t = time;
    if (hash) *hash = std::string(h);
    return field;
}

void write_occupancy(const fs::path& path, const EnclosureEnvelope& envelope, const std::string& hash) {
    GridField g(envelope.query);
    std::size_t idx = 0;
    for (int k = 0; k < g.lattice.nz; ++k) {
        for (int j = 0; j < g.lattice.ny; ++j) {
            for (int i = 0; i < g.lattice.nx; ++i, ++idx) g.at(i, j, k) = envelope.admissible[idx] ? 1.0 : 0.0;
        }
    }
    write_snapshot(path, g, 0.0, hash);
}

// ---------------------------------------------------------------- curves

void write_curve(const fs::path& path, const IndicatorCurve& c, const std::string& hash) {
    const bool loc = !c.localized.empty();
    std::vector<std::string> columns = {"tau", "I_full", "I_simple"};
    if (loc) columns.push_back("I_loc");
    for (const char* v : {"full", "simple", "loc"}) {
        if (std::string(v) == "loc" && !loc) continue;
        columns.push_back(std::string("log_abs_I_") + v);
        columns.push_back(std::string("sign_I_") + v);
    }
    columns.push_back("T_used");
    columns.push_back("M");
    const std::string M = c.M ? format_double(*c.M) : "none";
    std::string out = header_block({{"format", "enclosure-curve/1"},
                                    {"scene_hash", hash},
                                    {"units", "tau in inverse time; I in squared amplitude"},
                                    {"probe_id", c.probe_id},
                                    {"probe_center", vec_text(c.probe_center)},
                                    {"probe_radius", format_double(c.probe_radius)},
                                    {"T_requested", format_double(c.T_requested)},
                                    {"T_used", format_double(c.T_used)},
                                    {"M", M}},
                                   columns);
    auto sign = [](double v) { return v > 0 ? "1" : (v < 0 ? "-1" : "0"); };
    for (std::size_t q = 0; q < c.taus.size(); ++q) {
        std::vector<std::string> row = {format_double(c.taus[q]), format_double(c.full[q]), format_double(c.simple[q])};
        if (loc) row.push_back(format_double(c.localized[q]));
        row.push_back(format_double(std::log(std::abs(c.full[q]))));
        row.push_back(sign(c.full[q]));
        row.push_back(format_double(std::log(std::abs(c.simple[q]))));
        row.push_back(sign(c.simple[q]));
        if (loc) {
            row.push_back(format_double(std::log(std::abs(c.localized[q]))));
            row.push_back(sign(c.localized[q]));
        }
        row.push_back(format_double(c.T_used));
        row.push_back(c.M ? format_double(*c.M) : "nan");
        out += join(row, ',') + "\n";
    }
    write_text(path, out);
}

IndicatorCurve read_curve(const fs::path& path, Header* header) {
    GzFile f(path, "rb");
    std::string line;
    Header h = read_header(f, line);
    if (h.get("format") != "enclosure-curve/1") throw FormatError(path.string() + " is not a curve file");
    IndicatorCurve c;
    c.probe_id = h.get("probe_id");
    c.probe_center = parse_vec_text(h.get("probe_center"));
    c.probe_radius = h.number("probe_radius");
    c.T_requested = h.number("T_requested");
    c.T_used = h.number("T_used");
    if (h.get("M") != "none") c.M = h.number("M");
    const auto it = column_index(h, "tau");
    const auto ifull = column_index(h, "I_full");
    const auto isimple = column_index(h, "I_simple");
    const bool loc = std::find(h.columns.begin(), h.columns.end(), "I_loc") != h.columns.end();
    const auto iloc = loc ? column_index(h, "I_loc") : 0;
    std::vector<double> row;
    while (!line.empty()) {
        parse_row(line, row);
        if (row.size() != h.columns.size()) throw FormatError("curve row has wrong length");
        c.taus.push_back(row[it]);
        c.full.push_back(row[ifull]);
        c.simple.push_back(row[isimple]);
        if (loc) c.localized.push_back(row[iloc]);
        if (!f.read_line(line)) break;
    }
    if (header) *header = std::move(h);
    return c;
}

void write_fit_table(const fs::path& path, const IndicatorCurve& curve, IndicatorVariant variant,
                     const FitResult& fit, const std::string& hash) {
    const auto& v = curve.values(variant);
    std::string out = header_block({{"format", "enclosure-fit/1"},
                                    {"scene_hash", hash},
                                    {"probe_id", curve.probe_id},
                                    {"variant", to_string(variant)},
                                    {"model", to_string(fit.model)},
                                    {"dist_estimate", format_double(fit.dist_estimate)},
                                    {"fit_window", format_double(fit.tau_lo) + " " + format_double(fit.tau_hi)},
                                    {"r2", format_double(fit.r2)}},
                                   {"tau", "log_abs_I", "sign", "in_window", "fit_log_I"});
    for (std::size_t q = 0; q < curve.taus.size(); ++q) {
        const bool in = q >= fit.first && q <= fit.last;
        out += format_double(curve.taus[q]) + "," + format_double(std::log(std::abs(v[q]))) + "," +
               (v[q] > 0 ? "1" : (v[q] < 0 ? "-1" : "0")) + "," + (in ? "1" : "0") + "," +
               format_double(fit.predict_log(curve.taus[q], curve.probe_radius)) + "\n";
    }
    write_text(path, out);
}

// ---------------------------------------------------------------- results

std::string probe_result_to_json(const ProbeResult& r, const std::string& hash) {
    json j = probe_result_json(r);
    j["scene_hash"] = hash;
    return j.dump(2) + "\n";
}

ProbeResult probe_result_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("probe result is not valid JSON: ") + e.what());
    }
    return probe_result_from(j);
}

std::string envelope_to_json(const EnclosureEnvelope& env, const std::vector<ProbeResult>& results,
                             const std::string& hash, const std::vector<double>& cumulative_volumes) {
    json probes = json::array();
    for (const auto& r : results) probes.push_back(probe_result_json(r));
    json balls = json::array();
    for (const auto& s : env.exclusion) balls.push_back({{"center", to_json(s.center)}, {"radius", s.radius}});
    const auto& q = env.query;
    json j = {{"scene_hash", hash},
              {"probes", probes},
              {"exclusion", balls},
              {"query", {{"nx", q.nx}, {"ny", q.ny}, {"nz", q.nz}, {"h", q.h}, {"origin", to_json(q.origin)}}},
              {"admissible_count", env.admissible_count},
              {"admissible_volume", env.admissible_volume}};
    if (!cumulative_volumes.empty()) j["cumulative_volumes"] = cumulative_volumes;
    return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- manifests

void RunManifest::add_output(const fs::path& dir, const std::string& relative) {
    const auto p = dir / relative;
    std::ifstream in(p, std::ios::binary);
    if (!in) throw FormatError("cannot open " + p.string());
    outputs.push_back({relative, fs::file_size(p), fnv1a_stream(in)});
}

std::string manifest_to_json(const RunManifest& m) {
    json outputs = json::array();
    for (const auto& o : m.outputs) outputs.push_back({{"path", o.path}, {"bytes", o.bytes}, {"checksum", o.checksum}});
    json stages = json::array();
    for (const auto& [name, s] : m.stage_seconds) stages.push_back({{"stage", name}, {"seconds", s}});
    json j = {{"scene_hash", m.scene_hash},   {"command", m.command},   {"parameters", m.parameters},
              {"tool_version", m.tool_version}, {"started", m.started}, {"finished", m.finished},
              {"outputs", outputs},           {"stages", stages}};
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        RunManifest m;
        m.scene_hash = j.at("scene_hash").get<std::string>();
        m.command = j.at("command").get<std::string>();
        m.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
        m.tool_version = j.at("tool_version").get<std::string>();
        m.started = j.at("started").get<std::string>();
        m.finished = j.at("finished").get<std::string>();
        for (const auto& o : j.at("outputs")) {
            m.outputs.push_back({o.at("path").get<std::string>(), o.at("bytes").get<std::uintmax_t>(),
                                 o.at("checksum").get<std::string>()});
        }
        for (const auto& s : j.at("stages")) m.stage_seconds.emplace_back(s.at("stage").get<std::string>(), s.at("seconds").get<double>());
        return m;
    } catch (const json::exception& e) {
        throw FormatError(std::string("manifest: ") + e.what());
    }
}

void write_manifest(const fs::path& path, const RunManifest& m) { write_text(path, manifest_to_json(m)); }

RunManifest read_manifest(const fs::path& path) { return manifest_from_json(read_text(path)); }

std::string embedded_hash(const fs::path& path) {
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) return {};
        char magic[8] = {};
        in.read(magic, 8);
        if (in.gcount() == 8 && std::memcmp(magic, kSnapshotMagic, 8) == 0) {
            std::string h;
            read_snapshot(path, nullptr, &h);
            return h;
        }
        in.clear();
        in.seekg(0);
        char first = 0;
        in.get(first);
        if (first == '{') {
            try {
                const json j = json::parse(read_text(path));
                if (j.contains("scene_hash") && j["scene_hash"].is_string()) return j["scene_hash"].get<std::string>();
            } catch (const json::exception&) {
            }
            return {};
        }
    }
    try {
        GzFile f(path, "rb");
        std::string line;
        const Header h = read_header(f, line);
        auto it = h.fields.find("scene_hash");
        return it == h.fields.end() ? std::string() : it->second;
    } catch (const FormatError&) {
        return {};
    }
}

std::vector<std::string> verify_manifest(const fs::path& manifest_path) {
    const RunManifest m = read_manifest(manifest_path);
    const auto dir = manifest_path.parent_path();
    std::vector<std::string> problems;
    for (const auto& o : m.outputs) {
        const auto p = dir / o.path;
        if (!fs::exists(p)) {
            problems.push_back(o.path + ": missing");
            continue;
        }
        if (fs::file_size(p) != o.bytes) problems.push_back(o.path + ": size differs from manifest");
        std::ifstream in(p, std::ios::binary);
        if (fnv1a_stream(in) != o.checksum) problems.push_back(o.path + ": checksum differs from manifest");
        if (embedded_hash(p) != m.scene_hash) problems.push_back(o.path + ": scene hash missing or different");
    }
    return problems;
}

}  // namespace enclosure::io
