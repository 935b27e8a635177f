#include "xtalk/device_spec.hpp"
#include "xtalk/circuit.hpp"
#include "xtalk/errors.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace xtalk {

using nlohmann::json;

bool AnalysisConfig::operator==(const AnalysisConfig& o) const {
    if (threshold_khz != o.threshold_khz || d0_mm != o.d0_mm || outliers != o.outliers ||
        pole_tolerance_mhz != o.pole_tolerance_mhz || measurements.size() != o.measurements.size())
        return false;
    for (std::size_t k = 0; k < measurements.size(); ++k) {
        const auto& a = measurements[k];
        const auto& b = o.measurements[k];
        if (a.i != b.i || a.j != b.j || a.zz_khz != b.zz_khz || a.ci_low != b.ci_low ||
            a.ci_high != b.ci_high || a.timestamp != b.timestamp)
            return false;
    }
    return true;
}

namespace {

std::string at(const std::string& base, std::size_t k, const std::string& field = "") {
    std::string s = base + "[" + std::to_string(k) + "]";
    if (!field.empty()) s += "." + field;
    return s;
}

void require_finite(double v, const std::string& where) {
    if (!std::isfinite(v)) throw SchemaError("value must be finite", where);
}

} // namespace

void validate(const DeviceSpec& s) {
    if (s.rows < 1 || s.cols < 1) throw SchemaError("grid dimensions must be >= 1", "grid");
    if (!(s.pitch_mm > 0.0) || !std::isfinite(s.pitch_mm)) throw SchemaError("pitch must be > 0", "pitch_mm");
    const int n = s.size();
    if (n > s.rows * s.cols) throw SchemaError("more qubits than grid sites", "qubits");
    std::set<int> seen;
    for (std::size_t k = 0; k < s.qubits.size(); ++k) {
        const auto& q = s.qubits[k];
        if (q.index < 0 || q.index >= s.rows * s.cols)
            throw SchemaError("index outside the grid", at("qubits", k, "index"));
        if (!seen.insert(q.index).second)
            throw SchemaError("duplicate qubit index " + std::to_string(q.index), at("qubits", k, "index"));
        require_finite(q.omega_mhz, at("qubits", k, "omega_mhz"));
        if (!(q.omega_mhz > 0.0)) throw SchemaError("frequency must be positive", at("qubits", k, "omega_mhz"));
        require_finite(q.alpha_mhz, at("qubits", k, "alpha_mhz"));
        if (!(q.alpha_mhz < 0.0))
            throw SchemaError("anharmonicity must be negative for a transmon (got " +
                                  std::to_string(q.alpha_mhz) + " MHz)",
                              at("qubits", k, "alpha_mhz"));
        if (q.ec_mhz.has_value() != q.ej_mhz.has_value())
            throw SchemaError("ec_mhz and ej_mhz must be given together", at("qubits", k));
        if (q.ec_mhz && !(*q.ec_mhz > 0.0 && *q.ej_mhz > 0.0))
            throw SchemaError("charging and Josephson energies must be positive", at("qubits", k));
    }
    // Qubit indices are the dense range 0..n-1 so that tables can be indexed directly.
    if (!seen.empty() && (*seen.begin() != 0 || *seen.rbegin() != n - 1))
        throw SchemaError("qubit indices must be 0..N-1", "qubits");

    std::set<std::pair<int, int>> pairs;
    for (std::size_t k = 0; k < s.edges.size(); ++k) {
        const auto& e = s.edges[k];
        if (e.i < 0 || e.i >= n) throw SchemaError("dangling edge endpoint " + std::to_string(e.i), at("edges", k, "i"));
        if (e.j < 0 || e.j >= n) throw SchemaError("dangling edge endpoint " + std::to_string(e.j), at("edges", k, "j"));
        if (e.i == e.j) throw SchemaError("self-coupling", at("edges", k));
        if (!pairs.insert({std::min(e.i, e.j), std::max(e.i, e.j)}).second)
            throw SchemaError("duplicate edge", at("edges", k));
        if (e.j_mhz.has_value() == e.ec_ij_mhz.has_value())
            throw SchemaError("exactly one of j_mhz or ec_ij_mhz is required", at("edges", k));
        if (e.j_mhz) require_finite(*e.j_mhz, at("edges", k, "j_mhz"));
        if (e.ec_ij_mhz) {
            require_finite(*e.ec_ij_mhz, at("edges", k, "ec_ij_mhz"));
            auto has_ec = [&](int idx) {
                for (const auto& q : s.qubits)
                    if (q.index == idx) return q.ec_mhz.has_value();
                return false;
            };
            if (!has_ec(e.i) || !has_ec(e.j))
                throw SchemaError("ec_ij_mhz needs ec_mhz/ej_mhz on both qubits", at("edges", k));
        }
    }
    if (s.enclosure) {
        const auto& en = *s.enclosure;
        if (!(en.beta > 0.0) || !std::isfinite(en.beta)) throw SchemaError("beta must be > 0", "enclosure.beta");
        if (!(en.omega_c_mhz > 0.0) || !std::isfinite(en.omega_c_mhz))
            throw SchemaError("cutoff must be > 0", "enclosure.omega_c_mhz");
        if (!(en.a_mm > 0.0) || !std::isfinite(en.a_mm)) throw SchemaError("spacing must be > 0", "enclosure.a_mm");
    }
    if (s.capacitance) {
        const auto& c = *s.capacitance;
        require_finite(c.self_ff, "capacitance.self_ff");
        require_finite(c.mutual_ff, "capacitance.mutual_ff");
        if (!(c.self_ff > 0.0)) throw SchemaError("self capacitance must be > 0", "capacitance.self_ff");
        if (c.mutual_ff == 0.0) throw SchemaError("mutual capacitance must be nonzero", "capacitance.mutual_ff");
    }
    const auto& a = s.analysis;
    if (!(a.d0_mm > 0.0) || !std::isfinite(a.d0_mm)) throw SchemaError("d0 must be > 0", "analysis.d0_mm");
    if (!(a.threshold_khz >= 0.0) || !std::isfinite(a.threshold_khz))
        throw SchemaError("threshold must be >= 0", "analysis.threshold_khz");
    if (!(a.pole_tolerance_mhz > 0.0) || !std::isfinite(a.pole_tolerance_mhz))
        throw SchemaError("pole tolerance must be > 0", "analysis.pole_tolerance_mhz");
    for (std::size_t k = 0; k < a.outliers.size(); ++k) {
        auto [i, j] = a.outliers[k];
        if (i < 0 || j < 0 || i >= n || j >= n || i == j)
            throw SchemaError("outlier pair references an unknown qubit", at("analysis.outliers", k));
    }
    try {
        validate_table(a.measurements, n);
    } catch (const DomainError& e) {
        throw SchemaError(e.what(), "analysis.measurements");
    }
}

namespace {

json to_json_value(const DeviceSpec& s) {
    json j;
    j["schema"] = "xtalk.device/1";
    j["grid"] = {{"rows", s.rows}, {"cols", s.cols}};
    j["pitch_mm"] = s.pitch_mm;
    j["qubits"] = json::array();
    for (const auto& q : s.qubits) {
        json r = {{"index", q.index}, {"label", q.label}, {"omega_mhz", q.omega_mhz}, {"alpha_mhz", q.alpha_mhz}};
        if (q.ec_mhz) r["ec_mhz"] = *q.ec_mhz;
        if (q.ej_mhz) r["ej_mhz"] = *q.ej_mhz;
        j["qubits"].push_back(r);
    }
    j["edges"] = json::array();
    for (const auto& e : s.edges) {
        json r = {{"i", e.i}, {"j", e.j}};
        if (e.j_mhz) r["j_mhz"] = *e.j_mhz;
        if (e.ec_ij_mhz) r["ec_ij_mhz"] = *e.ec_ij_mhz;
        j["edges"].push_back(r);
    }
    if (s.enclosure)
        j["enclosure"] = {{"beta", s.enclosure->beta},
                          {"omega_c_mhz", s.enclosure->omega_c_mhz},
                          {"a_mm", s.enclosure->a_mm}};
    if (s.capacitance)
        j["capacitance"] = {{"self_ff", s.capacitance->self_ff}, {"mutual_ff", s.capacitance->mutual_ff}};
    json an = {{"threshold_khz", s.analysis.threshold_khz},
               {"d0_mm", s.analysis.d0_mm},
               {"pole_tolerance_mhz", s.analysis.pole_tolerance_mhz},
               {"outliers", json::array()}};
    for (auto [a, b] : s.analysis.outliers) an["outliers"].push_back({a, b});
    if (!s.analysis.measurements.empty()) {
        an["measurements"] = json::array();
        for (const auto& m : s.analysis.measurements) {
            json r = {{"i", m.i}, {"j", m.j}, {"zz_khz", m.zz_khz}};
            if (m.ci_low) r["ci_low_khz"] = *m.ci_low;
            if (m.ci_high) r["ci_high_khz"] = *m.ci_high;
            if (!m.timestamp.empty()) r["timestamp"] = m.timestamp;
            an["measurements"].push_back(r);
        }
    }
    j["analysis"] = an;
    return j;
}

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw SchemaError("expected an object", where);
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(std::string("missing required field '") + key + "'", where);
    return *it;
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw SchemaError("expected a number", where);
    return v.get<double>();
}

int integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw SchemaError("expected an integer", where);
    return v.get<int>();
}

std::optional<double> opt_number(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    return number(*it, where + "." + key);
}

void reject_unknown(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        if (!ok) throw SchemaError("unknown field '" + it.key() + "'", where.empty() ? it.key() : where);
    }
}

} // namespace

std::string to_json(const DeviceSpec& s) { return to_json_value(s).dump(2) + "\n"; }

DeviceSpec device_spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
        const long line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(pos ? pos - 1 : 0), '\n');
        throw SchemaError(std::string("malformed JSON: ") + e.what(), "line " + std::to_string(line));
    }
    if (!j.is_object()) throw SchemaError("top level must be an object", "$");
    reject_unknown(j, {"schema", "grid", "pitch_mm", "qubits", "edges", "enclosure", "capacitance", "analysis"}, "");
    if (auto it = j.find("schema"); it != j.end() && *it != "xtalk.device/1")
        throw SchemaError("unsupported schema tag", "schema");

    DeviceSpec s;
    const json& grid = field(j, "grid", "grid");
    s.rows = integer(field(grid, "rows", "grid"), "grid.rows");
    s.cols = integer(field(grid, "cols", "grid"), "grid.cols");
    if (auto it = j.find("pitch_mm"); it != j.end()) s.pitch_mm = number(*it, "pitch_mm");

    const json& qs = field(j, "qubits", "qubits");
    if (!qs.is_array()) throw SchemaError("expected an array", "qubits");
    for (std::size_t k = 0; k < qs.size(); ++k) {
        const auto w = at("qubits", k);
        const json& q = qs[k];
        if (!q.is_object()) throw SchemaError("expected an object", w);
        reject_unknown(q, {"index", "label", "omega_mhz", "alpha_mhz", "ec_mhz", "ej_mhz"}, w);
        QubitRecord r;
        r.index = integer(field(q, "index", w), w + ".index");
        if (auto it = q.find("label"); it != q.end()) {
            if (!it->is_string()) throw SchemaError("expected a string", w + ".label");
            r.label = it->get<std::string>();
        }
        r.omega_mhz = number(field(q, "omega_mhz", w), w + ".omega_mhz");
        r.alpha_mhz = number(field(q, "alpha_mhz", w), w + ".alpha_mhz");
        r.ec_mhz = opt_number(q, "ec_mhz", w);
        r.ej_mhz = opt_number(q, "ej_mhz", w);
        s.qubits.push_back(r);
    }
    if (auto it = j.find("edges"); it != j.end()) {
        if (!it->is_array()) throw SchemaError("expected an array", "edges");
        for (std::size_t k = 0; k < it->size(); ++k) {
            const auto w = at("edges", k);
            const json& e = (*it)[k];
            if (!e.is_object()) throw SchemaError("expected an object", w);
            reject_unknown(e, {"i", "j", "j_mhz", "ec_ij_mhz"}, w);
            EdgeRecord r;
            r.i = integer(field(e, "i", w), w + ".i");
            r.j = integer(field(e, "j", w), w + ".j");
            r.j_mhz = opt_number(e, "j_mhz", w);
            r.ec_ij_mhz = opt_number(e, "ec_ij_mhz", w);
            s.edges.push_back(r);
        }
    }
    if (auto it = j.find("enclosure"); it != j.end() && !it->is_null()) {
        reject_unknown(*it, {"beta", "omega_c_mhz", "a_mm"}, "enclosure");
        EnclosureRecord e;
        e.beta = number(field(*it, "beta", "enclosure"), "enclosure.beta");
        e.omega_c_mhz = number(field(*it, "omega_c_mhz", "enclosure"), "enclosure.omega_c_mhz");
        if (auto a = it->find("a_mm"); a != it->end()) e.a_mm = number(*a, "enclosure.a_mm");
        s.enclosure = e;
    }
    if (auto it = j.find("capacitance"); it != j.end() && !it->is_null()) {
        reject_unknown(*it, {"self_ff", "mutual_ff"}, "capacitance");
        CapacitanceRecord c;
        c.self_ff = number(field(*it, "self_ff", "capacitance"), "capacitance.self_ff");
        c.mutual_ff = number(field(*it, "mutual_ff", "capacitance"), "capacitance.mutual_ff");
        s.capacitance = c;
    }
    if (auto it = j.find("analysis"); it != j.end()) {
        const json& an = *it;
        if (!an.is_object()) throw SchemaError("expected an object", "analysis");
        reject_unknown(an, {"threshold_khz", "d0_mm", "pole_tolerance_mhz", "outliers", "measurements"}, "analysis");
        if (auto t = opt_number(an, "threshold_khz", "analysis")) s.analysis.threshold_khz = *t;
        if (auto t = opt_number(an, "d0_mm", "analysis")) s.analysis.d0_mm = *t;
        if (auto t = opt_number(an, "pole_tolerance_mhz", "analysis")) s.analysis.pole_tolerance_mhz = *t;
        if (auto o = an.find("outliers"); o != an.end()) {
            if (!o->is_array()) throw SchemaError("expected an array", "analysis.outliers");
            for (std::size_t k = 0; k < o->size(); ++k) {
                const auto w = at("analysis.outliers", k);
                const json& p = (*o)[k];
                if (!p.is_array() || p.size() != 2) throw SchemaError("expected a pair [i, j]", w);
                s.analysis.outliers.emplace_back(integer(p[0], w + "[0]"), integer(p[1], w + "[1]"));
            }
        }
        if (auto m = an.find("measurements"); m != an.end()) {
            if (!m->is_array()) throw SchemaError("expected an array", "analysis.measurements");
            for (std::size_t k = 0; k < m->size(); ++k) {
                const auto w = at("analysis.measurements", k);
                const json& r = (*m)[k];
                if (!r.is_object()) throw SchemaError("expected an object", w);
                reject_unknown(r, {"i", "j", "zz_khz", "ci_low_khz", "ci_high_khz", "timestamp"}, w);
                MeasurementRow row;
                row.i = integer(field(r, "i", w), w + ".i");
                row.j = integer(field(r, "j", w), w + ".j");
                row.zz_khz = number(field(r, "zz_khz", w), w + ".zz_khz");
                row.ci_low = opt_number(r, "ci_low_khz", w);
                row.ci_high = opt_number(r, "ci_high_khz", w);
                if (auto ts = r.find("timestamp"); ts != r.end()) {
                    if (!ts->is_string()) throw SchemaError("expected a string", w + ".timestamp");
                    row.timestamp = ts->get<std::string>();
                }
                s.analysis.measurements.push_back(row);
            }
        }
    }
    validate(s);
    std::sort(s.qubits.begin(), s.qubits.end(), [](const auto& a, const auto& b) { return a.index < b.index; });
    return s;
}

DeviceSpec device_spec_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::vector<std::string> header;
    auto split = [](const std::string& l) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ls(l);
        while (std::getline(ls, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r");
            const auto e = cell.find_last_not_of(" \t\r");
            out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
        }
        return out;
    };
    while (header.empty() && std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        header = split(line);
    }
    if (header.empty()) throw SchemaError("empty file", "line " + std::to_string(line_no));
    auto col = [&](const std::string& name) -> int {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw SchemaError("header lacks required column '" + name + "'", "line " + std::to_string(line_no));
        return static_cast<int>(it - header.begin());
    };
    const int c_label = col("qubit"), c_wq = col("wq_mhz"), c_alpha = col("alpha_mhz");

    DeviceSpec s;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto where = "line " + std::to_string(line_no);
        const auto cells = split(line);
        if (cells.size() != header.size())
            throw SchemaError("expected " + std::to_string(header.size()) + " cells, got " +
                                  std::to_string(cells.size()),
                              where);
        QubitRecord q;
        q.index = s.size();
        q.label = cells[c_label];
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (static_cast<int>(c) == c_label) continue;
            double v;
            try {
                std::size_t used = 0;
                v = std::stod(cells[c], &used);
                if (used != cells[c].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw SchemaError("column '" + header[c] + "' is not numeric: '" + cells[c] + "'", where);
            }
            if (static_cast<int>(c) == c_wq) q.omega_mhz = v;
            if (static_cast<int>(c) == c_alpha) q.alpha_mhz = v;
        }
        if (!(q.alpha_mhz < 0.0))
            throw SchemaError("anharmonicity must be negative for a transmon (got " + cells[c_alpha] + " MHz)", where);
        if (!(q.omega_mhz > 0.0)) throw SchemaError("frequency must be positive", where);
        s.qubits.push_back(q);
    }
    const int n = s.size();
    if (n == 0) throw SchemaError("no qubit rows", "line " + std::to_string(line_no));
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (side * side == n) {
        s.rows = s.cols = side;
    } else {
        s.rows = 1;
        s.cols = n;
    }
    validate(s);
    return s;
}

DeviceSpec load_device_spec(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw SchemaError("cannot open file", path);
    std::ostringstream buf;
    buf << f.rdbuf();
    const auto text = buf.str();
    auto ends_with = [&](const std::string& ext) {
        return path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0;
    };
    if (ends_with(".json")) return device_spec_from_json(text);
    if (ends_with(".csv")) return device_spec_from_csv(text);
    throw SchemaError("unrecognised extension (expected .json or .csv)", path);
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256: digest failed");
    std::ostringstream os;
    for (unsigned int k = 0; k < len; ++k) os << std::hex << std::setw(2) << std::setfill('0') << int(md[k]);
    return os.str();
}

std::string spec_digest(const DeviceSpec& spec) { return sha256_hex(to_json_value(spec).dump()); }

Eigen::MatrixXd coupling_table(const DeviceSpec& s) {
    const int n = s.size();
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : s.edges) {
        double v;
        if (e.j_mhz) {
            v = *e.j_mhz;
        } else {
            const auto& qi = s.qubits[e.i];
            const auto& qj = s.qubits[e.j];
            v = bare_coupling({*qi.ec_mhz, *qi.ej_mhz}, {*qj.ec_mhz, *qj.ej_mhz}, *e.ec_ij_mhz);
        }
        j(e.i, e.j) = j(e.j, e.i) = v;
    }
    return j;
}

} // namespace xtalk
