// Experiment configuration (flat key=value text files) and tabular CSV
// output. Config values use the paper's units: rates and hyperfine
// components in MHz, fields in gauss, times in us; the angular 2pi
// conversion happens here, once, on ingestion.
#pragma once

#include "nvpol/hyperfine.hpp"
#include "nvpol/rates.hpp"
#include "nvpol/sequences.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace nvpol {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// number formatting: 12 significant digits, locale independent

inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// result tables

struct ResultTable {
    std::vector<std::string> meta;     // emitted as '# ' lines
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<std::string>& row) {
        if (row.size() != columns.size())
            throw std::invalid_argument("ResultTable: row width mismatch");
        rows.push_back(row);
    }
};

inline void write_table(const ResultTable& table, std::ostream& out) {
    for (const auto& m : table.meta) out << "# " << m << "\n";
    for (size_t i = 0; i < table.columns.size(); ++i)
        out << table.columns[i] << (i + 1 < table.columns.size() ? "," : "");
    out << "\n";
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "");
        out << "\n";
    }
}

inline void write_table(const ResultTable& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open output file: " + path);
    write_table(table, out);
    if (!out) throw config_error("failed writing output file: " + path);
}

// ---------------------------------------------------------------------------
// key=value config files

class KeyValueFile {
public:
    KeyValueFile() = default;

    static KeyValueFile parse(std::istream& in, const std::string& origin) {
        KeyValueFile kv;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto strip = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                if (a == std::string::npos) return std::string();
                const auto b = s.find_last_not_of(" \t\r");
                return s.substr(a, b - a + 1);
            };
            if (strip(line).empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw config_error(origin + ":" + std::to_string(lineno) +
                                   ": expected key=value");
            const std::string key = strip(line.substr(0, eq));
            const std::string value = strip(line.substr(eq + 1));
            if (key.empty())
                throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
            kv.values_[key] = value;
        }
        return kv;
    }

    static KeyValueFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw config_error("cannot open config file: " + path);
        return parse(in, path);
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback = "") const {
        const auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        const auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        try {
            size_t pos = 0;
            const double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            throw config_error("config key '" + key + "': not a number: " + it->second);
        }
    }

    int get_int(const std::string& key, int fallback) const {
        const double v = get_double(key, fallback);
        if (v != std::floor(v))
            throw config_error("config key '" + key + "': expected an integer");
        return static_cast<int>(v);
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// "1,2,5" or "start:stop:count" (inclusive endpoints)
inline std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        std::istringstream ss(text);
        std::string a, b, c;
        if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
            throw config_error("grid: expected start:stop:count");
        const double start = std::stod(a), stop = std::stod(b);
        const int count = std::stoi(c);
        if (count < 1) throw config_error("grid: count must be >= 1");
        for (int i = 0; i < count; ++i)
            grid.push_back(count == 1 ? start
                                      : start + (stop - start) * i / double(count - 1));
        return grid;
    }
    std::istringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        try {
            grid.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw config_error("grid: not a number: " + tok);
        }
    }
    return grid;
}

inline std::vector<std::string> parse_list(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        const auto a = tok.find_first_not_of(" \t");
        const auto b = tok.find_last_not_of(" \t");
        if (a != std::string::npos) out.push_back(tok.substr(a, b - a + 1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// experiment description

struct ExperimentConfig {
    std::string protocol = "eslac";
    int model = 4;
    std::string family = "15N";
    std::string nucleus;        // inferred from family when empty
    bool explicit_tensor = false;
    HyperfineTensor hf_ground, hf_excited;  // used when explicit_tensor
    double k = 4.0;             // 1/us
    std::optional<double> bz, bx, by;
    double theta_b = 0.0;       // rad
    std::optional<double> t_laser, t_mw, t_wait2;
    double t_wait = 2.0, t_laser2 = 0.3;
    int repeat = 1;
    std::optional<double> sample_dt;
    std::string axis;           // empty = single run
    std::vector<double> grid;
    std::vector<std::string> families;
    RelaxationParams relax;
    int workers = 0;
    std::string output;
    std::string data_file;

    static ExperimentConfig from_kv(const KeyValueFile& kv) {
        ExperimentConfig c;
        c.protocol = kv.get_string("protocol", c.protocol);
        c.model = kv.get_int("model", c.model);
        c.family = kv.get_string("family", c.family);
        c.nucleus = kv.get_string("nucleus", "");
        c.k = kv.get_double("k", c.k);
        if (kv.has("bz")) c.bz = kv.get_double("bz", 0);
        if (kv.has("bx")) c.bx = kv.get_double("bx", 0);
        if (kv.has("by")) c.by = kv.get_double("by", 0);
        c.theta_b = kv.get_double("theta_b_deg", 0.0) * two_pi / 360.0;
        if (kv.has("t_laser")) c.t_laser = kv.get_double("t_laser", 0);
        c.t_wait = kv.get_double("t_wait", c.t_wait);
        c.t_laser2 = kv.get_double("t_laser2", c.t_laser2);
        if (kv.has("t_mw")) c.t_mw = kv.get_double("t_mw", 0);
        if (kv.has("t_wait2")) c.t_wait2 = kv.get_double("t_wait2", 0);
        c.repeat = kv.get_int("repeat", 1);
        if (kv.has("sample_dt")) c.sample_dt = kv.get_double("sample_dt", 0);
        c.axis = kv.get_string("axis", "");
        if (kv.has("grid")) c.grid = parse_grid(kv.get_string("grid"));
        if (kv.has("families")) c.families = parse_list(kv.get_string("families"));
        c.relax.t2_el_ground = kv.get_double("t2_el_ground", c.relax.t2_el_ground);
        c.relax.t2_el_excited = kv.get_double("t2_el_excited", c.relax.t2_el_excited);
        c.relax.t1_el = kv.get_double("t1_el", c.relax.t1_el);
        c.relax.t2_n = kv.get_double("t2_n", c.relax.t2_n);
        c.relax.t1_n = kv.get_double("t1_n", c.relax.t1_n);
        c.workers = kv.get_int("workers", 0);
        c.output = kv.get_string("output", "");
        c.data_file = kv.get_string("data_file", "");

        // explicit tensors: either six components per manifold (MHz) or a
        // contact/dipole parametrization
        const bool has_cd = kv.has("ac") || kv.has("ad");
        const bool has_full = kv.has("hf_ground");
        if (has_cd && has_full)
            throw config_error("config: give either ac/ad/theta_h or hf_ground, not both");
        if (has_cd) {
            const double ac = two_pi * kv.get_double("ac", 0.0);
            const double ad = two_pi * kv.get_double("ad", 0.0);
            const double th = kv.get_double("theta_h_deg", 0.0) * two_pi / 360.0;
            const double ph = kv.get_double("phi_h_deg", 0.0) * two_pi / 360.0;
            c.hf_ground = from_contact_dipole(ac, ad, th, ph);
            c.hf_excited = c.hf_ground;
            c.explicit_tensor = true;
        } else if (has_full) {
            auto tensor_from = [&](const std::string& key) {
                const auto v = parse_grid(kv.get_string(key));
                if (v.size() != 6)
                    throw config_error("config: " + key +
                                       " needs six components Axx,Axy,Axz,Ayy,Ayz,Azz");
                return HyperfineTensor::from_mhz(v[0], v[1], v[2], v[3], v[4], v[5]);
            };
            c.hf_ground = tensor_from("hf_ground");
            c.hf_excited = kv.has("hf_excited") ? tensor_from("hf_excited") : c.hf_ground;
            c.explicit_tensor = true;
        }
        c.validate();
        return c;
    }

    void validate() const {
        if (protocol != "eslac" && protocol != "ms0" && protocol != "ms1" &&
            protocol != "pump")
            throw config_error("config: unknown protocol '" + protocol + "'");
        if (model < 1 || model > 4) throw config_error("config: model must be 1..4");
        if (k < 0) throw config_error("config: k must be >= 0");
        if (repeat < 1) throw config_error("config: repeat must be >= 1");
        if (!axis.empty()) {
            if (axis != "k" && axis != "theta_H" && axis != "B_z" && axis != "family" &&
                axis != "t")
                throw config_error("config: unknown sweep axis '" + axis + "'");
            if (axis == "family") {
                if (families.empty())
                    throw config_error("config: family sweep needs a families list");
            } else if (grid.empty()) {
                throw config_error("config: sweep needs a non-empty grid");
            }
        }
        if (sample_dt && *sample_dt <= 0)
            throw config_error("config: sample_dt must be positive");
    }

    ProtocolKind protocol_kind() const {
        if (protocol == "pump") return ProtocolKind::pump;
        if (protocol == "eslac") return ProtocolKind::eslac;
        if (protocol == "ms0") return ProtocolKind::ms0;
        return ProtocolKind::ms1;
    }

    SweepAxis sweep_axis() const {
        if (axis == "k") return SweepAxis::k;
        if (axis == "theta_H") return SweepAxis::theta_h;
        if (axis == "B_z") return SweepAxis::b_z;
        if (axis == "family") return SweepAxis::family;
        return SweepAxis::t;
    }

    // echo for the table header and for reproducible reruns
    std::vector<std::string> echo() const {
        std::vector<std::string> lines;
        lines.push_back("protocol = " + protocol);
        lines.push_back("model = " + std::to_string(model));
        if (!explicit_tensor) lines.push_back("family = " + family);
        lines.push_back("k = " + format_number(k));
        if (bz) lines.push_back("bz = " + format_number(*bz));
        if (bx) lines.push_back("bx = " + format_number(*bx));
        if (by) lines.push_back("by = " + format_number(*by));
        if (theta_b != 0.0)
            lines.push_back("theta_b_deg = " + format_number(theta_b * 360.0 / two_pi));
        if (t_laser) lines.push_back("t_laser = " + format_number(*t_laser));
        lines.push_back("t_wait = " + format_number(t_wait));
        if (t_mw) lines.push_back("t_mw = " + format_number(*t_mw));
        if (repeat != 1) lines.push_back("repeat = " + std::to_string(repeat));
        if (!axis.empty()) {
            lines.push_back("axis = " + axis);
            if (axis == "family") {
                std::string fams;
                for (const auto& f : families) fams += (fams.empty() ? "" : ",") + f;
                lines.push_back("families = " + fams);
            } else {
                std::string g;
                for (double v : grid) g += (g.empty() ? "" : ",") + format_number(v);
                lines.push_back("grid = " + g);
            }
        }
        if (sample_dt) lines.push_back("sample_dt = " + format_number(*sample_dt));
        return lines;
    }
};

inline ExperimentConfig load_config(const std::string& path) {
    return ExperimentConfig::from_kv(KeyValueFile::load(path));
}

}  // namespace nvpol
