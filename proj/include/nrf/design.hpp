#pragma once

// Design files: a small INI-like format (sections, key = value, '#' comments) that fully describes
// one filter, its modulation, the analysis grid and optional impairments / optimizer / oracle setup.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nrf/errors.hpp"
#include "nrf/harmonic.hpp"
#include "nrf/impairments.hpp"
#include "nrf/metrics.hpp"
#include "nrf/network.hpp"
#include "nrf/optimize.hpp"
#include "nrf/solve.hpp"
#include "nrf/synthesis.hpp"

namespace nrf {

struct OracleSpec {
    std::vector<double> frequencies_hz;  // empty = five points across the central half of the passband
    int harmonics = 5;
    int samples_per_period = 128;
    int reference_harmonics = 13;        // Nhar of the rigorous comparison solve

    friend bool operator==(const OracleSpec&, const OracleSpec&) = default;
};

struct Design {
    int order = 0;
    std::optional<double> return_loss_db;     // Chebyshev synthesis
    std::optional<Eigen::MatrixXd> entries;   // or an explicit matrix
    BandpassSpec bandpass;
    std::optional<ModulationSpec> modulation;
    Mode mode = Mode::cm_approx;
    SweepGrid grid;
    double rl_level_db = 10.0;
    double d_level_db = 10.0;
    std::vector<int> convergence_harmonics;
    ImpairmentSpec impairments;
    std::optional<OptimizeSpec> optimize;
    OracleSpec oracle;

    CouplingMatrix matrix() const {
        if (entries) return load_matrix(*entries);
        return chebyshev_inline(order, *return_loss_db);
    }

    BandpassElements elements() const { return impaired_elements(matrix(), bandpass, impairments); }

    friend bool operator==(const Design& a, const Design& b) {
        const bool same_entries = a.entries.has_value() == b.entries.has_value() &&
                                  (!a.entries || (a.entries->rows() == b.entries->rows() &&
                                                  a.entries->cols() == b.entries->cols() && *a.entries == *b.entries));
        return same_entries && a.order == b.order && a.return_loss_db == b.return_loss_db &&
               a.bandpass == b.bandpass && a.modulation == b.modulation && a.mode == b.mode && a.grid == b.grid &&
               a.rl_level_db == b.rl_level_db && a.d_level_db == b.d_level_db &&
               a.convergence_harmonics == b.convergence_harmonics && a.impairments == b.impairments &&
               a.optimize == b.optimize && a.oracle == b.oracle;
    }
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

struct Entry {
    std::string value;
    std::size_t line = 0;
    bool used = false;
};

class Section {
public:
    Section() = default;
    Section(std::string name, std::size_t line) : name_(std::move(name)), line_(line) {}

    void add(const std::string& key, const std::string& value, std::size_t line) {
        if (entries_.count(key)) throw ConfigError("duplicate key '" + key + "' in [" + name_ + "]", line, key);
        entries_[key] = {value, line, false};
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    std::size_t line() const noexcept { return line_; }
    std::size_t line_of(const std::string& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? line_ : it->second.line;
    }

    std::optional<std::string> raw(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    ConfigError error(const std::string& key, const std::string& what) const {
        return ConfigError(what, line_of(key), key);
    }

    void reject_unknown() const {
        for (const auto& [key, e] : entries_)
            if (!e.used) throw ConfigError("unknown key '" + key + "' in [" + name_ + "]", e.line, key);
    }

private:
    std::string name_;
    std::size_t line_ = 0;
    std::map<std::string, Entry> entries_;
};

inline double parse_number(const std::string& text, const Section& s, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw s.error(key, "'" + text + "' is not a number");
    }
    if (trim(text.substr(used)).size() != 0) throw s.error(key, "'" + text + "' is not a number");
    if (!std::isfinite(v)) throw s.error(key, "'" + text + "' is not finite");
    return v;
}

inline int parse_int(const std::string& text, const Section& s, const std::string& key) {
    const double v = parse_number(text, s, key);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw s.error(key, "'" + text + "' is not an integer");
    return static_cast<int>(v);
}

// Splits "12.5 MHz" into number and unit.
inline std::pair<std::string, std::string> number_and_unit(const std::string& text) {
    std::size_t i = text.size();
    while (i > 0 && std::isalpha(static_cast<unsigned char>(text[i - 1]))) --i;
    return {trim(text.substr(0, i)), trim(text.substr(i))};
}

inline double parse_frequency(const std::string& text, const Section& s, const std::string& key) {
    auto [num, unit] = number_and_unit(text);
    double scale = 1.0;
    if (unit.empty() || unit == "Hz" || unit == "hz") scale = 1.0;
    else if (unit == "kHz" || unit == "khz") scale = 1e3;
    else if (unit == "MHz" || unit == "mhz") scale = 1e6;
    else if (unit == "GHz" || unit == "ghz") scale = 1e9;
    else throw s.error(key, "unknown frequency unit '" + unit + "'");
    return parse_number(num, s, key) * scale;
}

inline double angle_scale(const std::string& unit, const Section& s, const std::string& key) {
    if (unit.empty() || unit == "deg") return std::numbers::pi / 180.0;
    if (unit == "rad") return 1.0;
    throw s.error(key, "unknown angle unit '" + unit + "' (expected deg or rad)");
}

inline double parse_angle(const std::string& text, const Section& s, const std::string& key) {
    auto [num, unit] = number_and_unit(text);
    return parse_number(num, s, key) * angle_scale(unit, s, key);
}

// Lists like "0, 35, 70 deg": items without their own unit take the unit of the last item.
inline std::vector<std::pair<std::string, std::string>> unit_list(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> items;
    for (const auto& item : split(text, ',')) items.push_back(number_and_unit(item));
    const std::string fallback = items.empty() ? std::string() : items.back().second;
    for (auto& [num, unit] : items)
        if (unit.empty()) unit = fallback;
    return items;
}

inline std::vector<double> parse_angle_list(const std::string& text, const Section& s, const std::string& key) {
    std::vector<double> out;
    for (const auto& [num, unit] : unit_list(text)) out.push_back(parse_number(num, s, key) * angle_scale(unit, s, key));
    return out;
}

inline std::vector<double> parse_frequency_list(const std::string& text, const Section& s, const std::string& key) {
    std::vector<double> out;
    for (const auto& [num, unit] : unit_list(text)) out.push_back(parse_frequency(num + " " + unit, s, key));
    return out;
}

inline std::vector<int> parse_int_list(const std::string& text, const Section& s, const std::string& key) {
    std::vector<int> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_int(item, s, key));
    return out;
}

inline Eigen::MatrixXd parse_matrix(const std::string& text, const Section& s, const std::string& key) {
    std::vector<std::vector<double>> rows;
    for (const auto& row : split(text, ';')) {
        if (row.empty()) continue;
        std::vector<double> r;
        std::istringstream in(row);
        std::string tok;
        while (in >> tok) {
            if (tok.back() == ',') tok.pop_back();
            if (!tok.empty()) r.push_back(parse_number(tok, s, key));
        }
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw s.error(key, "empty matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw s.error(key, "matrix rows have different lengths");
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return m;
}

// "P1-2: 0.26, 2-P2: 0.26"
inline std::vector<ExtraCoupling> parse_couplings(const std::string& text, int order, const Section& s,
                                                  const std::string& key) {
    std::vector<ExtraCoupling> out;
    for (const auto& item : split(text, ',')) {
        const auto colon = item.find(':');
        const auto dash = item.find('-');
        if (colon == std::string::npos || dash == std::string::npos || dash > colon)
            throw s.error(key, "coupling '" + item + "' must look like i-j: value");
        ExtraCoupling c;
        try {
            c.i = parse_node(trim(item.substr(0, dash)), order);
            c.j = parse_node(trim(item.substr(dash + 1, colon - dash - 1)), order);
        } catch (const ConfigError& e) {
            throw s.error(key, e.what());
        }
        c.value = parse_number(trim(item.substr(colon + 1)), s, key);
        out.push_back(c);
    }
    return out;
}

// Re-tags an error raised by a validator with the line of the offending key.
template <class F>
void with_location(const Section& s, F&& f, const std::string& fallback_key = {}) {
    try {
        f();
    } catch (const ConfigError& e) {
        if (e.line() != 0) throw;
        const std::string key = e.key().empty() ? fallback_key : e.key();
        throw ConfigError(e.what(), s.line_of(key), key);
    }
}

}  // namespace detail

inline Design parse_design(std::istream& in) {
    using detail::Section;
    static const std::vector<std::string> known = {"prototype", "bandpass", "modulation", "analysis",
                                                   "impairments", "optimize", "oracle"};
    std::map<std::string, Section> sections;
    Section* current = nullptr;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("malformed section header", line_no);
            const std::string name = detail::trim(line.substr(1, line.size() - 2));
            if (std::find(known.begin(), known.end(), name) == known.end())
                throw ConfigError("unknown section [" + name + "]", line_no, name);
            if (sections.count(name)) throw ConfigError("duplicate section [" + name + "]", line_no, name);
            current = &sections.emplace(name, Section(name, line_no)).first->second;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line_no);
        const std::string key = detail::trim(line.substr(0, eq));
        if (!current) throw ConfigError("key '" + key + "' outside any section", line_no, key);
        if (key.empty()) throw ConfigError("empty key", line_no);
        current->add(key, detail::trim(line.substr(eq + 1)), line_no);
    }

    Design d;
    if (!sections.count("prototype")) throw ConfigError("missing [prototype] section", 0, "prototype");
    if (!sections.count("bandpass")) throw ConfigError("missing [bandpass] section", 0, "bandpass");

    // prototype
    {
        auto& s = sections["prototype"];
        const auto order = s.raw("order");
        const auto rl = s.raw("return_loss_db");
        const auto matrix = s.raw("matrix");
        if (order) d.order = detail::parse_int(*order, s, "order");
        if (rl && matrix) throw s.error("matrix", "give either return_loss_db or matrix, not both");
        if (matrix) {
            d.entries = detail::parse_matrix(*matrix, s, "matrix");
            const int n = static_cast<int>(d.entries->rows()) - 2;
            if (order && d.order != n) throw s.error("order", "order does not match the matrix size");
            d.order = n;
            detail::with_location(s, [&] { (void)load_matrix(*d.entries); }, "matrix");
        } else if (rl) {
            if (!order) throw s.error("order", "order is required with return_loss_db");
            d.return_loss_db = detail::parse_number(*rl, s, "return_loss_db");
            try {
                (void)chebyshev_inline(d.order, *d.return_loss_db);
            } catch (const ConfigError& e) {
                throw s.error("return_loss_db", e.what());
            }
        } else {
            throw s.error("matrix", "[prototype] needs matrix or order + return_loss_db");
        }
        s.reject_unknown();
    }

    // bandpass
    {
        auto& s = sections["bandpass"];
        if (auto v = s.raw("f0")) d.bandpass.f0_hz = detail::parse_frequency(*v, s, "f0");
        else throw s.error("f0", "f0 is required");
        if (auto v = s.raw("fractional_bandwidth")) d.bandpass.fractional_bandwidth = detail::parse_number(*v, s, "fractional_bandwidth");
        else throw s.error("fractional_bandwidth", "fractional_bandwidth is required");
        if (auto v = s.raw("lowpass_capacitance")) d.bandpass.lowpass_capacitance = detail::parse_number(*v, s, "lowpass_capacitance");
        if (auto v = s.raw("port_impedance")) {
            if (s.has("port1_conductance") || s.has("port2_conductance"))
                throw s.error("port_impedance", "port_impedance conflicts with explicit port conductances");
            const double z = detail::parse_number(*v, s, "port_impedance");
            if (!(z > 0.0)) throw s.error("port_impedance", "port_impedance must be positive");
            d.bandpass.port1_conductance = d.bandpass.port2_conductance = 1.0 / z;
        }
        if (auto v = s.raw("port1_conductance")) d.bandpass.port1_conductance = detail::parse_number(*v, s, "port1_conductance");
        if (auto v = s.raw("port2_conductance")) d.bandpass.port2_conductance = detail::parse_number(*v, s, "port2_conductance");
        s.reject_unknown();
        detail::with_location(s, [&] { d.bandpass.validate(); });
    }

    // modulation
    if (sections.count("modulation")) {
        auto& s = sections["modulation"];
        ModulationSpec m;
        if (auto v = s.raw("fm")) m.fm_hz = detail::parse_frequency(*v, s, "fm");
        else throw s.error("fm", "fm is required");
        if (auto v = s.raw("index")) m.index = detail::parse_number(*v, s, "index");
        else throw s.error("index", "index is required");
        m.harmonics = rule_harmonics(d.order);
        if (auto v = s.raw("harmonics")) m.harmonics = detail::parse_int(*v, s, "harmonics");
        const auto step = s.raw("phase_step");
        const auto list = s.raw("phases");
        if (step && list) throw s.error("phases", "give either phase_step or phases, not both");
        if (list) {
            m.phases = detail::parse_angle_list(*list, s, "phases");
        } else {
            const double dphi = step ? detail::parse_angle(*step, s, "phase_step") : 0.0;
            m.phases = ModulationSpec::progressive(d.order, m.fm_hz, m.index, dphi, m.harmonics).phases;
        }
        s.reject_unknown();
        detail::with_location(s, [&] { m.validate(d.order); });
        d.modulation = std::move(m);
    }

    // analysis
    d.grid = SweepGrid::around(d.bandpass);
    d.rl_level_db = d.return_loss_db ? std::min(*d.return_loss_db, 10.0) : 10.0;
    if (d.modulation) {
        const int r = rule_harmonics(d.order);
        d.convergence_harmonics = {r, r + 2};
        if (r > 1) d.convergence_harmonics.insert(d.convergence_harmonics.begin(), r - 2);
    }
    if (sections.count("analysis")) {
        auto& s = sections["analysis"];
        if (auto v = s.raw("mode")) detail::with_location(s, [&] { d.mode = parse_mode(*v); }, "mode");
        if (auto v = s.raw("f_start")) d.grid.f_start_hz = detail::parse_frequency(*v, s, "f_start");
        if (auto v = s.raw("f_stop")) d.grid.f_stop_hz = detail::parse_frequency(*v, s, "f_stop");
        if (auto v = s.raw("points")) d.grid.points = detail::parse_int(*v, s, "points");
        if (auto v = s.raw("rl_level_db")) d.rl_level_db = detail::parse_number(*v, s, "rl_level_db");
        if (auto v = s.raw("d_level_db")) d.d_level_db = detail::parse_number(*v, s, "d_level_db");
        if (auto v = s.raw("convergence_harmonics"))
            d.convergence_harmonics = detail::parse_int_list(*v, s, "convergence_harmonics");
        s.reject_unknown();
        detail::with_location(s, [&] {
            if (d.modulation) d.grid.validate_for(*d.modulation, d.mode);
            else d.grid.validate();
        });
        for (std::size_t i = 0; i < d.convergence_harmonics.size(); ++i) {
            const int h = d.convergence_harmonics[i];
            if (h < 1 || h % 2 == 0 || (i > 0 && h <= d.convergence_harmonics[i - 1]))
                throw s.error("convergence_harmonics", "convergence_harmonics must be ascending odd counts");
        }
    } else if (d.modulation) {
        d.grid.validate_for(*d.modulation, d.mode);
    }

    // impairments
    if (sections.count("impairments")) {
        auto& s = sections["impairments"];
        if (auto v = s.raw("qu")) {
            d.impairments.unloaded_q =
                *v == "inf" ? std::numeric_limits<double>::infinity() : detail::parse_number(*v, s, "qu");
            if (!(*d.impairments.unloaded_q > 0.0)) throw s.error("qu", "qu must be positive");
        }
        if (auto v = s.raw("couplings")) {
            d.impairments.extra_couplings = detail::parse_couplings(*v, d.order, s, "couplings");
            try {
                (void)apply_parasitics(d.matrix(), d.impairments.extra_couplings);
            } catch (const ConfigError& e) {
                throw s.error("couplings", e.what());
            }
        }
        s.reject_unknown();
    }

    // optimize
    if (sections.count("optimize")) {
        auto& s = sections["optimize"];
        OptimizeSpec o;
        auto need = [&](const char* key) {
            auto v = s.raw(key);
            if (!v) throw s.error(key, std::string(key) + " is required");
            return *v;
        };
        o.fm_min_hz = detail::parse_frequency(need("fm_min"), s, "fm_min");
        o.fm_max_hz = detail::parse_frequency(need("fm_max"), s, "fm_max");
        o.index_min = detail::parse_number(need("index_min"), s, "index_min");
        o.index_max = detail::parse_number(need("index_max"), s, "index_max");
        o.phase_min_rad = detail::parse_angle(need("phase_min"), s, "phase_min");
        o.phase_max_rad = detail::parse_angle(need("phase_max"), s, "phase_max");
        if (d.modulation) o.harmonics = d.modulation->harmonics;
        o.mode = d.mode;
        if (auto v = s.raw("min_rl_db")) o.min_rl_db = detail::parse_number(*v, s, "min_rl_db");
        if (auto v = s.raw("max_il_db")) o.max_il_db = detail::parse_number(*v, s, "max_il_db");
        if (auto v = s.raw("objective")) detail::with_location(s, [&] { o.objective = parse_objective(*v); }, "objective");
        if (auto v = s.raw("d_level_db")) o.d_level_db = detail::parse_number(*v, s, "d_level_db");
        if (auto v = s.raw("harmonics")) o.harmonics = detail::parse_int(*v, s, "harmonics");
        if (auto v = s.raw("mode")) detail::with_location(s, [&] { o.mode = parse_mode(*v); }, "mode");
        if (auto v = s.raw("grid_steps")) o.grid_steps = detail::parse_int(*v, s, "grid_steps");
        if (auto v = s.raw("max_evaluations")) o.max_evaluations = detail::parse_int(*v, s, "max_evaluations");
        if (auto v = s.raw("points")) o.points = detail::parse_int(*v, s, "points");
        if (auto v = s.raw("constraint_fraction")) o.constraint_fraction = detail::parse_number(*v, s, "constraint_fraction");
        if (auto v = s.raw("penalty_weight")) o.penalty_weight = detail::parse_number(*v, s, "penalty_weight");
        s.reject_unknown();
        detail::with_location(s, [&] { o.validate(); });
        d.optimize = o;
    }

    // oracle
    if (sections.count("oracle")) {
        auto& s = sections["oracle"];
        if (auto v = s.raw("frequencies")) d.oracle.frequencies_hz = detail::parse_frequency_list(*v, s, "frequencies");
        if (auto v = s.raw("harmonics")) d.oracle.harmonics = detail::parse_int(*v, s, "harmonics");
        if (auto v = s.raw("samples_per_period")) d.oracle.samples_per_period = detail::parse_int(*v, s, "samples_per_period");
        if (auto v = s.raw("reference_harmonics")) d.oracle.reference_harmonics = detail::parse_int(*v, s, "reference_harmonics");
        s.reject_unknown();
        for (double f : d.oracle.frequencies_hz)
            if (!(f > 0.0)) throw s.error("frequencies", "oracle frequencies must be positive");
        if (d.oracle.harmonics < 1 || d.oracle.harmonics % 2 == 0) throw s.error("harmonics", "harmonics must be odd");
        if (d.oracle.reference_harmonics < 1 || d.oracle.reference_harmonics % 2 == 0)
            throw s.error("reference_harmonics", "reference_harmonics must be odd");
        if (d.oracle.samples_per_period < 50) throw s.error("samples_per_period", "samples_per_period must be >= 50");
    }
    return d;
}

inline Design parse_design_string(const std::string& text) {
    std::istringstream in(text);
    return parse_design(in);
}

inline Design load_design(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read design file '" + path + "'");
    return parse_design(in);
}

/// Canonical form: every value explicit, frequencies in Hz, angles in rad, %.17g throughout.
inline void write_design(std::ostream& os, const Design& d) {
    auto num = [](double v) { return format_double(v); };
    auto hz = [&](double v) { return num(v) + " Hz"; };
    auto rad = [&](double v) { return num(v) + " rad"; };
    auto ints = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
        return s;
    };

    os << "[prototype]\norder = " << d.order << '\n';
    if (d.entries) {
        os << "matrix = ";
        for (Eigen::Index i = 0; i < d.entries->rows(); ++i) {
            if (i) os << "; ";
            for (Eigen::Index j = 0; j < d.entries->cols(); ++j) os << (j ? " " : "") << num((*d.entries)(i, j));
        }
        os << '\n';
    } else {
        os << "return_loss_db = " << num(*d.return_loss_db) << '\n';
    }

    const auto& b = d.bandpass;
    os << "\n[bandpass]\nf0 = " << hz(b.f0_hz) << "\nfractional_bandwidth = " << num(b.fractional_bandwidth)
       << "\nlowpass_capacitance = " << num(b.lowpass_capacitance) << "\nport1_conductance = "
       << num(b.port1_conductance) << "\nport2_conductance = " << num(b.port2_conductance) << '\n';

    if (d.modulation) {
        const auto& m = *d.modulation;
        os << "\n[modulation]\nfm = " << hz(m.fm_hz) << "\nindex = " << num(m.index) << "\nphases = ";
        for (std::size_t i = 0; i < m.phases.size(); ++i) os << (i ? ", " : "") << num(m.phases[i]);
        os << " rad\nharmonics = " << m.harmonics << '\n';
    }

    os << "\n[analysis]\nmode = " << to_string(d.mode) << "\nf_start = " << hz(d.grid.f_start_hz)
       << "\nf_stop = " << hz(d.grid.f_stop_hz) << "\npoints = " << d.grid.points
       << "\nrl_level_db = " << num(d.rl_level_db) << "\nd_level_db = " << num(d.d_level_db) << '\n';
    if (!d.convergence_harmonics.empty())
        os << "convergence_harmonics = " << ints(d.convergence_harmonics) << '\n';

    if (!d.impairments.empty()) {
        os << "\n[impairments]\n";
        if (d.impairments.unloaded_q) {
            os << "qu = " << (std::isinf(*d.impairments.unloaded_q) ? std::string("inf") : num(*d.impairments.unloaded_q))
               << '\n';
        }
        if (!d.impairments.extra_couplings.empty()) {
            os << "couplings = ";
            for (std::size_t i = 0; i < d.impairments.extra_couplings.size(); ++i) {
                const auto& c = d.impairments.extra_couplings[i];
                os << (i ? ", " : "") << node_label(c.i, d.order) << '-' << node_label(c.j, d.order) << ": "
                   << num(c.value);
            }
            os << '\n';
        }
    }

    if (d.optimize) {
        const auto& o = *d.optimize;
        os << "\n[optimize]\nfm_min = " << hz(o.fm_min_hz) << "\nfm_max = " << hz(o.fm_max_hz)
           << "\nindex_min = " << num(o.index_min) << "\nindex_max = " << num(o.index_max)
           << "\nphase_min = " << rad(o.phase_min_rad) << "\nphase_max = " << rad(o.phase_max_rad)
           << "\nmin_rl_db = " << num(o.min_rl_db) << "\nmax_il_db = " << num(o.max_il_db)
           << "\nobjective = " << to_string(o.objective) << "\nd_level_db = " << num(o.d_level_db)
           << "\nharmonics = " << o.harmonics << "\nmode = " << to_string(o.mode)
           << "\ngrid_steps = " << o.grid_steps << "\nmax_evaluations = " << o.max_evaluations
           << "\npoints = " << o.points << "\nconstraint_fraction = " << num(o.constraint_fraction)
           << "\npenalty_weight = " << num(o.penalty_weight) << '\n';
    }

    const auto& r = d.oracle;
    os << "\n[oracle]\n";
    if (!r.frequencies_hz.empty()) {
        os << "frequencies = ";
        for (std::size_t i = 0; i < r.frequencies_hz.size(); ++i) os << (i ? ", " : "") << num(r.frequencies_hz[i]);
        os << " Hz\n";
    }
    os << "harmonics = " << r.harmonics << "\nsamples_per_period = " << r.samples_per_period
       << "\nreference_harmonics = " << r.reference_harmonics << '\n';
}

/// Oracle test frequencies: the configured list, or five points across the central half of the passband.
inline std::vector<double> oracle_frequencies(const Design& d) {
    if (!d.oracle.frequencies_hz.empty()) return d.oracle.frequencies_hz;
    std::vector<double> f;
    const double bw = d.bandpass.bandwidth_hz();
    for (int i = 0; i < 5; ++i) f.push_back(d.bandpass.f0_hz + (i - 2) * 0.125 * bw);
    return f;
}

}  // namespace nrf
