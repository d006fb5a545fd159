#pragma once

// Figures of merit computed from sweep results.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nrf/errors.hpp"
#include "nrf/solve.hpp"

namespace nrf {

/// 10 log10(|S21|^2 / |S12|^2); +inf when S12 vanishes.
inline double directivity_db(const SPoint& p) {
    const double fwd = std::norm(p.s21());
    const double bwd = std::norm(p.s12());
    if (bwd == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(fwd / bwd);
}

/// Directivity at the grid point nearest to f.
inline double directivity(const SParamSet& s, double f_hz) { return directivity_db(s[s.nearest(f_hz)]); }

enum class BandCriterion {
    return_loss,  // |S11| <= -level
    directivity,  // D >= level
};

enum class BandEdges {
    outermost,   // first crossing met when scanning inward from each end of the sweep
    contiguous,  // the run of satisfying points that contains f0
};

struct Band {
    double lower_hz = 0.0;
    double upper_hz = 0.0;

    double width() const noexcept { return upper_hz - lower_hz; }
    bool empty() const noexcept { return !(upper_hz > lower_hz); }
    bool contains(double f) const noexcept { return !empty() && f >= lower_hz && f <= upper_hz; }
};

namespace detail {

inline double criterion_margin(const SPoint& p, double level_db, BandCriterion which) {
    if (which == BandCriterion::return_loss) return -to_db(p.s11()) - level_db;
    return directivity_db(p) - level_db;
}

// Linear interpolation of the zero crossing between an unsatisfied point a and a satisfied point b.
inline double crossing(double fa, double ca, double fb, double cb) {
    if (!std::isfinite(ca) || !std::isfinite(cb) || cb == ca) return fb;
    return fa + (fb - fa) * (0.0 - ca) / (cb - ca);
}

}  // namespace detail

inline Band band_at_level(const SParamSet& s, double f0_hz, double level_db, BandCriterion which,
                          BandEdges edges = BandEdges::outermost) {
    const std::size_t n = s.size();
    if (n == 0) return {};
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = detail::criterion_margin(s[i], level_db, which);
    auto ok = [&](std::size_t i) { return c[i] >= 0.0; };

    std::size_t lo = 0, hi = 0;
    if (edges == BandEdges::contiguous) {
        const std::size_t i0 = s.nearest(f0_hz);
        if (!ok(i0)) return {};
        lo = hi = i0;
        while (lo > 0 && ok(lo - 1)) --lo;
        while (hi + 1 < n && ok(hi + 1)) ++hi;
    } else {
        std::size_t first = n, last = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (ok(i)) {
                if (first == n) first = i;
                last = i;
            }
        }
        if (first == n) return {};
        lo = first;
        hi = last;
    }
    Band b;
    b.lower_hz = lo == 0 ? s[0].f_hz : detail::crossing(s[lo - 1].f_hz, c[lo - 1], s[lo].f_hz, c[lo]);
    b.upper_hz = hi + 1 == n ? s[n - 1].f_hz : detail::crossing(s[hi + 1].f_hz, c[hi + 1], s[hi].f_hz, c[hi]);
    if (b.upper_hz < b.lower_hz) b.upper_hz = b.lower_hz;
    return b;
}

inline double bandwidth_at_level(const SParamSet& s, double f0_hz, double level_db, BandCriterion which,
                                 BandEdges edges = BandEdges::outermost) {
    return band_at_level(s, f0_hz, level_db, which, edges).width();
}

struct PowerEntry {
    Port port;
    int k;
    double power;  // |S|^2 for unit incident power
};

/// Power leaving each port at each harmonic when `excite` is driven with unit power at the fundamental.
inline std::vector<PowerEntry> harmonic_power_budget(const SParamSet& s, double f_hz, Port excite = Port::p1) {
    const auto& p = s[s.nearest(f_hz)];
    const int K = p.half_width();
    std::vector<PowerEntry> out;
    for (Port b : {Port::p1, Port::p2})
        for (int k = -K; k <= K; ++k) out.push_back({b, k, std::norm(p(b, excite, k))});
    return out;
}

struct FilterMetrics {
    double f0_hz = 0.0;
    double d0_db = 0.0;
    double d_min_passband_db = 0.0;
    double il_forward_center_db = 0.0;
    double il_forward_max_db = 0.0;
    double il_backward_center_db = 0.0;
    double rl_level_db = 0.0;
    Band rl_band;
    double d_level_db = 0.0;
    Band d_band;
    std::optional<bool> converged;
    std::optional<double> delta_s_max_db;

    double bw_at_rl_hz() const noexcept { return rl_band.width(); }
    double bw_at_d_hz() const noexcept { return d_band.width(); }
};

/// Passband statistics are taken over the return-loss band; D0 and centre losses at the grid point nearest f0.
inline FilterMetrics compute_metrics(const SParamSet& s, double f0_hz, double rl_level_db, double d_level_db) {
    if (s.size() == 0) throw ConfigError("metrics need a non-empty sweep");
    FilterMetrics m;
    m.f0_hz = f0_hz;
    m.rl_level_db = rl_level_db;
    m.d_level_db = d_level_db;
    const auto& c = s[s.nearest(f0_hz)];
    m.d0_db = directivity_db(c);
    m.il_forward_center_db = -to_db(c.s21());
    m.il_backward_center_db = -to_db(c.s12());
    m.rl_band = band_at_level(s, f0_hz, rl_level_db, BandCriterion::return_loss);
    m.d_band = band_at_level(s, f0_hz, d_level_db, BandCriterion::directivity);

    m.d_min_passband_db = m.d0_db;
    m.il_forward_max_db = m.il_forward_center_db;
    for (const auto& p : s.points) {
        if (!m.rl_band.contains(p.f_hz)) continue;
        m.d_min_passband_db = std::min(m.d_min_passband_db, directivity_db(p));
        m.il_forward_max_db = std::max(m.il_forward_max_db, -to_db(p.s21()));
    }
    return m;
}

/// Flat key = value report.
inline void write_metrics_report(std::ostream& os, const FilterMetrics& m) {
    auto kv = [&](const char* k, double v) { os << k << " = " << format_double(v) << '\n'; };
    kv("f0_hz", m.f0_hz);
    kv("d0_db", m.d0_db);
    kv("d_min_passband_db", m.d_min_passband_db);
    kv("il_forward_center_db", m.il_forward_center_db);
    kv("il_forward_max_db", m.il_forward_max_db);
    kv("il_backward_center_db", m.il_backward_center_db);
    kv("rl_level_db", m.rl_level_db);
    kv("bw_at_rl_hz", m.bw_at_rl_hz());
    kv("rl_band_lower_hz", m.rl_band.lower_hz);
    kv("rl_band_upper_hz", m.rl_band.upper_hz);
    kv("d_level_db", m.d_level_db);
    kv("bw_at_d_hz", m.bw_at_d_hz());
    if (m.converged) os << "converged = " << (*m.converged ? "true" : "false") << '\n';
    if (m.delta_s_max_db) kv("delta_s_max_db", *m.delta_s_max_db);
}

inline void write_metrics_csv(std::ostream& os, const FilterMetrics& m, bool header = true) {
    if (header) {
        os << "f0_hz,d0_db,d_min_passband_db,il_forward_center_db,il_forward_max_db,il_backward_center_db,"
              "rl_level_db,bw_at_rl_hz,d_level_db,bw_at_d_hz,converged,delta_s_max_db\n";
    }
    os << format_double(m.f0_hz) << ',' << format_double(m.d0_db) << ',' << format_double(m.d_min_passband_db)
       << ',' << format_double(m.il_forward_center_db) << ',' << format_double(m.il_forward_max_db) << ','
       << format_double(m.il_backward_center_db) << ',' << format_double(m.rl_level_db) << ','
       << format_double(m.bw_at_rl_hz()) << ',' << format_double(m.d_level_db) << ','
       << format_double(m.bw_at_d_hz()) << ',' << (m.converged ? (*m.converged ? "true" : "false") : "") << ','
       << (m.delta_s_max_db ? format_double(*m.delta_s_max_db) : "") << '\n';
}

struct ConvergenceStep {
    int harmonics_from = 0;
    int harmonics_to = 0;
    double max_delta_db = 0.0;
    double worst_f_hz = 0.0;
    std::string worst_parameter;
    bool converged = false;
};

namespace detail {

inline double floored_db(cplx s) { return 20.0 * std::log10(std::max(std::abs(s), 1e-15)); }

}  // namespace detail

/// Largest change in dB of S11, S21, S12, S22 (fundamental) between two sweeps on the same grid.
inline ConvergenceStep compare_sweeps(const SParamSet& a, const SParamSet& b) {
    if (a.size() != b.size()) throw ConfigError("sweeps to compare must share a grid");
    ConvergenceStep step;
    step.harmonics_from = a.harmonics;
    step.harmonics_to = b.harmonics;
    constexpr Port pairs[4][2] = {{Port::p1, Port::p1}, {Port::p2, Port::p1}, {Port::p1, Port::p2}, {Port::p2, Port::p2}};
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (const auto& ba : pairs) {
            const double d = std::abs(detail::floored_db(a[i](ba[0], ba[1])) - detail::floored_db(b[i](ba[0], ba[1])));
            if (d > step.max_delta_db) {
                step.max_delta_db = d;
                step.worst_f_hz = a[i].f_hz;
                step.worst_parameter = sparam_name(ba[0], ba[1], 0).substr(0, 3);
            }
        }
    }
    return step;
}

/// Sweeps once per harmonic count and compares successive pairs.
inline std::vector<ConvergenceStep> convergence_study(const CouplingMatrix& m, const BandpassSpec& spec,
                                                      const ModulationSpec& mod, const SweepGrid& grid, Mode mode,
                                                      const ImpairmentSpec& imp, const std::vector<int>& harmonics,
                                                      double threshold_db = 0.1) {
    for (std::size_t i = 0; i < harmonics.size(); ++i) {
        if (harmonics[i] < 1 || harmonics[i] % 2 == 0)
            throw ConfigError("convergence study needs odd harmonic counts", 0, "harmonics");
        if (i > 0 && harmonics[i] <= harmonics[i - 1])
            throw ConfigError("convergence study needs ascending harmonic counts", 0, "harmonics");
    }
    const auto elems = impaired_elements(m, spec, imp);
    std::vector<SParamSet> runs;
    for (int h : harmonics) {
        auto mh = mod;
        mh.harmonics = h;
        runs.push_back(sweep_elements(elems, mh, grid, mode));
    }
    std::vector<ConvergenceStep> out;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        auto step = compare_sweeps(runs[i - 1], runs[i]);
        step.converged = step.max_delta_db < threshold_db;
        out.push_back(step);
    }
    return out;
}

/// Minimum harmonic count suggested for an order-N filter, 2(N-1)+1.
constexpr int rule_harmonics(int order) noexcept { return 2 * (order - 1) + 1; }

inline void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceStep>& steps) {
    os << "nhar_from,nhar_to,max_delta_db,worst_f_hz,worst_parameter,converged\n";
    for (const auto& s : steps) {
        os << s.harmonics_from << ',' << s.harmonics_to << ',' << format_double(s.max_delta_db) << ','
           << format_double(s.worst_f_hz) << ',' << s.worst_parameter << ',' << (s.converged ? "true" : "false")
           << '\n';
    }
}

}  // namespace nrf
