#pragma once

// Search over (fm, dm, phase step) for non-reciprocal designs: a coarse grid scan followed by a
// bounded Nelder-Mead refinement in normalized coordinates.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nrf/errors.hpp"
#include "nrf/harmonic.hpp"
#include "nrf/impairments.hpp"
#include "nrf/metrics.hpp"
#include "nrf/solve.hpp"

namespace nrf {

enum class Objective {
    d0,           // directivity at f0
    d_bandwidth,  // D0 times the fraction of the passband where D >= d_level
};

inline std::string to_string(Objective o) { return o == Objective::d0 ? "d0" : "d_bandwidth"; }

inline Objective parse_objective(const std::string& s) {
    if (s == "d0") return Objective::d0;
    if (s == "d_bandwidth") return Objective::d_bandwidth;
    throw ConfigError("unknown objective '" + s + "' (expected d0 or d_bandwidth)", 0, "objective");
}

struct OptimizeSpec {
    double fm_min_hz = 0.0, fm_max_hz = 0.0;
    double index_min = 0.0, index_max = 0.0;
    double phase_min_rad = 0.0, phase_max_rad = 0.0;
    double min_rl_db = 10.0;          // worst |S11| in the constraint band must be <= -min_rl_db
    double max_il_db = 3.0;           // worst forward loss in the constraint band
    Objective objective = Objective::d0;
    double d_level_db = 13.0;         // used by d_bandwidth
    int harmonics = 7;
    Mode mode = Mode::cm_approx;
    int grid_steps = 5;               // per parameter in the scan stage
    int max_evaluations = 150;        // refinement budget
    int points = 61;                  // evaluation grid across the passband
    double constraint_fraction = 0.5; // central fraction of the passband where constraints apply
    double penalty_weight = 10.0;     // objective dB per dB of constraint violation

    void validate() const {
        auto ordered = [](double lo, double hi) { return std::isfinite(lo) && std::isfinite(hi) && lo <= hi; };
        if (!ordered(fm_min_hz, fm_max_hz) || !(fm_min_hz > 0.0))
            throw ConfigError("fm bounds must be finite, positive and ordered", 0, "fm_min");
        if (!ordered(index_min, index_max) || index_min < 0.0 || index_max >= 1.0)
            throw ConfigError("index bounds must be ordered within [0, 1)", 0, "index_min");
        if (!ordered(phase_min_rad, phase_max_rad))
            throw ConfigError("phase bounds must be finite and ordered", 0, "phase_min");
        if (grid_steps < 1) throw ConfigError("grid_steps must be positive", 0, "grid_steps");
        if (max_evaluations < 0) throw ConfigError("max_evaluations must be non-negative", 0, "max_evaluations");
        if (points < 3) throw ConfigError("optimizer needs at least 3 evaluation points", 0, "points");
        if (harmonics < 1 || harmonics % 2 == 0) throw ConfigError("harmonics must be odd", 0, "harmonics");
        if (!(constraint_fraction > 0.0 && constraint_fraction <= 1.0))
            throw ConfigError("constraint_fraction must lie in (0, 1]", 0, "constraint_fraction");
    }

    friend bool operator==(const OptimizeSpec&, const OptimizeSpec&) = default;
};

struct Evaluation {
    double fm_hz = 0.0;
    double index = 0.0;
    double phase_step_rad = 0.0;
    double objective = 0.0;
    double d0_db = 0.0;
    double worst_s11_db = 0.0;
    double worst_il_db = 0.0;
    double violation_db = 0.0;
    double penalized = -std::numeric_limits<double>::infinity();

    bool feasible() const noexcept { return violation_db == 0.0; }
};

struct OptimizeResult {
    Evaluation best;
    int evaluations = 0;
    FilterMetrics metrics;  // on the caller's grid at the best point
};

/// Scores one modulation triple on a grid spanning the passband.
inline Evaluation evaluate_modulation(const BandpassElements& elems, const BandpassSpec& spec, const OptimizeSpec& opt,
                                      double fm_hz, double index, double phase_step_rad) {
    Evaluation ev;
    ev.fm_hz = fm_hz;
    ev.index = index;
    ev.phase_step_rad = phase_step_rad;

    const auto mod = ModulationSpec::progressive(elems.order, fm_hz, index, phase_step_rad, opt.harmonics);
    const auto grid = SweepGrid::around(spec, 1.0, opt.points);
    SParamSet s;
    try {
        s = sweep_elements(elems, mod, grid, opt.mode, {1});
    } catch (const NumericError&) {
        return ev;  // unusable point, penalized stays -inf
    }

    const double half = 0.5 * opt.constraint_fraction * spec.bandwidth_hz();
    ev.worst_s11_db = -std::numeric_limits<double>::infinity();
    ev.worst_il_db = 0.0;
    for (const auto& p : s.points) {
        if (std::abs(p.f_hz - spec.f0_hz) > half * (1.0 + 1e-12)) continue;
        ev.worst_s11_db = std::max(ev.worst_s11_db, to_db(p.s11()));
        ev.worst_il_db = std::max(ev.worst_il_db, -to_db(p.s21()));
    }
    ev.d0_db = directivity(s, spec.f0_hz);
    if (opt.objective == Objective::d0) {
        ev.objective = ev.d0_db;
    } else {
        const double w = bandwidth_at_level(s, spec.f0_hz, opt.d_level_db, BandCriterion::directivity);
        ev.objective = ev.d0_db * w / spec.bandwidth_hz();
    }
    ev.violation_db = std::max(0.0, ev.worst_s11_db + opt.min_rl_db) + std::max(0.0, ev.worst_il_db - opt.max_il_db);
    ev.penalized = std::isfinite(ev.objective) ? ev.objective - opt.penalty_weight * ev.violation_db
                                               : -std::numeric_limits<double>::infinity();
    return ev;
}

namespace detail {

struct UnitBox {
    std::array<double, 3> lo{}, hi{};

    std::array<double, 3> to_physical(const std::array<double, 3>& x) const {
        std::array<double, 3> p{};
        for (int i = 0; i < 3; ++i) p[i] = lo[i] + std::clamp(x[i], 0.0, 1.0) * (hi[i] - lo[i]);
        return p;
    }
};

inline bool better(const Evaluation& a, const Evaluation& b) { return a.penalized > b.penalized; }

}  // namespace detail

/// Deterministic: the scan order and starting simplex depend only on the inputs.
inline OptimizeResult optimize_modulation(const CouplingMatrix& m, const BandpassSpec& spec, const OptimizeSpec& opt,
                                          const ImpairmentSpec& imp = {},
                                          std::optional<SweepGrid> report_grid = std::nullopt) {
    opt.validate();
    const auto elems = impaired_elements(m, spec, imp);
    detail::UnitBox box;
    box.lo = {opt.fm_min_hz, opt.index_min, opt.phase_min_rad};
    box.hi = {opt.fm_max_hz, opt.index_max, opt.phase_max_rad};

    OptimizeResult result;
    auto eval = [&](const std::array<double, 3>& x) {
        const auto p = box.to_physical(x);
        ++result.evaluations;
        auto ev = evaluate_modulation(elems, spec, opt, p[0], p[1], p[2]);
        if (result.evaluations == 1 || detail::better(ev, result.best)) result.best = ev;
        return ev.penalized;
    };

    // Stage 1: grid scan over the unit cube. Degenerate bounds collapse to one sample.
    std::array<int, 3> steps{};
    for (int i = 0; i < 3; ++i) steps[i] = box.hi[i] > box.lo[i] ? opt.grid_steps : 1;
    std::array<double, 3> best_x{0.5, 0.5, 0.5};
    double best_val = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < steps[0]; ++a)
        for (int b = 0; b < steps[1]; ++b)
            for (int c = 0; c < steps[2]; ++c) {
                auto at = [&](int i, int n) { return n == 1 ? 0.5 : static_cast<double>(i) / (n - 1); };
                const std::array<double, 3> x{at(a, steps[0]), at(b, steps[1]), at(c, steps[2])};
                const double v = eval(x);
                if (v > best_val) {
                    best_val = v;
                    best_x = x;
                }
            }

    // Stage 2: Nelder-Mead over the free coordinates, maximizing the penalized objective.
    std::vector<int> free;
    for (int i = 0; i < 3; ++i)
        if (steps[i] > 1) free.push_back(i);
    const int dim = static_cast<int>(free.size());
    if (dim > 0 && opt.max_evaluations > 0) {
        struct Vertex {
            std::array<double, 3> x;
            double f;
        };
        auto clamp01 = [](std::array<double, 3> x) {
            for (auto& v : x) v = std::clamp(v, 0.0, 1.0);
            return x;
        };
        const double step = 0.5 / opt.grid_steps;
        std::vector<Vertex> simplex{{best_x, best_val}};
        for (int d = 0; d < dim; ++d) {
            auto x = best_x;
            const int i = free[static_cast<std::size_t>(d)];
            x[i] = x[i] + step <= 1.0 ? x[i] + step : x[i] - step;
            simplex.push_back({x, eval(x)});
        }
        const int budget_end = result.evaluations + opt.max_evaluations;
        auto order = [&] {
            std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f > b.f; });
        };
        while (result.evaluations < budget_end) {
            order();
            double spread = 0.0;
            for (const auto& v : simplex)
                for (int i : free) spread = std::max(spread, std::abs(v.x[i] - simplex[0].x[i]));
            if (spread < 1e-4) break;

            std::array<double, 3> centroid = simplex[0].x;
            for (int i : free) {
                double sum = 0.0;
                for (int v = 0; v < dim; ++v) sum += simplex[static_cast<std::size_t>(v)].x[i];
                centroid[i] = sum / dim;
            }
            auto blend = [&](double t) {
                auto x = centroid;
                for (int i : free) x[i] = centroid[i] + t * (simplex.back().x[i] - centroid[i]);
                return clamp01(x);
            };
            const auto xr = blend(-1.0);
            const double fr = eval(xr);
            if (fr > simplex[0].f) {
                const auto xe = blend(-2.0);
                const double fe = eval(xe);
                simplex.back() = fe > fr ? Vertex{xe, fe} : Vertex{xr, fr};
            } else if (fr > simplex[simplex.size() - 2].f) {
                simplex.back() = {xr, fr};
            } else {
                const auto xc = fr > simplex.back().f ? blend(-0.5) : blend(0.5);
                const double fc = eval(xc);
                if (fc > std::max(fr, simplex.back().f)) {
                    simplex.back() = {xc, fc};
                } else {
                    for (std::size_t v = 1; v < simplex.size(); ++v) {
                        for (int i : free) simplex[v].x[i] = 0.5 * (simplex[0].x[i] + simplex[v].x[i]);
                        simplex[v].f = eval(simplex[v].x);
                    }
                }
            }
        }
    }

    const auto& b = result.best;
    const auto mod = ModulationSpec::progressive(elems.order, b.fm_hz, b.index, b.phase_step_rad, opt.harmonics);
    const auto grid = report_grid.value_or(SweepGrid::around(spec));
    result.metrics = compute_metrics(sweep_elements(elems, mod, grid, opt.mode), spec.f0_hz, opt.min_rl_db,
                                     opt.objective == Objective::d0 ? b.d0_db : opt.d_level_db);
    return result;
}

inline void write_optimize_log(std::ostream& os, const OptimizeResult& r, bool header) {
    if (header) {
        os << "fm_hz,index,phase_step_deg,objective,d0_db,worst_s11_db,worst_il_db,violation_db,feasible,"
              "evaluations,bw_at_rl_hz\n";
    }
    const auto& b = r.best;
    os << format_double(b.fm_hz) << ',' << format_double(b.index) << ','
       << format_double(b.phase_step_rad * 180.0 / std::numbers::pi) << ',' << format_double(b.objective) << ','
       << format_double(b.d0_db) << ',' << format_double(b.worst_s11_db) << ',' << format_double(b.worst_il_db)
       << ',' << format_double(b.violation_db) << ',' << (b.feasible() ? "true" : "false") << ',' << r.evaluations
       << ',' << format_double(r.metrics.bw_at_rl_hz()) << '\n';
}

}  // namespace nrf
