#pragma once

// Dense solves of the nodal systems and S-parameter extraction over a frequency sweep.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "nrf/errors.hpp"
#include "nrf/harmonic.hpp"
#include "nrf/impairments.hpp"
#include "nrf/network.hpp"
#include "nrf/synthesis.hpp"

namespace nrf {

enum class Port { p1 = 0, p2 = 1 };

inline int port_node(Port p, int order) { return p == Port::p1 ? 0 : order + 1; }
inline Port other(Port p) { return p == Port::p1 ? Port::p2 : Port::p1; }

struct SweepGrid {
    double f_start_hz = 0.0;
    double f_stop_hz = 0.0;
    int points = 401;

    /// `span` times the passband width, centred on f0.
    static SweepGrid around(const BandpassSpec& spec, double span = 3.0, int points = 401) {
        const double half = 0.5 * span * spec.bandwidth_hz();
        return {spec.f0_hz - half, spec.f0_hz + half, points};
    }

    void validate() const {
        if (points < 2) throw ConfigError("sweep needs at least 2 points", 0, "points");
        if (!(f_start_hz > 0.0) || !(f_stop_hz > f_start_hz) || !std::isfinite(f_stop_hz))
            throw ConfigError("sweep requires 0 < f_start < f_stop", 0, "f_start");
    }

    /// Rigorous mode needs f_start > K fm so every shifted frequency stays positive.
    void validate_for(const ModulationSpec& mod, Mode mode) const {
        validate();
        if (mode == Mode::rigorous && !(f_start_hz > mod.half_width() * mod.fm_hz)) {
            throw ConfigError("f_start must exceed K*fm in rigorous mode", 0, "f_start");
        }
    }

    double frequency(int i) const noexcept {
        if (i == points - 1) return f_stop_hz;
        return f_start_hz + (f_stop_hz - f_start_hz) * static_cast<double>(i) / (points - 1);
    }

    std::vector<double> frequencies() const {
        std::vector<double> f(static_cast<std::size_t>(points));
        for (int i = 0; i < points; ++i) f[static_cast<std::size_t>(i)] = frequency(i);
        return f;
    }

    friend bool operator==(const SweepGrid&, const SweepGrid&) = default;
};

/// S-parameters at one frequency: S_ba^(k) for b, a in {P1, P2} and k = -K..K.
struct SPoint {
    double f_hz = 0.0;
    int harmonics = 1;
    std::vector<cplx> values;

    int half_width() const noexcept { return (harmonics - 1) / 2; }
    std::size_t slot(Port b, Port a, int k) const noexcept {
        const auto pair = static_cast<std::size_t>(static_cast<int>(b) + 2 * static_cast<int>(a));
        return pair * static_cast<std::size_t>(harmonics) + static_cast<std::size_t>(k + half_width());
    }
    cplx operator()(Port b, Port a, int k = 0) const { return values.at(slot(b, a, k)); }
    cplx& at(Port b, Port a, int k) { return values.at(slot(b, a, k)); }

    cplx s11() const { return (*this)(Port::p1, Port::p1); }
    cplx s21() const { return (*this)(Port::p2, Port::p1); }
    cplx s12() const { return (*this)(Port::p1, Port::p2); }
    cplx s22() const { return (*this)(Port::p2, Port::p2); }
};

struct SParamSet {
    int harmonics = 1;
    std::vector<SPoint> points;

    std::size_t size() const noexcept { return points.size(); }
    const SPoint& operator[](std::size_t i) const { return points[i]; }

    /// Grid point closest to f.
    std::size_t nearest(double f_hz) const {
        if (points.empty()) throw ConfigError("empty sweep");
        std::size_t best = 0;
        for (std::size_t i = 1; i < points.size(); ++i)
            if (std::abs(points[i].f_hz - f_hz) < std::abs(points[best].f_hz - f_hz)) best = i;
        return best;
    }
};

inline double to_db(cplx s) { return 20.0 * std::log10(std::abs(s)); }

namespace detail {

inline Eigen::VectorXcd unit_excitation(const HarmonicSystem& sys, Port excite) {
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(sys.size());
    rhs(sys.index(port_node(excite, sys.order), 0)) = 1.0;
    return rhs;
}

inline Eigen::PartialPivLU<Eigen::MatrixXcd> factorize(const HarmonicSystem& sys) {
    const double f_hz = sys.omega / (2.0 * std::numbers::pi);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(sys.matrix);
    // Eigen's estimate is not reliable for exactly zero pivots, so those are caught first.
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const double rcond = pivots.minCoeff() > 0.0 && pivots.allFinite() ? lu.rcond() : 0.0;
    if (!(rcond > 1e-12)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "singular or ill-conditioned system (rcond %.3g)", rcond);
        throw NumericError(buf, f_hz, "solve");
    }
    return lu;
}

}  // namespace detail

/// Nodal voltages for a unit current injected at (excite, k = 0).
inline Eigen::VectorXcd solve_at(const HarmonicSystem& sys, Port excite) {
    const auto lu = detail::factorize(sys);
    return lu.solve(detail::unit_excitation(sys, excite));
}

/// Fills the column of `point` that belongs to excitation port `excite`.
inline void extract_sparams(const Eigen::VectorXcd& v, const HarmonicSystem& sys, Port excite, SPoint& point) {
    const int K = sys.half_width();
    const double ga = sys.port_conductance(port_node(excite, sys.order));
    for (Port b : {Port::p1, Port::p2}) {
        const double gb = sys.port_conductance(port_node(b, sys.order));
        const double scale = 2.0 * std::sqrt(ga * gb);
        for (int k = -K; k <= K; ++k) {
            cplx s = scale * v(sys.index(port_node(b, sys.order), k));
            if (b == excite && k == 0) s -= 1.0;
            point.at(b, excite, k) = s;
        }
    }
}

inline SPoint sparams_at(const HarmonicSystem& sys, double f_hz) {
    SPoint p;
    p.f_hz = f_hz;
    p.harmonics = sys.harmonics;
    p.values.assign(4 * static_cast<std::size_t>(sys.harmonics), cplx{});
    const auto lu = detail::factorize(sys);
    for (Port a : {Port::p1, Port::p2}) extract_sparams(lu.solve(detail::unit_excitation(sys, a)), sys, a, p);
    return p;
}

inline HarmonicSystem static_system(const BandpassElements& e, double omega) {
    HarmonicSystem sys;
    sys.matrix = assemble_static(e, omega);
    sys.order = e.order;
    sys.harmonics = 1;
    sys.omega = omega;
    sys.port1_conductance = e.port1_conductance;
    sys.port2_conductance = e.port2_conductance;
    return sys;
}

/// Element values after parasitics and loss are folded in.
inline BandpassElements impaired_elements(const CouplingMatrix& m, const BandpassSpec& spec,
                                          const ImpairmentSpec& imp) {
    auto e = scale(apply_parasitics(m, imp.extra_couplings), spec);
    if (imp.unloaded_q) e = apply_loss(std::move(e), *imp.unloaded_q);
    return e;
}

/// S-parameters at a single frequency; no modulation means the static network.
inline SPoint evaluate(const BandpassElements& e, const std::optional<ModulationSpec>& mod, Mode mode,
                       double f_hz) {
    const double omega = 2.0 * std::numbers::pi * f_hz;
    if (!mod) return sparams_at(static_system(e, omega), f_hz);
    return sparams_at(assemble_modulated(e, *mod, omega, mode), f_hz);
}

struct SweepOptions {
    unsigned threads = 0;  // 0 = hardware concurrency
};

inline SParamSet sweep_elements(const BandpassElements& e, const std::optional<ModulationSpec>& mod,
                                const SweepGrid& grid, Mode mode, SweepOptions opts = {}) {
    if (mod) {
        grid.validate_for(*mod, mode);
        mod->validate(e.order);
    } else {
        grid.validate();
    }
    const auto n = static_cast<std::size_t>(grid.points);
    SParamSet out;
    out.harmonics = mod ? mod->harmonics : 1;
    out.points.resize(n);
    std::vector<std::exception_ptr> errors(n);

    unsigned workers = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    auto work = [&](unsigned w) {
        for (std::size_t i = w; i < n; i += workers) {
            try {
                out.points[i] = evaluate(e, mod, mode, grid.frequency(static_cast<int>(i)));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    }
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
    return out;
}

/// Full pipeline: parasitics, scaling, loss, assembly, solve and extraction at every grid point.
inline SParamSet sweep(const CouplingMatrix& m, const BandpassSpec& spec, const std::optional<ModulationSpec>& mod,
                       const SweepGrid& grid, Mode mode, const ImpairmentSpec& imp = {}, SweepOptions opts = {}) {
    return sweep_elements(impaired_elements(m, spec, imp), mod, grid, mode, opts);
}

/// Column name for one S-parameter, e.g. "S21_k-1".
inline std::string sparam_name(Port b, Port a, int k) {
    return "S" + std::to_string(static_cast<int>(b) + 1) + std::to_string(static_cast<int>(a) + 1) + "_k" +
           std::to_string(k);
}

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// f_Hz, then Re/Im of S11, S21, S12, S22 for k = -K..K in that order.
inline void write_sparams_csv(std::ostream& os, const SParamSet& s) {
    const int K = (s.harmonics - 1) / 2;
    constexpr Port order[4][2] = {{Port::p1, Port::p1}, {Port::p2, Port::p1}, {Port::p1, Port::p2}, {Port::p2, Port::p2}};
    os << "f_Hz";
    for (const auto& ba : order)
        for (int k = -K; k <= K; ++k) {
            const auto name = sparam_name(ba[0], ba[1], k);
            os << ',' << name << "_re," << name << "_im";
        }
    os << '\n';
    for (const auto& p : s.points) {
        os << format_double(p.f_hz);
        for (const auto& ba : order)
            for (int k = -K; k <= K; ++k) {
                const cplx v = p(ba[0], ba[1], k);
                os << ',' << format_double(v.real()) << ',' << format_double(v.imag());
            }
        os << '\n';
    }
}

}  // namespace nrf
