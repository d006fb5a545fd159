#pragma once

// Multi-harmonic block admittance system of a filter whose resonator capacitors are pumped as
// Cp * (1 + dm * cos(wm t + phi_u)). Unknowns are ordered node-major: row = node * Nhar + (k + K).

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nrf/errors.hpp"
#include "nrf/network.hpp"

namespace nrf {

enum class Mode { rigorous, cm_approx };

inline std::string to_string(Mode m) { return m == Mode::rigorous ? "rigorous" : "cm"; }

inline Mode parse_mode(const std::string& s) {
    if (s == "rigorous") return Mode::rigorous;
    if (s == "cm" || s == "cm_approx") return Mode::cm_approx;
    throw ConfigError("unknown mode '" + s + "' (expected rigorous or cm)", 0, "mode");
}

struct ModulationSpec {
    double fm_hz = 0.0;
    double index = 0.0;           // dm
    std::vector<double> phases;   // phi_u in radians, u = 1..N
    int harmonics = 1;            // Nhar, odd

    /// phi_u = (u - 1) * step.
    static ModulationSpec progressive(int order, double fm_hz, double index, double phase_step_rad,
                                      int harmonics) {
        ModulationSpec m;
        m.fm_hz = fm_hz;
        m.index = index;
        m.harmonics = harmonics;
        m.phases.resize(static_cast<std::size_t>(order));
        for (int u = 0; u < order; ++u) m.phases[static_cast<std::size_t>(u)] = u * phase_step_rad;
        return m;
    }

    static ModulationSpec none(int order) { return progressive(order, 1.0, 0.0, 0.0, 1); }

    double omega_m() const noexcept { return 2.0 * std::numbers::pi * fm_hz; }
    int half_width() const noexcept { return (harmonics - 1) / 2; }
    double phase(int u) const { return phases.at(static_cast<std::size_t>(u - 1)); }

    void validate(int order) const {
        if (!(index >= 0.0 && index < 1.0)) throw ConfigError("modulation index must lie in [0, 1)", 0, "index");
        if (!(fm_hz > 0.0) || !std::isfinite(fm_hz)) throw ConfigError("modulation frequency must be positive", 0, "fm");
        if (harmonics < 1 || harmonics % 2 == 0)
            throw ConfigError("harmonic count must be a positive odd integer, got " + std::to_string(harmonics), 0,
                              "harmonics");
        if (static_cast<int>(phases.size()) != order)
            throw ConfigError("expected " + std::to_string(order) + " modulation phases, got " +
                                  std::to_string(phases.size()),
                              0, "phases");
        for (double p : phases)
            if (!std::isfinite(p)) throw ConfigError("modulation phase is not finite", 0, "phases");
    }

    friend bool operator==(const ModulationSpec&, const ModulationSpec&) = default;
};

/// Assembled block system plus what extraction needs to know about it.
struct HarmonicSystem {
    Eigen::MatrixXcd matrix;
    int order = 0;
    int harmonics = 1;
    Mode mode = Mode::cm_approx;
    double omega = 0.0;
    double port1_conductance = 1.0;
    double port2_conductance = 1.0;

    int half_width() const noexcept { return (harmonics - 1) / 2; }
    int nodes() const noexcept { return order + 2; }
    Eigen::Index size() const noexcept { return matrix.rows(); }
    Eigen::Index index(int node, int k) const noexcept {
        return static_cast<Eigen::Index>(node) * harmonics + (k + half_width());
    }
    double port_conductance(int node) const noexcept {
        return node == 0 ? port1_conductance : port2_conductance;
    }
};

/// Frequency-invariant susceptance of the order-k harmonic resonator, 2 k wm C / (w0 FB).
inline double harmonic_susceptance(int k, double fm_hz, const BandpassSpec& spec) {
    const double wm = 2.0 * std::numbers::pi * fm_hz;
    return 2.0 * k * wm * spec.lowpass_capacitance / (spec.omega0() * spec.fractional_bandwidth);
}

inline double harmonic_susceptance(int k, const ModulationSpec& mod, const BandpassElements& e) {
    return 2.0 * k * mod.omega_m() * e.lowpass_capacitance / (e.omega0 * e.fractional_bandwidth);
}

/// up:   coupling from harmonic k-1 into harmonic k (block entry (k, k-1)).
/// down: coupling from harmonic k into harmonic k-1 (block entry (k-1, k)).
enum class Direction { up, down };

namespace detail {

inline cplx pump_coefficient(double cp, double index, double phi, Direction dir) {
    // E = (dm Cp / 2) e^{+j phi} drives k from k-1; D = conj(E) drives k-1 from k.
    const double sign = dir == Direction::up ? 1.0 : -1.0;
    return 0.5 * index * cp * std::polar(1.0, sign * phi);
}

}  // namespace detail

/// Frequency-invariant non-reciprocal inverter between harmonics k-1 and k of resonator u, with
/// the bracket evaluated at w0: up = E (w0 + k wm), down = D (w0 + (k-1) wm).
inline cplx nonreciprocal_inverter_lowpass(int u, int k, Direction dir, const BandpassSpec& spec,
                                           const ModulationSpec& mod) {
    if (u < 1 || u > static_cast<int>(mod.phases.size()))
        throw ConfigError("resonator index " + std::to_string(u) + " out of range");
    const double w0 = spec.omega0();
    const double cp = spec.lowpass_capacitance / (w0 * spec.fractional_bandwidth);
    const int bracket_k = dir == Direction::up ? k : k - 1;
    return detail::pump_coefficient(cp, mod.index, mod.phase(u), dir) * (w0 + bracket_k * mod.omega_m());
}

/// Same coupling with the bracket at the actual frequency, as it appears in the rigorous block.
inline cplx nonreciprocal_inverter(int u, int k, Direction dir, const BandpassElements& e,
                                   const ModulationSpec& mod, double omega) {
    const int bracket_k = dir == Direction::up ? k : k - 1;
    return detail::pump_coefficient(e.cp, mod.index, mod.phase(u), dir) * (omega + bracket_k * mod.omega_m());
}

inline HarmonicSystem assemble_modulated(const BandpassElements& e, const ModulationSpec& mod, double omega,
                                         Mode mode) {
    mod.validate(e.order);
    const double f_hz = omega / (2.0 * std::numbers::pi);
    if (!(omega > 0.0) || !std::isfinite(omega)) throw NumericError("assembly requires omega > 0", f_hz, "harmonic");

    const int K = mod.half_width();
    const double wm = mod.omega_m();
    if (mode == Mode::rigorous) {
        for (int k = -K; k <= K; ++k) {
            if (!(omega + k * wm > 0.0)) {
                throw NumericError("spectral singularity: omega + k*omega_m <= 0 for k = " + std::to_string(k),
                                   f_hz, "harmonic");
            }
        }
    }

    HarmonicSystem sys;
    sys.order = e.order;
    sys.harmonics = mod.harmonics;
    sys.mode = mode;
    sys.omega = omega;
    sys.port1_conductance = e.port1_conductance;
    sys.port2_conductance = e.port2_conductance;

    const int nodes = e.size();
    const Eigen::Index n = static_cast<Eigen::Index>(nodes) * mod.harmonics;
    sys.matrix = Eigen::MatrixXcd::Zero(n, n);
    auto& a = sys.matrix;

    // Same-order harmonics couple through the original inverters.
    for (int i = 0; i < nodes; ++i) {
        for (int j = 0; j < nodes; ++j) {
            if (i == j || e.inverters(i, j) == 0.0) continue;
            for (int k = -K; k <= K; ++k) a(sys.index(i, k), sys.index(j, k)) = cplx(0.0, e.inverters(i, j));
        }
    }
    for (int k = -K; k <= K; ++k) {
        a(sys.index(0, k), sys.index(0, k)) = e.port1_conductance;
        a(sys.index(nodes - 1, k), sys.index(nodes - 1, k)) = e.port2_conductance;
    }

    const double w0 = e.omega0;
    for (int u = 1; u <= e.order; ++u) {
        const cplx d = detail::pump_coefficient(e.cp, mod.index, mod.phase(u), Direction::down);
        const cplx ec = detail::pump_coefficient(e.cp, mod.index, mod.phase(u), Direction::up);
        for (int k = -K; k <= K; ++k) {
            const auto row = sys.index(u, k);
            double bracket = 0.0;
            if (mode == Mode::rigorous) {
                bracket = omega + k * wm;
                a(row, row) = resonator_admittance(e, u, bracket);
            } else {
                bracket = w0 + k * wm;
                a(row, row) = resonator_admittance(e, u, omega, harmonic_susceptance(k, mod, e));
            }
            const cplx j_bracket(0.0, bracket);
            if (k < K) a(row, sys.index(u, k + 1)) = j_bracket * d;
            if (k > -K) a(row, sys.index(u, k - 1)) = j_bracket * ec;
        }
    }
    return sys;
}

}  // namespace nrf
