#pragma once

// Time-domain cross-check of the harmonic-balance solution.
//
// The in-line network is integrated directly: resonators carry charge q_u on C_u(t) and current
// in L_p, ports are algebraic (G_P only), and each ideal jJ inverter is replaced by a gyrator.
// Scaling node n by j^n turns jJ between nodes m and m+1 into a real antisymmetric pair
// (-J above, +J below the diagonal), which is memoryless and leaves every |S| unchanged.
// Only magnitudes are therefore comparable with the frequency-domain result.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "nrf/errors.hpp"
#include "nrf/harmonic.hpp"
#include "nrf/network.hpp"
#include "nrf/solve.hpp"

namespace nrf {

struct TransientConfig {
    double source_hz = 0.0;
    Port excite = Port::p1;
    int harmonics = 5;                 // extract k = -K..K
    int samples_per_period = 128;      // at the highest tracked frequency
    int tracked_harmonics = 0;         // highest |k| resolved by the step; 0 = K + 2
    double max_snap_relative = 1e-6;   // allowed relative shift of the source frequency
    int max_beat_multiple = 4000;
    int min_windows = 3;               // windows integrated before steady state is tested
    int max_windows = 80;
    double steady_tolerance = 1e-6;    // max change of any S between consecutive windows
};

struct TransientResult {
    double requested_hz = 0.0;
    double source_hz = 0.0;     // snapped so that source and pump share a common period
    double snap_error_hz = 0.0;
    double window_s = 0.0;
    double time_step_s = 0.0;
    int windows = 0;
    int harmonics = 1;
    Port excite = Port::p1;
    std::vector<double> reflection;    // |S_aa^(k)|, k = -K..K
    std::vector<double> transmission;  // |S_ba^(k)|

    int half_width() const noexcept { return (harmonics - 1) / 2; }
    double reflected(int k) const { return reflection.at(static_cast<std::size_t>(k + half_width())); }
    double transmitted(int k) const { return transmission.at(static_cast<std::size_t>(k + half_width())); }
};

struct SnappedFrequency {
    double source_hz = 0.0;
    double window_s = 0.0;
};

/// Finds f' = n * fb, fm = m * fb with |f - f'| <= rel * f and the smallest such m.
inline SnappedFrequency snap_to_common_period(double f_hz, double fm_hz, double rel, int max_multiple) {
    SnappedFrequency best{f_hz, 0.0};
    double best_err = std::numeric_limits<double>::infinity();
    for (int m = 1; m <= max_multiple; ++m) {
        const double fb = fm_hz / m;
        const double n = std::round(f_hz / fb);
        if (n < 1.0) continue;
        const double err = std::abs(f_hz - n * fb);
        if (err < best_err) {
            best_err = err;
            best = {n * fb, 1.0 / fb};
        }
        if (err <= rel * f_hz) break;
    }
    return best;
}

namespace detail {

class LadderIntegrator {
public:
    LadderIntegrator(const BandpassElements& e, const ModulationSpec& mod, double source_hz, Port excite)
        : e_(e), mod_(mod), n_(e.order), w_(2.0 * std::numbers::pi * source_hz),
          excite_node_(port_node(excite, e.order)) {
        up_.resize(static_cast<std::size_t>(n_ + 1));
        for (int m = 0; m <= n_; ++m) up_[static_cast<std::size_t>(m)] = e.inverters(m, m + 1);
    }

    int state_size() const noexcept { return 2 * n_; }

    // Node voltages (transformed coordinates) for state y at time t.
    void voltages(double t, const std::vector<double>& y, std::vector<double>& v) const {
        v.assign(static_cast<std::size_t>(n_ + 2), 0.0);
        for (int u = 1; u <= n_; ++u) v[idx(u)] = y[idx(u - 1)] / capacitance(u, t);
        const double src = std::cos(w_ * t);
        const double i0 = excite_node_ == 0 ? src : 0.0;
        const double il = excite_node_ == n_ + 1 ? src : 0.0;
        v[0] = (i0 + up_[0] * v[1]) / e_.port1_conductance;
        v[idx(n_ + 1)] = (il - up_[idx(n_)] * v[idx(n_)]) / e_.port2_conductance;
    }

    void derivative(double t, const std::vector<double>& y, std::vector<double>& dy) {
        voltages(t, y, scratch_);
        dy.resize(y.size());
        for (int u = 1; u <= n_; ++u) {
            const double vu = scratch_[idx(u)];
            const double il = y[idx(n_ + u - 1)];
            const double inject = up_[idx(u)] * scratch_[idx(u + 1)] - up_[idx(u - 1)] * scratch_[idx(u - 1)];
            dy[idx(u - 1)] = inject - il - e_.loss_conductances(u) * vu;
            dy[idx(n_ + u - 1)] = vu / e_.lp;
        }
    }

    void rk4_step(double t, double dt, std::vector<double>& y) {
        const std::size_t s = y.size();
        k1_.resize(s), k2_.resize(s), k3_.resize(s), k4_.resize(s), tmp_.resize(s);
        derivative(t, y, k1_);
        for (std::size_t i = 0; i < s; ++i) tmp_[i] = y[i] + 0.5 * dt * k1_[i];
        derivative(t + 0.5 * dt, tmp_, k2_);
        for (std::size_t i = 0; i < s; ++i) tmp_[i] = y[i] + 0.5 * dt * k2_[i];
        derivative(t + 0.5 * dt, tmp_, k3_);
        for (std::size_t i = 0; i < s; ++i) tmp_[i] = y[i] + dt * k3_[i];
        derivative(t + dt, tmp_, k4_);
        for (std::size_t i = 0; i < s; ++i) y[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }

private:
    static std::size_t idx(int i) { return static_cast<std::size_t>(i); }

    double capacitance(int u, double t) const {
        return e_.cp * (1.0 + mod_.index * std::cos(mod_.omega_m() * t + mod_.phase(u)));
    }

    const BandpassElements& e_;
    const ModulationSpec& mod_;
    int n_;
    double w_;
    int excite_node_;
    std::vector<double> up_;  // J_{m,m+1}
    std::vector<double> scratch_, k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace detail

/// Integrates to periodic steady state and projects the port voltages onto w + k wm.
inline TransientResult transient_sparams(const BandpassElements& e, const ModulationSpec& mod,
                                         const TransientConfig& cfg) {
    const double f_req = cfg.source_hz;
    if (e.order < 1 || e.order > 4) throw ConfigError("transient oracle supports 1 <= N <= 4");
    if (!(f_req > 0.0)) throw ConfigError("transient source frequency must be positive");
    if (cfg.harmonics < 1 || cfg.harmonics % 2 == 0) throw ConfigError("transient harmonics must be odd");
    if (cfg.samples_per_period < 8) throw ConfigError("samples_per_period must be at least 8");
    mod.validate(e.order);
    for (int u = 1; u <= e.order; ++u)
        if (e.susceptances(u) != 0.0)
            throw ConfigError("transient oracle needs synchronously tuned resonators (B_u = 0)");
    for (int i = 0; i < e.size(); ++i)
        for (int j = i + 2; j < e.size(); ++j)
            if (e.inverters(i, j) != 0.0) throw ConfigError("transient oracle supports in-line topologies only");

    const bool pumped = mod.index > 0.0;
    const double min_window = 4.0 / (e.fractional_bandwidth * e.omega0 / (2.0 * std::numbers::pi));
    SnappedFrequency snap;
    if (pumped) {
        snap = snap_to_common_period(f_req, mod.fm_hz, cfg.max_snap_relative, cfg.max_beat_multiple);
    } else {
        snap = {f_req, 1.0 / f_req};
    }
    const double period = snap.window_s;
    const double window = period * std::max(1.0, std::ceil(min_window / period));

    const int K = (cfg.harmonics - 1) / 2;
    const int tracked = cfg.tracked_harmonics > 0 ? cfg.tracked_harmonics : K + 2;
    const double f_hi = snap.source_hz + (pumped ? tracked * mod.fm_hz : 0.0);
    const auto steps = static_cast<long>(std::ceil(window * f_hi * cfg.samples_per_period));
    const double dt = window / static_cast<double>(steps);

    TransientResult r;
    r.requested_hz = f_req;
    r.source_hz = snap.source_hz;
    r.snap_error_hz = snap.source_hz - f_req;
    r.window_s = window;
    r.time_step_s = dt;
    r.harmonics = cfg.harmonics;
    r.excite = cfg.excite;

    detail::LadderIntegrator ladder(e, mod, snap.source_hz, cfg.excite);
    std::vector<double> y(static_cast<std::size_t>(ladder.state_size()), 0.0), v;
    const int a_node = port_node(cfg.excite, e.order);
    const int b_node = port_node(other(cfg.excite), e.order);
    const double ga = e.port_conductance(a_node);
    const double gb = e.port_conductance(b_node);
    const double w = 2.0 * std::numbers::pi * snap.source_hz;
    const double wm = mod.omega_m();
    const auto nk = static_cast<std::size_t>(cfg.harmonics);

    std::vector<cplx> prev_refl(nk), prev_trans(nk), refl(nk), trans(nk);
    std::vector<cplx> rot(nk), step_rot(nk);
    bool have_prev = false;
    double t = 0.0;
    for (int win = 0; win < cfg.max_windows; ++win) {
        const double t0 = static_cast<double>(win) * window;
        for (int k = -K; k <= K; ++k) {
            const double wk = w + k * (pumped ? wm : 0.0);
            rot[static_cast<std::size_t>(k + K)] = std::polar(1.0, -wk * t0);
            step_rot[static_cast<std::size_t>(k + K)] = std::polar(1.0, -wk * dt);
        }
        std::vector<cplx> acc_a(nk), acc_b(nk);
        for (long i = 0; i < steps; ++i) {
            t = t0 + static_cast<double>(i) * dt;
            ladder.voltages(t, y, v);
            for (std::size_t k = 0; k < nk; ++k) {
                acc_a[k] += v[static_cast<std::size_t>(a_node)] * rot[k];
                acc_b[k] += v[static_cast<std::size_t>(b_node)] * rot[k];
                rot[k] *= step_rot[k];
            }
            ladder.rk4_step(t, dt, y);
        }
        const double norm = 2.0 / static_cast<double>(steps);
        for (std::size_t k = 0; k < nk; ++k) {
            const cplx xa = norm * acc_a[k];
            const cplx xb = norm * acc_b[k];
            refl[k] = 2.0 * ga * xa - (static_cast<int>(k) == K ? 1.0 : 0.0);
            trans[k] = 2.0 * std::sqrt(ga * gb) * xb;
        }
        r.windows = win + 1;
        if (have_prev && win + 1 >= cfg.min_windows) {
            double change = 0.0;
            for (std::size_t k = 0; k < nk; ++k) {
                change = std::max(change, std::abs(refl[k] - prev_refl[k]));
                change = std::max(change, std::abs(trans[k] - prev_trans[k]));
            }
            if (change <= cfg.steady_tolerance) {
                for (std::size_t k = 0; k < nk; ++k) {
                    r.reflection.push_back(std::abs(refl[k]));
                    r.transmission.push_back(std::abs(trans[k]));
                }
                return r;
            }
        }
        prev_refl = refl;
        prev_trans = trans;
        have_prev = true;
    }
    throw NumericError("transient did not reach periodic steady state in " + std::to_string(cfg.max_windows) +
                           " windows",
                       f_req, "oracle");
}

}  // namespace nrf
