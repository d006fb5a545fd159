#pragma once

// Lowpass-to-bandpass scaling of a coupling matrix and the unmodulated nodal system.

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "nrf/errors.hpp"
#include "nrf/synthesis.hpp"

namespace nrf {

using cplx = std::complex<double>;

struct BandpassSpec {
    double f0_hz = 0.0;
    double fractional_bandwidth = 0.0;
    double lowpass_capacitance = 1.0;  // F
    double port1_conductance = 1.0;    // S
    double port2_conductance = 1.0;    // S

    double omega0() const noexcept { return 2.0 * std::numbers::pi * f0_hz; }
    double bandwidth_hz() const noexcept { return fractional_bandwidth * f0_hz; }

    void validate() const {
        if (!(f0_hz > 0.0) || !std::isfinite(f0_hz)) throw ConfigError("f0 must be positive", 0, "f0");
        if (!(fractional_bandwidth > 0.0 && fractional_bandwidth < 1.0))
            throw ConfigError("fractional bandwidth must lie in (0, 1)", 0, "fractional_bandwidth");
        if (!(lowpass_capacitance > 0.0) || !std::isfinite(lowpass_capacitance))
            throw ConfigError("lowpass capacitance must be positive", 0, "lowpass_capacitance");
        if (!(port1_conductance > 0.0) || !std::isfinite(port1_conductance))
            throw ConfigError("port 1 conductance must be positive", 0, "port1_conductance");
        if (!(port2_conductance > 0.0) || !std::isfinite(port2_conductance))
            throw ConfigError("port 2 conductance must be positive", 0, "port2_conductance");
    }

    friend bool operator==(const BandpassSpec&, const BandpassSpec&) = default;
};

/// Physical element values of the bandpass network. Vectors are indexed by node (0 = P1, N+1 = P2).
struct BandpassElements {
    int order = 0;
    double omega0 = 0.0;
    double fractional_bandwidth = 0.0;
    double lowpass_capacitance = 1.0;
    double port1_conductance = 1.0;
    double port2_conductance = 1.0;
    double cp = 0.0;                   // resonator capacitance, F
    double lp = 0.0;                   // resonator inductance, H
    Eigen::MatrixXd inverters;         // J, S; symmetric, zero diagonal
    Eigen::VectorXd susceptances;      // B_u, S; zero at the ports
    Eigen::VectorXd loss_conductances; // parallel loss per resonator, S; zero at the ports

    int size() const noexcept { return order + 2; }
    double port_conductance(int node) const noexcept {
        return node == 0 ? port1_conductance : port2_conductance;
    }
    bool is_port(int node) const noexcept { return node == 0 || node == order + 1; }
};

/// J_ij = M_ij * s_i * s_j with s = sqrt(G_P) at ports and sqrt(C) at resonators, which gives
/// J_P1,1 = M sqrt(G_P1 C), J_u,u+1 = M C, J_N,P2 = M sqrt(C G_P2) and B_u = M_uu C.
inline BandpassElements scale(const CouplingMatrix& m, const BandpassSpec& spec) {
    spec.validate();
    const int n = m.size();
    const int order = m.order();
    const double c = spec.lowpass_capacitance;
    const double w0 = spec.omega0();

    Eigen::VectorXd s(n);
    for (int i = 0; i < n; ++i) s(i) = std::sqrt(c);
    s(0) = std::sqrt(spec.port1_conductance);
    s(n - 1) = std::sqrt(spec.port2_conductance);

    BandpassElements e;
    e.order = order;
    e.omega0 = w0;
    e.fractional_bandwidth = spec.fractional_bandwidth;
    e.lowpass_capacitance = c;
    e.port1_conductance = spec.port1_conductance;
    e.port2_conductance = spec.port2_conductance;
    e.cp = c / (w0 * spec.fractional_bandwidth);
    e.lp = spec.fractional_bandwidth / (w0 * c);
    e.inverters = Eigen::MatrixXd::Zero(n, n);
    e.susceptances = Eigen::VectorXd::Zero(n);
    e.loss_conductances = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) e.inverters(i, j) = m(i, j) * s(i) * s(j);
        }
    }
    for (int u = 1; u <= order; ++u) e.susceptances(u) = m(u, u) * c;
    if (m(0, 0) != 0.0 || m(n - 1, n - 1) != 0.0) {
        throw ConfigError("port diagonal entries of the coupling matrix must be zero");
    }
    return e;
}

/// Admittance of resonator u at angular frequency omega with extra susceptance `extra_b`.
inline cplx resonator_admittance(const BandpassElements& e, int u, double omega, double extra_b = 0.0) {
    const double b = omega * e.cp - 1.0 / (omega * e.lp) + (e.susceptances(u) + extra_b);
    return {e.loss_conductances(u), b};
}

/// G + Y_inv + Y_p for the unmodulated bandpass network.
inline Eigen::MatrixXcd assemble_static(const BandpassElements& e, double omega) {
    if (!(omega > 0.0) || !std::isfinite(omega)) {
        throw NumericError("static assembly requires omega > 0", omega / (2.0 * std::numbers::pi), "network");
    }
    const int n = e.size();
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && e.inverters(i, j) != 0.0) y(i, j) = cplx(0.0, e.inverters(i, j));
        }
    }
    y(0, 0) = e.port1_conductance;
    y(n - 1, n - 1) = e.port2_conductance;
    for (int u = 1; u <= e.order; ++u) y(u, u) = resonator_admittance(e, u, omega);
    return y;
}

}  // namespace nrf
