#pragma once

// Published designs shared by the unit and acceptance tests.

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "nrf/harmonic.hpp"
#include "nrf/network.hpp"
#include "nrf/synthesis.hpp"

namespace fixtures {

inline double deg(double d) { return d * std::numbers::pi / 180.0; }

inline nrf::CouplingMatrix m3() {
    Eigen::MatrixXd m(5, 5);
    m << 0, 0.8894, 0, 0, 0,
         0.8894, 0, 0.8294, 0, 0,
         0, 0.8294, 0, 0.8294, 0,
         0, 0, 0.8294, 0, 0.8894,
         0, 0, 0, 0.8894, 0;
    return nrf::load_matrix(m);
}

inline nrf::CouplingMatrix m4() {
    Eigen::MatrixXd m(6, 6);
    m << 0, 0.997, 0, 0, 0, 0,
         0.997, 0, 0.873, 0, 0, 0,
         0, 0.873, 0, 0.68, 0, 0,
         0, 0, 0.68, 0, 0.873, 0,
         0, 0, 0, 0.873, 0, 0.997,
         0, 0, 0, 0, 0.997, 0;
    return nrf::load_matrix(m);
}

inline nrf::BandpassSpec spec3() { return {975e6, 0.048}; }
inline nrf::BandpassSpec spec4() { return {890e6, 0.065}; }

inline nrf::ModulationSpec mod3(int harmonics = 7) {
    return nrf::ModulationSpec::progressive(3, 22.8e6, 0.050, deg(35), harmonics);
}

inline nrf::ModulationSpec mod4(int harmonics = 9, double fm_hz = 19e6) {
    return nrf::ModulationSpec::progressive(4, fm_hz, 0.076, deg(48), harmonics);
}

}  // namespace fixtures
