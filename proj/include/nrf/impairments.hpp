#pragma once

// Resonator loss (unloaded Q) and parasitic cross couplings.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nrf/errors.hpp"
#include "nrf/network.hpp"
#include "nrf/synthesis.hpp"

namespace nrf {

struct ExtraCoupling {
    int i = 0;
    int j = 0;
    double value = 0.0;  // normalized

    friend bool operator==(const ExtraCoupling&, const ExtraCoupling&) = default;
};

struct ImpairmentSpec {
    std::optional<double> unloaded_q;
    std::vector<ExtraCoupling> extra_couplings;

    bool empty() const noexcept { return !unloaded_q && extra_couplings.empty(); }

    friend bool operator==(const ImpairmentSpec&, const ImpairmentSpec&) = default;
};

/// Adds G = w0 Cp / Qu in parallel with every resonator. Qu = +inf leaves the network lossless.
inline BandpassElements apply_loss(BandpassElements e, double unloaded_q) {
    if (!(unloaded_q > 0.0)) throw ConfigError("unloaded Q must be positive", 0, "qu");
    const double g = std::isinf(unloaded_q) ? 0.0 : e.omega0 * e.cp / unloaded_q;
    for (int u = 1; u <= e.order; ++u) e.loss_conductances(u) = g;
    return e;
}

/// Inserts symmetric cross couplings. Main-line entries and diagonals cannot be touched here.
inline CouplingMatrix apply_parasitics(const CouplingMatrix& m, const std::vector<ExtraCoupling>& extra) {
    if (extra.empty()) return m;
    Eigen::MatrixXd entries = m.entries();
    const int n = m.size();
    for (const auto& c : extra) {
        if (c.i < 0 || c.j < 0 || c.i >= n || c.j >= n)
            throw ConfigError("parasitic coupling (" + std::to_string(c.i) + "," + std::to_string(c.j) +
                              ") outside the matrix");
        if (c.i == c.j) throw ConfigError("parasitic coupling must join two distinct nodes");
        if (CouplingMatrix::is_inline_pair(c.i, c.j))
            throw ConfigError("parasitic coupling (" + node_label(c.i, m.order()) + "," +
                              node_label(c.j, m.order()) + ") would overwrite a main-line entry");
        if (!std::isfinite(c.value)) throw ConfigError("parasitic coupling value is not finite");
        entries(c.i, c.j) = c.value;
        entries(c.j, c.i) = c.value;
    }
    return CouplingMatrix::from_entries(std::move(entries));
}

}  // namespace nrf
