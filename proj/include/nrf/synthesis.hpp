#pragma once

// Unmodulated (N+2) coupling matrices: direct entry and all-pole Chebyshev synthesis.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nrf/errors.hpp"

namespace nrf {

/// Normalized lowpass coupling matrix with port rows. Row 0 is P1, row N+1 is P2.
class CouplingMatrix {
public:
    /// Wraps a symmetric square matrix of size >= 3 (one resonator plus two ports).
    static CouplingMatrix from_entries(Eigen::MatrixXd entries, double symmetry_tol = 1e-12) {
        if (entries.rows() != entries.cols()) {
            throw ConfigError("coupling matrix must be square, got " + std::to_string(entries.rows()) +
                              "x" + std::to_string(entries.cols()));
        }
        if (entries.rows() < 3) {
            throw ConfigError("coupling matrix needs at least one resonator and two ports");
        }
        for (Eigen::Index i = 0; i < entries.rows(); ++i) {
            for (Eigen::Index j = i; j < entries.cols(); ++j) {
                if (!std::isfinite(entries(i, j)) || !std::isfinite(entries(j, i))) {
                    throw ConfigError("coupling matrix has a non-finite entry at (" + std::to_string(i) +
                                      "," + std::to_string(j) + ")");
                }
                if (std::abs(entries(i, j) - entries(j, i)) > symmetry_tol) {
                    throw ConfigError("coupling matrix is not symmetric at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
                }
            }
        }
        // Symmetrize exactly so downstream assembly sees M == M^T bit for bit.
        Eigen::MatrixXd sym = 0.5 * (entries + entries.transpose());
        return CouplingMatrix(std::move(sym));
    }

    int order() const noexcept { return static_cast<int>(m_.rows()) - 2; }
    int size() const noexcept { return static_cast<int>(m_.rows()); }
    int port1() const noexcept { return 0; }
    int port2() const noexcept { return size() - 1; }

    double operator()(int i, int j) const { return m_(i, j); }
    const Eigen::MatrixXd& entries() const noexcept { return m_; }

    /// True when M[i][j] == M[N+1-i][N+1-j] within tol.
    bool is_mirror_symmetric(double tol = 1e-12) const {
        const int n = size();
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (std::abs(m_(i, j) - m_(n - 1 - i, n - 1 - j)) > tol) return false;
        return true;
    }

    /// Main-line entries (u, u+1) for u = 0..N.
    static bool is_inline_pair(int i, int j) noexcept { return std::abs(i - j) == 1; }

    /// True when every nonzero off-diagonal entry is a main-line entry.
    bool is_inline_topology() const {
        for (int i = 0; i < size(); ++i)
            for (int j = i + 2; j < size(); ++j)
                if (m_(i, j) != 0.0) return false;
        return true;
    }

    friend bool operator==(const CouplingMatrix& a, const CouplingMatrix& b) {
        return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
    }

private:
    explicit CouplingMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {}
    Eigen::MatrixXd m_;
};

/// "P1", "1".."N", "P2".
inline std::string node_label(int node, int order) {
    if (node == 0) return "P1";
    if (node == order + 1) return "P2";
    return std::to_string(node);
}

/// Inverse of node_label; accepts "P1"/"S" and "P2"/"L" for the ports.
inline int parse_node(const std::string& text, int order) {
    if (text == "P1" || text == "p1" || text == "S" || text == "s") return 0;
    if (text == "P2" || text == "p2" || text == "L" || text == "l") return order + 1;
    std::size_t used = 0;
    int value = 0;
    try {
        value = std::stoi(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("invalid node name '" + text + "'");
    }
    if (used != text.size() || value < 1 || value > order) {
        throw ConfigError("node '" + text + "' outside 1.." + std::to_string(order));
    }
    return value;
}

/// Validated direct entry: square, symmetric within 1e-12, size >= 4.
inline CouplingMatrix load_matrix(const Eigen::MatrixXd& entries) {
    if (entries.rows() != entries.cols()) {
        throw ConfigError("coupling matrix must be square, got " + std::to_string(entries.rows()) + "x" +
                          std::to_string(entries.cols()));
    }
    if (entries.rows() < 4) {
        throw ConfigError("coupling matrix must be at least 4x4 (two ports plus two resonators)");
    }
    return CouplingMatrix::from_entries(entries, 1e-12);
}

/// Ripple factor for an equiripple return loss: eps = 1/sqrt(10^(RL/10) - 1).
inline double ripple_factor_from_return_loss(double rl_db) {
    return 1.0 / std::sqrt(std::pow(10.0, rl_db / 10.0) - 1.0);
}

/// Chebyshev lowpass g-values g_0..g_{N+1} for the given return loss.
inline std::vector<double> chebyshev_g_values(int order, double rl_db) {
    if (order < 1) throw ConfigError("filter order must be positive");
    if (!(rl_db > 0.0) || !std::isfinite(rl_db)) throw ConfigError("return loss must be positive");

    const double eps = ripple_factor_from_return_loss(rl_db);
    const double ripple_db = 10.0 * std::log10(1.0 + eps * eps);
    const double np_per_db = 40.0 / std::numbers::ln10;  // 17.37
    const double beta = std::log(1.0 / std::tanh(ripple_db / np_per_db));
    const double gamma = std::sinh(beta / (2.0 * order));
    const double pi = std::numbers::pi;

    std::vector<double> a(order + 1), b(order + 1);
    for (int k = 1; k <= order; ++k) {
        a[k] = std::sin((2.0 * k - 1.0) * pi / (2.0 * order));
        const double s = std::sin(k * pi / order);
        b[k] = gamma * gamma + s * s;
    }

    std::vector<double> g(order + 2);
    g[0] = 1.0;
    g[1] = 2.0 * a[1] / gamma;
    for (int k = 2; k <= order; ++k) g[k] = 4.0 * a[k - 1] * a[k] / (b[k - 1] * g[k - 1]);
    if (order % 2 == 1) {
        g[order + 1] = 1.0;
    } else {
        const double c = 1.0 / std::tanh(beta / 4.0);
        g[order + 1] = c * c;
    }
    return g;
}

/// Synchronously tuned in-line Chebyshev coupling matrix, M_{i,i+1} = 1/sqrt(g_i g_{i+1}).
inline CouplingMatrix chebyshev_inline(int order, double rl_db) {
    if (order < 2) throw ConfigError("chebyshev_inline requires order >= 2");
    if (!(rl_db > 0.0) || !std::isfinite(rl_db)) throw ConfigError("return loss must be positive");
    const auto g = chebyshev_g_values(order, rl_db);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(order + 2, order + 2);
    for (int i = 0; i <= order; ++i) {
        const double c = 1.0 / std::sqrt(g[i] * g[i + 1]);
        m(i, i + 1) = c;
        m(i + 1, i) = c;
    }
    return CouplingMatrix::from_entries(std::move(m));
}

}  // namespace nrf
