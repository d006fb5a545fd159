#include <catch_amalgamated.hpp>

#include <cmath>

#include "fixtures.hpp"
#include "nrf/solve.hpp"
#include "nrf/synthesis.hpp"

using namespace nrf;
using Catch::Matchers::WithinAbs;

namespace {

// Chebyshev polynomial of the first kind, valid for any real x.
double chebyshev_t(int n, double x) {
    if (std::abs(x) <= 1.0) return std::cos(n * std::acos(x));
    const double s = x > 0 ? 1.0 : (n % 2 ? -1.0 : 1.0);
    return s * std::cosh(n * std::acosh(std::abs(x)));
}

// Lowpass variable of the narrowband transform used by the resonators.
double lowpass_omega(double f, const BandpassSpec& spec) {
    return (f / spec.f0_hz - spec.f0_hz / f) / spec.fractional_bandwidth;
}

double passband_edge(const BandpassSpec& spec, double sign) {
    const double fb = spec.fractional_bandwidth;
    return spec.f0_hz * (sign * fb / 2.0 + std::sqrt(1.0 + fb * fb / 4.0));
}

SParamSet passband_sweep(const CouplingMatrix& m, const BandpassSpec& spec, int points = 2001) {
    const SweepGrid grid{passband_edge(spec, -1.0), passband_edge(spec, +1.0), points};
    return sweep(m, spec, std::nullopt, grid, Mode::cm_approx);
}

double max_s11_db(const SParamSet& s) {
    double worst = -1e300;
    for (const auto& p : s.points) worst = std::max(worst, to_db(p.s11()));
    return worst;
}

}  // namespace

TEST_CASE("order-3 RL 13 dB synthesis reproduces the published matrix", "[synthesis]") {
    const auto m = chebyshev_inline(3, 13.0);
    REQUIRE(m.order() == 3);
    CHECK_THAT(m(0, 1), WithinAbs(0.8894, 1e-3));
    CHECK_THAT(m(3, 4), WithinAbs(0.8894, 1e-3));
    CHECK_THAT(m(1, 2), WithinAbs(0.8294, 1e-3));
    CHECK_THAT(m(2, 3), WithinAbs(0.8294, 1e-3));
}

TEST_CASE("order-4 RL 18.5 dB synthesis reproduces the published matrix", "[synthesis]") {
    const auto m = chebyshev_inline(4, 18.5);
    CHECK_THAT(m(0, 1), WithinAbs(0.997, 1e-3));
    CHECK_THAT(m(4, 5), WithinAbs(0.997, 1e-3));
    CHECK_THAT(m(1, 2), WithinAbs(0.873, 1e-3));
    CHECK_THAT(m(3, 4), WithinAbs(0.873, 1e-3));
    CHECK_THAT(m(2, 3), WithinAbs(0.68, 1e-3));
}

TEST_CASE("order-2 RL 20 dB synthesis is equiripple at -20 dB", "[synthesis]") {
    const auto m = chebyshev_inline(2, 20.0);
    CHECK(m.is_mirror_symmetric(1e-15));
    CHECK(m(0, 0) == 0.0);
    CHECK(m(1, 1) == 0.0);
    const BandpassSpec spec{1e9, 0.05};
    const auto s = passband_sweep(m, spec);
    CHECK_THAT(max_s11_db(s), WithinAbs(-20.0, 0.2));
}

TEST_CASE("swept response follows the analytic Chebyshev transfer function", "[synthesis][property]") {
    const BandpassSpec spec{2e9, 0.03};
    for (int n = 2; n <= 7; ++n) {
        for (double rl : {10.0, 15.0, 20.0, 26.0}) {
            CAPTURE(n, rl);
            const double eps = ripple_factor_from_return_loss(rl);
            const SweepGrid grid{spec.f0_hz * 0.94, spec.f0_hz * 1.06, 301};
            const auto s = sweep(chebyshev_inline(n, rl), spec, std::nullopt, grid, Mode::cm_approx);
            for (const auto& p : s.points) {
                const double t = chebyshev_t(n, lowpass_omega(p.f_hz, spec));
                const double expected = 1.0 / (1.0 + eps * eps * t * t);
                REQUIRE_THAT(std::norm(p.s21()), WithinAbs(expected, 1e-9));
            }
        }
    }
}

TEST_CASE("in-band return loss equals the design value", "[synthesis][property]") {
    const BandpassSpec spec{1e9, 0.05};
    for (int n = 2; n <= 8; ++n) {
        for (double rl : {10.0, 13.0, 18.5, 20.0, 25.0}) {
            CAPTURE(n, rl);
            CHECK_THAT(max_s11_db(passband_sweep(chebyshev_inline(n, rl), spec)), WithinAbs(-rl, 0.2));
        }
    }
}

TEST_CASE("synthesized matrices are mirror-symmetric and in-line", "[synthesis][property]") {
    for (int n = 2; n <= 10; ++n) {
        for (double rl : {5.0, 11.0, 17.3, 30.0}) {
            const auto m = chebyshev_inline(n, rl);
            CAPTURE(n, rl);
            CHECK(m.size() == n + 2);
            CHECK(m.is_inline_topology());
            CHECK(m(0, n + 1) == 0.0);
            for (int i = 0; i < m.size(); ++i) {
                CHECK(m(i, i) == 0.0);
                for (int j = 0; j < m.size(); ++j) {
                    CHECK(m(i, j) == m(j, i));
                    CHECK_THAT(m(i, j), WithinAbs(m(n + 1 - i, n + 1 - j), 1e-12));
                }
            }
        }
    }
}

TEST_CASE("g-values follow the classical recursion", "[synthesis]") {
    // 0.5 dB ripple (RL 9.636 dB), order 3: g = 1.5963, 1.0967, 1.5963, 1.0
    const double rl = -10.0 * std::log10(1.0 - std::pow(10.0, -0.05));
    const auto g = chebyshev_g_values(3, rl);
    REQUIRE(g.size() == 5);
    CHECK_THAT(g[1], WithinAbs(1.5963, 1e-4));
    CHECK_THAT(g[2], WithinAbs(1.0967, 1e-4));
    CHECK_THAT(g[3], WithinAbs(1.5963, 1e-4));
    CHECK_THAT(g[4], WithinAbs(1.0, 1e-12));
    // even order: 0.5 dB, N = 4 -> g5 = 1.9841
    const auto g4 = chebyshev_g_values(4, rl);
    CHECK_THAT(g4[1], WithinAbs(1.6703, 1e-4));
    CHECK_THAT(g4[2], WithinAbs(1.1926, 1e-4));
    CHECK_THAT(g4[3], WithinAbs(2.3661, 1e-4));
    CHECK_THAT(g4[4], WithinAbs(0.8419, 1e-4));
    CHECK_THAT(g4[5], WithinAbs(1.9841, 1e-4));
}

TEST_CASE("chebyshev_inline rejects bad arguments", "[synthesis]") {
    CHECK_THROWS_AS(chebyshev_inline(1, 20.0), ConfigError);
    CHECK_THROWS_AS(chebyshev_inline(0, 20.0), ConfigError);
    CHECK_THROWS_AS(chebyshev_inline(3, 0.0), ConfigError);
    CHECK_THROWS_AS(chebyshev_inline(3, -3.0), ConfigError);
    CHECK_THROWS_AS(chebyshev_inline(3, std::nan("")), ConfigError);
}

TEST_CASE("load_matrix accepts the published order-3 matrix verbatim", "[synthesis]") {
    const auto m = fixtures::m3();
    CHECK(m.order() == 3);
    CHECK(m(0, 1) == 0.8894);
    CHECK(m(2, 3) == 0.8294);
    CHECK(m.is_inline_topology());
}

TEST_CASE("load_matrix rejects invalid shapes and asymmetry", "[synthesis]") {
    Eigen::MatrixXd asym = fixtures::m3().entries();
    asym(0, 1) += 1e-6;
    CHECK_THROWS_AS(load_matrix(asym), ConfigError);

    Eigen::MatrixXd tiny = Eigen::MatrixXd::Zero(3, 3);
    tiny(0, 1) = tiny(1, 0) = 1.0;
    tiny(1, 2) = tiny(2, 1) = 1.0;
    CHECK_THROWS_AS(load_matrix(tiny), ConfigError);

    CHECK_THROWS_AS(load_matrix(Eigen::MatrixXd::Zero(4, 5)), ConfigError);

    Eigen::MatrixXd nonfinite = fixtures::m3().entries();
    nonfinite(1, 1) = std::nan("");
    CHECK_THROWS_AS(load_matrix(nonfinite), ConfigError);

    Eigen::MatrixXd within = fixtures::m3().entries();
    within(0, 1) += 1e-13;
    const auto ok = load_matrix(within);
    CHECK(ok(0, 1) == ok(1, 0));
}

TEST_CASE("node labels round-trip", "[synthesis]") {
    for (int n = 1; n <= 6; ++n)
        for (int i = 0; i <= n + 1; ++i) CHECK(parse_node(node_label(i, n), n) == i);
    CHECK(parse_node("S", 3) == 0);
    CHECK(parse_node("L", 3) == 4);
    CHECK_THROWS_AS(parse_node("5", 3), ConfigError);
    CHECK_THROWS_AS(parse_node("x", 3), ConfigError);
    CHECK_THROWS_AS(parse_node("0", 3), ConfigError);
}
