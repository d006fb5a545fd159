#include <catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "nrf/design.hpp"

using namespace nrf;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const std::string minimal = R"([prototype]
order = 3
return_loss_db = 13

[bandpass]
f0 = 975 MHz
fractional_bandwidth = 0.048
)";

std::string design_path(const std::string& name) { return std::string(NRF_DESIGN_DIR) + "/" + name; }

// Parses `text` and returns the error, failing the test if parsing succeeds.
ConfigError parse_error(const std::string& text) {
    try {
        (void)parse_design_string(text);
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("expected ConfigError");
    return ConfigError("unreachable");
}

}  // namespace

TEST_CASE("every bundled design parses and echoes to an equal design", "[design]") {
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(NRF_DESIGN_DIR)) {
        if (entry.path().extension() != ".design") continue;
        ++count;
        CAPTURE(entry.path().string());
        const auto d = load_design(entry.path().string());
        std::ostringstream echo;
        write_design(echo, d);
        const auto again = parse_design_string(echo.str());
        CHECK(again == d);
        std::ostringstream echo2;
        write_design(echo2, again);
        CHECK(echo2.str() == echo.str());
    }
    CHECK(count >= 6);
}

TEST_CASE("order-3 design file carries the published operating point", "[design]") {
    const auto d = load_design(design_path("order3.design"));
    CHECK(d.order == 3);
    CHECK(d.matrix() == fixtures::m3());
    CHECK(d.bandpass.f0_hz == 975e6);
    CHECK(d.bandpass.fractional_bandwidth == 0.048);
    REQUIRE(d.modulation);
    CHECK(d.modulation->fm_hz == 22.8e6);
    CHECK(d.modulation->index == 0.05);
    CHECK_THAT(d.modulation->phase(3) - d.modulation->phase(1), WithinAbs(fixtures::deg(70), 1e-15));
    CHECK(d.mode == Mode::cm_approx);
    CHECK(d.optimize.has_value());
}

TEST_CASE("measured designs carry loss and parasitics", "[design]") {
    const auto d3 = load_design(design_path("order3_measured.design"));
    CHECK(d3.impairments.unloaded_q == 114.0);
    CHECK(d3.impairments.extra_couplings.size() == 3);
    CHECK(d3.bandpass.port1_conductance == 1.0 / 50.0);
    CHECK(d3.mode == Mode::rigorous);
    CHECK(d3.grid == (SweepGrid{850e6, 1100e6, 501}));
    const auto d4 = load_design(design_path("order4_measured.design"));
    CHECK(d4.impairments.extra_couplings.size() == 7);
    CHECK(d4.impairments.extra_couplings[0] == (ExtraCoupling{0, 2, 0.23}));
    CHECK(d4.impairments.extra_couplings[1] == (ExtraCoupling{3, 5, 0.23}));
}

TEST_CASE("synthesized prototypes and defaults", "[design]") {
    const auto d = parse_design_string(minimal);
    CHECK(d.order == 3);
    CHECK(d.return_loss_db == 13.0);
    CHECK(d.matrix() == chebyshev_inline(3, 13.0));
    CHECK(d.grid == SweepGrid::around(d.bandpass));
    CHECK(d.rl_level_db == 10.0);
    CHECK_FALSE(d.modulation);
    CHECK(d.convergence_harmonics.empty());
    CHECK(oracle_frequencies(d).size() == 5);
    CHECK_THAT(oracle_frequencies(d)[4] - oracle_frequencies(d)[0], WithinRel(0.5 * 975e6 * 0.048, 1e-12));

    const auto m = parse_design_string(minimal + "[modulation]\nfm = 20 MHz\nindex = 0.05\n");
    REQUIRE(m.modulation);
    CHECK(m.modulation->harmonics == 5);
    CHECK(m.convergence_harmonics == std::vector<int>{3, 5, 7});
    for (double p : m.modulation->phases) CHECK(p == 0.0);
}

TEST_CASE("frequency and angle units", "[design]") {
    auto with_f0 = [](const std::string& f0) {
        return parse_design_string("[prototype]\norder = 2\nreturn_loss_db = 20\n[bandpass]\nf0 = " + f0 +
                                   "\nfractional_bandwidth = 0.05\n")
            .bandpass.f0_hz;
    };
    CHECK(with_f0("1e9") == 1e9);
    CHECK(with_f0("1000000000 Hz") == 1e9);
    CHECK(with_f0("1000000 kHz") == 1e9);
    CHECK(with_f0("1000 MHz") == 1e9);
    CHECK(with_f0("1 GHz") == 1e9);
    CHECK_THROWS_AS(with_f0("1 THz"), ConfigError);
    CHECK_THROWS_AS(with_f0("one GHz"), ConfigError);

    auto phases = [](const std::string& line) {
        return parse_design_string(minimal + "[modulation]\nfm = 20 MHz\nindex = 0.05\n" + line + "\n")
            .modulation->phases;
    };
    CHECK_THAT(phases("phase_step = 0.5 rad")[2], WithinAbs(1.0, 1e-15));
    CHECK_THAT(phases("phase_step = 30")[1], WithinAbs(fixtures::deg(30), 1e-15));
    CHECK_THAT(phases("phase_step = 30 deg")[1], WithinAbs(fixtures::deg(30), 1e-15));
    const auto list = phases("phases = 0, 0.1, 0.3 rad");
    CHECK(list == std::vector<double>{0.0, 0.1, 0.3});
    CHECK_THROWS_AS(phases("phase_step = 30 grad"), ConfigError);
    CHECK_THROWS_AS(phases("phases = 0, 10"), ConfigError);
}

TEST_CASE("unknown keys and sections are reported with line and key", "[design]") {
    auto e = parse_error(minimal + "bogus = 1\n");
    CHECK(e.line() == 8);
    CHECK(e.key() == "bogus");

    e = parse_error(minimal + "\n[filter]\nx = 1\n");
    CHECK(e.line() == 9);
    CHECK(e.key() == "filter");

    e = parse_error("# header\n[prototype]\norder = 3\norder = 4\n");
    CHECK(e.line() == 4);
    CHECK(e.key() == "order");

    e = parse_error(minimal + "[bandpass]\n");
    CHECK(e.line() == 8);

    e = parse_error("order = 3\n");
    CHECK(e.line() == 1);

    e = parse_error(minimal + "just text\n");
    CHECK(e.line() == 8);

    e = parse_error(minimal + "[analysis]\npoints = 1.5\n");
    CHECK(e.line() == 9);
    CHECK(e.key() == "points");
}

TEST_CASE("structural errors", "[design]") {
    CHECK(parse_error("[prototype]\norder = 3\nreturn_loss_db = 13\n").key() == "bandpass");
    CHECK(parse_error("[bandpass]\nf0 = 1 GHz\nfractional_bandwidth = 0.05\n").key() == "prototype");

    auto e = parse_error("[prototype]\norder = 4\nmatrix = 0 1 0; 1 0 1; 0 1 0\n[bandpass]\nf0 = 1 GHz\n"
                         "fractional_bandwidth = 0.05\n");
    CHECK(e.key() == "order");
    CHECK(e.line() == 2);

    e = parse_error("[prototype]\nmatrix = 0 1 0 0; 1 0 1 0; 0 1 0 1; 0 0 2 0\n[bandpass]\nf0 = 1 GHz\n"
                    "fractional_bandwidth = 0.05\n");
    CHECK(e.key() == "matrix");
    CHECK(e.line() == 2);

    e = parse_error("[prototype]\nmatrix = 0 1 0 0; 1 0 1\n[bandpass]\nf0 = 1 GHz\nfractional_bandwidth = 0.05\n");
    CHECK(e.key() == "matrix");

    CHECK(parse_error("[prototype]\norder = 3\n[bandpass]\nf0 = 1 GHz\nfractional_bandwidth = 0.05\n").key() ==
          "matrix");
    CHECK(parse_error(minimal + "[modulation]\nindex = 0.05\n").key() == "fm");
    CHECK(parse_error(minimal + "[modulation]\nfm = 20 MHz\nindex = 0.05\nharmonics = 4\n").line() == 11);
    CHECK(parse_error(minimal + "[impairments]\nqu = -3\n").key() == "qu");
    CHECK(parse_error(minimal + "[impairments]\ncouplings = 1-2: 0.1\n").key() == "couplings");
    CHECK(parse_error(minimal + "[impairments]\ncouplings = 1-7: 0.1\n").key() == "couplings");
    CHECK(parse_error(minimal + "[oracle]\nsamples_per_period = 20\n").key() == "samples_per_period");
    CHECK(parse_error(minimal + "[optimize]\nfm_min = 10 MHz\n").key() == "fm_max");
    CHECK(parse_error(minimal + "[analysis]\nconvergence_harmonics = 5, 3\n").key() == "convergence_harmonics");
}

TEST_CASE("ports, loss and analysis settings", "[design]") {
    const auto d = parse_design_string(minimal +
                                       "port_impedance = 75\n[analysis]\nmode = rigorous\nf_start = 900 MHz\n"
                                       "f_stop = 1.05 GHz\npoints = 201\nrl_level_db = 12\n[impairments]\nqu = inf\n"
                                       "couplings = S-2: 0.1, 1-3: -0.05\n");
    CHECK(d.bandpass.port1_conductance == 1.0 / 75.0);
    CHECK(d.bandpass.port2_conductance == 1.0 / 75.0);
    CHECK(d.mode == Mode::rigorous);
    CHECK(d.grid == (SweepGrid{900e6, 1.05e9, 201}));
    CHECK(d.rl_level_db == 12.0);
    CHECK(std::isinf(*d.impairments.unloaded_q));
    CHECK(d.impairments.extra_couplings == std::vector<ExtraCoupling>{{0, 2, 0.1}, {1, 3, -0.05}});
    CHECK(parse_error(minimal + "port_impedance = 50\nport1_conductance = 0.02\n").key() == "port_impedance");
}

TEST_CASE("comments and whitespace", "[design]") {
    const auto d = parse_design_string("  # leading comment\n\n[ prototype ]  # trailing\n  order=3\n"
                                       "return_loss_db =   13   # dB\n[bandpass]\nf0=975MHz\n"
                                       "fractional_bandwidth=0.048\n");
    CHECK(d.order == 3);
    CHECK(d.bandpass.f0_hz == 975e6);
    CHECK_THROWS_AS(load_design(design_path("does_not_exist.design")), ConfigError);
}
