#include <catch2/catch_amalgamated.hpp>

#include "afc/scenario.hpp"

using namespace afc;

TEST_CASE("config parser: sections, comments, trimming") {
    auto cfg = parse_config("# header comment\n"
                            "[material]\n"
                            "pit_width_mhz = 18   ; trailing comment\n"
                            "\n"
                            "[comb]\n"
                            "delta_mhz=1.2\n");
    ConfigView mat(cfg, "material");
    CHECK(mat.num("pit_width_mhz") == 18.0);
    ConfigView comb(cfg, "comb");
    CHECK(comb.num("delta_mhz") == 1.2);
    CHECK(comb.num("gamma_fwhm_mhz", 0.3) == 0.3);  // default
}

TEST_CASE("config parser: malformed input") {
    CHECK_THROWS_AS(parse_config("[material\nx = 1\n"), config_error);
    CHECK_THROWS_AS(parse_config("justtext\n"), config_error);
    CHECK_THROWS_AS(parse_config("= 3\n"), config_error);
    auto cfg = parse_config("[a]\nx = abc\n");
    CHECK_THROWS_AS(ConfigView(cfg, "a").num("x"), config_error);
    CHECK_THROWS_AS(ConfigView(cfg, "a").num("missing"), config_error);
    try {
        ConfigView(cfg, "a").num("missing");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("a.missing") != std::string::npos);
    }
}

TEST_CASE("presets load and validate") {
    for (const auto& name : {"fig3", "fig3-gamma200", "fig4", "empty-pit", "forward-cap"}) {
        Scenario sc = load_preset(name);
        CHECK_NOTHROW(sc.validate());
    }
    CHECK_THROWS_AS(load_preset("nope"), config_error);
}

TEST_CASE("fig3 preset resolves the documented geometry") {
    Scenario sc = load_preset("fig3");
    CHECK(sc.comb.delta_mhz == 1.2);
    CHECK(sc.comb.gamma_fwhm_mhz == 0.3);
    CHECK(finesse(sc.comb) == Catch::Approx(4.0));
    auto prof = sc.profile();
    CHECK(prof.comb->params.n_peaks == 4);
    CHECK(sc.echo_time_ns() == Catch::Approx(833.3333).epsilon(1e-6));
}

TEST_CASE("fig4 preset carries the probe") {
    Scenario sc = load_preset("fig4");
    REQUIRE(sc.probe.has_value());
    CHECK(sc.probe->carrier_detuning_mhz == 2.3);
    CHECK(sc.probe->supergauss_n == 7);
    CHECK(sc.probe->fwhm_ns == 840.0);
    CHECK(sc.storage.fwhm_ns == 420.0);
    CHECK(sc.comb.delta_mhz == 1.0);
}

TEST_CASE("forward-cap preset is a finesse-40 square comb with a sweep axis") {
    Scenario sc = load_preset("forward-cap");
    CHECK(finesse(sc.comb) == Catch::Approx(40.0));
    CHECK(sc.comb.peak_shape == PeakShape::square);
    REQUIRE(sc.axis1.has_value());
    CHECK(sc.axis1->param == "alphaL");
}

TEST_CASE("scenario validation catches cross-module inconsistencies") {
    Scenario sc = load_preset("fig3");
    sc.fgrid = FrequencyGrid(0.0, 40.0, 10000);  // not a power of two
    CHECK_THROWS_AS(sc.validate(), config_error);

    sc = load_preset("fig3");
    sc.comb.n_peaks = 5;  // violates the splitting bound
    CHECK_THROWS_AS(sc.validate(), constraint_error);

    sc = load_preset("fig3");
    sc.storage.fwhm_ns = 5000.0;  // bandwidth/span check fails
    CHECK_THROWS_AS(sc.validate(), config_error);
}

TEST_CASE("seed override propagates to the detector") {
    auto cfg = parse_config(preset_texts().at("fig3"));
    Scenario sc = scenario_from_config(cfg);
    CHECK(sc.seed == 12345);
    CHECK(sc.detector.seed == 12345);
}
