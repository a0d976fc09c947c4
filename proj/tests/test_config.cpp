#include "doctest.h"

#include <sstream>

#include "fbmc/config.hpp"

using namespace fbmc;

TEST_CASE("key-value parsing") {
    const auto kv = parse_key_values("# header\nN = 32\n  M=7   # trailing\n\nsnr_db = 0:5:10\n");
    CHECK(kv.size() == 3);
    CHECK(kv.at("N") == "32");
    CHECK(kv.at("M") == "7");
    CHECK(kv.at("snr_db") == "0:5:10");
}

TEST_CASE("applying keys") {
    ScenarioConfig c = default_scenario();
    std::vector<std::string> errs;
    apply_key_values(c, parse_key_values("N = 32\nM = 7\nK = 4\nsnr_db = 0:5:10\neta = 0.5\nequalizer = ZF\n"), errs);
    CHECK(errs.empty());
    CHECK(c.system.N == 32);
    CHECK(c.system.M == 7);
    CHECK(c.system.K == 4);
    CHECK(c.snrGridDb == rvec{0.0, 5.0, 10.0});
    CHECK(c.system.etaFraction == 0.5);
    CHECK(c.system.equalizer == EqualizerKind::ZF);

    errs.clear();
    apply_key_values(c, parse_key_values("bogus = 1\nalso_bogus = 2\nN = abc\n"), errs);
    CHECK(errs.size() == 3);
}

TEST_CASE("presets") {
    for (const auto& name : preset_names()) CHECK_NOTHROW(preset_scenario(name).validate());
    CHECK_THROWS(preset_scenario("nope"));
    const auto s = preset_scenario("sync3band");
    REQUIRE(s.subBands.size() == 3);
    for (const auto& b : s.subBands) CHECK(b.offset == 0);
    CHECK(s.coded);
    CHECK(s.system.modOrder == 16);
    CHECK(s.system.equalizer == EqualizerKind::MMSE);
    const auto a = preset_scenario("async3band");
    CHECK(a.subBands[0].offset == 35);
    CHECK(a.subBands[2].offset == 35);
    CHECK(a.etas == std::vector<double>{0.0, 1.0});

    // Preset applies first regardless of key order.
    ScenarioConfig c = default_scenario();
    std::vector<std::string> errs;
    apply_key_values(c, parse_key_values("trials = 9\npreset = sync3band\n"), errs);
    CHECK(errs.empty());
    CHECK(c.trials == 9);
    CHECK(c.preset == "sync3band");
}

TEST_CASE("default layout and offsets") {
    const auto b = default_subbands(64, 0);
    REQUIRE(b.size() == 3);
    CHECK(b[0].start == 4);
    CHECK(b[1].start == 24);
    CHECK(b[2].start == 44);
    for (const auto& x : b) CHECK(x.width == 16);
    CHECK(async_offset(64, 7) == 35);
    CHECK(async_offset(64, 0) == 32);
}

TEST_CASE("printed configuration round trips") {
    ScenarioConfig c = preset_scenario("async3band");
    c.trials = 77;
    c.seed = 12345678901234ull;
    std::ostringstream os;
    print_config(os, c);
    ScenarioConfig d = default_scenario();
    std::vector<std::string> errs;
    apply_key_values(d, parse_key_values(os.str()), errs);
    CHECK(errs.empty());
    CHECK(scenario_to_key_values(c) == scenario_to_key_values(d));
}

TEST_CASE("validation reports every violated field") {
    ScenarioConfig c = default_scenario();
    c.system.N = 63;
    c.system.M = 0;
    c.system.etaFraction = 2.0;
    c.trials = 0;
    const auto v = c.violations();
    CHECK(v.size() >= 4);
    auto has = [&](const std::string& key) {
        for (const auto& s : v)
            if (s.rfind(key, 0) == 0) return true;
        return false;
    };
    CHECK(has("N"));
    CHECK(has("M"));
    CHECK(has("eta"));
    CHECK(has("trials"));
    try {
        c.validate();
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(e.fields.size() == v.size());
    }
}

TEST_CASE("dB formatting") {
    CHECK(format_db(0.0) == "-inf");
    CHECK(format_db(1.0) == "0.000000");
    CHECK(format_db(0.1) == "-10.000000");
    CHECK(format_double(0.1) == "0.10000000000000001");
}
