#include "dcbnet/error.hpp"
#include "dcbnet/phy80211.hpp"
#include "dcbnet/scenario.hpp"

#include "doctest.h"

#include <string>

using namespace dcb;

namespace {

const char* kToy = R"({
  "n_basic": 4,
  "scheme": "P2DCB",
  "p_e": 0.1,
  "wlans": [
    {"id": "A", "lo": 1, "len": 4, "primary": 2, "cw": 16},
    {"id": "B", "lo": 3, "len": 2, "primary": 3, "lambda": 500}
  ]
})";

std::string error_of(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("minimal scenario with defaults") {
    const auto s = parse_scenario(kToy, "toy");
    CHECK(s.n_basic == 4);
    CHECK(s.scheme == Scheme::P2DCB);
    CHECK(s.p_e == 0.1);
    REQUIRE(s.wlans.size() == 2);
    CHECK(s.wlans[0].access_rate == doctest::Approx(cw_to_lambda(16, 9e-6)));
    CHECK(s.wlans[1].access_rate == 500.0);
    CHECK(s.cw[0] == 16);
    CHECK_FALSE(s.cw[1].has_value());
    CHECK(s.wlans[0].packet_bits == 768000.0);
    CHECK(s.wlans[0].nodes == 1);
    CHECK_FALSE(s.explicit_mu);
    CHECK(s.mu.size() == 3);  // widths 1, 2, 4
    CHECK(s.mu.at(4) == doctest::Approx(1 / tx_duration(4, PhyParams{}, default_mcs_table())));
    CHECK(s.origin == "toy");
    CHECK(s.content_hash == fnv1a_hex(kToy));
    CHECK(build_ctmc(s).size() == 5);
}

TEST_CASE("explicit rates and durations") {
    std::string text = kToy;
    text.insert(text.rfind('}'), R"(, "phy": {"tx_duration_ms": {"1": 12.26, "2": 6.63, "4": 4.64}})");
    auto s = parse_scenario(text);
    CHECK(s.explicit_mu);
    CHECK(s.mu.at(2) == doctest::Approx(1 / 6.63e-3));

    text = kToy;
    text.insert(text.rfind('}'), R"(, "phy": {"mu": {"1": 80, "2": 150, "4": 200}})");
    s = parse_scenario(text);
    CHECK(s.mu.at(4) == 200.0);

    text = kToy;
    text.insert(text.rfind('}'), R"(, "phy": {"mu": {"1": 80}, "tx_duration_ms": {"1": 12}})");
    CHECK(error_of(text).find("not both") != std::string::npos);
}

TEST_CASE("PHY overrides feed the timing formula") {
    std::string text = kToy;
    text.insert(text.rfind('}'), R"(, "phy": {"params": {"mac_header": 272, "t_slot_us": 9}})");
    const auto s = parse_scenario(text);
    CHECK(s.phy.mac_header == 272);
    CHECK(1 / s.mu.at(1) == doctest::Approx(tx_duration(1, s.phy, default_mcs_table())));
    CHECK(1 / s.mu.at(1) < 12.27e-3);
}

TEST_CASE("validation errors name the WLAN and line") {
    std::string bad = kToy;
    bad.replace(bad.find("\"primary\": 3"), 12, "\"primary\": 1");
    const auto msg = error_of(bad);
    CHECK(msg.find("'B'") != std::string::npos);
    CHECK(msg.find(":7:") != std::string::npos);

    std::string both = kToy;
    both.replace(both.find("\"lambda\": 500"), 13, "\"lambda\": 500, \"cw\": 8");
    CHECK(error_of(both).find("exactly one") != std::string::npos);

    std::string none = kToy;
    none.replace(none.find(", \"lambda\": 500"), 15, "");
    CHECK(error_of(none).find("exactly one") != std::string::npos);

    std::string unknown = kToy;
    unknown.replace(unknown.find("\"p_e\""), 5, "\"pe\"");
    CHECK(error_of(unknown).find("pe") != std::string::npos);

    std::string outside = kToy;
    outside.replace(outside.find("\"len\": 2"), 8, "\"len\": 3");
    CHECK(error_of(outside).find("'B'") != std::string::npos);

    CHECK(error_of("{\"n_basic\": 4,\n  \"wlans\": [}").find("2:") != std::string::npos);
    CHECK_FALSE(error_of(R"({"n_basic": 4, "scheme": "P2DCB", "wlans": []})").empty());
}

TEST_CASE("contention window rewrite") {
    const auto s = with_contention_window(parse_scenario(kToy), 64);
    for (const auto& w : s.wlans) CHECK(w.access_rate == doctest::Approx(cw_to_lambda(64, 9e-6)));
    for (const auto& c : s.cw) CHECK(c == 64);
}

TEST_CASE("loading files") {
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ConfigError);
    const auto s = load_scenario(DCBNET_SCENARIO_DIR "/four_wlan.json");
    CHECK(s.wlans.size() == 4);
    CHECK(s.explicit_mu);
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
}

}
