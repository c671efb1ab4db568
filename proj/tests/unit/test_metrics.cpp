#include "dcbnet/ctmc.hpp"
#include "dcbnet/error.hpp"
#include "dcbnet/metrics.hpp"
#include "dcbnet/solver.hpp"

#include "doctest.h"

#include <sstream>

using namespace dcb;

namespace {

const MuTable kMu{{1, 1 / 12.26e-3}, {2, 1 / 6.63e-3}, {4, 1 / 4.64e-3}, {8, 1 / 3.52e-3}};

Ctmc toy(double lambda = 14814.8, double bits = 768000) {
    WlanConfig a{"A", {1, 4}, 2, 1, lambda, bits};
    WlanConfig b{"B", {3, 2}, 3, 1, lambda, bits};
    return build_ctmc({a, b}, Scheme::P2DCB, 4, kMu);
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("throughput by hand on the toy example") {
    const auto c = toy();
    const auto pi = steady_state(rate_matrix(c));
    const auto g = throughput(c, pi, 0.1);
    const double pa4 = pi[*c.find("A_4^1")], pa2 = pi[*c.find("A_2^1")], pab = pi[*c.find("A_2^1B_2^3")],
                 pb = pi[*c.find("B_2^3")];
    CHECK(g[0] == doctest::Approx(768000 * (kMu.at(4) * pa4 + kMu.at(2) * (pa2 + pab)) * 0.9).epsilon(1e-12));
    CHECK(g[1] == doctest::Approx(768000 * kMu.at(2) * (pb + pab) * 0.9).epsilon(1e-12));
}

TEST_CASE("p_e = 1 silences every WLAN") {
    const auto c = toy();
    const auto pi = steady_state(rate_matrix(c));
    for (double x : throughput(c, pi, 1.0)) CHECK(x == 0.0);
    const auto m = compute_metrics(c, pi, 1.0);
    CHECK(m.aggregate == 0.0);
    CHECK_THROWS_AS(throughput(c, pi, 1.5), ConfigError);
}

TEST_CASE("single WLAN closed form") {
    WlanConfig a{"A", {1, 8}, 4, 2, 1000.0, 5000};
    const auto c = build_ctmc({a}, Scheme::P2DCB, 8, kMu);
    const auto pi = steady_state(rate_matrix(c));
    const double mu = kMu.at(8), ul = 2000.0;
    CHECK(throughput(c, pi, 0.2)[0] == doctest::Approx(5000 * mu * ul / (ul + mu) * 0.8).epsilon(1e-12));
    CHECK(expected_tx_width(c, pi)[0] == doctest::Approx(8.0));
}

TEST_CASE("Jain's index") {
    const std::vector<double> equal{5, 5, 5, 5};
    CHECK(jfi(equal) == doctest::Approx(1.0));
    const std::vector<double> one{0, 3, 0, 0, 0};
    CHECK(jfi(one) == doctest::Approx(0.2));
    const std::vector<double> v{1, 2, 3};
    CHECK(jfi(v) == doctest::Approx(6.0 / 7.0));
    CHECK(jfi(v, false) == doctest::Approx(36.0 / 14.0));
    const std::vector<double> zeros{0, 0};
    CHECK_THROWS_AS(jfi(zeros), ConfigError);
    CHECK_THROWS_AS(jfi(std::vector<double>{}), ConfigError);
}

TEST_CASE("expected transmission width") {
    const auto c = toy();
    const auto w = expected_tx_width(c, steady_state(rate_matrix(c)));
    CHECK(w[0] > 2.0);
    CHECK(w[0] < 4.0);
    CHECK(w[1] == doctest::Approx(2.0));

    WlanConfig a{"A", {1, 4}, 2, 1, 500.0, 1000};
    WlanConfig b{"B", {3, 4}, 5, 1, 500.0, 1000};
    const auto scb = build_ctmc({a, b}, Scheme::SCB, 8, kMu);
    for (double x : expected_tx_width(scb, steady_state(rate_matrix(scb)))) CHECK(x == doctest::Approx(4.0));
}

TEST_CASE("packet length scales throughput and leaves fairness alone") {
    const auto c1 = toy(3000, 1000);
    const auto c2 = toy(3000, 7000);
    const auto m1 = compute_metrics(c1, steady_state(rate_matrix(c1)), 0.1);
    const auto m2 = compute_metrics(c2, steady_state(rate_matrix(c2)), 0.1);
    for (std::size_t x = 0; x < 2; ++x)
        CHECK(m2.per_wlan_throughput[x] == doctest::Approx(7 * m1.per_wlan_throughput[x]).epsilon(1e-12));
    CHECK(m1.jfi == doctest::Approx(m2.jfi).epsilon(1e-12));
    CHECK(m1.aggregate == doctest::Approx(m1.per_wlan_throughput[0] + m1.per_wlan_throughput[1]));
    CHECK(m1.jfi >= 0.5);
    CHECK(m1.jfi <= 1.0);
}

TEST_CASE("metrics CSV layout") {
    const auto c = toy();
    const auto m = compute_metrics(c, steady_state(rate_matrix(c)), 0.1);
    std::ostringstream os;
    write_metrics_csv(os, m);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "wlan_id,throughput_bps,expected_width");
    std::getline(is, line);
    CHECK(line.rfind("A,", 0) == 0);
    std::getline(is, line);
    CHECK(line.rfind("B,", 0) == 0);
    std::getline(is, line);
    CHECK(line.rfind("aggregate,", 0) == 0);
    std::getline(is, line);
    CHECK(line.rfind("jfi,", 0) == 0);
    CHECK(m.state_labels.size() == c.size());
}

}
