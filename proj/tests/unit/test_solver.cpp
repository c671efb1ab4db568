#include "dcbnet/ctmc.hpp"
#include "dcbnet/error.hpp"
#include "dcbnet/solver.hpp"

#include "doctest.h"
#include "oracle.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numeric>
#include <random>

using namespace dcb;

namespace {

constexpr double kLambda = 14814.8;
const MuTable kMu{{1, 1 / 12.26e-3}, {2, 1 / 6.63e-3}, {4, 1 / 4.64e-3}, {8, 1 / 3.52e-3}};

Ctmc toy(double lambda = kLambda) {
    WlanConfig a{"A", {1, 4}, 2, 1, lambda, 768000};
    WlanConfig b{"B", {3, 2}, 3, 1, lambda, 768000};
    return build_ctmc({a, b}, Scheme::P2DCB, 4, kMu);
}

RateMatrix two_state(double a, double b) {
    return rate_matrix(2, {{0, 1, a}, {1, 0, b}});
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("generator rows close to zero") {
    const auto q = rate_matrix(toy());
    for (std::size_t i = 0; i < q.dim(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < q.dim(); ++j) {
            row += q(i, j);
            if (i != j) CHECK(q(i, j) >= 0.0);
        }
        CHECK(std::abs(row) <= 1e-12 * std::abs(q(i, i)));
    }
    const auto c = toy();
    CHECK(q(0, *c.find("A_4^1")) == doctest::Approx(kLambda));
    CHECK(q(*c.find("A_4^1"), 0) == doctest::Approx(kMu.at(4)));
    CHECK(q(0, *c.find("A_2^1")) == 0.0);
    CHECK(q.max_exit_rate() == doctest::Approx(2 * kLambda));
}

TEST_CASE("parallel transitions are summed") {
    const auto q = rate_matrix(2, {{0, 1, 1.5}, {0, 1, 2.5}, {1, 0, 3.0}});
    CHECK(q(0, 1) == 4.0);
    CHECK(q(0, 0) == -4.0);
}

TEST_CASE("toy example against hand-written balance equations") {
    // States in discovery order: ∅, A4, B2, A2B2, A2. L = lambda, m2/m4 as
    // in the chain. Balance equations written out by hand, last one replaced
    // by normalization and solved with a dense LU.
    const double l = kLambda, m2 = kMu.at(2), m4 = kMu.at(4);
    Eigen::MatrixXd a(5, 5);
    // column j: inflow - outflow of state j
    a << -2 * l, m4, m2, 0, m2,   // ∅
        l, -m4, 0, 0, 0,          // A4
        l, 0, -(l + m2), m2, 0,   // B2
        0, 0, l, -2 * m2, l,      // A2B2
        1, 1, 1, 1, 1;            // normalization instead of A2
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(5);
    rhs(4) = 1.0;
    const Eigen::VectorXd want = a.partialPivLu().solve(rhs);
    const auto got = steady_state(rate_matrix(toy()));
    for (int i = 0; i < 5; ++i) CHECK(got[static_cast<std::size_t>(i)] == doctest::Approx(want(i)).epsilon(1e-10));
}

TEST_CASE("independent WLANs give a product form") {
    WlanConfig a{"A", {1, 2}, 1, 2, 300.0, 1000};
    WlanConfig b{"B", {3, 4}, 4, 1, 50.0, 1000};
    const auto c = build_ctmc({a, b}, Scheme::P2DCB, 6, kMu);
    const auto pi = steady_state(rate_matrix(c));
    const double pa = 600.0 / (600.0 + kMu.at(2));
    const double pb = 50.0 / (50.0 + kMu.at(4));
    CHECK(pi[*c.find("∅")] == doctest::Approx((1 - pa) * (1 - pb)).epsilon(1e-12));
    CHECK(pi[*c.find("A_2^1")] == doctest::Approx(pa * (1 - pb)).epsilon(1e-12));
    CHECK(pi[*c.find("B_4^3")] == doctest::Approx((1 - pa) * pb).epsilon(1e-12));
    CHECK(pi[*c.find("A_2^1B_4^3")] == doctest::Approx(pa * pb).epsilon(1e-12));
    const auto rev = check_reversibility(rate_matrix(c), pi);
    CHECK(rev.reversible);
    CHECK(rev.one_way_transitions == 0);
}

TEST_CASE("single WLAN closed form") {
    WlanConfig a{"A", {1, 1}, 1, 3, 20.0, 1000};
    const auto pi = steady_state(rate_matrix(build_ctmc({a}, Scheme::P2DCB, 1, kMu)));
    const double ul = 60.0, mu = kMu.at(1);
    CHECK(pi[0] == doctest::Approx(mu / (mu + ul)).epsilon(1e-13));
    CHECK(pi[1] == doctest::Approx(ul / (mu + ul)).epsilon(1e-13));
}

TEST_CASE("random scenarios match the GTH oracle") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const auto r = oracle::random_scenario(rng);
        const auto c = build_ctmc(r.wlans, r.scheme, r.n_basic, r.mu);
        const auto q = rate_matrix(c);
        const auto pi = steady_state(q);
        CAPTURE(trial);
        const auto want = oracle::gth(q.dense());
        double sum = 0.0;
        for (std::size_t i = 0; i < pi.size(); ++i) {
            CHECK(pi[i] >= 0.0);
            CHECK(std::abs(pi[i] - want[i]) <= 1e-9);
            sum += pi[i];
        }
        CHECK(std::abs(sum - 1.0) <= 1e-12);
        CHECK(balance_residual(q, pi.pi) <= 1e-10);
    }
}

TEST_CASE("large chains use the sparse path") {
    // Birth-death chain of 3000 states: pi_k proportional to (b/d)^k.
    const std::size_t n = 3000;
    const double b = 1.0, d = 1.001;
    std::vector<Eigen::Triplet<double>> t;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        t.emplace_back(static_cast<int>(k), static_cast<int>(k + 1), b);
        t.emplace_back(static_cast<int>(k + 1), static_cast<int>(k), d);
    }
    const auto q = rate_matrix(n, t);
    REQUIRE(q.dim() > kDenseSolveLimit);
    const auto pi = steady_state(q);
    const double r = b / d;
    const double norm = (1 - std::pow(r, static_cast<double>(n))) / (1 - r);
    for (std::size_t k : {std::size_t{0}, std::size_t{1500}, n - 1})
        CHECK(pi[k] == doctest::Approx(std::pow(r, static_cast<double>(k)) / norm).epsilon(1e-9));
    CHECK(balance_residual(q, pi.pi) <= 1e-10);
}

TEST_CASE("transient distribution") {
    const auto q = rate_matrix(toy());
    std::vector<double> p0(q.dim(), 0.0);
    p0[0] = 1.0;
    CHECK(transient(q, p0, 0.0) == p0);

    const auto pi = steady_state(q).pi;
    for (double t : {1e-5, 1e-3, 0.1}) {
        const auto p = transient(q, p0, t);
        double sum = 0.0;
        for (double x : p) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(tv_distance(transient(q, p0, 20.0), pi) <= 1e-6);

    // Two-state closed form: p1(t) = a/(a+b) (1 - e^{-(a+b)t}).
    const double a = 3.0, b = 7.0;
    const auto q2 = two_state(a, b);
    for (double t : {0.01, 0.1, 0.5, 2.0}) {
        const auto p = transient(q2, {1.0, 0.0}, t);
        CHECK(std::abs(p[1] - a / (a + b) * (1 - std::exp(-(a + b) * t))) <= 1e-9);
    }
    CHECK_THROWS_AS(transient(q2, {1.0, 0.0}, -1.0), ConfigError);
}

TEST_CASE("mixing time") {
    const double a = 3.0, b = 7.0;
    const auto q = two_state(a, b);
    // ||p(t) - pi||_2 = sqrt(2) * a/(a+b) * e^{-(a+b)t} from the empty state.
    const double eps = 1e-3;
    const double exact = std::log(std::sqrt(2.0) * a / (a + b) / eps) / (a + b);
    const double got = mixing_time(q, eps);
    CHECK(got >= exact);
    CHECK(got <= exact * kMixingGridFactor * (1 + 1e-12));

    CHECK(mixing_time(q, 0.999) <= 1e-3);
    CHECK_THROWS_AS(mixing_time(q, 0.0), ConfigError);

    // First grid crossing, checked against a dense matrix exponential.
    for (double lambda : {100.0, 1000.0, 10000.0}) {
        const auto qt = rate_matrix(toy(lambda));
        const auto pi = steady_state(qt).pi;
        const Eigen::MatrixXd dense = qt.dense();
        auto dist = [&](double t) {
            const Eigen::RowVectorXd p = Eigen::MatrixXd((dense * t).exp()).row(0);
            double s = 0.0;
            for (Eigen::Index i = 0; i < p.size(); ++i) s += std::pow(p(i) - pi[static_cast<std::size_t>(i)], 2);
            return std::sqrt(s);
        };
        const double t = mixing_time(qt, eps);
        CAPTURE(lambda);
        CHECK(dist(t) <= eps * (1 + 1e-6));
        CHECK(dist(t / kMixingGridFactor) > eps * (1 - 1e-6));
    }
}

TEST_CASE("reversibility detection") {
    const auto c = toy();
    const auto q = rate_matrix(c);
    const auto r = check_reversibility(q, steady_state(q));
    CHECK_FALSE(r.reversible);
    CHECK(r.one_way_transitions >= 1);

    const auto q2 = two_state(2.0, 5.0);
    CHECK(check_reversibility(q2, steady_state(q2)).reversible);
}

}
