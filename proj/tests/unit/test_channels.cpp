#include "dcbnet/channels.hpp"
#include "dcbnet/error.hpp"

#include "doctest.h"
#include "oracle.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace dcb;

namespace {

std::set<std::pair<int, int>> as_set(const std::vector<Channel>& cs) {
    std::set<std::pair<int, int>> out;
    for (const auto& c : cs) out.emplace(c.lo, c.len);
    return out;
}

WlanConfig wlan(int lo, int len, int primary) {
    WlanConfig w;
    w.id = "X";
    w.assigned = {lo, len};
    w.primary = primary;
    return w;
}

}  // namespace

TEST_SUITE("channels") {

TEST_CASE("channel algebra") {
    const Channel a{3, 4};
    CHECK(a.hi() == 6);
    CHECK(a.contains(3));
    CHECK(a.contains(6));
    CHECK_FALSE(a.contains(7));
    CHECK(a.contains(Channel{4, 2}));
    CHECK_FALSE(a.contains(Channel{5, 3}));
    CHECK(a.overlaps(Channel{6, 1}));
    CHECK_FALSE(a.overlaps(Channel{7, 2}));
    CHECK(a.mask() == 0b111100u);
    CHECK(Channel{64, 1}.mask() == (std::uint64_t{1} << 63));
}

TEST_CASE("P2DCB on four channels has eight members") {
    const auto got = allowed_channels(Scheme::P2DCB, 4, {1, 4});
    const std::set<std::pair<int, int>> want{{1, 1}, {2, 1}, {3, 1}, {4, 1}, {1, 2}, {2, 2}, {3, 2}, {1, 4}};
    CHECK(as_set(got) == want);
    CHECK(got.size() == 8);
}

TEST_CASE("11ac channelization on eight channels") {
    const auto got = allowed_channels(Scheme::IEEE80211acDCB, 8, {1, 8});
    CHECK(got.size() == 15);
    CHECK(as_set(got).count({2, 4}) == 0);
    CHECK(as_set(got).count({5, 4}) == 1);
    CHECK(as_set(got).count({3, 2}) == 1);
    CHECK(as_set(got).count({2, 2}) == 0);
}

TEST_CASE("SCB allows only the assigned channel") {
    const auto got = allowed_channels(Scheme::SCB, 8, {3, 4});
    REQUIRE(got.size() == 1);
    CHECK(got[0] == Channel{3, 4});
}

TEST_CASE("allowed sets are ordered by width then position") {
    const auto got = allowed_channels(Scheme::FullContiguous, 5, {1, 5});
    CHECK(got.size() == 15);
    CHECK(std::is_sorted(got.begin(), got.end(), [](const Channel& a, const Channel& b) {
        return a.len != b.len ? a.len < b.len : a.lo < b.lo;
    }));
}

TEST_CASE("channelization nesting for power-of-two band sizes") {
    for (int n : {1, 2, 4, 8, 16}) {
        const auto ac = as_set(allowed_channels(Scheme::IEEE80211acDCB, n, {1, n}));
        const auto p2 = as_set(allowed_channels(Scheme::P2DCB, n, {1, n}));
        const auto full = as_set(allowed_channels(Scheme::FullContiguous, n, {1, n}));
        CHECK(std::includes(p2.begin(), p2.end(), ac.begin(), ac.end()));
        CHECK(std::includes(full.begin(), full.end(), p2.begin(), p2.end()));
    }
}

TEST_CASE("non power-of-two bands are not padded") {
    const auto got = allowed_channels(Scheme::P2DCB, 24, {1, 24});
    for (const auto& c : got) CHECK(c.hi() <= 24);
    CHECK(as_set(got).count({17, 8}) == 1);
    CHECK(as_set(got).count({1, 16}) == 1);
    CHECK(as_set(got).count({9, 16}) == 1);
    CHECK(as_set(got).count({10, 16}) == 0);
}

TEST_CASE("candidate selection examples") {
    const auto a = wlan(1, 4, 2);
    auto got = candidate_tx_channels(a, {}, Scheme::P2DCB, 4);
    REQUIRE(got.size() == 1);
    CHECK(got[0] == Channel{1, 4});

    const std::vector<Channel> busy{{3, 2}};
    got = candidate_tx_channels(a, busy, Scheme::P2DCB, 4);
    REQUIRE(got.size() == 1);
    CHECK(got[0] == Channel{1, 2});

    got = candidate_tx_channels(wlan(1, 3, 2), {}, Scheme::P2DCB, 3);
    CHECK(as_set(got) == std::set<std::pair<int, int>>{{1, 2}, {2, 2}});
    REQUIRE(got.size() == 2);
    CHECK(got[0].lo < got[1].lo);

    const std::vector<Channel> primary_busy{{2, 1}};
    CHECK(candidate_tx_channels(a, primary_busy, Scheme::P2DCB, 4).empty());
    const std::vector<Channel> partial{{4, 1}};
    CHECK(candidate_tx_channels(a, partial, Scheme::SCB, 4).empty());
}

TEST_CASE("candidates agree with exhaustive search on random inputs") {
    std::mt19937_64 rng(7);
    const Scheme schemes[] = {Scheme::FullContiguous, Scheme::P2DCB, Scheme::IEEE80211acDCB, Scheme::SCB};
    for (int trial = 0; trial < 2000; ++trial) {
        const int n = std::uniform_int_distribution<int>(1, 16)(rng);
        const int lo = std::uniform_int_distribution<int>(1, n)(rng);
        const int len = std::uniform_int_distribution<int>(1, n - lo + 1)(rng);
        const int primary = std::uniform_int_distribution<int>(lo, lo + len - 1)(rng);
        const auto scheme = schemes[trial % 4];
        const auto w = wlan(lo, len, primary);

        // Random non-overlapping busy set.
        std::vector<Channel> busy;
        oracle::State os;
        for (int b = 1; b <= n;) {
            const int run = std::uniform_int_distribution<int>(1, 3)(rng);
            if (std::bernoulli_distribution(0.3)(rng)) {
                const int l = std::min(run, n - b + 1);
                busy.push_back({b, l});
                os.emplace_back(oracle::Span{b, l});
            }
            b += run;
        }
        const auto got = candidate_tx_channels(w, busy, scheme, n);
        const auto want = oracle::candidates(scheme, w, os);
        std::set<std::pair<int, int>> want_set(want.begin(), want.end());
        CHECK(as_set(got) == want_set);
        for (const auto& c : got) {
            CHECK(c.contains(primary));
            CHECK(w.assigned.contains(c));
            for (const auto& b : busy) CHECK_FALSE(c.overlaps(b));
            CHECK(c.len == got.front().len);
        }
    }
}

TEST_CASE("invalid inputs") {
    CHECK_THROWS_AS(allowed_channels(Scheme::P2DCB, 0, {1, 1}), ConfigError);
    CHECK_THROWS_AS(allowed_channels(Scheme::P2DCB, 4, {3, 4}), ConfigError);
    CHECK_THROWS_AS(validate_channel({0, 2}, 4), ConfigError);
    CHECK_THROWS_AS(validate_channel({1, 0}, 4), ConfigError);
    auto w = wlan(1, 4, 6);
    w.id = "Bravo";
    CHECK_THROWS_WITH_AS(validate_wlan(w, 8), doctest::Contains("Bravo"), ConfigError);
    w.primary = 2;
    w.access_rate = 0.0;
    CHECK_THROWS_AS(validate_wlan(w, 8), ConfigError);
    CHECK_THROWS_AS(parse_scheme("bogus"), ConfigError);
}

TEST_CASE("scheme names round trip") {
    for (auto s : {Scheme::FullContiguous, Scheme::P2DCB, Scheme::IEEE80211acDCB, Scheme::SCB})
        CHECK(parse_scheme(to_string(s)) == s);
    CHECK(parse_scheme("p2dcb") == Scheme::P2DCB);
    CHECK(to_string(Channel{3, 2}) == "{3..4}");
}

}
