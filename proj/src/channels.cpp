#include "dcbnet/channels.hpp"

#include "dcbnet/error.hpp"

#include <algorithm>
#include <bit>

namespace dcb {

std::uint64_t Channel::mask() const {
    const std::uint64_t ones = len >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << len) - 1);
    return ones << (lo - 1);
}

std::string to_string(const Channel& c) {
    if (c.len == 1) return "{" + std::to_string(c.lo) + "}";
    return "{" + std::to_string(c.lo) + ".." + std::to_string(c.hi()) + "}";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "FullContiguous" || name == "full") return Scheme::FullContiguous;
    if (name == "P2DCB" || name == "p2dcb") return Scheme::P2DCB;
    if (name == "11acDCB" || name == "IEEE80211acDCB" || name == "11acdcb") return Scheme::IEEE80211acDCB;
    if (name == "SCB" || name == "scb" || name == "11acSCB") return Scheme::SCB;
    throw ConfigError("unknown channelization scheme '" + std::string(name) + "'");
}

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::FullContiguous: return "FullContiguous";
        case Scheme::P2DCB: return "P2DCB";
        case Scheme::IEEE80211acDCB: return "11acDCB";
        case Scheme::SCB: return "SCB";
    }
    return "?";
}

void validate_channel(const Channel& c, int n_basic) {
    if (n_basic < 1 || n_basic > kMaxBasicChannels)
        throw ConfigError("basic channel count must be in [1, " + std::to_string(kMaxBasicChannels) +
                          "], got " + std::to_string(n_basic));
    if (c.len < 1 || c.lo < 1 || c.hi() > n_basic)
        throw ConfigError("channel " + to_string(c) + " is outside {1.." + std::to_string(n_basic) + "}");
}

void validate_wlan(const WlanConfig& w, int n_basic) {
    const auto fail = [&](const std::string& what) {
        throw ConfigError("WLAN '" + w.id + "': " + what);
    };
    try {
        validate_channel(w.assigned, n_basic);
    } catch (const ConfigError& e) {
        fail(e.what());
    }
    if (!w.assigned.contains(w.primary))
        fail("primary channel " + std::to_string(w.primary) + " is not inside assigned channel " +
             to_string(w.assigned));
    if (w.nodes < 1) fail("node count must be >= 1");
    if (!(w.access_rate > 0.0)) fail("access rate must be > 0");
    if (!(w.packet_bits > 0.0)) fail("packet length must be > 0");
}

namespace {

bool width_allowed(Scheme scheme, int len) {
    return scheme == Scheme::FullContiguous || std::has_single_bit(static_cast<unsigned>(len));
}

bool position_allowed(Scheme scheme, const Channel& c) {
    return scheme != Scheme::IEEE80211acDCB || (c.lo - 1) % c.len == 0;
}

}  // namespace

std::vector<Channel> allowed_channels(Scheme scheme, int n_basic, const Channel& assigned) {
    validate_channel(assigned, n_basic);
    if (scheme == Scheme::SCB) return {assigned};

    std::vector<Channel> out;
    for (int len = 1; len <= assigned.len; ++len) {
        if (!width_allowed(scheme, len)) continue;
        for (int lo = assigned.lo; lo + len - 1 <= assigned.hi(); ++lo) {
            const Channel c{lo, len};
            if (position_allowed(scheme, c)) out.push_back(c);
        }
    }
    return out;
}

std::vector<Channel> primary_channels(const WlanConfig& w, Scheme scheme, int n_basic) {
    auto all = allowed_channels(scheme, n_basic, w.assigned);
    std::erase_if(all, [&](const Channel& c) { return !c.contains(w.primary); });
    std::stable_sort(all.begin(), all.end(),
                     [](const Channel& a, const Channel& b) { return a.len > b.len; });
    return all;
}

std::vector<Channel> widest_free(std::span<const Channel> options, std::uint64_t busy_mask) {
    std::vector<Channel> out;
    for (const auto& c : options) {
        if (!out.empty() && c.len < out.front().len) break;
        if ((c.mask() & busy_mask) == 0) out.push_back(c);
    }
    return out;
}

std::vector<Channel> candidate_tx_channels(const WlanConfig& w,
                                           std::span<const Channel> busy,
                                           Scheme scheme,
                                           int n_basic) {
    std::uint64_t busy_mask = 0;
    for (const auto& b : busy) busy_mask |= b.mask();
    const auto options = primary_channels(w, scheme, n_basic);
    return widest_free(options, busy_mask);
}

}  // namespace dcb
