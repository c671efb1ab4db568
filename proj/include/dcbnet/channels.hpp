#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dcb {

/// Largest number of basic channels a scenario may declare. Occupancy is
/// tracked as a 64-bit mask of basic channels.
inline constexpr int kMaxBasicChannels = 64;

/// A contiguous run of basic channels {lo, ..., lo + len - 1}, 1-based.
struct Channel {
    int lo = 1;
    int len = 1;

    constexpr int hi() const { return lo + len - 1; }
    constexpr bool contains(int basic) const { return basic >= lo && basic <= hi(); }
    constexpr bool contains(const Channel& other) const {
        return other.lo >= lo && other.hi() <= hi();
    }
    constexpr bool overlaps(const Channel& other) const {
        return lo <= other.hi() && other.lo <= hi();
    }

    /// Bit (b - 1) is set for every basic channel b in the channel.
    std::uint64_t mask() const;

    friend constexpr auto operator<=>(const Channel&, const Channel&) = default;
};

std::string to_string(const Channel& c);

enum class Scheme {
    FullContiguous,  // every contiguous subset
    P2DCB,           // power-of-two widths, any position
    IEEE80211acDCB,  // power-of-two widths, aligned to a multiple of the width
    SCB,             // only the full assigned channel
};

Scheme parse_scheme(std::string_view name);
std::string_view to_string(Scheme s);

struct WlanConfig {
    std::string id;
    Channel assigned;
    int primary = 1;
    int nodes = 1;
    double access_rate = 1.0;  // per node, 1/E[backoff] in s^-1
    double packet_bits = 1.0;
};

/// Throws ConfigError when the channel lies outside {1..n_basic}.
void validate_channel(const Channel& c, int n_basic);

/// Throws ConfigError naming the WLAN when any field is out of range.
void validate_wlan(const WlanConfig& w, int n_basic);

/// The allowed-channel set of the scheme restricted to subsets of `assigned`,
/// ordered by width then position.
std::vector<Channel> allowed_channels(Scheme scheme, int n_basic, const Channel& assigned);

/// Allowed channels of `w` that contain its primary, widest first and in
/// ascending `lo` order within a width. This is the search list used by
/// candidate selection; callers on hot paths should cache it.
std::vector<Channel> primary_channels(const WlanConfig& w, Scheme scheme, int n_basic);

/// Widest members of `options` that avoid every busy basic channel in
/// `busy_mask`; `options` must be ordered as returned by primary_channels.
std::vector<Channel> widest_free(std::span<const Channel> options, std::uint64_t busy_mask);

/// Transmission channels WLAN `w` may pick when `busy` is occupied: the
/// maximal-width allowed channels that contain the primary and avoid all
/// busy channels. Empty when no transmission is possible.
std::vector<Channel> candidate_tx_channels(const WlanConfig& w,
                                           std::span<const Channel> busy,
                                           Scheme scheme,
                                           int n_basic);

}  // namespace dcb
