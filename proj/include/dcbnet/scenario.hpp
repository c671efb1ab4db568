#pragma once

#include "dcbnet/channels.hpp"
#include "dcbnet/ctmc.hpp"
#include "dcbnet/phy80211.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dcb {

/// A parsed and validated scenario file.
struct Scenario {
    int n_basic = 1;
    Scheme scheme = Scheme::P2DCB;
    double p_e = 0.0;
    std::vector<WlanConfig> wlans;
    /// Contention window per WLAN when the file gave `cw` instead of `lambda`.
    std::vector<std::optional<int>> cw;
    PhyParams phy;
    std::vector<McsEntry> mcs;
    /// mu_n; taken from the file when given explicitly, else from the PHY formula.
    MuTable mu;
    bool explicit_mu = false;
    std::string origin;
    std::string content_hash;  // FNV-1a 64 of the file text, hex
};

/// Parses the JSON scenario format (see scenarios/schema.json). Syntax
/// errors carry line and column; validation errors name the offending WLAN
/// and the line its id appears on. Throws ConfigError.
Scenario parse_scenario(std::string_view text, std::string_view origin = "<string>");

Scenario load_scenario(const std::filesystem::path& path);

/// Same scenario with every WLAN's access rate recomputed from `cw`.
Scenario with_contention_window(Scenario s, int cw);

Ctmc build_ctmc(const Scenario& s);

std::string fnv1a_hex(std::string_view text);

}  // namespace dcb
