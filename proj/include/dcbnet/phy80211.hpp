#pragma once

#include "dcbnet/ctmc.hpp"

#include <set>
#include <span>
#include <vector>

namespace dcb {

/// 802.11ac PHY/MAC timing parameters. Bit counts are exact integers; times
/// are in seconds.
struct PhyParams {
    long packet_bits = 12000;   // L_d
    long aggregated = 64;       // K_A, A-MPDU size
    long service_field = 16;    // SF
    long mpdu_delimiter = 32;   // MD
    long mac_header = 288;      // MH
    long tail_bits = 6;         // TB
    long block_ack = 256;       // L_BA
    double t_phy = 40e-6;       // preamble + PHY headers
    double t_symbol = 4e-6;     // OFDM symbol
    double t_sifs = 16e-6;
    double t_difs = 34e-6;
    double t_slot = 9e-6;
};

/// One modulation-and-coding row; the coding rate is kept as a fraction so
/// symbol counts are computed in integer arithmetic.
struct McsEntry {
    int width = 1;              // n, basic channels
    int data_subcarriers = 52;  // xi(n)
    int modulation_bits = 6;    // K_m
    int rate_num = 5;
    int rate_den = 6;
};

/// The 1/2/4/8-channel rows used for 802.11ac at p_e < 10%.
std::vector<McsEntry> default_mcs_table();

/// L_DBPS = K_m * R * xi(n).
double bits_per_symbol(const McsEntry& entry);

/// ceil(bits / L_DBPS) without floating point.
long symbols_for(long bits, const McsEntry& entry);

/// One A-MPDU transmission plus SIFS, block ACK at the single-channel rate,
/// DIFS and one backoff slot: 1/mu_n.
double tx_duration(const McsEntry& entry, const McsEntry& basic, const PhyParams& params);

/// Looks up width `n` and the width-1 row in `table`; throws ConfigError
/// when either is missing.
double tx_duration(int n, const PhyParams& params, std::span<const McsEntry> table);

/// Continuous access rate with the same mean as a uniform [0, CW-1] slot
/// counter: 2 / ((CW - 1) T_slot). Throws ConfigError for CW < 2.
double cw_to_lambda(int cw, double t_slot);

/// mu_n = 1 / tx_duration(n) for every width in `widths`.
MuTable mu_table(const PhyParams& params, std::span<const McsEntry> table, const std::set<int>& widths);

/// Every width that appears in the allowed-channel sets of the WLANs.
std::set<int> required_widths(const std::vector<WlanConfig>& wlans, Scheme scheme, int n_basic);

}  // namespace dcb
