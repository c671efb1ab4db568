#include "dcbnet/phy80211.hpp"

#include "dcbnet/error.hpp"

#include <algorithm>

namespace dcb {

std::vector<McsEntry> default_mcs_table() {
    return {
        {1, 52, 6, 5, 6},   // 64-QAM 5/6
        {2, 108, 6, 3, 4},  // 64-QAM 3/4
        {4, 234, 4, 3, 4},  // 16-QAM 3/4
        {8, 468, 4, 1, 2},  // 16-QAM 1/2
    };
}

double bits_per_symbol(const McsEntry& e) {
    return static_cast<double>(e.modulation_bits) * e.data_subcarriers * e.rate_num / e.rate_den;
}

long symbols_for(long bits, const McsEntry& e) {
    // ceil(bits / (K_m * xi * num / den)) = ceil(bits * den / (K_m * xi * num))
    const long num = bits * e.rate_den;
    const long den = static_cast<long>(e.modulation_bits) * e.data_subcarriers * e.rate_num;
    if (den <= 0) throw ConfigError("MCS entry for width " + std::to_string(e.width) + " has no data bits");
    return (num + den - 1) / den;
}

double tx_duration(const McsEntry& entry, const McsEntry& basic, const PhyParams& p) {
    const long data_bits =
        p.service_field + p.aggregated * (p.mpdu_delimiter + p.mac_header + p.packet_bits) + p.tail_bits;
    const long ack_bits = p.service_field + p.block_ack + p.tail_bits;
    return 2.0 * p.t_phy + static_cast<double>(symbols_for(data_bits, entry)) * p.t_symbol + p.t_sifs +
           static_cast<double>(symbols_for(ack_bits, basic)) * p.t_symbol + p.t_difs + p.t_slot;
}

namespace {

const McsEntry& lookup(std::span<const McsEntry> table, int n) {
    const auto it = std::find_if(table.begin(), table.end(), [n](const McsEntry& e) { return e.width == n; });
    if (it == table.end()) throw ConfigError("no MCS entry for channel width " + std::to_string(n));
    return *it;
}

}  // namespace

double tx_duration(int n, const PhyParams& params, std::span<const McsEntry> table) {
    return tx_duration(lookup(table, n), lookup(table, 1), params);
}

double cw_to_lambda(int cw, double t_slot) {
    if (cw < 2) throw ConfigError("contention window must be >= 2, got " + std::to_string(cw));
    if (!(t_slot > 0.0)) throw ConfigError("slot duration must be > 0");
    return 2.0 / ((cw - 1) * t_slot);
}

MuTable mu_table(const PhyParams& params, std::span<const McsEntry> table, const std::set<int>& widths) {
    MuTable mu;
    for (int n : widths) mu[n] = 1.0 / tx_duration(n, params, table);
    return mu;
}

std::set<int> required_widths(const std::vector<WlanConfig>& wlans, Scheme scheme, int n_basic) {
    std::set<int> widths;
    for (const auto& w : wlans)
        for (const auto& c : primary_channels(w, scheme, n_basic)) widths.insert(c.len);
    return widths;
}

}  // namespace dcb
