#pragma once

#include "dcbnet/ctmc.hpp"
#include "dcbnet/solver.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace dcb {

/// Per-WLAN throughput in bit/s: L_X * sum_s mu_{n(X,s)} pi_s * (1 - p_e),
/// with mu_0 = 0 for states where X is idle.
std::vector<double> throughput(const Ctmc& ctmc, const StationaryDistribution& pi, double p_e);

/// Jain's index (sum x)^2 / (M sum x^2), in (0, 1]. With `normalized` false
/// the M factor is dropped, giving a value in [1, M]. Throws ConfigError when
/// every value is zero.
double jfi(std::span<const double> values, bool normalized = true);

/// Average width per transmission start of each WLAN, weighted by the
/// stationary flow of its forward transitions. Zero for WLANs that never
/// start a transmission.
std::vector<double> expected_tx_width(const Ctmc& ctmc, const StationaryDistribution& pi);

struct MetricsReport {
    std::vector<std::string> wlan_ids;
    std::vector<double> per_wlan_throughput;
    double aggregate = 0.0;
    double jfi = 0.0;
    std::vector<double> expected_width;
    std::vector<std::string> state_labels;
    std::vector<double> occupancy;
};

MetricsReport compute_metrics(const Ctmc& ctmc, const StationaryDistribution& pi, double p_e);

/// Rows: wlan_id,throughput_bps,expected_width; then aggregate and jfi rows.
void write_metrics_csv(std::ostream& os, const MetricsReport& report);

}  // namespace dcb
