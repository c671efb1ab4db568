#pragma once

#include "dcbnet/channels.hpp"
#include "dcbnet/ctmc.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dcb {

enum class DistKind { Exponential, Uniform, Deterministic };

/// Accepts E/U/D or the full lower-case names; throws ConfigError otherwise.
DistKind parse_dist(std::string_view name);
char dist_letter(DistKind k);

/// Uniform is supported on [0, 2 * mean]; Deterministic is the point mass.
struct DistSpec {
    DistKind kind = DistKind::Exponential;
    double mean = 1.0;

    double sample(std::mt19937_64& rng) const;
};

enum class SimMode { Continuous, Slotted };

struct SimConfig {
    SimMode mode = SimMode::Continuous;
    /// Continuous mode: backoff law with mean 1/access_rate of the WLAN.
    DistKind backoff = DistKind::Exponential;
    /// Transmission-time law with mean 1/mu_n.
    DistKind tx_time = DistKind::Exponential;
    /// Slotted mode: counter uniform on [0, cw - 1], one decrement per idle slot.
    int cw = 16;
    double t_slot = 9e-6;
    MuTable mu;
    double p_e = 0.0;
    double horizon = 100.0;
    /// Discarded prefix; defaults to 5% of the horizon.
    std::optional<double> warmup;
    std::uint64_t seed = 1;
    int replications = 1;
    /// Time-weighted state occupancy (continuous mode only; costs a key per event).
    bool track_occupancy = true;
    /// Worker threads for the replication fan-out; 0 picks hardware concurrency.
    unsigned threads = 1;

    double warmup_time() const { return warmup.value_or(0.05 * horizon); }
};

struct ReplicationResult {
    std::uint64_t seed = 0;
    std::vector<double> throughput;      // bit/s, successes only
    std::vector<double> expected_width;  // mean width per transmission start, 0 if none
    std::vector<std::uint64_t> starts;
    std::vector<std::uint64_t> successes;
    std::vector<std::uint64_t> failures;  // collided or lost to p_e
    std::uint64_t collided = 0;           // transmissions lost to collisions
    /// State label -> fraction of the measured interval (continuous mode).
    std::map<std::string, double> occupancy;
};

struct SimReport {
    std::vector<std::string> wlan_ids;
    std::vector<double> throughput_mean;
    std::vector<double> throughput_se;        // standard error over replications
    std::vector<double> throughput_ci_half;   // 95% Student-t half-width
    std::vector<double> expected_width;       // mean over replications with starts
    std::map<std::string, double> occupancy;  // mean over replications
    std::map<std::string, double> occupancy_se;
    std::uint64_t collided = 0;
    std::uint64_t successes = 0;
    std::uint64_t failures = 0;
    std::vector<ReplicationResult> replications;
};

/// One replication with the given seed.
ReplicationResult simulate_once(const std::vector<WlanConfig>& wlans,
                                Scheme scheme,
                                int n_basic,
                                const SimConfig& config,
                                std::uint64_t seed);

/// `config.replications` independent runs with seeds derived from
/// `config.seed`, merged in replication order.
SimReport simulate(const std::vector<WlanConfig>& wlans, Scheme scheme, int n_basic, const SimConfig& config);

/// Seed of replication `index` under base seed `base`.
std::uint64_t replication_seed(std::uint64_t base, std::uint64_t index);

/// 97.5% Student-t quantile with `dof` degrees of freedom.
double t_quantile_975(int dof);

struct SensitivityRow {
    DistKind backoff = DistKind::Exponential;
    DistKind tx_time = DistKind::Exponential;
    SimReport report;
    std::vector<double> delta;     // throughput_mean - E/E throughput_mean
    std::vector<double> delta_se;  // sqrt(se^2 + se_EE^2)
};

/// Runs every (backoff, tx) pair with identical means and seeds; the E/E
/// reference is run once and reported first.
std::vector<SensitivityRow> sensitivity_suite(const std::vector<WlanConfig>& wlans,
                                              Scheme scheme,
                                              int n_basic,
                                              const SimConfig& base,
                                              const std::vector<std::pair<DistKind, DistKind>>& pairs);

inline constexpr int kDenseBasicChannels = 24;
inline constexpr int kDenseChannelWidth = 8;

/// Traffic parameters copied into every generated WLAN.
struct DenseTemplate {
    int nodes = 1;
    double access_rate = 2.0 / (15 * 9e-6);
    double packet_bits = 768000.0;
};

/// M WLANs on 24 basic channels, each assigned 8 contiguous channels with
/// the leftmost uniform on {1..17} and the primary uniform among the 8.
std::vector<WlanConfig> random_dense_scenario(int m, std::mt19937_64& rng, const DenseTemplate& tmpl = {});

struct Stat {
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// Mean and 95% Student-t interval; a single sample gives a zero-width interval.
Stat summarize(const std::vector<double>& samples);

struct SweepPoint {
    int m = 0;
    Scheme scheme = Scheme::P2DCB;
    Stat aggregate;  // bit/s
    Stat jfi;
    Stat width;      // mean over WLANs with at least one transmission
    std::vector<double> aggregate_samples;
    std::vector<double> jfi_samples;
    std::vector<double> width_samples;
};

struct SweepConfig {
    std::vector<int> m_values;
    int replications = 2;
    SimConfig sim;  // horizon, seed, mu, p_e and distributions; replications ignored
    DenseTemplate wlan;
};

/// For each M, `replications` random scenarios simulated under P2DCB (DCB)
/// and SCB with the same assignment and seed. Points come out ordered by M,
/// DCB before SCB.
std::vector<SweepPoint> dcb_vs_scb_sweep(const SweepConfig& config);

void write_sim_csv(std::ostream& os, const SimReport& report);
void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points);

}  // namespace dcb
