#include "dcbnet/metrics.hpp"

#include "dcbnet/error.hpp"

#include <numeric>
#include <ostream>

namespace dcb {

std::vector<double> throughput(const Ctmc& ctmc, const StationaryDistribution& pi, double p_e) {
    if (!(p_e >= 0.0 && p_e <= 1.0)) throw ConfigError("packet error probability must be in [0, 1]");
    if (pi.size() != ctmc.size()) throw ConfigError("distribution does not match the chain");
    std::vector<double> out(ctmc.wlans.size(), 0.0);
    for (std::size_t s = 0; s < ctmc.size(); ++s) {
        const auto& active = ctmc.states[s].active;
        for (std::size_t x = 0; x < active.size(); ++x)
            if (active[x]) out[x] += ctmc.mu.at(active[x]->len) * pi[s];
    }
    for (std::size_t x = 0; x < out.size(); ++x) out[x] *= ctmc.wlans[x].packet_bits * (1.0 - p_e);
    return out;
}

double jfi(std::span<const double> values, bool normalized) {
    double sum = 0.0;
    double sq = 0.0;
    for (double v : values) {
        sum += v;
        sq += v * v;
    }
    if (values.empty() || sq == 0.0) throw ConfigError("fairness index undefined for all-zero throughputs");
    const double j = sum * sum / sq;
    return normalized ? j / static_cast<double>(values.size()) : j;
}

std::vector<double> expected_tx_width(const Ctmc& ctmc, const StationaryDistribution& pi) {
    std::vector<double> weighted(ctmc.wlans.size(), 0.0);
    std::vector<double> flow(ctmc.wlans.size(), 0.0);
    for (const auto& t : ctmc.transitions) {
        if (t.direction != Direction::Forward) continue;
        const double f = pi[t.from] * t.rate;
        flow[t.wlan] += f;
        weighted[t.wlan] += f * t.width;
    }
    for (std::size_t x = 0; x < flow.size(); ++x) weighted[x] = flow[x] > 0.0 ? weighted[x] / flow[x] : 0.0;
    return weighted;
}

MetricsReport compute_metrics(const Ctmc& ctmc, const StationaryDistribution& pi, double p_e) {
    MetricsReport r;
    for (const auto& w : ctmc.wlans) r.wlan_ids.push_back(w.id);
    r.per_wlan_throughput = throughput(ctmc, pi, p_e);
    r.aggregate = std::accumulate(r.per_wlan_throughput.begin(), r.per_wlan_throughput.end(), 0.0);
    r.jfi = r.aggregate > 0.0 ? jfi(r.per_wlan_throughput) : 0.0;
    r.expected_width = expected_tx_width(ctmc, pi);
    for (std::size_t s = 0; s < ctmc.size(); ++s) r.state_labels.push_back(ctmc.label(s));
    r.occupancy = pi.pi;
    return r;
}

void write_metrics_csv(std::ostream& os, const MetricsReport& report) {
    os << "wlan_id,throughput_bps,expected_width\n";
    for (std::size_t x = 0; x < report.wlan_ids.size(); ++x)
        os << report.wlan_ids[x] << ',' << report.per_wlan_throughput[x] << ',' << report.expected_width[x] << '\n';
    os << "aggregate," << report.aggregate << ",\n";
    os << "jfi," << report.jfi << ",\n";
}

}  // namespace dcb
