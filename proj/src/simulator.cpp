#include "dcbnet/simulator.hpp"

#include "dcbnet/error.hpp"
#include "dcbnet/metrics.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <ostream>
#include <queue>
#include <thread>

namespace dcb {

DistKind parse_dist(std::string_view name) {
    if (name == "E" || name == "exponential" || name == "exp") return DistKind::Exponential;
    if (name == "U" || name == "uniform") return DistKind::Uniform;
    if (name == "D" || name == "deterministic" || name == "det") return DistKind::Deterministic;
    throw ConfigError("unknown distribution '" + std::string(name) + "' (expected E, U or D)");
}

char dist_letter(DistKind k) {
    switch (k) {
        case DistKind::Exponential: return 'E';
        case DistKind::Uniform: return 'U';
        case DistKind::Deterministic: return 'D';
    }
    return '?';
}

double DistSpec::sample(std::mt19937_64& rng) const {
    switch (kind) {
        case DistKind::Exponential: return std::exponential_distribution<double>(1.0 / mean)(rng);
        case DistKind::Uniform: return std::uniform_real_distribution<double>(0.0, 2.0 * mean)(rng);
        case DistKind::Deterministic: return mean;
    }
    return mean;
}

std::uint64_t replication_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 finalizer over (base, index)
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double t_quantile_975(int dof) {
    if (dof < 1) return 0.0;
    return boost::math::quantile(boost::math::students_t(dof), 0.975);
}

namespace {

enum class NodeState { Counting, Frozen, Transmitting };

struct Node {
    std::size_t wlan = 0;
    int primary = 1;
    NodeState state = NodeState::Frozen;
    double remaining = 0.0;  // continuous: backoff time left
    long counter = 0;        // slotted: idle slots left
    double resumed_at = 0.0;
    std::uint64_t version = 0;
};

struct Tx {
    std::size_t node = 0;
    Channel channel;
    bool collided = false;
};

struct Event {
    double time = 0.0;
    int priority = 0;  // transmission ends before backoff expiries at equal times
    std::uint64_t seq = 0;
    std::size_t id = 0;
    std::uint64_t version = 0;

    bool operator>(const Event& o) const {
        if (time != o.time) return time > o.time;
        if (priority != o.priority) return priority > o.priority;
        return seq > o.seq;
    }
};

constexpr int kEndPriority = 0;
constexpr int kExpiryPriority = 1;
// Slotted-mode expiries closer than this are the same slot boundary.
constexpr double kSameSlot = 1e-9;

class Engine {
public:
    Engine(const std::vector<WlanConfig>& wlans, Scheme scheme, int n_basic, const SimConfig& cfg, std::uint64_t seed)
        : wlans_(wlans), cfg_(cfg), rng_(seed), n_basic_(n_basic), busy_count_(static_cast<std::size_t>(n_basic) + 1, 0),
          by_primary_(static_cast<std::size_t>(n_basic) + 1), active_{std::vector<std::optional<Channel>>(wlans.size())} {
        if (!(cfg.horizon > 0.0)) throw ConfigError("horizon must be > 0");
        warmup_ = cfg.warmup_time();
        if (!(warmup_ >= 0.0 && warmup_ < cfg.horizon)) throw ConfigError("warmup must be in [0, horizon)");
        if (!(cfg.p_e >= 0.0 && cfg.p_e <= 1.0)) throw ConfigError("packet error probability must be in [0, 1]");
        if (cfg.mode == SimMode::Slotted) {
            if (cfg.cw < 1) throw ConfigError("contention window must be >= 1");
            if (!(cfg.t_slot > 0.0)) throw ConfigError("slot duration must be > 0");
        }
        for (std::size_t x = 0; x < wlans.size(); ++x) {
            validate_wlan(wlans[x], n_basic);
            options_.push_back(primary_channels(wlans[x], scheme, n_basic));
            for (const auto& c : options_.back()) tx_mean(c.len);
            for (int u = 0; u < wlans[x].nodes; ++u) {
                by_primary_[static_cast<std::size_t>(wlans[x].primary)].push_back(nodes_.size());
                nodes_.push_back({x, wlans[x].primary});
            }
        }
        result_.seed = seed;
        result_.throughput.assign(wlans.size(), 0.0);
        result_.expected_width.assign(wlans.size(), 0.0);
        result_.starts.assign(wlans.size(), 0);
        result_.successes.assign(wlans.size(), 0);
        result_.failures.assign(wlans.size(), 0);
        width_sum_.assign(wlans.size(), 0.0);
    }

    ReplicationResult run() {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            fresh_backoff(i);
            start_counting(i, 0.0);
        }
        while (!queue_.empty()) {
            const Event ev = queue_.top();
            if (ev.time > cfg_.horizon) break;
            queue_.pop();
            if (ev.priority == kEndPriority) {
                end_tx(ev.id, ev.time);
            } else if (nodes_[ev.id].version == ev.version && nodes_[ev.id].state == NodeState::Counting) {
                if (cfg_.mode == SimMode::Continuous)
                    expire({ev.id}, ev.time);
                else
                    expire(collect_slot(ev), ev.time);
            }
        }
        advance_occupancy(cfg_.horizon);

        const double span = cfg_.horizon - warmup_;
        for (std::size_t x = 0; x < wlans_.size(); ++x) {
            result_.throughput[x] = static_cast<double>(result_.successes[x]) * wlans_[x].packet_bits / span;
            result_.expected_width[x] =
                result_.starts[x] ? width_sum_[x] / static_cast<double>(result_.starts[x]) : 0.0;
        }
        if (cfg_.mode == SimMode::Continuous && cfg_.track_occupancy) {
            for (const auto& [key, dt] : occupancy_) {
                NetworkState s{std::vector<std::optional<Channel>>(wlans_.size())};
                for (std::size_t x = 0; x < wlans_.size(); ++x)
                    if (key[2 * x] != 0) s.active[x] = Channel{key[2 * x], key[2 * x + 1]};
                result_.occupancy[state_label(s, wlans_)] = dt / span;
            }
        }
        return std::move(result_);
    }

private:
    double tx_mean(int width) const {
        const auto it = cfg_.mu.find(width);
        if (it == cfg_.mu.end() || !(it->second > 0.0))
            throw ConfigError("no transmission rate mu_" + std::to_string(width) + " for width " + std::to_string(width));
        return 1.0 / it->second;
    }

    bool primary_busy(const Node& n) const { return busy_count_[static_cast<std::size_t>(n.primary)] > 0; }

    std::uint64_t busy_mask() const {
        std::uint64_t m = 0;
        for (int b = 1; b <= n_basic_; ++b)
            if (busy_count_[static_cast<std::size_t>(b)] > 0) m |= std::uint64_t{1} << (b - 1);
        return m;
    }

    void push(double time, int priority, std::size_t id, std::uint64_t version) {
        queue_.push({time, priority, seq_++, id, version});
    }

    void fresh_backoff(std::size_t i) {
        Node& n = nodes_[i];
        if (cfg_.mode == SimMode::Continuous)
            n.remaining = DistSpec{cfg_.backoff, 1.0 / wlans_[n.wlan].access_rate}.sample(rng_);
        else
            n.counter = std::uniform_int_distribution<long>(0, cfg_.cw - 1)(rng_);
    }

    void start_counting(std::size_t i, double now) {
        Node& n = nodes_[i];
        ++n.version;
        if (primary_busy(n)) {
            n.state = NodeState::Frozen;
            return;
        }
        n.state = NodeState::Counting;
        n.resumed_at = now;
        const double wait = cfg_.mode == SimMode::Continuous ? n.remaining : static_cast<double>(n.counter) * cfg_.t_slot;
        push(now + wait, kExpiryPriority, i, n.version);
    }

    void freeze(std::size_t i, double now) {
        Node& n = nodes_[i];
        if (n.state != NodeState::Counting) return;
        ++n.version;
        n.state = NodeState::Frozen;
        if (cfg_.mode == SimMode::Continuous) {
            n.remaining = std::max(0.0, n.remaining - (now - n.resumed_at));
        } else {
            // Only fully elapsed idle slots count.
            const auto elapsed = static_cast<long>(std::floor((now - n.resumed_at) / cfg_.t_slot + 1e-6));
            n.counter = std::max(0L, n.counter - elapsed);
        }
    }

    std::vector<std::size_t> collect_slot(const Event& first) {
        std::vector<std::size_t> batch{first.id};
        while (!queue_.empty()) {
            const Event& ev = queue_.top();
            if (ev.time > first.time + kSameSlot) break;
            if (ev.priority == kExpiryPriority && nodes_[ev.id].version == ev.version &&
                nodes_[ev.id].state == NodeState::Counting && ev.id != first.id)
                batch.push_back(ev.id);
            if (ev.priority == kEndPriority) break;
            queue_.pop();
        }
        return batch;
    }

    void expire(const std::vector<std::size_t>& batch, double now) {
        // Every node of the batch senses the medium as it was before any of
        // them started.
        const std::uint64_t sensed = busy_mask();
        std::vector<std::size_t> started;
        for (std::size_t i : batch) {
            Node& n = nodes_[i];
            const auto candidates = widest_free(options_[n.wlan], sensed);
            if (candidates.empty()) {
                // No allowed channel is free (SCB with a partly busy channel): back off again.
                fresh_backoff(i);
                start_counting(i, now);
                continue;
            }
            const Channel c = candidates.size() == 1
                                  ? candidates.front()
                                  : candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng_)];
            ++n.version;
            n.state = NodeState::Transmitting;
            started.push_back(open_tx(i, c, now));
        }
        for (std::size_t a = 0; a < started.size(); ++a)
            for (std::size_t b = a + 1; b < started.size(); ++b)
                if (txs_[started[a]].channel.overlaps(txs_[started[b]].channel))
                    txs_[started[a]].collided = txs_[started[b]].collided = true;
        for (std::size_t t : started) occupy(t, now);
    }

    std::size_t open_tx(std::size_t node, const Channel& c, double now) {
        const std::size_t wlan = nodes_[node].wlan;
        std::size_t slot;
        if (!free_tx_.empty()) {
            slot = free_tx_.back();
            free_tx_.pop_back();
        } else {
            slot = txs_.size();
            txs_.emplace_back();
        }
        txs_[slot] = {node, c, false};
        if (now >= warmup_) {
            ++result_.starts[wlan];
            width_sum_[wlan] += c.len;
        }
        const double duration = DistSpec{cfg_.tx_time, tx_mean(c.len)}.sample(rng_);
        push(now + duration, kEndPriority, slot, 0);
        return slot;
    }

    void occupy(std::size_t slot, double now) {
        const Tx& tx = txs_[slot];
        advance_occupancy(now);
        active_.active[nodes_[tx.node].wlan] = tx.channel;
        for (int b = tx.channel.lo; b <= tx.channel.hi(); ++b) {
            auto& count = busy_count_[static_cast<std::size_t>(b)];
            if (++count == 1) {
                for (std::size_t i : by_primary_[static_cast<std::size_t>(b)]) freeze(i, now);
            } else if (cfg_.mode == SimMode::Continuous) {
                throw InternalError("overlapping transmissions in continuous mode");
            }
        }
    }

    void end_tx(std::size_t slot, double now) {
        Tx& tx = txs_[slot];
        const std::size_t wlan = nodes_[tx.node].wlan;
        if (now >= warmup_) {
            const bool ok = !tx.collided && std::bernoulli_distribution(1.0 - cfg_.p_e)(rng_);
            if (ok) {
                ++result_.successes[wlan];
            } else {
                ++result_.failures[wlan];
                if (tx.collided) ++result_.collided;
            }
        }
        advance_occupancy(now);
        if (active_.active[wlan] == tx.channel) active_.active[wlan].reset();
        std::vector<int> freed;
        for (int b = tx.channel.lo; b <= tx.channel.hi(); ++b)
            if (--busy_count_[static_cast<std::size_t>(b)] == 0) freed.push_back(b);
        const std::size_t sender = tx.node;
        free_tx_.push_back(slot);

        fresh_backoff(sender);
        start_counting(sender, now);
        for (int b : freed)
            for (std::size_t i : by_primary_[static_cast<std::size_t>(b)])
                if (i != sender && nodes_[i].state == NodeState::Frozen) start_counting(i, now);
    }

    void advance_occupancy(double now) {
        if (cfg_.mode != SimMode::Continuous || !cfg_.track_occupancy) return;
        const double from = std::max(last_change_, warmup_);
        const double to = std::min(now, cfg_.horizon);
        if (to > from) occupancy_[active_.key()] += to - from;
        last_change_ = std::max(last_change_, now);
    }

    const std::vector<WlanConfig>& wlans_;
    const SimConfig& cfg_;
    std::mt19937_64 rng_;
    int n_basic_;
    double warmup_ = 0.0;
    std::vector<std::vector<Channel>> options_;
    std::vector<Node> nodes_;
    std::vector<int> busy_count_;
    std::vector<std::vector<std::size_t>> by_primary_;
    std::vector<Tx> txs_;
    std::vector<std::size_t> free_tx_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::uint64_t seq_ = 0;
    NetworkState active_;
    double last_change_ = 0.0;
    std::map<std::string, double> occupancy_;
    std::vector<double> width_sum_;
    ReplicationResult result_;
};

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
}

double stddev(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

ReplicationResult simulate_once(const std::vector<WlanConfig>& wlans,
                                Scheme scheme,
                                int n_basic,
                                const SimConfig& config,
                                std::uint64_t seed) {
    return Engine(wlans, scheme, n_basic, config, seed).run();
}

SimReport simulate(const std::vector<WlanConfig>& wlans, Scheme scheme, int n_basic, const SimConfig& config) {
    if (config.replications < 1) throw ConfigError("replications must be >= 1");
    const auto reps = static_cast<std::size_t>(config.replications);
    SimReport r;
    r.replications.resize(reps);
    parallel_for(reps, config.threads, [&](std::size_t i) {
        r.replications[i] = simulate_once(wlans, scheme, n_basic, config, replication_seed(config.seed, i));
    });

    const std::size_t m = wlans.size();
    for (const auto& w : wlans) r.wlan_ids.push_back(w.id);
    r.throughput_mean.assign(m, 0.0);
    r.throughput_se.assign(m, 0.0);
    r.throughput_ci_half.assign(m, 0.0);
    r.expected_width.assign(m, 0.0);
    const double tq = t_quantile_975(config.replications - 1);
    for (std::size_t x = 0; x < m; ++x) {
        std::vector<double> v;
        double width = 0.0;
        std::size_t with_starts = 0;
        for (const auto& rep : r.replications) {
            v.push_back(rep.throughput[x]);
            if (rep.starts[x]) {
                width += rep.expected_width[x];
                ++with_starts;
            }
        }
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(reps);
        r.throughput_mean[x] = mean;
        r.throughput_se[x] = stddev(v, mean) / std::sqrt(static_cast<double>(reps));
        r.throughput_ci_half[x] = tq * r.throughput_se[x];
        r.expected_width[x] = with_starts ? width / static_cast<double>(with_starts) : 0.0;
    }

    std::map<std::string, std::vector<double>> occ;
    for (std::size_t i = 0; i < reps; ++i)
        for (const auto& [label, f] : r.replications[i].occupancy) {
            auto& v = occ[label];
            v.resize(reps, 0.0);
            v[i] = f;
        }
    for (const auto& [label, v] : occ) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(reps);
        r.occupancy[label] = mean;
        r.occupancy_se[label] = stddev(v, mean) / std::sqrt(static_cast<double>(reps));
    }
    for (const auto& rep : r.replications) {
        r.collided += rep.collided;
        r.successes += std::accumulate(rep.successes.begin(), rep.successes.end(), std::uint64_t{0});
        r.failures += std::accumulate(rep.failures.begin(), rep.failures.end(), std::uint64_t{0});
    }
    return r;
}

std::vector<SensitivityRow> sensitivity_suite(const std::vector<WlanConfig>& wlans,
                                              Scheme scheme,
                                              int n_basic,
                                              const SimConfig& base,
                                              const std::vector<std::pair<DistKind, DistKind>>& pairs) {
    const auto run = [&](DistKind b, DistKind t) {
        SimConfig cfg = base;
        cfg.mode = SimMode::Continuous;
        cfg.backoff = b;
        cfg.tx_time = t;
        SensitivityRow row;
        row.backoff = b;
        row.tx_time = t;
        row.report = simulate(wlans, scheme, n_basic, cfg);
        return row;
    };
    std::vector<SensitivityRow> rows;
    rows.push_back(run(DistKind::Exponential, DistKind::Exponential));
    for (const auto& [b, t] : pairs) {
        if (b == DistKind::Exponential && t == DistKind::Exponential) continue;
        rows.push_back(run(b, t));
    }
    const auto& ref = rows.front().report;
    for (auto& row : rows) {
        for (std::size_t x = 0; x < wlans.size(); ++x) {
            row.delta.push_back(row.report.throughput_mean[x] - ref.throughput_mean[x]);
            const double se = &row == &rows.front() ? 0.0
                                                    : std::hypot(row.report.throughput_se[x], ref.throughput_se[x]);
            row.delta_se.push_back(se);
        }
    }
    return rows;
}

std::vector<WlanConfig> random_dense_scenario(int m, std::mt19937_64& rng, const DenseTemplate& tmpl) {
    if (m < 1) throw ConfigError("WLAN count must be >= 1");
    std::uniform_int_distribution<int> left(1, kDenseBasicChannels - kDenseChannelWidth + 1);
    std::uniform_int_distribution<int> offset(0, kDenseChannelWidth - 1);
    std::vector<WlanConfig> out;
    for (int i = 0; i < m; ++i) {
        WlanConfig w;
        w.id = "W" + std::to_string(i + 1);
        w.assigned = {left(rng), kDenseChannelWidth};
        w.primary = w.assigned.lo + offset(rng);
        w.nodes = tmpl.nodes;
        w.access_rate = tmpl.access_rate;
        w.packet_bits = tmpl.packet_bits;
        out.push_back(std::move(w));
    }
    return out;
}

Stat summarize(const std::vector<double>& samples) {
    Stat s;
    if (samples.empty()) return s;
    s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
    const double half = t_quantile_975(static_cast<int>(samples.size()) - 1) * stddev(samples, s.mean) /
                        std::sqrt(static_cast<double>(samples.size()));
    s.ci_low = s.mean - half;
    s.ci_high = s.mean + half;
    return s;
}

std::vector<SweepPoint> dcb_vs_scb_sweep(const SweepConfig& config) {
    if (config.replications < 2) throw ConfigError("sweep needs at least 2 replications");
    std::vector<SweepPoint> points;
    for (int m : config.m_values) {
        SweepPoint dcb;
        dcb.m = m;
        SweepPoint scb;
        scb.m = m;
        scb.scheme = Scheme::SCB;
        const auto reps = static_cast<std::size_t>(config.replications);
        struct Sample {
            double agg[2], fair[2], width[2];
        };
        std::vector<Sample> samples(reps);
        parallel_for(reps, config.sim.threads, [&](std::size_t r) {
            const std::uint64_t seed = replication_seed(config.sim.seed ^ (static_cast<std::uint64_t>(m) << 32), r);
            std::mt19937_64 scenario_rng(seed);
            const auto wlans = random_dense_scenario(m, scenario_rng, config.wlan);
            SimConfig cfg = config.sim;
            cfg.track_occupancy = false;
            const Scheme schemes[2] = {Scheme::P2DCB, Scheme::SCB};
            for (int k = 0; k < 2; ++k) {
                const auto rep = simulate_once(wlans, schemes[k], kDenseBasicChannels, cfg, replication_seed(seed, 1));
                const double agg = std::accumulate(rep.throughput.begin(), rep.throughput.end(), 0.0);
                double width = 0.0;
                int counted = 0;
                for (std::size_t x = 0; x < wlans.size(); ++x)
                    if (rep.starts[x]) {
                        width += rep.expected_width[x];
                        ++counted;
                    }
                samples[r].agg[k] = agg;
                samples[r].fair[k] = agg > 0.0 ? jfi(rep.throughput) : 0.0;
                samples[r].width[k] = counted ? width / counted : 0.0;
            }
        });
        for (const auto& s : samples) {
            dcb.aggregate_samples.push_back(s.agg[0]);
            scb.aggregate_samples.push_back(s.agg[1]);
            dcb.jfi_samples.push_back(s.fair[0]);
            scb.jfi_samples.push_back(s.fair[1]);
            dcb.width_samples.push_back(s.width[0]);
            scb.width_samples.push_back(s.width[1]);
        }
        for (auto* p : {&dcb, &scb}) {
            p->aggregate = summarize(p->aggregate_samples);
            p->jfi = summarize(p->jfi_samples);
            p->width = summarize(p->width_samples);
        }
        points.push_back(std::move(dcb));
        points.push_back(std::move(scb));
    }
    return points;
}

void write_sim_csv(std::ostream& os, const SimReport& report) {
    os << "replication,seed,wlan_id,throughput_bps,expected_width,starts,successes,failures\n";
    for (std::size_t i = 0; i < report.replications.size(); ++i) {
        const auto& rep = report.replications[i];
        for (std::size_t x = 0; x < report.wlan_ids.size(); ++x)
            os << i << ',' << rep.seed << ',' << report.wlan_ids[x] << ',' << rep.throughput[x] << ','
               << rep.expected_width[x] << ',' << rep.starts[x] << ',' << rep.successes[x] << ',' << rep.failures[x]
               << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
    os << "M,scheme,aggregate_mean_bps,aggregate_ci_low,aggregate_ci_high,jfi_mean,jfi_ci_low,jfi_ci_high,"
          "width_mean,width_ci_low,width_ci_high\n";
    for (const auto& p : points) {
        os << p.m << ',' << (p.scheme == Scheme::SCB ? "SCB" : "DCB") << ',' << p.aggregate.mean << ','
           << p.aggregate.ci_low << ',' << p.aggregate.ci_high << ',' << p.jfi.mean << ',' << p.jfi.ci_low << ','
           << p.jfi.ci_high << ',' << p.width.mean << ',' << p.width.ci_low << ',' << p.width.ci_high << '\n';
    }
}

}  // namespace dcb
