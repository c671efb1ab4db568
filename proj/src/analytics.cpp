#include "dcbnet/analytics.hpp"

#include "dcbnet/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <random>

namespace dcb {

DominanceReport dominant_states(const Ctmc& ctmc, double threshold, double lambda_scale) {
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("dominance threshold must be in (0, 1)");
    DominanceReport r;
    r.threshold_used = threshold;
    r.pi = steady_state(rate_matrix(ctmc)).pi;
    r.pi_scaled = steady_state(rate_matrix(scale_access_rates(ctmc, lambda_scale))).pi;
    for (std::size_t s = 0; s < ctmc.size(); ++s) {
        if (r.pi[s] >= threshold && r.pi_scaled[s] >= threshold) {
            r.dominant.push_back(s);
            r.locally_maximal.push_back(is_locally_maximal(ctmc, s));
            r.total_mass += r.pi[s];
        }
    }
    return r;
}

namespace {

// Embedded jump chain: for each state, successor states and probabilities.
struct JumpChain {
    std::vector<double> exit_rate;
    std::vector<std::vector<std::pair<std::size_t, double>>> next;

    explicit JumpChain(const Ctmc& ctmc) : exit_rate(ctmc.size(), 0.0), next(ctmc.size()) {
        std::vector<std::map<std::size_t, double>> merged(ctmc.size());
        for (const auto& t : ctmc.transitions) {
            merged[t.from][t.to] += t.rate;
            exit_rate[t.from] += t.rate;
        }
        for (std::size_t s = 0; s < ctmc.size(); ++s)
            for (const auto& [to, rate] : merged[s]) next[s].emplace_back(to, rate / exit_rate[s]);
    }

    template <class Rng>
    std::size_t jump(std::size_t s, Rng& rng) const {
        double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        for (const auto& [to, p] : next[s]) {
            if (u < p) return to;
            u -= p;
        }
        return next[s].back().first;
    }

    template <class Rng>
    double hold(std::size_t s, Rng& rng) const {
        return std::exponential_distribution<double>(exit_rate[s])(rng);
    }
};

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

}  // namespace

SwitchingMatrix switching_probabilities(const Ctmc& ctmc, std::span<const std::size_t> dominant) {
    if (dominant.empty()) throw ConfigError("switching probabilities need at least one dominant state");
    SwitchingMatrix m;
    m.states.assign(dominant.begin(), dominant.end());
    const std::size_t k = m.states.size();
    m.probs.assign(k, std::vector<double>(k, 0.0));
    if (k == 1 || ctmc.size() < 2) return m;

    const JumpChain chain(ctmc);
    for (std::size_t a = 0; a < k; ++a) {
        // Targets are the other dominant states; everything else is transient
        // for this first-passage problem, including the source itself.
        std::vector<long> target_col(ctmc.size(), -1);
        for (std::size_t b = 0, col = 0; b < k; ++b)
            if (b != a) target_col[m.states[b]] = static_cast<long>(col++);
        std::vector<long> row_of(ctmc.size(), -1);
        std::vector<std::size_t> free_states;
        for (std::size_t s = 0; s < ctmc.size(); ++s)
            if (target_col[s] < 0) {
                row_of[s] = static_cast<long>(free_states.size());
                free_states.push_back(s);
            }

        const auto n = static_cast<Eigen::Index>(free_states.size());
        Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n, n);
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(k - 1));
        for (Eigen::Index r = 0; r < n; ++r) {
            for (const auto& [to, p] : chain.next[free_states[static_cast<std::size_t>(r)]]) {
                if (target_col[to] >= 0)
                    rhs(r, target_col[to]) += p;
                else
                    lhs(r, row_of[to]) -= p;
            }
        }
        const Eigen::MatrixXd h = lhs.partialPivLu().solve(rhs);
        if (!h.allFinite()) throw InternalError("first-passage system is singular");
        const auto src_row = row_of[m.states[a]];
        for (std::size_t b = 0, col = 0; b < k; ++b)
            if (b != a) m.probs[a][b] = h(src_row, static_cast<Eigen::Index>(col++));
    }
    return m;
}

std::vector<std::vector<std::size_t>> group_dominants(const SwitchingMatrix& sw, double cutoff) {
    if (!(cutoff > 0.0 && cutoff < 1.0)) throw ConfigError("grouping cutoff must be in (0, 1)");
    const std::size_t k = sw.states.size();
    std::vector<std::size_t> parent(k);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    const auto root = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b)
            if (sw.probs[a][b] >= cutoff && sw.probs[b][a] >= cutoff) parent[root(b)] = root(a);

    std::vector<std::vector<std::size_t>> groups;
    std::map<std::size_t, std::size_t> slot;
    for (std::size_t a = 0; a < k; ++a) {
        const auto [it, inserted] = slot.try_emplace(root(a), groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(sw.states[a]);
    }
    return groups;
}

SojournReturnStats sojourn_return_times(const Ctmc& ctmc,
                                        const std::vector<std::vector<std::size_t>>& groups,
                                        double horizon,
                                        std::uint64_t seed) {
    if (!(horizon > 0.0)) throw ConfigError("horizon must be > 0");
    std::vector<long> group_of(ctmc.size(), -1);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (std::size_t s : groups[g]) {
            if (s >= ctmc.size()) throw ConfigError("group state index out of range");
            if (group_of[s] >= 0) throw ConfigError("groups must be disjoint");
            group_of[s] = static_cast<long>(g);
        }

    std::vector<std::vector<double>> sojourn(groups.size());
    std::vector<std::vector<double>> ret(groups.size());
    std::vector<double> left_at(groups.size(), -1.0);

    long current = -1;
    double since = 0.0;
    const auto enter = [&](std::size_t s, double t) {
        const long g = group_of[s];
        if (g < 0 || g == current) return;
        if (current >= 0) {
            sojourn[static_cast<std::size_t>(current)].push_back(t - since);
            left_at[static_cast<std::size_t>(current)] = t;
        }
        if (left_at[static_cast<std::size_t>(g)] >= 0.0) ret[static_cast<std::size_t>(g)].push_back(t - left_at[static_cast<std::size_t>(g)]);
        current = g;
        since = t;
    };

    if (ctmc.size() > 1) {
        const JumpChain chain(ctmc);
        std::mt19937_64 rng(seed);
        std::size_t s = 0;
        double t = 0.0;
        enter(s, t);
        while (true) {
            t += chain.hold(s, rng);
            if (t > horizon) break;
            s = chain.jump(s, rng);
            enter(s, t);
        }
    }

    SojournReturnStats out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        GroupTimes gt;
        gt.states = groups[g];
        gt.sojourn_samples = sojourn[g].size();
        gt.return_samples = ret[g].size();
        gt.median_sojourn = median(sojourn[g]);
        gt.median_return = median(ret[g]);
        gt.insufficient = gt.sojourn_samples == 0 || gt.return_samples == 0;
        out.groups.push_back(std::move(gt));
    }
    return out;
}

std::vector<OccupancyRow> occupancy_trace(const Ctmc& ctmc,
                                          double horizon,
                                          double window,
                                          std::uint64_t seed,
                                          std::size_t top_k) {
    if (!(horizon > 0.0) || !(window > 0.0)) throw ConfigError("horizon and window must be > 0");
    const auto windows = static_cast<std::size_t>(std::ceil(horizon / window));
    std::vector<std::map<std::size_t, double>> spent(windows);

    const auto credit = [&](std::size_t s, double from, double to) {
        to = std::min(to, horizon);
        while (from < to) {
            const auto w = std::min(static_cast<std::size_t>(from / window), windows - 1);
            const double edge = std::min(to, static_cast<double>(w + 1) * window);
            spent[w][s] += edge - from;
            from = edge;
        }
    };

    if (ctmc.size() == 1) {
        credit(0, 0.0, horizon);
    } else {
        const JumpChain chain(ctmc);
        std::mt19937_64 rng(seed);
        std::size_t s = 0;
        double t = 0.0;
        while (t < horizon) {
            const double next = t + chain.hold(s, rng);
            credit(s, t, next);
            t = next;
            s = chain.jump(s, rng);
        }
    }

    std::vector<OccupancyRow> rows;
    for (std::size_t w = 0; w < windows; ++w) {
        const double len = std::min(window, horizon - static_cast<double>(w) * window);
        std::vector<std::pair<std::size_t, double>> v(spent[w].begin(), spent[w].end());
        std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        if (top_k > 0 && v.size() > top_k) v.resize(top_k);
        for (const auto& [s, dt] : v) rows.push_back({w, s, dt / len});
    }
    return rows;
}

void write_switching_csv(std::ostream& os, const Ctmc& ctmc, const SwitchingMatrix& m) {
    os << "from";
    for (std::size_t s : m.states) os << ',' << ctmc.label(s);
    os << '\n';
    for (std::size_t a = 0; a < m.states.size(); ++a) {
        os << ctmc.label(m.states[a]);
        for (double p : m.probs[a]) os << ',' << p;
        os << '\n';
    }
}

void write_sojourn_csv(std::ostream& os, const Ctmc& ctmc, const SojournReturnStats& s) {
    os << "group,states,median_sojourn_s,median_return_s,sojourn_samples,return_samples,insufficient\n";
    for (std::size_t g = 0; g < s.groups.size(); ++g) {
        const auto& gt = s.groups[g];
        os << g << ',';
        for (std::size_t i = 0; i < gt.states.size(); ++i) os << (i ? " " : "") << ctmc.label(gt.states[i]);
        os << ',' << gt.median_sojourn << ',' << gt.median_return << ',' << gt.sojourn_samples << ','
           << gt.return_samples << ',' << (gt.insufficient ? "true" : "false") << '\n';
    }
}

void write_occupancy_csv(std::ostream& os, const Ctmc& ctmc, const std::vector<OccupancyRow>& rows, double window) {
    os << "window,window_start_s,state,fraction\n";
    for (const auto& r : rows)
        os << r.window << ',' << static_cast<double>(r.window) * window << ',' << ctmc.label(r.state) << ','
           << r.fraction << '\n';
}

}  // namespace dcb
