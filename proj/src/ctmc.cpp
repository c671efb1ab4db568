#include "dcbnet/ctmc.hpp"

#include "dcbnet/error.hpp"

#include <sstream>
#include <unordered_map>

namespace dcb {

std::size_t NetworkState::active_count() const {
    std::size_t n = 0;
    for (const auto& c : active) n += c.has_value();
    return n;
}

std::uint64_t NetworkState::busy_mask() const {
    std::uint64_t m = 0;
    for (const auto& c : active)
        if (c) m |= c->mask();
    return m;
}

std::string NetworkState::key() const {
    std::string k;
    k.reserve(active.size() * 2);
    for (const auto& c : active) {
        k.push_back(static_cast<char>(c ? c->lo : 0));
        k.push_back(static_cast<char>(c ? c->len : 0));
    }
    return k;
}

std::string state_label(const NetworkState& s, const std::vector<WlanConfig>& wlans) {
    std::string out;
    for (std::size_t i = 0; i < s.active.size(); ++i) {
        if (!s.active[i]) continue;
        out += wlans.at(i).id + "_" + std::to_string(s.active[i]->len) + "^" +
               std::to_string(s.active[i]->lo);
    }
    return out.empty() ? "∅" : out;
}

std::optional<std::size_t> Ctmc::find(const std::string& label) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (this->label(i) == label) return i;
    return std::nullopt;
}

std::vector<std::vector<std::size_t>> Ctmc::outgoing() const {
    std::vector<std::vector<std::size_t>> out(states.size());
    for (std::size_t t = 0; t < transitions.size(); ++t) out[transitions[t].from].push_back(t);
    return out;
}

namespace {

double mu_for(const MuTable& mu, int width) {
    const auto it = mu.find(width);
    if (it == mu.end())
        throw ConfigError("no transmission rate mu_" + std::to_string(width) + " for width " +
                          std::to_string(width));
    if (!(it->second > 0.0))
        throw ConfigError("transmission rate mu_" + std::to_string(width) + " must be > 0");
    return it->second;
}

}  // namespace

Ctmc build_ctmc(std::vector<WlanConfig> wlans, Scheme scheme, int n_basic, MuTable mu) {
    for (const auto& w : wlans) validate_wlan(w, n_basic);

    Ctmc ctmc;
    ctmc.scheme = scheme;
    ctmc.n_basic = n_basic;
    ctmc.mu = std::move(mu);
    ctmc.wlans = std::move(wlans);

    std::vector<std::vector<Channel>> options;
    options.reserve(ctmc.wlans.size());
    for (const auto& w : ctmc.wlans) options.push_back(primary_channels(w, scheme, n_basic));

    std::unordered_map<std::string, std::size_t> index;
    const auto intern = [&](NetworkState s) {
        auto [it, inserted] = index.try_emplace(s.key(), ctmc.states.size());
        if (inserted) ctmc.states.push_back(std::move(s));
        return it->second;
    };

    intern(NetworkState{std::vector<std::optional<Channel>>(ctmc.wlans.size())});

    // States are appended while iterating; index-based loop is the frontier.
    for (std::size_t k = 0; k < ctmc.states.size(); ++k) {
        for (std::size_t x = 0; x < ctmc.wlans.size(); ++x) {
            const NetworkState& s = ctmc.states[k];
            if (const auto& active = s.active[x]) {
                NetworkState next = s;
                next.active[x].reset();
                const int width = active->len;
                const double rate = mu_for(ctmc.mu, width);
                const std::size_t to = intern(std::move(next));
                ctmc.transitions.push_back({k, to, rate, Direction::Backward, x, width});
                continue;
            }
            const auto candidates = widest_free(options[x], s.busy_mask());
            if (candidates.empty()) continue;
            const auto& w = ctmc.wlans[x];
            const double rate = w.nodes * w.access_rate / static_cast<double>(candidates.size());
            mu_for(ctmc.mu, candidates.front().len);
            for (const auto& c : candidates) {
                NetworkState next = ctmc.states[k];
                next.active[x] = c;
                const std::size_t to = intern(std::move(next));
                ctmc.transitions.push_back({k, to, rate, Direction::Forward, x, c.len});
            }
        }
    }
    return ctmc;
}

bool is_locally_maximal(const Ctmc& ctmc, std::size_t state) {
    if (state >= ctmc.size()) throw ConfigError("state index out of range");
    for (const auto& t : ctmc.transitions)
        if (t.from == state && t.direction == Direction::Forward) return false;
    return true;
}

Ctmc scale_access_rates(const Ctmc& ctmc, double factor) {
    Ctmc out = ctmc;
    for (auto& w : out.wlans) w.access_rate *= factor;
    for (auto& t : out.transitions)
        if (t.direction == Direction::Forward) t.rate *= factor;
    return out;
}

std::string export_dot(const Ctmc& ctmc) {
    std::ostringstream os;
    os.precision(10);
    os << "digraph ctmc {\n  rankdir=LR;\n";
    std::vector<bool> has_forward(ctmc.size(), false);
    for (const auto& t : ctmc.transitions)
        if (t.direction == Direction::Forward) has_forward[t.from] = true;
    for (std::size_t i = 0; i < ctmc.size(); ++i) {
        os << "  s" << i << " [label=\"" << ctmc.label(i) << " (" << i << ")\"";
        if (!has_forward[i]) os << ", peripheries=2";
        os << "];\n";
    }
    for (const auto& t : ctmc.transitions) {
        const bool fwd = t.direction == Direction::Forward;
        os << "  s" << t.from << " -> s" << t.to << " [label=\"" << t.rate << "\", comment=\""
           << (fwd ? "forward" : "backward") << "\"" << (fwd ? "" : ", style=dashed") << "];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace dcb
