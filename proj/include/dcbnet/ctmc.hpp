#pragma once

#include "dcbnet/channels.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dcb {

/// Transmission rate per channel width: mu[n] = 1 / E[duration on n channels].
using MuTable = std::map<int, double>;

/// Per-WLAN active transmission channel, indexed like the WLAN list.
/// An empty optional means the WLAN is not transmitting.
struct NetworkState {
    std::vector<std::optional<Channel>> active;

    std::size_t active_count() const;
    std::uint64_t busy_mask() const;
    /// Canonical byte key; equal keys iff equal states.
    std::string key() const;

    friend bool operator==(const NetworkState&, const NetworkState&) = default;
};

/// X_n^j label concatenation, e.g. "A_2^1B_2^3"; the empty state is "∅".
std::string state_label(const NetworkState& s, const std::vector<WlanConfig>& wlans);

enum class Direction { Forward, Backward };

struct Transition {
    std::size_t from = 0;
    std::size_t to = 0;
    double rate = 0.0;
    Direction direction = Direction::Forward;
    std::size_t wlan = 0;  // index into Ctmc::wlans
    int width = 0;
};

/// The reachable state space and transition list of a scenario. State 0 is
/// the empty state; states and transitions appear in discovery order.
struct Ctmc {
    std::vector<WlanConfig> wlans;
    Scheme scheme = Scheme::P2DCB;
    int n_basic = 1;
    MuTable mu;
    std::vector<NetworkState> states;
    std::vector<Transition> transitions;

    std::size_t size() const { return states.size(); }
    std::string label(std::size_t state) const { return state_label(states.at(state), wlans); }
    /// Index of the state with the given label, if any.
    std::optional<std::size_t> find(const std::string& label) const;
    /// Transition indices grouped by source state.
    std::vector<std::vector<std::size_t>> outgoing() const;
};

/// Breadth-order discovery of every feasible state starting from the empty
/// state. WLANs are visited in declaration order and tied candidate channels
/// in ascending `lo` order, so indices are reproducible.
Ctmc build_ctmc(std::vector<WlanConfig> wlans, Scheme scheme, int n_basic, MuTable mu);

/// True iff the state has no outgoing forward transition.
bool is_locally_maximal(const Ctmc& ctmc, std::size_t state);

/// Copy of the chain with every forward rate (and WLAN access rate)
/// multiplied by `factor`. The state space does not depend on rates.
Ctmc scale_access_rates(const Ctmc& ctmc, double factor);

/// Graphviz digraph; forward edges solid, backward edges dashed.
std::string export_dot(const Ctmc& ctmc);

}  // namespace dcb
