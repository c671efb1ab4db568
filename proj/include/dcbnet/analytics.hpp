#pragma once

#include "dcbnet/ctmc.hpp"
#include "dcbnet/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace dcb {

struct DominanceReport {
    std::vector<std::size_t> dominant;   // ascending state index
    double threshold_used = 0.05;
    std::vector<bool> locally_maximal;   // parallel to `dominant`
    double total_mass = 0.0;             // sum of pi over `dominant`
    std::vector<double> pi;              // at the chain's own rates
    std::vector<double> pi_scaled;       // with access rates scaled
};

/// States whose stationary probability is >= threshold both at the chain's
/// rates and with every access rate multiplied by `lambda_scale`; a finite
/// stand-in for "does not vanish as lambda/mu grows".
DominanceReport dominant_states(const Ctmc& ctmc, double threshold = 0.05, double lambda_scale = 10.0);

struct SwitchingMatrix {
    std::vector<std::size_t> states;
    /// probs[a][b]: probability that, leaving states[a], the next dominant
    /// state entered is states[b]. Zero diagonal.
    std::vector<std::vector<double>> probs;
};

/// Exact first-passage probabilities on the embedded jump chain, one linear
/// system per source state.
SwitchingMatrix switching_probabilities(const Ctmc& ctmc, std::span<const std::size_t> dominant);

/// Connected components of the graph joining a and b when both switching
/// probabilities between them reach `cutoff`. Groups hold state indices and
/// come out in order of their first member in `switching.states`.
std::vector<std::vector<std::size_t>> group_dominants(const SwitchingMatrix& switching, double cutoff = 0.5);

struct GroupTimes {
    std::vector<std::size_t> states;
    double median_sojourn = 0.0;  // NaN when no sample completed
    double median_return = 0.0;   // NaN when no sample completed
    std::size_t sojourn_samples = 0;
    std::size_t return_samples = 0;
    bool insufficient = true;
};

struct SojournReturnStats {
    std::vector<GroupTimes> groups;
};

/// One exact jump-chain sample path of length `horizon` from the empty
/// state. A sojourn in group g runs from entering one of g's states until
/// the path first enters a state of another group; a return runs from that
/// moment until g is entered again. Groups must be disjoint.
SojournReturnStats sojourn_return_times(const Ctmc& ctmc,
                                        const std::vector<std::vector<std::size_t>>& groups,
                                        double horizon,
                                        std::uint64_t seed);

struct OccupancyRow {
    std::size_t window = 0;
    std::size_t state = 0;
    double fraction = 0.0;
};

/// Time fraction spent in each visited state per window of length `window`
/// along one sample path, keeping the `top_k` longest-visited states of each
/// window (0 keeps all).
std::vector<OccupancyRow> occupancy_trace(const Ctmc& ctmc,
                                          double horizon,
                                          double window,
                                          std::uint64_t seed,
                                          std::size_t top_k = 3);

void write_switching_csv(std::ostream& os, const Ctmc& ctmc, const SwitchingMatrix& m);
void write_sojourn_csv(std::ostream& os, const Ctmc& ctmc, const SojournReturnStats& s);
void write_occupancy_csv(std::ostream& os, const Ctmc& ctmc, const std::vector<OccupancyRow>& rows, double window);

}  // namespace dcb
