#include "dcbnet/analytics.hpp"
#include "dcbnet/channels.hpp"
#include "dcbnet/ctmc.hpp"
#include "dcbnet/error.hpp"
#include "dcbnet/metrics.hpp"
#include "dcbnet/phy80211.hpp"
#include "dcbnet/scenario.hpp"
#include "dcbnet/simulator.hpp"
#include "dcbnet/solver.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace dcb;

namespace {

std::vector<std::string> wlan_ids(const std::vector<WlanConfig>& wlans) {
    std::vector<std::string> ids;
    for (const auto& w : wlans) ids.push_back(w.id);
    return ids;
}

py::list transitions_of(const Ctmc& c) {
    py::list out;
    for (const auto& t : c.transitions)
        out.append(py::make_tuple(t.from, t.to, t.rate, t.direction == Direction::Forward ? "forward" : "backward",
                                  c.wlans.at(t.wlan).id, t.width));
    return out;
}

MetricsReport solve_chain(const Ctmc& c, double p_e) {
    const auto pi = steady_state(rate_matrix(c));
    return compute_metrics(c, pi, p_e);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Markov-chain analysis and simulation of WLANs using dynamic channel bonding";
    m.attr("__version__") = DCBNET_VERSION;
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("n_basic", &Scenario::n_basic)
        .def_property_readonly("scheme", [](const Scenario& s) { return std::string(to_string(s.scheme)); })
        .def_readonly("p_e", &Scenario::p_e)
        .def_property_readonly("wlan_ids", [](const Scenario& s) { return wlan_ids(s.wlans); })
        .def_property_readonly("access_rates",
                               [](const Scenario& s) {
                                   std::vector<double> r;
                                   for (const auto& w : s.wlans) r.push_back(w.access_rate);
                                   return r;
                               })
        .def_readonly("mu", &Scenario::mu)
        .def_readonly("origin", &Scenario::origin)
        .def_readonly("content_hash", &Scenario::content_hash)
        .def("with_contention_window", [](const Scenario& s, int cw) { return with_contention_window(s, cw); });

    m.def("parse_scenario", [](const std::string& text) { return parse_scenario(text); }, py::arg("text"));
    m.def("load_scenario", [](const std::string& path) { return load_scenario(path); }, py::arg("path"));

    py::class_<Ctmc>(m, "Ctmc")
        .def_property_readonly("size", &Ctmc::size)
        .def_property_readonly("labels",
                               [](const Ctmc& c) {
                                   std::vector<std::string> l;
                                   for (std::size_t i = 0; i < c.size(); ++i) l.push_back(c.label(i));
                                   return l;
                               })
        .def_property_readonly("transitions", &transitions_of)
        .def("find", &Ctmc::find, py::arg("label"))
        .def("is_locally_maximal", [](const Ctmc& c, std::size_t s) { return is_locally_maximal(c, s); })
        .def("to_dot", [](const Ctmc& c) { return export_dot(c); })
        .def("stationary", [](const Ctmc& c) { return steady_state(rate_matrix(c)).pi; });

    m.def("build_ctmc", [](const Scenario& s) { return build_ctmc(s); }, py::arg("scenario"));

    py::class_<MetricsReport>(m, "MetricsReport")
        .def_readonly("wlan_ids", &MetricsReport::wlan_ids)
        .def_readonly("throughput", &MetricsReport::per_wlan_throughput)
        .def_readonly("aggregate", &MetricsReport::aggregate)
        .def_readonly("jfi", &MetricsReport::jfi)
        .def_readonly("expected_width", &MetricsReport::expected_width)
        .def_readonly("state_labels", &MetricsReport::state_labels)
        .def_readonly("pi", &MetricsReport::occupancy);

    m.def("solve", &solve_chain, py::arg("ctmc"), py::arg("p_e") = 0.0,
          "Stationary distribution and the throughput/fairness metrics derived from it.");
    m.def("jfi", [](const std::vector<double>& v, bool normalized) { return jfi(v, normalized); }, py::arg("values"),
          py::arg("normalized") = true);
    m.def("mixing_time", [](const Ctmc& c, double eps) { return mixing_time(rate_matrix(c), eps); }, py::arg("ctmc"),
          py::arg("epsilon") = 1e-3);

    py::class_<DominanceReport>(m, "DominanceReport")
        .def_readonly("dominant", &DominanceReport::dominant)
        .def_readonly("threshold", &DominanceReport::threshold_used)
        .def_readonly("locally_maximal", &DominanceReport::locally_maximal)
        .def_readonly("total_mass", &DominanceReport::total_mass)
        .def_readonly("pi", &DominanceReport::pi)
        .def_readonly("pi_scaled", &DominanceReport::pi_scaled);

    m.def("dominant_states", &dominant_states, py::arg("ctmc"), py::arg("threshold") = 0.05,
          py::arg("lambda_scale") = 10.0);
    m.def(
        "switching_probabilities",
        [](const Ctmc& c, const std::vector<std::size_t>& dominant) {
            return switching_probabilities(c, dominant).probs;
        },
        py::arg("ctmc"), py::arg("dominant"));

    py::class_<SimReport>(m, "SimReport")
        .def_readonly("wlan_ids", &SimReport::wlan_ids)
        .def_readonly("throughput", &SimReport::throughput_mean)
        .def_readonly("throughput_se", &SimReport::throughput_se)
        .def_readonly("throughput_ci_half", &SimReport::throughput_ci_half)
        .def_readonly("expected_width", &SimReport::expected_width)
        .def_readonly("occupancy", &SimReport::occupancy)
        .def_readonly("collided", &SimReport::collided)
        .def_readonly("successes", &SimReport::successes)
        .def_readonly("failures", &SimReport::failures);

    m.def(
        "simulate",
        [](const Scenario& s, const std::string& mode, const std::string& backoff, const std::string& tx, int cw,
           double horizon, int replications, std::uint64_t seed, std::optional<double> p_e) {
            SimConfig cfg;
            if (mode == "continuous")
                cfg.mode = SimMode::Continuous;
            else if (mode == "slotted")
                cfg.mode = SimMode::Slotted;
            else
                throw ConfigError("mode must be 'continuous' or 'slotted'");
            cfg.backoff = parse_dist(backoff);
            cfg.tx_time = parse_dist(tx);
            cfg.cw = cw;
            cfg.t_slot = s.phy.t_slot;
            cfg.mu = s.mu;
            cfg.p_e = p_e.value_or(s.p_e);
            cfg.horizon = horizon;
            cfg.replications = replications;
            cfg.seed = seed;
            py::gil_scoped_release release;
            return simulate(s.wlans, s.scheme, s.n_basic, cfg);
        },
        py::arg("scenario"), py::arg("mode") = "continuous", py::arg("backoff") = "E", py::arg("tx") = "E",
        py::arg("cw") = 16, py::arg("horizon") = 100.0, py::arg("replications") = 10, py::arg("seed") = 1,
        py::arg("p_e") = py::none());

    m.def("tx_duration", [](int n) { return tx_duration(n, PhyParams{}, default_mcs_table()); }, py::arg("width"),
          "1/mu_n in seconds with the default 802.11ac parameters.");
    m.def("cw_to_lambda", &cw_to_lambda, py::arg("cw"), py::arg("t_slot") = 9e-6);
    m.def(
        "allowed_channels",
        [](const std::string& scheme, int n_basic, int lo, int len) {
            std::vector<std::pair<int, int>> out;
            if (len < 0) len = n_basic - lo + 1;
            for (const auto& c : allowed_channels(parse_scheme(scheme), n_basic, Channel{lo, len}))
                out.emplace_back(c.lo, c.len);
            return out;
        },
        py::arg("scheme"), py::arg("n_basic"), py::arg("lo") = 1, py::arg("len") = -1,
        "(lo, len) pairs; len -1 means the whole band.");
}
