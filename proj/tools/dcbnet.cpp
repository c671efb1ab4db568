// dcbnet: build, solve, analyze and simulate networks of WLANs that use
// dynamic channel bonding.

#include "dcbnet/analytics.hpp"
#include "dcbnet/ctmc.hpp"
#include "dcbnet/error.hpp"
#include "dcbnet/metrics.hpp"
#include "dcbnet/phy80211.hpp"
#include "dcbnet/scenario.hpp"
#include "dcbnet/simulator.hpp"
#include "dcbnet/solver.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

using namespace dcb;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

// "-" writes to stdout; an empty path disables the output.
class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty()) return;
        if (path == "-") {
            os_ = &std::cout;
            return;
        }
        file_ = std::make_unique<std::ofstream>(path);
        if (!*file_) throw ConfigError("cannot write '" + path + "'");
        os_ = file_.get();
    }
    explicit operator bool() const { return os_ != nullptr; }
    std::ostream& operator*() { return *os_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_ = nullptr;
};

void provenance(std::ostream& os, const std::string& command, std::uint64_t seed, const Scenario* s) {
    os << "# dcbnet " << DCBNET_VERSION << " command=" << command << " seed=" << seed;
    if (s) os << " scenario=" << s->origin << " scenario_hash=" << s->content_hash;
    os << '\n';
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("'" + item + "' is not an integer");
        }
    }
    if (out.empty()) throw ConfigError("empty integer list");
    return out;
}

std::pair<DistKind, DistKind> parse_pair(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) throw ConfigError("distribution pair must look like E/E, got '" + text + "'");
    return {parse_dist(text.substr(0, slash)), parse_dist(text.substr(slash + 1))};
}

void print_metrics(const MetricsReport& m) {
    std::cout << std::left << std::setw(10) << "wlan" << std::right << std::setw(16) << "throughput_Mbps"
              << std::setw(16) << "E[width]" << '\n';
    for (std::size_t x = 0; x < m.wlan_ids.size(); ++x)
        std::cout << std::left << std::setw(10) << m.wlan_ids[x] << std::right << std::fixed << std::setprecision(3)
                  << std::setw(16) << m.per_wlan_throughput[x] / 1e6 << std::setw(16) << m.expected_width[x] << '\n';
    std::cout << "aggregate " << m.aggregate / 1e6 << " Mbps, JFI " << std::setprecision(4) << m.jfi << '\n';
    std::cout.unsetf(std::ios::fixed);
}

// ---------------------------------------------------------------- build

struct BuildArgs {
    std::string scenario;
    std::string dot;
    bool list = false;
};

int cmd_build(const BuildArgs& a) {
    const auto s = load_scenario(a.scenario);
    const auto ctmc = build_ctmc(s);
    std::cout << ctmc.size() << " states, " << ctmc.transitions.size() << " transitions\n";
    std::cout << "locally maximal:";
    for (std::size_t i = 0; i < ctmc.size(); ++i)
        if (is_locally_maximal(ctmc, i)) std::cout << ' ' << ctmc.label(i) << '(' << i << ')';
    std::cout << '\n';
    if (a.list) {
        for (std::size_t i = 0; i < ctmc.size(); ++i) std::cout << "state " << i << ' ' << ctmc.label(i) << '\n';
        for (const auto& t : ctmc.transitions)
            std::cout << (t.direction == Direction::Forward ? "fwd " : "bwd ") << ctmc.label(t.from) << " -> "
                      << ctmc.label(t.to) << " rate " << t.rate << '\n';
    }
    if (Output out(a.dot); out) *out << export_dot(ctmc);
    return 0;
}

// ---------------------------------------------------------------- solve

struct SolveArgs {
    std::string scenario;
    std::string csv;
    std::optional<double> p_e;
    bool states = false;
};

int cmd_solve(const SolveArgs& a) {
    const auto s = load_scenario(a.scenario);
    const double p_e = a.p_e.value_or(s.p_e);
    if (!(p_e >= 0.0 && p_e <= 1.0)) throw ConfigError("--p-e must be in [0, 1]");
    const auto ctmc = build_ctmc(s);
    const auto q = rate_matrix(ctmc);
    const auto pi = steady_state(q);
    const auto m = compute_metrics(ctmc, pi, p_e);
    std::cout << ctmc.size() << " states, residual " << balance_residual(q, pi.pi) << '\n';
    print_metrics(m);
    if (a.states)
        for (std::size_t i = 0; i < ctmc.size(); ++i)
            std::cout << "pi " << i << ' ' << ctmc.label(i) << ' ' << pi[i] << '\n';
    if (Output out(a.csv); out) {
        provenance(*out, "solve", 0, &s);
        *out << std::setprecision(12);
        write_metrics_csv(*out, m);
        *out << "# state,pi\n";
        for (std::size_t i = 0; i < ctmc.size(); ++i) *out << "# " << ctmc.label(i) << ',' << pi[i] << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
    std::string scenario;
    double threshold = 0.05;
    double cutoff = 0.5;
    double horizon = 60.0;
    double window = 0.06;
    double epsilon = 1e-3;
    std::uint64_t seed = 1;
    std::string switching_csv;
    std::string sojourn_csv;
    std::string trace_csv;
};

int cmd_analyze(const AnalyzeArgs& a) {
    const auto s = load_scenario(a.scenario);
    const auto ctmc = build_ctmc(s);
    const auto dom = dominant_states(ctmc, a.threshold);
    std::cout << "dominant states (threshold " << dom.threshold_used << ", total mass " << dom.total_mass << "):\n";
    for (std::size_t k = 0; k < dom.dominant.size(); ++k)
        std::cout << "  " << ctmc.label(dom.dominant[k]) << " (" << dom.dominant[k] << ") pi=" << dom.pi[dom.dominant[k]]
                  << (dom.locally_maximal[k] ? " locally-maximal" : " NOT-locally-maximal") << '\n';
    const double mix = mixing_time(rate_matrix(ctmc), a.epsilon);
    std::cout << "L2 mixing time (eps " << a.epsilon << "): " << mix << " s\n";
    if (dom.dominant.empty()) return 0;

    const auto sw = switching_probabilities(ctmc, dom.dominant);
    std::cout << "switching probabilities:\n";
    write_switching_csv(std::cout, ctmc, sw);
    const auto groups = group_dominants(sw, a.cutoff);
    const auto times = sojourn_return_times(ctmc, groups, a.horizon, a.seed);
    std::cout << "sojourn/return (horizon " << a.horizon << " s, seed " << a.seed << "):\n";
    write_sojourn_csv(std::cout, ctmc, times);

    if (Output out(a.switching_csv); out) {
        provenance(*out, "analyze", a.seed, &s);
        write_switching_csv(*out, ctmc, sw);
    }
    if (Output out(a.sojourn_csv); out) {
        provenance(*out, "analyze", a.seed, &s);
        write_sojourn_csv(*out, ctmc, times);
    }
    if (Output out(a.trace_csv); out) {
        provenance(*out, "analyze", a.seed, &s);
        write_occupancy_csv(*out, ctmc, occupancy_trace(ctmc, a.horizon, a.window, a.seed), a.window);
    }
    return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string scenario;
    std::string mode = "continuous";
    std::string dists;
    std::string cw_sweep;
    bool sensitivity = false;
    int replications = 10;
    double horizon = 100.0;
    std::optional<double> warmup;
    std::optional<double> p_e;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string csv;
};

SimConfig make_config(const SimulateArgs& a, const Scenario& s) {
    SimConfig cfg;
    if (a.mode == "continuous")
        cfg.mode = SimMode::Continuous;
    else if (a.mode == "slotted")
        cfg.mode = SimMode::Slotted;
    else
        throw ConfigError("--mode must be 'continuous' or 'slotted'");
    cfg.tx_time = cfg.mode == SimMode::Slotted ? DistKind::Deterministic : DistKind::Exponential;
    if (!a.dists.empty()) std::tie(cfg.backoff, cfg.tx_time) = parse_pair(a.dists);
    cfg.t_slot = s.phy.t_slot;
    cfg.mu = s.mu;
    cfg.p_e = a.p_e.value_or(s.p_e);
    cfg.horizon = a.horizon;
    cfg.warmup = a.warmup;
    cfg.seed = a.seed;
    cfg.replications = a.replications;
    cfg.threads = a.threads;
    if (cfg.mode == SimMode::Slotted) {
        if (s.cw.empty() || !s.cw.front()) throw ConfigError("slotted mode needs 'cw' on every WLAN or --cw-sweep");
        for (const auto& c : s.cw)
            if (c != s.cw.front()) throw ConfigError("slotted mode needs one common contention window");
        cfg.cw = *s.cw.front();
    }
    return cfg;
}

int cmd_simulate(const SimulateArgs& a) {
    const auto base = load_scenario(a.scenario);
    Output out(a.csv.empty() ? "-" : a.csv);
    if (!a.cw_sweep.empty()) {
        provenance(*out, "simulate --cw-sweep", a.seed, &base);
        *out << "cw,lambda,wlan_id,analytic_bps,sim_mean_bps,sim_ci_half_bps,rel_diff\n";
        for (int cw : parse_int_list(a.cw_sweep)) {
            const auto s = with_contention_window(base, cw);
            auto cfg = make_config(a, s);
            cfg.cw = cw;
            const auto ctmc = build_ctmc(s);
            const auto analytic = throughput(ctmc, steady_state(rate_matrix(ctmc)), cfg.p_e);
            const auto rep = simulate(s.wlans, s.scheme, s.n_basic, cfg);
            for (std::size_t x = 0; x < s.wlans.size(); ++x)
                *out << cw << ',' << s.wlans[x].access_rate << ',' << s.wlans[x].id << ',' << analytic[x] << ','
                     << rep.throughput_mean[x] << ',' << rep.throughput_ci_half[x] << ','
                     << (analytic[x] > 0 ? (rep.throughput_mean[x] - analytic[x]) / analytic[x] : 0.0) << '\n';
        }
        return 0;
    }
    const auto cfg = make_config(a, base);
    if (a.sensitivity) {
        std::vector<std::pair<DistKind, DistKind>> pairs;
        for (auto b : {DistKind::Exponential, DistKind::Uniform, DistKind::Deterministic})
            for (auto t : {DistKind::Exponential, DistKind::Uniform, DistKind::Deterministic}) pairs.emplace_back(b, t);
        const auto rows = sensitivity_suite(base.wlans, base.scheme, base.n_basic, cfg, pairs);
        provenance(*out, "simulate --sensitivity", a.seed, &base);
        *out << "pair,wlan_id,throughput_bps,ci_half_bps,delta_bps,delta_se_bps,expected_width\n";
        for (const auto& row : rows)
            for (std::size_t x = 0; x < base.wlans.size(); ++x)
                *out << dist_letter(row.backoff) << '/' << dist_letter(row.tx_time) << ',' << base.wlans[x].id << ','
                     << row.report.throughput_mean[x] << ',' << row.report.throughput_ci_half[x] << ','
                     << row.delta[x] << ',' << row.delta_se[x] << ',' << row.report.expected_width[x] << '\n';
        return 0;
    }
    const auto rep = simulate(base.wlans, base.scheme, base.n_basic, cfg);
    provenance(*out, "simulate", a.seed, &base);
    write_sim_csv(*out, rep);
    *out << "# summary,wlan_id,throughput_mean_bps,ci_half_bps,expected_width\n";
    for (std::size_t x = 0; x < base.wlans.size(); ++x)
        *out << "# summary," << base.wlans[x].id << ',' << rep.throughput_mean[x] << ',' << rep.throughput_ci_half[x]
             << ',' << rep.expected_width[x] << '\n';
    if (cfg.mode == SimMode::Continuous)
        for (const auto& [label, f] : rep.occupancy) *out << "# occupancy," << label << ',' << f << '\n';
    else
        *out << "# collided_transmissions," << rep.collided << '\n';
    return 0;
}

// ---------------------------------------------------------------- dense-sweep

struct SweepArgs {
    int max_wlans = 40;
    std::string m_values;
    int replications = 5;
    double horizon = 10.0;
    int cw = 16;
    double p_e = 0.1;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    std::string csv;
};

int cmd_dense_sweep(const SweepArgs& a) {
    SweepConfig cfg;
    if (!a.m_values.empty()) {
        cfg.m_values = parse_int_list(a.m_values);
    } else {
        if (a.max_wlans < 1) throw ConfigError("--max-wlans must be >= 1");
        for (int m = 1; m <= a.max_wlans; ++m) cfg.m_values.push_back(m);
    }
    cfg.replications = a.replications;
    const PhyParams phy;
    cfg.sim.mu = mu_table(phy, default_mcs_table(), {1, 2, 4, 8});
    cfg.sim.p_e = a.p_e;
    cfg.sim.horizon = a.horizon;
    cfg.sim.seed = a.seed;
    cfg.sim.threads = a.threads;
    cfg.wlan.access_rate = cw_to_lambda(a.cw, phy.t_slot);
    cfg.wlan.packet_bits = static_cast<double>(phy.aggregated * phy.packet_bits);
    const auto points = dcb_vs_scb_sweep(cfg);
    Output out(a.csv.empty() ? "-" : a.csv);
    provenance(*out, "dense-sweep", a.seed, nullptr);
    write_sweep_csv(*out, points);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analytical model and simulator for WLANs using dynamic channel bonding"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(DCBNET_VERSION));

    BuildArgs build;
    auto* build_cmd = app.add_subcommand("build", "Construct the Markov chain; print counts and write DOT");
    build_cmd->add_option("scenario", build.scenario, "Scenario JSON file")->required();
    build_cmd->add_option("--dot", build.dot, "Write a Graphviz graph ('-' for stdout)");
    build_cmd->add_flag("--list", build.list, "List states and transitions");

    SolveArgs solve;
    auto* solve_cmd = app.add_subcommand("solve", "Stationary distribution, throughput and fairness");
    solve_cmd->add_option("scenario", solve.scenario, "Scenario JSON file")->required();
    solve_cmd->add_option("--csv", solve.csv, "Write the metrics CSV ('-' for stdout)");
    solve_cmd->add_option("--p-e", solve.p_e, "Override the packet error probability");
    solve_cmd->add_flag("--states", solve.states, "Print the stationary probability of every state");

    AnalyzeArgs analyze;
    auto* analyze_cmd = app.add_subcommand("analyze", "Dominant states, switching, sojourn and return times");
    analyze_cmd->add_option("scenario", analyze.scenario, "Scenario JSON file")->required();
    analyze_cmd->add_option("--threshold", analyze.threshold, "Dominance threshold on pi")->capture_default_str();
    analyze_cmd->add_option("--cutoff", analyze.cutoff, "Grouping cutoff on switching probabilities")->capture_default_str();
    analyze_cmd->add_option("--horizon", analyze.horizon, "Sample-path length in seconds")->capture_default_str();
    analyze_cmd->add_option("--window", analyze.window, "Occupancy trace window in seconds")->capture_default_str();
    analyze_cmd->add_option("--epsilon", analyze.epsilon, "Mixing-time radius")->capture_default_str();
    analyze_cmd->add_option("--seed", analyze.seed, "Random seed")->capture_default_str();
    analyze_cmd->add_option("--switching-csv", analyze.switching_csv, "Write the switching matrix");
    analyze_cmd->add_option("--sojourn-csv", analyze.sojourn_csv, "Write the sojourn/return table");
    analyze_cmd->add_option("--trace", analyze.trace_csv, "Write the windowed occupancy trace");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Event-driven MAC simulation");
    sim_cmd->add_option("scenario", sim.scenario, "Scenario JSON file")->required();
    sim_cmd->add_option("--mode", sim.mode, "continuous or slotted")->capture_default_str();
    sim_cmd->add_option("--dists", sim.dists, "Backoff/transmission laws, e.g. E/E, U/D");
    sim_cmd->add_option("--cw-sweep", sim.cw_sweep, "Comma-separated contention windows; compares with analysis");
    sim_cmd->add_flag("--sensitivity", sim.sensitivity, "Run all nine E/U/D pairs against E/E");
    sim_cmd->add_option("--replications", sim.replications, "Independent replications")->capture_default_str();
    sim_cmd->add_option("--horizon", sim.horizon, "Simulated seconds per replication")->capture_default_str();
    sim_cmd->add_option("--warmup", sim.warmup, "Discarded prefix in seconds (default 5% of horizon)");
    sim_cmd->add_option("--p-e", sim.p_e, "Override the packet error probability");
    sim_cmd->add_option("--seed", sim.seed, "Base random seed")->capture_default_str();
    sim_cmd->add_option("--threads", sim.threads, "Worker threads (0 = all cores)")->capture_default_str();
    sim_cmd->add_option("--csv", sim.csv, "Output CSV path (default stdout)");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("dense-sweep", "Random dense deployments, DCB versus SCB");
    sweep_cmd->add_option("--max-wlans", sweep.max_wlans, "Sweep M = 1..max")->capture_default_str();
    sweep_cmd->add_option("--m-values", sweep.m_values, "Explicit comma-separated M values");
    sweep_cmd->add_option("--replications", sweep.replications, "Random scenarios per M")->capture_default_str();
    sweep_cmd->add_option("--horizon", sweep.horizon, "Simulated seconds per run")->capture_default_str();
    sweep_cmd->add_option("--cw", sweep.cw, "Contention window mapped to the access rate")->capture_default_str();
    sweep_cmd->add_option("--p-e", sweep.p_e, "Packet error probability")->capture_default_str();
    sweep_cmd->add_option("--seed", sweep.seed, "Base random seed")->capture_default_str();
    sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (0 = all cores)")->capture_default_str();
    sweep_cmd->add_option("--csv", sweep.csv, "Output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (build_cmd->parsed()) return cmd_build(build);
        if (solve_cmd->parsed()) return cmd_solve(solve);
        if (analyze_cmd->parsed()) return cmd_analyze(analyze);
        if (sim_cmd->parsed()) return cmd_simulate(sim);
        if (sweep_cmd->parsed()) return cmd_dense_sweep(sweep);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
