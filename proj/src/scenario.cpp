#include "dcbnet/scenario.hpp"

#include "dcbnet/error.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace dcb {

using nlohmann::json;

std::string fnv1a_hex(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::pair<std::size_t, std::size_t> line_col(std::string_view text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

// Line of the first `"id": "<id>"` occurrence, 0 if not found.
std::size_t line_of_id(std::string_view text, const std::string& id) {
    const std::string needle = "\"" + id + "\"";
    for (std::size_t pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + 1)) {
        const auto before = text.substr(0, pos);
        const auto key = before.rfind("\"id\"");
        if (key != std::string_view::npos && before.find_first_not_of(" \t\r\n:", key + 4) == std::string_view::npos)
            return line_col(text, pos).first;
    }
    return 0;
}

class Reader {
public:
    Reader(std::string_view origin, std::string_view text) : origin_(origin), text_(text) {}

    [[noreturn]] void fail(const std::string& msg, std::size_t line = 0) const {
        std::string where(origin_);
        if (line > 0) where += ":" + std::to_string(line);
        throw ConfigError(where + ": " + msg);
    }

    void only_keys(const json& obj, const std::set<std::string>& allowed, const std::string& ctx) const {
        if (!obj.is_object()) fail(ctx + " must be an object");
        for (const auto& [k, v] : obj.items())
            if (!allowed.count(k)) fail("unknown key '" + k + "' in " + ctx);
    }

    template <class T>
    T get(const json& obj, const std::string& key, const std::string& ctx, std::size_t line = 0) const {
        if (!obj.contains(key)) fail(ctx + ": missing required key '" + key + "'", line);
        try {
            if constexpr (std::is_integral_v<T>) {
                if (!obj.at(key).is_number_integer()) fail(ctx + ": '" + key + "' must be an integer", line);
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!obj.at(key).is_number()) fail(ctx + ": '" + key + "' must be a number", line);
            }
            return obj.at(key).get<T>();
        } catch (const json::exception& e) {
            fail(ctx + ": bad value for '" + key + "': " + e.what(), line);
        }
    }

    template <class T>
    T get_or(const json& obj, const std::string& key, T fallback, const std::string& ctx) const {
        return obj.contains(key) ? get<T>(obj, key, ctx) : fallback;
    }

    std::string_view text() const { return text_; }

private:
    std::string_view origin_;
    std::string_view text_;
};

std::pair<int, int> parse_rate(const Reader& rd, const json& v, const std::string& ctx) {
    if (!v.is_string()) rd.fail(ctx + ": coding_rate must be a string like \"3/4\"");
    const auto s = v.get<std::string>();
    int num = 0, den = 0;
    char slash = 0;
    std::istringstream is(s);
    if (!(is >> num >> slash >> den) || slash != '/' || num <= 0 || den <= 0 || !is.eof())
        rd.fail(ctx + ": coding_rate '" + s + "' is not a positive fraction");
    return {num, den};
}

PhyParams parse_params(const Reader& rd, const json& p) {
    rd.only_keys(p,
                 {"packet_bits", "aggregated", "service_field", "mpdu_delimiter", "mac_header", "tail_bits",
                  "block_ack", "t_phy_us", "t_symbol_us", "t_sifs_us", "t_difs_us", "t_slot_us"},
                 "phy.params");
    PhyParams d;
    const std::string ctx = "phy.params";
    d.packet_bits = rd.get_or<long>(p, "packet_bits", d.packet_bits, ctx);
    d.aggregated = rd.get_or<long>(p, "aggregated", d.aggregated, ctx);
    d.service_field = rd.get_or<long>(p, "service_field", d.service_field, ctx);
    d.mpdu_delimiter = rd.get_or<long>(p, "mpdu_delimiter", d.mpdu_delimiter, ctx);
    d.mac_header = rd.get_or<long>(p, "mac_header", d.mac_header, ctx);
    d.tail_bits = rd.get_or<long>(p, "tail_bits", d.tail_bits, ctx);
    d.block_ack = rd.get_or<long>(p, "block_ack", d.block_ack, ctx);
    d.t_phy = rd.get_or<double>(p, "t_phy_us", d.t_phy * 1e6, ctx) * 1e-6;
    d.t_symbol = rd.get_or<double>(p, "t_symbol_us", d.t_symbol * 1e6, ctx) * 1e-6;
    d.t_sifs = rd.get_or<double>(p, "t_sifs_us", d.t_sifs * 1e6, ctx) * 1e-6;
    d.t_difs = rd.get_or<double>(p, "t_difs_us", d.t_difs * 1e6, ctx) * 1e-6;
    d.t_slot = rd.get_or<double>(p, "t_slot_us", d.t_slot * 1e6, ctx) * 1e-6;
    for (long v : {d.packet_bits, d.aggregated, d.service_field, d.mpdu_delimiter, d.mac_header, d.tail_bits,
                   d.block_ack})
        if (v < 0) rd.fail("phy.params: bit counts must be >= 0");
    for (double v : {d.t_phy, d.t_symbol, d.t_sifs, d.t_difs, d.t_slot})
        if (!(v >= 0.0)) rd.fail("phy.params: durations must be >= 0");
    if (!(d.t_slot > 0.0) || !(d.t_symbol > 0.0)) rd.fail("phy.params: slot and symbol durations must be > 0");
    return d;
}

MuTable parse_width_map(const Reader& rd, const json& obj, const std::string& ctx, bool durations_ms) {
    if (!obj.is_object()) rd.fail(ctx + " must be an object mapping width to value");
    MuTable mu;
    for (const auto& [k, v] : obj.items()) {
        int width = 0;
        try {
            std::size_t used = 0;
            width = std::stoi(k, &used);
            if (used != k.size()) throw std::invalid_argument(k);
        } catch (const std::exception&) {
            rd.fail(ctx + ": key '" + k + "' is not a channel width");
        }
        if (!v.is_number() || !(v.get<double>() > 0.0)) rd.fail(ctx + ": value for width " + k + " must be > 0");
        mu[width] = durations_ms ? 1.0 / (v.get<double>() * 1e-3) : v.get<double>();
    }
    return mu;
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string_view origin) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, col] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ConfigError(std::string(origin) + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": syntax error: " + e.what());
    }

    const Reader rd(origin, text);
    rd.only_keys(doc, {"n_basic", "scheme", "p_e", "wlans", "phy", "description"}, "scenario");

    Scenario s;
    s.origin = std::string(origin);
    s.content_hash = fnv1a_hex(text);
    s.n_basic = rd.get<int>(doc, "n_basic", "scenario");
    if (s.n_basic < 1 || s.n_basic > kMaxBasicChannels)
        rd.fail("n_basic must be in [1, " + std::to_string(kMaxBasicChannels) + "]");
    try {
        s.scheme = parse_scheme(rd.get<std::string>(doc, "scheme", "scenario"));
    } catch (const ConfigError& e) {
        rd.fail(e.what());
    }
    s.p_e = rd.get_or<double>(doc, "p_e", 0.0, "scenario");
    if (!(s.p_e >= 0.0 && s.p_e <= 1.0)) rd.fail("p_e must be in [0, 1]");

    s.mcs = default_mcs_table();
    if (doc.contains("phy")) {
        const auto& phy = doc.at("phy");
        rd.only_keys(phy, {"params", "mcs", "mu", "tx_duration_ms"}, "phy");
        if (phy.contains("params")) s.phy = parse_params(rd, phy.at("params"));
        if (phy.contains("mcs")) {
            if (!phy.at("mcs").is_array()) rd.fail("phy.mcs must be an array");
            s.mcs.clear();
            for (const auto& e : phy.at("mcs")) {
                rd.only_keys(e, {"width", "data_subcarriers", "modulation_bits", "coding_rate"}, "phy.mcs entry");
                McsEntry m;
                m.width = rd.get<int>(e, "width", "phy.mcs");
                m.data_subcarriers = rd.get<int>(e, "data_subcarriers", "phy.mcs");
                m.modulation_bits = rd.get<int>(e, "modulation_bits", "phy.mcs");
                if (!e.contains("coding_rate")) rd.fail("phy.mcs: missing required key 'coding_rate'");
                std::tie(m.rate_num, m.rate_den) = parse_rate(rd, e.at("coding_rate"), "phy.mcs");
                if (m.width < 1 || m.data_subcarriers < 1 || m.modulation_bits < 1)
                    rd.fail("phy.mcs: width, data_subcarriers and modulation_bits must be >= 1");
                s.mcs.push_back(m);
            }
        }
        if (phy.contains("mu") && phy.contains("tx_duration_ms"))
            rd.fail("phy: give either 'mu' or 'tx_duration_ms', not both");
        if (phy.contains("mu")) {
            s.mu = parse_width_map(rd, phy.at("mu"), "phy.mu", false);
            s.explicit_mu = true;
        } else if (phy.contains("tx_duration_ms")) {
            s.mu = parse_width_map(rd, phy.at("tx_duration_ms"), "phy.tx_duration_ms", true);
            s.explicit_mu = true;
        }
    }

    if (!doc.contains("wlans") || !doc.at("wlans").is_array()) rd.fail("scenario: 'wlans' must be an array");
    if (doc.at("wlans").empty()) rd.fail("scenario: 'wlans' needs at least one WLAN");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < doc.at("wlans").size(); ++i) {
        const auto& e = doc.at("wlans")[i];
        const std::string ctx = "wlans[" + std::to_string(i) + "]";
        rd.only_keys(e, {"id", "lo", "len", "primary", "nodes", "lambda", "cw", "packet_bits"}, ctx);
        WlanConfig w;
        w.id = rd.get<std::string>(e, "id", ctx);
        const std::size_t line = line_of_id(text, w.id);
        const std::string named = "WLAN '" + w.id + "'";
        if (!ids.insert(w.id).second) rd.fail("duplicate WLAN id '" + w.id + "'", line);
        w.assigned.lo = rd.get<int>(e, "lo", named, line);
        w.assigned.len = rd.get<int>(e, "len", named, line);
        w.primary = rd.get<int>(e, "primary", named, line);
        w.nodes = rd.get_or<int>(e, "nodes", 1, named);
        w.packet_bits = e.contains("packet_bits") ? rd.get<double>(e, "packet_bits", named, line)
                                                  : static_cast<double>(s.phy.aggregated * s.phy.packet_bits);
        const bool has_lambda = e.contains("lambda");
        const bool has_cw = e.contains("cw");
        if (has_lambda == has_cw) rd.fail(named + ": exactly one of 'lambda' and 'cw' is required", line);
        std::optional<int> cw;
        if (has_cw) {
            cw = rd.get<int>(e, "cw", named, line);
            try {
                w.access_rate = cw_to_lambda(*cw, s.phy.t_slot);
            } catch (const ConfigError& err) {
                rd.fail(named + ": " + err.what(), line);
            }
        } else {
            w.access_rate = rd.get<double>(e, "lambda", named, line);
        }
        try {
            validate_wlan(w, s.n_basic);
        } catch (const ConfigError& err) {
            rd.fail(err.what(), line);
        }
        s.wlans.push_back(std::move(w));
        s.cw.push_back(cw);
    }

    const auto widths = required_widths(s.wlans, s.scheme, s.n_basic);
    if (s.explicit_mu) {
        for (int n : widths)
            if (!s.mu.count(n)) rd.fail("phy: no transmission rate for channel width " + std::to_string(n));
    } else {
        try {
            s.mu = mu_table(s.phy, s.mcs, widths);
        } catch (const ConfigError& err) {
            rd.fail(std::string("phy: ") + err.what());
        }
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

Scenario with_contention_window(Scenario s, int cw) {
    const double lambda = cw_to_lambda(cw, s.phy.t_slot);
    for (std::size_t i = 0; i < s.wlans.size(); ++i) {
        s.wlans[i].access_rate = lambda;
        s.cw[i] = cw;
    }
    return s;
}

Ctmc build_ctmc(const Scenario& s) { return build_ctmc(s.wlans, s.scheme, s.n_basic, s.mu); }

}  // namespace dcb
