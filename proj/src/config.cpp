#include "scissorlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

namespace scissorlab {

namespace {

const std::vector<std::pair<Scenario, std::string>> kScenarios = {
    {Scenario::Fig3, "fig3"}, {Scenario::Fig4, "fig4"}, {Scenario::Fig5, "fig5"},
    {Scenario::Fig8, "fig8"}, {Scenario::Fig9, "fig9"}, {Scenario::Sweep, "sweep"},
};

const std::vector<std::string> kKeys = {
    "gain_min", "gain_max", "gain_steps", "gamma",  "chi",    "channel", "tau_s", "tau_d",
    "detectors", "orders",  "nla_sizes",  "input",  "cutoff", "output",  "checks",
};

std::vector<double> range(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(n == 1 ? lo : i == n - 1 ? hi : lo + (hi - lo) * i / (n - 1));
    return v;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string t = boost::algorithm::trim_copy(s);
    if (t.empty()) return out;
    boost::algorithm::split(out, t, boost::is_any_of(","));
    for (auto& x : out) boost::algorithm::trim(x);
    return out;
}

double to_double(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(fmt::format("key '{}': '{}' is not a number", key, s));
    }
}

int to_int(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(fmt::format("key '{}': '{}' is not an integer", key, s));
    }
}

DetectorKind to_detector(const std::string& s) {
    std::string l = boost::algorithm::to_lower_copy(s);
    if (l == "pnr") return DetectorKind::PNR;
    if (l == "onoff" || l == "on-off" || l == "on_off") return DetectorKind::OnOff;
    throw ConfigError(fmt::format("unknown detector kind '{}' (pnr | onoff)", s));
}

std::string detector_name(DetectorKind k) { return k == DetectorKind::PNR ? "pnr" : "onoff"; }

std::string fmt_double(double x) { return fmt::format("{:.17g}", x); }

template <class T, class F>
std::string join(const std::vector<T>& v, F&& f) {
    std::vector<std::string> s;
    for (const auto& x : v) s.push_back(f(x));
    return boost::algorithm::join(s, ", ");
}

void in_range(const std::vector<double>& v, const char* key, double lo, double hi, bool open_lo,
              bool open_hi) {
    for (double x : v) {
        bool ok = std::isfinite(x) && (open_lo ? x > lo : x >= lo) && (open_hi ? x < hi : x <= hi);
        if (!ok)
            throw ConfigError(fmt::format("{} = {} outside {}{}, {}{}", key, x, open_lo ? '(' : '[',
                                          lo, hi, open_hi ? ')' : ']'));
    }
}

}  // namespace

std::string scenario_name(Scenario s) {
    for (const auto& [k, n] : kScenarios)
        if (k == s) return n;
    return "unknown";
}

Scenario scenario_from_name(const std::string& name) {
    for (const auto& [k, n] : kScenarios)
        if (n == name) return k;
    throw ConfigError(fmt::format("unknown scenario '{}'", name));
}

std::vector<double> GainGrid::values() const { return range(min, max, steps); }

std::vector<std::string> available_checks(Scenario s) {
    switch (s) {
        case Scenario::Fig3: return {"p_vs_n3", "f_vs_n3", "p_vs_n4", "f_vs_n4"};
        case Scenario::Fig4: return {"geof_order", "bound_crossing", "realistic_below_perfect"};
        case Scenario::Fig5: return {"gap_order"};
        case Scenario::Fig8: return {"onoff_small"};
        case Scenario::Fig9: return {"perfect_resource_consistency"};
        case Scenario::Sweep: return {};
    }
    return {};
}

SweepConfig SweepConfig::defaults(Scenario s) {
    SweepConfig c;
    c.scenario = s;
    c.gamma = {0.1};
    c.chi = {0.3};
    c.channel = {0.1};
    c.tau_s = {1.0};
    c.tau_d = {1.0};
    c.detectors = {DetectorKind::PNR};
    c.orders = {1, 3};
    c.nla_sizes = {1, 2, 3, 4};
    c.checks = available_checks(s);
    switch (s) {
        case Scenario::Fig3:
            c.gain = {1.0, 10.0, 20};
            c.orders = {3};
            break;
        case Scenario::Fig4:
            c.gain = {1.0, 8.0, 20};
            c.tau_s = {1.0, 0.7};
            c.tau_d = {1.0, 0.7};
            break;
        case Scenario::Fig5:
            c.gain = {1.0, 7.0, 12};
            break;
        case Scenario::Fig8:
            c.gain = {1.0, 10.0, 20};
            c.detectors = {DetectorKind::PNR, DetectorKind::OnOff};
            break;
        case Scenario::Fig9:
            c.gain = {4.0, 4.0, 1};
            c.tau_s = range(0.1, 1.0, 19);
            break;
        case Scenario::Sweep:
            c.gain = {1.0, 4.0, 4};
            break;
    }
    return c;
}

void SweepConfig::validate() const {
    if (!(gain.min > 0.0) || !std::isfinite(gain.max) || gain.max < gain.min)
        throw ConfigError(fmt::format("gain range [{}, {}] invalid", gain.min, gain.max));
    if (gain.steps < 1) throw ConfigError("gain_steps must be >= 1");
    if (gain.steps == 1 && gain.max != gain.min)
        throw ConfigError("a single gain step needs gain_min = gain_max");
    auto nonempty = [](bool empty, const char* key) {
        if (empty) throw ConfigError(fmt::format("{} must not be empty", key));
    };
    nonempty(gamma.empty(), "gamma");
    nonempty(chi.empty(), "chi");
    nonempty(channel.empty(), "channel");
    nonempty(tau_s.empty(), "tau_s");
    nonempty(tau_d.empty(), "tau_d");
    nonempty(detectors.empty(), "detectors");
    nonempty(orders.empty(), "orders");
    nonempty(nla_sizes.empty(), "nla_sizes");
    in_range(gamma, "gamma", 0.0, 1e6, false, false);
    in_range(chi, "chi", 0.0, 1.0, false, true);
    in_range(channel, "channel", 0.0, 1.0, true, false);
    in_range(tau_s, "tau_s", 0.0, 1.0, false, false);
    in_range(tau_d, "tau_d", 0.0, 1.0, false, false);
    for (int n : nla_sizes)
        if (n < 1) throw ConfigError(fmt::format("nla_sizes entry {} < 1", n));
    const bool epr = scenario == Scenario::Fig4 || scenario == Scenario::Fig5 ||
                     (scenario == Scenario::Sweep && input == "epr");
    for (int o : orders) {
        bool ok = epr ? (o == 1 || o == 3) : (o == 1 || o == 2 || o == 3 || o == 7);
        if (scenario == Scenario::Fig3) ok = o == 1 || o == 2 || o == 3;
        if (!ok) throw ConfigError(fmt::format("scissor order {} not available here", o));
    }
    if (input != "coherent" && input != "epr")
        throw ConfigError(fmt::format("input '{}' must be coherent or epr", input));
    if (cutoff < 1 || cutoff > 30) throw ConfigError(fmt::format("cutoff {} outside [1, 30]", cutoff));
    if ((scenario == Scenario::Fig4 || scenario == Scenario::Fig5) && tau_s.size() != tau_d.size())
        throw ConfigError("tau_s and tau_d are paired settings here and need equal lengths");
    auto known = available_checks(scenario);
    for (const auto& c : checks)
        if (std::find(known.begin(), known.end(), c) == known.end())
            throw ConfigError(fmt::format("unknown check '{}' for {}", c, scenario_name(scenario)));
    if (output.find('/') != std::string::npos) throw ConfigError("output is a file stem, not a path");

    // every enabled check needs the grid points it compares
    auto has = [](const auto& v, auto x) { return std::find(v.begin(), v.end(), x) != v.end(); };
    auto require = [&](const std::string& check, bool ok, const char* what) {
        if (has(checks, check) && !ok)
            throw ConfigError(fmt::format("check '{}' needs {}", check, what));
    };
    require("p_vs_n3", has(orders, 3) && has(nla_sizes, 3), "order 3 and N = 3");
    require("f_vs_n3", has(orders, 3) && has(nla_sizes, 3), "order 3 and N = 3");
    require("p_vs_n4", has(orders, 3) && has(nla_sizes, 4), "order 3 and N = 4");
    require("f_vs_n4", has(orders, 3) && has(nla_sizes, 4), "order 3 and N = 4");
    require("geof_order", has(orders, 1) && has(orders, 3), "orders 1 and 3");
    require("bound_crossing", has(orders, 1) && has(orders, 3), "orders 1 and 3");
    require("gap_order", has(orders, 1) && has(orders, 3), "orders 1 and 3");
    bool perfect = false;
    for (std::size_t i = 0; i < std::min(tau_s.size(), tau_d.size()); ++i)
        perfect = perfect || (tau_s[i] == 1.0 && tau_d[i] == 1.0);
    require("realistic_below_perfect", perfect && tau_s.size() > 1,
            "a perfect setting (tau_s = tau_d = 1) and at least one other");
    require("onoff_small", has(detectors, DetectorKind::PNR) && has(detectors, DetectorKind::OnOff),
            "both detector kinds");
    require("perfect_resource_consistency",
            has(tau_s, 1.0) && tau_d.front() == 1.0 && detectors.front() == DetectorKind::PNR,
            "tau_s = 1 and a perfect PNR detector");
}

SweepConfig parse_config(const std::string& text, Scenario scenario) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
    }
    // the INI reader drops empty sections; their names must still be known
    std::istringstream lines(text);
    for (std::string line; std::getline(lines, line);) {
        boost::algorithm::trim(line);
        if (line.size() > 1 && line.front() == '[' && line.back() == ']')
            scenario_from_name(boost::algorithm::trim_copy(line.substr(1, line.size() - 2)));
    }
    SweepConfig c = SweepConfig::defaults(scenario);
    for (const auto& [section, body] : tree) {
        Scenario s = scenario_from_name(section);
        if (body.data().size() && body.empty())
            throw ConfigError(fmt::format("'{}' must be a [section]", section));
        for (const auto& [key, node] : body)
            if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
                throw ConfigError(fmt::format("unknown key '{}' in [{}]", key, section));
        if (s != scenario) continue;
        for (const auto& [key, node] : body) {
            const std::string v = boost::algorithm::trim_copy(node.data());
            auto doubles = [&] {
                std::vector<double> out;
                for (const auto& x : split_list(v)) out.push_back(to_double(key, x));
                return out;
            };
            auto ints = [&] {
                std::vector<int> out;
                for (const auto& x : split_list(v)) out.push_back(to_int(key, x));
                return out;
            };
            if (key == "gain_min") c.gain.min = to_double(key, v);
            else if (key == "gain_max") c.gain.max = to_double(key, v);
            else if (key == "gain_steps") c.gain.steps = to_int(key, v);
            else if (key == "gamma") c.gamma = doubles();
            else if (key == "chi") c.chi = doubles();
            else if (key == "channel") c.channel = doubles();
            else if (key == "tau_s") c.tau_s = doubles();
            else if (key == "tau_d") c.tau_d = doubles();
            else if (key == "orders") c.orders = ints();
            else if (key == "nla_sizes") c.nla_sizes = ints();
            else if (key == "cutoff") c.cutoff = to_int(key, v);
            else if (key == "input") c.input = v;
            else if (key == "output") c.output = v;
            else if (key == "checks") c.checks = split_list(v);
            else if (key == "detectors") {
                c.detectors.clear();
                for (const auto& x : split_list(v)) c.detectors.push_back(to_detector(x));
            }
        }
    }
    c.validate();
    return c;
}

SweepConfig load_config(const std::filesystem::path& path, Scenario scenario) {
    std::ifstream f(path);
    if (!f) throw ConfigError(fmt::format("cannot read config '{}'", path.string()));
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), scenario);
}

std::string serialize(const SweepConfig& c) {
    std::string s = fmt::format("[{}]\n", scenario_name(c.scenario));
    auto line = [&](const char* k, const std::string& v) { s += fmt::format("{} = {}\n", k, v); };
    line("gain_min", fmt_double(c.gain.min));
    line("gain_max", fmt_double(c.gain.max));
    line("gain_steps", std::to_string(c.gain.steps));
    line("gamma", join(c.gamma, fmt_double));
    line("chi", join(c.chi, fmt_double));
    line("channel", join(c.channel, fmt_double));
    line("tau_s", join(c.tau_s, fmt_double));
    line("tau_d", join(c.tau_d, fmt_double));
    line("detectors", join(c.detectors, detector_name));
    line("orders", join(c.orders, [](int x) { return std::to_string(x); }));
    line("nla_sizes", join(c.nla_sizes, [](int x) { return std::to_string(x); }));
    line("input", c.input);
    line("cutoff", std::to_string(c.cutoff));
    line("output", c.output);
    line("checks", boost::algorithm::join(c.checks, ", "));
    return s;
}

}  // namespace scissorlab
