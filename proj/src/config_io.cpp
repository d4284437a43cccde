#include "leoiot/config_io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

namespace leoiot {

namespace pt = boost::property_tree;

namespace {

double parse_double(const std::string& key, const std::string& text)
{
    const std::string s = boost::trim_copy(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, text));
    return value;
}

long long parse_int(const std::string& key, const std::string& text)
{
    const std::string s = boost::trim_copy(text);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ConfigError(fmt::format("{}: '{}' is not an integer", key, text));
    return value;
}

bool parse_bool(const std::string& key, const std::string& text)
{
    const std::string s = boost::to_lower_copy(boost::trim_copy(text));
    if (s == "1" || s == "true" || s == "yes" || s == "on")
        return true;
    if (s == "0" || s == "false" || s == "no" || s == "off")
        return false;
    throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, text));
}

std::vector<double> parse_list(const std::string& key, const std::string& text)
{
    std::vector<std::string> parts;
    boost::split(parts, text, boost::is_any_of(","));
    std::vector<double> out;
    for (const auto& p : parts)
        out.push_back(parse_double(key, p));
    return out;
}

// Reads the keys of one section and rejects anything it does not consume.
class SectionReader {
public:
    SectionReader(const pt::ptree& tree, std::string section) : section_(std::move(section))
    {
        if (auto child = tree.get_child_optional(section_))
            node_ = &*child;
    }

    void finish() const
    {
        if (!node_)
            return;
        for (const auto& [key, value] : *node_)
            if (!seen_.count(key))
                throw ConfigError(fmt::format("unknown key '{}.{}'", section_, key));
    }

    bool present() const { return node_ != nullptr; }

    template <typename Fn>
    void read(const char* key, Fn&& apply)
    {
        if (!node_)
            return;
        seen_.insert(key);
        if (auto v = node_->get_optional<std::string>(key))
            apply(fmt::format("{}.{}", section_, key), *v);
    }

    void get(const char* key, double& out)
    {
        read(key, [&](const std::string& k, const std::string& v) { out = parse_double(k, v); });
    }
    void get(const char* key, int& out)
    {
        read(key, [&](const std::string& k, const std::string& v) {
            out = static_cast<int>(parse_int(k, v));
        });
    }
    void get(const char* key, std::uint64_t& out)
    {
        read(key, [&](const std::string& k, const std::string& v) {
            out = static_cast<std::uint64_t>(parse_int(k, v));
        });
    }
    void get(const char* key, bool& out)
    {
        read(key, [&](const std::string& k, const std::string& v) { out = parse_bool(k, v); });
    }
    void get(const char* key, std::string& out)
    {
        read(key, [&](const std::string&, const std::string& v) { out = boost::trim_copy(v); });
    }

private:
    std::string section_;
    const pt::ptree* node_ = nullptr;
    std::set<std::string> seen_;
};

void read_ra(SectionReader& s, RaConfig& ra)
{
    s.get("preambles", ra.preambles);
    s.get("rao_period", ra.rao_period);
    s.get("repetitions", ra.repetitions);
    s.get("rar_window", ra.rar_window);
    s.get("grants_per_subframe", ra.grants_per_subframe);
    s.get("erasure_prob", ra.erasure_prob);
    s.read("erasure_model", [&](const std::string& k, const std::string& v) {
        const std::string m = boost::trim_copy(v);
        if (m == "fixed")
            ra.erasure_model = ErasureModel::fixed;
        else if (m == "power_ramping")
            ra.erasure_model = ErasureModel::power_ramping;
        else
            throw ConfigError(fmt::format("{}: expected fixed or power_ramping", k));
    });
    s.get("max_backoff", ra.max_backoff);
    s.get("max_attempts", ra.max_attempts);
    s.get("extended_prefix", ra.extended_prefix);
    s.get("max_prop_delay", ra.max_prop_delay);
    s.get("prop_legs", ra.prop_legs);
    s.get("t_preamble_base", ra.t_preamble_base);
    s.get("t_rar_base", ra.t_rar_base);
    s.get("t_msg3", ra.t_msg3);
    s.get("t_msg4", ra.t_msg4);
    s.get("t_proc1", ra.t_proc1);
    s.get("t_proc2", ra.t_proc2);
    s.get("t_proc3", ra.t_proc3);
    s.read("min_delay_form", [&](const std::string& k, const std::string& v) {
        const std::string m = boost::trim_copy(v);
        if (m == "literal")
            ra.min_delay_form = MinDelayForm::literal;
        else if (m == "corrected")
            ra.min_delay_form = MinDelayForm::corrected;
        else
            throw ConfigError(fmt::format("{}: expected literal or corrected", k));
    });
}

void read_backhaul(SectionReader& s, BackhaulConfig& bh)
{
    int hops = bh.hops();
    std::vector<double> rates = bh.service_rates;
    std::vector<double> erasures = bh.link_erasures;
    s.get("hops", hops);
    s.read("service_rates", [&](const std::string& k, const std::string& v) { rates = parse_list(k, v); });
    s.read("link_erasures", [&](const std::string& k, const std::string& v) { erasures = parse_list(k, v); });

    if (hops < 1)
        throw ConfigError("backhaul.hops: must be >= 1");
    // A single value applies to every hop.
    auto broadcast = [hops](std::vector<double>& v, const char* key) {
        if (v.size() == 1 || v.empty()) {
            const double x = v.empty() ? 0.0 : v.front();
            v.assign(static_cast<std::size_t>(hops), x);
        }
        else if (static_cast<int>(v.size()) != hops) {
            throw ConfigError(fmt::format("backhaul.{}: expected 1 or {} values, got {}", key, hops, v.size()));
        }
    };
    broadcast(rates, "service_rates");
    broadcast(erasures, "link_erasures");
    bh.service_rates = std::move(rates);
    bh.link_erasures = std::move(erasures);
}

ScenarioConfig from_tree(const pt::ptree& tree)
{
    static const std::set<std::string> known{"scenario", "traffic", "ground_ra", "space_ra", "backhaul"};
    for (const auto& [section, child] : tree)
        if (!known.count(section))
            throw ConfigError(fmt::format("unknown section '{}'", section));

    ScenarioConfig cfg;
    {
        SectionReader s(tree, "scenario");
        s.get("name", cfg.name);
        s.get("seed", cfg.seed);
        s.get("horizon", cfg.horizon);
        s.get("replications", cfg.replications);
        s.finish();
    }
    {
        SectionReader s(tree, "traffic");
        s.get("users", cfg.traffic.users);
        s.get("total_rate", cfg.traffic.total_rate);
        s.get("ground_ratio", cfg.traffic.ground_ratio);
        s.get("ground_core_link", cfg.traffic.ground_core_link);
        s.finish();
    }
    {
        SectionReader s(tree, "ground_ra");
        read_ra(s, cfg.ground_ra);
        s.finish();
    }
    {
        SectionReader s(tree, "space_ra");
        if (s.present()) {
            RaConfig space;
            read_ra(s, space);
            s.finish();
            cfg.space_ra = space;
        }
    }
    {
        SectionReader s(tree, "backhaul");
        if (s.present()) {
            BackhaulConfig bh;
            read_backhaul(s, bh);
            s.finish();
            cfg.backhaul = bh;
        }
    }
    return cfg;
}

std::string fmt_list(const std::vector<double>& v)
{
    return fmt::format("{}", fmt::join(v, ","));
}

void put_ra(pt::ptree& tree, const std::string& section, const RaConfig& ra)
{
    auto put = [&](const char* key, const std::string& value) { tree.put(pt::ptree::path_type(section + "." + key), value); };
    put("preambles", fmt::format("{}", ra.preambles));
    put("rao_period", fmt::format("{}", ra.rao_period));
    put("repetitions", fmt::format("{}", ra.repetitions));
    put("rar_window", fmt::format("{}", ra.rar_window));
    put("grants_per_subframe", fmt::format("{}", ra.grants_per_subframe));
    put("erasure_prob", fmt::format("{}", ra.erasure_prob));
    put("erasure_model", ra.erasure_model == ErasureModel::fixed ? "fixed" : "power_ramping");
    put("max_backoff", fmt::format("{}", ra.max_backoff));
    put("max_attempts", fmt::format("{}", ra.max_attempts));
    put("extended_prefix", fmt::format("{}", ra.extended_prefix));
    put("max_prop_delay", fmt::format("{}", ra.max_prop_delay));
    put("prop_legs", fmt::format("{}", ra.prop_legs));
    put("t_preamble_base", fmt::format("{}", ra.t_preamble_base));
    put("t_rar_base", fmt::format("{}", ra.t_rar_base));
    put("t_msg3", fmt::format("{}", ra.t_msg3));
    put("t_msg4", fmt::format("{}", ra.t_msg4));
    put("t_proc1", fmt::format("{}", ra.t_proc1));
    put("t_proc2", fmt::format("{}", ra.t_proc2));
    put("t_proc3", fmt::format("{}", ra.t_proc3));
    put("min_delay_form", ra.min_delay_form == MinDelayForm::literal ? "literal" : "corrected");
}

pt::ptree to_tree(const ScenarioConfig& cfg)
{
    pt::ptree tree;
    tree.put("scenario.name", cfg.name);
    tree.put("scenario.seed", fmt::format("{}", cfg.seed));
    tree.put("scenario.horizon", fmt::format("{}", cfg.horizon));
    tree.put("scenario.replications", fmt::format("{}", cfg.replications));

    tree.put("traffic.users", fmt::format("{}", cfg.traffic.users));
    tree.put("traffic.total_rate", fmt::format("{}", cfg.traffic.total_rate));
    tree.put("traffic.ground_ratio", fmt::format("{}", cfg.traffic.ground_ratio));
    tree.put("traffic.ground_core_link", cfg.traffic.ground_core_link ? "true" : "false");

    put_ra(tree, "ground_ra", cfg.ground_ra);
    if (cfg.space_ra)
        put_ra(tree, "space_ra", *cfg.space_ra);
    if (cfg.backhaul) {
        tree.put("backhaul.hops", fmt::format("{}", cfg.backhaul->hops()));
        tree.put("backhaul.service_rates", fmt_list(cfg.backhaul->service_rates));
        tree.put("backhaul.link_erasures", fmt_list(cfg.backhaul->link_erasures));
    }
    return tree;
}

} // namespace

ScenarioConfig read_config(std::istream& in)
{
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    }
    catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("malformed config: {}", e.what()));
    }
    return from_tree(tree);
}

ScenarioConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(fmt::format("cannot open config '{}'", path));
    return read_config(in);
}

void write_config(std::ostream& out, const ScenarioConfig& config)
{
    pt::write_ini(out, to_tree(config));
}

std::string to_ini(const ScenarioConfig& config)
{
    std::ostringstream out;
    write_config(out, config);
    return out.str();
}

void apply_override(ScenarioConfig& config, const std::string& dotted_key, const std::string& value)
{
    const auto dot = dotted_key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == dotted_key.size())
        throw ConfigError(fmt::format("override '{}' must look like section.key", dotted_key));

    pt::ptree tree = to_tree(config);
    const std::string section = dotted_key.substr(0, dot);
    const std::string key = dotted_key.substr(dot + 1);

    // Changing the hop count resets the per-hop lists to broadcast form.
    if (section == "backhaul" && key == "hops" && tree.get_child_optional("backhaul")) {
        const auto rates = parse_list("backhaul.service_rates", tree.get<std::string>("backhaul.service_rates"));
        const auto erasures = parse_list("backhaul.link_erasures", tree.get<std::string>("backhaul.link_erasures"));
        tree.put("backhaul.service_rates", fmt::format("{}", rates.front()));
        tree.put("backhaul.link_erasures", fmt::format("{}", erasures.front()));
    }
    tree.put(pt::ptree::path_type(section + "." + key), value);
    config = from_tree(tree);
}

void apply_overrides(ScenarioConfig& config,
                     const std::vector<std::pair<std::string, std::string>>& overrides)
{
    for (const auto& [key, value] : overrides)
        apply_override(config, key, value);
}

std::uint64_t config_hash(const ScenarioConfig& config)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : to_ini(config)) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace leoiot
