#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "netsentry/addr.hpp"
#include "netsentry/blocklist.hpp"
#include "netsentry/preproc.hpp"

namespace netsentry {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EngineConfig {
    std::filesystem::path rules_path; // empty = preprocessors only
    std::filesystem::path rule_state_path; // default: rules_path + ".state"
    std::filesystem::path log_path = "alerts.log";
    std::filesystem::path block_state_path = "blocks.state";
    std::vector<Cidr> home_net;
    std::vector<Cidr> pass_list;
    BlockPolicy policy;
    std::size_t block_capacity = 500;
    std::set<std::uint16_t> http_ports = {80};
    std::set<std::string> known_methods = default_known_methods();
    ScanConfig scan;
    ArpStaticMap arp_static;
    std::string block_hook; // shell command run as "<hook> block <ip>" on new blocks
};

namespace detail {

inline std::vector<std::string> split_commas(const std::string& value)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        auto comma = value.find(',', start);
        std::string item = value.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        while (!item.empty() && (item.front() == ' ' || item.front() == '\t'))
            item.erase(item.begin());
        while (!item.empty() && (item.back() == ' ' || item.back() == '\t'))
            item.pop_back();
        if (!item.empty())
            out.push_back(std::move(item));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return out;
}

inline std::vector<Cidr> parse_cidr_list(const std::string& value, const std::string& key)
{
    std::vector<Cidr> out;
    for (const auto& item : split_commas(value)) {
        auto cidr = Cidr::parse(item);
        if (!cidr)
            throw ConfigError(key + ": bad network '" + item + "'");
        out.push_back(*cidr);
    }
    return out;
}

inline double parse_double(const std::string& value, const std::string& key)
{
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size())
            throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": bad number '" + value + "'");
    }
}

inline std::uint64_t parse_uint(const std::string& value, const std::string& key)
{
    if (value.empty())
        throw ConfigError(key + ": bad number ''");
    std::uint64_t v = 0;
    for (char c : value) {
        if (c < '0' || c > '9')
            throw ConfigError(key + ": bad number '" + value + "'");
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

inline bool parse_bool(const std::string& value, const std::string& key)
{
    if (value == "true" || value == "yes" || value == "1")
        return true;
    if (value == "false" || value == "no" || value == "0")
        return false;
    throw ConfigError(key + ": bad boolean '" + value + "'");
}

} // namespace detail

// Key-value text config, '#' comments. Relative paths resolve against the
// config file's directory. Unknown keys are errors.
inline EngineConfig load_engine_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config " + path.string());
    EngineConfig cfg;
    auto base = path.parent_path();
    auto resolve = [&](const std::string& p) -> std::filesystem::path {
        std::filesystem::path fp(p);
        return fp.is_absolute() || base.empty() ? fp : base / fp;
    };

    bool methods_set = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#')
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
        auto trim = [](std::string s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
                s.erase(s.begin());
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
                s.pop_back();
            return s;
        };
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));

        if (key == "rules") {
            cfg.rules_path = resolve(value);
        } else if (key == "rule_state") {
            cfg.rule_state_path = resolve(value);
        } else if (key == "log") {
            cfg.log_path = resolve(value);
        } else if (key == "block_state") {
            cfg.block_state_path = resolve(value);
        } else if (key == "home_net") {
            cfg.home_net = detail::parse_cidr_list(value, key);
        } else if (key == "pass_list") {
            cfg.pass_list = detail::parse_cidr_list(value, key);
        } else if (key == "block_mode") {
            if (value == "src") cfg.policy.mode = BlockPolicy::Mode::src;
            else if (value == "dst") cfg.policy.mode = BlockPolicy::Mode::dst;
            else if (value == "both") cfg.policy.mode = BlockPolicy::Mode::both;
            else throw ConfigError("block_mode: expected src|dst|both, got '" + value + "'");
        } else if (key == "block_enabled") {
            cfg.policy.enabled = detail::parse_bool(value, key);
        } else if (key == "block_capacity") {
            cfg.block_capacity = static_cast<std::size_t>(detail::parse_uint(value, key));
        } else if (key == "http_ports") {
            cfg.http_ports.clear();
            for (const auto& item : detail::split_commas(value)) {
                auto p = detail::parse_uint(item, key);
                if (p > 65535)
                    throw ConfigError("http_ports: port out of range '" + item + "'");
                cfg.http_ports.insert(static_cast<std::uint16_t>(p));
            }
        } else if (key == "http_known_methods") {
            if (!methods_set) {
                cfg.known_methods.clear();
                methods_set = true;
            }
            for (const auto& item : detail::split_commas(value))
                cfg.known_methods.insert(item);
        } else if (key == "scan_window_seconds") {
            cfg.scan.window_seconds = detail::parse_double(value, key);
        } else if (key == "scan_ports") {
            cfg.scan.scan_ports = static_cast<std::size_t>(detail::parse_uint(value, key));
        } else if (key == "sweep_hosts") {
            cfg.scan.sweep_hosts = static_cast<std::size_t>(detail::parse_uint(value, key));
        } else if (key == "filtered_ratio") {
            cfg.scan.filtered_ratio = detail::parse_double(value, key);
        } else if (key == "scan_cooldown_seconds") {
            cfg.scan.cooldown_seconds = detail::parse_double(value, key);
        } else if (key == "block_hook") {
            cfg.block_hook = value;
        } else if (key == "arp_static") {
            auto sep = value.find('=');
            if (sep == std::string::npos)
                throw ConfigError("arp_static: expected ip=mac, got '" + value + "'");
            auto ip = IpAddr::parse(std::string_view(value).substr(0, sep));
            auto mac = MacAddr::parse(std::string_view(value).substr(sep + 1));
            if (!ip || !mac)
                throw ConfigError("arp_static: bad binding '" + value + "'");
            cfg.arp_static[*ip] = *mac;
        } else {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (cfg.rule_state_path.empty() && !cfg.rules_path.empty())
        cfg.rule_state_path = cfg.rules_path.string() + ".state";
    return cfg;
}

} // namespace netsentry
