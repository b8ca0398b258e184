// netsentry: replay-based intrusion detection, host blocking and network
// forensics over classic capture files, plus a deterministic attack forge.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netsentry/alert.hpp"
#include "netsentry/blocklist.hpp"
#include "netsentry/config.hpp"
#include "netsentry/engine.hpp"
#include "netsentry/forensics.hpp"
#include "netsentry/forge.hpp"
#include "netsentry/pcap.hpp"
#include "netsentry/rules.hpp"
#include "netsentry/timefmt.hpp"

using namespace netsentry;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitCapture = 2;

struct CliError : std::runtime_error {
    int code;
    CliError(int code_, const std::string& what) : std::runtime_error(what), code(code_) {}
};

IpAddr require_ip(const std::string& text)
{
    auto ip = IpAddr::parse(text);
    if (!ip)
        throw CliError(kExitConfig, "bad address '" + text + "'");
    return *ip;
}

MacAddr require_mac(const std::string& text)
{
    auto mac = MacAddr::parse(text);
    if (!mac)
        throw CliError(kExitConfig, "bad mac '" + text + "'");
    return *mac;
}

std::vector<IpAddr> require_ip_list(const std::string& text)
{
    std::vector<IpAddr> out;
    for (const auto& item : netsentry::detail::split_commas(text))
        out.push_back(require_ip(item));
    if (out.empty())
        throw CliError(kExitConfig, "empty address list");
    return out;
}

std::pair<IpAddr, std::uint16_t> require_endpoint(const std::string& text, std::uint16_t def_port)
{
    auto colon = text.rfind(':');
    // v6 addresses contain colons; an endpoint needs a port after a final
    // colon preceded by either a v4 address or a bracketless v6 we can parse
    if (colon != std::string::npos) {
        auto head = text.substr(0, colon);
        auto tail = text.substr(colon + 1);
        auto ip = IpAddr::parse(head);
        bool numeric = !tail.empty() &&
            std::all_of(tail.begin(), tail.end(), [](char c) { return c >= '0' && c <= '9'; });
        if (ip && numeric) {
            unsigned long port = std::stoul(tail);
            if (port > 65535)
                throw CliError(kExitConfig, "port out of range in '" + text + "'");
            return {*ip, static_cast<std::uint16_t>(port)};
        }
    }
    return {require_ip(text), def_port};
}

std::pair<std::uint32_t, std::uint32_t> require_rule_id(const std::string& text)
{
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw CliError(kExitConfig, "expected GID:SID, got '" + text + "'");
    auto gid = netsentry::detail::parse_u64(std::string_view(text).substr(0, colon));
    auto sid = netsentry::detail::parse_u64(std::string_view(text).substr(colon + 1));
    if (!gid || !sid)
        throw CliError(kExitConfig, "expected GID:SID, got '" + text + "'");
    return {static_cast<std::uint32_t>(*gid), static_cast<std::uint32_t>(*sid)};
}

ReplayClock parse_clock(const std::string& text)
{
    if (text == "fast")
        return ReplayClock::as_fast_as_possible();
    if (text == "realtime")
        return ReplayClock::realtime();
    if (text.starts_with("scale=")) {
        try {
            double f = std::stod(text.substr(6));
            if (f > 0.0)
                return ReplayClock::scaled(f);
        } catch (const std::exception&) {
        }
    }
    throw CliError(kExitConfig, "bad clock '" + text + "' (fast | realtime | scale=N)");
}

// ---- rules ----------------------------------------------------------------

std::set<std::pair<std::uint32_t, std::uint32_t>> load_disabled_ids(
    const std::filesystem::path& state_path)
{
    std::set<std::pair<std::uint32_t, std::uint32_t>> ids;
    std::ifstream in(state_path);
    if (!in)
        return ids;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        ids.insert(require_rule_id(line));
    }
    return ids;
}

void save_disabled_ids(const std::filesystem::path& state_path,
    const std::set<std::pair<std::uint32_t, std::uint32_t>>& ids)
{
    std::ofstream os(state_path, std::ios::trunc);
    if (!os)
        throw CliError(kExitConfig, "cannot write " + state_path.string());
    for (const auto& [gid, sid] : ids)
        os << gid << ':' << sid << '\n';
}

RuleSet load_rules_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw CliError(kExitConfig, "cannot open rules file " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    // listing and toggling do not evaluate address specs, so undefined
    // network variables resolve permissively here
    Variables vars;
    vars.defs["HOME_NET"] = {{*Cidr::parse("0.0.0.0/0"), *Cidr::parse("::/0")}, false};
    vars.defs["EXTERNAL_NET"] = {vars.defs["HOME_NET"].nets, true};
    return parse_ruleset(text, vars);
}

int cmd_rules(const std::string& action, const std::string& id_text,
    const std::filesystem::path& rules_path, std::filesystem::path state_path)
{
    if (state_path.empty())
        state_path = rules_path.string() + ".state";
    RuleSet rules = load_rules_file(rules_path);
    auto disabled = load_disabled_ids(state_path);

    if (action == "list") {
        for (const auto& r : rules.rules) {
            bool off = disabled.contains({r.options.gid, r.options.sid});
            std::cout << (off ? "✘" : "✔") << '\t' << r.options.gid << ':'
                      << r.options.sid << '\t' << r.options.classtype.value_or("none") << '\t'
                      << r.options.msg << '\n';
        }
        return kExitOk;
    }

    auto id = require_rule_id(id_text);
    if (!rules.find(id.first, id.second) && !event_table().contains(id))
        throw CliError(kExitConfig, "no rule or built-in event " + id_text);
    if (action == "disable")
        disabled.insert(id);
    else
        disabled.erase(id);
    save_disabled_ids(state_path, disabled);
    std::cout << (action == "disable" ? "disabled " : "enabled ") << id.first << ':' << id.second
              << '\n';
    return kExitOk;
}

// ---- blocks ---------------------------------------------------------------

int cmd_blocks(const std::string& action, const std::string& ip_text,
    const std::filesystem::path& state_path)
{
    BlockTable table(500);
    if (std::filesystem::exists(state_path))
        table = BlockTable::load(state_path);
    else if (action == "remove")
        throw CliError(kExitConfig, "cannot open block state " + state_path.string());

    if (action == "list") {
        auto [count, rows] = table.summary();
        std::cout << "Last 500 Hosts Blocked by Snort\n";
        for (const auto& row : rows)
            std::cout << row << '\n';
        std::cout << count << " host IP addresses are currently being blocked by Snort.\n";
        return kExitOk;
    }

    IpAddr ip = require_ip(ip_text);
    if (!table.remove(ip))
        throw CliError(kExitConfig, ip_text + " is not blocked");
    table.save(state_path);
    std::cout << "removed " << ip.to_string() << '\n';
    return kExitOk;
}

// ---- run ------------------------------------------------------------------

int cmd_run(const std::filesystem::path& config_path, const std::filesystem::path& capture_path,
    const std::string& clock_text, bool ids_only)
{
    ReplayClock clock = parse_clock(clock_text);
    EngineConfig cfg;
    try {
        cfg = load_engine_config(config_path);
    } catch (const std::exception& e) {
        throw CliError(kExitConfig, e.what());
    }
    if (ids_only)
        cfg.policy.enabled = false;

    std::unique_ptr<Engine> engine;
    try {
        engine = std::make_unique<Engine>(cfg);
    } catch (const std::exception& e) {
        throw CliError(kExitConfig, e.what());
    }

    CaptureFile capture;
    try {
        capture = read_capture(capture_path);
        engine->run(capture, clock);
    } catch (const std::exception& e) {
        throw CliError(kExitCapture, e.what());
    }
    engine->write_outputs();

    const auto& stats = engine->stats();
    if (stats.decode_errors)
        std::cerr << "decode errors: " << stats.decode_errors << '\n';
    std::cout << "packets: " << stats.packets << '\n';
    std::cout << "alerts: " << stats.alerts << '\n';
    std::cout << "blocked: " << engine->blocks().size() << '\n';
    return kExitOk;
}

// ---- report ---------------------------------------------------------------

int cmd_report(const std::vector<std::string>& alert_paths, const std::string& blocks_path,
    const std::string& format, double gap_seconds)
{
    std::vector<std::filesystem::path> sources;
    for (const auto& p : alert_paths)
        sources.emplace_back(p);
    if (!blocks_path.empty())
        sources.emplace_back(blocks_path);
    try {
        EvidenceSet evidence = collect(sources);
        auto incidents = examine(evidence, gap_seconds);
        auto report = analyze(incidents, evidence);
        if (format == "json")
            std::cout << render_report_json(report);
        else
            std::cout << render_report_text(report);
    } catch (const std::exception& e) {
        throw CliError(kExitConfig, e.what());
    }
    return kExitOk;
}

// ---- stats ----------------------------------------------------------------

TrafficFilter parse_filter(const std::string& text)
{
    if (text.empty() || text == "all")
        return {};
    auto make = [&](FilterKind kind, const std::string& net_text) {
        auto net = Cidr::parse(net_text);
        if (!net)
            throw CliError(kExitConfig, "bad filter network '" + net_text + "'");
        return TrafficFilter{kind, *net};
    };
    if (text.starts_with("src:"))
        return make(FilterKind::by_src, text.substr(4));
    if (text.starts_with("dst:"))
        return make(FilterKind::by_dst, text.substr(4));
    throw CliError(kExitConfig, "bad filter '" + text + "' (all | src:CIDR | dst:CIDR)");
}

int cmd_stats(const std::filesystem::path& capture_path, double bin_seconds,
    const std::string& filter_text)
{
    TrafficFilter filter = parse_filter(filter_text);
    if (!(bin_seconds > 0.0))
        throw CliError(kExitConfig, "bin seconds must be > 0");
    CaptureFile capture;
    try {
        capture = read_capture(capture_path);
    } catch (const std::exception& e) {
        throw CliError(kExitCapture, e.what());
    }
    RateSeries series = traffic_series(capture, bin_seconds, filter);
    if (series.bits.empty())
        throw CliError(kExitConfig, "no packets");
    auto bin_us = static_cast<std::int64_t>(std::llround(bin_seconds * 1e6));
    char buf[64];
    for (std::size_t i = 0; i < series.bits.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.3f", series.rate(i));
        std::cout << format_ts_ms(series.start_us + static_cast<std::int64_t>(i) * bin_us) << '\t'
                  << series.bits[i] << '\t' << buf << '\n';
    }
    auto [peak_start, peak_rate] = peak(series);
    std::snprintf(buf, sizeof(buf), "%.3f", peak_rate);
    std::cout << "peak: " << buf << " bps at " << format_ts_ms(peak_start) << '\n';
    return kExitOk;
}

// ---- forge ----------------------------------------------------------------

void write_forge_result(const forge::ForgeResult& result, const std::filesystem::path& out)
{
    write_capture(result.capture, out);
    forge::save_manifest(result.manifest, out.string() + ".manifest.json");
    const auto& m = result.manifest;
    std::cout << "scenario: " << m.scenario << '\n';
    std::cout << "packets: " << result.capture.records.size() << '\n';
    std::cout << "total bits: " << m.total_bits << '\n';
    for (const auto& e : m.expected_events) {
        std::cout << "expect " << e.gid << ':' << e.sid << " in [" << e.min << ", " << e.max
                  << "]\n";
    }
    for (const auto& r : m.required_rules)
        std::cout << "requires rule: " << r << '\n';
    for (const auto& c : m.required_config)
        std::cout << "requires config: " << c << '\n';
    std::cout << "wrote " << out.string() << " and " << out.string() << ".manifest.json\n";
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"network intrusion detection, blocking and forensic analysis over capture files"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "replay a capture through the detection pipeline");
    std::string run_config, run_capture, run_clock = "fast";
    bool run_ids_only = false;
    run->add_option("--config", run_config, "engine config file")
        ->envname("NETSENTRY_CONFIG")
        ->required();
    run->add_option("--capture", run_capture, "capture file to replay")->required();
    run->add_option("--clock", run_clock, "fast | realtime | scale=N");
    run->add_flag("--ids-only", run_ids_only, "alert without blocking");

    // rules
    auto* rules = app.add_subcommand("rules", "list or toggle detection rules");
    rules->require_subcommand(1);
    std::string rules_path, rules_state, rules_id;
    auto add_rules_common = [&](CLI::App* sub, bool with_id) {
        sub->add_option("--rules", rules_path, "rules file")->required();
        sub->add_option("--state", rules_state, "sidecar enable/disable state file");
        if (with_id)
            sub->add_option("id", rules_id, "GID:SID")->required();
    };
    add_rules_common(rules->add_subcommand("list", "print rules with enabled flags"), false);
    add_rules_common(rules->add_subcommand("enable", "enable a rule or built-in event"), true);
    add_rules_common(rules->add_subcommand("disable", "disable a rule or built-in event"), true);

    // blocks
    auto* blocks = app.add_subcommand("blocks", "inspect or edit the blocked-host table");
    blocks->require_subcommand(1);
    std::string blocks_state, blocks_ip;
    auto* blocks_list = blocks->add_subcommand("list", "render the blocked-host table");
    blocks_list->add_option("--state", blocks_state, "block table state file")->required();
    auto* blocks_remove = blocks->add_subcommand("remove", "unblock one host");
    blocks_remove->add_option("ip", blocks_ip, "blocked address")->required();
    blocks_remove->add_option("--state", blocks_state, "block table state file")->required();

    // report
    auto* report = app.add_subcommand("report", "forensic report from logs and block state");
    std::vector<std::string> report_alerts;
    std::string report_blocks, report_format = "table";
    double report_gap = 300.0;
    report->add_option("--alerts", report_alerts, "alert log file(s)")->required();
    report->add_option("--blocks", report_blocks, "block table state file");
    report->add_option("--format", report_format, "table | json")
        ->check(CLI::IsMember({"table", "json"}));
    report->add_option("--gap", report_gap, "incident gap threshold in seconds");

    // stats
    auto* stats = app.add_subcommand("stats", "traffic-rate series and peak from a capture");
    std::string stats_capture, stats_filter = "all";
    double stats_bin = 1.0;
    stats->add_option("--capture", stats_capture, "capture file")->required();
    stats->add_option("--bin", stats_bin, "bin width in seconds");
    stats->add_option("--filter", stats_filter, "all | src:CIDR | dst:CIDR");

    // forge
    auto* forge_cmd = app.add_subcommand("forge", "generate a labeled attack capture + manifest");
    forge_cmd->require_subcommand(1);
    std::uint64_t forge_seed = 1;
    std::string forge_out;
    std::int64_t forge_start = 0;
    auto add_forge_common = [&](CLI::App* sub) {
        sub->add_option("--seed", forge_seed, "deterministic seed");
        sub->add_option("--out", forge_out, "output capture path")->required();
        sub->add_option("--start-epoch", forge_start, "scenario start time (unix seconds)");
        return sub;
    };

    auto* f_http = add_forge_common(forge_cmd->add_subcommand("http-unknown-method",
        "unknown-method requests against a web server"));
    std::string f_http_server = "10.0.5.188:80", f_http_attackers = "148.229.33.150,63.17.125.15";
    std::string f_http_method = "XDEBUG";
    int f_http_requests = 3;
    f_http->add_option("--server", f_http_server, "server IP[:port]");
    f_http->add_option("--attackers", f_http_attackers, "comma-separated attacker IPs");
    f_http->add_option("--requests", f_http_requests, "requests per attacker");
    f_http->add_option("--method", f_http_method, "request method token");

    auto* f_sweep = add_forge_common(forge_cmd->add_subcommand("udp-portsweep",
        "one-source UDP probe across many hosts"));
    std::string f_sweep_source = "fe80::519a:af2d:d0a5:e03b", f_sweep_hosts;
    std::uint16_t f_sweep_port = 5355;
    double f_sweep_replies = 0.0;
    f_sweep->add_option("--source", f_sweep_source, "scanning source IP");
    f_sweep->add_option("--hosts", f_sweep_hosts, "comma-separated target hosts")->required();
    f_sweep->add_option("--port", f_sweep_port, "probed port");
    f_sweep->add_option("--replies", f_sweep_replies, "fraction of hosts that answer [0,1]");

    auto* f_scan = add_forge_common(forge_cmd->add_subcommand("tcp-portscan",
        "one-source SYN probe across many ports"));
    std::string f_scan_source = "192.0.2.66", f_scan_target = "192.168.88.48", f_scan_ports;
    f_scan->add_option("--source", f_scan_source, "scanning source IP");
    f_scan->add_option("--target", f_scan_target, "target host IP");
    f_scan->add_option("--ports", f_scan_ports, "comma-separated target ports")->required();

    auto* f_arp = add_forge_common(forge_cmd->add_subcommand("arp-spoof",
        "forged ARP frames in one of three variants"));
    std::string f_arp_variant = "mismatch-src", f_arp_attacker_ip = "192.168.88.66";
    std::string f_arp_attacker_mac = "02:00:de:ad:be:ef", f_arp_victim = "192.168.88.57";
    std::string f_arp_imp = "192.168.88.1", f_arp_true_mac = "02:00:00:00:88:01";
    int f_arp_count = 5;
    f_arp->add_option("--variant", f_arp_variant, "mismatch-src | cache-overwrite | unicast-request");
    f_arp->add_option("--attacker-ip", f_arp_attacker_ip, "attacker IPv4");
    f_arp->add_option("--attacker-mac", f_arp_attacker_mac, "attacker MAC");
    f_arp->add_option("--victim", f_arp_victim, "victim IPv4");
    f_arp->add_option("--impersonated", f_arp_imp, "impersonated IPv4");
    f_arp->add_option("--true-mac", f_arp_true_mac, "true MAC of the impersonated host");
    f_arp->add_option("--count", f_arp_count, "claim count");

    auto* f_icmp = add_forge_common(forge_cmd->add_subcommand("icmp-flood",
        "uniformly spaced echo requests"));
    std::string f_icmp_src = "192.168.88.46", f_icmp_dst = "192.168.88.57";
    double f_icmp_pps = 100.0, f_icmp_duration = 10.0;
    f_icmp->add_option("--src", f_icmp_src, "source IP");
    f_icmp->add_option("--dst", f_icmp_dst, "destination IP");
    f_icmp->add_option("--pps", f_icmp_pps, "packets per second");
    f_icmp->add_option("--duration", f_icmp_duration, "seconds");

    auto* f_tcpflood = add_forge_common(forge_cmd->add_subcommand("tcp-flood",
        "SYN + data bursts against one port"));
    std::string f_tf_sources = "192.0.2.10,192.0.2.11", f_tf_target = "192.168.88.48:80";
    int f_tf_connections = 10;
    f_tcpflood->add_option("--sources", f_tf_sources, "comma-separated source IPs");
    f_tcpflood->add_option("--target", f_tf_target, "target IP[:port]");
    f_tcpflood->add_option("--connections", f_tf_connections, "connection count");

    auto* f_base = add_forge_common(forge_cmd->add_subcommand("baseline",
        "well-formed browsing traffic, zero expected alerts"));
    std::string f_base_clients = "192.168.88.20,192.168.88.21", f_base_server = "192.168.88.48:80";
    int f_base_requests = 50;
    f_base->add_option("--clients", f_base_clients, "comma-separated client IPs");
    f_base->add_option("--server", f_base_server, "server IP[:port]");
    f_base->add_option("--requests", f_base_requests, "request count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (run->parsed())
            return cmd_run(run_config, run_capture, run_clock, run_ids_only);

        if (rules->parsed()) {
            const char* action = rules->get_subcommand("list")->parsed() ? "list"
                : rules->get_subcommand("enable")->parsed()              ? "enable"
                                                                         : "disable";
            return cmd_rules(action, rules_id, rules_path, rules_state);
        }

        if (blocks->parsed())
            return cmd_blocks(blocks_list->parsed() ? "list" : "remove", blocks_ip, blocks_state);

        if (report->parsed())
            return cmd_report(report_alerts, report_blocks, report_format, report_gap);

        if (stats->parsed())
            return cmd_stats(stats_capture, stats_bin, stats_filter);

        if (forge_cmd->parsed()) {
            forge::ForgeResult result;
            if (f_http->parsed()) {
                forge::HttpUnknownMethodParams p;
                auto [ip, port] = require_endpoint(f_http_server, 80);
                p.server_ip = ip;
                p.server_port = port;
                p.attackers = require_ip_list(f_http_attackers);
                p.requests_per_attacker = f_http_requests;
                p.method = f_http_method;
                p.start_epoch = forge_start;
                result = forge::forge_http_unknown_method(p, forge_seed);
            } else if (f_sweep->parsed()) {
                forge::UdpPortsweepParams p;
                p.source = require_ip(f_sweep_source);
                p.hosts = require_ip_list(f_sweep_hosts);
                p.port = f_sweep_port;
                p.replies = f_sweep_replies;
                p.start_epoch = forge_start;
                result = forge::forge_udp_portsweep(p, forge_seed);
            } else if (f_scan->parsed()) {
                forge::TcpPortscanParams p;
                p.source = require_ip(f_scan_source);
                p.target = require_ip(f_scan_target);
                for (const auto& item : netsentry::detail::split_commas(f_scan_ports)) {
                    auto v = netsentry::detail::parse_u64(item);
                    if (!v || *v > 65535)
                        throw CliError(kExitConfig, "bad port '" + item + "'");
                    p.ports.push_back(static_cast<std::uint16_t>(*v));
                }
                p.start_epoch = forge_start;
                result = forge::forge_tcp_portscan(p, forge_seed);
            } else if (f_arp->parsed()) {
                forge::ArpSpoofParams p;
                if (f_arp_variant == "mismatch-src")
                    p.variant = forge::ArpSpoofVariant::mismatch_src;
                else if (f_arp_variant == "cache-overwrite")
                    p.variant = forge::ArpSpoofVariant::cache_overwrite;
                else if (f_arp_variant == "unicast-request")
                    p.variant = forge::ArpSpoofVariant::unicast_request;
                else
                    throw CliError(kExitConfig, "bad variant '" + f_arp_variant + "'");
                p.attacker = {require_ip(f_arp_attacker_ip), require_mac(f_arp_attacker_mac)};
                p.victim_ip = require_ip(f_arp_victim);
                p.impersonated_ip = require_ip(f_arp_imp);
                p.impersonated_true_mac = require_mac(f_arp_true_mac);
                p.claim_count = f_arp_count;
                p.start_epoch = forge_start;
                result = forge::forge_arp_spoof(p, forge_seed);
            } else if (f_icmp->parsed()) {
                forge::IcmpFloodParams p;
                p.src = require_ip(f_icmp_src);
                p.dst = require_ip(f_icmp_dst);
                p.packets_per_second = f_icmp_pps;
                p.duration_seconds = f_icmp_duration;
                p.start_epoch = forge_start;
                result = forge::forge_icmp_flood(p, forge_seed);
            } else if (f_tcpflood->parsed()) {
                forge::TcpFloodParams p;
                p.sources = require_ip_list(f_tf_sources);
                auto [ip, port] = require_endpoint(f_tf_target, 80);
                p.target = ip;
                p.target_port = port;
                p.connections = f_tf_connections;
                p.start_epoch = forge_start;
                result = forge::forge_tcp_flood(p, forge_seed);
            } else if (f_base->parsed()) {
                forge::BaselineParams p;
                p.clients = require_ip_list(f_base_clients);
                auto [ip, port] = require_endpoint(f_base_server, 80);
                p.server_ip = ip;
                p.server_port = port;
                p.requests = f_base_requests;
                p.start_epoch = forge_start;
                result = forge::forge_baseline(p, forge_seed);
            }
            write_forge_result(result, forge_out);
            return kExitOk;
        }
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code;
    } catch (const forge::InvalidParams& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}
