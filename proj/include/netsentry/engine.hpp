#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "netsentry/alert.hpp"
#include "netsentry/blocklist.hpp"
#include "netsentry/config.hpp"
#include "netsentry/decode.hpp"
#include "netsentry/pcap.hpp"
#include "netsentry/preproc.hpp"
#include "netsentry/rules.hpp"

namespace netsentry {

struct EngineStats {
    std::uint64_t packets = 0;
    std::uint64_t decode_errors = 0;
    std::uint64_t alerts = 0;
    std::uint64_t hook_failures = 0;
};

inline AlertProtocol packet_protocol(const DecodedPacket& pkt)
{
    if (pkt.arp)
        return AlertProtocol::arp;
    if (pkt.transport) {
        switch (pkt.transport->kind) {
        case TransportKind::tcp: return AlertProtocol::tcp;
        case TransportKind::udp: return AlertProtocol::udp;
        case TransportKind::icmp:
        case TransportKind::icmpv6: return AlertProtocol::icmp;
        case TransportKind::other: return AlertProtocol::ip;
        }
    }
    return AlertProtocol::other;
}

// Single-writer detection pipeline: decode -> preprocessors -> rules, alerts
// appended in generation order, block policy applied per alert.
class Engine {
public:
    explicit Engine(EngineConfig cfg)
        : cfg_(std::move(cfg)),
          scan_(cfg_.scan),
          blocks_(cfg_.block_capacity, cfg_.pass_list)
    {
        Variables vars;
        if (!cfg_.home_net.empty()) {
            vars.defs["HOME_NET"] = {cfg_.home_net, false};
            vars.defs["EXTERNAL_NET"] = {cfg_.home_net, true};
        }
        if (!cfg_.rules_path.empty()) {
            std::ifstream in(cfg_.rules_path);
            if (!in)
                throw ConfigError("cannot open rules file " + cfg_.rules_path.string());
            std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            try {
                rules_ = parse_ruleset(text, vars);
            } catch (const std::exception& e) {
                throw ConfigError(cfg_.rules_path.string() + ": " + e.what());
            }
        } else {
            rules_.variables = vars;
        }
        load_rule_state();
    }

    const EngineConfig& config() const { return cfg_; }
    RuleSet& rules() { return rules_; }
    BlockTable& blocks() { return blocks_; }
    const std::vector<AlertRecord>& alerts() const { return alerts_; }
    const EngineStats& stats() const { return stats_; }

    std::vector<AlertRecord> process_packet(const DecodedPacket& pkt)
    {
        std::vector<PreprocEvent> events;
        bool is_response = scan_.mark_response(pkt);
        if (!is_response) {
            auto scan_events = scan_.observe(pkt, pkt.ts_us());
            events.insert(events.end(), scan_events.begin(), scan_events.end());
        }
        if (pkt.arp) {
            auto arp_events = arpspoof_observe(cfg_.arp_static, pkt);
            events.insert(events.end(), arp_events.begin(), arp_events.end());
        }
        if (auto http_event = http_inspect(pkt, cfg_.known_methods))
            events.push_back(*http_event);

        std::vector<AlertRecord> out;
        for (const auto& ev : events) {
            if (disabled_events_.contains({ev.gid, ev.sid}))
                continue;
            out.push_back(alert_from_event(ev, pkt));
        }
        for (const auto& rule : rules_.rules) {
            if (!rule.enabled)
                continue;
            if (match_rule(rule, pkt))
                out.push_back(alert_from_rule(rule, pkt));
        }
        for (const auto& a : out) {
            alerts_.push_back(a);
            for (const auto& applied : blocks_.apply(a, cfg_.policy)) {
                if (applied.created && !cfg_.block_hook.empty()) {
                    // host-firewall hook point; failures must not stop the stream
                    std::string cmd = cfg_.block_hook + " block " + applied.entry.ip.to_string();
                    if (std::system(cmd.c_str()) != 0)
                        ++stats_.hook_failures;
                }
            }
        }
        stats_.alerts += out.size();
        return out;
    }

    // Decode failures never abort the stream; they are counted.
    void ingest(const CaptureRecord& rec)
    {
        ++stats_.packets;
        DecodedPacket pkt;
        try {
            pkt = decode_packet(rec.bytes, rec.ts_sec, static_cast<std::int32_t>(rec.ts_usec),
                rec.orig_len, cfg_.http_ports);
        } catch (const DecodeError&) {
            ++stats_.decode_errors;
            return;
        }
        process_packet(pkt);
    }

    ReplaySummary run(const CaptureFile& capture, ReplayClock clock = ReplayClock::as_fast_as_possible())
    {
        return replay(capture, clock, [this](const CaptureRecord& rec) { ingest(rec); });
    }

    void write_outputs() const
    {
        write_alert_log(alerts_, cfg_.log_path);
        blocks_.save(cfg_.block_state_path);
    }

private:
    // Sidecar disable state: one "gid:sid" per line. Ids may name loaded rules
    // or built-in preprocessor events.
    void load_rule_state()
    {
        if (cfg_.rule_state_path.empty())
            return;
        std::ifstream in(cfg_.rule_state_path);
        if (!in)
            return; // absent sidecar = everything enabled
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
                line.pop_back();
            if (line.empty() || line[0] == '#')
                continue;
            auto colon = line.find(':');
            auto gid = detail::parse_u64(std::string_view(line).substr(0, colon == std::string::npos ? line.size() : colon));
            auto sid = colon == std::string::npos ? std::nullopt
                                                  : detail::parse_u64(std::string_view(line).substr(colon + 1));
            if (!gid || !sid)
                throw ConfigError(cfg_.rule_state_path.string() + ": bad id '" + line + "'");
            auto g = static_cast<std::uint32_t>(*gid);
            auto s = static_cast<std::uint32_t>(*sid);
            if (Rule* r = rules_.find(g, s)) {
                r->enabled = false;
            } else if (event_table().contains({g, s})) {
                disabled_events_.insert({g, s});
            } else {
                throw ConfigError(cfg_.rule_state_path.string() + ": id " + line +
                    " names neither a loaded rule nor a built-in event");
            }
        }
    }

    AlertRecord alert_from_event(const PreprocEvent& ev, const DecodedPacket& pkt) const
    {
        AlertRecord a;
        a.ts_sec = pkt.ts_sec;
        a.priority = ev.priority;
        a.classification = ev.classification;
        a.gid = ev.gid;
        a.sid = ev.sid;
        a.message = ev.message;
        if (ev.gid == 112) {
            a.protocol = AlertProtocol::arp; // endpoints stay absent
            return a;
        }
        a.protocol = packet_protocol(pkt);
        if (pkt.ip) {
            a.src_ip = pkt.ip->src_ip;
            a.dst_ip = pkt.ip->dst_ip;
        }
        if (ev.gid != 122 && pkt.transport) { // portscan alerts carry no ports
            a.src_port = pkt.transport->src_port;
            a.dst_port = pkt.transport->dst_port;
        }
        return a;
    }

    AlertRecord alert_from_rule(const Rule& rule, const DecodedPacket& pkt) const
    {
        AlertRecord a;
        a.ts_sec = pkt.ts_sec;
        a.priority = rule.options.priority.value_or(0);
        a.classification = rule.options.classtype.value_or("unclassified");
        a.protocol = packet_protocol(pkt);
        a.gid = rule.options.gid;
        a.sid = rule.options.sid;
        a.message = rule.options.msg;
        if (pkt.ip) {
            a.src_ip = pkt.ip->src_ip;
            a.dst_ip = pkt.ip->dst_ip;
        }
        if (pkt.transport) {
            a.src_port = pkt.transport->src_port;
            a.dst_port = pkt.transport->dst_port;
        }
        return a;
    }

    EngineConfig cfg_;
    RuleSet rules_;
    std::set<std::pair<std::uint32_t, std::uint32_t>> disabled_events_;
    ScanTracker scan_;
    BlockTable blocks_;
    std::vector<AlertRecord> alerts_;
    EngineStats stats_;
};

} // namespace netsentry
