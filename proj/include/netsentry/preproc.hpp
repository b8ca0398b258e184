#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "netsentry/addr.hpp"
#include "netsentry/decode.hpp"

namespace netsentry {

struct PreprocEvent {
    std::uint32_t gid = 0;
    std::uint32_t sid = 0;
    std::string classification;
    std::uint32_t priority = 0;
    std::string message;
    const DecodedPacket* packet = nullptr;
};

struct EventInfo {
    const char* classification;
    std::uint32_t priority;
    const char* message;
};

// Closed table of the built-in detector events; every emitted event takes its
// classification/priority/message from here.
inline const std::map<std::pair<std::uint32_t, std::uint32_t>, EventInfo>& event_table()
{
    static const std::map<std::pair<std::uint32_t, std::uint32_t>, EventInfo> table = {
        {{119, 31}, {"Unknown Traffic", 3, "(http_inspect) UNKNOWN METHOD"}},
        {{122, 1}, {"Attempted Information Leak", 2, "(portscan) TCP Portscan"}},
        {{122, 3}, {"Attempted Information Leak", 2, "(portscan) TCP Portsweep"}},
        {{122, 17}, {"Attempted Information Leak", 2, "(portscan) UDP Portscan"}},
        {{122, 23}, {"Attempted Information Leak", 2, "(portscan) UDP Filtered Portsweep"}},
        {{112, 1}, {"protocol-command-decode", 3, "(arp spoof) Unicast ARP request"}},
        {{112, 2}, {"Potentially Bad Traffic", 2, "(arp spoof) Ethernet/ARP Mismatch request for Source"}},
        {{112, 3}, {"Potentially Bad Traffic", 2, "(arp spoof) Ethernet/ARP Mismatch request for Destination"}},
        {{112, 4}, {"Potentially Bad Traffic", 2, "(arp spoof) ARP cache overwrite attack"}},
    };
    return table;
}

inline PreprocEvent make_event(std::uint32_t gid, std::uint32_t sid, const DecodedPacket& pkt)
{
    const EventInfo& info = event_table().at({gid, sid});
    return {gid, sid, info.classification, info.priority, info.message, &pkt};
}

inline const std::set<std::string>& default_known_methods()
{
    static const std::set<std::string> methods = {
        "GET", "HEAD", "POST", "PUT", "DELETE", "OPTIONS", "TRACE", "CONNECT", "PATCH"};
    return methods;
}

// 119:31 when a parsed request line carries a method outside the whitelist
// (case-sensitive: "get" is unknown).
inline std::optional<PreprocEvent> http_inspect(
    const DecodedPacket& pkt, const std::set<std::string>& known_methods)
{
    if (!pkt.http)
        return std::nullopt;
    if (known_methods.contains(pkt.http->method))
        return std::nullopt;
    return make_event(119, 31, pkt);
}

struct ScanConfig {
    double window_seconds = 60.0;
    std::size_t scan_ports = 5; // distinct ports on one destination
    std::size_t sweep_hosts = 5; // distinct destination hosts
    double filtered_ratio = 0.8; // unanswered fraction for the "Filtered" variant
    double cooldown_seconds = 60.0; // per (source, event kind)
};

// Sliding-window distinct-count portscan/portsweep detector, fed serially in
// packet order. Observations are per-source probe records; a reverse-direction
// packet answers the newest matching probe via mark_response and is not itself
// recorded (see the pipeline, which calls mark_response first).
class ScanTracker {
public:
    explicit ScanTracker(ScanConfig cfg = {}) : cfg_(cfg) {}

    const ScanConfig& config() const { return cfg_; }

    // Reverse-direction packet: answers the newest matching observation still
    // inside the window (stale probes cannot be answered; they no longer count
    // toward any threshold either). Returns true when a match was found, i.e.
    // the packet is a response, not a probe.
    bool mark_response(const DecodedPacket& pkt)
    {
        if (!pkt.ip || !pkt.transport)
            return false;
        const auto& t = *pkt.transport;
        auto src_it = sources_.find(pkt.ip->dst_ip); // original prober
        if (src_it == sources_.end())
            return false;
        auto window_us = static_cast<std::int64_t>(cfg_.window_seconds * 1e6);
        std::int64_t now = pkt.ts_us();
        auto& obs = src_it->second.observations;
        if (t.kind == TransportKind::tcp || t.kind == TransportKind::udp) {
            for (auto it = obs.rbegin(); it != obs.rend(); ++it) {
                if (now - it->t_us > window_us)
                    continue;
                if (it->dst == pkt.ip->src_ip && it->kind == t.kind &&
                    it->dst_port == t.src_port.value_or(0) &&
                    it->src_port == t.dst_port.value_or(0)) {
                    it->answered = true;
                    return true;
                }
            }
            return false;
        }
        if (t.kind == TransportKind::icmp || t.kind == TransportKind::icmpv6) {
            // e.g. port unreachable: answers the newest probe of that host
            for (auto it = obs.rbegin(); it != obs.rend(); ++it) {
                if (now - it->t_us > window_us)
                    continue;
                if (it->dst == pkt.ip->src_ip) {
                    it->answered = true;
                    return true;
                }
            }
        }
        return false;
    }

    // Insert a probe observation and evaluate thresholds. now_us is the packet
    // capture time; stale observations are evicted before evaluation.
    std::vector<PreprocEvent> observe(const DecodedPacket& pkt, std::int64_t now_us)
    {
        std::vector<PreprocEvent> events;
        if (!pkt.ip || !pkt.transport)
            return events;
        const auto& t = *pkt.transport;
        if (t.kind != TransportKind::tcp && t.kind != TransportKind::udp)
            return events;

        auto& state = sources_[pkt.ip->src_ip];
        evict(state, now_us);
        state.observations.push_back({pkt.ip->dst_ip, t.dst_port.value_or(0),
            t.src_port.value_or(0), t.kind, false, now_us});

        bool is_tcp = t.kind == TransportKind::tcp;

        // portscan: one source, one destination, many ports
        std::set<std::uint16_t> ports;
        for (const auto& o : state.observations)
            if (o.kind == t.kind && o.dst == pkt.ip->dst_ip)
                ports.insert(o.dst_port);
        if (ports.size() >= cfg_.scan_ports)
            try_emit(events, pkt, state, is_tcp ? 1 : 17, now_us);

        // portsweep: one source, many destination hosts
        std::set<IpAddr> hosts;
        std::size_t total = 0, unanswered = 0;
        for (const auto& o : state.observations) {
            if (o.kind != t.kind)
                continue;
            hosts.insert(o.dst);
            ++total;
            if (!o.answered)
                ++unanswered;
        }
        if (hosts.size() >= cfg_.sweep_hosts) {
            std::uint32_t sid;
            if (is_tcp) {
                sid = 3;
            } else {
                double fraction = total ? static_cast<double>(unanswered) / static_cast<double>(total) : 0.0;
                sid = (fraction >= cfg_.filtered_ratio) ? 23 : 17;
            }
            try_emit(events, pkt, state, sid, now_us);
        }
        return events;
    }

private:
    struct Observation {
        IpAddr dst;
        std::uint16_t dst_port;
        std::uint16_t src_port;
        TransportKind kind;
        bool answered;
        std::int64_t t_us;
    };

    struct SourceState {
        std::vector<Observation> observations;
        std::map<std::uint32_t, std::int64_t> last_emit_us; // keyed by sid
    };

    void evict(SourceState& state, std::int64_t now_us)
    {
        auto window_us = static_cast<std::int64_t>(cfg_.window_seconds * 1e6);
        std::erase_if(state.observations,
            [&](const Observation& o) { return now_us - o.t_us > window_us; });
    }

    void try_emit(std::vector<PreprocEvent>& events, const DecodedPacket& pkt, SourceState& state,
        std::uint32_t sid, std::int64_t now_us)
    {
        auto cooldown_us = static_cast<std::int64_t>(cfg_.cooldown_seconds * 1e6);
        auto it = state.last_emit_us.find(sid);
        if (it != state.last_emit_us.end() && now_us - it->second < cooldown_us)
            return;
        state.last_emit_us[sid] = now_us;
        events.push_back(make_event(122, sid, pkt));
    }

    ScanConfig cfg_;
    std::map<IpAddr, SourceState> sources_;
};

// Configured IP->MAC bindings; 112:4 can only fire for addresses listed here.
using ArpStaticMap = std::map<IpAddr, MacAddr>;

// Stateless ARP checks, in sid order; several may fire for one packet.
inline std::vector<PreprocEvent> arpspoof_observe(const ArpStaticMap& static_map,
    const DecodedPacket& pkt)
{
    std::vector<PreprocEvent> events;
    if (!pkt.arp)
        return events;
    const ArpPacket& arp = *pkt.arp;
    const EthernetFrame& frame = pkt.frame;

    if (arp.operation == ArpPacket::Op::request && !frame.dst_mac.is_broadcast())
        events.push_back(make_event(112, 1, pkt));
    if (frame.src_mac != arp.sender_mac)
        events.push_back(make_event(112, 2, pkt));
    if (arp.operation == ArpPacket::Op::reply && frame.dst_mac != arp.target_mac)
        events.push_back(make_event(112, 3, pkt));
    auto it = static_map.find(arp.sender_ip);
    if (it != static_map.end() && arp.sender_mac != it->second)
        events.push_back(make_event(112, 4, pkt));
    return events;
}

} // namespace netsentry
