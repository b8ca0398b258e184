#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "netsentry/addr.hpp"
#include "netsentry/alert.hpp"
#include "netsentry/pcap.hpp"
#include "netsentry/preproc.hpp"
#include "netsentry/timefmt.hpp"
#include "netsentry/wire.hpp"

// Deterministic labeled-stimulus generation: every scenario produces a capture
// plus a manifest whose expected event counts are computed from the
// construction itself and serve as the end-to-end detection oracle.

namespace netsentry::forge {

struct InvalidParams : std::runtime_error {
    explicit InvalidParams(const std::string& what) : std::runtime_error("invalid params: " + what)
    {
    }
};

// splitmix64: tiny, stable across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint32_t bounded(std::uint32_t n) { return static_cast<std::uint32_t>(next() % n); }

    std::uint16_t ephemeral_port() { return static_cast<std::uint16_t>(49152 + bounded(16384)); }

    std::uint32_t seq() { return static_cast<std::uint32_t>(next()); }

private:
    std::uint64_t state_;
};

struct Actor {
    IpAddr ip;
    MacAddr mac;

    bool operator==(const Actor&) const = default;
};

// Stable locally-administered MAC derived from the address bytes.
inline MacAddr mac_for(const IpAddr& ip)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (int i = 0; i < 16; ++i) {
        h ^= ip.bytes[i];
        h *= 0x100000001b3ull;
    }
    h ^= ip.version;
    h *= 0x100000001b3ull;
    MacAddr m;
    m.octets[0] = 0x02;
    m.octets[1] = 0x00;
    for (int i = 0; i < 4; ++i)
        m.octets[2 + i] = static_cast<std::uint8_t>(h >> (i * 8));
    return m;
}

inline Actor actor_for(const IpAddr& ip) { return {ip, mac_for(ip)}; }

struct ExpectedEvent {
    std::uint32_t gid = 0;
    std::uint32_t sid = 0;
    std::uint64_t min = 0;
    std::uint64_t max = 0;

    bool operator==(const ExpectedEvent&) const = default;
};

struct ForgeManifest {
    std::string scenario;
    std::uint64_t seed = 0;
    std::vector<ExpectedEvent> expected_events;
    bool no_other_events = true; // any (gid,sid) not listed must not fire
    std::map<std::string, Actor> actors;
    std::int64_t start_epoch = 0;
    double duration_seconds = 0.0;
    std::uint64_t total_bits = 0;
    std::vector<std::string> required_rules; // rule lines the expectations assume
    std::vector<std::string> required_config; // engine config lines the expectations assume
    std::string notes;

    bool operator==(const ForgeManifest&) const = default;
};

struct ForgeResult {
    CaptureFile capture;
    ForgeManifest manifest;
};

inline nlohmann::ordered_json manifest_to_json(const ForgeManifest& m)
{
    nlohmann::ordered_json j;
    j["scenario"] = m.scenario;
    j["seed"] = m.seed;
    auto events = nlohmann::ordered_json::array();
    for (const auto& e : m.expected_events)
        events.push_back({{"gid", e.gid}, {"sid", e.sid}, {"min", e.min}, {"max", e.max}});
    j["expected_events"] = std::move(events);
    j["no_other_events"] = m.no_other_events;
    auto actors = nlohmann::ordered_json::object();
    for (const auto& [role, actor] : m.actors)
        actors[role] = {{"ip", actor.ip.to_string()}, {"mac", actor.mac.to_string()}};
    j["actors"] = std::move(actors);
    j["timing"] = {{"start", format_ts(m.start_epoch)}, {"start_epoch", m.start_epoch},
        {"duration_seconds", m.duration_seconds}};
    j["total_bits"] = m.total_bits;
    j["required_rules"] = m.required_rules;
    j["required_config"] = m.required_config;
    j["notes"] = m.notes;
    return j;
}

inline ForgeManifest manifest_from_json(const nlohmann::json& j)
{
    ForgeManifest m;
    m.scenario = j.at("scenario").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& je : j.at("expected_events"))
        m.expected_events.push_back({je.at("gid").get<std::uint32_t>(),
            je.at("sid").get<std::uint32_t>(), je.at("min").get<std::uint64_t>(),
            je.at("max").get<std::uint64_t>()});
    m.no_other_events = j.at("no_other_events").get<bool>();
    for (const auto& [role, ja] : j.at("actors").items()) {
        auto ip = IpAddr::parse(ja.at("ip").get<std::string>());
        auto mac = MacAddr::parse(ja.at("mac").get<std::string>());
        if (!ip || !mac)
            throw std::runtime_error("bad actor in manifest");
        m.actors[role] = {*ip, *mac};
    }
    m.start_epoch = j.at("timing").at("start_epoch").get<std::int64_t>();
    m.duration_seconds = j.at("timing").at("duration_seconds").get<double>();
    m.total_bits = j.at("total_bits").get<std::uint64_t>();
    m.required_rules = j.at("required_rules").get<std::vector<std::string>>();
    m.required_config = j.at("required_config").get<std::vector<std::string>>();
    m.notes = j.at("notes").get<std::string>();
    return m;
}

inline void save_manifest(const ForgeManifest& m, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << manifest_to_json(m).dump(2) << '\n';
    if (!os)
        throw std::runtime_error("write failed on " + path.string());
}

inline ForgeManifest load_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);
    return manifest_from_json(j);
}

// Checks detection output against a manifest. Returns human-readable
// violations; empty means the expectations hold.
inline std::vector<std::string> verify_expectations(const ForgeManifest& m,
    const std::vector<AlertRecord>& alerts)
{
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> counts;
    for (const auto& a : alerts)
        ++counts[{a.gid, a.sid}];
    std::vector<std::string> violations;
    std::set<std::pair<std::uint32_t, std::uint32_t>> listed;
    for (const auto& e : m.expected_events) {
        listed.insert({e.gid, e.sid});
        std::uint64_t got = counts.count({e.gid, e.sid}) ? counts[{e.gid, e.sid}] : 0;
        if (got < e.min || got > e.max)
            violations.push_back("event " + std::to_string(e.gid) + ":" + std::to_string(e.sid) +
                " count " + std::to_string(got) + " outside [" + std::to_string(e.min) + ", " +
                std::to_string(e.max) + "]");
    }
    if (m.no_other_events) {
        for (const auto& [key, n] : counts) {
            if (!listed.contains(key))
                violations.push_back("unexpected event " + std::to_string(key.first) + ":" +
                    std::to_string(key.second) + " fired " + std::to_string(n) + " times");
        }
    }
    return violations;
}

namespace detail {

class CaptureBuilder {
public:
    void add(std::int64_t t_us, Bytes frame)
    {
        CaptureRecord rec;
        rec.ts_sec = static_cast<std::uint32_t>(t_us / 1000000);
        rec.ts_usec = static_cast<std::uint32_t>(t_us % 1000000);
        rec.incl_len = static_cast<std::uint32_t>(frame.size());
        rec.orig_len = rec.incl_len;
        rec.bytes = std::move(frame);
        total_bits_ += static_cast<std::uint64_t>(rec.orig_len) * 8;
        if (cap_.records.empty())
            first_us_ = t_us;
        last_us_ = t_us;
        cap_.records.push_back(std::move(rec));
    }

    CaptureFile take() { return std::move(cap_); }
    std::uint64_t total_bits() const { return total_bits_; }
    double duration_seconds() const
    {
        return cap_.records.empty() ? 0.0 : static_cast<double>(last_us_ - first_us_) / 1e6;
    }

private:
    CaptureFile cap_;
    std::uint64_t total_bits_ = 0;
    std::int64_t first_us_ = 0;
    std::int64_t last_us_ = 0;
};

inline std::int64_t epoch(const char* ts)
{
    auto v = parse_ts(ts);
    return v ? *v : 0;
}

inline Bytes ascii(const std::string& s)
{
    return Bytes(s.begin(), s.end());
}

inline void finish(ForgeResult& result, CaptureBuilder& builder)
{
    result.manifest.total_bits = builder.total_bits();
    result.manifest.duration_seconds = builder.duration_seconds();
    result.capture = builder.take();
}

// Letters only: flood payloads must never contain CR LF, or they would read
// as request lines on monitored ports.
inline Bytes random_letters(Rng& rng, std::size_t n)
{
    static const char alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
    Bytes out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(static_cast<std::uint8_t>(alphabet[rng.bounded(52)]));
    return out;
}

} // namespace detail

inline const char* icmp_attack_rule()
{
    return "alert icmp any any -> any any (msg:\"ICMP ATTACK!!\"; sid:1000001;)";
}

//--------------------------------------------------------------------------
// http-unknown-method: full handshake plus one single-segment request per
// (attacker, request); every request carries the non-whitelisted method.
//--------------------------------------------------------------------------

struct HttpUnknownMethodParams {
    IpAddr server_ip;
    std::uint16_t server_port = 80;
    std::vector<IpAddr> attackers;
    int requests_per_attacker = 1;
    std::string method = "XDEBUG";
    std::int64_t start_epoch = 0; // 0 = scenario default
};

inline ForgeResult forge_http_unknown_method(const HttpUnknownMethodParams& p, std::uint64_t seed)
{
    if (p.attackers.empty())
        throw InvalidParams("http-unknown-method needs at least one attacker");
    if (p.requests_per_attacker < 1)
        throw InvalidParams("requests_per_attacker must be >= 1");
    if (p.method.empty())
        throw InvalidParams("method must not be empty");
    if (default_known_methods().contains(p.method))
        throw InvalidParams("method '" + p.method + "' is whitelisted and would not trigger");

    Rng rng(seed);
    std::int64_t start = p.start_epoch ? p.start_epoch : detail::epoch("2019-08-06 23:40:00");
    std::int64_t t = start * 1000000;
    Actor server = actor_for(p.server_ip);

    ForgeResult result;
    auto& m = result.manifest;
    m.scenario = "http-unknown-method";
    m.seed = seed;
    m.start_epoch = start;
    m.actors["server"] = server;
    for (std::size_t i = 0; i < p.attackers.size(); ++i)
        m.actors["attacker" + std::to_string(i + 1)] = actor_for(p.attackers[i]);

    detail::CaptureBuilder cap;
    std::uint16_t ip_id = 1;
    for (std::size_t ai = 0; ai < p.attackers.size(); ++ai) {
        Actor attacker = actor_for(p.attackers[ai]);
        for (int r = 0; r < p.requests_per_attacker; ++r) {
            std::uint16_t sport = rng.ephemeral_port();
            std::uint32_t cseq = rng.seq(), sseq = rng.seq();
            auto send = [&](const Actor& from, const Actor& to, std::uint16_t fp, std::uint16_t tp,
                            std::uint32_t seq, std::uint32_t ack, std::uint8_t flags,
                            ByteView payload) {
                cap.add(t, wire::ip_frame(to.mac, from.mac, from.ip, to.ip, kProtoTcp,
                               wire::tcp(from.ip, to.ip, fp, tp, seq, ack, flags, payload), ip_id++));
                t += 1000;
            };
            std::string request = p.method + " /confluence/login.action HTTP/1.1\r\nHost: " +
                p.server_ip.to_string() + "\r\nUser-Agent: probe\r\n\r\n";
            send(attacker, server, sport, p.server_port, cseq, 0, wire::kTcpSyn, {});
            send(server, attacker, p.server_port, sport, sseq, cseq + 1,
                wire::kTcpSyn | wire::kTcpAck, {});
            send(attacker, server, sport, p.server_port, cseq + 1, sseq + 1, wire::kTcpAck, {});
            send(attacker, server, sport, p.server_port, cseq + 1, sseq + 1,
                wire::kTcpPsh | wire::kTcpAck, detail::ascii(request));
            send(server, attacker, p.server_port, sport, sseq + 1,
                cseq + 1 + static_cast<std::uint32_t>(request.size()), wire::kTcpAck, {});
            t += 195000; // next request
        }
    }

    auto total = static_cast<std::uint64_t>(p.attackers.size()) *
        static_cast<std::uint64_t>(p.requests_per_attacker);
    m.expected_events.push_back({119, 31, total, total});
    if (p.server_port != 80)
        m.required_config.push_back("http_ports = " + std::to_string(p.server_port));
    detail::finish(result, cap);
    return result;
}

//--------------------------------------------------------------------------
// udp-portsweep: one probe per target host inside one detector window;
// the first round(|hosts| * replies) hosts answer right after their probe.
//--------------------------------------------------------------------------

struct UdpPortsweepParams {
    IpAddr source;
    std::vector<IpAddr> hosts;
    std::uint16_t port = 5355;
    double replies = 0.0;
    std::int64_t start_epoch = 0;
    std::int64_t spacing_us = 500000;
};

inline ForgeResult forge_udp_portsweep(const UdpPortsweepParams& p, std::uint64_t seed)
{
    if (p.hosts.empty())
        throw InvalidParams("udp-portsweep needs at least one host");
    if (p.replies < 0.0 || p.replies > 1.0)
        throw InvalidParams("replies fraction must be within [0, 1]");
    if (p.spacing_us <= 0)
        throw InvalidParams("spacing must be positive");
    std::set<IpAddr> distinct(p.hosts.begin(), p.hosts.end());
    if (distinct.size() != p.hosts.size())
        throw InvalidParams("target hosts must be distinct");
    ScanConfig defaults;
    double span = static_cast<double>(p.spacing_us) * static_cast<double>(p.hosts.size()) / 1e6;
    if (span >= defaults.window_seconds || span >= defaults.cooldown_seconds)
        throw InvalidParams("probe span must fit inside one detector window");

    Rng rng(seed);
    std::int64_t start = p.start_epoch ? p.start_epoch : detail::epoch("2019-08-13 13:22:00");
    Actor source = actor_for(p.source);
    auto repliers = static_cast<std::size_t>(
        std::llround(p.replies * static_cast<double>(p.hosts.size())));

    ForgeResult result;
    auto& m = result.manifest;
    m.scenario = "udp-portsweep";
    m.seed = seed;
    m.start_epoch = start;
    m.actors["source"] = source;
    for (std::size_t i = 0; i < p.hosts.size(); ++i)
        m.actors["host" + std::to_string(i + 1)] = actor_for(p.hosts[i]);

    detail::CaptureBuilder cap;
    Bytes probe_payload = detail::ascii("LLMNRPROBE");
    for (std::size_t k = 0; k < p.hosts.size(); ++k) {
        Actor host = actor_for(p.hosts[k]);
        std::uint16_t sport = rng.ephemeral_port();
        std::int64_t t = start * 1000000 + static_cast<std::int64_t>(k) * p.spacing_us;
        cap.add(t, wire::ip_frame(host.mac, source.mac, source.ip, host.ip, kProtoUdp,
                       wire::udp(source.ip, host.ip, sport, p.port, probe_payload)));
        if (k < repliers) {
            cap.add(t + p.spacing_us / 5,
                wire::ip_frame(source.mac, host.mac, host.ip, source.ip, kProtoUdp,
                    wire::udp(host.ip, source.ip, p.port, sport, probe_payload)));
        }
    }

    // By construction: at the k-th probe (1-based), min(repliers, k-1) of the
    // source's k window observations are answered. Each sweep kind can fire at
    // most once inside the cooldown-validated span.
    bool fires_filtered = false, fires_plain = false;
    for (std::size_t k = defaults.sweep_hosts; k <= p.hosts.size(); ++k) {
        std::size_t answered = std::min(repliers, k - 1);
        double unanswered_fraction =
            static_cast<double>(k - answered) / static_cast<double>(k);
        if (unanswered_fraction >= defaults.filtered_ratio)
            fires_filtered = true;
        else
            fires_plain = true;
    }
    m.expected_events.push_back({122, 23, fires_filtered ? 1u : 0u, fires_filtered ? 1u : 0u});
    m.expected_events.push_back({122, 17, fires_plain ? 1u : 0u, fires_plain ? 1u : 0u});
    m.expected_events.push_back({122, 1, 0, 0});
    m.expected_events.push_back({122, 3, 0, 0});
    detail::finish(result, cap);
    return result;
}

//--------------------------------------------------------------------------
// tcp-portscan: one SYN per target port against a single host.
//--------------------------------------------------------------------------

struct TcpPortscanParams {
    IpAddr source;
    IpAddr target;
    std::vector<std::uint16_t> ports;
    std::int64_t start_epoch = 0;
    std::int64_t spacing_us = 100000;
};

inline ForgeResult forge_tcp_portscan(const TcpPortscanParams& p, std::uint64_t seed)
{
    if (p.ports.empty())
        throw InvalidParams("tcp-portscan needs at least one port");
    if (p.spacing_us <= 0)
        throw InvalidParams("spacing must be positive");
    std::set<std::uint16_t> distinct(p.ports.begin(), p.ports.end());
    if (distinct.size() != p.ports.size())
        throw InvalidParams("target ports must be distinct");
    ScanConfig defaults;
    double span = static_cast<double>(p.spacing_us) * static_cast<double>(p.ports.size()) / 1e6;
    if (span >= defaults.window_seconds || span >= defaults.cooldown_seconds)
        throw InvalidParams("probe span must fit inside one detector window");

    Rng rng(seed);
    std::int64_t start = p.start_epoch ? p.start_epoch : detail::epoch("2019-08-13 13:10:00");
    Actor source = actor_for(p.source);
    Actor target = actor_for(p.target);

    ForgeResult result;
    auto& m = result.manifest;
    m.scenario = "tcp-portscan";
    m.seed = seed;
    m.start_epoch = start;
    m.actors["source"] = source;
    m.actors["target"] = target;

    detail::CaptureBuilder cap;
    std::uint16_t ip_id = 1;
    for (std::size_t k = 0; k < p.ports.size(); ++k) {
        std::int64_t t = start * 1000000 + static_cast<std::int64_t>(k) * p.spacing_us;
        cap.add(t, wire::ip_frame(target.mac, source.mac, source.ip, target.ip, kProtoTcp,
                       wire::tcp(source.ip, target.ip, rng.ephemeral_port(), p.ports[k], rng.seq(),
                           0, wire::kTcpSyn, {}),
                       ip_id++));
    }

    bool fires = p.ports.size() >= defaults.scan_ports;
    m.expected_events.push_back({122, 1, fires ? 1u : 0u, fires ? 1u : 0u});
    m.expected_events.push_back({122, 3, 0, 0});
    m.expected_events.push_back({122, 17, 0, 0});
    m.expected_events.push_back({122, 23, 0, 0});
    detail::finish(result, cap);
    return result;
}

//--------------------------------------------------------------------------
// arp-spoof: variant-shaped ARP frames (IPv4/ethernet only).
//--------------------------------------------------------------------------

enum class ArpSpoofVariant { mismatch_src, cache_overwrite, unicast_request };

inline const char* to_string(ArpSpoofVariant v)
{
    switch (v) {
    case ArpSpoofVariant::mismatch_src: return "mismatch-src";
    case ArpSpoofVariant::cache_overwrite: return "cache-overwrite";
    case ArpSpoofVariant::unicast_request: return "unicast-request";
    }
    return "mismatch-src";
}

struct ArpSpoofParams {
    Actor attacker;
    IpAddr victim_ip;
    IpAddr impersonated_ip;
    MacAddr impersonated_true_mac;
    int claim_count = 1;
    ArpSpoofVariant variant = ArpSpoofVariant::mismatch_src;
    std::int64_t start_epoch = 0;
    std::int64_t spacing_us = 1000000;
};

inline ForgeResult forge_arp_spoof(const ArpSpoofParams& p, std::uint64_t seed)
{
    if (p.claim_count < 1)
        throw InvalidParams("claim count must be >= 1");
    if (p.attacker.ip.version != 4 || p.victim_ip.version != 4 || p.impersonated_ip.version != 4)
        throw InvalidParams("arp scenarios are IPv4 only");
    if (p.variant == ArpSpoofVariant::cache_overwrite && p.attacker.mac == p.impersonated_true_mac)
        throw InvalidParams("attacker mac equals the true binding; nothing to overwrite");

    std::int64_t start = p.start_epoch ? p.start_epoch : detail::epoch("2019-08-14 15:45:00");
    MacAddr victim_mac = mac_for(p.victim_ip);
    MacAddr broadcast;
    broadcast.octets.fill(0xff);
    MacAddr zero;

    ForgeResult result;
    auto& m = result.manifest;
    m.scenario = std::string("arp-spoof-") + to_string(p.variant);
    m.seed = seed;
    m.start_epoch = start;
    m.actors["attacker"] = p.attacker;
    m.actors["victim"] = {p.victim_ip, victim_mac};
    m.actors["impersonated"] = {p.impersonated_ip, p.impersonated_true_mac};

    detail::CaptureBuilder cap;
    auto n = static_cast<std::uint64_t>(p.claim_count);
    for (int k = 0; k < p.claim_count; ++k) {
        std::int64_t t = start * 1000000 + static_cast<std::int64_t>(k) * p.spacing_us;
        switch (p.variant) {
        case ArpSpoofVariant::mismatch_src: {
            MacAddr forged = p.attacker.mac;
            forged.octets[5] ^= 0xff; // guaranteed != frame source
            cap.add(t, wire::eth(broadcast, p.attacker.mac, kEtherTypeArp,
                           wire::arp(1, forged, p.attacker.ip, zero, p.victim_ip)));
            break;
        }
        case ArpSpoofVariant::cache_overwrite:
            cap.add(t, wire::eth(victim_mac, p.attacker.mac, kEtherTypeArp,
                           wire::arp(2, p.attacker.mac, p.impersonated_ip, victim_mac, p.victim_ip)));
            break;
        case ArpSpoofVariant::unicast_request:
            cap.add(t, wire::eth(victim_mac, p.attacker.mac, kEtherTypeArp,
                           wire::arp(1, p.attacker.mac, p.attacker.ip, zero, p.victim_ip)));
            break;
        }
    }

    switch (p.variant) {
    case ArpSpoofVariant::mismatch_src:
        m.expected_events.push_back({112, 2, n, n});
        break;
    case ArpSpoofVariant::cache_overwrite:
        m.expected_events.push_back({112, 4, n, n});
        m.required_config.push_back(
            "arp_static = " + p.impersonated_ip.to_string() + "=" + p.impersonated_true_mac.to_string());
        m.notes = "112:4 requires the arp_static binding above; without it the expected count is 0";
        break;
    case ArpSpoofVariant::unicast_request:
        m.expected_events.push_back({112, 1, n, n});
        break;
    }
    detail::finish(result, cap);
    return result;
}

//--------------------------------------------------------------------------
// icmp-flood: uniformly spaced echo requests (v4 or v6 by address family).
//--------------------------------------------------------------------------

struct IcmpFloodParams {
    IpAddr src;
    IpAddr dst;
    double packets_per_second = 100.0;
    double duration_seconds = 10.0;
    std::size_t payload_bytes = 48;
    std::int64_t start_epoch = 0;
};

inline ForgeResult forge_icmp_flood(const IcmpFloodParams& p, std::uint64_t seed)
{
    if (!(p.packets_per_second > 0.0))
        throw InvalidParams("rate must be > 0");
    if (!(p.duration_seconds > 0.0))
        throw InvalidParams("duration must be > 0");
    if (p.src.version != p.dst.version)
        throw InvalidParams("src and dst must share an address family");
    auto n = static_cast<std::uint64_t>(std::llround(p.packets_per_second * p.duration_seconds));
    if (n == 0)
        throw InvalidParams("rate x duration rounds to zero packets");

    std::int64_t start = p.start_epoch ? p.start_epoch : detail::epoch("2019-08-13 13:21:58");
    Actor src = actor_for(p.src);
    Actor dst = actor_for(p.dst);

    ForgeResult result;
    auto& m = result.manifest;
    m.scenario = "icmp-flood";
    m.seed = seed;
    m.start_epoch = start;
    m.actors["src"] = src;
    m.actors["dst"] = dst;

    Bytes payload;
    for (std::size_t i = 0; i < p.payload_bytes; ++i)
        payload.push_back(static_cast<std::uint8_t>('a' + i % 26));

    detail::CaptureBuilder cap;
    double spacing_us = 1e6 / p.packets_per_second;
    std::uint16_t ip_id = 1;
    for (std::uint64_t k = 0; k < n; ++k) {
        std::int64_t t = start * 1000000 +
            static_cast<std::int64_t>(std::llround(static_cast<double>(k) * spacing_us));
        auto icmp_seq = static_cast<std::uint16_t>(k & 0xffff);
        Bytes transport = (p.src.version == 4)
            ? wire::icmp_echo(false, 0x4242, icmp_seq, payload)
            : wire::icmp6_echo(p.src, p.dst, false, 0x4242, icmp_seq, payload);
        cap.add(t, wire::ip_frame(dst.mac, src.mac, p.src, p.dst,
                       p.src.version == 4 ? kProtoIcmp : kProtoIcmpv6, transport, ip_id++));
    }

    m.expected_events.push_back({1, 1000001, n, n});
    m.required_rules.push_back(icmp_attack_rule());
    m.notes = "1:1000001 fires per packet only when the required rule is loaded";
    detail::finish(result, cap);
    return result;
}

//--------------------------------------------------------------------------
// tcp-flood: repeated SYN + data bursts; evidence for rate analysis, no
// alert expected unless a matching rule is loaded.
//--------------------------------------------------------------------------

struct TcpFloodParams {
    std::vector<IpAddr> sources;
    IpAddr target;
    std::uint16_t target_port = 80;
    int connections = 1;
    int bursts_per_connection = 3;
    std::size_t payload_bytes = 1024;
    std::int64_t start_epoch = 0;
    std::int64_t spacing_us = 1000;
};

inline ForgeResult forge_tcp_flood(const TcpFloodParams& p, std::uint64_t seed)
{
    if (p.sources.empty())
        throw InvalidParams("tcp-flood needs at least one source");
    if (p.connections < 1)
        throw InvalidParams("connections must be >= 1");
    if (p.bursts_per_connection < 1)
        throw InvalidParams("bursts_per_connection must be >= 1");
    if (p.spacing_us <= 0)
        throw InvalidParams("spacing must be positive");

    Rng rng(seed);
    std::int64_t start = p.start_epoch ? p.start_epoch : detail::epoch("2019-08-15 09:00:00");
    Actor target = actor_for(p.target);

    ForgeResult result;
    auto& m = result.manifest;
    m.scenario = "tcp-flood";
    m.seed = seed;
    m.start_epoch = start;
    m.actors["target"] = target;
    for (std::size_t i = 0; i < p.sources.size(); ++i)
        m.actors["source" + std::to_string(i + 1)] = actor_for(p.sources[i]);

    detail::CaptureBuilder cap;
    std::int64_t t = start * 1000000;
    std::uint16_t ip_id = 1;
    for (int c = 0; c < p.connections; ++c) {
        Actor src = actor_for(p.sources[static_cast<std::size_t>(c) % p.sources.size()]);
        std::uint16_t sport = rng.ephemeral_port();
        std::uint32_t seq = rng.seq();
        cap.add(t, wire::ip_frame(target.mac, src.mac, src.ip, p.target, kProtoTcp,
                       wire::tcp(src.ip, p.target, sport, p.target_port, seq, 0, wire::kTcpSyn, {}),
                       ip_id++));
        t += p.spacing_us;
        for (int b = 0; b < p.bursts_per_connection; ++b) {
            Bytes payload = detail::random_letters(rng, p.payload_bytes);
            cap.add(t, wire::ip_frame(target.mac, src.mac, src.ip, p.target, kProtoTcp,
                           wire::tcp(src.ip, p.target, sport, p.target_port, seq + 1, 1,
                               wire::kTcpPsh | wire::kTcpAck, payload),
                           ip_id++));
            seq += static_cast<std::uint32_t>(p.payload_bytes);
            t += p.spacing_us;
        }
    }

    m.notes = "volume evidence only; no detector is expected to fire";
    detail::finish(result, cap);
    return result;
}

//--------------------------------------------------------------------------
// baseline: well-formed GET/200 exchanges that must produce zero alerts.
//--------------------------------------------------------------------------

struct BaselineParams {
    std::vector<IpAddr> clients;
    IpAddr server_ip;
    std::uint16_t server_port = 80;
    int requests = 1;
    std::int64_t start_epoch = 0;
    std::int64_t request_spacing_us = 300000;
};

inline ForgeResult forge_baseline(const BaselineParams& p, std::uint64_t seed)
{
    if (p.clients.empty())
        throw InvalidParams("baseline needs at least one client");
    if (p.requests < 1)
        throw InvalidParams("requests must be >= 1");

    Rng rng(seed);
    std::int64_t start = p.start_epoch ? p.start_epoch : detail::epoch("2019-08-05 08:00:00");
    Actor server = actor_for(p.server_ip);

    ForgeResult result;
    auto& m = result.manifest;
    m.scenario = "baseline";
    m.seed = seed;
    m.start_epoch = start;
    m.actors["server"] = server;
    for (std::size_t i = 0; i < p.clients.size(); ++i)
        m.actors["client" + std::to_string(i + 1)] = actor_for(p.clients[i]);

    const std::string response = "HTTP/1.1 200 OK\r\nContent-Type: text/html\r\n"
                                 "Content-Length: 13\r\n\r\nHello, world!";
    detail::CaptureBuilder cap;
    std::int64_t t = start * 1000000;
    std::uint16_t ip_id = 1;
    for (int r = 0; r < p.requests; ++r) {
        Actor client = actor_for(p.clients[static_cast<std::size_t>(r) % p.clients.size()]);
        std::uint16_t sport = rng.ephemeral_port();
        std::uint32_t cseq = rng.seq(), sseq = rng.seq();
        auto send = [&](const Actor& from, const Actor& to, std::uint16_t fp, std::uint16_t tp,
                        std::uint32_t seq, std::uint32_t ack, std::uint8_t flags, ByteView payload) {
            cap.add(t, wire::ip_frame(to.mac, from.mac, from.ip, to.ip, kProtoTcp,
                           wire::tcp(from.ip, to.ip, fp, tp, seq, ack, flags, payload), ip_id++));
            t += 1000;
        };
        std::string request = "GET /index.html HTTP/1.1\r\nHost: " + p.server_ip.to_string() +
            "\r\nUser-Agent: browser\r\n\r\n";
        send(client, server, sport, p.server_port, cseq, 0, wire::kTcpSyn, {});
        send(server, client, p.server_port, sport, sseq, cseq + 1, wire::kTcpSyn | wire::kTcpAck, {});
        send(client, server, sport, p.server_port, cseq + 1, sseq + 1, wire::kTcpAck, {});
        send(client, server, sport, p.server_port, cseq + 1, sseq + 1,
            wire::kTcpPsh | wire::kTcpAck, detail::ascii(request));
        send(server, client, p.server_port, sport, sseq + 1,
            cseq + 1 + static_cast<std::uint32_t>(request.size()),
            wire::kTcpPsh | wire::kTcpAck, detail::ascii(response));
        send(client, server, sport, p.server_port,
            cseq + 1 + static_cast<std::uint32_t>(request.size()),
            sseq + 1 + static_cast<std::uint32_t>(response.size()), wire::kTcpAck, {});
        t += p.request_spacing_us - 6000;
    }

    m.notes = "must generate zero alerts of every kind";
    detail::finish(result, cap);
    return result;
}

} // namespace netsentry::forge
