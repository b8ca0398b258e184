#pragma once

// Shared helpers for the test suites: temp dirs, deterministic generators for
// property tests, the forged corpus, and a naive rule-match oracle.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "netsentry/alert.hpp"
#include "netsentry/decode.hpp"
#include "netsentry/forge.hpp"
#include "netsentry/rules.hpp"
#include "netsentry/wire.hpp"

namespace testsup {

using namespace netsentry;

inline std::filesystem::path make_temp_dir(const std::string& tag)
{
    auto dir = std::filesystem::temp_directory_path() /
        ("netsentry-test-" + tag + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << text;
}

inline std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    return std::vector<std::uint8_t>(
        (std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline IpAddr ip(const char* text)
{
    auto a = IpAddr::parse(text);
    if (!a)
        throw std::runtime_error(std::string("bad test ip ") + text);
    return *a;
}

inline MacAddr mac(const char* text)
{
    auto m = MacAddr::parse(text);
    if (!m)
        throw std::runtime_error(std::string("bad test mac ") + text);
    return *m;
}

inline std::int64_t ts(const char* text)
{
    auto v = parse_ts(text);
    if (!v)
        throw std::runtime_error(std::string("bad test timestamp ") + text);
    return *v;
}

// ---------------------------------------------------------------------------
// packet construction shortcuts

inline DecodedPacket decode_frame(const Bytes& frame, std::int64_t ts_sec = 0,
    std::int32_t ts_usec = 0)
{
    return decode_packet(frame, ts_sec, ts_usec, static_cast<std::uint32_t>(frame.size()), {80});
}

inline DecodedPacket udp_packet(const IpAddr& src, const IpAddr& dst, std::uint16_t sport,
    std::uint16_t dport, std::int64_t ts_sec = 0, const std::string& payload = "x")
{
    Bytes frame = wire::ip_frame(forge::mac_for(dst), forge::mac_for(src), src, dst, kProtoUdp,
        wire::udp(src, dst, sport, dport, Bytes(payload.begin(), payload.end())));
    return decode_frame(frame, ts_sec);
}

inline DecodedPacket tcp_packet(const IpAddr& src, const IpAddr& dst, std::uint16_t sport,
    std::uint16_t dport, std::uint8_t flags = wire::kTcpSyn, const std::string& payload = "",
    std::int64_t ts_sec = 0)
{
    Bytes frame = wire::ip_frame(forge::mac_for(dst), forge::mac_for(src), src, dst, kProtoTcp,
        wire::tcp(src, dst, sport, dport, 1000, 0, flags, Bytes(payload.begin(), payload.end())));
    return decode_frame(frame, ts_sec);
}

inline DecodedPacket icmp_packet(const IpAddr& src, const IpAddr& dst, bool reply = false,
    std::int64_t ts_sec = 0)
{
    Bytes transport = (src.version == 4) ? wire::icmp_echo(reply, 7, 1, {})
                                         : wire::icmp6_echo(src, dst, reply, 7, 1, {});
    Bytes frame = wire::ip_frame(forge::mac_for(dst), forge::mac_for(src), src, dst,
        src.version == 4 ? kProtoIcmp : kProtoIcmpv6, transport);
    return decode_frame(frame, ts_sec);
}

// ---------------------------------------------------------------------------
// the forged corpus: one instance of every scenario, used by decoder
// differentials and truncation fuzzing

inline std::vector<forge::ForgeResult> forged_corpus(std::uint64_t seed = 7)
{
    std::vector<forge::ForgeResult> out;
    {
        forge::HttpUnknownMethodParams p;
        p.server_ip = ip("10.0.5.188");
        p.attackers = {ip("148.229.33.150"), ip("63.17.125.15")};
        p.requests_per_attacker = 3;
        out.push_back(forge::forge_http_unknown_method(p, seed));
    }
    {
        forge::UdpPortsweepParams p;
        p.source = ip("fe80::519a:af2d:d0a5:e03b");
        p.hosts = {ip("2001:db8::11"), ip("2001:db8::12"), ip("2001:db8::13"), ip("2001:db8::14"),
            ip("ff02::1:3"), ip("2001:db8::16")};
        out.push_back(forge::forge_udp_portsweep(p, seed));
    }
    {
        forge::TcpPortscanParams p;
        p.source = ip("192.0.2.66");
        p.target = ip("192.168.88.48");
        p.ports = {21, 22, 23, 25, 80, 110, 143, 443, 8080, 8443};
        out.push_back(forge::forge_tcp_portscan(p, seed));
    }
    {
        forge::ArpSpoofParams p;
        p.attacker = {ip("192.168.88.66"), mac("02:00:de:ad:be:ef")};
        p.victim_ip = ip("192.168.88.57");
        p.impersonated_ip = ip("192.168.88.1");
        p.impersonated_true_mac = mac("02:00:00:00:88:01");
        p.claim_count = 5;
        p.variant = forge::ArpSpoofVariant::mismatch_src;
        out.push_back(forge::forge_arp_spoof(p, seed));
        p.variant = forge::ArpSpoofVariant::cache_overwrite;
        out.push_back(forge::forge_arp_spoof(p, seed));
        p.variant = forge::ArpSpoofVariant::unicast_request;
        out.push_back(forge::forge_arp_spoof(p, seed));
    }
    {
        forge::IcmpFloodParams p;
        p.src = ip("192.168.88.46");
        p.dst = ip("192.168.88.57");
        p.packets_per_second = 50;
        p.duration_seconds = 2;
        out.push_back(forge::forge_icmp_flood(p, seed));
    }
    {
        forge::TcpFloodParams p;
        p.sources = {ip("192.0.2.10"), ip("192.0.2.11")};
        p.target = ip("192.168.88.48");
        p.connections = 8;
        out.push_back(forge::forge_tcp_flood(p, seed));
    }
    {
        forge::BaselineParams p;
        p.clients = {ip("192.168.88.20"), ip("192.168.88.21"), ip("192.168.88.22"),
            ip("192.168.88.23"), ip("192.168.88.24"), ip("192.168.88.25")};
        p.server_ip = ip("192.168.88.48");
        p.requests = 30;
        out.push_back(forge::forge_baseline(p, seed));
    }
    return out;
}

// ---------------------------------------------------------------------------
// random generators for property tests

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    forge::Rng& rng() { return rng_; }

    std::uint64_t u64() { return rng_.next(); }
    std::uint32_t below(std::uint32_t n) { return rng_.bounded(n); }
    bool chance(std::uint32_t percent) { return below(100) < percent; }

    IpAddr ip4_pool()
    {
        static const char* pool[] = {"10.0.0.1", "10.0.0.2", "10.0.5.188", "192.168.88.46",
            "192.168.88.48", "192.168.88.57", "192.0.2.7", "203.0.113.9"};
        return ip(pool[below(8)]);
    }

    IpAddr ip6_pool()
    {
        static const char* pool[] = {"2001:db8::1", "2001:db8::2", "fe80::519a:af2d:d0a5:e03b",
            "ff02::1:3", "ff02::16"};
        return ip(pool[below(5)]);
    }

    IpAddr any_ip() { return chance(70) ? ip4_pool() : ip6_pool(); }

    IpAddr random_ip()
    {
        IpAddr a;
        if (chance(60)) {
            a.version = 4;
            for (int i = 0; i < 4; ++i)
                a.bytes[i] = static_cast<std::uint8_t>(below(256));
        } else {
            a.version = 6;
            for (int i = 0; i < 16; ++i)
                a.bytes[i] = static_cast<std::uint8_t>(below(256));
        }
        return a;
    }

    std::uint16_t port_pool()
    {
        static const std::uint16_t pool[] = {80, 443, 22, 5792, 5355, 1024, 40000};
        return pool[below(7)];
    }

    std::string token(std::size_t min_len, std::size_t max_len)
    {
        static const char alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
        std::size_t len = min_len + below(static_cast<std::uint32_t>(max_len - min_len + 1));
        std::string out;
        for (std::size_t i = 0; i < len; ++i)
            out += alphabet[below(62)];
        return out;
    }

    Bytes bytes(std::size_t min_len, std::size_t max_len)
    {
        std::size_t len = min_len + below(static_cast<std::uint32_t>(max_len - min_len + 1));
        Bytes out;
        for (std::size_t i = 0; i < len; ++i)
            out.push_back(static_cast<std::uint8_t>(below(256)));
        return out;
    }

    // --- rules -------------------------------------------------------------

    AddressSpec address_spec(const Variables& vars)
    {
        AddressSpec spec;
        switch (below(5)) {
        case 0:
        case 1:
            spec.kind = AddressSpec::Kind::any;
            break;
        case 2: {
            spec.kind = AddressSpec::Kind::single;
            IpAddr a = chance(80) ? ip4_pool() : ip6_pool();
            spec.net = {a, a.version == 4 ? 32 : 128};
            break;
        }
        case 3: {
            spec.kind = AddressSpec::Kind::cidr;
            IpAddr a = chance(80) ? ip4_pool() : ip6_pool();
            int max_p = a.version == 4 ? 32 : 128;
            spec.net = {a, static_cast<int>(below(static_cast<std::uint32_t>(max_p + 1)))};
            break;
        }
        default: {
            spec.kind = AddressSpec::Kind::variable;
            bool home = chance(50);
            spec.var_name = home ? "HOME_NET" : "EXTERNAL_NET";
            const auto& def = vars.defs.at(spec.var_name);
            spec.resolved = def.nets;
            spec.negated = def.negated;
            break;
        }
        }
        return spec;
    }

    PortSpec port_spec()
    {
        PortSpec spec;
        switch (below(3)) {
        case 0:
            spec.kind = PortSpec::Kind::any;
            break;
        case 1:
            spec.kind = PortSpec::Kind::single;
            spec.lo = spec.hi = port_pool();
            break;
        default: {
            spec.kind = PortSpec::Kind::range;
            std::uint16_t a = port_pool(), b = port_pool();
            spec.lo = std::min(a, b);
            spec.hi = std::max(a, b);
            break;
        }
        }
        return spec;
    }

    Rule random_rule(const Variables& vars)
    {
        Rule rule;
        switch (below(4)) {
        case 0: rule.header.protocol = RuleProto::tcp; break;
        case 1: rule.header.protocol = RuleProto::udp; break;
        case 2: rule.header.protocol = RuleProto::icmp; break;
        default: rule.header.protocol = RuleProto::ip; break;
        }
        rule.header.src = address_spec(vars);
        rule.header.src_port = port_spec();
        rule.header.bidirectional = chance(30);
        rule.header.dst = address_spec(vars);
        rule.header.dst_port = port_spec();
        rule.options.sid = 1 + below(100000);
        rule.options.gid = chance(80) ? 1 : 1 + below(200);
        rule.options.rev = 1 + below(5);
        if (chance(80))
            rule.options.msg = token(1, 24);
        if (chance(40))
            rule.options.classtype = token(3, 16);
        if (chance(40))
            rule.options.priority = below(11);
        std::uint32_t n_contents = below(3);
        for (std::uint32_t i = 0; i < n_contents; ++i) {
            ContentPattern pat;
            if (chance(70)) {
                auto text = chance(50) ? std::string("probe") : token(1, 6);
                pat.pattern.assign(text.begin(), text.end());
            } else {
                pat.pattern = bytes(1, 6);
            }
            pat.nocase = chance(40);
            rule.options.contents.push_back(std::move(pat));
        }
        return rule;
    }

    // Random decoded packet drawn from the same pools as the rules so matches
    // actually happen.
    DecodedPacket random_packet()
    {
        bool v6 = chance(25);
        IpAddr src = v6 ? ip6_pool() : ip4_pool();
        IpAddr dst = v6 ? ip6_pool() : ip4_pool();
        std::string payload;
        if (chance(60)) {
            payload = chance(50) ? "probe" : token(0, 12);
            if (chance(30))
                payload = "PROBE" + payload;
        }
        switch (below(4)) {
        case 0:
            return tcp_packet(src, dst, port_pool(), port_pool(),
                static_cast<std::uint8_t>(wire::kTcpAck), payload);
        case 1:
            return udp_packet(src, dst, port_pool(), port_pool(), 0,
                payload.empty() ? "x" : payload);
        case 2:
            return icmp_packet(src, dst, chance(50));
        default: {
            // unknown transport protocol
            Bytes inner(payload.begin(), payload.end());
            Bytes frame = wire::ip_frame(forge::mac_for(dst), forge::mac_for(src), src, dst, 200,
                inner);
            return decode_frame(frame);
        }
        }
    }

    AlertRecord random_alert()
    {
        AlertRecord a;
        a.ts_sec = 1500000000 + below(200000000);
        a.priority = below(10);
        switch (below(6)) {
        case 0: a.protocol = AlertProtocol::tcp; break;
        case 1: a.protocol = AlertProtocol::udp; break;
        case 2: a.protocol = AlertProtocol::icmp; break;
        case 3: a.protocol = AlertProtocol::arp; break;
        case 4: a.protocol = AlertProtocol::ip; break;
        default: a.protocol = AlertProtocol::other; break;
        }
        a.classification = chance(80) ? token(3, 20) : "";
        if (chance(75))
            a.src_ip = random_ip();
        if (chance(60))
            a.src_port = static_cast<std::uint16_t>(below(65536));
        if (chance(75))
            a.dst_ip = random_ip();
        if (chance(60))
            a.dst_port = static_cast<std::uint16_t>(below(65536));
        a.gid = below(200);
        a.sid = below(2000000);
        a.message = chance(85) ? token(1, 30) : "";
        return a;
    }

private:
    forge::Rng rng_;
};

// Test-scope variables: HOME_NET plus its negation.
inline Variables test_variables()
{
    Variables vars;
    auto net1 = Cidr::parse("192.168.88.0/24");
    auto net2 = Cidr::parse("10.0.0.0/8");
    vars.defs["HOME_NET"] = {{*net1, *net2}, false};
    vars.defs["EXTERNAL_NET"] = {{*net1, *net2}, true};
    return vars;
}

// ---------------------------------------------------------------------------
// naive rule-match oracle: re-derives every clause with flat loops and its
// own containment arithmetic; no calls into the matcher under test.

inline bool naive_cidr_contains(const Cidr& net, const IpAddr& addr)
{
    if (net.base.version != addr.version)
        return false;
    for (int bit = 0; bit < net.prefix_len; ++bit) {
        int byte = bit / 8;
        int shift = 7 - bit % 8;
        if (((net.base.bytes[byte] >> shift) & 1) != ((addr.bytes[byte] >> shift) & 1))
            return false;
    }
    return true;
}

inline bool naive_addr_match(const AddressSpec& spec, const IpAddr& addr)
{
    if (spec.kind == AddressSpec::Kind::any)
        return true;
    if (spec.kind == AddressSpec::Kind::single || spec.kind == AddressSpec::Kind::cidr)
        return naive_cidr_contains(spec.net, addr);
    bool in = false;
    for (const auto& net : spec.resolved)
        in = in || naive_cidr_contains(net, addr);
    if (spec.negated)
        return !in;
    return in;
}

inline bool naive_port_match(const PortSpec& spec, std::optional<std::uint16_t> port)
{
    if (spec.kind == PortSpec::Kind::any)
        return true;
    if (!port.has_value())
        return false;
    return spec.lo <= *port && *port <= spec.hi;
}

inline bool naive_content_hit(const Bytes& payload, const ContentPattern& pat)
{
    if (pat.pattern.empty())
        return true;
    if (payload.size() < pat.pattern.size())
        return false;
    auto fold = [](std::uint8_t c) {
        return (c >= 'a' && c <= 'z') ? static_cast<std::uint8_t>(c - 32) : c;
    };
    for (std::size_t start = 0; start + pat.pattern.size() <= payload.size(); ++start) {
        std::size_t j = 0;
        while (j < pat.pattern.size()) {
            std::uint8_t a = payload[start + j];
            std::uint8_t b = pat.pattern[j];
            if (pat.nocase ? fold(a) != fold(b) : a != b)
                break;
            ++j;
        }
        if (j == pat.pattern.size())
            return true;
    }
    return false;
}

inline bool naive_match(const Rule& rule, const DecodedPacket& pkt)
{
    if (!pkt.ip || !pkt.transport)
        return false;
    bool proto_ok = false;
    switch (rule.header.protocol) {
    case RuleProto::tcp:
        proto_ok = pkt.transport->kind == TransportKind::tcp;
        break;
    case RuleProto::udp:
        proto_ok = pkt.transport->kind == TransportKind::udp;
        break;
    case RuleProto::icmp:
        proto_ok = pkt.transport->kind == TransportKind::icmp ||
            pkt.transport->kind == TransportKind::icmpv6;
        break;
    case RuleProto::ip:
        proto_ok = true;
        break;
    }
    if (!proto_ok)
        return false;

    bool forward = naive_addr_match(rule.header.src, pkt.ip->src_ip) &&
        naive_port_match(rule.header.src_port, pkt.transport->src_port) &&
        naive_addr_match(rule.header.dst, pkt.ip->dst_ip) &&
        naive_port_match(rule.header.dst_port, pkt.transport->dst_port);
    bool backward = rule.header.bidirectional &&
        naive_addr_match(rule.header.src, pkt.ip->dst_ip) &&
        naive_port_match(rule.header.src_port, pkt.transport->dst_port) &&
        naive_addr_match(rule.header.dst, pkt.ip->src_ip) &&
        naive_port_match(rule.header.dst_port, pkt.transport->src_port);
    if (!forward && !backward)
        return false;

    for (const auto& pat : rule.options.contents)
        if (!naive_content_hit(pkt.transport->payload, pat))
            return false;
    return true;
}

} // namespace testsup
