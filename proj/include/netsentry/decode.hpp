#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>

#include "netsentry/addr.hpp"
#include "netsentry/bytes.hpp"

namespace netsentry {

struct DecodeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TruncatedFrame : DecodeError {
    explicit TruncatedFrame(const std::string& what) : DecodeError("truncated frame: " + what) {}
};

struct UnsupportedArp : DecodeError {
    explicit UnsupportedArp(const std::string& what) : DecodeError("unsupported arp: " + what) {}
};

struct BadHeaderLength : DecodeError {
    explicit BadHeaderLength(const std::string& what) : DecodeError("bad header length: " + what) {}
};

constexpr std::uint16_t kEtherTypeIpv4 = 0x0800;
constexpr std::uint16_t kEtherTypeArp = 0x0806;
constexpr std::uint16_t kEtherTypeVlan = 0x8100;
constexpr std::uint16_t kEtherTypeIpv6 = 0x86dd;

struct EthernetFrame {
    MacAddr dst_mac;
    MacAddr src_mac;
    std::uint16_t ethertype = 0;
    std::optional<std::uint16_t> vlan_tci; // set when one 802.1Q tag was skipped
    Bytes payload;

    bool operator==(const EthernetFrame&) const = default;
};

struct ArpPacket {
    enum class Op : std::uint16_t { request = 1, reply = 2 };

    Op operation = Op::request;
    MacAddr sender_mac;
    IpAddr sender_ip;
    MacAddr target_mac;
    IpAddr target_ip;

    bool operator==(const ArpPacket&) const = default;
};

struct IpDatagram {
    int version = 4;
    IpAddr src_ip;
    IpAddr dst_ip;
    std::uint8_t protocol = 0;
    std::uint8_t hop_limit = 0;
    Bytes raw_header; // v4: IHL bytes; v6: fixed header + skipped extension headers
    Bytes payload;

    bool operator==(const IpDatagram&) const = default;
};

enum class TransportKind { tcp, udp, icmp, icmpv6, other };

struct TransportHeader {
    TransportKind kind = TransportKind::other;
    std::optional<std::uint16_t> src_port;
    std::optional<std::uint16_t> dst_port;
    std::optional<std::uint8_t> tcp_flags;
    std::optional<std::uint8_t> icmp_type;
    std::optional<std::uint8_t> icmp_code;
    Bytes raw_header;
    Bytes payload;

    bool operator==(const TransportHeader&) const = default;
};

struct HttpRequestLine {
    std::string method;
    std::string uri;
    std::string version;

    bool operator==(const HttpRequestLine&) const = default;
};

struct DecodedPacket {
    std::int64_t ts_sec = 0;
    std::int32_t ts_usec = 0;
    std::uint64_t raw_length_bits = 0;
    EthernetFrame frame;
    std::optional<ArpPacket> arp;
    std::optional<IpDatagram> ip;
    std::optional<TransportHeader> transport;
    std::optional<HttpRequestLine> http;

    std::int64_t ts_us() const { return ts_sec * 1000000 + ts_usec; }

    bool operator==(const DecodedPacket&) const = default;
};

inline EthernetFrame decode_ethernet(ByteView bytes)
{
    if (bytes.size() < 14)
        throw TruncatedFrame("ethernet header needs 14 bytes, have " + std::to_string(bytes.size()));
    EthernetFrame f;
    for (int i = 0; i < 6; ++i) {
        f.dst_mac.octets[i] = bytes[i];
        f.src_mac.octets[i] = bytes[6 + i];
    }
    f.ethertype = read_be16(bytes, 12);
    std::size_t off = 14;
    if (f.ethertype == kEtherTypeVlan) {
        if (bytes.size() < 18)
            throw TruncatedFrame("802.1Q tag needs 4 more bytes");
        f.vlan_tci = read_be16(bytes, 14);
        f.ethertype = read_be16(bytes, 16);
        off = 18;
    }
    f.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(off), bytes.end());
    return f;
}

inline Bytes encode_ethernet(const EthernetFrame& f)
{
    Bytes out;
    out.reserve(18 + f.payload.size());
    for (int i = 0; i < 6; ++i)
        out.push_back(f.dst_mac.octets[i]);
    for (int i = 0; i < 6; ++i)
        out.push_back(f.src_mac.octets[i]);
    if (f.vlan_tci) {
        put_be16(out, kEtherTypeVlan);
        put_be16(out, *f.vlan_tci);
    }
    put_be16(out, f.ethertype);
    append(out, f.payload);
    return out;
}

inline ArpPacket decode_arp(const EthernetFrame& frame)
{
    const Bytes& p = frame.payload;
    if (p.size() < 28)
        throw TruncatedFrame("arp needs 28 bytes, have " + std::to_string(p.size()));
    std::uint16_t htype = read_be16(p, 0);
    std::uint16_t ptype = read_be16(p, 2);
    std::uint8_t hlen = p[4];
    std::uint8_t plen = p[5];
    if (htype != 1 || ptype != kEtherTypeIpv4 || hlen != 6 || plen != 4)
        throw UnsupportedArp("only ethernet/ipv4 arp (6/4) is handled");
    std::uint16_t oper = read_be16(p, 6);
    if (oper != 1 && oper != 2)
        throw UnsupportedArp("operation " + std::to_string(oper));
    ArpPacket a;
    a.operation = static_cast<ArpPacket::Op>(oper);
    for (int i = 0; i < 6; ++i) {
        a.sender_mac.octets[i] = p[8 + i];
        a.target_mac.octets[i] = p[18 + i];
    }
    a.sender_ip = IpAddr::v4(p, 14);
    a.target_ip = IpAddr::v4(p, 24);
    return a;
}

inline Bytes encode_arp(const ArpPacket& a)
{
    Bytes out;
    out.reserve(28);
    put_be16(out, 1);
    put_be16(out, kEtherTypeIpv4);
    out.push_back(6);
    out.push_back(4);
    put_be16(out, static_cast<std::uint16_t>(a.operation));
    for (int i = 0; i < 6; ++i)
        out.push_back(a.sender_mac.octets[i]);
    for (int i = 0; i < 4; ++i)
        out.push_back(a.sender_ip.bytes[i]);
    for (int i = 0; i < 6; ++i)
        out.push_back(a.target_mac.octets[i]);
    for (int i = 0; i < 4; ++i)
        out.push_back(a.target_ip.bytes[i]);
    return out;
}

namespace detail {

inline bool is_v6_extension(std::uint8_t next)
{
    return next == 0 /*hop-by-hop*/ || next == 43 /*routing*/ || next == 44 /*fragment*/ ||
           next == 60 /*dest options*/;
}

} // namespace detail

inline IpDatagram decode_ip(const EthernetFrame& frame)
{
    const Bytes& p = frame.payload;
    IpDatagram d;
    if (frame.ethertype == kEtherTypeIpv4) {
        if (p.size() < 20)
            throw TruncatedFrame("ipv4 header needs 20 bytes, have " + std::to_string(p.size()));
        std::uint8_t ihl = p[0] & 0x0f;
        if ((p[0] >> 4) != 4)
            throw BadHeaderLength("ipv4 version field is " + std::to_string(p[0] >> 4));
        if (ihl < 5)
            throw BadHeaderLength("ipv4 ihl " + std::to_string(ihl));
        std::size_t hdr_len = static_cast<std::size_t>(ihl) * 4;
        std::size_t total_len = read_be16(p, 2);
        if (hdr_len > p.size())
            throw TruncatedFrame("ipv4 options run past capture");
        if (total_len < hdr_len || total_len > p.size())
            throw TruncatedFrame("ipv4 total length " + std::to_string(total_len));
        d.version = 4;
        d.protocol = p[9];
        d.hop_limit = p[8];
        d.src_ip = IpAddr::v4(p, 12);
        d.dst_ip = IpAddr::v4(p, 16);
        d.raw_header.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(hdr_len));
        d.payload.assign(p.begin() + static_cast<std::ptrdiff_t>(hdr_len),
            p.begin() + static_cast<std::ptrdiff_t>(total_len));
        return d;
    }
    if (frame.ethertype == kEtherTypeIpv6) {
        if (p.size() < 40)
            throw TruncatedFrame("ipv6 header needs 40 bytes, have " + std::to_string(p.size()));
        if ((p[0] >> 4) != 6)
            throw BadHeaderLength("ipv6 version field is " + std::to_string(p[0] >> 4));
        std::size_t payload_len = read_be16(p, 4);
        if (40 + payload_len > p.size())
            throw TruncatedFrame("ipv6 payload length " + std::to_string(payload_len));
        d.version = 6;
        d.hop_limit = p[7];
        d.src_ip = IpAddr::v6(p, 8);
        d.dst_ip = IpAddr::v6(p, 24);
        std::uint8_t next = p[6];
        std::size_t off = 40;
        std::size_t end = 40 + payload_len;
        while (detail::is_v6_extension(next)) {
            if (off + 8 > end)
                throw TruncatedFrame("ipv6 extension header past payload");
            std::uint8_t hdr_next = p[off];
            std::size_t ext_len = (next == 44) ? 8 : (static_cast<std::size_t>(p[off + 1]) + 1) * 8;
            if (off + ext_len > end)
                throw TruncatedFrame("ipv6 extension header length");
            next = hdr_next;
            off += ext_len;
        }
        d.protocol = next;
        d.raw_header.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(off));
        d.payload.assign(p.begin() + static_cast<std::ptrdiff_t>(off),
            p.begin() + static_cast<std::ptrdiff_t>(end));
        return d;
    }
    throw DecodeError("not an ip ethertype: " + std::to_string(frame.ethertype));
}

inline Bytes encode_ip(const IpDatagram& d)
{
    Bytes out = d.raw_header;
    append(out, d.payload);
    return out;
}

constexpr std::uint8_t kProtoIcmp = 1;
constexpr std::uint8_t kProtoTcp = 6;
constexpr std::uint8_t kProtoUdp = 17;
constexpr std::uint8_t kProtoIcmpv6 = 58;

inline TransportHeader decode_transport(const IpDatagram& ip)
{
    const Bytes& p = ip.payload;
    TransportHeader t;
    switch (ip.protocol) {
    case kProtoTcp: {
        if (p.size() < 20)
            throw TruncatedFrame("tcp header needs 20 bytes, have " + std::to_string(p.size()));
        std::size_t data_off = static_cast<std::size_t>(p[12] >> 4) * 4;
        if (data_off < 20 || data_off > p.size())
            throw TruncatedFrame("tcp data offset " + std::to_string(data_off));
        t.kind = TransportKind::tcp;
        t.src_port = read_be16(p, 0);
        t.dst_port = read_be16(p, 2);
        t.tcp_flags = p[13];
        t.raw_header.assign(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(data_off));
        t.payload.assign(p.begin() + static_cast<std::ptrdiff_t>(data_off), p.end());
        return t;
    }
    case kProtoUdp: {
        if (p.size() < 8)
            throw TruncatedFrame("udp header needs 8 bytes, have " + std::to_string(p.size()));
        t.kind = TransportKind::udp;
        t.src_port = read_be16(p, 0);
        t.dst_port = read_be16(p, 2);
        t.raw_header.assign(p.begin(), p.begin() + 8);
        t.payload.assign(p.begin() + 8, p.end());
        return t;
    }
    case kProtoIcmp:
    case kProtoIcmpv6: {
        if (p.size() < 4)
            throw TruncatedFrame("icmp header needs 4 bytes, have " + std::to_string(p.size()));
        t.kind = (ip.protocol == kProtoIcmp) ? TransportKind::icmp : TransportKind::icmpv6;
        t.icmp_type = p[0];
        t.icmp_code = p[1];
        t.raw_header.assign(p.begin(), p.begin() + 4);
        t.payload.assign(p.begin() + 4, p.end());
        return t;
    }
    default:
        t.kind = TransportKind::other;
        t.payload = p;
        return t;
    }
}

inline Bytes encode_transport(const TransportHeader& t)
{
    Bytes out = t.raw_header;
    append(out, t.payload);
    return out;
}

// First request line of a TCP segment destined to a monitored port. Absence
// is a value: wrong port, empty payload, no CRLF in the first 8192 bytes, or
// a malformed line all yield nullopt.
inline std::optional<HttpRequestLine> parse_http_request_line(
    const TransportHeader& t, const std::set<std::uint16_t>& monitored_ports)
{
    if (t.kind != TransportKind::tcp || !t.dst_port || !monitored_ports.contains(*t.dst_port))
        return std::nullopt;
    if (t.payload.empty())
        return std::nullopt;
    std::size_t limit = t.payload.size() < 8192 ? t.payload.size() : 8192;
    std::size_t eol = limit;
    for (std::size_t i = 0; i + 1 < limit; ++i) {
        if (t.payload[i] == '\r' && t.payload[i + 1] == '\n') {
            eol = i;
            break;
        }
    }
    if (eol == limit)
        return std::nullopt;
    std::string line(t.payload.begin(), t.payload.begin() + static_cast<std::ptrdiff_t>(eol));
    auto sp1 = line.find(' ');
    if (sp1 == std::string::npos)
        return std::nullopt;
    auto sp2 = line.find(' ', sp1 + 1);
    if (sp2 == std::string::npos || line.find(' ', sp2 + 1) != std::string::npos)
        return std::nullopt;
    HttpRequestLine r;
    r.method = line.substr(0, sp1);
    r.uri = line.substr(sp1 + 1, sp2 - sp1 - 1);
    r.version = line.substr(sp2 + 1);
    if (r.method.empty() || r.uri.empty() || r.version.empty())
        return std::nullopt;
    static const std::string separators = "()<>@,;:\\\"/[]?={} \t";
    for (char c : r.method) {
        if (c <= 0x20 || c >= 0x7f || separators.find(c) != std::string::npos)
            return std::nullopt;
    }
    return r;
}

// Full per-packet decode used by the pipeline. Throws DecodeError subtypes.
inline DecodedPacket decode_packet(ByteView bytes, std::int64_t ts_sec, std::int32_t ts_usec,
    std::uint32_t orig_len, const std::set<std::uint16_t>& monitored_ports)
{
    DecodedPacket pkt;
    pkt.ts_sec = ts_sec;
    pkt.ts_usec = ts_usec;
    pkt.raw_length_bits = static_cast<std::uint64_t>(orig_len) * 8;
    pkt.frame = decode_ethernet(bytes);
    if (pkt.frame.ethertype == kEtherTypeArp) {
        pkt.arp = decode_arp(pkt.frame);
    } else if (pkt.frame.ethertype == kEtherTypeIpv4 || pkt.frame.ethertype == kEtherTypeIpv6) {
        pkt.ip = decode_ip(pkt.frame);
        pkt.transport = decode_transport(*pkt.ip);
        if (pkt.transport->kind == TransportKind::tcp)
            pkt.http = parse_http_request_line(*pkt.transport, monitored_ports);
    }
    return pkt;
}

} // namespace netsentry
