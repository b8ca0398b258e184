#pragma once

#include <cstdint>

#include "netsentry/addr.hpp"
#include "netsentry/bytes.hpp"
#include "netsentry/decode.hpp"

// Raw frame construction for traffic synthesis. Checksums are computed for
// real (decoders elsewhere do not validate them, external tools do).

namespace netsentry::wire {

constexpr std::uint8_t kTcpFin = 0x01;
constexpr std::uint8_t kTcpSyn = 0x02;
constexpr std::uint8_t kTcpRst = 0x04;
constexpr std::uint8_t kTcpPsh = 0x08;
constexpr std::uint8_t kTcpAck = 0x10;

inline std::uint16_t inet_checksum(ByteView data, std::uint32_t seed = 0)
{
    std::uint32_t sum = seed;
    std::size_t i = 0;
    for (; i + 1 < data.size(); i += 2)
        sum += (static_cast<std::uint32_t>(data[i]) << 8) | data[i + 1];
    if (i < data.size())
        sum += static_cast<std::uint32_t>(data[i]) << 8;
    while (sum >> 16)
        sum = (sum & 0xffff) + (sum >> 16);
    return static_cast<std::uint16_t>(~sum & 0xffff);
}

namespace detail {

inline std::uint32_t pseudo_header_sum(const IpAddr& src, const IpAddr& dst, std::uint8_t proto,
    std::size_t length)
{
    std::uint32_t sum = 0;
    int nbytes = (src.version == 4) ? 4 : 16;
    for (int i = 0; i < nbytes; i += 2) {
        sum += (static_cast<std::uint32_t>(src.bytes[i]) << 8) | src.bytes[i + 1];
        sum += (static_cast<std::uint32_t>(dst.bytes[i]) << 8) | dst.bytes[i + 1];
    }
    sum += proto;
    sum += static_cast<std::uint32_t>(length);
    return sum;
}

inline std::uint16_t transport_checksum(const IpAddr& src, const IpAddr& dst, std::uint8_t proto,
    ByteView segment)
{
    std::uint32_t pseudo = pseudo_header_sum(src, dst, proto, segment.size());
    // fold the pseudo-header into the seed (ones'-complement add happens in inet_checksum)
    return inet_checksum(segment, pseudo);
}

} // namespace detail

inline Bytes eth(const MacAddr& dst, const MacAddr& src, std::uint16_t ethertype, ByteView payload)
{
    Bytes out;
    out.reserve(14 + payload.size());
    for (int i = 0; i < 6; ++i)
        out.push_back(dst.octets[i]);
    for (int i = 0; i < 6; ++i)
        out.push_back(src.octets[i]);
    put_be16(out, ethertype);
    append(out, payload);
    return out;
}

inline Bytes arp(std::uint16_t oper, const MacAddr& sender_mac, const IpAddr& sender_ip,
    const MacAddr& target_mac, const IpAddr& target_ip)
{
    Bytes out;
    out.reserve(28);
    put_be16(out, 1);
    put_be16(out, kEtherTypeIpv4);
    out.push_back(6);
    out.push_back(4);
    put_be16(out, oper);
    for (int i = 0; i < 6; ++i)
        out.push_back(sender_mac.octets[i]);
    for (int i = 0; i < 4; ++i)
        out.push_back(sender_ip.bytes[i]);
    for (int i = 0; i < 6; ++i)
        out.push_back(target_mac.octets[i]);
    for (int i = 0; i < 4; ++i)
        out.push_back(target_ip.bytes[i]);
    return out;
}

inline Bytes ipv4(const IpAddr& src, const IpAddr& dst, std::uint8_t proto, ByteView payload,
    std::uint8_t ttl = 64, std::uint16_t id = 0)
{
    Bytes out;
    out.reserve(20 + payload.size());
    out.push_back(0x45);
    out.push_back(0);
    put_be16(out, static_cast<std::uint16_t>(20 + payload.size()));
    put_be16(out, id);
    put_be16(out, 0); // flags/fragment
    out.push_back(ttl);
    out.push_back(proto);
    put_be16(out, 0); // checksum placeholder
    for (int i = 0; i < 4; ++i)
        out.push_back(src.bytes[i]);
    for (int i = 0; i < 4; ++i)
        out.push_back(dst.bytes[i]);
    std::uint16_t csum = inet_checksum(ByteView(out.data(), 20));
    out[10] = static_cast<std::uint8_t>(csum >> 8);
    out[11] = static_cast<std::uint8_t>(csum & 0xff);
    append(out, payload);
    return out;
}

inline Bytes ipv6(const IpAddr& src, const IpAddr& dst, std::uint8_t next, ByteView payload,
    std::uint8_t hop = 64)
{
    Bytes out;
    out.reserve(40 + payload.size());
    out.push_back(0x60);
    out.push_back(0);
    out.push_back(0);
    out.push_back(0);
    put_be16(out, static_cast<std::uint16_t>(payload.size()));
    out.push_back(next);
    out.push_back(hop);
    for (int i = 0; i < 16; ++i)
        out.push_back(src.bytes[i]);
    for (int i = 0; i < 16; ++i)
        out.push_back(dst.bytes[i]);
    append(out, payload);
    return out;
}

inline Bytes tcp(const IpAddr& src, const IpAddr& dst, std::uint16_t sport, std::uint16_t dport,
    std::uint32_t seq, std::uint32_t ack, std::uint8_t flags, ByteView payload,
    std::uint16_t window = 65535)
{
    Bytes out;
    out.reserve(20 + payload.size());
    put_be16(out, sport);
    put_be16(out, dport);
    put_be32(out, seq);
    put_be32(out, ack);
    out.push_back(0x50); // data offset 5
    out.push_back(flags);
    put_be16(out, window);
    put_be16(out, 0); // checksum placeholder
    put_be16(out, 0); // urgent
    append(out, payload);
    std::uint16_t csum = detail::transport_checksum(src, dst, kProtoTcp, out);
    out[16] = static_cast<std::uint8_t>(csum >> 8);
    out[17] = static_cast<std::uint8_t>(csum & 0xff);
    return out;
}

inline Bytes udp(const IpAddr& src, const IpAddr& dst, std::uint16_t sport, std::uint16_t dport,
    ByteView payload)
{
    Bytes out;
    out.reserve(8 + payload.size());
    put_be16(out, sport);
    put_be16(out, dport);
    put_be16(out, static_cast<std::uint16_t>(8 + payload.size()));
    put_be16(out, 0);
    append(out, payload);
    std::uint16_t csum = detail::transport_checksum(src, dst, kProtoUdp, out);
    if (csum == 0)
        csum = 0xffff;
    out[6] = static_cast<std::uint8_t>(csum >> 8);
    out[7] = static_cast<std::uint8_t>(csum & 0xff);
    return out;
}

inline Bytes icmp_echo(bool reply, std::uint16_t id, std::uint16_t seq, ByteView payload)
{
    Bytes out;
    out.reserve(8 + payload.size());
    out.push_back(reply ? 0 : 8);
    out.push_back(0);
    put_be16(out, 0);
    put_be16(out, id);
    put_be16(out, seq);
    append(out, payload);
    std::uint16_t csum = inet_checksum(out);
    out[2] = static_cast<std::uint8_t>(csum >> 8);
    out[3] = static_cast<std::uint8_t>(csum & 0xff);
    return out;
}

inline Bytes icmp6_echo(const IpAddr& src, const IpAddr& dst, bool reply, std::uint16_t id,
    std::uint16_t seq, ByteView payload)
{
    Bytes out;
    out.reserve(8 + payload.size());
    out.push_back(reply ? 129 : 128);
    out.push_back(0);
    put_be16(out, 0);
    put_be16(out, id);
    put_be16(out, seq);
    append(out, payload);
    std::uint16_t csum = detail::transport_checksum(src, dst, kProtoIcmpv6, out);
    out[2] = static_cast<std::uint8_t>(csum >> 8);
    out[3] = static_cast<std::uint8_t>(csum & 0xff);
    return out;
}

// IP packet in an ethernet frame, picking v4/v6 from the address family.
inline Bytes ip_frame(const MacAddr& dst_mac, const MacAddr& src_mac, const IpAddr& src,
    const IpAddr& dst, std::uint8_t proto, ByteView transport, std::uint16_t ip_id = 0)
{
    if (src.version == 4)
        return eth(dst_mac, src_mac, kEtherTypeIpv4, ipv4(src, dst, proto, transport, 64, ip_id));
    return eth(dst_mac, src_mac, kEtherTypeIpv6, ipv6(src, dst, proto, transport));
}

} // namespace netsentry::wire
