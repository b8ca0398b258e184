#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "netsentry/bytes.hpp"

namespace netsentry {

// 48-bit hardware address.
struct MacAddr {
    std::array<std::uint8_t, 6> octets{};

    auto operator<=>(const MacAddr&) const = default;

    bool is_broadcast() const
    {
        for (auto o : octets)
            if (o != 0xff)
                return false;
        return true;
    }

    std::string to_string() const
    {
        char buf[18];
        std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x",
            octets[0], octets[1], octets[2], octets[3], octets[4], octets[5]);
        return buf;
    }

    static std::optional<MacAddr> parse(std::string_view s)
    {
        MacAddr m;
        if (s.size() != 17)
            return std::nullopt;
        for (int i = 0; i < 6; ++i) {
            auto hex = [](char c) -> int {
                if (c >= '0' && c <= '9') return c - '0';
                if (c >= 'a' && c <= 'f') return c - 'a' + 10;
                if (c >= 'A' && c <= 'F') return c - 'A' + 10;
                return -1;
            };
            int hi = hex(s[i * 3]), lo = hex(s[i * 3 + 1]);
            if (hi < 0 || lo < 0)
                return std::nullopt;
            if (i < 5 && s[i * 3 + 2] != ':')
                return std::nullopt;
            m.octets[i] = static_cast<std::uint8_t>(hi * 16 + lo);
        }
        return m;
    }
};

// IPv4 or IPv6 address. v4 uses the first four bytes.
struct IpAddr {
    std::uint8_t version = 4;
    std::array<std::uint8_t, 16> bytes{};

    auto operator<=>(const IpAddr&) const = default;

    static IpAddr v4(std::uint32_t host_order)
    {
        IpAddr a;
        a.version = 4;
        a.bytes[0] = static_cast<std::uint8_t>(host_order >> 24);
        a.bytes[1] = static_cast<std::uint8_t>(host_order >> 16);
        a.bytes[2] = static_cast<std::uint8_t>(host_order >> 8);
        a.bytes[3] = static_cast<std::uint8_t>(host_order);
        return a;
    }

    static IpAddr v4(ByteView b, std::size_t off)
    {
        IpAddr a;
        a.version = 4;
        for (int i = 0; i < 4; ++i)
            a.bytes[i] = b[off + i];
        return a;
    }

    static IpAddr v6(ByteView b, std::size_t off)
    {
        IpAddr a;
        a.version = 6;
        for (int i = 0; i < 16; ++i)
            a.bytes[i] = b[off + i];
        return a;
    }

    std::uint32_t v4_host_order() const
    {
        return (std::uint32_t(bytes[0]) << 24) | (std::uint32_t(bytes[1]) << 16) |
               (std::uint32_t(bytes[2]) << 8) | std::uint32_t(bytes[3]);
    }

    std::string to_string() const
    {
        if (version == 4) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", bytes[0], bytes[1], bytes[2], bytes[3]);
            return buf;
        }
        // RFC 5952: lowercase hex, no leading zeros, longest run of two or
        // more zero groups compressed, leftmost run on ties.
        std::uint16_t g[8];
        for (int i = 0; i < 8; ++i)
            g[i] = static_cast<std::uint16_t>((bytes[i * 2] << 8) | bytes[i * 2 + 1]);
        int best_start = -1, best_len = 0;
        for (int i = 0; i < 8;) {
            if (g[i] != 0) { ++i; continue; }
            int j = i;
            while (j < 8 && g[j] == 0) ++j;
            if (j - i > best_len) { best_start = i; best_len = j - i; }
            i = j;
        }
        if (best_len < 2) { best_start = -1; best_len = 0; }
        std::string out;
        char buf[8];
        for (int i = 0; i < 8;) {
            if (i == best_start) {
                out += "::";
                i += best_len;
                if (i == 8)
                    return out;
                continue;
            }
            if (!out.empty() && out.back() != ':')
                out += ':';
            std::snprintf(buf, sizeof(buf), "%x", g[i]);
            out += buf;
            ++i;
        }
        return out;
    }

    static std::optional<IpAddr> parse(std::string_view s)
    {
        if (s.find(':') != std::string_view::npos)
            return parse_v6(s);
        return parse_v4(s);
    }

    static std::optional<IpAddr> parse_v4(std::string_view s)
    {
        std::uint32_t parts[4];
        int idx = 0;
        std::uint32_t cur = 0;
        int digits = 0;
        for (char c : s) {
            if (c >= '0' && c <= '9') {
                cur = cur * 10 + static_cast<std::uint32_t>(c - '0');
                if (++digits > 3 || cur > 255)
                    return std::nullopt;
            } else if (c == '.') {
                if (digits == 0 || idx >= 3)
                    return std::nullopt;
                parts[idx++] = cur;
                cur = 0;
                digits = 0;
            } else {
                return std::nullopt;
            }
        }
        if (digits == 0 || idx != 3)
            return std::nullopt;
        parts[3] = cur;
        return v4((parts[0] << 24) | (parts[1] << 16) | (parts[2] << 8) | parts[3]);
    }

    static std::optional<IpAddr> parse_v6(std::string_view s)
    {
        // Groups before and after at most one "::". A single colon at either
        // end is not a gap.
        if (s.size() >= 2 && s.back() == ':' && s[s.size() - 2] != ':')
            return std::nullopt;
        if (s.size() >= 2 && s.front() == ':' && s[1] != ':')
            return std::nullopt;
        if (s.size() == 1)
            return std::nullopt;
        std::uint16_t head[8], tail[8];
        int nhead = 0, ntail = 0;
        bool seen_gap = false;

        auto parse_group = [](std::string_view t) -> int {
            if (t.empty() || t.size() > 4)
                return -1;
            int v = 0;
            for (char c : t) {
                int d;
                if (c >= '0' && c <= '9') d = c - '0';
                else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
                else return -1;
                v = v * 16 + d;
            }
            return v;
        };

        std::size_t i = 0;
        if (s.starts_with("::")) {
            seen_gap = true;
            i = 2;
        }
        while (i < s.size()) {
            std::size_t j = s.find(':', i);
            std::string_view grp = (j == std::string_view::npos) ? s.substr(i) : s.substr(i, j - i);
            if (grp.empty()) {
                // "::" in the middle or at the end
                if (seen_gap)
                    return std::nullopt;
                seen_gap = true;
                i = (j == std::string_view::npos) ? s.size() : j + 1;
                continue;
            }
            int v = parse_group(grp);
            if (v < 0)
                return std::nullopt;
            if (!seen_gap) {
                if (nhead >= 8) return std::nullopt;
                head[nhead++] = static_cast<std::uint16_t>(v);
            } else {
                if (ntail >= 8) return std::nullopt;
                tail[ntail++] = static_cast<std::uint16_t>(v);
            }
            if (j == std::string_view::npos)
                break;
            i = j + 1;
            if (i == s.size()) {
                // trailing single ':' is only valid as part of "::"
                if (s[j] == ':' && j + 1 == s.size() && !seen_gap)
                    return std::nullopt;
                if (!seen_gap)
                    return std::nullopt;
            }
        }
        int total = nhead + ntail;
        if (seen_gap ? total >= 8 : total != 8)
            return std::nullopt;
        IpAddr a;
        a.version = 6;
        int gi = 0;
        for (int k = 0; k < nhead; ++k, ++gi) {
            a.bytes[gi * 2] = static_cast<std::uint8_t>(head[k] >> 8);
            a.bytes[gi * 2 + 1] = static_cast<std::uint8_t>(head[k] & 0xff);
        }
        gi = 8 - ntail;
        for (int k = 0; k < ntail; ++k, ++gi) {
            a.bytes[gi * 2] = static_cast<std::uint8_t>(tail[k] >> 8);
            a.bytes[gi * 2 + 1] = static_cast<std::uint8_t>(tail[k] & 0xff);
        }
        return a;
    }
};

// Address block in prefix notation. A bare address parses as a full-length prefix.
struct Cidr {
    IpAddr base;
    int prefix_len = 0;

    auto operator<=>(const Cidr&) const = default;

    bool contains(const IpAddr& ip) const
    {
        if (ip.version != base.version)
            return false;
        int bits = prefix_len;
        int nbytes = (base.version == 4) ? 4 : 16;
        for (int i = 0; i < nbytes && bits > 0; ++i) {
            int take = bits >= 8 ? 8 : bits;
            std::uint8_t mask = static_cast<std::uint8_t>(0xff << (8 - take));
            if ((ip.bytes[i] & mask) != (base.bytes[i] & mask))
                return false;
            bits -= take;
        }
        return true;
    }

    std::string to_string() const
    {
        return base.to_string() + "/" + std::to_string(prefix_len);
    }

    static std::optional<Cidr> parse(std::string_view s)
    {
        auto slash = s.find('/');
        std::string_view addr_part = (slash == std::string_view::npos) ? s : s.substr(0, slash);
        auto ip = IpAddr::parse(addr_part);
        if (!ip)
            return std::nullopt;
        int full = (ip->version == 4) ? 32 : 128;
        int len = full;
        if (slash != std::string_view::npos) {
            len = 0;
            auto rest = s.substr(slash + 1);
            if (rest.empty() || rest.size() > 3)
                return std::nullopt;
            for (char c : rest) {
                if (c < '0' || c > '9')
                    return std::nullopt;
                len = len * 10 + (c - '0');
            }
            if (len > full)
                return std::nullopt;
        }
        return Cidr{*ip, len};
    }
};

} // namespace netsentry
