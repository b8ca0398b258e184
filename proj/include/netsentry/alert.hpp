#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "netsentry/addr.hpp"
#include "netsentry/decode.hpp"
#include "netsentry/timefmt.hpp"

namespace netsentry {

struct MalformedLine : std::runtime_error {
    std::size_t line_index;
    MalformedLine(std::size_t index, const std::string& text)
        : std::runtime_error("malformed alert log line " + std::to_string(index) + ": " + text),
          line_index(index)
    {
    }
};

enum class AlertProtocol { tcp, udp, icmp, arp, ip, other };

inline const char* to_string(AlertProtocol p)
{
    switch (p) {
    case AlertProtocol::tcp: return "TCP";
    case AlertProtocol::udp: return "UDP";
    case AlertProtocol::icmp: return "ICMP";
    case AlertProtocol::arp: return "ARP";
    case AlertProtocol::ip: return "IP";
    case AlertProtocol::other: return "OTHER";
    }
    return "OTHER";
}

inline std::optional<AlertProtocol> parse_alert_protocol(std::string_view s)
{
    if (s == "TCP") return AlertProtocol::tcp;
    if (s == "UDP") return AlertProtocol::udp;
    if (s == "ICMP") return AlertProtocol::icmp;
    if (s == "ARP") return AlertProtocol::arp;
    if (s == "IP") return AlertProtocol::ip;
    if (s == "OTHER") return AlertProtocol::other;
    return std::nullopt;
}

// One detection event in the log's column layout. ARP alerts carry absent
// endpoints; portscan alerts carry addresses but no ports.
struct AlertRecord {
    std::int64_t ts_sec = 0;
    std::uint32_t priority = 0;
    AlertProtocol protocol = AlertProtocol::other;
    std::string classification;
    std::optional<IpAddr> src_ip;
    std::optional<std::uint16_t> src_port;
    std::optional<IpAddr> dst_ip;
    std::optional<std::uint16_t> dst_port;
    std::uint32_t gid = 0;
    std::uint32_t sid = 0;
    std::string message;

    bool operator==(const AlertRecord&) const = default;
};

// Tab-separated line: timestamp, priority, protocol, classification, src_ip,
// src_port, dst_ip, dst_port, gid:sid, message. Absent fields are empty.
inline std::string to_log_line(const AlertRecord& a)
{
    std::string out = format_ts(a.ts_sec);
    out += '\t';
    out += std::to_string(a.priority);
    out += '\t';
    out += to_string(a.protocol);
    out += '\t';
    out += a.classification;
    out += '\t';
    out += a.src_ip ? a.src_ip->to_string() : "";
    out += '\t';
    out += a.src_port ? std::to_string(*a.src_port) : "";
    out += '\t';
    out += a.dst_ip ? a.dst_ip->to_string() : "";
    out += '\t';
    out += a.dst_port ? std::to_string(*a.dst_port) : "";
    out += '\t';
    out += std::to_string(a.gid) + ":" + std::to_string(a.sid);
    out += '\t';
    out += a.message;
    return out;
}

namespace detail {

inline std::vector<std::string_view> split_tabs(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        auto tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return fields;
}

inline std::optional<std::uint64_t> parse_u64(std::string_view s)
{
    if (s.empty())
        return std::nullopt;
    std::uint64_t v = 0;
    for (char c : s) {
        if (c < '0' || c > '9')
            return std::nullopt;
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return v;
}

} // namespace detail

inline AlertRecord parse_log_line(std::string_view line)
{
    auto fields = detail::split_tabs(line);
    if (fields.size() != 10)
        throw std::runtime_error("expected 10 fields, got " + std::to_string(fields.size()));
    AlertRecord a;
    auto ts = parse_ts(fields[0]);
    if (!ts)
        throw std::runtime_error("bad timestamp");
    a.ts_sec = *ts;
    auto prio = detail::parse_u64(fields[1]);
    if (!prio)
        throw std::runtime_error("bad priority");
    a.priority = static_cast<std::uint32_t>(*prio);
    auto proto = parse_alert_protocol(fields[2]);
    if (!proto)
        throw std::runtime_error("bad protocol");
    a.protocol = *proto;
    a.classification = std::string(fields[3]);
    if (!fields[4].empty()) {
        a.src_ip = IpAddr::parse(fields[4]);
        if (!a.src_ip)
            throw std::runtime_error("bad source address");
    }
    if (!fields[5].empty()) {
        auto p = detail::parse_u64(fields[5]);
        if (!p || *p > 65535)
            throw std::runtime_error("bad source port");
        a.src_port = static_cast<std::uint16_t>(*p);
    }
    if (!fields[6].empty()) {
        a.dst_ip = IpAddr::parse(fields[6]);
        if (!a.dst_ip)
            throw std::runtime_error("bad destination address");
    }
    if (!fields[7].empty()) {
        auto p = detail::parse_u64(fields[7]);
        if (!p || *p > 65535)
            throw std::runtime_error("bad destination port");
        a.dst_port = static_cast<std::uint16_t>(*p);
    }
    auto colon = fields[8].find(':');
    if (colon == std::string_view::npos)
        throw std::runtime_error("bad gid:sid");
    auto gid = detail::parse_u64(fields[8].substr(0, colon));
    auto sid = detail::parse_u64(fields[8].substr(colon + 1));
    if (!gid || !sid)
        throw std::runtime_error("bad gid:sid");
    a.gid = static_cast<std::uint32_t>(*gid);
    a.sid = static_cast<std::uint32_t>(*sid);
    a.message = std::string(fields[9]);
    return a;
}

inline void write_alert_log(const std::vector<AlertRecord>& records, const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    for (const auto& a : records)
        os << to_log_line(a) << '\n';
    if (!os)
        throw std::runtime_error("write failed on " + path.string());
}

inline std::vector<AlertRecord> read_alert_log(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    std::vector<AlertRecord> out;
    std::string line;
    std::size_t index = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            ++index;
            continue;
        }
        try {
            out.push_back(parse_log_line(line));
        } catch (const std::exception&) {
            throw MalformedLine(index, line);
        }
        ++index;
    }
    return out;
}

// Forensic collection reads logs best-effort: malformed lines are counted,
// not fatal.
struct LenientLogRead {
    std::vector<AlertRecord> records;
    std::size_t malformed = 0;
};

inline LenientLogRead read_alert_log_lenient(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());
    LenientLogRead out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        try {
            out.records.push_back(parse_log_line(line));
        } catch (const std::exception&) {
            ++out.malformed;
        }
    }
    return out;
}

} // namespace netsentry
