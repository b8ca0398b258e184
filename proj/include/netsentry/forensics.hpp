#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "netsentry/alert.hpp"
#include "netsentry/blocklist.hpp"
#include "netsentry/decode.hpp"
#include "netsentry/pcap.hpp"
#include "netsentry/timefmt.hpp"

namespace netsentry {

struct UnreadableSource : std::runtime_error {
    UnreadableSource(const std::string& path, const std::string& cause)
        : std::runtime_error("unreadable source " + path + ": " + cause)
    {
    }
};

struct EmptySeries : std::runtime_error {
    EmptySeries() : std::runtime_error("rate series is empty") {}
};

struct Provenance {
    std::string path;
    std::int64_t load_time = 0; // wall clock; informational only
    std::size_t record_count = 0;
    std::size_t malformed = 0;
};

// Collection stage output: everything the later stages work from.
struct EvidenceSet {
    std::vector<AlertRecord> alerts;
    std::optional<BlockTable> blocks;
    std::vector<CaptureFile> captures;
    std::vector<Provenance> provenance;
};

namespace detail {

enum class SourceKind { alert_log, block_state, capture };

inline SourceKind sniff_source(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UnreadableSource(path.string(), "cannot open");
    std::uint8_t magic[4] = {0, 0, 0, 0};
    in.read(reinterpret_cast<char*>(magic), 4);
    if (in.gcount() == 4) {
        std::uint32_t m;
        std::memcpy(&m, magic, 4);
        if (m == kPcapMagic || m == kPcapMagicSwapped || m == kPcapMagicNano ||
            m == kPcapMagicNanoSwapped)
            return SourceKind::capture;
    }
    // text: decide from the first non-empty line's tab count
    in.clear();
    in.seekg(0);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::size_t tabs = static_cast<std::size_t>(std::count(line.begin(), line.end(), '\t'));
        if (tabs == 2)
            return SourceKind::block_state;
        return SourceKind::alert_log;
    }
    return SourceKind::alert_log; // empty file reads as an empty log
}

} // namespace detail

// Collection stage: parse every source, record provenance. Malformed records
// are counted, not fatal; unreadable files are.
inline EvidenceSet collect(const std::vector<std::filesystem::path>& sources)
{
    EvidenceSet ev;
    for (const auto& path : sources) {
        Provenance prov;
        prov.path = path.string();
        prov.load_time = static_cast<std::int64_t>(std::time(nullptr));
        switch (detail::sniff_source(path)) {
        case detail::SourceKind::capture: {
            try {
                ev.captures.push_back(read_capture(path));
            } catch (const std::exception& e) {
                throw UnreadableSource(path.string(), e.what());
            }
            prov.record_count = ev.captures.back().records.size();
            break;
        }
        case detail::SourceKind::block_state: {
            try {
                ev.blocks = BlockTable::load(path);
            } catch (const std::exception& e) {
                throw UnreadableSource(path.string(), e.what());
            }
            prov.record_count = ev.blocks->size();
            break;
        }
        case detail::SourceKind::alert_log: {
            LenientLogRead read;
            try {
                read = read_alert_log_lenient(path);
            } catch (const std::exception& e) {
                throw UnreadableSource(path.string(), e.what());
            }
            prov.record_count = read.records.size();
            prov.malformed = read.malformed;
            ev.alerts.insert(ev.alerts.end(), read.records.begin(), read.records.end());
            break;
        }
        }
        ev.provenance.push_back(std::move(prov));
    }
    return ev;
}

// One grouped attack: alerts of the same generator family whose consecutive
// timestamps stay within the gap threshold.
struct Incident {
    std::string kind;
    std::uint32_t family_gid = 0;
    std::vector<AlertRecord> alerts;
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::set<IpAddr> attacker_ips;
    std::set<IpAddr> victim_ips;
    std::set<AlertProtocol> protocols;
};

namespace detail {

inline std::string family_label(std::uint32_t gid, const AlertRecord& first)
{
    switch (gid) {
    case 119: return "Hypertext transfer protocol (HTTP)";
    case 122: return "Port scanning";
    case 112: return "ARP spoofing";
    default:
        return first.message.empty()
            ? "rule " + std::to_string(first.gid) + ":" + std::to_string(first.sid)
            : first.message;
    }
}

inline bool alert_before(const AlertRecord& a, const AlertRecord& b)
{
    auto key = [](const AlertRecord& r) {
        return std::tie(r.ts_sec, r.gid, r.sid, r.message);
    };
    if (key(a) != key(b))
        return key(a) < key(b);
    auto opt_ip = [](const std::optional<IpAddr>& ip) {
        return ip ? ip->to_string() : std::string();
    };
    return std::make_tuple(opt_ip(a.src_ip), opt_ip(a.dst_ip), a.src_port.value_or(0),
               a.dst_port.value_or(0)) <
           std::make_tuple(opt_ip(b.src_ip), opt_ip(b.dst_ip), b.src_port.value_or(0),
               b.dst_port.value_or(0));
}

} // namespace detail

// Examination stage: group by generator family (112/119/122 built-ins; custom
// sids each form their own family labeled by rule message), then split where
// consecutive timestamps gap more than gap_seconds. Input order never matters.
inline std::vector<Incident> examine(const EvidenceSet& evidence, double gap_seconds = 300.0)
{
    // family key: builtin gid or (gid,sid) for custom rules
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<AlertRecord>> families;
    for (const auto& a : evidence.alerts) {
        bool builtin = a.gid == 112 || a.gid == 119 || a.gid == 122;
        families[{a.gid, builtin ? 0 : a.sid}].push_back(a);
    }

    std::vector<Incident> incidents;
    for (auto& [key, alerts] : families) {
        std::sort(alerts.begin(), alerts.end(), detail::alert_before);
        Incident cur;
        auto flush = [&]() {
            if (cur.alerts.empty())
                return;
            cur.family_gid = key.first;
            cur.kind = detail::family_label(key.first, cur.alerts.front());
            cur.start = cur.alerts.front().ts_sec;
            cur.end = cur.alerts.back().ts_sec;
            for (const auto& a : cur.alerts) {
                if (a.src_ip)
                    cur.attacker_ips.insert(*a.src_ip);
                if (a.dst_ip)
                    cur.victim_ips.insert(*a.dst_ip);
                cur.protocols.insert(a.protocol);
            }
            incidents.push_back(std::move(cur));
            cur = Incident{};
        };
        for (const auto& a : alerts) {
            if (!cur.alerts.empty() &&
                static_cast<double>(a.ts_sec - cur.alerts.back().ts_sec) > gap_seconds)
                flush();
            cur.alerts.push_back(a);
        }
        flush();
    }
    std::sort(incidents.begin(), incidents.end(), [](const Incident& a, const Incident& b) {
        return std::tie(a.start, a.family_gid, a.kind) < std::tie(b.start, b.family_gid, b.kind);
    });
    return incidents;
}

inline std::string protocol_long_name(AlertProtocol p)
{
    switch (p) {
    case AlertProtocol::tcp: return "Transmission control protocol (TCP)";
    case AlertProtocol::udp: return "User datagram protocol (UDP)";
    case AlertProtocol::icmp: return "Internet control message protocol (ICMP)";
    case AlertProtocol::arp: return "Address resolution protocol (ARP)";
    case AlertProtocol::ip: return "Internet protocol (IP)";
    case AlertProtocol::other: return "unknown";
    }
    return "unknown";
}

// Per-incident answers to the five forensic questions plus evidence counts.
struct ReportBlock {
    std::string what;
    std::string when_start;
    std::string when_end;
    std::vector<std::string> attacker;
    std::vector<std::string> destination;
    std::vector<std::string> protocol;
    std::size_t alert_count = 0;
    std::vector<std::string> blocked;

    bool operator==(const ReportBlock&) const = default;
};

struct ForensicReport {
    std::vector<ReportBlock> incidents;

    bool operator==(const ForensicReport&) const = default;
};

// Analysis phase. ARP-family incidents answer the attacker question with
// "not identified" (their alerts carry no endpoints).
inline ForensicReport analyze(const std::vector<Incident>& incidents, const EvidenceSet& evidence)
{
    ForensicReport report;
    for (const auto& inc : incidents) {
        ReportBlock block;
        block.what = inc.kind;
        block.when_start = format_ts(inc.start);
        block.when_end = format_ts(inc.end);
        if (inc.family_gid == 112) {
            block.attacker = {"not identified"};
        } else {
            for (const auto& ip : inc.attacker_ips)
                block.attacker.push_back(ip.to_string());
            std::sort(block.attacker.begin(), block.attacker.end());
            if (block.attacker.empty())
                block.attacker = {"unknown"};
        }
        for (const auto& ip : inc.victim_ips)
            block.destination.push_back(ip.to_string());
        std::sort(block.destination.begin(), block.destination.end());
        if (block.destination.empty())
            block.destination = {"unknown"};
        for (auto p : inc.protocols)
            block.protocol.push_back(protocol_long_name(p));
        std::sort(block.protocol.begin(), block.protocol.end());
        if (block.protocol.empty())
            block.protocol = {"unknown"};
        block.alert_count = inc.alerts.size();
        if (evidence.blocks) {
            std::set<IpAddr> members = inc.attacker_ips;
            members.insert(inc.victim_ips.begin(), inc.victim_ips.end());
            for (const auto& ip : members)
                if (evidence.blocks->contains(ip))
                    block.blocked.push_back(ip.to_string());
            std::sort(block.blocked.begin(), block.blocked.end());
        }
        report.incidents.push_back(std::move(block));
    }
    return report;
}

inline const std::array<const char*, 5>& forensic_questions()
{
    static const std::array<const char*, 5> questions = {
        "What specific attack that occurred?",
        "When the attack occur?",
        "The IP Address of the attacker?",
        "The destination of the IP Address?",
        "The protocol is used?",
    };
    return questions;
}

namespace detail {

inline std::string join(const std::vector<std::string>& items, const char* sep = ", ")
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i)
            out += sep;
        out += items[i];
    }
    return out;
}

} // namespace detail

// Two-column question/answer table, one block per incident.
inline std::string render_report_text(const ForensicReport& report)
{
    std::string out = "Question for Forensic\tTHE ANSWER\n";
    const auto& q = forensic_questions();
    for (const auto& inc : report.incidents) {
        out += '\n';
        out += std::string(q[0]) + "\t" + inc.what + "\n";
        std::string when = inc.when_start;
        if (inc.when_end != inc.when_start)
            when += " .. " + inc.when_end;
        out += std::string(q[1]) + "\t" + when + "\n";
        out += std::string(q[2]) + "\t" + detail::join(inc.attacker) + "\n";
        out += std::string(q[3]) + "\t" + detail::join(inc.destination) + "\n";
        out += std::string(q[4]) + "\t" + detail::join(inc.protocol) + "\n";
        out += "Evidence\t" + std::to_string(inc.alert_count) + " alerts";
        if (!inc.blocked.empty())
            out += "; blocked: " + detail::join(inc.blocked);
        out += '\n';
    }
    return out;
}

inline nlohmann::ordered_json report_to_json(const ForensicReport& report)
{
    nlohmann::ordered_json incidents = nlohmann::ordered_json::array();
    for (const auto& inc : report.incidents) {
        nlohmann::ordered_json j;
        j["what"] = inc.what;
        j["when"] = {{"start", inc.when_start}, {"end", inc.when_end}};
        j["attacker"] = inc.attacker;
        j["destination"] = inc.destination;
        j["protocol"] = inc.protocol;
        j["evidence"] = {{"alerts", inc.alert_count}, {"blocked", inc.blocked}};
        incidents.push_back(std::move(j));
    }
    return nlohmann::ordered_json{{"incidents", std::move(incidents)}};
}

inline std::string render_report_json(const ForensicReport& report)
{
    return report_to_json(report).dump(2) + "\n";
}

inline ForensicReport parse_report_json(std::string_view text)
{
    auto j = nlohmann::json::parse(text);
    ForensicReport report;
    for (const auto& ji : j.at("incidents")) {
        ReportBlock inc;
        inc.what = ji.at("what").get<std::string>();
        inc.when_start = ji.at("when").at("start").get<std::string>();
        inc.when_end = ji.at("when").at("end").get<std::string>();
        inc.attacker = ji.at("attacker").get<std::vector<std::string>>();
        inc.destination = ji.at("destination").get<std::vector<std::string>>();
        inc.protocol = ji.at("protocol").get<std::vector<std::string>>();
        inc.alert_count = ji.at("evidence").at("alerts").get<std::size_t>();
        inc.blocked = ji.at("evidence").at("blocked").get<std::vector<std::string>>();
        report.incidents.push_back(std::move(inc));
    }
    return report;
}

// Traffic-rate evidence.

enum class FilterKind { all, by_src, by_dst };

struct TrafficFilter {
    FilterKind kind = FilterKind::all;
    Cidr net;

    std::string to_string() const
    {
        switch (kind) {
        case FilterKind::all: return "all";
        case FilterKind::by_src: return "src:" + net.to_string();
        case FilterKind::by_dst: return "dst:" + net.to_string();
        }
        return "all";
    }
};

struct RateSeries {
    double bin_seconds = 1.0;
    std::int64_t start_us = 0; // first bin start
    std::vector<std::uint64_t> bits; // per-bin totals
    std::string filter_desc = "all";

    double rate(std::size_t bin) const
    {
        return static_cast<double>(bits[bin]) / bin_seconds;
    }
};

// Bins are contiguous from the earliest to the latest matching packet; each
// packet contributes its original length in bits.
inline RateSeries traffic_series(const CaptureFile& capture, double bin_seconds,
    TrafficFilter filter = {})
{
    if (!(bin_seconds > 0.0))
        throw std::invalid_argument("bin_seconds must be > 0");
    RateSeries series;
    series.bin_seconds = bin_seconds;
    series.filter_desc = filter.to_string();

    auto matches = [&](const CaptureRecord& rec) -> bool {
        if (filter.kind == FilterKind::all)
            return true;
        try {
            auto frame = decode_ethernet(rec.bytes);
            if (frame.ethertype != kEtherTypeIpv4 && frame.ethertype != kEtherTypeIpv6)
                return false;
            auto ip = decode_ip(frame);
            const IpAddr& addr = (filter.kind == FilterKind::by_src) ? ip.src_ip : ip.dst_ip;
            return filter.net.contains(addr);
        } catch (const DecodeError&) {
            return false;
        }
    };

    std::int64_t bin_us = static_cast<std::int64_t>(std::llround(bin_seconds * 1e6));
    std::int64_t min_us = 0, max_us = 0;
    bool any = false;
    for (const auto& rec : capture.records) {
        if (!matches(rec))
            continue;
        std::int64_t t = rec.ts_us();
        if (!any) {
            min_us = max_us = t;
            any = true;
        } else {
            min_us = std::min(min_us, t);
            max_us = std::max(max_us, t);
        }
    }
    if (!any)
        return series;
    series.start_us = min_us;
    series.bits.assign(static_cast<std::size_t>((max_us - min_us) / bin_us) + 1, 0);
    for (const auto& rec : capture.records) {
        if (!matches(rec))
            continue;
        auto idx = static_cast<std::size_t>((rec.ts_us() - min_us) / bin_us);
        series.bits[idx] += static_cast<std::uint64_t>(rec.orig_len) * 8;
    }
    return series;
}

// Maximum-rate bin; earliest wins ties.
inline std::pair<std::int64_t, double> peak(const RateSeries& series)
{
    if (series.bits.empty())
        throw EmptySeries();
    std::size_t best = 0;
    for (std::size_t i = 1; i < series.bits.size(); ++i)
        if (series.bits[i] > series.bits[best])
            best = i;
    auto bin_us = static_cast<std::int64_t>(std::llround(series.bin_seconds * 1e6));
    return {series.start_us + static_cast<std::int64_t>(best) * bin_us, series.rate(best)};
}

} // namespace netsentry
