#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <list>
#include <map>
#include <string>
#include <vector>

#include "netsentry/addr.hpp"
#include "netsentry/alert.hpp"
#include "netsentry/timefmt.hpp"

namespace netsentry {

struct BlockPolicy {
    enum class Mode { src, dst, both };

    Mode mode = Mode::both;
    bool enabled = true; // false = IDS-only, alert without blocking
};

struct BlockReason {
    std::string description; // "<message> - <timestamp>"
    std::int64_t event_ts = 0;

    bool operator==(const BlockReason&) const = default;
};

struct BlockEntry {
    IpAddr ip;
    std::vector<BlockReason> reasons;
    std::int64_t blocked_at = 0;

    bool operator==(const BlockEntry&) const = default;
};

// Bounded, insertion-ordered set of blocked hosts. Inserting past capacity
// evicts the oldest-inserted entry; pass-listed addresses are never inserted.
class BlockTable {
public:
    explicit BlockTable(std::size_t capacity = 500, std::vector<Cidr> pass_list = {})
        : capacity_(capacity), pass_list_(std::move(pass_list))
    {
    }

    std::size_t size() const { return entries_.size(); }
    std::size_t capacity() const { return capacity_; }
    const std::list<BlockEntry>& entries() const { return entries_; }

    bool contains(const IpAddr& ip) const { return index_.contains(ip); }

    bool passes(const IpAddr& ip) const
    {
        for (const auto& net : pass_list_)
            if (net.contains(ip))
                return true;
        return false;
    }

    struct Applied {
        BlockEntry entry;
        bool created; // false = an existing entry was extended

        bool operator==(const Applied&) const = default;
    };

    // Candidate endpoints per policy mode are inserted or get this alert's
    // description appended (exact duplicates suppressed). Returns the entries
    // created or updated.
    std::vector<Applied> apply(const AlertRecord& alert, const BlockPolicy& policy)
    {
        std::vector<Applied> touched;
        if (!policy.enabled)
            return touched;
        std::vector<IpAddr> candidates;
        if (policy.mode != BlockPolicy::Mode::dst && alert.src_ip)
            candidates.push_back(*alert.src_ip);
        if (policy.mode != BlockPolicy::Mode::src && alert.dst_ip &&
            !(alert.src_ip && *alert.dst_ip == *alert.src_ip))
            candidates.push_back(*alert.dst_ip);

        std::string description = alert.message + " - " + format_ts(alert.ts_sec);
        for (const auto& ip : candidates) {
            if (passes(ip))
                continue;
            auto it = index_.find(ip);
            if (it != index_.end()) {
                auto& entry = *it->second;
                bool duplicate = false;
                for (const auto& r : entry.reasons)
                    if (r.description == description) {
                        duplicate = true;
                        break;
                    }
                if (!duplicate)
                    entry.reasons.push_back({description, alert.ts_sec});
                touched.push_back({entry, false});
                continue;
            }
            if (entries_.size() >= capacity_ && capacity_ > 0) {
                index_.erase(entries_.front().ip);
                entries_.pop_front();
            }
            entries_.push_back({ip, {{description, alert.ts_sec}}, alert.ts_sec});
            index_[ip] = std::prev(entries_.end());
            touched.push_back({entries_.back(), true});
        }
        return touched;
    }

    bool remove(const IpAddr& ip)
    {
        auto it = index_.find(ip);
        if (it == index_.end())
            return false;
        entries_.erase(it->second);
        index_.erase(it);
        return true;
    }

    // Rows newest-first: "index<TAB>ip<TAB>description [description ...]".
    std::pair<std::size_t, std::vector<std::string>> summary() const
    {
        std::vector<std::string> rows;
        std::size_t n = 1;
        for (auto it = entries_.rbegin(); it != entries_.rend(); ++it, ++n) {
            std::string row = std::to_string(n) + "\t" + it->ip.to_string() + "\t";
            for (std::size_t i = 0; i < it->reasons.size(); ++i) {
                if (i)
                    row += ' ';
                row += it->reasons[i].description;
            }
            rows.push_back(std::move(row));
        }
        return {entries_.size(), rows};
    }

    // State file: one line per entry in insertion order,
    // ip<TAB>blocked_at<TAB>description[|description...]
    void save(const std::filesystem::path& path) const
    {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        for (const auto& e : entries_) {
            os << e.ip.to_string() << '\t' << format_ts(e.blocked_at) << '\t';
            for (std::size_t i = 0; i < e.reasons.size(); ++i) {
                if (i)
                    os << '|';
                os << e.reasons[i].description;
            }
            os << '\n';
        }
        if (!os)
            throw std::runtime_error("write failed on " + path.string());
    }

    static BlockTable load(const std::filesystem::path& path, std::size_t capacity = 500,
        std::vector<Cidr> pass_list = {})
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw std::runtime_error("cannot open " + path.string());
        BlockTable table(capacity, std::move(pass_list));
        std::string line;
        std::size_t index = 0;
        while (std::getline(in, line)) {
            if (line.empty()) {
                ++index;
                continue;
            }
            auto tab1 = line.find('\t');
            auto tab2 = (tab1 == std::string::npos) ? std::string::npos : line.find('\t', tab1 + 1);
            if (tab2 == std::string::npos)
                throw MalformedLine(index, line);
            auto ip = IpAddr::parse(std::string_view(line).substr(0, tab1));
            auto at = parse_ts(std::string_view(line).substr(tab1 + 1, tab2 - tab1 - 1));
            if (!ip || !at)
                throw MalformedLine(index, line);
            BlockEntry entry{*ip, {}, *at};
            std::string rest = line.substr(tab2 + 1);
            std::size_t start = 0;
            while (start <= rest.size()) {
                auto bar = rest.find('|', start);
                std::string desc = rest.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
                if (!desc.empty()) {
                    // descriptions end in " - <timestamp>"; recover the event time
                    std::int64_t ts = *at;
                    if (desc.size() >= 19) {
                        auto parsed = parse_ts(std::string_view(desc).substr(desc.size() - 19));
                        if (parsed)
                            ts = *parsed;
                    }
                    entry.reasons.push_back({desc, ts});
                }
                if (bar == std::string::npos)
                    break;
                start = bar + 1;
            }
            if (entry.reasons.empty())
                throw MalformedLine(index, line);
            if (table.entries_.size() >= capacity && capacity > 0) {
                table.index_.erase(table.entries_.front().ip);
                table.entries_.pop_front();
            }
            table.entries_.push_back(std::move(entry));
            table.index_[table.entries_.back().ip] = std::prev(table.entries_.end());
            ++index;
        }
        return table;
    }

    bool operator==(const BlockTable& other) const
    {
        return capacity_ == other.capacity_ && entries_ == other.entries_;
    }

private:
    std::size_t capacity_;
    std::vector<Cidr> pass_list_;
    std::list<BlockEntry> entries_;
    std::map<IpAddr, std::list<BlockEntry>::iterator> index_;
};

} // namespace netsentry
