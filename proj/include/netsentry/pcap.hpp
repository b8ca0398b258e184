#pragma once

#include <chrono>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "netsentry/bytes.hpp"

namespace netsentry {

struct CaptureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BadMagic : CaptureError {
    using CaptureError::CaptureError;
};

struct TruncatedCapture : CaptureError {
    std::size_t record_index;
    TruncatedCapture(std::size_t index, const std::string& what)
        : CaptureError("truncated capture at record " + std::to_string(index) + ": " + what),
          record_index(index)
    {
    }
};

struct IoFailure : CaptureError {
    using CaptureError::CaptureError;
};

struct UnsupportedLinktype : CaptureError {
    explicit UnsupportedLinktype(std::uint32_t lt)
        : CaptureError("unsupported linktype " + std::to_string(lt) + " (only ethernet/1)")
    {
    }
};

// One sink failure during replay, tagged with the record that caused it.
struct ReplaySinkError : CaptureError {
    std::size_t record_index;
    ReplaySinkError(std::size_t index, const std::string& what)
        : CaptureError("sink failed at record " + std::to_string(index) + ": " + what),
          record_index(index)
    {
    }
};

constexpr std::uint32_t kPcapMagic = 0xa1b2c3d4;
constexpr std::uint32_t kPcapMagicSwapped = 0xd4c3b2a1;
constexpr std::uint32_t kPcapMagicNano = 0xa1b23c4d;
constexpr std::uint32_t kPcapMagicNanoSwapped = 0x4d3cb2a1;

struct CaptureRecord {
    std::uint32_t ts_sec = 0;
    std::uint32_t ts_usec = 0;
    std::uint32_t incl_len = 0;
    std::uint32_t orig_len = 0;
    Bytes bytes;

    std::int64_t ts_us() const
    {
        return static_cast<std::int64_t>(ts_sec) * 1000000 + ts_usec;
    }

    bool operator==(const CaptureRecord&) const = default;
};

enum class CaptureByteOrder { native_magic, swapped_magic };

struct CaptureFile {
    std::uint32_t linktype = 1;
    CaptureByteOrder byte_order = CaptureByteOrder::native_magic;
    std::vector<CaptureRecord> records;

    bool operator==(const CaptureFile&) const = default;
};

namespace detail {

inline std::uint32_t load_u32(const std::uint8_t* p, bool swap)
{
    std::uint32_t v;
    std::memcpy(&v, p, 4);
    if (swap)
        v = ((v & 0xff000000u) >> 24) | ((v & 0x00ff0000u) >> 8) | ((v & 0x0000ff00u) << 8) |
            ((v & 0x000000ffu) << 24);
    return v;
}

inline void store_u32(Bytes& out, std::uint32_t v)
{
    std::uint8_t b[4];
    std::memcpy(b, &v, 4);
    out.insert(out.end(), b, b + 4);
}

inline void store_u16(Bytes& out, std::uint16_t v)
{
    std::uint8_t b[2];
    std::memcpy(b, &v, 2);
    out.insert(out.end(), b, b + 2);
}

} // namespace detail

inline CaptureFile read_capture(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoFailure("cannot open " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoFailure("read failed on " + path.string());

    if (data.size() < 4)
        throw BadMagic("file too short for capture magic: " + path.string());
    std::uint32_t raw_magic = detail::load_u32(data.data(), false);
    if (raw_magic == kPcapMagicNano || raw_magic == kPcapMagicNanoSwapped)
        throw BadMagic("nanosecond-resolution captures are not supported: " + path.string());
    bool swap;
    if (raw_magic == kPcapMagic)
        swap = false;
    else if (raw_magic == kPcapMagicSwapped)
        swap = true;
    else
        throw BadMagic("not a capture file: " + path.string());
    if (data.size() < 24)
        throw BadMagic("capture global header incomplete: " + path.string());

    CaptureFile cap;
    cap.byte_order = swap ? CaptureByteOrder::swapped_magic : CaptureByteOrder::native_magic;
    cap.linktype = detail::load_u32(data.data() + 20, swap);

    std::size_t off = 24;
    std::size_t index = 0;
    while (off < data.size()) {
        if (off + 16 > data.size())
            throw TruncatedCapture(index, "record header incomplete");
        CaptureRecord rec;
        rec.ts_sec = detail::load_u32(data.data() + off, swap);
        rec.ts_usec = detail::load_u32(data.data() + off + 4, swap);
        rec.incl_len = detail::load_u32(data.data() + off + 8, swap);
        rec.orig_len = detail::load_u32(data.data() + off + 12, swap);
        off += 16;
        if (off + rec.incl_len > data.size())
            throw TruncatedCapture(index, "record body incomplete");
        rec.bytes.assign(data.begin() + static_cast<std::ptrdiff_t>(off),
            data.begin() + static_cast<std::ptrdiff_t>(off + rec.incl_len));
        off += rec.incl_len;
        cap.records.push_back(std::move(rec));
        ++index;
    }
    return cap;
}

inline void write_capture(const CaptureFile& cap, const std::filesystem::path& path)
{
    if (cap.linktype != 1)
        throw UnsupportedLinktype(cap.linktype);
    Bytes out;
    out.reserve(24);
    detail::store_u32(out, kPcapMagic);
    detail::store_u16(out, 2); // version major
    detail::store_u16(out, 4); // version minor
    detail::store_u32(out, 0); // thiszone
    detail::store_u32(out, 0); // sigfigs
    detail::store_u32(out, 65535); // snaplen
    detail::store_u32(out, 1); // linktype
    for (const auto& rec : cap.records) {
        detail::store_u32(out, rec.ts_sec);
        detail::store_u32(out, rec.ts_usec);
        detail::store_u32(out, rec.incl_len);
        detail::store_u32(out, rec.orig_len);
        out.insert(out.end(), rec.bytes.begin(), rec.bytes.end());
    }
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw IoFailure("cannot open " + path.string() + " for writing");
    os.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!os)
        throw IoFailure("write failed on " + path.string());
}

struct ReplayClock {
    enum class Mode { fast, realtime, scaled };

    Mode mode = Mode::fast;
    double factor = 1.0; // scaled mode only, > 0

    static ReplayClock as_fast_as_possible() { return {Mode::fast, 1.0}; }
    static ReplayClock realtime() { return {Mode::realtime, 1.0}; }
    static ReplayClock scaled(double f) { return {Mode::scaled, f}; }
};

struct ReplaySummary {
    std::size_t count = 0;
    double duration_seconds = 0.0;
};

// Delivers every record, in file order, to sink(record). Realtime/scaled
// modes sleep the recorded inter-packet deltas (negative deltas clamp to 0).
template <typename Sink>
ReplaySummary replay(const CaptureFile& cap, ReplayClock clock, Sink&& sink)
{
    if (cap.linktype != 1)
        throw UnsupportedLinktype(cap.linktype);
    if (clock.mode == ReplayClock::Mode::scaled && !(clock.factor > 0.0))
        throw CaptureError("replay scale factor must be > 0");

    auto t0 = std::chrono::steady_clock::now();
    std::int64_t prev_us = 0;
    bool have_prev = false;
    std::size_t index = 0;
    for (const auto& rec : cap.records) {
        if (clock.mode != ReplayClock::Mode::fast && have_prev) {
            std::int64_t delta = rec.ts_us() - prev_us;
            if (delta > 0) {
                double scale = (clock.mode == ReplayClock::Mode::scaled) ? clock.factor : 1.0;
                auto wait = std::chrono::microseconds(static_cast<std::int64_t>(
                    static_cast<double>(delta) / scale));
                std::this_thread::sleep_for(wait);
            }
        }
        prev_us = rec.ts_us();
        have_prev = true;
        try {
            sink(rec);
        } catch (const std::exception& e) {
            throw ReplaySinkError(index, e.what());
        }
        ++index;
    }
    auto t1 = std::chrono::steady_clock::now();
    return {index, std::chrono::duration<double>(t1 - t0).count()};
}

} // namespace netsentry
