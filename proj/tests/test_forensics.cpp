#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netsentry/engine.hpp"
#include "netsentry/forensics.hpp"

#include "support.hpp"

#include <algorithm>

using namespace netsentry;
using testsup::ip;

namespace {

// The six http-inspection rows of the known alert table.
std::string fig3_log()
{
    return "2019-08-08 10:21:00\t3\tTCP\tUnknown Traffic\t140.213.44.183\t5792\t192.168.88.48\t80\t119:31\t(http_inspect) UNKNOWN METHOD\n"
           "2019-08-07 23:48:00\t3\tTCP\tUnknown Traffic\t36.71.237.18\t17564\t192.168.88.48\t80\t119:31\t(http_inspect) UNKNOWN METHOD\n"
           "2019-08-06 23:40:36\t3\tTCP\tUnknown Traffic\t36.72.144.215\t52806\t192.168.88.48\t80\t119:31\t(http_inspect) UNKNOWN METHOD\n"
           "2019-08-06 23:40:57\t3\tTCP\tUnknown Traffic\t36.72.144.215\t52809\t192.168.88.48\t80\t119:31\t(http_inspect) UNKNOWN METHOD\n"
           "2019-08-06 23:40:58\t3\tTCP\tUnknown Traffic\t36.72.144.215\t52807\t192.168.88.48\t80\t119:31\t(http_inspect) UNKNOWN METHOD\n"
           "2019-08-06 23:41:04\t3\tTCP\tUnknown Traffic\t36.72.144.215\t52808\t192.168.88.48\t80\t119:31\t(http_inspect) UNKNOWN METHOD\n";
}

std::string fig12_state()
{
    return "ff02::1:3\t2019-08-13 13:22:02\t(portscan) UDP Filtered Portsweep - 2019-08-13 13:22:02\n"
           "fe80::519a:af2d:d0a5:e03b\t2019-08-13 13:21:58\tICMP ATTACK!! - 2019-08-13 13:21:58|(portscan) UDP Filtered Portsweep - 2019-08-13 13:22:02\n"
           "ff02::16\t2019-08-13 13:21:58\tICMP ATTACK!! - 2019-08-13 13:21:58\n";
}

} // namespace

TEST_CASE("collect stage")
{
    auto dir = testsup::make_temp_dir("forensics-collect");

    SUBCASE("one empty alert log")
    {
        auto path = dir / "empty.log";
        testsup::write_text(path, "");
        auto ev = collect({path});
        CHECK(ev.alerts.empty());
        REQUIRE(ev.provenance.size() == 1);
        CHECK(ev.provenance[0].record_count == 0);
    }
    SUBCASE("alert log plus block state")
    {
        auto log = dir / "alerts.log";
        auto state = dir / "blocks.state";
        testsup::write_text(log, fig3_log());
        testsup::write_text(state, fig12_state());
        auto ev = collect({log, state});
        CHECK(ev.alerts.size() == 6);
        REQUIRE(ev.blocks);
        CHECK(ev.blocks->size() == 3);
        REQUIRE(ev.provenance.size() == 2);
        CHECK(ev.provenance[0].record_count == 6);
        CHECK(ev.provenance[1].record_count == 3);
    }
    SUBCASE("captures are recognized by magic")
    {
        forge::BaselineParams p;
        p.clients = {ip("192.168.88.20")};
        p.server_ip = ip("192.168.88.48");
        p.requests = 2;
        auto base = forge::forge_baseline(p, 1);
        auto cap_path = dir / "base.pcap";
        write_capture(base.capture, cap_path);
        auto ev = collect({cap_path});
        REQUIRE(ev.captures.size() == 1);
        CHECK(ev.captures[0].records.size() == base.capture.records.size());
    }
    SUBCASE("malformed alert lines are counted, not fatal")
    {
        auto path = dir / "dirty.log";
        testsup::write_text(path, fig3_log() + "garbage line without tabs at all here\n");
        auto ev = collect({path});
        CHECK(ev.alerts.size() == 6);
        CHECK(ev.provenance[0].malformed == 1);
    }
    SUBCASE("missing files are unreadable sources")
    {
        CHECK_THROWS_AS(collect({dir / "nope.log"}), UnreadableSource);
    }
    SUBCASE("loading a re-saved evidence set is lossless")
    {
        auto log = dir / "alerts.log";
        testsup::write_text(log, fig3_log());
        auto ev = collect({log});
        auto log2 = dir / "alerts2.log";
        write_alert_log(ev.alerts, log2);
        auto ev2 = collect({log2});
        CHECK(ev2.alerts == ev.alerts);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("examine groups by family and splits on time gaps")
{
    auto dir = testsup::make_temp_dir("forensics-examine");

    SUBCASE("empty evidence")
    {
        CHECK(examine(EvidenceSet{}).empty());
    }
    SUBCASE("the six http alerts form three day-separated incidents")
    {
        auto log = dir / "alerts.log";
        testsup::write_text(log, fig3_log());
        auto incidents = examine(collect({log}), 300.0);
        REQUIRE(incidents.size() == 3);
        for (const auto& inc : incidents) {
            CHECK(inc.kind == "Hypertext transfer protocol (HTTP)");
            CHECK(inc.family_gid == 119);
        }
        // chronological: the burst of four, then the two singles
        CHECK(incidents[0].alerts.size() == 4);
        CHECK(incidents[0].start == testsup::ts("2019-08-06 23:40:36"));
        CHECK(incidents[0].end == testsup::ts("2019-08-06 23:41:04"));
        CHECK(incidents[0].attacker_ips == std::set<IpAddr>{ip("36.72.144.215")});
        CHECK(incidents[1].alerts.size() == 1);
        CHECK(incidents[2].alerts.size() == 1);
    }
    SUBCASE("alert input order never matters")
    {
        auto log = dir / "alerts.log";
        testsup::write_text(log, fig3_log());
        auto ev = collect({log});
        auto baseline = examine(ev);
        testsup::Gen gen(5);
        for (int round = 0; round < 10; ++round) {
            // deterministic shuffle
            for (std::size_t i = ev.alerts.size(); i > 1; --i)
                std::swap(ev.alerts[i - 1], ev.alerts[gen.below(static_cast<std::uint32_t>(i))]);
            auto shuffled = examine(ev);
            REQUIRE(shuffled.size() == baseline.size());
            for (std::size_t i = 0; i < baseline.size(); ++i) {
                CHECK(shuffled[i].kind == baseline[i].kind);
                CHECK(shuffled[i].start == baseline[i].start);
                CHECK(shuffled[i].end == baseline[i].end);
                CHECK(shuffled[i].alerts.size() == baseline[i].alerts.size());
            }
        }
    }
    SUBCASE("custom sids are labeled by rule message")
    {
        EvidenceSet ev;
        AlertRecord a;
        a.ts_sec = 1000;
        a.gid = 1;
        a.sid = 1000001;
        a.message = "ICMP ATTACK!!";
        a.protocol = AlertProtocol::icmp;
        ev.alerts = {a};
        auto incidents = examine(ev);
        REQUIRE(incidents.size() == 1);
        CHECK(incidents[0].kind == "ICMP ATTACK!!");
    }
    SUBCASE("every alert lands in exactly one incident")
    {
        testsup::Gen gen(99);
        EvidenceSet ev;
        for (int i = 0; i < 400; ++i)
            ev.alerts.push_back(gen.random_alert());
        auto incidents = examine(ev);
        std::size_t total = 0;
        for (const auto& inc : incidents) {
            total += inc.alerts.size();
            // within an incident, consecutive gaps stay under the threshold
            for (std::size_t i = 1; i < inc.alerts.size(); ++i)
                CHECK(inc.alerts[i].ts_sec - inc.alerts[i - 1].ts_sec <= 300);
        }
        CHECK(total == ev.alerts.size());
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("analyze answers the five questions")
{
    auto dir = testsup::make_temp_dir("forensics-analyze");

    SUBCASE("two-attacker http incident")
    {
        // forge the two-attacker scenario through the pipeline for a real log
        forge::HttpUnknownMethodParams p;
        p.server_ip = ip("10.0.5.188");
        p.attackers = {ip("148.229.33.150"), ip("63.17.125.15")};
        p.requests_per_attacker = 3;
        auto forged = forge::forge_http_unknown_method(p, 2);

        EngineConfig cfg;
        cfg.log_path = dir / "alerts.log";
        cfg.block_state_path = dir / "blocks.state";
        Engine engine(cfg);
        engine.run(forged.capture);
        engine.write_outputs();

        auto ev = collect({cfg.log_path, cfg.block_state_path});
        auto report = analyze(examine(ev), ev);
        REQUIRE(report.incidents.size() == 1);
        const auto& inc = report.incidents[0];
        CHECK(inc.what == "Hypertext transfer protocol (HTTP)");
        CHECK(inc.attacker == std::vector<std::string>{"148.229.33.150", "63.17.125.15"});
        CHECK(inc.destination == std::vector<std::string>{"10.0.5.188"});
        CHECK(inc.protocol == std::vector<std::string>{"Transmission control protocol (TCP)"});
        CHECK(inc.alert_count == 6);
        // both attackers cross-referenced in the block snapshot
        CHECK(std::find(inc.blocked.begin(), inc.blocked.end(), "148.229.33.150") != inc.blocked.end());
        CHECK(std::find(inc.blocked.begin(), inc.blocked.end(), "63.17.125.15") != inc.blocked.end());
    }
    SUBCASE("arp incidents have no identified attacker")
    {
        EvidenceSet ev;
        AlertRecord a;
        a.ts_sec = 1000;
        a.gid = 112;
        a.sid = 2;
        a.protocol = AlertProtocol::arp;
        a.classification = "Potentially Bad Traffic";
        a.message = "(arp spoof) Ethernet/ARP Mismatch request for Source";
        ev.alerts = {a, a};
        auto report = analyze(examine(ev), ev);
        REQUIRE(report.incidents.size() == 1);
        CHECK(report.incidents[0].what == "ARP spoofing");
        CHECK(report.incidents[0].attacker == std::vector<std::string>{"not identified"});
        CHECK(report.incidents[0].destination == std::vector<std::string>{"unknown"});
        CHECK(report.incidents[0].protocol ==
            std::vector<std::string>{"Address resolution protocol (ARP)"});
    }
    SUBCASE("report fields equal an independent flat recomputation")
    {
        testsup::Gen gen(123);
        EvidenceSet ev;
        for (int i = 0; i < 300; ++i)
            ev.alerts.push_back(gen.random_alert());
        auto incidents = examine(ev);
        auto report = analyze(incidents, ev);
        REQUIRE(report.incidents.size() == incidents.size());
        for (std::size_t i = 0; i < incidents.size(); ++i) {
            std::set<std::string> attackers, destinations, protocols;
            for (const auto& a : incidents[i].alerts) {
                if (a.src_ip)
                    attackers.insert(a.src_ip->to_string());
                if (a.dst_ip)
                    destinations.insert(a.dst_ip->to_string());
                protocols.insert(protocol_long_name(a.protocol));
            }
            const auto& block = report.incidents[i];
            if (incidents[i].family_gid == 112) {
                CHECK(block.attacker == std::vector<std::string>{"not identified"});
            } else if (attackers.empty()) {
                CHECK(block.attacker == std::vector<std::string>{"unknown"});
            } else {
                CHECK(std::set<std::string>(block.attacker.begin(), block.attacker.end()) ==
                    attackers);
            }
            if (!destinations.empty())
                CHECK(std::set<std::string>(block.destination.begin(), block.destination.end()) ==
                    destinations);
            CHECK(std::set<std::string>(block.protocol.begin(), block.protocol.end()) == protocols);
            CHECK(block.alert_count == incidents[i].alerts.size());
        }
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("report rendering")
{
    SUBCASE("empty report is header-only")
    {
        CHECK(render_report_text(ForensicReport{}) == "Question for Forensic\tTHE ANSWER\n");
    }
    SUBCASE("the five question strings appear verbatim")
    {
        ReportBlock inc;
        inc.what = "Hypertext transfer protocol (HTTP)";
        inc.when_start = inc.when_end = "2019-08-08 10:21:00";
        inc.attacker = {"148.229.33.150", "63.17.125.15"};
        inc.destination = {"10.0.5.188"};
        inc.protocol = {"Transmission control protocol (TCP)"};
        inc.alert_count = 6;
        ForensicReport report{{inc}};
        auto text = render_report_text(report);
        CHECK(text.find("What specific attack that occurred?") != std::string::npos);
        CHECK(text.find("When the attack occur?") != std::string::npos);
        CHECK(text.find("The IP Address of the attacker?") != std::string::npos);
        CHECK(text.find("The destination of the IP Address?") != std::string::npos);
        CHECK(text.find("The protocol is used?") != std::string::npos);
        CHECK(text.find("148.229.33.150, 63.17.125.15") != std::string::npos);
    }
    SUBCASE("json round trip on random reports")
    {
        testsup::Gen gen(17);
        for (int round = 0; round < 25; ++round) {
            EvidenceSet ev;
            std::size_t n = gen.below(60);
            for (std::size_t i = 0; i < n; ++i)
                ev.alerts.push_back(gen.random_alert());
            auto report = analyze(examine(ev), ev);
            auto back = parse_report_json(render_report_json(report));
            CHECK(back == report);
        }
    }
}

TEST_CASE("traffic-rate series")
{
    SUBCASE("empty capture yields an empty series; peak refuses it")
    {
        auto series = traffic_series(CaptureFile{}, 1.0);
        CHECK(series.bits.empty());
        CHECK_THROWS_AS(peak(series), EmptySeries);
    }
    SUBCASE("constant-rate flood: interior bins within 1%, conservation exact")
    {
        forge::IcmpFloodParams p;
        p.src = ip("192.168.88.46");
        p.dst = ip("192.168.88.57");
        p.packets_per_second = 200;
        p.duration_seconds = 5;
        auto flood = forge::forge_icmp_flood(p, 4);
        auto series = traffic_series(flood.capture, 1.0);
        REQUIRE(series.bits.size() >= 3);

        std::uint64_t sum = 0;
        for (auto b : series.bits)
            sum += b;
        CHECK(sum == flood.manifest.total_bits);

        double expected_rate = static_cast<double>(flood.manifest.total_bits) /
            (static_cast<double>(flood.capture.records.size()) / p.packets_per_second);
        for (std::size_t i = 1; i + 1 < series.bits.size(); ++i)
            CHECK(series.rate(i) == doctest::Approx(expected_rate).epsilon(0.01));
    }
    SUBCASE("filters restrict by source or destination network")
    {
        forge::IcmpFloodParams p;
        p.src = ip("192.168.88.46");
        p.dst = ip("192.168.88.57");
        p.packets_per_second = 50;
        p.duration_seconds = 1;
        auto flood = forge::forge_icmp_flood(p, 4);
        auto all = traffic_series(flood.capture, 1.0);
        auto by_src = traffic_series(flood.capture, 1.0,
            {FilterKind::by_src, *Cidr::parse("192.168.88.46")});
        auto none = traffic_series(flood.capture, 1.0,
            {FilterKind::by_src, *Cidr::parse("10.0.0.0/8")});
        std::uint64_t sum_all = 0, sum_src = 0;
        for (auto b : all.bits)
            sum_all += b;
        for (auto b : by_src.bits)
            sum_src += b;
        CHECK(sum_all == sum_src);
        CHECK(none.bits.empty());
    }
    SUBCASE("peak: single bin, tie broken earliest, flood above baseline")
    {
        CaptureFile cap;
        auto rec = [&](std::uint32_t sec, std::uint32_t len) {
            CaptureRecord r;
            r.ts_sec = sec;
            r.incl_len = 0;
            r.orig_len = len;
            cap.records.push_back(r);
        };
        rec(100, 500);
        auto single = traffic_series(cap, 1.0);
        auto p1 = peak(single);
        CHECK(p1.second == doctest::Approx(4000.0));

        rec(101, 500); // tie with bin 0
        rec(102, 100);
        auto tied = traffic_series(cap, 1.0);
        auto p2 = peak(tied);
        CHECK(p2.first == single.start_us); // earliest wins
        CHECK(p2.second == doctest::Approx(4000.0));

        forge::IcmpFloodParams fp;
        fp.src = ip("192.0.2.1");
        fp.dst = ip("192.0.2.2");
        fp.packets_per_second = 400;
        fp.duration_seconds = 3;
        auto flood = forge::forge_icmp_flood(fp, 6);
        forge::BaselineParams bp;
        bp.clients = {ip("192.168.88.20")};
        bp.server_ip = ip("192.168.88.48");
        bp.requests = 10;
        bp.request_spacing_us = 300000; // same 3-second footprint
        auto base = forge::forge_baseline(bp, 6);
        CHECK(peak(traffic_series(flood.capture, 1.0)).second >
            peak(traffic_series(base.capture, 1.0)).second);
    }
}
