#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

#include <cstdlib>
#include <sys/wait.h>

#include <json.hpp>

// End-to-end checks against the installed command-line binary (path provided
// by ctest through NETSENTRY_BIN).

using namespace netsentry;

namespace {

struct CmdResult {
    int exit_code;
    std::string output; // stdout + stderr
};

std::string bin()
{
    const char* path = std::getenv("NETSENTRY_BIN");
    REQUIRE_MESSAGE(path, "NETSENTRY_BIN must point at the cli binary");
    return std::string(path);
}

CmdResult run_cmd(const std::filesystem::path& dir, const std::string& args,
    const std::string& env_prefix = "")
{
    auto out_file = dir / ".cmd-output";
    std::string full = env_prefix + (env_prefix.empty() ? "" : " ") + "\"" + bin() + "\" " + args +
        " > \"" + out_file.string() + "\" 2>&1";
    int rc = std::system(full.c_str());
    int code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return {code, testsup::read_text(out_file)};
}

} // namespace

TEST_CASE("forge writes a capture and a manifest, deterministically")
{
    auto dir = testsup::make_temp_dir("cli-forge");
    auto r1 = run_cmd(dir, "forge baseline --requests 5 --seed 9 --out " + (dir / "a.pcap").string());
    CHECK(r1.exit_code == 0);
    CHECK(std::filesystem::exists(dir / "a.pcap"));
    CHECK(std::filesystem::exists(dir / "a.pcap.manifest.json"));

    auto r2 = run_cmd(dir, "forge baseline --requests 5 --seed 9 --out " + (dir / "b.pcap").string());
    CHECK(r2.exit_code == 0);
    CHECK(testsup::read_bytes(dir / "a.pcap") == testsup::read_bytes(dir / "b.pcap"));
    CHECK(testsup::read_text(dir / "a.pcap.manifest.json") ==
        testsup::read_text(dir / "b.pcap.manifest.json"));
    // summaries agree up to the differing output paths
    auto strip_path_line = [](const std::string& text) {
        return text.substr(0, text.find("wrote "));
    };
    CHECK(strip_path_line(r1.output) == strip_path_line(r2.output));

    auto bad = run_cmd(dir, "forge icmp-flood --pps 0 --out " + (dir / "c.pcap").string());
    CHECK(bad.exit_code == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("run executes the pipeline and reports a summary")
{
    auto dir = testsup::make_temp_dir("cli-run");
    auto cap = (dir / "http.pcap").string();
    REQUIRE(run_cmd(dir, "forge http-unknown-method --requests 3 --seed 4 --out " + cap).exit_code == 0);
    testsup::write_text(dir / "engine.conf", "log = alerts.log\nblock_state = blocks.state\n");

    auto r = run_cmd(dir,
        "run --config " + (dir / "engine.conf").string() + " --capture " + cap);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("alerts: 6") != std::string::npos);
    CHECK(r.output.find("blocked: 3") != std::string::npos); // 2 attackers + server (mode both)

    auto log = testsup::read_text(dir / "alerts.log");
    CHECK(std::count(log.begin(), log.end(), '\n') == 6);
    CHECK(log.find("(http_inspect) UNKNOWN METHOD") != std::string::npos);

    SUBCASE("identical invocations print identical output and logs")
    {
        auto again = run_cmd(dir,
            "run --config " + (dir / "engine.conf").string() + " --capture " + cap);
        CHECK(again.exit_code == 0);
        CHECK(again.output == r.output);
        CHECK(testsup::read_text(dir / "alerts.log") == log);
    }
    SUBCASE("missing capture exits 2, bad config exits 1")
    {
        auto missing = run_cmd(dir,
            "run --config " + (dir / "engine.conf").string() + " --capture " +
                (dir / "nonexistent.pcap").string());
        CHECK(missing.exit_code == 2);
        testsup::write_text(dir / "bad.conf", "unknown_key = 1\n");
        auto bad = run_cmd(dir,
            "run --config " + (dir / "bad.conf").string() + " --capture " + cap);
        CHECK(bad.exit_code == 1);
    }
    SUBCASE("baseline capture reports zero alerts")
    {
        auto base = (dir / "base.pcap").string();
        REQUIRE(run_cmd(dir, "forge baseline --requests 4 --out " + base).exit_code == 0);
        auto quiet = run_cmd(dir,
            "run --config " + (dir / "engine.conf").string() + " --capture " + base);
        CHECK(quiet.exit_code == 0);
        CHECK(quiet.output.find("alerts: 0") != std::string::npos);
    }
    SUBCASE("the config path can come from the environment")
    {
        auto env_run = run_cmd(dir, "run --capture " + cap,
            "NETSENTRY_CONFIG=" + (dir / "engine.conf").string());
        CHECK(env_run.exit_code == 0);
        CHECK(env_run.output.find("alerts: 6") != std::string::npos);
    }
    SUBCASE("clock flag accepts scale=N and rejects junk")
    {
        auto scaled = run_cmd(dir, "run --config " + (dir / "engine.conf").string() +
            " --capture " + cap + " --clock scale=100000");
        CHECK(scaled.exit_code == 0);
        auto junk = run_cmd(dir, "run --config " + (dir / "engine.conf").string() +
            " --capture " + cap + " --clock sometimes");
        CHECK(junk.exit_code == 1);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("rules list and toggling")
{
    auto dir = testsup::make_temp_dir("cli-rules");
    testsup::write_text(dir / "arp.rules",
        "alert ip any any -> any any (msg:\"ARPSPOOF_UNICAST_ARP_REQUEST\"; gid:112; sid:1; classtype:protocol-command-decode;)\n"
        "alert ip any any -> any any (msg:\"ARPSPOOF_ETHERFRAME_ARP_MISMATCH_SRC\"; gid:112; sid:2; classtype:bad-unknown;)\n"
        "alert ip any any -> any any (msg:\"ARPSPOOF_ETHERFRAME_ARP_MISMATCH_DST\"; gid:112; sid:3; classtype:bad-unknown;)\n"
        "alert ip any any -> any any (msg:\"ARPSPOOF_ARP_CACHE_OVERWRITE_ATTACK\"; gid:112; sid:4; classtype:bad-unknown;)\n");

    auto list = run_cmd(dir, "rules list --rules " + (dir / "arp.rules").string());
    CHECK(list.exit_code == 0);
    CHECK(std::count(list.output.begin(), list.output.end(), '\n') == 4);
    CHECK(list.output.find("112:1\tprotocol-command-decode\tARPSPOOF_UNICAST_ARP_REQUEST") !=
        std::string::npos);
    CHECK(list.output.find("✔") != std::string::npos);

    auto off = run_cmd(dir, "rules disable 112:2 --rules " + (dir / "arp.rules").string());
    CHECK(off.exit_code == 0);
    auto list2 = run_cmd(dir, "rules list --rules " + (dir / "arp.rules").string());
    CHECK(list2.output.find("✘\t112:2") != std::string::npos);

    auto unknown = run_cmd(dir, "rules enable 9:9 --rules " + (dir / "arp.rules").string());
    CHECK(unknown.exit_code == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("disabling the custom rule silences the flood")
{
    auto dir = testsup::make_temp_dir("cli-toggle");
    auto cap = (dir / "flood.pcap").string();
    REQUIRE(run_cmd(dir, "forge icmp-flood --pps 50 --duration 2 --out " + cap).exit_code == 0);
    testsup::write_text(dir / "icmp.rules", std::string(forge::icmp_attack_rule()) + "\n");
    testsup::write_text(dir / "engine.conf",
        "rules = icmp.rules\nlog = alerts.log\nblock_state = blocks.state\n");

    auto armed = run_cmd(dir,
        "run --config " + (dir / "engine.conf").string() + " --capture " + cap);
    CHECK(armed.exit_code == 0);
    CHECK(armed.output.find("alerts: 100") != std::string::npos);

    REQUIRE(run_cmd(dir, "rules disable 1:1000001 --rules " + (dir / "icmp.rules").string())
            .exit_code == 0);
    auto silenced = run_cmd(dir,
        "run --config " + (dir / "engine.conf").string() + " --capture " + cap);
    CHECK(silenced.exit_code == 0);
    CHECK(silenced.output.find("alerts: 0") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("blocks list and remove")
{
    auto dir = testsup::make_temp_dir("cli-blocks");
    testsup::write_text(dir / "blocks.state",
        "ff02::16\t2019-08-13 13:21:58\tICMP ATTACK!! - 2019-08-13 13:21:58\n"
        "fe80::519a:af2d:d0a5:e03b\t2019-08-13 13:21:58\tICMP ATTACK!! - 2019-08-13 13:21:58|"
        "(portscan) UDP Filtered Portsweep - 2019-08-13 13:22:02\n"
        "ff02::1:3\t2019-08-13 13:22:02\t(portscan) UDP Filtered Portsweep - 2019-08-13 13:22:02\n");

    auto list = run_cmd(dir, "blocks list --state " + (dir / "blocks.state").string());
    CHECK(list.exit_code == 0);
    CHECK(list.output.find("3 host IP addresses are currently being blocked by Snort.") !=
        std::string::npos);

    auto removed = run_cmd(dir,
        "blocks remove ff02::16 --state " + (dir / "blocks.state").string());
    CHECK(removed.exit_code == 0);
    auto list2 = run_cmd(dir, "blocks list --state " + (dir / "blocks.state").string());
    CHECK(list2.output.find("2 host IP addresses are currently being blocked by Snort.") !=
        std::string::npos);

    auto again = run_cmd(dir,
        "blocks remove ff02::16 --state " + (dir / "blocks.state").string());
    CHECK(again.exit_code == 1);
    std::filesystem::remove_all(dir);
}

TEST_CASE("report renders the question table and json")
{
    auto dir = testsup::make_temp_dir("cli-report");
    auto cap = (dir / "http.pcap").string();
    REQUIRE(run_cmd(dir, "forge http-unknown-method --requests 3 --out " + cap).exit_code == 0);
    testsup::write_text(dir / "engine.conf", "log = alerts.log\nblock_state = blocks.state\n");
    REQUIRE(run_cmd(dir, "run --config " + (dir / "engine.conf").string() + " --capture " + cap)
            .exit_code == 0);

    auto table = run_cmd(dir, "report --alerts " + (dir / "alerts.log").string() + " --blocks " +
            (dir / "blocks.state").string());
    CHECK(table.exit_code == 0);
    CHECK(table.output.find("What specific attack that occurred?") != std::string::npos);
    CHECK(table.output.find("HTTP") != std::string::npos);

    auto json_out = run_cmd(dir, "report --format json --alerts " + (dir / "alerts.log").string());
    CHECK(json_out.exit_code == 0);
    auto parsed = nlohmann::json::parse(json_out.output);
    REQUIRE(parsed.contains("incidents"));
    CHECK(parsed["incidents"].size() == 1);
    CHECK(parsed["incidents"][0]["protocol"][0] == "Transmission control protocol (TCP)");

    SUBCASE("empty log renders the header only")
    {
        testsup::write_text(dir / "empty.log", "");
        auto empty = run_cmd(dir, "report --alerts " + (dir / "empty.log").string());
        CHECK(empty.exit_code == 0);
        CHECK(empty.output == "Question for Forensic\tTHE ANSWER\n");
    }
    SUBCASE("unreadable sources exit 1")
    {
        auto missing = run_cmd(dir, "report --alerts " + (dir / "nope.log").string());
        CHECK(missing.exit_code == 1);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("stats prints per-bin rates and the peak")
{
    auto dir = testsup::make_temp_dir("cli-stats");
    auto cap = (dir / "flood.pcap").string();
    REQUIRE(run_cmd(dir, "forge icmp-flood --pps 100 --duration 3 --out " + cap).exit_code == 0);

    auto r = run_cmd(dir, "stats --capture " + cap + " --bin 1");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("peak: ") != std::string::npos);
    CHECK(r.output.find(" bps at 2019-08-13") != std::string::npos);

    // peak within 1% of the constructed rate (total bits over duration)
    auto manifest = nlohmann::json::parse(testsup::read_text(dir / "flood.pcap.manifest.json"));
    double constructed = manifest["total_bits"].get<double>() / 3.0;
    auto peak_pos = r.output.find("peak: ");
    double reported = std::stod(r.output.substr(peak_pos + 6));
    CHECK(reported == doctest::Approx(constructed).epsilon(0.01));

    SUBCASE("empty capture exits 1 with no packets")
    {
        auto empty_path = dir / "empty.pcap";
        write_capture(CaptureFile{}, empty_path);
        auto empty = run_cmd(dir, "stats --capture " + empty_path.string());
        CHECK(empty.exit_code == 1);
        CHECK(empty.output.find("no packets") != std::string::npos);
    }
    SUBCASE("filters select traffic directions")
    {
        auto filtered = run_cmd(dir, "stats --capture " + cap + " --filter src:192.168.88.46");
        CHECK(filtered.exit_code == 0);
        auto none = run_cmd(dir, "stats --capture " + cap + " --filter src:10.0.0.0/8");
        CHECK(none.exit_code == 1);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("unknown flags and subcommands exit 1")
{
    auto dir = testsup::make_temp_dir("cli-unknown");
    CHECK(run_cmd(dir, "frobnicate").exit_code == 1);
    CHECK(run_cmd(dir, "stats --capture x --bogus-flag").exit_code == 1);
    std::filesystem::remove_all(dir);
}
