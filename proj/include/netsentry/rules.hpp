#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "netsentry/addr.hpp"
#include "netsentry/decode.hpp"

namespace netsentry {

struct SyntaxError : std::runtime_error {
    std::size_t line;
    std::size_t column;
    SyntaxError(std::size_t line_, std::size_t col, const std::string& what)
        : std::runtime_error("syntax error at line " + std::to_string(line_) + ", column " +
              std::to_string(col) + ": " + what),
          line(line_), column(col)
    {
    }
};

struct UnknownVariable : std::runtime_error {
    explicit UnknownVariable(const std::string& name)
        : std::runtime_error("unknown variable $" + name)
    {
    }
};

struct DuplicateSid : std::runtime_error {
    DuplicateSid(std::uint32_t gid, std::uint32_t sid)
        : std::runtime_error("duplicate rule id " + std::to_string(gid) + ":" + std::to_string(sid))
    {
    }
};

struct UnknownRule : std::runtime_error {
    UnknownRule(std::uint32_t gid, std::uint32_t sid)
        : std::runtime_error("no rule " + std::to_string(gid) + ":" + std::to_string(sid))
    {
    }
};

enum class RuleProto { tcp, udp, icmp, ip };

struct Variables {
    struct Def {
        std::vector<Cidr> nets;
        bool negated = false;

        bool operator==(const Def&) const = default;
    };

    std::map<std::string, Def> defs;

    bool operator==(const Variables&) const = default;
};

struct AddressSpec {
    enum class Kind { any, single, cidr, variable };

    Kind kind = Kind::any;
    Cidr net; // single/cidr
    std::string var_name; // variable
    std::vector<Cidr> resolved; // variable
    bool negated = false; // variable defined by negation

    bool operator==(const AddressSpec&) const = default;

    bool matches(const IpAddr& ip) const
    {
        switch (kind) {
        case Kind::any:
            return true;
        case Kind::single:
        case Kind::cidr:
            return net.contains(ip);
        case Kind::variable: {
            bool in = false;
            for (const auto& n : resolved)
                if (n.contains(ip)) {
                    in = true;
                    break;
                }
            return negated ? !in : in;
        }
        }
        return false;
    }
};

struct PortSpec {
    enum class Kind { any, single, range };

    Kind kind = Kind::any;
    std::uint16_t lo = 0;
    std::uint16_t hi = 0;

    bool operator==(const PortSpec&) const = default;

    bool matches(std::optional<std::uint16_t> port) const
    {
        if (kind == Kind::any)
            return true;
        if (!port)
            return false;
        return *port >= lo && *port <= hi;
    }
};

struct RuleHeader {
    RuleProto protocol = RuleProto::ip;
    AddressSpec src;
    PortSpec src_port;
    bool bidirectional = false;
    AddressSpec dst;
    PortSpec dst_port;

    bool operator==(const RuleHeader&) const = default;
};

struct ContentPattern {
    Bytes pattern;
    bool nocase = false;

    bool operator==(const ContentPattern&) const = default;
};

struct RuleOptions {
    std::string msg;
    std::uint32_t sid = 0;
    std::uint32_t gid = 1;
    std::uint32_t rev = 1;
    std::optional<std::string> classtype;
    std::optional<std::uint32_t> priority;
    std::vector<ContentPattern> contents;

    bool operator==(const RuleOptions&) const = default;
};

struct Rule {
    RuleHeader header;
    RuleOptions options;
    bool enabled = true;

    bool operator==(const Rule&) const = default;
};

struct RuleSet {
    std::vector<Rule> rules;
    Variables variables;

    Rule* find(std::uint32_t gid, std::uint32_t sid)
    {
        for (auto& r : rules)
            if (r.options.gid == gid && r.options.sid == sid)
                return &r;
        return nullptr;
    }

    const Rule* find(std::uint32_t gid, std::uint32_t sid) const
    {
        return const_cast<RuleSet*>(this)->find(gid, sid);
    }
};

namespace detail {

class RuleScanner {
public:
    RuleScanner(std::string_view text, std::size_t line) : text_(text), line_(line) {}

    [[noreturn]] void fail(const std::string& what) const
    {
        throw SyntaxError(line_, pos_ + 1, what);
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
            ++pos_;
    }

    bool eof()
    {
        skip_ws();
        return pos_ >= text_.size();
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    char take()
    {
        if (pos_ >= text_.size())
            fail("unexpected end of rule");
        return text_[pos_++];
    }

    void expect(char c)
    {
        if (peek() != c)
            fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    // token up to whitespace or one of the stop characters
    std::string word(std::string_view stop = "")
    {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || stop.find(c) != std::string_view::npos)
                break;
            ++pos_;
        }
        if (pos_ == start)
            fail("expected a token");
        return std::string(text_.substr(start, pos_ - start));
    }

    std::size_t pos() const { return pos_; }
    std::size_t line() const { return line_; }

private:
    std::string_view text_;
    std::size_t line_;
    std::size_t pos_ = 0;
};

inline std::uint32_t parse_u32(RuleScanner& s, const std::string& text)
{
    if (text.empty())
        s.fail("expected a number");
    std::uint64_t v = 0;
    for (char c : text) {
        if (c < '0' || c > '9')
            s.fail("bad number '" + text + "'");
        v = v * 10 + static_cast<std::uint64_t>(c - '0');
        if (v > 0xffffffffull)
            s.fail("number out of range");
    }
    return static_cast<std::uint32_t>(v);
}

inline AddressSpec parse_address_spec(RuleScanner& s, const Variables& vars)
{
    std::string tok = s.word();
    AddressSpec spec;
    if (tok == "any") {
        spec.kind = AddressSpec::Kind::any;
        return spec;
    }
    if (tok[0] == '$') {
        std::string name = tok.substr(1);
        auto it = vars.defs.find(name);
        if (it == vars.defs.end())
            throw UnknownVariable(name);
        spec.kind = AddressSpec::Kind::variable;
        spec.var_name = name;
        spec.resolved = it->second.nets;
        spec.negated = it->second.negated;
        return spec;
    }
    auto cidr = Cidr::parse(tok);
    if (!cidr)
        s.fail("bad address '" + tok + "'");
    spec.kind = (tok.find('/') == std::string::npos) ? AddressSpec::Kind::single
                                                     : AddressSpec::Kind::cidr;
    spec.net = *cidr;
    return spec;
}

inline PortSpec parse_port_spec(RuleScanner& s)
{
    std::string tok = s.word();
    PortSpec spec;
    if (tok == "any") {
        spec.kind = PortSpec::Kind::any;
        return spec;
    }
    auto colon = tok.find(':');
    auto to_port = [&](const std::string& t) -> std::uint16_t {
        std::uint32_t v = parse_u32(s, t);
        if (v > 65535)
            s.fail("port out of range '" + t + "'");
        return static_cast<std::uint16_t>(v);
    };
    if (colon == std::string::npos) {
        spec.kind = PortSpec::Kind::single;
        spec.lo = spec.hi = to_port(tok);
        return spec;
    }
    spec.kind = PortSpec::Kind::range;
    spec.lo = to_port(tok.substr(0, colon));
    spec.hi = to_port(tok.substr(colon + 1));
    if (spec.lo > spec.hi)
        s.fail("empty port range '" + tok + "'");
    return spec;
}

// Quoted option value; |..| spans inside the quotes are hex bytes.
inline Bytes parse_quoted_bytes(RuleScanner& s)
{
    s.skip_ws();
    s.expect('"');
    Bytes out;
    bool in_hex = false;
    int nibble = -1;
    for (;;) {
        char c = s.take();
        if (in_hex) {
            if (c == '|') {
                if (nibble >= 0)
                    s.fail("odd hex digit count in content");
                in_hex = false;
                continue;
            }
            if (c == ' ')
                continue;
            int d;
            if (c >= '0' && c <= '9') d = c - '0';
            else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
            else {
                s.fail("bad hex digit in content");
                d = 0;
            }
            if (nibble < 0) {
                nibble = d;
            } else {
                out.push_back(static_cast<std::uint8_t>(nibble * 16 + d));
                nibble = -1;
            }
            continue;
        }
        if (c == '"')
            break;
        if (c == '|') {
            in_hex = true;
            nibble = -1;
            continue;
        }
        if (c == '\\') {
            char e = s.take();
            if (e != '"' && e != '\\' && e != '|' && e != ';' && e != ':')
                s.fail(std::string("bad escape '\\") + e + "'");
            out.push_back(static_cast<std::uint8_t>(e));
            continue;
        }
        out.push_back(static_cast<std::uint8_t>(c));
    }
    return out;
}

} // namespace detail

// Parse one logical rule line (continuations already joined).
inline Rule parse_rule(std::string_view text, const Variables& vars, std::size_t line_no = 1)
{
    detail::RuleScanner s(text, line_no);

    std::string action = s.word();
    if (action != "alert")
        s.fail("unsupported action '" + action + "'");

    Rule rule;
    std::string proto = s.word();
    if (proto == "tcp") rule.header.protocol = RuleProto::tcp;
    else if (proto == "udp") rule.header.protocol = RuleProto::udp;
    else if (proto == "icmp") rule.header.protocol = RuleProto::icmp;
    else if (proto == "ip") rule.header.protocol = RuleProto::ip;
    else s.fail("unsupported protocol '" + proto + "'");

    rule.header.src = detail::parse_address_spec(s, vars);
    rule.header.src_port = detail::parse_port_spec(s);
    std::string dir = s.word();
    if (dir == "->") rule.header.bidirectional = false;
    else if (dir == "<>") rule.header.bidirectional = true;
    else s.fail("expected '->' or '<>', got '" + dir + "'");
    rule.header.dst = detail::parse_address_spec(s, vars);
    rule.header.dst_port = detail::parse_port_spec(s);

    s.skip_ws();
    s.expect('(');

    bool have_sid = false;
    for (;;) {
        s.skip_ws();
        if (s.peek() == ')') {
            s.take();
            break;
        }
        std::string key = s.word(":;)");
        s.skip_ws();
        if (key == "nocase") {
            if (rule.options.contents.empty())
                s.fail("nocase without a preceding content");
            rule.options.contents.back().nocase = true;
        } else if (key == "msg") {
            s.expect(':');
            Bytes v = detail::parse_quoted_bytes(s);
            // msg lands in tab-separated logs and '|'-separated block state
            for (std::uint8_t b : v)
                if (b < 0x20 || b == 0x7f || b == '|')
                    s.fail("msg must be printable text without '|'");
            rule.options.msg.assign(v.begin(), v.end());
        } else if (key == "content") {
            s.expect(':');
            ContentPattern pat;
            pat.pattern = detail::parse_quoted_bytes(s);
            if (pat.pattern.empty())
                s.fail("empty content pattern");
            rule.options.contents.push_back(std::move(pat));
        } else if (key == "sid") {
            s.expect(':');
            rule.options.sid = detail::parse_u32(s, s.word(";)"));
            have_sid = true;
        } else if (key == "gid") {
            s.expect(':');
            rule.options.gid = detail::parse_u32(s, s.word(";)"));
        } else if (key == "rev") {
            s.expect(':');
            rule.options.rev = detail::parse_u32(s, s.word(";)"));
        } else if (key == "priority") {
            s.expect(':');
            rule.options.priority = detail::parse_u32(s, s.word(";)"));
        } else if (key == "classtype") {
            s.expect(':');
            rule.options.classtype = s.word(";)");
        } else {
            s.fail("unsupported option '" + key + "'");
        }
        s.skip_ws();
        if (s.peek() == ';') {
            s.take();
            continue;
        }
        if (s.peek() == ')') {
            s.take();
            break;
        }
        s.fail("expected ';' or ')' after option");
    }
    if (!s.eof())
        s.fail("trailing characters after rule");
    if (!have_sid)
        s.fail("rule has no sid");
    return rule;
}

namespace detail {

// Variable definition line: NAME = [!]value(,value)*  where value is a CIDR
// or (after '!') another variable name.
inline void parse_variable_line(std::string_view line, std::size_t line_no, Variables& vars)
{
    auto eq = line.find('=');
    RuleScanner s(line, line_no);
    std::string name;
    {
        auto end = line.find_first_of(" \t=");
        name = std::string(line.substr(0, end));
    }
    if (name.empty() || eq == std::string_view::npos)
        throw SyntaxError(line_no, 1, "expected NAME = value");
    std::string_view value = line.substr(eq + 1);
    while (!value.empty() && (value.front() == ' ' || value.front() == '\t'))
        value.remove_prefix(1);
    while (!value.empty() && (value.back() == ' ' || value.back() == '\t'))
        value.remove_suffix(1);
    Variables::Def def;
    if (!value.empty() && value.front() == '!') {
        if (name != "EXTERNAL_NET")
            throw SyntaxError(line_no, eq + 2, "negation is only supported for EXTERNAL_NET");
        def.negated = true;
        value.remove_prefix(1);
    }
    if (!value.empty() && (std::isalpha(static_cast<unsigned char>(value.front())) || value.front() == '_') &&
        value.find('.') == std::string_view::npos && value.find(':') == std::string_view::npos) {
        // reference to an earlier variable
        std::string ref(value);
        if (ref.front() == '$')
            ref.erase(0, 1);
        auto it = vars.defs.find(ref);
        if (it == vars.defs.end())
            throw UnknownVariable(ref);
        def.nets = it->second.nets;
        def.negated = def.negated != it->second.negated;
    } else {
        std::size_t start = 0;
        std::string val(value);
        while (start <= val.size()) {
            auto comma = val.find(',', start);
            std::string item = val.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!item.empty()) {
                auto cidr = Cidr::parse(item);
                if (!cidr)
                    throw SyntaxError(line_no, eq + 2, "bad network '" + item + "'");
                def.nets.push_back(*cidr);
            }
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
        if (def.nets.empty())
            throw SyntaxError(line_no, eq + 2, "empty network list");
    }
    vars.defs[name] = std::move(def);
}

} // namespace detail

// Whole rules file: '#' comments and blank lines skipped, backslash
// continuations joined, variable definitions applied in order, every rule
// initially enabled.
inline RuleSet parse_ruleset(std::string_view text, Variables initial = {})
{
    RuleSet set;
    set.variables = std::move(initial);

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string line(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        std::size_t logical_line = line_no;
        while (!line.empty() && line.back() == '\\' && pos <= text.size()) {
            line.pop_back();
            std::size_t nl2 = text.find('\n', pos);
            line += std::string(text.substr(pos, nl2 == std::string_view::npos ? std::string_view::npos : nl2 - pos));
            pos = (nl2 == std::string_view::npos) ? text.size() + 1 : nl2 + 1;
            ++line_no;
        }
        std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        if (line[first] == '#')
            continue;
        std::string trimmed = line.substr(first);
        while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' ' || trimmed.back() == '\t'))
            trimmed.pop_back();
        if (!trimmed.starts_with("alert ") && trimmed.find('=') != std::string::npos) {
            detail::parse_variable_line(trimmed, logical_line, set.variables);
            continue;
        }
        Rule rule = parse_rule(trimmed, set.variables, logical_line);
        if (set.find(rule.options.gid, rule.options.sid))
            throw DuplicateSid(rule.options.gid, rule.options.sid);
        set.rules.push_back(std::move(rule));
    }
    return set;
}

inline void set_rule_enabled(RuleSet& set, std::uint32_t gid, std::uint32_t sid, bool enabled)
{
    Rule* r = set.find(gid, sid);
    if (!r)
        throw UnknownRule(gid, sid);
    r->enabled = enabled;
}

namespace detail {

inline bool payload_contains(const Bytes& haystack, const ContentPattern& pat)
{
    if (pat.pattern.size() > haystack.size())
        return false;
    auto lower = [](std::uint8_t c) -> std::uint8_t {
        return (c >= 'A' && c <= 'Z') ? static_cast<std::uint8_t>(c + 32) : c;
    };
    for (std::size_t i = 0; i + pat.pattern.size() <= haystack.size(); ++i) {
        bool hit = true;
        for (std::size_t j = 0; j < pat.pattern.size(); ++j) {
            std::uint8_t a = haystack[i + j], b = pat.pattern[j];
            if (pat.nocase) {
                a = lower(a);
                b = lower(b);
            }
            if (a != b) {
                hit = false;
                break;
            }
        }
        if (hit)
            return true;
    }
    return false;
}

} // namespace detail

// Pure clause check; callers are responsible for honoring rule.enabled
// (the pipeline skips disabled rules before calling this).
inline bool match_rule(const Rule& rule, const DecodedPacket& pkt)
{
    if (!pkt.ip || !pkt.transport)
        return false;
    const auto& h = rule.header;
    const auto& t = *pkt.transport;
    switch (h.protocol) {
    case RuleProto::tcp:
        if (t.kind != TransportKind::tcp)
            return false;
        break;
    case RuleProto::udp:
        if (t.kind != TransportKind::udp)
            return false;
        break;
    case RuleProto::icmp:
        if (t.kind != TransportKind::icmp && t.kind != TransportKind::icmpv6)
            return false;
        break;
    case RuleProto::ip:
        break;
    }

    auto oriented = [&](bool forward) {
        const IpAddr& a = forward ? pkt.ip->src_ip : pkt.ip->dst_ip;
        const IpAddr& b = forward ? pkt.ip->dst_ip : pkt.ip->src_ip;
        auto ap = forward ? t.src_port : t.dst_port;
        auto bp = forward ? t.dst_port : t.src_port;
        return h.src.matches(a) && h.src_port.matches(ap) && h.dst.matches(b) &&
               h.dst_port.matches(bp);
    };
    if (!oriented(true) && !(h.bidirectional && oriented(false)))
        return false;

    for (const auto& pat : rule.options.contents)
        if (!detail::payload_contains(t.payload, pat))
            return false;
    return true;
}

namespace detail {

inline std::string render_content_bytes(const Bytes& bytes)
{
    std::string out;
    bool in_hex = false;
    char buf[4];
    for (std::uint8_t b : bytes) {
        bool printable = b >= 0x20 && b < 0x7f && b != '"' && b != '\\' && b != '|';
        if (printable) {
            if (in_hex) {
                out += '|';
                in_hex = false;
            }
            out += static_cast<char>(b);
        } else if (b == '"' || b == '\\' || b == '|') {
            if (in_hex) {
                out += '|';
                in_hex = false;
            }
            out += '\\';
            out += static_cast<char>(b);
        } else {
            if (!in_hex) {
                out += '|';
                in_hex = true;
            } else {
                out += ' ';
            }
            std::snprintf(buf, sizeof(buf), "%02X", b);
            out += buf;
        }
    }
    if (in_hex)
        out += '|';
    return out;
}

inline std::string to_string(const AddressSpec& s)
{
    switch (s.kind) {
    case AddressSpec::Kind::any:
        return "any";
    case AddressSpec::Kind::single:
        return s.net.base.to_string();
    case AddressSpec::Kind::cidr:
        return s.net.to_string();
    case AddressSpec::Kind::variable:
        return "$" + s.var_name;
    }
    return "any";
}

inline std::string to_string(const PortSpec& s)
{
    switch (s.kind) {
    case PortSpec::Kind::any:
        return "any";
    case PortSpec::Kind::single:
        return std::to_string(s.lo);
    case PortSpec::Kind::range:
        return std::to_string(s.lo) + ":" + std::to_string(s.hi);
    }
    return "any";
}

} // namespace detail

inline const char* to_string(RuleProto p)
{
    switch (p) {
    case RuleProto::tcp: return "tcp";
    case RuleProto::udp: return "udp";
    case RuleProto::icmp: return "icmp";
    case RuleProto::ip: return "ip";
    }
    return "ip";
}

// Canonical single-line rendering; parse(to_string(r)) == r.
inline std::string to_string(const Rule& rule)
{
    std::string out = "alert ";
    out += to_string(rule.header.protocol);
    out += ' ';
    out += detail::to_string(rule.header.src);
    out += ' ';
    out += detail::to_string(rule.header.src_port);
    out += rule.header.bidirectional ? " <> " : " -> ";
    out += detail::to_string(rule.header.dst);
    out += ' ';
    out += detail::to_string(rule.header.dst_port);
    out += " (msg:\"";
    out += detail::render_content_bytes(Bytes(rule.options.msg.begin(), rule.options.msg.end()));
    out += "\"; ";
    for (const auto& pat : rule.options.contents) {
        out += "content:\"" + detail::render_content_bytes(pat.pattern) + "\"; ";
        if (pat.nocase)
            out += "nocase; ";
    }
    if (rule.options.classtype)
        out += "classtype:" + *rule.options.classtype + "; ";
    if (rule.options.priority)
        out += "priority:" + std::to_string(*rule.options.priority) + "; ";
    out += "gid:" + std::to_string(rule.options.gid) + "; ";
    out += "sid:" + std::to_string(rule.options.sid) + "; ";
    out += "rev:" + std::to_string(rule.options.rev) + ";)";
    return out;
}

} // namespace netsentry
