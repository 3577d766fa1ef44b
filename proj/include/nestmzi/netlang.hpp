#pragma once

// Interferometer description language: parser, semantic validation, canonical
// serializer. The grammar is line-oriented; `#` starts a comment; every
// statement declares one element. Mirrors, phases and blocks sit inline on a
// named arm and are applied in file order. The literal `vac` names a fresh
// vacuum input port each time it appears; it is the only reusable arm name.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nestmzi/common.hpp"

namespace nestmzi {

struct VibrationSpec {
    double frequency_hz = 0.0;  // > 0
    double amplitude = 0.0;     // deflection as a fraction of the beam width, >= 0
    double phase = 0.0;         // radians
};

struct BeamSpec {
    double width = 1.0;  // amplitude-profile standard deviation, > 0
};

enum class ElementKind : std::uint8_t { source, bs, mirror, phase, block, detector };

enum class DetectorKind : std::uint8_t { quadcell, bucket };

struct Element {
    ElementKind kind{};
    int line = 0;  // source line of the declaring statement, for diagnostics
    std::string name;
    // bs: r is the reflection magnitude; t = sqrt(1 - r^2) is implied.
    double r = 0.0;
    // phase: angle in radians.
    double angle = 0.0;
    std::optional<VibrationSpec> vibration;  // mirror only
    DetectorKind detector_kind = DetectorKind::quadcell;
    // source: out_arms[0]; bs: in_arms[0..1], out_arms[0..1];
    // mirror/phase/block/detector: in_arms[0] names the arm they sit on.
    std::vector<std::string> in_arms;
    std::vector<std::string> out_arms;
};

struct NetworkSpec {
    BeamSpec beam;
    std::vector<Element> elements;  // file order

    const Element* find(std::string_view name) const {
        for (const auto& e : elements)
            if (e.name == name) return &e;
        return nullptr;
    }
};

// Parse/semantic failure with source position. Lines and columns are
// 1-based; semantic errors that have no single token carry the line of the
// offending statement and column 1.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, int col, const std::string& message)
        : std::runtime_error(format(line, col, message)), line_(line), col_(col), message_(message) {}

    int line() const { return line_; }
    int col() const { return col_; }
    const std::string& message() const { return message_; }

private:
    static std::string format(int line, int col, const std::string& m) {
        return "line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + m;
    }
    int line_;
    int col_;
    std::string message_;
};

namespace detail {

struct Token {
    std::string_view text;
    int col;  // 1-based
};

// Splits one statement into identifiers/numbers and single-char punctuation.
// `->` is kept as one token. Throws on bytes that fit neither class.
inline std::vector<Token> tokenize_line(std::string_view line, int line_no) {
    std::vector<Token> out;
    std::size_t i = 0;
    const auto word_char = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '.' || c == '+' || c == '-' || c == 'e' || c == 'E';
    };
    while (i < line.size()) {
        const char c = line[i];
        if (c == '#') break;
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
            out.push_back({line.substr(i, 2), static_cast<int>(i) + 1});
            i += 2;
            continue;
        }
        if (c == ',' || c == ':' || c == '(' || c == ')' || c == '=') {
            out.push_back({line.substr(i, 1), static_cast<int>(i) + 1});
            ++i;
            continue;
        }
        if (word_char(c)) {
            std::size_t j = i;
            while (j < line.size() && word_char(line[j])) {
                // `->` terminates a word so `a->b` splits correctly
                if (line[j] == '-' && j + 1 < line.size() && line[j + 1] == '>') break;
                ++j;
            }
            out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
            i = j;
            continue;
        }
        throw ParseError(line_no, static_cast<int>(i) + 1,
                         "unexpected character '" + std::string(1, c) + "'");
    }
    return out;
}

// Cursor over one statement's tokens with expected-token diagnostics.
class Cursor {
public:
    Cursor(const std::vector<Token>& toks, int line) : toks_(toks), line_(line) {}

    bool done() const { return pos_ >= toks_.size(); }

    const Token& peek() const {
        if (done()) throw ParseError(line_, end_col(), "unexpected end of statement");
        return toks_[pos_];
    }

    Token take() {
        const Token& t = peek();
        ++pos_;
        return t;
    }

    Token expect(std::string_view text) {
        if (done())
            throw ParseError(line_, end_col(),
                             "unexpected end of statement, expected '" + std::string(text) + "'");
        const Token t = toks_[pos_];
        if (t.text != text)
            throw ParseError(line_, t.col,
                             "expected '" + std::string(text) + "', got '" + std::string(t.text) + "'");
        ++pos_;
        return t;
    }

    bool accept(std::string_view text) {
        if (!done() && toks_[pos_].text == text) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string expect_name(const char* what) {
        if (done())
            throw ParseError(line_, end_col(),
                             std::string("unexpected end of statement, expected ") + what);
        const Token t = take();
        const char c = t.text.empty() ? '\0' : t.text.front();
        const bool name_start =
            (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
        if (!name_start)
            throw ParseError(line_, t.col,
                             std::string("expected ") + what + ", got '" + std::string(t.text) + "'");
        return std::string(t.text);
    }

    double expect_number(const char* what) {
        if (done())
            throw ParseError(line_, end_col(),
                             std::string("unexpected end of statement, expected ") + what);
        const Token t = take();
        double value = 0.0;
        const char* first = t.text.data();
        const char* last = t.text.data() + t.text.size();
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last || !std::isfinite(value))
            throw ParseError(line_, t.col,
                             std::string("expected ") + what + ", got '" + std::string(t.text) + "'");
        return value;
    }

    void expect_end() {
        if (!done())
            throw ParseError(line_, toks_[pos_].col,
                             "unexpected trailing token '" + std::string(toks_[pos_].text) + "'");
    }

    int line() const { return line_; }

private:
    int end_col() const { return toks_.empty() ? 1 : toks_.back().col + static_cast<int>(toks_.back().text.size()); }
    const std::vector<Token>& toks_;
    int line_;
    std::size_t pos_ = 0;
};

// key=value parameter list between parentheses; `keys` maps each permitted
// key to a found-flag so unknown and duplicate keys become errors.
inline std::map<std::string, double> parse_params(Cursor& cur,
                                                  const std::vector<std::string>& allowed,
                                                  const std::vector<std::string>& unit_after) {
    std::map<std::string, double> out;
    cur.expect("(");
    bool first = true;
    while (!cur.accept(")")) {
        if (!first) cur.expect(",");
        first = false;
        const Token key_tok = cur.peek();
        const std::string key = cur.expect_name("parameter name");
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ParseError(cur.line(), key_tok.col, "unknown parameter '" + key + "'");
        if (out.count(key))
            throw ParseError(cur.line(), key_tok.col, "duplicate parameter '" + key + "'");
        cur.expect("=");
        out[key] = cur.expect_number(("value for '" + key + "'").c_str());
        if (std::find(unit_after.begin(), unit_after.end(), key) != unit_after.end())
            cur.expect("Hz");
    }
    return out;
}

inline std::string format_double(double v) {
    // shortest decimal that round-trips, for canonical serialization
    std::array<char, 40> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

}  // namespace detail

inline NetworkSpec parse_network(std::string_view text) {
    NetworkSpec spec;
    bool beam_seen = false;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto toks = detail::tokenize_line(line, line_no);
        if (toks.empty()) continue;
        detail::Cursor cur(toks, line_no);
        const detail::Token head = cur.peek();
        const std::string kw = cur.expect_name("statement keyword");

        Element e;
        e.line = line_no;
        if (kw == "beam") {
            if (beam_seen) throw ParseError(line_no, head.col, "duplicate beam declaration");
            beam_seen = true;
            const auto p = detail::parse_params(cur, {"width"}, {});
            if (!p.count("width")) throw ParseError(line_no, head.col, "beam requires width");
            spec.beam.width = p.at("width");
            if (!(spec.beam.width > 0.0))
                throw ParseError(line_no, head.col, "beam width must be > 0");
            cur.expect_end();
            continue;
        } else if (kw == "source") {
            e.kind = ElementKind::source;
            e.name = cur.expect_name("source name");
            cur.expect("->");
            e.out_arms.push_back(cur.expect_name("output arm name"));
        } else if (kw == "bs") {
            e.kind = ElementKind::bs;
            e.name = cur.expect_name("beam splitter name");
            e.r = 1.0 / std::sqrt(2.0);
            if (cur.peek().text == "(") {
                const auto p = detail::parse_params(cur, {"r"}, {});
                if (!p.count("r")) throw ParseError(line_no, head.col, "empty parameter list");
                e.r = p.at("r");
                if (!(e.r >= 0.0 && e.r <= 1.0))
                    throw ParseError(line_no, head.col, "beam splitter r must lie in [0, 1]");
            }
            cur.expect("in");
            cur.expect(":");
            e.in_arms.push_back(cur.expect_name("input arm name"));
            cur.expect(",");
            e.in_arms.push_back(cur.expect_name("input arm name"));
            cur.expect("out");
            cur.expect(":");
            e.out_arms.push_back(cur.expect_name("output arm name"));
            cur.expect(",");
            e.out_arms.push_back(cur.expect_name("output arm name"));
        } else if (kw == "mirror") {
            e.kind = ElementKind::mirror;
            e.name = cur.expect_name("mirror name");
            cur.expect("on");
            e.in_arms.push_back(cur.expect_name("arm name"));
            if (!cur.done()) {
                const detail::Token vib_tok = cur.peek();
                const std::string v = cur.expect_name("'vibrate'");
                if (v != "vibrate")
                    throw ParseError(line_no, vib_tok.col, "expected 'vibrate', got '" + v + "'");
                const auto p = detail::parse_params(cur, {"f", "amp", "phase"}, {"f"});
                if (!p.count("f") || !p.count("amp"))
                    throw ParseError(line_no, vib_tok.col, "vibrate requires f and amp");
                VibrationSpec vs;
                vs.frequency_hz = p.at("f");
                vs.amplitude = p.at("amp");
                vs.phase = p.count("phase") ? p.at("phase") : 0.0;
                if (!(vs.frequency_hz > 0.0))
                    throw ParseError(line_no, vib_tok.col, "vibration frequency must be > 0");
                if (!(vs.amplitude >= 0.0))
                    throw ParseError(line_no, vib_tok.col, "vibration amplitude must be >= 0");
                e.vibration = vs;
            }
        } else if (kw == "phase") {
            e.kind = ElementKind::phase;
            e.name = cur.expect_name("phase element name");
            cur.expect("on");
            e.in_arms.push_back(cur.expect_name("arm name"));
            cur.expect("(");
            e.angle = cur.expect_number("phase angle");
            cur.expect(")");
        } else if (kw == "block") {
            e.kind = ElementKind::block;
            e.name = cur.expect_name("block name");
            cur.expect("on");
            e.in_arms.push_back(cur.expect_name("arm name"));
        } else if (kw == "detector") {
            e.kind = ElementKind::detector;
            e.name = cur.expect_name("detector name");
            const detail::Token kind_tok = cur.peek();
            const std::string dk = cur.expect_name("detector kind");
            if (dk == "quadcell")
                e.detector_kind = DetectorKind::quadcell;
            else if (dk == "bucket")
                e.detector_kind = DetectorKind::bucket;
            else
                throw ParseError(line_no, kind_tok.col,
                                 "detector kind must be quadcell or bucket, got '" + dk + "'");
            cur.expect("on");
            e.in_arms.push_back(cur.expect_name("arm name"));
        } else {
            throw ParseError(line_no, head.col, "unknown statement keyword '" + kw + "'");
        }
        cur.expect_end();
        spec.elements.push_back(std::move(e));
    }
    return spec;
}

// ---------------------------------------------------------------------------
// Semantic validation

// One arm after validation: producer and optional consumer are node elements
// (source/bs/detector); chain lists the inline elements applied along the arm
// in file order. Vacuum arms have producer == -1 and carry zero amplitude.
struct ArmInfo {
    std::string name;
    int producer = -1;       // element index, -1 for vacuum
    int producer_port = 0;   // output slot on the producer
    int consumer = -1;       // element index, -1 when dangling
    int consumer_port = 0;   // input slot on the consumer
    std::vector<int> chain;  // inline element indices, file order
    bool vacuum = false;
};

struct ValidatedNetwork {
    NetworkSpec spec;
    std::vector<ArmInfo> arms;
    std::unordered_map<std::string, int> arm_index;  // vacuum arms excluded
    std::vector<int> node_order;   // topological order over source/bs/detector elements
    std::vector<std::vector<int>> cuts;  // live arm ids after each node in node_order
    std::vector<int> source_arms;  // arm ids fed by sources (node_order order)
    std::vector<int> vacuum_arms;  // arm ids for vac literals
    std::vector<int> dangling_arms;  // produced, never consumed: live outputs
    std::vector<int> detector_elems;  // element indices, file order
    std::vector<int> vibrating_mirrors;  // element indices with vibration, file order
    bool has_block = false;

    int arm_of(std::string_view name) const {
        const auto it = arm_index.find(std::string(name));
        if (it == arm_index.end()) throw domain_error("unknown arm '" + std::string(name) + "'");
        return it->second;
    }
};

inline ValidatedNetwork validate(const NetworkSpec& spec) {
    ValidatedNetwork vn;
    vn.spec = spec;

    std::unordered_map<std::string, int> elem_by_name;
    for (int i = 0; i < static_cast<int>(spec.elements.size()); ++i) {
        const auto& e = spec.elements[i];
        if (!elem_by_name.emplace(e.name, i).second)
            throw ParseError(e.line, 1, "duplicate element name '" + e.name + "'");
    }

    const auto arm_id = [&](const std::string& name, bool create_vacuum, int line) -> int {
        if (name == "vac") {
            if (!create_vacuum)
                throw ParseError(line, 1, "'vac' is reserved for beam splitter inputs");
            ArmInfo a;
            a.name = "vac";
            a.vacuum = true;
            vn.arms.push_back(a);
            vn.vacuum_arms.push_back(static_cast<int>(vn.arms.size()) - 1);
            return static_cast<int>(vn.arms.size()) - 1;
        }
        const auto it = vn.arm_index.find(name);
        if (it != vn.arm_index.end()) return it->second;
        ArmInfo a;
        a.name = name;
        vn.arms.push_back(a);
        vn.arm_index.emplace(name, static_cast<int>(vn.arms.size()) - 1);
        return static_cast<int>(vn.arms.size()) - 1;
    };

    // First pass: resolve arm producers/consumers/chains.
    for (int i = 0; i < static_cast<int>(spec.elements.size()); ++i) {
        const auto& e = spec.elements[i];
        switch (e.kind) {
            case ElementKind::source:
            case ElementKind::bs: {
                for (std::size_t p = 0; p < e.out_arms.size(); ++p) {
                    if (e.out_arms[p] == "vac")
                        throw ParseError(e.line, 1,
                                         "element '" + e.name + "': 'vac' cannot be an output arm");
                    const int a = arm_id(e.out_arms[p], false, e.line);
                    if (vn.arms[a].producer != -1)
                        throw ParseError(e.line, 1,
                                         "arm '" + vn.arms[a].name + "' has two producers ('" +
                                             spec.elements[vn.arms[a].producer].name + "' and '" +
                                             e.name + "')");
                    vn.arms[a].producer = i;
                    vn.arms[a].producer_port = static_cast<int>(p);
                }
                for (std::size_t p = 0; p < e.in_arms.size(); ++p) {
                    const int a = arm_id(e.in_arms[p], true, e.line);
                    if (vn.arms[a].consumer != -1)
                        throw ParseError(e.line, 1,
                                         "arm '" + vn.arms[a].name + "' is consumed twice ('" +
                                             spec.elements[vn.arms[a].consumer].name + "' and '" +
                                             e.name + "')");
                    vn.arms[a].consumer = i;
                    vn.arms[a].consumer_port = static_cast<int>(p);
                }
                break;
            }
            case ElementKind::mirror:
            case ElementKind::phase:
            case ElementKind::block: {
                if (e.in_arms[0] == "vac")
                    throw ParseError(e.line, 1, "element '" + e.name + "' cannot sit on 'vac'");
                const int a = arm_id(e.in_arms[0], false, e.line);
                vn.arms[a].chain.push_back(i);
                if (e.kind == ElementKind::mirror && e.vibration && e.vibration->amplitude > 0.0)
                    vn.vibrating_mirrors.push_back(i);
                if (e.kind == ElementKind::block) vn.has_block = true;
                break;
            }
            case ElementKind::detector: {
                if (e.in_arms[0] == "vac")
                    throw ParseError(e.line, 1, "detector '" + e.name + "' cannot sit on 'vac'");
                const int a = arm_id(e.in_arms[0], false, e.line);
                if (vn.arms[a].consumer != -1)
                    throw ParseError(e.line, 1,
                                     "arm '" + vn.arms[a].name + "' is consumed twice ('" +
                                         spec.elements[vn.arms[a].consumer].name + "' and '" +
                                         e.name + "')");
                vn.arms[a].consumer = i;
                vn.arms[a].consumer_port = 0;
                vn.detector_elems.push_back(i);
                break;
            }
        }
    }

    // Every non-vacuum arm must have a producer.
    for (const auto& a : vn.arms) {
        if (!a.vacuum && a.producer == -1) {
            const int ref = a.consumer != -1 ? a.consumer : (a.chain.empty() ? -1 : a.chain[0]);
            const int line = ref == -1 ? 1 : spec.elements[ref].line;
            throw ParseError(line, 1, "arm '" + a.name + "' is referenced but never produced");
        }
    }

    // Kahn topological sort over node elements; inline chains ride their arm.
    std::unordered_map<int, int> indegree;
    for (int i = 0; i < static_cast<int>(spec.elements.size()); ++i) {
        const auto& e = spec.elements[i];
        if (e.kind == ElementKind::source || e.kind == ElementKind::bs ||
            e.kind == ElementKind::detector)
            indegree[i] = 0;
    }
    for (const auto& a : vn.arms)
        if (a.producer != -1 && a.consumer != -1) ++indegree[a.consumer];

    std::vector<int> ready;
    for (int i = 0; i < static_cast<int>(spec.elements.size()); ++i)
        if (indegree.count(i) && indegree[i] == 0) ready.push_back(i);
    // process in file order for a deterministic topological order
    std::vector<int> live;  // arm ids currently produced and unconsumed
    std::size_t next = 0;
    while (next < ready.size()) {
        const int ei = ready[next++];
        vn.node_order.push_back(ei);
        const auto& e = spec.elements[ei];
        // consume inputs
        if (e.kind == ElementKind::bs || e.kind == ElementKind::detector) {
            for (const auto& arm_name : e.in_arms) {
                if (arm_name == "vac") continue;
                const int a = vn.arm_of(arm_name);
                live.erase(std::remove(live.begin(), live.end(), a), live.end());
            }
        }
        // produce outputs
        if (e.kind == ElementKind::source || e.kind == ElementKind::bs) {
            for (const auto& arm_name : e.out_arms) {
                const int a = vn.arm_of(arm_name);
                live.push_back(a);
                if (e.kind == ElementKind::source) vn.source_arms.push_back(a);
                const int consumer = vn.arms[a].consumer;
                if (consumer != -1 && --indegree[consumer] == 0) {
                    // keep ready queue sorted by element index for determinism
                    auto it = std::upper_bound(ready.begin() + static_cast<long>(next),
                                               ready.end(), consumer);
                    ready.insert(it, consumer);
                }
            }
        }
        vn.cuts.push_back(live);
    }

    std::size_t node_count = 0;
    for (const auto& e : spec.elements)
        if (e.kind == ElementKind::source || e.kind == ElementKind::bs ||
            e.kind == ElementKind::detector)
            ++node_count;
    if (vn.node_order.size() != node_count) {
        // point the diagnostic at the first node left out of the ordering
        const std::vector<int>& done = vn.node_order;
        for (int i = 0; i < static_cast<int>(spec.elements.size()); ++i) {
            if (!indegree.count(i)) continue;
            if (std::find(done.begin(), done.end(), i) == done.end())
                throw ParseError(spec.elements[i].line, 1, "network graph contains a cycle");
        }
        throw ParseError(1, 1, "network graph contains a cycle");
    }

    for (int a = 0; a < static_cast<int>(vn.arms.size()); ++a)
        if (!vn.arms[a].vacuum && vn.arms[a].consumer == -1) vn.dangling_arms.push_back(a);

    // A detector whose arm can never carry light is a wiring mistake.
    for (const int d : vn.detector_elems) {
        const int a = vn.arm_of(spec.elements[d].in_arms[0]);
        if (vn.arms[a].producer == -1)
            throw ParseError(spec.elements[d].line, 1,
                             "detector '" + spec.elements[d].name + "' is unreachable");
    }

    return vn;
}

// Returns a copy with every vibration amplitude multiplied by `factor`.
inline NetworkSpec scale_vibrations(NetworkSpec spec, double factor) {
    for (auto& e : spec.elements)
        if (e.vibration) e.vibration->amplitude *= factor;
    return spec;
}

// Canonical form: beam first, then elements in topological order with each
// arm's inline chain emitted right after the arm's producer. Numbers print
// as the shortest decimal that round-trips, so serialize is a fixpoint.
inline std::string serialize(const ValidatedNetwork& vn) {
    std::string out;
    out += "beam (width=" + detail::format_double(vn.spec.beam.width) + ")\n";
    const auto emit_inline = [&](int arm) {
        for (const int ci : vn.arms[arm].chain) {
            const auto& c = vn.spec.elements[ci];
            if (c.kind == ElementKind::mirror) {
                out += "mirror " + c.name + " on " + vn.arms[arm].name;
                if (c.vibration) {
                    out += " vibrate(f=" + detail::format_double(c.vibration->frequency_hz) +
                           " Hz, amp=" + detail::format_double(c.vibration->amplitude) +
                           ", phase=" + detail::format_double(c.vibration->phase) + ")";
                }
                out += "\n";
            } else if (c.kind == ElementKind::phase) {
                out += "phase " + c.name + " on " + vn.arms[arm].name + " (" +
                       detail::format_double(c.angle) + ")\n";
            } else {
                out += "block " + c.name + " on " + vn.arms[arm].name + "\n";
            }
        }
    };
    for (const int ei : vn.node_order) {
        const auto& e = vn.spec.elements[ei];
        switch (e.kind) {
            case ElementKind::source:
                out += "source " + e.name + " -> " + e.out_arms[0] + "\n";
                emit_inline(vn.arm_of(e.out_arms[0]));
                break;
            case ElementKind::bs:
                out += "bs " + e.name + " (r=" + detail::format_double(e.r) + ") in: " +
                       e.in_arms[0] + ", " + e.in_arms[1] + " out: " + e.out_arms[0] + ", " +
                       e.out_arms[1] + "\n";
                emit_inline(vn.arm_of(e.out_arms[0]));
                emit_inline(vn.arm_of(e.out_arms[1]));
                break;
            case ElementKind::detector:
                out += "detector " + e.name +
                       (e.detector_kind == DetectorKind::quadcell ? " quadcell on " : " bucket on ") +
                       e.in_arms[0] + "\n";
                break;
            default:
                break;  // inline elements are emitted with their arm
        }
    }
    return out;
}

inline std::string serialize(const NetworkSpec& spec) { return serialize(validate(spec)); }

// Structural equality up to element order (canonical serialization compares
// equal iff the validated graphs match).
inline bool equivalent(const NetworkSpec& a, const NetworkSpec& b) {
    return serialize(a) == serialize(b);
}

}  // namespace nestmzi
