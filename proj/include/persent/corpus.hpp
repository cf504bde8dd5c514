#ifndef PERSENT_CORPUS_HPP
#define PERSENT_CORPUS_HPP

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "persent/errors.hpp"
#include "persent/xml.hpp"

// Turns annotated review XML into a flat list of labeled sentences and
// computes per-emotion counts.

namespace persent::corpus {

// The five-point emotion scale: -2 furious .. +2 delighted.
class EmotionRank {
public:
    static constexpr int kMin = -2;
    static constexpr int kMax = 2;

    explicit EmotionRank(int value) : value_(value) {
        if (value < kMin || value > kMax)
            throw ConfigError("emotion rank out of range: " + std::to_string(value));
    }

    int value() const { return value_; }

    static bool in_range(int v) { return v >= kMin && v <= kMax; }

    static std::optional<EmotionRank> parse(std::string_view s) {
        if (s.empty()) return std::nullopt;
        std::size_t i = 0;
        int sign = 1;
        if (s[0] == '+' || s[0] == '-') {
            sign = s[0] == '-' ? -1 : 1;
            i = 1;
        }
        if (i >= s.size()) return std::nullopt;
        long v = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9') return std::nullopt;
            v = v * 10 + (s[i] - '0');
            if (v > 1000) return std::nullopt;
        }
        v *= sign;
        if (!in_range(static_cast<int>(v))) return std::nullopt;
        return EmotionRank(static_cast<int>(v));
    }

    friend bool operator==(EmotionRank a, EmotionRank b) {
        return a.value_ == b.value_;
    }

private:
    int value_;
};

struct AnnotatedSentence {
    std::string text;       // raw sentence, may contain ZWNJ
    EmotionRank label;
    std::string source_id;  // document/sentence id from the XML

    AnnotatedSentence(std::string t, EmotionRank l, std::string id)
        : text(std::move(t)), label(l), source_id(std::move(id)) {}
};

struct CorpusStats {
    std::map<int, std::size_t> counts;  // emotion value -> sentence count
    std::size_t total = 0;
};

inline CorpusStats stats(const std::vector<AnnotatedSentence>& sentences) {
    CorpusStats s;
    for (int v = EmotionRank::kMin; v <= EmotionRank::kMax; ++v) s.counts[v] = 0;
    for (const auto& sent : sentences) {
        ++s.counts[sent.label.value()];
        ++s.total;
    }
    return s;
}

// Where to find sentences in the XML. `sentence_path` is a '/'-separated
// element-name path matched as a suffix of the open-element stack, so
// "Sentence" matches any <Sentence> and "Review/Sentence" only those directly
// under <Review>.
struct Schema {
    std::string sentence_path = "Sentence";
    std::string polarity_attribute = "Polarity";
    std::string id_attribute = "ID";
};

struct SkipRecord {
    std::size_t byte_offset;
    std::string source_id;
    std::string polarity;  // raw attribute value; empty when missing
    std::string reason;
};

struct ParseResult {
    std::vector<AnnotatedSentence> sentences;
    std::vector<SkipRecord> skipped;
    std::size_t matched_elements = 0;  // == sentences.size() + skipped.size()
};

namespace detail {

inline std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= path.size(); ++i) {
        if (i == path.size() || path[i] == '/') {
            if (i > start) parts.emplace_back(path.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (b < e && ws(s[b])) ++b;
    while (e > b && ws(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace detail

// Extracts every sentence element in document order. Elements whose polarity
// attribute is missing or outside the emotion scale are skipped and reported,
// never silently dropped. Throws XmlError on malformed input.
inline ParseResult parse_corpus(std::string_view xml_bytes,
                                const Schema& schema = Schema{}) {
    ParseResult result;
    std::vector<std::string> want = detail::split_path(schema.sentence_path);
    if (want.empty()) throw ConfigError("schema sentence_path is empty");

    std::vector<std::string> stack;
    // Per matched-element capture state; matched sentence elements may nest
    // in theory, so keep a small stack of captures.
    struct Capture {
        std::size_t depth;
        std::size_t offset;
        std::string id;
        std::string polarity;
        bool has_polarity;
        std::string text;
    };
    std::vector<Capture> captures;

    auto stack_matches = [&]() {
        if (stack.size() < want.size()) return false;
        for (std::size_t i = 0; i < want.size(); ++i)
            if (stack[stack.size() - want.size() + i] != want[i]) return false;
        return true;
    };

    xml::Handlers h;
    h.on_start = [&](const std::string& name, const std::vector<xml::Attribute>& attrs,
                     std::size_t offset) {
        stack.push_back(name);
        if (stack_matches()) {
            Capture c;
            c.depth = stack.size();
            c.offset = offset;
            c.has_polarity = false;
            for (const auto& a : attrs) {
                if (a.name == schema.polarity_attribute) {
                    c.polarity = a.value;
                    c.has_polarity = true;
                } else if (!schema.id_attribute.empty() &&
                           a.name == schema.id_attribute) {
                    c.id = a.value;
                }
            }
            ++result.matched_elements;
            captures.push_back(std::move(c));
        }
    };
    h.on_text = [&](const std::string& text, std::size_t) {
        if (!captures.empty()) captures.back().text += text;
    };
    h.on_end = [&](const std::string&, std::size_t) {
        if (!captures.empty() && captures.back().depth == stack.size()) {
            Capture c = std::move(captures.back());
            captures.pop_back();
            std::string id = c.id.empty()
                                 ? "#" + std::to_string(result.matched_elements)
                                 : c.id;
            std::string text = detail::trim(c.text);
            if (!c.has_polarity) {
                result.skipped.push_back(
                    {c.offset, id, "", "missing polarity attribute"});
            } else if (auto rank = EmotionRank::parse(c.polarity)) {
                if (text.empty()) {
                    result.skipped.push_back({c.offset, id, c.polarity, "empty text"});
                } else {
                    result.sentences.emplace_back(text, *rank, id);
                }
            } else {
                result.skipped.push_back(
                    {c.offset, id, c.polarity, "polarity out of range"});
            }
        }
        stack.pop_back();
    };

    xml::parse(xml_bytes, h);
    return result;
}

inline std::string skip_report(const ParseResult& r) {
    std::ostringstream out;
    out << "parsed=" << r.sentences.size() << " skipped=" << r.skipped.size()
        << " matched=" << r.matched_elements << "\n";
    for (const auto& s : r.skipped) {
        out << "skip id=" << s.source_id << " polarity=\"" << s.polarity
            << "\" reason=\"" << s.reason << "\" byte=" << s.byte_offset << "\n";
    }
    return out.str();
}

}  // namespace persent::corpus

#endif  // PERSENT_CORPUS_HPP
