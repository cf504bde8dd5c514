#ifndef PERSENT_DATASET_HPP
#define PERSENT_DATASET_HPP

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "persent/corpus.hpp"
#include "persent/errors.hpp"

// The flat dataset that every pipeline stage reads and writes: one labeled
// sentence per line, TAB-separated `label<TAB>source_id<TAB>text`. Lines
// starting with '#' are comments; `# meta: key=value` comments carry the
// stage tags (label scheme, split, preprocessed flag).

namespace persent::data {

enum class Scheme { five_class, ternary, binary };

inline std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::five_class: return "five_class";
        case Scheme::ternary: return "ternary";
        case Scheme::binary: return "binary";
    }
    return "?";
}

inline Scheme parse_scheme(std::string_view s) {
    if (s == "five_class") return Scheme::five_class;
    if (s == "ternary") return Scheme::ternary;
    if (s == "binary") return Scheme::binary;
    throw DataError("unknown label scheme: " + std::string(s));
}

struct Row {
    int label = 0;
    std::string source_id;
    std::string text;

    friend bool operator==(const Row& a, const Row& b) {
        return a.label == b.label && a.source_id == b.source_id && a.text == b.text;
    }
};

struct Dataset {
    std::vector<Row> rows;
    std::map<std::string, std::string> meta;

    Scheme scheme() const {
        auto it = meta.find("scheme");
        return it == meta.end() ? Scheme::five_class : parse_scheme(it->second);
    }
    void set_scheme(Scheme s) { meta["scheme"] = scheme_name(s); }

    bool is_test_split() const {
        auto it = meta.find("split");
        return it != meta.end() && it->second == "test";
    }
    bool preprocessed() const {
        auto it = meta.find("preprocessed");
        return it != meta.end() && it->second == "1";
    }

    std::size_t size() const { return rows.size(); }
    bool empty() const { return rows.empty(); }

    std::map<int, std::size_t> label_counts() const {
        std::map<int, std::size_t> c;
        for (const auto& r : rows) ++c[r.label];
        return c;
    }

    // Distinct labels in ascending order.
    std::vector<int> labels_present() const {
        std::vector<int> out;
        for (const auto& [label, n] : label_counts())
            if (n > 0) out.push_back(label);
        return out;
    }
};

// Class-index mapping used by all models: contiguous [0, C) per scheme.
struct ClassMap {
    Scheme scheme;
    std::size_t num_classes;

    static ClassMap for_scheme(Scheme s) {
        switch (s) {
            case Scheme::five_class: return {s, 5};
            case Scheme::ternary: return {s, 3};
            case Scheme::binary: return {s, 2};
        }
        return {Scheme::five_class, 5};
    }

    std::size_t index_of(int label) const {
        switch (scheme) {
            case Scheme::five_class:
                if (label < -2 || label > 2) throw DataError("label out of range");
                return static_cast<std::size_t>(label + 2);
            case Scheme::ternary:
                if (label < -1 || label > 1) throw DataError("label out of range");
                return static_cast<std::size_t>(label + 1);
            case Scheme::binary:
                if (label != -1 && label != 1) throw DataError("label out of range");
                return label < 0 ? 0 : 1;
        }
        throw DataError("bad scheme");
    }

    int label_of(std::size_t index) const {
        switch (scheme) {
            case Scheme::five_class: return static_cast<int>(index) - 2;
            case Scheme::ternary: return static_cast<int>(index) - 1;
            case Scheme::binary: return index == 0 ? -1 : 1;
        }
        return 0;
    }
};

namespace detail {

inline std::string sanitize_field(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    return out;
}

inline std::string format_label(int label) {
    return label > 0 ? "+" + std::to_string(label) : std::to_string(label);
}

inline bool parse_label(std::string_view s, int& out) {
    if (s.empty()) return false;
    std::size_t i = 0;
    int sign = 1;
    if (s[0] == '+' || s[0] == '-') {
        sign = s[0] == '-' ? -1 : 1;
        i = 1;
    }
    if (i >= s.size()) return false;
    long v = 0;
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        v = v * 10 + (s[i] - '0');
        if (v > 100) return false;
    }
    out = static_cast<int>(sign * v);
    return true;
}

}  // namespace detail

using detail::format_label;

inline void write_dataset(const Dataset& ds, std::ostream& out) {
    for (const auto& [k, v] : ds.meta)
        out << "# meta: " << k << "=" << v << "\n";
    for (const auto& r : ds.rows) {
        out << detail::format_label(r.label) << '\t'
            << detail::sanitize_field(r.source_id) << '\t'
            << detail::sanitize_field(r.text) << "\n";
    }
}

inline void write_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    write_dataset(ds, out);
    out.flush();
    if (!out) throw DataError("write failed: " + path);
}

inline Dataset read_dataset(std::istream& in, const std::string& name = "<stream>") {
    Dataset ds;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string_view v(line);
            constexpr std::string_view kMeta = "# meta: ";
            if (v.substr(0, kMeta.size()) == kMeta) {
                std::string_view kv = v.substr(kMeta.size());
                std::size_t eq = kv.find('=');
                if (eq != std::string_view::npos)
                    ds.meta[std::string(kv.substr(0, eq))] =
                        std::string(kv.substr(eq + 1));
            }
            continue;
        }
        std::size_t t1 = line.find('\t');
        std::size_t t2 = t1 == std::string::npos ? std::string::npos
                                                 : line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos)
            throw DataError(name + ":" + std::to_string(line_no) +
                            ": record needs label<TAB>source_id<TAB>text");
        Row r;
        if (!detail::parse_label(std::string_view(line).substr(0, t1), r.label))
            throw DataError(name + ":" + std::to_string(line_no) +
                            ": bad label field \"" + line.substr(0, t1) + "\"");
        if (r.label < corpus::EmotionRank::kMin || r.label > corpus::EmotionRank::kMax)
            throw DataError(name + ":" + std::to_string(line_no) +
                            ": label out of range: " + std::to_string(r.label));
        r.source_id = line.substr(t1 + 1, t2 - t1 - 1);
        r.text = line.substr(t2 + 1);
        ds.rows.push_back(std::move(r));
    }
    return ds;
}

inline Dataset read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open for reading: " + path);
    return read_dataset(in, path);
}

inline Dataset from_sentences(const std::vector<corpus::AnnotatedSentence>& sents) {
    Dataset ds;
    ds.set_scheme(Scheme::five_class);
    ds.rows.reserve(sents.size());
    for (const auto& s : sents)
        ds.rows.push_back({s.label.value(), s.source_id, s.text});
    return ds;
}

inline std::vector<corpus::AnnotatedSentence> to_sentences(const Dataset& ds) {
    if (ds.scheme() != Scheme::five_class)
        throw DataError("dataset is not five-class");
    std::vector<corpus::AnnotatedSentence> out;
    out.reserve(ds.rows.size());
    for (const auto& r : ds.rows)
        out.emplace_back(r.text, corpus::EmotionRank(r.label), r.source_id);
    return out;
}

// Whitespace tokens of a preprocessed row.
inline std::vector<std::string> tokens_of(const std::string& text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ' ') {
            if (i > start) out.push_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace persent::data

#endif  // PERSENT_DATASET_HPP
