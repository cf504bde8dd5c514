#ifndef PERSENT_PREPROCESS_HPP
#define PERSENT_PREPROCESS_HPP

#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "persent/dataset.hpp"
#include "persent/errors.hpp"
#include "persent/utf8.hpp"

// The five-step cleaning chain applied to every sentence, in this order:
//   1. normalize          (character unification, whitespace repair, ZWNJ)
//   2. punctuation removal
//   3. single-character token removal
//   4. digit removal
//   5. lemma substitution
// Tokenization is whitespace splitting between steps 1 and 2; ZWNJ never
// splits a token.

namespace persent::preprocess {

// --- normalization -------------------------------------------------------
//
// The normalizer applies a pinned rule list (see the tests for the exact
// contract); it is idempotent by construction:
//   a. Arabic variant letters are mapped to their Persian forms.
//   b. Maximal runs of separators (space, tab, CR, LF, NBSP, ZWNJ) collapse
//      to a single space if the run contains whitespace, else to one ZWNJ.
//   c. Leading/trailing separators are dropped.
//   d. A space joining a stem to a known suffix (ها های هایی تر ترین), or a
//      known prefix (می نمی) to its verb, becomes ZWNJ.

namespace detail {

inline char32_t map_char(char32_t cp) {
    switch (cp) {
        case 0x064A: return 0x06CC;  // ARABIC YEH -> FARSI YEH
        case 0x0649: return 0x06CC;  // ALEF MAKSURA -> FARSI YEH
        case 0x0643: return 0x06A9;  // ARABIC KAF -> KEHEH
        case 0x0629: return 0x0647;  // TEH MARBUTA -> HEH
        default: return cp;
    }
}

inline bool is_whitespace(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\r' || cp == U'\n' || cp == 0x00A0;
}

inline bool is_separator(char32_t cp) {
    return is_whitespace(cp) || cp == utf8::ZWNJ;
}

inline const std::unordered_set<std::string>& zwnj_suffixes() {
    static const std::unordered_set<std::string> s = {
        "ها",              // ha (plural)
        "های",        // haye
        "هایی",  // hayi
        "تر",              // tar (comparative)
        "ترین",  // tarin (superlative)
    };
    return s;
}

inline const std::unordered_set<std::string>& zwnj_prefixes() {
    static const std::unordered_set<std::string> s = {
        "می",          // mi (continuous verb prefix)
        "نمی",    // nemi (negated)
    };
    return s;
}

}  // namespace detail

inline std::string normalize(std::string_view text) {
    std::vector<char32_t> cps = utf8::decode(text);
    for (auto& cp : cps) cp = detail::map_char(cp);

    // Collapse separator runs.
    std::vector<char32_t> collapsed;
    collapsed.reserve(cps.size());
    std::size_t i = 0;
    while (i < cps.size()) {
        if (detail::is_separator(cps[i])) {
            bool has_ws = false;
            while (i < cps.size() && detail::is_separator(cps[i])) {
                has_ws = has_ws || detail::is_whitespace(cps[i]);
                ++i;
            }
            collapsed.push_back(has_ws ? U' ' : utf8::ZWNJ);
        } else {
            collapsed.push_back(cps[i]);
            ++i;
        }
    }
    // Trim.
    std::size_t b = 0, e = collapsed.size();
    while (b < e && detail::is_separator(collapsed[b])) ++b;
    while (e > b && detail::is_separator(collapsed[e - 1])) --e;
    collapsed.assign(collapsed.begin() + static_cast<long>(b),
                     collapsed.begin() + static_cast<long>(e));

    // Space-to-ZWNJ joins around known affixes.
    std::vector<std::string> tokens;
    std::string cur;
    for (char32_t cp : collapsed) {
        if (cp == U' ') {
            tokens.push_back(cur);
            cur.clear();
        } else {
            utf8::append(cur, cp);
        }
    }
    tokens.push_back(cur);

    std::string out;
    for (std::size_t t = 0; t < tokens.size(); ++t) {
        if (t > 0) {
            bool join = detail::zwnj_prefixes().count(tokens[t - 1]) > 0 ||
                        detail::zwnj_suffixes().count(tokens[t]) > 0;
            if (join) utf8::append(out, utf8::ZWNJ);
            else out.push_back(' ');
        }
        out += tokens[t];
    }
    return out;
}

// --- character class removal ---------------------------------------------

namespace detail {

inline bool is_punctuation(char32_t cp) {
    // ASCII punctuation.
    if ((cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
        (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E))
        return true;
    switch (cp) {
        case 0x061F:  // Arabic question mark
        case 0x060C:  // Arabic comma
        case 0x061B:  // Arabic semicolon
        case 0x066A:  // Arabic percent sign
        case 0x066B:  // Arabic decimal separator
        case 0x066C:  // Arabic thousands separator
        case 0x0640:  // tatweel
        case 0x00AB:  // left guillemet
        case 0x00BB:  // right guillemet
        case 0x00B7:  // middle dot
        case 0x2013:  // en dash
        case 0x2014:  // em dash
        case 0x2018:
        case 0x2019:
        case 0x201C:
        case 0x201D:
        case 0x2022:  // bullet
        case 0x2026:  // ellipsis
            return true;
        default:
            return false;
    }
}

inline bool is_digit_char(char32_t cp) {
    return (cp >= U'0' && cp <= U'9') || (cp >= 0x0660 && cp <= 0x0669) ||
           (cp >= 0x06F0 && cp <= 0x06F9);
}

template <typename Pred>
std::string remove_chars(std::string_view text, Pred pred) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        char32_t cp = utf8::decode_one(text, pos);
        if (!pred(cp)) utf8::append(out, cp);
    }
    return out;
}

}  // namespace detail

inline std::string strip_punctuation(std::string_view text) {
    return detail::remove_chars(text, detail::is_punctuation);
}

inline std::string strip_digits(std::string_view text) {
    return detail::remove_chars(text, detail::is_digit_char);
}

inline std::vector<std::string> strip_single_chars(const std::vector<std::string>& tokens) {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens)
        if (utf8::length(t) > 1) out.push_back(t);
    return out;
}

inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    std::size_t pos = 0;
    while (pos < text.size()) {
        char32_t cp = utf8::decode_one(text, pos);
        if (cp == U' ') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            utf8::append(cur, cp);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

// --- lemmas ---------------------------------------------------------------

struct Token {
    std::string surface;
    std::string lemma;

    friend bool operator==(const Token& a, const Token& b) {
        return a.surface == b.surface && a.lemma == b.lemma;
    }
};

// surface -> lemma table; entries are normalized on load so that lookups on
// normalized text hit.
class LemmaDictionary {
public:
    LemmaDictionary() = default;

    void add(std::string_view surface, std::string_view lemma) {
        entries_[normalize(surface)] = normalize(lemma);
    }

    const std::string* lookup(const std::string& surface) const {
        auto it = entries_.find(surface);
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::size_t size() const { return entries_.size(); }

    // File format: UTF-8, one `surface<TAB>lemma` per line, '#' comments.
    static LemmaDictionary load(std::istream& in, const std::string& name = "<stream>") {
        LemmaDictionary dict;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            std::size_t tab = line.find('\t');
            if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
                throw DataError(name + ":" + std::to_string(line_no) +
                                ": expected surface<TAB>lemma");
            dict.add(line.substr(0, tab), line.substr(tab + 1));
        }
        return dict;
    }

    static LemmaDictionary load_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError("cannot open lemma dictionary: " + path);
        return load(in, path);
    }

private:
    std::unordered_map<std::string, std::string> entries_;
};

inline std::vector<Token> lemmatize(const std::vector<std::string>& tokens,
                                    const LemmaDictionary& dict) {
    std::vector<Token> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        const std::string* lemma = dict.lookup(t);
        out.push_back({t, lemma ? *lemma : t});
    }
    return out;
}

// --- the pipeline ---------------------------------------------------------

struct StepTrace {
    std::string normalized;
    std::vector<std::string> tokens;
    std::vector<std::string> after_punctuation;
    std::vector<std::string> after_single_chars;
    std::vector<std::string> after_digits;
    std::vector<std::string> lemmas;
};

struct PreprocessedSentence {
    int label = 0;
    std::string source_id;
    std::vector<Token> tokens;
    bool empty_after_preprocess = false;
};

inline std::vector<Token> run_chain(std::string_view text, const LemmaDictionary& dict,
                                    StepTrace* trace = nullptr) {
    std::string normalized = normalize(text);
    std::vector<std::string> tokens = tokenize(normalized);

    std::vector<std::string> no_punct;
    for (const auto& t : tokens) {
        std::string s = strip_punctuation(t);
        if (!s.empty()) no_punct.push_back(std::move(s));
    }
    std::vector<std::string> no_single = strip_single_chars(no_punct);
    std::vector<std::string> no_digits;
    for (const auto& t : no_single) {
        std::string s = strip_digits(t);
        if (!s.empty()) no_digits.push_back(std::move(s));
    }
    std::vector<Token> lemmas = lemmatize(no_digits, dict);

    if (trace) {
        trace->normalized = normalized;
        trace->tokens = tokens;
        trace->after_punctuation = no_punct;
        trace->after_single_chars = no_single;
        trace->after_digits = no_digits;
        trace->lemmas.clear();
        for (const auto& t : lemmas) trace->lemmas.push_back(t.lemma);
    }
    return lemmas;
}

inline PreprocessedSentence pipeline(const data::Row& row, const LemmaDictionary& dict,
                                     StepTrace* trace = nullptr) {
    PreprocessedSentence out;
    out.label = row.label;
    out.source_id = row.source_id;
    out.tokens = run_chain(row.text, dict, trace);
    out.empty_after_preprocess = out.tokens.empty();
    return out;
}

// Cleans free text and returns the lemma tokens joined by single spaces;
// nullopt when nothing survives the chain.
inline std::optional<std::string> clean_text(std::string_view text,
                                             const LemmaDictionary& dict) {
    std::vector<Token> toks = run_chain(text, dict);
    if (toks.empty()) return std::nullopt;
    std::string joined;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (i > 0) joined.push_back(' ');
        joined += toks[i].lemma;
    }
    return joined;
}

struct PreprocessReport {
    std::size_t input_count = 0;
    std::size_t output_count = 0;
    std::size_t dropped_empty = 0;  // sentences flagged empty_after_preprocess
};

// Applies the chain to a whole dataset; rows that clean to nothing are
// excluded and counted. Row text becomes the lemma tokens joined by spaces.
inline std::pair<data::Dataset, PreprocessReport> preprocess_dataset(
    const data::Dataset& ds, const LemmaDictionary& dict) {
    data::Dataset out;
    out.meta = ds.meta;
    out.meta["preprocessed"] = "1";
    PreprocessReport report;
    report.input_count = ds.rows.size();
    for (const auto& row : ds.rows) {
        PreprocessedSentence p = pipeline(row, dict);
        if (p.empty_after_preprocess) {
            ++report.dropped_empty;
            continue;
        }
        std::string joined;
        for (std::size_t i = 0; i < p.tokens.size(); ++i) {
            if (i > 0) joined.push_back(' ');
            joined += p.tokens[i].lemma;
        }
        out.rows.push_back({row.label, row.source_id, std::move(joined)});
    }
    report.output_count = out.rows.size();
    return {std::move(out), report};
}

}  // namespace persent::preprocess

#endif  // PERSENT_PREPROCESS_HPP
