#ifndef PERSENT_AUGMENT_HPP
#define PERSENT_AUGMENT_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "persent/dataset.hpp"
#include "persent/errors.hpp"
#include "persent/preprocess.hpp"
#include "persent/rng.hpp"

// The three training-data augmentation methods:
//   balance    - resample classes to a target histogram
//   translation- round-trip each sentence through a middle language
//   synonym    - substitute floor(20%) of each sentence's words
// All three refuse datasets tagged as test splits.

namespace persent::augment {

class Translator {
public:
    virtual ~Translator() = default;
    // Throws TranslatorError on failure.
    virtual std::string translate(const std::string& text, const std::string& src,
                                  const std::string& dst) = 0;
    virtual std::vector<std::string> synonyms(const std::string& word,
                                              const std::string& lang) = 0;
    virtual bool deterministic() const = 0;
    virtual std::string name() const = 0;
};

// File-backed word table: `word<TAB>syn1,syn2,...` per line. translate()
// replaces each whitespace token by its first table entry; synonyms()
// returns the whole list. Deterministic, offline.
class DictTranslator : public Translator {
public:
    DictTranslator() = default;

    void add(const std::string& word, std::vector<std::string> syns) {
        table_[word] = std::move(syns);
    }

    static DictTranslator load(std::istream& in, const std::string& name = "<stream>") {
        DictTranslator t;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            std::size_t tab = line.find('\t');
            if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size())
                throw DataError(name + ":" + std::to_string(line_no) +
                                ": expected word<TAB>syn1,syn2,...");
            std::vector<std::string> syns;
            std::string rest = line.substr(tab + 1);
            std::size_t start = 0;
            for (std::size_t i = 0; i <= rest.size(); ++i) {
                if (i == rest.size() || rest[i] == ',') {
                    if (i > start) syns.push_back(rest.substr(start, i - start));
                    start = i + 1;
                }
            }
            if (syns.empty())
                throw DataError(name + ":" + std::to_string(line_no) +
                                ": empty synonym list");
            t.add(line.substr(0, tab), std::move(syns));
        }
        return t;
    }

    static DictTranslator load_file(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError("cannot open translation table: " + path);
        return load(in, path);
    }

    std::string translate(const std::string& text, const std::string&,
                          const std::string&) override {
        std::string out;
        for (const auto& tok : data::tokens_of(text)) {
            if (!out.empty()) out.push_back(' ');
            auto it = table_.find(tok);
            out += it == table_.end() ? tok : it->second.front();
        }
        return out;
    }

    std::vector<std::string> synonyms(const std::string& word,
                                      const std::string&) override {
        auto it = table_.find(word);
        return it == table_.end() ? std::vector<std::string>{} : it->second;
    }

    bool deterministic() const override { return true; }
    std::string name() const override { return "dict"; }

private:
    std::unordered_map<std::string, std::vector<std::string>> table_;
};

struct AugmentationReport {
    std::string method;
    std::size_t input_count = 0;
    std::size_t output_count = 0;
    std::size_t skipped = 0;   // variants dropped (identical / empty / k == 0)
    std::size_t failures = 0;  // translator errors (original kept)
    std::map<int, std::size_t> before;  // per-class counts
    std::map<int, std::size_t> after;

    std::string to_string() const {
        std::ostringstream out;
        out << "method=" << method << " in=" << input_count << " out=" << output_count
            << " skipped=" << skipped << " failures=" << failures << "\n";
        for (const auto& [label, n] : before) {
            auto it = after.find(label);
            out << "class " << label << ": " << n << " -> "
                << (it == after.end() ? 0 : it->second) << "\n";
        }
        return out.str();
    }
};

namespace detail {

inline void refuse_test_split(const data::Dataset& ds, const char* method) {
    if (ds.is_test_split())
        throw ConfigError(std::string(method) +
                          ": refusing to augment a dataset tagged split=test");
}

}  // namespace detail

// --- balance ---------------------------------------------------------------

struct BalancePolicy {
    enum class Kind { uniform, median, explicit_map };
    Kind kind = Kind::median;
    std::size_t uniform_target = 0;
    std::map<int, std::size_t> targets;  // explicit_map

    static BalancePolicy uniform(std::size_t n) { return {Kind::uniform, n, {}}; }
    static BalancePolicy median() { return {Kind::median, 0, {}}; }
    static BalancePolicy explicit_map(std::map<int, std::size_t> t) {
        return {Kind::explicit_map, 0, std::move(t)};
    }
};

// Oversamples poor classes (with replacement) and undersamples rich ones
// (without replacement) to the per-class targets.
inline std::pair<data::Dataset, AugmentationReport> balance(
    const data::Dataset& ds, const BalancePolicy& policy, std::uint64_t seed) {
    detail::refuse_test_split(ds, "balance");

    AugmentationReport report;
    report.method = "balanced";
    report.input_count = ds.rows.size();
    report.before = ds.label_counts();

    // Resolve per-class targets.
    std::map<int, std::size_t> targets;
    switch (policy.kind) {
        case BalancePolicy::Kind::uniform:
            if (policy.uniform_target == 0)
                throw ConfigError("balance: uniform target must be positive");
            for (const auto& [label, n] : report.before)
                targets[label] = policy.uniform_target;
            break;
        case BalancePolicy::Kind::median: {
            if (report.before.empty()) throw DataError("balance: empty dataset");
            std::vector<std::size_t> counts;
            for (const auto& [label, n] : report.before) counts.push_back(n);
            std::sort(counts.begin(), counts.end());
            // Upper median: with two classes this oversamples the minority
            // up to the majority, growing the data rather than shrinking it.
            std::size_t median = counts[counts.size() / 2];
            for (const auto& [label, n] : report.before) targets[label] = median;
            break;
        }
        case BalancePolicy::Kind::explicit_map:
            targets = policy.targets;
            break;
    }
    for (const auto& [label, target] : targets) {
        auto it = report.before.find(label);
        if ((it == report.before.end() || it->second == 0) && target > 0)
            throw ConfigError("balance: target " + std::to_string(target) +
                              " for empty class " + std::to_string(label));
    }

    std::map<int, std::vector<std::size_t>> by_label;
    for (std::size_t i = 0; i < ds.rows.size(); ++i)
        by_label[ds.rows[i].label].push_back(i);

    rng::Engine eng = rng::make_engine(seed);
    std::vector<bool> keep(ds.rows.size(), false);
    std::vector<std::size_t> extra;  // oversampled duplicates, in draw order
    for (auto& [label, idx] : by_label) {
        auto it = targets.find(label);
        std::size_t target = it == targets.end() ? idx.size() : it->second;
        if (target <= idx.size()) {
            // Undersample without replacement.
            auto chosen = rng::sample_without_replacement(eng, idx.size(), target);
            for (std::size_t c : chosen) keep[idx[c]] = true;
        } else {
            for (std::size_t i : idx) keep[i] = true;
            for (std::size_t i = idx.size(); i < target; ++i)
                extra.push_back(idx[rng::below(eng, idx.size())]);
        }
    }

    data::Dataset out;
    out.meta = ds.meta;
    out.meta["augmented"] = "balanced";
    for (std::size_t i = 0; i < ds.rows.size(); ++i)
        if (keep[i]) out.rows.push_back(ds.rows[i]);
    for (std::size_t i : extra) out.rows.push_back(ds.rows[i]);

    report.output_count = out.rows.size();
    report.after = out.label_counts();
    return {std::move(out), report};
}

// --- per-row variant machinery ----------------------------------------------

namespace detail {

struct VariantOutcome {
    std::optional<data::Row> variant;
    bool skipped = false;
    bool failed = false;
};

// Runs fn(row_index) over all rows on `threads` workers; outcomes land in a
// pre-sized slot vector so output order matches input order regardless of
// thread count.
template <typename Fn>
std::vector<VariantOutcome> map_rows(std::size_t n, unsigned threads, Fn&& fn) {
    std::vector<VariantOutcome> slots(n);
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) slots[i] = fn(i);
        return slots;
    }
    unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                slots[i] = fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
    return slots;
}

inline std::pair<data::Dataset, AugmentationReport> collect_variants(
    const data::Dataset& ds, const std::vector<VariantOutcome>& outcomes,
    const char* method, const char* tag) {
    data::Dataset out;
    out.meta = ds.meta;
    out.meta["augmented"] = method;
    AugmentationReport report;
    report.method = method;
    report.input_count = ds.rows.size();
    report.before = ds.label_counts();
    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        out.rows.push_back(ds.rows[i]);
        const auto& o = outcomes[i];
        if (o.failed) ++report.failures;
        else if (o.skipped) ++report.skipped;
        else if (o.variant) out.rows.push_back(*o.variant);
    }
    (void)tag;
    report.output_count = out.rows.size();
    report.after = out.label_counts();
    return {std::move(out), report};
}

}  // namespace detail

// --- translation DA ----------------------------------------------------------

struct TranslateOptions {
    std::string source_lang = "fa";
    std::string middle_lang = "en";
    unsigned threads = 1;
};

// Every sentence gains one round-trip variant with the same label; variants
// identical to their source after preprocessing are dropped and counted.
// Output size is within [N, 2N].
inline std::pair<data::Dataset, AugmentationReport> translate_augment(
    const data::Dataset& ds, Translator& translator,
    const TranslateOptions& opts = {},
    const preprocess::LemmaDictionary* dict = nullptr) {
    detail::refuse_test_split(ds, "translate_augment");
    static const preprocess::LemmaDictionary empty_dict;
    const preprocess::LemmaDictionary& d = dict ? *dict : empty_dict;

    auto outcomes = detail::map_rows(
        ds.rows.size(), opts.threads, [&](std::size_t i) {
            detail::VariantOutcome o;
            const data::Row& row = ds.rows[i];
            try {
                std::string middle =
                    translator.translate(row.text, opts.source_lang, opts.middle_lang);
                std::string back =
                    translator.translate(middle, opts.middle_lang, opts.source_lang);
                std::optional<std::string> cleaned = preprocess::clean_text(back, d);
                std::optional<std::string> original = preprocess::clean_text(row.text, d);
                if (!cleaned || (original && *cleaned == *original)) {
                    o.skipped = true;
                } else {
                    o.variant = data::Row{row.label, row.source_id + "#t", *cleaned};
                }
            } catch (const TranslatorError&) {
                o.failed = true;
            }
            return o;
        });
    return detail::collect_variants(ds, outcomes, "translation", "#t");
}

// --- synonym DA ---------------------------------------------------------------

struct SynonymOptions {
    double rate = 0.20;
    std::string source_lang = "fa";
    unsigned threads = 1;
};

// floor(rate * L) distinct positions are substituted; a word with an empty
// synonym list stays unchanged. Sentences where floor(rate * L) == 0
// contribute no variant and count as skipped.
inline std::pair<data::Dataset, AugmentationReport> synonym_augment(
    const data::Dataset& ds, Translator& translator, std::uint64_t seed,
    const SynonymOptions& opts = {},
    const preprocess::LemmaDictionary* dict = nullptr) {
    detail::refuse_test_split(ds, "synonym_augment");
    if (opts.rate < 0.0 || opts.rate >= 1.0)
        throw ConfigError("synonym rate must be in [0,1)");
    static const preprocess::LemmaDictionary empty_dict;
    const preprocess::LemmaDictionary& d = dict ? *dict : empty_dict;

    auto outcomes = detail::map_rows(
        ds.rows.size(), opts.threads, [&](std::size_t i) {
            detail::VariantOutcome o;
            const data::Row& row = ds.rows[i];
            std::vector<std::string> tokens = data::tokens_of(row.text);
            std::size_t k = static_cast<std::size_t>(
                std::floor(opts.rate * static_cast<double>(tokens.size())));
            if (k == 0) {
                o.skipped = true;
                return o;
            }
            // Per-row engine: deterministic for any thread count.
            rng::Engine eng = rng::derive(seed, i);
            auto positions = rng::sample_without_replacement(eng, tokens.size(), k);
            try {
                bool changed = false;
                for (std::size_t pos : positions) {
                    auto syns = translator.synonyms(tokens[pos], opts.source_lang);
                    if (syns.empty()) continue;
                    std::string pick = syns[rng::below(eng, syns.size())];
                    if (pick != tokens[pos]) changed = true;
                    tokens[pos] = std::move(pick);
                }
                if (!changed) {
                    o.skipped = true;
                    return o;
                }
                std::string variant_text;
                for (std::size_t t = 0; t < tokens.size(); ++t) {
                    if (t > 0) variant_text.push_back(' ');
                    variant_text += tokens[t];
                }
                std::optional<std::string> cleaned = preprocess::clean_text(variant_text, d);
                std::optional<std::string> original = preprocess::clean_text(row.text, d);
                if (!cleaned || (original && *cleaned == *original)) {
                    o.skipped = true;
                } else {
                    o.variant = data::Row{row.label, row.source_id + "#s", *cleaned};
                }
            } catch (const TranslatorError&) {
                o.failed = true;
            }
            return o;
        });
    return detail::collect_variants(ds, outcomes, "synonym", "#s");
}

}  // namespace persent::augment

#endif  // PERSENT_AUGMENT_HPP
