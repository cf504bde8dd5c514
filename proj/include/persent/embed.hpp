#ifndef PERSENT_EMBED_HPP
#define PERSENT_EMBED_HPP

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "persent/dataset.hpp"
#include "persent/errors.hpp"
#include "persent/hash.hpp"
#include "persent/rng.hpp"

// Word-to-index vocabulary plus the two embedding sources: a trainable table
// initialized randomly, or vectors loaded from a pretrained text file.

namespace persent::embed {

inline constexpr std::int32_t kPadIndex = 0;
inline constexpr std::int32_t kUnkIndex = 1;
inline constexpr const char* kPadWord = "<pad>";
inline constexpr const char* kUnkWord = "<unk>";

class Vocabulary {
public:
    Vocabulary() {
        words_.push_back(kPadWord);
        words_.push_back(kUnkWord);
        index_[kPadWord] = kPadIndex;
        index_[kUnkWord] = kUnkIndex;
    }

    std::size_t size() const { return words_.size(); }

    std::int32_t lookup(const std::string& word) const {
        auto it = index_.find(word);
        return it == index_.end() ? kUnkIndex : it->second;
    }

    const std::string& word(std::size_t index) const { return words_.at(index); }
    const std::vector<std::string>& words() const { return words_; }

    // Content id over the index-ordered word list.
    std::string content_id() const {
        std::string blob;
        for (const auto& w : words_) {
            blob += w;
            blob.push_back('\n');
        }
        return hash::content_id(blob);
    }

    void append(const std::string& word) {
        if (index_.count(word)) throw ConfigError("duplicate vocabulary word: " + word);
        index_[word] = static_cast<std::int32_t>(words_.size());
        words_.push_back(word);
    }

    // One word per line, index order, reserved entries included.
    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot open for writing: " + path);
        for (const auto& w : words_) out << w << "\n";
    }

    static Vocabulary load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError("cannot open vocabulary: " + path);
        std::vector<std::string> lines;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            lines.push_back(line);
        }
        while (!lines.empty() && lines.back().empty()) lines.pop_back();
        if (lines.size() < 2 || lines[0] != kPadWord || lines[1] != kUnkWord)
            throw DataError(path + ": not a vocabulary file (reserved rows missing)");
        Vocabulary v;
        for (std::size_t i = 2; i < lines.size(); ++i) v.append(lines[i]);
        return v;
    }

private:
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::int32_t> index_;
};

// Words ranked by frequency, ties broken by first appearance; truncated to
// max_size including the two reserved slots. Training data only.
inline Vocabulary build_vocab(const data::Dataset& train, std::size_t max_size) {
    if (train.is_test_split())
        throw ConfigError("refusing to build a vocabulary from a test split");
    if (max_size < 3) throw ConfigError("vocabulary max_size must be at least 3");

    struct Entry {
        std::size_t count = 0;
        std::size_t first_seen = 0;
    };
    std::unordered_map<std::string, Entry> freq;
    std::vector<std::string> order;
    std::size_t tick = 0;
    for (const auto& row : train.rows) {
        for (auto& tok : data::tokens_of(row.text)) {
            auto [it, inserted] = freq.try_emplace(tok);
            if (inserted) {
                it->second.first_seen = tick++;
                order.push_back(tok);
            }
            ++it->second.count;
        }
    }
    if (order.empty()) throw DataError("empty corpus: no tokens to build a vocabulary");

    std::stable_sort(order.begin(), order.end(), [&](const std::string& a,
                                                     const std::string& b) {
        const Entry& ea = freq[a];
        const Entry& eb = freq[b];
        if (ea.count != eb.count) return ea.count > eb.count;
        return ea.first_seen < eb.first_seen;
    });
    if (order.size() > max_size - 2) order.resize(max_size - 2);

    Vocabulary vocab;
    for (const auto& w : order) vocab.append(w);
    return vocab;
}

struct EncodedSentence {
    std::vector<std::int32_t> indices;  // length T, right-padded with 0
    std::size_t true_length = 0;        // tokens before padding, <= T
};

inline EncodedSentence encode(const std::vector<std::string>& tokens,
                              const Vocabulary& vocab, std::size_t sequence_length) {
    EncodedSentence out;
    out.indices.assign(sequence_length, kPadIndex);
    out.true_length = std::min(tokens.size(), sequence_length);
    for (std::size_t i = 0; i < out.true_length; ++i)
        out.indices[i] = vocab.lookup(tokens[i]);
    return out;
}

inline std::vector<std::string> decode(const EncodedSentence& enc,
                                       const Vocabulary& vocab) {
    std::vector<std::string> out;
    out.reserve(enc.true_length);
    for (std::size_t i = 0; i < enc.true_length; ++i)
        out.push_back(vocab.word(static_cast<std::size_t>(enc.indices[i])));
    return out;
}

struct EmbeddingMatrix {
    std::size_t rows = 0;  // vocabulary size
    std::size_t cols = 0;  // embedding dimension
    std::vector<double> data;  // row-major
    bool trainable = true;

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
};

// Random table for the trainable ("online") embedding. Row 0 is zero and is
// kept zero by the training path.
inline EmbeddingMatrix random_embedding(std::size_t vocab_size, std::size_t dim,
                                        std::uint64_t seed) {
    EmbeddingMatrix m;
    m.rows = vocab_size;
    m.cols = dim;
    m.trainable = true;
    m.data.assign(vocab_size * dim, 0.0);
    rng::Engine eng = rng::derive(seed, 0xE3BEDull);
    for (std::size_t r = 1; r < vocab_size; ++r)
        for (std::size_t c = 0; c < dim; ++c)
            m.data[r * dim + c] = rng::uniform(eng, -0.05, 0.05);
    return m;
}

struct PretrainedLoad {
    EmbeddingMatrix matrix;
    std::size_t file_word_count = 0;   // vector lines seen
    std::size_t covered = 0;           // vocab words found in the file
    double coverage = 0.0;             // covered / (|vocab| - reserved)
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

inline bool parse_double(std::string_view s, double& out) {
    std::string buf(s);
    char* end = nullptr;
    out = std::strtod(buf.c_str(), &end);
    return end == buf.c_str() + buf.size() && !buf.empty();
}

inline bool is_positive_integer(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

}  // namespace detail

// Textual vector file: optional `count dim` header, then `word v1 .. v_dim`
// per line. Vocab words present in the file get a bit-exact copy of their
// vector; absent words (and <unk>) get a small seeded random row; <pad> stays
// zero. The matrix is frozen by default.
inline PretrainedLoad load_pretrained(std::istream& in, const Vocabulary& vocab,
                                      std::uint64_t seed,
                                      const std::string& name = "<stream>") {
    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    std::unordered_map<std::string, std::vector<double>> found;
    std::size_t file_words = 0;

    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = detail::split_ws(line);
        if (first_content_line) {
            first_content_line = false;
            if (fields.size() == 2 && detail::is_positive_integer(fields[0]) &&
                detail::is_positive_integer(fields[1])) {
                dim = static_cast<std::size_t>(std::stoul(std::string(fields[1])));
                if (dim == 0)
                    throw DataError(name + ":" + std::to_string(line_no) +
                                    ": header dimension is zero");
                continue;  // header line
            }
        }
        if (fields.size() < 2)
            throw DataError(name + ":" + std::to_string(line_no) +
                            ": vector line needs a word and at least one value");
        if (dim == 0) dim = fields.size() - 1;
        if (fields.size() - 1 != dim)
            throw DataError(name + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(dim) + " values, got " +
                            std::to_string(fields.size() - 1));
        ++file_words;
        std::string word(fields[0]);
        // Keep only words that are really in the vocabulary; lookup falls
        // back to <unk>, so round-trip the index to detect misses.
        std::size_t idx = static_cast<std::size_t>(vocab.lookup(word));
        if (vocab.word(idx) != word) continue;
        std::vector<double> vec(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            if (!detail::parse_double(fields[i + 1], vec[i]))
                throw DataError(name + ":" + std::to_string(line_no) +
                                ": bad number \"" + std::string(fields[i + 1]) + "\"");
        }
        found.emplace(std::move(word), std::move(vec));
    }
    if (dim == 0) throw DataError(name + ": no vectors found");

    PretrainedLoad out;
    out.file_word_count = file_words;
    out.matrix.rows = vocab.size();
    out.matrix.cols = dim;
    out.matrix.trainable = false;
    out.matrix.data.assign(vocab.size() * dim, 0.0);

    rng::Engine eng = rng::derive(seed, 0xFA57Eull);
    for (std::size_t r = 1; r < vocab.size(); ++r) {
        auto it = found.find(vocab.word(r));
        double* dst = out.matrix.row(r);
        if (it != found.end()) {
            std::copy(it->second.begin(), it->second.end(), dst);
            if (r >= 2) ++out.covered;
        } else {
            for (std::size_t c = 0; c < dim; ++c)
                dst[c] = rng::uniform(eng, -0.05, 0.05);
        }
    }
    std::size_t real_words = vocab.size() - 2;
    out.coverage = real_words == 0
                       ? 0.0
                       : static_cast<double>(out.covered) / static_cast<double>(real_words);
    return out;
}

inline PretrainedLoad load_pretrained_file(const std::string& path,
                                           const Vocabulary& vocab,
                                           std::uint64_t seed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open vector file: " + path);
    return load_pretrained(in, vocab, seed, path);
}

}  // namespace persent::embed

#endif  // PERSENT_EMBED_HPP
