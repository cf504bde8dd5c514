#ifndef PERSENT_BOW_HPP
#define PERSENT_BOW_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "persent/dataset.hpp"
#include "persent/errors.hpp"

// Sparse bag-of-words features for the classical baselines: raw counts and
// smoothed tf-idf (idf = ln((1+N)/(1+df)) + 1, vectors L2-normalised).

namespace persent::bow {

struct Feature {
    std::size_t index;
    double value;
};

using BowVector = std::vector<Feature>;  // sorted by index, unique

class FeatureSpace {
public:
    static FeatureSpace build(const data::Dataset& train) {
        if (train.is_test_split())
            throw ConfigError("refusing to build a feature space from a test split");
        FeatureSpace fs;
        for (const auto& row : train.rows) {
            ++fs.docs_;
            std::unordered_map<std::string, bool> seen;
            for (auto& tok : data::tokens_of(row.text)) {
                auto [it, inserted] = fs.index_.try_emplace(tok, fs.words_.size());
                if (inserted) {
                    fs.words_.push_back(tok);
                    fs.df_.push_back(0);
                }
                if (seen.try_emplace(tok, true).second) ++fs.df_[it->second];
            }
        }
        if (fs.words_.empty()) throw DataError("empty corpus: no features");
        return fs;
    }

    std::size_t size() const { return words_.size(); }
    std::size_t documents() const { return docs_; }
    const std::vector<std::string>& words() const { return words_; }

    // -1 when the word was never seen in training.
    std::ptrdiff_t feature_of(const std::string& word) const {
        auto it = index_.find(word);
        return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
    }

    double idf(std::size_t feature) const {
        return std::log((1.0 + static_cast<double>(docs_)) /
                        (1.0 + static_cast<double>(df_.at(feature)))) +
               1.0;
    }

private:
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::string> words_;
    std::vector<std::size_t> df_;
    std::size_t docs_ = 0;
};

inline BowVector count_vector(const std::vector<std::string>& tokens,
                              const FeatureSpace& space) {
    std::unordered_map<std::size_t, double> acc;
    for (const auto& tok : tokens) {
        std::ptrdiff_t f = space.feature_of(tok);
        if (f >= 0) acc[static_cast<std::size_t>(f)] += 1.0;
    }
    BowVector out;
    out.reserve(acc.size());
    for (const auto& [idx, v] : acc) out.push_back({idx, v});
    std::sort(out.begin(), out.end(),
              [](const Feature& a, const Feature& b) { return a.index < b.index; });
    return out;
}

inline BowVector tfidf_vector(const std::vector<std::string>& tokens,
                              const FeatureSpace& space, bool normalize = true) {
    BowVector out = count_vector(tokens, space);
    double norm = 0.0;
    for (auto& f : out) {
        f.value *= space.idf(f.index);
        norm += f.value * f.value;
    }
    if (normalize && norm > 0.0) {
        norm = std::sqrt(norm);
        for (auto& f : out) f.value /= norm;
    }
    return out;
}

inline std::vector<BowVector> featurize_counts(const data::Dataset& ds,
                                               const FeatureSpace& space) {
    std::vector<BowVector> out;
    out.reserve(ds.rows.size());
    for (const auto& row : ds.rows)
        out.push_back(count_vector(data::tokens_of(row.text), space));
    return out;
}

inline std::vector<BowVector> featurize_tfidf(const data::Dataset& ds,
                                              const FeatureSpace& space) {
    std::vector<BowVector> out;
    out.reserve(ds.rows.size());
    for (const auto& row : ds.rows)
        out.push_back(tfidf_vector(data::tokens_of(row.text), space));
    return out;
}

}  // namespace persent::bow

#endif  // PERSENT_BOW_HPP
