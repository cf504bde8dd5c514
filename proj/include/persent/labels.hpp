#ifndef PERSENT_LABELS_HPP
#define PERSENT_LABELS_HPP

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "persent/dataset.hpp"
#include "persent/errors.hpp"
#include "persent/rng.hpp"

// Label-scheme reductions and the train/test split.

namespace persent::labels {

enum class BinarizeStrategy { NR, NP, NN };

inline std::string strategy_name(BinarizeStrategy s) {
    switch (s) {
        case BinarizeStrategy::NR: return "NR";
        case BinarizeStrategy::NP: return "NP";
        case BinarizeStrategy::NN: return "NN";
    }
    return "?";
}

inline BinarizeStrategy parse_strategy(std::string_view s) {
    std::string up(s);
    for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (up == "NR") return BinarizeStrategy::NR;
    if (up == "NP") return BinarizeStrategy::NP;
    if (up == "NN") return BinarizeStrategy::NN;
    throw ConfigError("unknown binarize strategy: " + std::string(s) +
                      " (expected NR, NP or NN)");
}

// {-2,-1} -> -1, {0} -> 0, {+1,+2} -> +1. Counts are conserved.
inline data::Dataset to_ternary(const data::Dataset& ds) {
    if (ds.scheme() != data::Scheme::five_class)
        throw ConfigError("to_ternary expects a five-class dataset");
    data::Dataset out;
    out.meta = ds.meta;
    out.set_scheme(data::Scheme::ternary);
    out.rows.reserve(ds.rows.size());
    for (const auto& r : ds.rows) {
        int t = r.label < 0 ? -1 : (r.label > 0 ? 1 : 0);
        out.rows.push_back({t, r.source_id, r.text});
    }
    return out;
}

// Reduces to two classes. NR drops neutral rows; NP folds neutral into
// positive; NN folds it into negative. Output labels are -1 and +1.
inline data::Dataset binarize(const data::Dataset& ds, BinarizeStrategy strategy) {
    if (ds.scheme() == data::Scheme::binary)
        throw ConfigError("dataset is already binary");
    data::Dataset out;
    out.meta = ds.meta;
    out.set_scheme(data::Scheme::binary);
    out.meta["binarize_strategy"] = strategy_name(strategy);
    out.rows.reserve(ds.rows.size());
    for (const auto& r : ds.rows) {
        int t = r.label < 0 ? -1 : (r.label > 0 ? 1 : 0);
        if (t == 0) {
            switch (strategy) {
                case BinarizeStrategy::NR: continue;
                case BinarizeStrategy::NP: t = 1; break;
                case BinarizeStrategy::NN: t = -1; break;
            }
        }
        out.rows.push_back({t, r.source_id, r.text});
    }
    return out;
}

struct SplitSpec {
    double train_fraction = 0.75;
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct SplitResult {
    data::Dataset train;
    data::Dataset test;
    std::vector<std::string> warnings;
};

// Deterministic split. Stratified mode allocates floor(fraction * N) train
// slots across classes by largest remainder, so per-class train counts stay
// within one row of fraction * class size. Classes with fewer than two rows
// go entirely to train with a warning.
inline SplitResult split(const data::Dataset& ds, const SplitSpec& spec) {
    if (ds.empty()) throw DataError("cannot split an empty dataset");
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw ConfigError("train_fraction must be in (0,1)");

    SplitResult result;
    result.train.meta = ds.meta;
    result.test.meta = ds.meta;
    result.train.meta["split"] = "train";
    result.test.meta["split"] = "test";

    rng::Engine eng = rng::make_engine(spec.seed);
    std::vector<bool> in_train(ds.rows.size(), false);

    if (!spec.stratified) {
        std::vector<std::size_t> idx(ds.rows.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        rng::shuffle(idx, eng);
        std::size_t n_train = static_cast<std::size_t>(
            std::floor(spec.train_fraction * static_cast<double>(idx.size())));
        n_train = std::min(std::max<std::size_t>(n_train, 1), idx.size() - 1);
        for (std::size_t i = 0; i < n_train; ++i) in_train[idx[i]] = true;
    } else {
        // Group row indices by label, ascending label order.
        std::map<int, std::vector<std::size_t>> by_label;
        for (std::size_t i = 0; i < ds.rows.size(); ++i)
            by_label[ds.rows[i].label].push_back(i);

        struct Group {
            int label;
            std::vector<std::size_t> idx;
            std::size_t train_count = 0;
            double remainder = 0.0;
        };
        std::vector<Group> groups;
        std::size_t splittable_total = 0;
        for (auto& [label, idx] : by_label) {
            if (idx.size() < 2) {
                result.warnings.push_back("class " + std::to_string(label) +
                                          " has fewer than 2 rows; kept in train");
                for (std::size_t i : idx) in_train[i] = true;
                continue;
            }
            groups.push_back({label, idx, 0, 0.0});
            splittable_total += idx.size();
        }

        std::size_t target = static_cast<std::size_t>(std::floor(
            spec.train_fraction * static_cast<double>(splittable_total)));
        std::size_t allocated = 0;
        for (auto& g : groups) {
            double exact = spec.train_fraction * static_cast<double>(g.idx.size());
            g.train_count = static_cast<std::size_t>(std::floor(exact));
            g.remainder = exact - std::floor(exact);
            allocated += g.train_count;
        }
        // Hand the leftover slots to the largest remainders; ties go to the
        // smaller label (groups are already in ascending label order).
        std::vector<std::size_t> order(groups.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return groups[a].remainder > groups[b].remainder;
        });
        for (std::size_t i = 0; i < order.size() && allocated < target; ++i) {
            ++groups[order[i]].train_count;
            ++allocated;
        }
        for (auto& g : groups) {
            // Keep both sides non-empty for every splittable class.
            g.train_count = std::min(std::max<std::size_t>(g.train_count, 1),
                                     g.idx.size() - 1);
            rng::shuffle(g.idx, eng);
            for (std::size_t i = 0; i < g.train_count; ++i) in_train[g.idx[i]] = true;
        }
    }

    for (std::size_t i = 0; i < ds.rows.size(); ++i) {
        if (in_train[i]) result.train.rows.push_back(ds.rows[i]);
        else result.test.rows.push_back(ds.rows[i]);
    }
    return result;
}

}  // namespace persent::labels

#endif  // PERSENT_LABELS_HPP
