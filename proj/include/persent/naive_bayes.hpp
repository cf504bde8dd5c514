#ifndef PERSENT_NAIVE_BAYES_HPP
#define PERSENT_NAIVE_BAYES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "persent/bow.hpp"
#include "persent/errors.hpp"

// Multinomial naive Bayes on count features, Laplace smoothing alpha = 1.

namespace persent::nb {

class NaiveBayes {
public:
    explicit NaiveBayes(double alpha = 1.0) : alpha_(alpha) {
        if (alpha <= 0.0) throw ConfigError("naive Bayes alpha must be positive");
    }

    void fit(const std::vector<bow::BowVector>& X, const std::vector<std::size_t>& y,
             std::size_t num_classes, std::size_t num_features) {
        if (X.size() != y.size())
            throw DataError("naive Bayes: feature/label count mismatch");
        if (X.empty()) throw DataError("naive Bayes: empty training set");
        classes_ = num_classes;
        features_ = num_features;
        class_docs_.assign(num_classes, 0);
        word_counts_.assign(num_classes, std::vector<double>(num_features, 0.0));
        class_totals_.assign(num_classes, 0.0);
        for (std::size_t i = 0; i < X.size(); ++i) {
            if (y[i] >= num_classes)
                throw DataError("naive Bayes: label index out of range");
            ++class_docs_[y[i]];
            for (const auto& f : X[i]) {
                if (f.index >= num_features)
                    throw DataError("naive Bayes: feature index out of range");
                word_counts_[y[i]][f.index] += f.value;
                class_totals_[y[i]] += f.value;
            }
        }
        total_docs_ = X.size();
        fitted_ = true;
    }

    // log p(c) + sum_w count_w * log p(w|c), Laplace-smoothed. Classes with
    // no training documents get probability zero.
    std::vector<double> log_joint(const bow::BowVector& x) const {
        require_fitted();
        std::vector<double> out(classes_, -std::numeric_limits<double>::infinity());
        double denom_docs = static_cast<double>(total_docs_);
        for (std::size_t c = 0; c < classes_; ++c) {
            if (class_docs_[c] == 0) continue;
            double lp = std::log(static_cast<double>(class_docs_[c]) / denom_docs);
            double denom = class_totals_[c] + alpha_ * static_cast<double>(features_);
            for (const auto& f : x) {
                double pw = (word_counts_[c][f.index] + alpha_) / denom;
                lp += f.value * std::log(pw);
            }
            out[c] = lp;
        }
        return out;
    }

    // Posterior over classes; sums to 1 (log-sum-exp normalisation).
    std::vector<double> predict_proba(const bow::BowVector& x) const {
        std::vector<double> lj = log_joint(x);
        double mx = lj[0];
        for (double v : lj) mx = std::max(mx, v);
        double z = 0.0;
        std::vector<double> out(lj.size());
        for (std::size_t c = 0; c < lj.size(); ++c) {
            out[c] = std::isinf(lj[c]) ? 0.0 : std::exp(lj[c] - mx);
            z += out[c];
        }
        for (double& v : out) v /= z;
        return out;
    }

    std::size_t predict(const bow::BowVector& x) const {
        std::vector<double> lj = log_joint(x);
        std::size_t best = 0;
        for (std::size_t c = 1; c < lj.size(); ++c)
            if (lj[c] > lj[best]) best = c;
        return best;
    }

    std::vector<std::size_t> predict_all(const std::vector<bow::BowVector>& X) const {
        std::vector<std::size_t> out;
        out.reserve(X.size());
        for (const auto& x : X) out.push_back(predict(x));
        return out;
    }

    std::size_t num_classes() const { return classes_; }

private:
    void require_fitted() const {
        if (!fitted_) throw ConfigError("naive Bayes: predict before fit");
    }

    double alpha_;
    bool fitted_ = false;
    std::size_t classes_ = 0, features_ = 0, total_docs_ = 0;
    std::vector<std::size_t> class_docs_;
    std::vector<std::vector<double>> word_counts_;
    std::vector<double> class_totals_;
};

}  // namespace persent::nb

#endif  // PERSENT_NAIVE_BAYES_HPP
