#ifndef PERSENT_LINEAR_HPP
#define PERSENT_LINEAR_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "persent/bow.hpp"
#include "persent/errors.hpp"
#include "persent/rng.hpp"

// One-vs-rest linear classifiers trained by SGD on sparse features:
//   hinge loss    -> the SVM baseline
//   logistic loss -> the SGD (log-loss) baseline
// L2 decay uses the lazy-scaling trick so updates stay O(nnz).

namespace persent::linear {

enum class Loss { hinge, logistic };

inline Loss parse_loss(const std::string& s) {
    if (s == "hinge") return Loss::hinge;
    if (s == "logistic" || s == "log") return Loss::logistic;
    throw ConfigError("unknown loss: " + s + " (expected hinge|logistic)");
}

struct LinearConfig {
    Loss loss = Loss::hinge;
    std::size_t epochs = 5;
    double eta0 = 0.1;      // initial step size
    double lambda = 1e-4;   // L2 strength (not applied to the bias)
    std::uint64_t seed = 0;
};

struct EpochTrace {
    std::size_t epoch;
    double weight_norm;  // L2 norm over all per-class weights
};

class LinearModel {
public:
    LinearModel() = default;

    const std::vector<EpochTrace>& trace() const { return trace_; }
    std::size_t num_classes() const { return classes_; }

    void fit(const std::vector<bow::BowVector>& X, const std::vector<std::size_t>& y,
             std::size_t num_classes, std::size_t num_features,
             const LinearConfig& cfg) {
        if (X.size() != y.size()) throw DataError("linear: feature/label count mismatch");
        if (X.empty()) throw DataError("linear: empty training set");
        if (num_classes < 2) throw ConfigError("linear: need at least 2 classes");
        cfg_ = cfg;
        classes_ = num_classes;
        features_ = num_features;
        w_.assign(num_classes, std::vector<double>(num_features, 0.0));
        scale_.assign(num_classes, 1.0);
        b_.assign(num_classes, 0.0);
        trace_.clear();

        std::vector<std::size_t> order(X.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::size_t t = 0;  // global step, drives the learning-rate schedule
        for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
            rng::Engine eng = rng::derive(cfg.seed, 3000 + epoch);
            rng::shuffle(order, eng);
            for (std::size_t i : order) {
                ++t;
                // Bottou-style schedule: decays like 1/t scaled by lambda.
                double eta =
                    cfg.eta0 / (1.0 + cfg.lambda * cfg.eta0 * static_cast<double>(t));
                for (std::size_t c = 0; c < classes_; ++c) {
                    double target = y[i] == c ? 1.0 : -1.0;
                    double z = score(c, X[i]);
                    double coef = 0.0;  // gradient factor on target*x
                    if (cfg.loss == Loss::hinge) {
                        if (target * z < 1.0) coef = 1.0;
                    } else {
                        coef = 1.0 / (1.0 + std::exp(target * z));  // sigmoid(-tz)
                    }
                    // L2 decay shrinks the whole vector: fold into the scale.
                    scale_[c] *= 1.0 - eta * cfg.lambda;
                    if (scale_[c] < 1e-9) rescale(c);
                    if (coef != 0.0) {
                        double step = eta * target * coef / scale_[c];
                        for (const auto& f : X[i]) {
                            if (f.index >= features_)
                                throw DataError("linear: feature index out of range");
                            w_[c][f.index] += step * f.value;
                        }
                        b_[c] += eta * target * coef;
                    }
                }
            }
            double norm = weight_norm();
            if (!std::isfinite(norm))
                throw NumericError("linear: weights diverged at epoch " +
                                   std::to_string(epoch));
            trace_.push_back({epoch, norm});
        }
        fitted_ = true;
    }

    double score(std::size_t c, const bow::BowVector& x) const {
        double z = 0.0;
        for (const auto& f : x) z += w_[c][f.index] * f.value;
        return z * scale_[c] + b_[c];
    }

    std::size_t predict(const bow::BowVector& x) const {
        require_fitted();
        std::size_t best = 0;
        double bz = score(0, x);
        for (std::size_t c = 1; c < classes_; ++c) {
            double z = score(c, x);
            if (z > bz) {
                bz = z;
                best = c;
            }
        }
        return best;
    }

    std::vector<std::size_t> predict_all(const std::vector<bow::BowVector>& X) const {
        std::vector<std::size_t> out;
        out.reserve(X.size());
        for (const auto& x : X) out.push_back(predict(x));
        return out;
    }

    double weight_norm() const {
        double total = 0.0;
        for (std::size_t c = 0; c < classes_; ++c) {
            double s2 = scale_[c] * scale_[c];
            for (double v : w_[c]) total += s2 * v * v;
        }
        return std::sqrt(total);
    }

private:
    void rescale(std::size_t c) {
        for (double& v : w_[c]) v *= scale_[c];
        scale_[c] = 1.0;
    }

    void require_fitted() const {
        if (!fitted_) throw ConfigError("linear: predict before fit");
    }

    LinearConfig cfg_;
    bool fitted_ = false;
    std::size_t classes_ = 0, features_ = 0;
    std::vector<std::vector<double>> w_;
    std::vector<double> scale_, b_;
    std::vector<EpochTrace> trace_;
};

}  // namespace persent::linear

#endif  // PERSENT_LINEAR_HPP
