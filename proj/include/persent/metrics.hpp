#ifndef PERSENT_METRICS_HPP
#define PERSENT_METRICS_HPP

#include <cstddef>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "persent/errors.hpp"

// Confusion-matrix metrics. Weighted F1 (per-class F1 averaged by true-label
// support) is the headline score everywhere in this project.

namespace persent::metrics {

class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t num_classes)
        : c_(num_classes), m_(num_classes * num_classes, 0) {
        if (num_classes == 0) throw ConfigError("confusion matrix needs classes > 0");
    }

    std::size_t num_classes() const { return c_; }

    std::size_t& at(std::size_t truth, std::size_t pred) { return m_[truth * c_ + pred]; }
    std::size_t at(std::size_t truth, std::size_t pred) const { return m_[truth * c_ + pred]; }

    std::size_t total() const {
        std::size_t n = 0;
        for (auto v : m_) n += v;
        return n;
    }
    std::size_t row_sum(std::size_t t) const {
        std::size_t n = 0;
        for (std::size_t p = 0; p < c_; ++p) n += at(t, p);
        return n;
    }
    std::size_t col_sum(std::size_t p) const {
        std::size_t n = 0;
        for (std::size_t t = 0; t < c_; ++t) n += at(t, p);
        return n;
    }

private:
    std::size_t c_;
    std::vector<std::size_t> m_;
};

inline ConfusionMatrix confusion(const std::vector<std::size_t>& y_true,
                                 const std::vector<std::size_t>& y_pred,
                                 std::size_t num_classes) {
    if (y_true.size() != y_pred.size())
        throw DataError("confusion: length mismatch (" + std::to_string(y_true.size()) +
                        " vs " + std::to_string(y_pred.size()) + ")");
    ConfusionMatrix m(num_classes);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] >= num_classes || y_pred[i] >= num_classes)
            throw DataError("confusion: label out of range at index " + std::to_string(i));
        ++m.at(y_true[i], y_pred[i]);
    }
    return m;
}

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct MetricReport {
    std::vector<ClassMetrics> per_class;
    double weighted_f1 = 0.0;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
    std::size_t total = 0;
};

// 0/0 precision, recall and F1 are defined as 0.
inline MetricReport evaluate(const ConfusionMatrix& m) {
    MetricReport rep;
    rep.total = m.total();
    if (rep.total == 0) throw DataError("empty confusion matrix");
    std::size_t correct = 0;
    double weighted = 0.0, macro = 0.0;
    for (std::size_t c = 0; c < m.num_classes(); ++c) {
        ClassMetrics cm;
        std::size_t tp = m.at(c, c);
        std::size_t col = m.col_sum(c), row = m.row_sum(c);
        cm.support = row;
        cm.precision = col == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(col);
        cm.recall = row == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(row);
        cm.f1 = (cm.precision + cm.recall) == 0.0
                    ? 0.0
                    : 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall);
        weighted += cm.f1 * static_cast<double>(cm.support);
        macro += cm.f1;
        correct += tp;
        rep.per_class.push_back(cm);
    }
    rep.weighted_f1 = weighted / static_cast<double>(rep.total);
    rep.macro_f1 = macro / static_cast<double>(m.num_classes());
    rep.accuracy = static_cast<double>(correct) / static_cast<double>(rep.total);
    return rep;
}

inline double weighted_f1(const ConfusionMatrix& m) { return evaluate(m).weighted_f1; }

inline std::string to_key_values(const MetricReport& rep) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "total=" << rep.total << "\n";
    out << "accuracy=" << rep.accuracy << "\n";
    out << "weighted_f1=" << rep.weighted_f1 << "\n";
    out << "macro_f1=" << rep.macro_f1 << "\n";
    for (std::size_t c = 0; c < rep.per_class.size(); ++c) {
        const auto& cm = rep.per_class[c];
        out << "class_" << c << ".precision=" << cm.precision << "\n";
        out << "class_" << c << ".recall=" << cm.recall << "\n";
        out << "class_" << c << ".f1=" << cm.f1 << "\n";
        out << "class_" << c << ".support=" << cm.support << "\n";
    }
    return out.str();
}

inline std::string csv_header(std::size_t num_classes) {
    std::ostringstream out;
    out << "total,accuracy,weighted_f1,macro_f1";
    for (std::size_t c = 0; c < num_classes; ++c)
        out << ",p" << c << ",r" << c << ",f1_" << c << ",n" << c;
    return out.str();
}

inline std::string to_csv_row(const MetricReport& rep) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << rep.total << ',' << rep.accuracy << ',' << rep.weighted_f1 << ','
        << rep.macro_f1;
    for (const auto& cm : rep.per_class)
        out << ',' << cm.precision << ',' << cm.recall << ',' << cm.f1 << ','
            << cm.support;
    return out.str();
}

}  // namespace persent::metrics

#endif  // PERSENT_METRICS_HPP
