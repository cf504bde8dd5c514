// End-to-end tour of the library: parse annotated review XML, walk one
// sentence through the cleaning chain, reduce labels, split, and compare a
// couple of small classifiers with and without balanced resampling.
//
// Build target: persent_demo. Takes no arguments and writes to stdout.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "persent/corpus.hpp"
#include "persent/dataset.hpp"
#include "persent/experiment.hpp"
#include "persent/labels.hpp"
#include "persent/preprocess.hpp"

namespace {

// A miniature annotated review. Two elements are deliberately broken (missing
// polarity, polarity out of range) to show the skip report.
const char* kXml = R"xml(<?xml version="1.0" encoding="UTF-8"?>
<Review>
  <Sentence ID="r1-s1" Polarity="+2">این فیلم عالی بود</Sentence>
  <Sentence ID="r1-s2" Polarity="+1">بازی ها خوب است</Sentence>
  <Sentence ID="r1-s3" Polarity="0">فيلم را دیدم</Sentence>
  <Sentence ID="r1-s4" Polarity="-1">کیفیت 100٪ خوب نیست !!!</Sentence>
  <Sentence ID="r1-s5" Polarity="-2">داستان افتضاح بود و نمی ارزد</Sentence>
  <Sentence ID="r1-s6">بدون برچسب</Sentence>
  <Sentence ID="r1-s7" Polarity="+7">برچسب خراب</Sentence>
</Review>
)xml";

void show_join(const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i)
        std::cout << (i ? " | " : "") << v[i];
    std::cout << "\n";
}

// Synthetic five-class corpus with an obvious vocabulary split between the
// polarities, imbalanced on purpose so balanced resampling has work to do.
persent::data::Dataset synthetic_corpus() {
    persent::data::Dataset ds;
    ds.set_scheme(persent::data::Scheme::five_class);
    auto add = [&](int label, const std::string& id, std::string text) {
        ds.rows.push_back({label, id, std::move(text)});
    };
    for (int i = 0; i < 12; ++i) {
        std::string s(1, static_cast<char>('a' + i));
        add(+2, "p2-" + s, "great lovely superb plot fill" + s);
        add(+1, "p1-" + s, "nice warm tender scene fill" + s);
        if (i < 4) {
            add(-2, "n2-" + s, "awful dreary hollow plot fill" + s);
            add(-1, "n1-" + s, "dull tired flat scene fill" + s);
        }
        if (i < 6) add(0, "z-" + s, "plain even mid note fill" + s);
    }
    return ds;
}

}  // namespace

int main() {
    using namespace persent;

    std::cout << "== 1. parse annotated XML ==\n";
    corpus::ParseResult parsed = corpus::parse_corpus(kXml);
    std::cout << corpus::skip_report(parsed);
    corpus::CorpusStats st = corpus::stats(parsed.sentences);
    for (const auto& [label, n] : st.counts)
        std::cout << "  emotion " << data::format_label(label) << ": " << n << "\n";

    std::cout << "\n== 2. cleaning chain, step by step ==\n";
    // Arabic kaf/yeh forms, digits, punctuation and a detached verb prefix,
    // all of which the chain repairs or removes.
    std::string raw = "كيفيت 100٪ خوب نيست ، نمی ارزد !";
    preprocess::LemmaDictionary dict;
    dict.add("نیست", "است");  // demo lemma: fold negative copula onto the stem
    preprocess::StepTrace trace;
    preprocess::run_chain(raw, dict, &trace);
    std::cout << "raw:            " << raw << "\n";
    std::cout << "normalized:     " << trace.normalized << "\n";
    std::cout << "no punctuation: ";
    show_join(trace.after_punctuation);
    std::cout << "no single char: ";
    show_join(trace.after_single_chars);
    std::cout << "no digits:      ";
    show_join(trace.after_digits);
    std::cout << "lemmas:         ";
    show_join(trace.lemmas);

    std::cout << "\n== 3. label reduction + split ==\n";
    data::Dataset five = synthetic_corpus();
    data::Dataset binary = labels::binarize(five, labels::BinarizeStrategy::NR);
    std::cout << "five-class rows: " << five.size() << ", binary (neutral dropped): "
              << binary.size() << "\n";
    labels::SplitSpec spec;
    spec.seed = 7;
    labels::SplitResult split = labels::split(binary, spec);
    std::cout << "train: " << split.train.size() << "  test: " << split.test.size()
              << "\n";
    for (const auto& [label, n] : split.train.label_counts())
        std::cout << "  train label " << data::format_label(label) << ": " << n << "\n";

    std::cout << "\n== 4. models, original vs balanced training data ==\n";
    experiment::ExperimentConfig base;
    base.validation_fraction = 0.0;
    base.seed = 42;
    base.lin.epochs = 8;
    base.net.sequence_length = 16;
    base.net.vocab_cap = 128;
    base.net.embed_dim = 16;
    base.net.hidden = 8;
    base.net.dense_units = 16;
    base.net.epochs = 6;
    base.net.batch_size = 8;

    for (const std::string& model : {std::string("nb"), std::string("blstm")}) {
        for (const std::string& aug : {std::string("original"), std::string("balanced")}) {
            experiment::ExperimentConfig cfg = base;
            cfg.model = model;
            if (!cfg.is_neural()) cfg.embedding = "online";  // ignored for baselines
            cfg.augmentation = aug;
            experiment::RunResult run =
                experiment::run_experiment(cfg, split.train, split.test);
            std::printf("  %-6s %-9s weighted F1 %.3f  (run %s)\n", run.model_name.c_str(),
                        aug.c_str(), run.report.weighted_f1, run.run_id.c_str());
        }
    }

    std::cout << "\ndone.\n";
    return 0;
}
