// Acceptance gate: eight go/no-go checks over the whole pipeline, printed one
// line each. The exit status is the number of failed checks, so a zero exit
// means the build is fit to ship.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "persent/augment.hpp"
#include "persent/checkpoint.hpp"
#include "persent/corpus.hpp"
#include "persent/dataset.hpp"
#include "persent/embed.hpp"
#include "persent/experiment.hpp"
#include "persent/labels.hpp"
#include "persent/metrics.hpp"
#include "persent/model.hpp"
#include "persent/ops.hpp"
#include "persent/rng.hpp"
#include "support.hpp"

using namespace persent;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Random tensor bounded away from zero, for ops with a kink at the origin.
nn::Tensor nonzero_tensor(nn::Shape shape, rng::Engine& eng) {
    nn::Tensor t(std::move(shape));
    for (double& v : t.data) {
        double mag = rng::uniform(eng, 0.05, 1.0);
        v = rng::uniform(eng) < 0.5 ? -mag : mag;
    }
    return t;
}

// ---------------------------------------------------------------------------
// 1. Gradient correctness: central finite differences over every
//    differentiable op, 20 seeds each, inside a 60 second budget.
// ---------------------------------------------------------------------------

struct OpCheck {
    std::string name;
    double tol;
    std::function<support::GradCheck(std::uint64_t)> run;
};

std::vector<OpCheck> gradient_checks() {
    using namespace nn;
    std::vector<OpCheck> checks;

    checks.push_back({"add/mul/scale", 1e-4, [](std::uint64_t seed) {
        rng::Engine eng = rng::make_engine(seed);
        Var a = parameter(support::rand_tensor({2, 3}, eng), "a");
        Var b = parameter(support::rand_tensor({2, 3}, eng), "b");
        return support::grad_check({a, b}, [&] {
            return ops::sum(ops::add(ops::mul(a, b), ops::scale(a, 0.5)));
        });
    }});

    checks.push_back({"relu", 1e-4, [](std::uint64_t seed) {
        rng::Engine eng = rng::make_engine(seed);
        Var x = parameter(nonzero_tensor({3, 4}, eng), "x");
        return support::grad_check({x}, [&] { return ops::sum(ops::relu(x)); });
    }});

    checks.push_back({"sigmoid/tanh", 1e-4, [](std::uint64_t seed) {
        rng::Engine eng = rng::make_engine(seed);
        Var x = parameter(support::rand_tensor({2, 5}, eng), "x");
        return support::grad_check(
            {x}, [&] { return ops::sum(ops::mul(ops::sigmoid(x), ops::tanh(x))); });
    }});

    checks.push_back({"dense", 1e-3, [](std::uint64_t seed) {
        rng::Engine eng = rng::make_engine(seed);
        Var x = parameter(support::rand_tensor({2, 3}, eng), "x");
        Var w = parameter(support::rand_tensor({3, 4}, eng), "w");
        Var b = parameter(support::rand_tensor({4}, eng), "b");
        return support::grad_check(
            {x, w, b}, [&] { return ops::sum(ops::tanh(ops::dense(x, w, b))); });
    }});

    checks.push_back({"softmax/cross_entropy", 1e-3, [](std::uint64_t seed) {
        rng::Engine eng = rng::make_engine(seed);
        Var logits = parameter(support::rand_tensor({3, 4}, eng), "logits");
        std::vector<int> labels;
        for (int i = 0; i < 3; ++i) labels.push_back(int(rng::below(eng, 4)));
        return support::grad_check({logits}, [&] {
            return ops::cross_entropy(ops::softmax(logits), labels);
        });
    }});

    checks.push_back({"embedding_lookup", 1e-3, [](std::uint64_t seed) {
        rng::Engine eng = rng::make_engine(seed);
        Var table = parameter(support::rand_tensor({6, 3}, eng), "E");
        std::vector<int> idx;
        for (int i = 0; i < 8; ++i) idx.push_back(1 + int(rng::below(eng, 5)));
        Var weights = constant(support::rand_tensor({2, 4, 3}, eng), "w");
        return support::grad_check({table}, [&] {
            return ops::sum(ops::mul(ops::embedding_lookup(table, idx, 2, 4), weights));
        });
    }});

    checks.push_back({"dropout", 1e-4, [](std::uint64_t seed) {
        rng::Engine eng = rng::make_engine(seed);
        Var x = parameter(support::rand_tensor({2, 5}, eng), "x");
        return support::grad_check({x}, [&] {
            rng::Engine mask_eng = rng::make_engine(42 + seed);  // frozen mask
            return ops::sum(ops::dropout(x, 0.3, mask_eng, true));
        });
    }});

    checks.push_back({"conv1d", 1e-3, [](std::uint64_t seed) {
        rng::Engine eng = rng::make_engine(seed);
        Var x = parameter(support::rand_tensor({2, 5, 3}, eng), "x");
        Var w = parameter(support::rand_tensor({3, 3, 4}, eng), "w");
        Var b = parameter(support::rand_tensor({4}, eng), "b");
        return support::grad_check(
            {x, w, b}, [&] { return ops::sum(ops::tanh(ops::conv1d(x, w, b))); });
    }});

    checks.push_back({"maxpool1d", 1e-3, [](std::uint64_t seed) {
        rng::Engine eng = rng::make_engine(seed);
        Var x = parameter(support::spread_tensor({2, 6, 3}, eng), "x");
        return support::grad_check({x}, [&] { return ops::sum(ops::maxpool1d(x, 2, 1)); });
    }});

    checks.push_back({"global_maxpool", 1e-3, [](std::uint64_t seed) {
        rng::Engine eng = rng::make_engine(seed);
        Var x = parameter(support::spread_tensor({2, 5, 4}, eng), "x");
        std::vector<std::size_t> lengths = {5, 3};
        return support::grad_check(
            {x}, [&] { return ops::sum(ops::global_maxpool(x, lengths)); });
    }});

    checks.push_back({"bilstm", 1e-3, [](std::uint64_t seed) {
        rng::Engine eng = rng::make_engine(seed);
        const std::size_t D = 3, H = 3;
        Var x = parameter(support::rand_tensor({2, 4, D}, eng), "x");
        Var wxf = parameter(support::rand_tensor({D, 4 * H}, eng), "wxf");
        Var whf = parameter(support::rand_tensor({H, 4 * H}, eng), "whf");
        Var bf = parameter(support::rand_tensor({4 * H}, eng), "bf");
        Var wxb = parameter(support::rand_tensor({D, 4 * H}, eng), "wxb");
        Var whb = parameter(support::rand_tensor({H, 4 * H}, eng), "whb");
        Var bb = parameter(support::rand_tensor({4 * H}, eng), "bb");
        std::vector<std::size_t> lengths = {4, 2};
        return support::grad_check({x, wxf, whf, bf, wxb, whb, bb}, [&] {
            return ops::sum(ops::bilstm(x, lengths, wxf, whf, bf, wxb, whb, bb));
        });
    }});

    checks.push_back({"lstm_cell", 1e-3, [](std::uint64_t seed) {
        rng::Engine eng = rng::make_engine(seed);
        const std::size_t I = 3, H = 3;
        Var x = parameter(support::rand_tensor({2, I}, eng), "x");
        Var state = parameter(support::rand_tensor({2, 2 * H}, eng), "state");
        Var wx = parameter(support::rand_tensor({I, 4 * H}, eng), "wx");
        Var wh = parameter(support::rand_tensor({H, 4 * H}, eng), "wh");
        Var b = parameter(support::rand_tensor({4 * H}, eng), "b");
        return support::grad_check({x, state, wx, wh, b}, [&] {
            return ops::sum(ops::lstm_cell(x, state, wx, wh, b));
        });
    }});

    return checks;
}

bool criterion_gradients(std::string& detail) {
    auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    std::string worst_op;
    bool ok = true;
    for (const auto& check : gradient_checks()) {
        double op_worst = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            auto res = check.run(seed);
            op_worst = std::max(op_worst, res.max_rel_err);
        }
        if (op_worst > worst) {
            worst = op_worst;
            worst_op = check.name;
        }
        if (op_worst >= check.tol) {
            ok = false;
            detail += check.name + " rel err " + std::to_string(op_worst) + "; ";
        }
    }
    double secs = seconds_since(t0);
    std::ostringstream note;
    note << "worst " << worst_op << " rel err " << worst << ", " << secs << "s";
    detail += note.str();
    if (secs >= 60.0) ok = false;
    return ok;
}

// ---------------------------------------------------------------------------
// 2. Architecture fidelity: exact layer stacks and the conv length chain.
// ---------------------------------------------------------------------------

bool criterion_architecture(std::string& detail) {
    embed::Vocabulary vocab;
    for (const char* w : {"one", "two", "three"}) vocab.append(w);

    model::ModelConfig blstm;  // library defaults
    auto emb = embed::random_embedding(vocab.size(), blstm.embed_dim, 0);
    model::SequenceClassifier recurrent(blstm, vocab, emb);
    std::vector<std::string> want_blstm = {
        "bilstm(units=128 per direction)", "global_maxpool", "dropout(0.1)",
        "dense(600, relu)",                "dropout(0.1)",   "dense(2, softmax)"};
    if (recurrent.layer_summary() != want_blstm) {
        detail = "recurrent stack mismatch";
        return false;
    }

    model::ModelConfig cnn;
    cnn.kind = "cnn";
    model::SequenceClassifier conv(cnn, vocab, emb);
    std::vector<std::string> want_cnn = {"conv1d(kernel=4, filters=64, relu)",
                                         "maxpool1d(pool=2, stride=1)",
                                         "conv1d(kernel=8, filters=64, relu)",
                                         "maxpool1d(pool=2, stride=1)",
                                         "conv1d(kernel=16, filters=64, relu)",
                                         "global_maxpool",
                                         "dropout(0.1)",
                                         "dense(256, sigmoid)",
                                         "dense(2, softmax)"};
    if (conv.layer_summary() != want_cnn) {
        detail = "convolutional stack mismatch";
        return false;
    }

    std::vector<std::size_t> want_chain = {254, 253, 246, 245, 230};
    if (conv.conv_length_chain() != want_chain) {
        detail = "length chain mismatch for T=257, kernels 4/8/16, pool 2 stride 1";
        return false;
    }
    detail = "6-layer recurrent stack, 9-layer conv stack, lengths 254/253/246/245/230";
    return true;
}

// ---------------------------------------------------------------------------
// 3. End-to-end learnability: every model >= 0.99 weighted F1 on a separable
//    200-sentence corpus, within five minutes.
// ---------------------------------------------------------------------------

bool criterion_learnability(std::string& detail) {
    auto t0 = std::chrono::steady_clock::now();
    auto corpus = support::separable_corpus(100, 1234);
    labels::SplitSpec spec;
    spec.train_fraction = 0.75;
    spec.seed = 1234;
    auto split = labels::split(corpus, spec);

    support::TempDir tmp;
    std::vector<std::string> words;
    for (int i = 0; i < 10; ++i) {
        words.push_back("good" + std::to_string(i));
        words.push_back("bad" + std::to_string(i));
    }
    std::string vectors_path = tmp.file("vectors.txt");
    support::write_file(vectors_path, support::vectors_file_text(words, 32, 99));

    auto run = [&](const std::string& model, const std::string& embedding) {
        experiment::ExperimentConfig cfg;
        cfg.model = model;
        cfg.embedding = embedding;
        cfg.validation_fraction = 0.0;
        cfg.seed = 42;
        cfg.lin.epochs = 10;
        cfg.net.sequence_length = 32;
        cfg.net.vocab_cap = 64;
        cfg.net.embed_dim = 32;
        cfg.net.hidden = 16;
        cfg.net.dense_units = 32;
        cfg.net.cnn_dense_units = 32;
        cfg.net.filters = 16;
        cfg.net.epochs = 8;
        cfg.net.batch_size = 16;
        if (embedding == "pretrained") cfg.pretrained_path = vectors_path;
        return experiment::run_experiment(cfg, split.train, split.test)
            .report.weighted_f1;
    };

    const std::vector<std::pair<std::string, std::string>> grid = {
        {"nb", "online"},        {"svm", "online"},  {"sgd", "online"},
        {"blstm", "online"},     {"cnn", "online"},  {"blstm", "pretrained"},
        {"cnn", "pretrained"}};
    bool ok = true;
    double min_f1 = 1.0;
    for (const auto& [model, embedding] : grid) {
        double f1 = run(model, embedding);
        min_f1 = std::min(min_f1, f1);
        if (f1 < 0.99) {
            ok = false;
            detail += model + "-" + embedding + " F1 " + std::to_string(f1) + "; ";
        }
    }
    double secs = seconds_since(t0);
    std::ostringstream note;
    note << "7 models, min F1 " << min_f1 << ", " << secs << "s";
    detail += note.str();
    if (secs >= 300.0) ok = false;
    return ok;
}

// ---------------------------------------------------------------------------
// 4. Distribution arithmetic: a corpus shaped like the real review data must
//    binarize to 737 negative / 3526 positive and reduce to 737/3152/3526.
// ---------------------------------------------------------------------------

bool criterion_distribution(std::string& detail) {
    const std::map<int, std::size_t> shape = {
        {-2, 40}, {-1, 697}, {0, 3152}, {1, 2184}, {2, 1342}};
    std::ostringstream xml;
    xml << "<Corpus>\n";
    int n = 0;
    for (const auto& [label, count] : shape)
        for (std::size_t i = 0; i < count; ++i) {
            xml << "<Sentence ID=\"s" << n << "\" Polarity=\"" << (label > 0 ? "+" : "")
                << label << "\">token word" << n % 7 << "</Sentence>\n";
            ++n;
        }
    xml << "</Corpus>\n";
    std::string bytes = xml.str();

    auto parsed = corpus::parse_corpus(bytes);
    if (!parsed.skipped.empty() || parsed.sentences.size() != 7415) {
        detail = "fixture parse produced " + std::to_string(parsed.sentences.size()) +
                 " sentences, " + std::to_string(parsed.skipped.size()) + " skips";
        return false;
    }
    auto five = data::from_sentences(parsed.sentences);
    for (const auto& [label, count] : shape)
        if (five.label_counts().at(label) != count) {
            detail = "five-class counts disagree with the fixture";
            return false;
        }

    auto binary = labels::binarize(five, labels::BinarizeStrategy::NR);
    auto bc = binary.label_counts();
    bool ok = bc.size() == 2 && bc.at(-1) == 737 && bc.at(1) == 3526;

    auto ternary = labels::to_ternary(five);
    auto tc = ternary.label_counts();
    ok = ok && tc.size() == 3 && tc.at(-1) == 737 && tc.at(0) == 3152 && tc.at(1) == 3526;

    detail = "binary -1:" + std::to_string(bc.at(-1)) + " +1:" + std::to_string(bc.at(1)) +
             ", ternary 0:" + std::to_string(tc.at(0));
    return ok;
}

// ---------------------------------------------------------------------------
// 5. Augmentation contracts: size bounds, label preservation, determinism,
//    and the floor(0.2 * L) substitution count for L in 1..30.
// ---------------------------------------------------------------------------

bool criterion_augmentation(std::string& detail) {
    auto letter = [](std::size_t i) {
        std::string s;
        s.push_back(char('a' + i % 26));
        s.push_back(char('a' + (i / 26) % 26));
        return s;
    };

    // (a) substitution count: every token has exactly one distinct synonym, so
    // the variant must differ from its source in exactly floor(0.2 * L) slots.
    augment::DictTranslator dict;
    for (std::size_t i = 0; i < 30; ++i)
        dict.add("tok" + letter(i), {"alt" + letter(i)});
    for (std::size_t L = 1; L <= 30; ++L) {
        data::Dataset one;
        one.set_scheme(data::Scheme::binary);
        one.meta["split"] = "train";
        std::string text;
        for (std::size_t t = 0; t < L; ++t) {
            if (t) text.push_back(' ');
            text += "tok" + letter(t);
        }
        one.rows.push_back({1, "r0", text});
        auto [out, report] = augment::synonym_augment(one, dict, 7);
        std::size_t k = static_cast<std::size_t>(std::floor(0.2 * double(L)));
        if (k == 0) {
            if (out.rows.size() != 1 || report.skipped != 1) {
                detail = "L=" + std::to_string(L) + ": expected a skip";
                return false;
            }
            continue;
        }
        if (out.rows.size() != 2) {
            detail = "L=" + std::to_string(L) + ": expected one variant";
            return false;
        }
        auto orig = data::tokens_of(out.rows[0].text);
        auto var = data::tokens_of(out.rows[1].text);
        std::size_t changed = 0;
        for (std::size_t t = 0; t < L; ++t)
            if (orig[t] != var[t]) ++changed;
        if (var.size() != L || changed != k) {
            detail = "L=" + std::to_string(L) + ": " + std::to_string(changed) +
                     " substitutions, expected " + std::to_string(k);
            return false;
        }
    }

    // (b) size and label bounds on an imbalanced corpus, for both methods.
    augment::DictTranslator shift;  // round trip lands on a different word
    for (std::size_t i = 0; i < 6; ++i) {
        shift.add("pos" + letter(i), {"mid" + letter(i)});
        shift.add("mid" + letter(i), {"alt" + letter(i)});
        shift.add("neg" + letter(i), {"nmid" + letter(i)});
        shift.add("nmid" + letter(i), {"nalt" + letter(i)});
    }
    data::Dataset imb;
    imb.set_scheme(data::Scheme::binary);
    imb.meta["split"] = "train";
    rng::Engine eng = rng::make_engine(5);
    for (int i = 0; i < 32; ++i) {
        int label = i < 24 ? 1 : -1;
        std::string stem = label > 0 ? "pos" : "neg";
        std::string text;
        for (int t = 0; t < 6; ++t) {
            if (t) text.push_back(' ');
            text += stem + letter(rng::below(eng, 6));
        }
        imb.rows.push_back({label, "i" + std::to_string(i), text});
    }
    auto before = imb.label_counts();

    auto check_bounds = [&](const data::Dataset& out, const char* method) {
        if (out.rows.size() < imb.rows.size() || out.rows.size() > 2 * imb.rows.size()) {
            detail = std::string(method) + ": output size out of [N, 2N]";
            return false;
        }
        auto after = out.label_counts();
        for (const auto& [label, count] : before) {
            if (after.at(label) < count || after.at(label) > 2 * count) {
                detail = std::string(method) + ": class " + std::to_string(label) +
                         " count out of bounds";
                return false;
            }
        }
        // Originals must survive, in order, as a subsequence of the output.
        std::size_t matched = 0;
        for (const auto& row : out.rows)
            if (matched < imb.rows.size() && row == imb.rows[matched]) ++matched;
        if (matched != imb.rows.size()) {
            detail = std::string(method) + ": originals not preserved";
            return false;
        }
        return true;
    };

    auto t1 = augment::translate_augment(imb, shift).first;
    auto t2 = augment::translate_augment(imb, shift).first;
    if (!check_bounds(t1, "translation")) return false;
    if (!(t1.rows == t2.rows)) {
        detail = "translation: not deterministic";
        return false;
    }

    auto s1 = augment::synonym_augment(imb, shift, 11).first;
    auto s2 = augment::synonym_augment(imb, shift, 11).first;
    augment::SynonymOptions threaded;
    threaded.threads = 4;
    auto s3 = augment::synonym_augment(imb, shift, 11, threaded).first;
    if (!check_bounds(s1, "synonym")) return false;
    if (!(s1.rows == s2.rows) || !(s1.rows == s3.rows)) {
        detail = "synonym: not deterministic across reruns/threads";
        return false;
    }

    detail = "floor rule L=1..30, bounds and determinism for both methods";
    return true;
}

// ---------------------------------------------------------------------------
// 6. Metric oracle: weighted F1 agrees with a brute-force per-example
//    recomputation to 1e-12, and with a hand-worked confusion matrix.
// ---------------------------------------------------------------------------

double brute_force_weighted_f1(const std::vector<std::size_t>& truth,
                               const std::vector<std::size_t>& pred, std::size_t C) {
    double weighted = 0.0;
    for (std::size_t c = 0; c < C; ++c) {
        double tp = 0, fp = 0, fn = 0, support = 0;
        for (std::size_t i = 0; i < truth.size(); ++i) {
            if (truth[i] == c) ++support;
            if (pred[i] == c && truth[i] == c) ++tp;
            if (pred[i] == c && truth[i] != c) ++fp;
            if (pred[i] != c && truth[i] == c) ++fn;
        }
        double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        double recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
        double f1 = precision + recall > 0
                        ? 2.0 * precision * recall / (precision + recall)
                        : 0.0;
        weighted += f1 * support / double(truth.size());
    }
    return weighted;
}

bool criterion_metrics(std::string& detail) {
    // Hand-worked fixture: confusion [[50,10],[5,35]].
    std::vector<std::size_t> truth, pred;
    auto emit = [&](std::size_t t, std::size_t p, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            truth.push_back(t);
            pred.push_back(p);
        }
    };
    emit(0, 0, 50);
    emit(0, 1, 10);
    emit(1, 0, 5);
    emit(1, 1, 35);
    auto report = metrics::evaluate(metrics::confusion(truth, pred, 2));
    if (std::abs(report.weighted_f1 - 1664.0 / 1955.0) > 1e-12 ||
        std::abs(report.accuracy - 0.85) > 1e-12) {
        detail = "fixture matrix disagrees with the hand computation";
        return false;
    }

    rng::Engine eng = rng::make_engine(2024);
    double max_diff = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t C = 2 + rng::below(eng, 4);
        std::size_t n = 20 + rng::below(eng, 181);
        std::vector<std::size_t> t(n), p(n);
        for (std::size_t i = 0; i < n; ++i) {
            t[i] = rng::below(eng, C);
            p[i] = rng::below(eng, C);
        }
        double lib = metrics::evaluate(metrics::confusion(t, p, C)).weighted_f1;
        double ref = brute_force_weighted_f1(t, p, C);
        max_diff = std::max(max_diff, std::abs(lib - ref));
    }
    std::ostringstream note;
    note << "100 random vectors, max |diff| " << max_diff;
    detail = note.str();
    return max_diff <= 1e-12;
}

// ---------------------------------------------------------------------------
// 7. Direction of effect: balanced and translation augmentation each beat
//    plain training on the noisy synthetic corpus in at least 4 of 5 seeds.
// ---------------------------------------------------------------------------

bool criterion_direction(std::string& detail) {
    int balanced_wins = 0, translation_wins = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto dc = support::direction_corpus(seed);
        std::istringstream table(dc.table);
        auto dict = augment::DictTranslator::load(table, "table");

        auto run = [&](const std::string& augmentation) {
            experiment::ExperimentConfig cfg;
            cfg.model = "blstm";
            cfg.augmentation = augmentation;
            cfg.validation_fraction = 0.0;
            cfg.seed = seed;
            cfg.net.sequence_length = 16;
            cfg.net.vocab_cap = 128;
            cfg.net.embed_dim = 16;
            cfg.net.hidden = 8;
            cfg.net.dense_units = 16;
            cfg.net.epochs = 6;
            cfg.net.batch_size = 16;
            return experiment::run_experiment(cfg, dc.train, dc.test, &dict)
                .report.weighted_f1;
        };

        double original = run("original");
        if (run("balanced") > original) ++balanced_wins;
        if (run("translation") > original) ++translation_wins;
    }
    std::ostringstream note;
    note << "balanced " << balanced_wins << "/5, translation " << translation_wins
         << "/5 wins over original";
    detail = note.str();
    return balanced_wins >= 4 && translation_wins >= 4;
}

// ---------------------------------------------------------------------------
// 8. Reproducibility: a grid cell rerun from its stored metadata alone gives
//    a bit-identical weighted F1.
// ---------------------------------------------------------------------------

experiment::ExperimentConfig config_from_metadata(const nlohmann::json& stored) {
    experiment::ExperimentConfig cfg;
    cfg.model = stored.at("model").get<std::string>();
    std::string embedding = stored.at("embedding").get<std::string>();
    cfg.embedding = embedding == "none" ? "online" : embedding;
    cfg.augmentation = stored.at("augmentation").get<std::string>();
    cfg.seed = stored.at("seed").get<std::uint64_t>();
    cfg.validation_fraction = stored.at("validation_fraction").get<double>();
    if (stored.contains("net")) cfg.net = checkpoint::config_from_json(stored.at("net"));
    if (stored.contains("pretrained"))
        cfg.pretrained_path = stored.at("pretrained").get<std::string>();
    if (stored.contains("linear")) {
        cfg.lin.loss = linear::parse_loss(stored.at("linear").at("loss").get<std::string>());
        cfg.lin.epochs = stored.at("linear").at("epochs").get<std::size_t>();
        cfg.lin.eta0 = stored.at("linear").at("eta0").get<double>();
        cfg.lin.lambda = stored.at("linear").at("lambda").get<double>();
    }
    return cfg;
}

bool criterion_reproducibility(std::string& detail) {
    auto corpus = support::separable_corpus(40, 77);
    labels::SplitSpec spec;
    spec.train_fraction = 0.75;
    spec.seed = 77;
    auto split = labels::split(corpus, spec);

    auto roundtrip = [&](experiment::ExperimentConfig cfg) {
        auto first = experiment::run_experiment(cfg, split.train, split.test);
        auto rebuilt = config_from_metadata(first.metadata.at("config"));
        auto second = experiment::run_experiment(rebuilt, split.train, split.test);
        return second.run_id == first.run_id &&
               second.report.weighted_f1 == first.report.weighted_f1 &&
               second.metadata.dump() == first.metadata.dump();
    };

    experiment::ExperimentConfig neural;
    neural.model = "blstm";
    neural.augmentation = "balanced";
    neural.validation_fraction = 0.1;
    neural.seed = 3;
    neural.net.sequence_length = 16;
    neural.net.vocab_cap = 64;
    neural.net.embed_dim = 16;
    neural.net.hidden = 8;
    neural.net.dense_units = 16;
    neural.net.epochs = 3;
    neural.net.batch_size = 16;
    if (!roundtrip(neural)) {
        detail = "neural cell did not reproduce from metadata";
        return false;
    }

    experiment::ExperimentConfig svm;
    svm.model = "svm";
    svm.validation_fraction = 0.0;
    svm.seed = 3;
    svm.lin.epochs = 5;
    if (!roundtrip(svm)) {
        detail = "svm cell did not reproduce from metadata";
        return false;
    }
    detail = "neural and svm cells rerun bit-identically from stored metadata";
    return true;
}

// ---------------------------------------------------------------------------

struct Criterion {
    int index;
    std::string name;
    std::function<bool(std::string&)> run;
};

}  // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "gradient correctness", criterion_gradients},
        {2, "architecture fidelity", criterion_architecture},
        {3, "end-to-end learnability", criterion_learnability},
        {4, "distribution arithmetic", criterion_distribution},
        {5, "augmentation contracts", criterion_augmentation},
        {6, "metric oracle", criterion_metrics},
        {7, "direction of effect", criterion_direction},
        {8, "reproducibility", criterion_reproducibility},
    };

    int failures = 0;
    for (auto& c : criteria) {
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (!ok) ++failures;
        std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << c.index << ": "
                  << c.name;
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << "\n";
        std::cout.flush();
    }
    return failures;
}
