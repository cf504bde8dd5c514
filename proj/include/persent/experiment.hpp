#ifndef PERSENT_EXPERIMENT_HPP
#define PERSENT_EXPERIMENT_HPP

#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "persent/augment.hpp"
#include "persent/bow.hpp"
#include "persent/checkpoint.hpp"
#include "persent/dataset.hpp"
#include "persent/embed.hpp"
#include "persent/errors.hpp"
#include "persent/hash.hpp"
#include "persent/labels.hpp"
#include "persent/linear.hpp"
#include "persent/metrics.hpp"
#include "persent/model.hpp"
#include "persent/naive_bayes.hpp"

// One experiment = augmentation variant x model, trained on the train split
// and scored (weighted F1) on the held-out test split. run_matrix sweeps the
// whole grid. Run metadata is deliberately timestamp-free so identical
// configurations rerun to byte-identical records.

namespace persent::experiment {

struct ExperimentConfig {
    std::string model = "blstm";            // nb | svm | sgd | blstm | cnn
    std::string embedding = "online";       // online | pretrained (neural only)
    std::string augmentation = "original";  // original | balanced | translation | synonym
    std::string pretrained_path;            // vector file, embedding=pretrained
    std::string translation_table;          // synonym table for the dict backend
    double validation_fraction = 0.1;       // carved from train for model selection
    model::ModelConfig net;                 // neural knobs; kind is set from `model`
    linear::LinearConfig lin;               // baseline knobs
    std::uint64_t seed = 0;
    unsigned translator_threads = 1;

    bool is_neural() const { return model == "blstm" || model == "cnn"; }

    void validate() const {
        if (model != "nb" && model != "svm" && model != "sgd" && model != "blstm" &&
            model != "cnn")
            throw ConfigError("unknown model: " + model);
        if (augmentation != "original" && augmentation != "balanced" &&
            augmentation != "translation" && augmentation != "synonym")
            throw ConfigError("unknown augmentation: " + augmentation);
        if (!is_neural() && embedding == "pretrained")
            throw ConfigError("pretrained embeddings make no sense for model " + model);
        if (embedding != "online" && embedding != "pretrained")
            throw ConfigError("unknown embedding scheme: " + embedding);
        if (embedding == "pretrained" && pretrained_path.empty())
            throw ConfigError("embedding=pretrained needs a vector file");
        if (validation_fraction < 0.0 || validation_fraction >= 1.0)
            throw ConfigError("validation_fraction must be in [0,1)");
    }
};

struct RunResult {
    std::string run_id;
    std::string model_name;
    metrics::MetricReport report;
    std::optional<augment::AugmentationReport> aug;
    std::optional<model::TrainReport> train_report;
    nlohmann::json metadata;
};

namespace detail {

// Re-throws the active exception with a stage prefix, preserving its type.
[[noreturn]] inline void rethrow_staged(const char* stage) {
    try {
        throw;
    } catch (const XmlError& e) {
        throw XmlError(e.byte_offset, std::string("stage ") + stage + ": " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("stage ") + stage + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(std::string("stage ") + stage + ": " + e.what());
    } catch (const NumericError& e) {
        throw NumericError(std::string("stage ") + stage + ": " + e.what());
    } catch (const TranslatorError& e) {
        throw TranslatorError(std::string("stage ") + stage + ": " + e.what());
    } catch (const Error& e) {
        throw Error(std::string("stage ") + stage + ": " + e.what());
    }
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (...) {
        rethrow_staged(name);
    }
}

inline std::string dataset_id(const data::Dataset& ds) {
    std::ostringstream out;
    data::write_dataset(ds, out);
    return hash::content_id(out.str());
}

inline nlohmann::json resolved_config(const ExperimentConfig& cfg,
                                      const std::string& train_id,
                                      const std::string& test_id) {
    nlohmann::json j;
    j["model"] = cfg.model;
    j["embedding"] = cfg.is_neural() ? cfg.embedding : "none";
    j["augmentation"] = cfg.augmentation;
    j["seed"] = cfg.seed;
    j["validation_fraction"] = cfg.validation_fraction;
    j["inputs"] = {{"train", train_id}, {"test", test_id}};
    if (cfg.is_neural()) {
        model::ModelConfig net = cfg.net;
        net.kind = cfg.model;
        net.embedding = cfg.embedding;
        net.seed = cfg.seed;
        j["net"] = checkpoint::config_to_json(net);
        if (cfg.embedding == "pretrained") j["pretrained"] = cfg.pretrained_path;
    } else if (cfg.model != "nb") {
        j["linear"] = {{"loss", cfg.model == "svm" ? "hinge" : "logistic"},
                       {"epochs", cfg.lin.epochs},
                       {"eta0", cfg.lin.eta0},
                       {"lambda", cfg.lin.lambda}};
    }
    if (!cfg.translation_table.empty()) j["translation_table"] = cfg.translation_table;
    return j;
}

}  // namespace detail

// Applies the configured augmentation to a train split. Exposed for the CLI.
inline std::pair<data::Dataset, std::optional<augment::AugmentationReport>>
apply_augmentation(const data::Dataset& train, const ExperimentConfig& cfg,
                   augment::Translator* translator) {
    if (cfg.augmentation == "original") return {train, std::nullopt};
    if (cfg.augmentation == "balanced") {
        auto [ds, rep] = augment::balance(train, augment::BalancePolicy::median(),
                                          rng::mix(cfg.seed ^ 0xBA7A9CEull));
        return {std::move(ds), rep};
    }
    if (!translator)
        throw ConfigError("augmentation '" + cfg.augmentation +
                          "' needs a translation backend (table file or URL)");
    if (cfg.augmentation == "translation") {
        augment::TranslateOptions opts;
        opts.threads = cfg.translator_threads;
        auto [ds, rep] = augment::translate_augment(train, *translator, opts);
        return {std::move(ds), rep};
    }
    augment::SynonymOptions opts;
    opts.threads = cfg.translator_threads;
    auto [ds, rep] = augment::synonym_augment(train, *translator,
                                              rng::mix(cfg.seed ^ 0x57A0B17ull), opts);
    return {std::move(ds), rep};
}

inline RunResult run_experiment(const ExperimentConfig& cfg, const data::Dataset& train,
                                const data::Dataset& test,
                                augment::Translator* translator = nullptr) {
    detail::stage("validate", [&] {
        cfg.validate();
        if (train.meta.count("split") == 0 || train.meta.at("split") != "train")
            throw ConfigError("training input must be a split=train dataset "
                              "(split before augmenting or training)");
        if (!test.is_test_split())
            throw ConfigError("evaluation input must be a split=test dataset");
        if (train.scheme() != test.scheme())
            throw ConfigError("train/test label schemes differ");
        if (train.rows.empty()) throw DataError("empty training split");
        if (test.rows.empty()) throw DataError("empty test split");
        return 0;
    });

    std::string train_id = detail::dataset_id(train);
    std::string test_id = detail::dataset_id(test);
    nlohmann::json resolved = detail::resolved_config(cfg, train_id, test_id);
    std::string run_id = hash::content_id(resolved.dump());

    // Model selection data is carved off before augmentation so validation
    // scores real sentences only.
    data::Dataset fit_ds = train;
    std::optional<data::Dataset> val_ds;
    if (cfg.is_neural() && cfg.validation_fraction > 0.0) {
        detail::stage("validation-carve", [&] {
            labels::SplitSpec spec;
            spec.train_fraction = 1.0 - cfg.validation_fraction;
            spec.seed = rng::mix(cfg.seed ^ 0x5B117ull);
            auto split = labels::split(train, spec);
            fit_ds = std::move(split.train);
            val_ds = std::move(split.test);
            return 0;
        });
    }

    std::optional<augment::AugmentationReport> aug_report;
    detail::stage("augment", [&] {
        auto [ds, rep] = apply_augmentation(fit_ds, cfg, translator);
        fit_ds = std::move(ds);
        aug_report = rep;
        return 0;
    });

    data::ClassMap cmap = data::ClassMap::for_scheme(train.scheme());
    std::vector<std::size_t> y_test;
    for (const auto& row : test.rows) y_test.push_back(cmap.index_of(row.label));

    RunResult result;
    result.run_id = run_id;
    result.model_name = cfg.model + (cfg.is_neural() ? "-" + cfg.embedding : "");
    result.aug = aug_report;

    std::vector<std::size_t> predictions;
    std::optional<model::TrainReport> train_report;

    if (cfg.is_neural()) {
        embed::Vocabulary vocab = detail::stage("vocabulary", [&] {
            return embed::build_vocab(fit_ds, cfg.net.vocab_cap);
        });
        embed::EmbeddingMatrix emb = detail::stage("embedding", [&] {
            if (cfg.embedding == "pretrained")
                return embed::load_pretrained_file(cfg.pretrained_path, vocab, cfg.seed)
                    .matrix;
            return embed::random_embedding(vocab.size(), cfg.net.embed_dim, cfg.seed);
        });
        model::ModelConfig net = cfg.net;
        net.kind = cfg.model;
        net.embedding = cfg.embedding;
        net.seed = cfg.seed;
        net.classes = cmap.num_classes;
        auto clf = detail::stage("train", [&] {
            model::SequenceClassifier m(net, std::move(vocab), emb);
            train_report =
                model::train(m, fit_ds, val_ds ? &*val_ds : nullptr);
            return m;
        });
        predictions = detail::stage("evaluate", [&] { return clf.predict_indices(test); });
    } else {
        auto space =
            detail::stage("features", [&] { return bow::FeatureSpace::build(fit_ds); });
        std::vector<std::size_t> y_fit;
        for (const auto& row : fit_ds.rows) y_fit.push_back(cmap.index_of(row.label));
        if (cfg.model == "nb") {
            auto X = bow::featurize_counts(fit_ds, space);
            nb::NaiveBayes clf;
            detail::stage("train",
                          [&] { clf.fit(X, y_fit, cmap.num_classes, space.size()); return 0; });
            predictions = detail::stage("evaluate", [&] {
                return clf.predict_all(bow::featurize_counts(test, space));
            });
        } else {
            auto X = bow::featurize_tfidf(fit_ds, space);
            linear::LinearConfig lin = cfg.lin;
            lin.loss = cfg.model == "svm" ? linear::Loss::hinge : linear::Loss::logistic;
            lin.seed = cfg.seed;
            linear::LinearModel clf;
            detail::stage("train", [&] {
                clf.fit(X, y_fit, cmap.num_classes, space.size(), lin);
                return 0;
            });
            predictions = detail::stage("evaluate", [&] {
                return clf.predict_all(bow::featurize_tfidf(test, space));
            });
        }
    }

    result.report = detail::stage("evaluate", [&] {
        return metrics::evaluate(metrics::confusion(y_test, predictions,
                                                    cmap.num_classes));
    });
    result.train_report = train_report;

    nlohmann::json meta;
    meta["run_id"] = run_id;
    meta["config"] = resolved;
    meta["result"] = {{"weighted_f1", result.report.weighted_f1},
                      {"macro_f1", result.report.macro_f1},
                      {"accuracy", result.report.accuracy},
                      {"total", result.report.total}};
    if (aug_report) {
        meta["augmentation"] = {{"method", aug_report->method},
                                {"input", aug_report->input_count},
                                {"output", aug_report->output_count},
                                {"skipped", aug_report->skipped},
                                {"failures", aug_report->failures}};
    }
    if (train_report) {
        nlohmann::json hist = nlohmann::json::array();
        for (const auto& e : train_report->history) {
            nlohmann::json h = {{"epoch", e.epoch},
                                {"train_loss", e.train_loss},
                                {"train_accuracy", e.train_accuracy}};
            if (e.has_val) h["val_weighted_f1"] = e.val_weighted_f1;
            hist.push_back(std::move(h));
        }
        meta["training"] = {{"history", std::move(hist)},
                            {"best_epoch", train_report->best_epoch},
                            {"restored_best", train_report->restored_best}};
    }
    result.metadata = std::move(meta);
    return result;
}

// --- the result grid ---------------------------------------------------------

struct Cell {
    std::string model;
    std::string augmentation;
    bool failed = false;
    std::string error;
    double weighted_f1 = 0.0;  // fraction, not percent
    std::string run_id;
};

struct ResultGrid {
    std::vector<std::string> rows;  // augmentation variants
    std::vector<std::string> cols;  // models
    std::vector<std::vector<Cell>> cells;

    std::string to_csv() const {
        std::ostringstream out;
        out << "augmentation";
        for (const auto& c : cols) out << ',' << c;
        out << '\n';
        for (std::size_t r = 0; r < rows.size(); ++r) {
            out << rows[r];
            for (const auto& cell : cells[r]) {
                out << ',';
                if (cell.failed) out << "FAILED";
                else
                    out << std::fixed << std::setprecision(3)
                        << cell.weighted_f1 * 100.0;
            }
            out << '\n';
        }
        return out.str();
    }

    std::string to_text() const {
        std::size_t label_w = 12;
        for (const auto& r : rows) label_w = std::max(label_w, r.size());
        std::size_t cell_w = 8;
        for (const auto& c : cols) cell_w = std::max(cell_w, c.size());
        std::ostringstream out;
        out << std::left << std::setw(static_cast<int>(label_w + 2)) << "weighted-F1%";
        for (const auto& c : cols)
            out << std::right << std::setw(static_cast<int>(cell_w + 2)) << c;
        out << '\n';
        for (std::size_t r = 0; r < rows.size(); ++r) {
            out << std::left << std::setw(static_cast<int>(label_w + 2)) << rows[r];
            for (const auto& cell : cells[r]) {
                std::ostringstream v;
                if (cell.failed) v << "FAILED";
                else v << std::fixed << std::setprecision(3) << cell.weighted_f1 * 100.0;
                out << std::right << std::setw(static_cast<int>(cell_w + 2)) << v.str();
            }
            out << '\n';
        }
        return out.str();
    }
};

struct MatrixOptions {
    bool include_synonym = false;
    std::string pretrained_path;
    std::string translation_table;
    double validation_fraction = 0.1;
    model::ModelConfig net;
    linear::LinearConfig lin;
    std::uint64_t seed = 0;
};

// Runs every augmentation x model combination. A failed cell records its
// error and leaves the rest of the grid alive.
inline ResultGrid run_matrix(const data::Dataset& train, const data::Dataset& test,
                             const MatrixOptions& opts,
                             augment::Translator* translator = nullptr,
                             std::vector<RunResult>* runs = nullptr) {
    ResultGrid grid;
    grid.rows = {"original", "balanced", "translation"};
    if (opts.include_synonym) grid.rows.push_back("synonym");
    grid.cols = {"nb", "svm", "sgd", "blstm-online", "cnn-online"};
    if (!opts.pretrained_path.empty()) {
        grid.cols.push_back("blstm-pretrained");
        grid.cols.push_back("cnn-pretrained");
    }

    for (const auto& row : grid.rows) {
        std::vector<Cell> line;
        for (const auto& col : grid.cols) {
            ExperimentConfig cfg;
            auto dash = col.find('-');
            cfg.model = dash == std::string::npos ? col : col.substr(0, dash);
            cfg.embedding = dash == std::string::npos ? "online" : col.substr(dash + 1);
            cfg.augmentation = row;
            cfg.pretrained_path = opts.pretrained_path;
            cfg.translation_table = opts.translation_table;
            cfg.validation_fraction = opts.validation_fraction;
            cfg.net = opts.net;
            cfg.lin = opts.lin;
            cfg.seed = opts.seed;
            Cell cell;
            cell.model = col;
            cell.augmentation = row;
            try {
                RunResult res = run_experiment(cfg, train, test, translator);
                cell.weighted_f1 = res.report.weighted_f1;
                cell.run_id = res.run_id;
                if (runs) runs->push_back(std::move(res));
            } catch (const Error& e) {
                cell.failed = true;
                cell.error = e.what();
            }
            line.push_back(std::move(cell));
        }
        grid.cells.push_back(std::move(line));
    }
    return grid;
}

}  // namespace persent::experiment

#endif  // PERSENT_EXPERIMENT_HPP
