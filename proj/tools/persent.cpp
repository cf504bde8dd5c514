// persent: Persian sentence-sentiment pipeline CLI.
//
// Verbs cover the whole flow: parse XML -> preprocess -> binarize -> split
// -> augment -> embed -> train/predict/evaluate, plus `matrix` to sweep the
// full augmentation x model grid and `report` to replay stored runs.
//
// Exit codes: 0 ok, 2 bad configuration, 3 bad data, 4 numerical failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "persent/augment.hpp"
#include "persent/checkpoint.hpp"
#include "persent/corpus.hpp"
#include "persent/dataset.hpp"
#include "persent/embed.hpp"
#include "persent/errors.hpp"
#include "persent/experiment.hpp"
#include "persent/hash.hpp"
#include "persent/http_translator.hpp"
#include "persent/labels.hpp"
#include "persent/metrics.hpp"
#include "persent/model.hpp"
#include "persent/preprocess.hpp"

namespace fs = std::filesystem;
using namespace persent;

namespace {

std::uint64_t default_seed() {
    if (const char* s = std::getenv("SENTIPERS_SEED")) {
        try {
            return std::stoull(s);
        } catch (...) {
            throw ConfigError(std::string("SENTIPERS_SEED is not a number: ") + s);
        }
    }
    return 0;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

data::Dataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset: " + path);
    return data::read_dataset(in, path);
}

void save_dataset(const data::Dataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    data::write_dataset(ds, out);
}

preprocess::LemmaDictionary load_lemmas(const std::string& path) {
    if (path.empty()) return {};
    return preprocess::LemmaDictionary::load_file(path);
}

// Builds the translation backend: a table file wins; otherwise
// TRANSLATOR_URL enables the REST client. Network use is opt-in only.
std::unique_ptr<augment::Translator> make_translator(const std::string& table,
                                                     std::size_t budget) {
    if (!table.empty())
        return std::make_unique<augment::DictTranslator>(
            augment::DictTranslator::load_file(table));
    if (auto cfg = augment::HttpTranslatorConfig::from_env()) {
        cfg->max_requests = budget;
        return std::make_unique<augment::HttpTranslator>(*cfg);
    }
    return nullptr;
}

void print_metrics(const metrics::MetricReport& rep, std::ostream& out) {
    out << metrics::to_key_values(rep);
}

struct NetFlags {
    std::size_t epochs = 5;
    std::size_t batch_size = 32;
    std::size_t sequence_length = 257;
    std::size_t vocab_cap = 2000;
    std::size_t embed_dim = 128;
    std::size_t hidden = 128;
    double lr = 1e-3;
    double dropout = 0.10;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--epochs", epochs, "training epochs");
        cmd->add_option("--batch-size", batch_size, "mini-batch size");
        cmd->add_option("--seq-len", sequence_length, "padded sequence length");
        cmd->add_option("--vocab-cap", vocab_cap, "vocabulary size cap");
        cmd->add_option("--embed-dim", embed_dim, "online embedding width");
        cmd->add_option("--hidden", hidden, "LSTM units per direction");
        cmd->add_option("--lr", lr, "Adam learning rate");
        cmd->add_option("--dropout", dropout, "dropout rate");
    }

    model::ModelConfig to_config() const {
        model::ModelConfig c;
        c.epochs = epochs;
        c.batch_size = batch_size;
        c.sequence_length = sequence_length;
        c.vocab_cap = vocab_cap;
        c.embed_dim = embed_dim;
        c.hidden = hidden;
        c.learning_rate = lr;
        c.dropout = dropout;
        return c;
    }
};

int run(int argc, char** argv) {
    CLI::App app{"Persian sentence-sentiment pipeline"};
    app.require_subcommand(1);

    // --- parse ---------------------------------------------------------------
    auto* cmd_parse = app.add_subcommand("parse", "XML corpus -> sentence dataset");
    std::string in_path, out_path, skip_report_path;
    std::string sentence_element = "Sentence", polarity_attr = "Polarity",
                id_attr = "ID";
    cmd_parse->add_option("--input", in_path, "corpus XML file")->required();
    cmd_parse->add_option("--output", out_path, "dataset TSV to write")->required();
    cmd_parse->add_option("--sentence-element", sentence_element,
                          "element (or /path suffix) holding one sentence");
    cmd_parse->add_option("--polarity-attr", polarity_attr, "polarity attribute");
    cmd_parse->add_option("--id-attr", id_attr, "sentence id attribute");
    cmd_parse->add_option("--skip-report", skip_report_path,
                          "write skipped-sentence report here");
    cmd_parse->callback([&] {
        corpus::Schema schema;
        schema.sentence_path = sentence_element;
        schema.polarity_attribute = polarity_attr;
        schema.id_attribute = id_attr;
        auto parsed = corpus::parse_corpus(read_file(in_path), schema);
        save_dataset(data::from_sentences(parsed.sentences), out_path);
        if (!skip_report_path.empty()) {
            std::ofstream rep(skip_report_path, std::ios::binary);
            if (!rep) throw DataError("cannot open for writing: " + skip_report_path);
            rep << corpus::skip_report(parsed);
        }
        std::cerr << "sentences: " << parsed.sentences.size()
                  << "  skipped: " << parsed.skipped.size() << "\n";
    });

    // --- stats ---------------------------------------------------------------
    auto* cmd_stats = app.add_subcommand("stats", "label histogram of a dataset");
    std::string stats_path;
    cmd_stats->add_option("--data", stats_path, "dataset TSV")->required();
    cmd_stats->callback([&] {
        data::Dataset ds = load_dataset(stats_path);
        std::cout << "total\t" << ds.rows.size() << "\n";
        for (const auto& [label, n] : ds.label_counts())
            std::cout << data::format_label(label) << "\t" << n << "\n";
    });

    // --- preprocess ------------------------------------------------------------
    auto* cmd_pre = app.add_subcommand("preprocess", "normalise and clean a dataset");
    std::string pre_in, pre_out, lemma_path;
    cmd_pre->add_option("--input", pre_in, "dataset TSV")->required();
    cmd_pre->add_option("--output", pre_out, "cleaned dataset TSV")->required();
    cmd_pre->add_option("--lemma-dict", lemma_path, "lemma table (surface<TAB>lemma)");
    cmd_pre->callback([&] {
        data::Dataset ds = load_dataset(pre_in);
        auto dict = load_lemmas(lemma_path);
        auto [cleaned, report] = preprocess::preprocess_dataset(ds, dict);
        save_dataset(cleaned, pre_out);
        std::cerr << "rows: " << report.input_count << " -> " << report.output_count
                  << "  dropped empty: " << report.dropped_empty << "\n";
    });

    // --- binarize ----------------------------------------------------------------
    auto* cmd_bin = app.add_subcommand("binarize", "five-class -> binary labels");
    std::string bin_in, bin_out, strategy = "nr";
    cmd_bin->add_option("--input", bin_in, "dataset TSV")->required();
    cmd_bin->add_option("--output", bin_out, "binary dataset TSV")->required();
    cmd_bin->add_option("--strategy", strategy, "neutral handling: nr|np|nn");
    cmd_bin->callback([&] {
        data::Dataset ds = load_dataset(bin_in);
        save_dataset(labels::binarize(ds, labels::parse_strategy(strategy)), bin_out);
    });

    // --- split ---------------------------------------------------------------------
    auto* cmd_split = app.add_subcommand("split", "stratified train/test split");
    std::string split_in, split_train, split_test;
    double train_fraction = 0.75;
    bool no_stratify = false;
    std::uint64_t split_seed = default_seed();
    cmd_split->add_option("--input", split_in, "dataset TSV")->required();
    cmd_split->add_option("--train", split_train, "train TSV to write")->required();
    cmd_split->add_option("--test", split_test, "test TSV to write")->required();
    cmd_split->add_option("--train-fraction", train_fraction, "train share (0,1)");
    cmd_split->add_flag("--no-stratify", no_stratify, "plain shuffled split");
    cmd_split->add_option("--seed", split_seed, "split seed");
    cmd_split->callback([&] {
        labels::SplitSpec spec;
        spec.train_fraction = train_fraction;
        spec.stratified = !no_stratify;
        spec.seed = split_seed;
        auto result = labels::split(load_dataset(split_in), spec);
        save_dataset(result.train, split_train);
        save_dataset(result.test, split_test);
        for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
        std::cerr << "train: " << result.train.rows.size()
                  << "  test: " << result.test.rows.size() << "\n";
    });

    // --- augment ---------------------------------------------------------------------
    auto* cmd_aug = app.add_subcommand("augment", "grow a training split");
    std::string aug_in, aug_out, aug_method = "balanced", aug_table;
    std::uint64_t aug_seed = default_seed();
    unsigned aug_threads = 1;
    std::size_t aug_budget = 10000;
    cmd_aug->add_option("--input", aug_in, "train split TSV")->required();
    cmd_aug->add_option("--output", aug_out, "augmented TSV")->required();
    cmd_aug->add_option("--method", aug_method, "balanced|translation|synonym");
    cmd_aug->add_option("--table", aug_table, "word<TAB>syn1,syn2,... table file");
    cmd_aug->add_option("--seed", aug_seed, "sampling seed");
    cmd_aug->add_option("--threads", aug_threads, "translator worker threads");
    cmd_aug->add_option("--budget", aug_budget, "max HTTP translation requests");
    cmd_aug->callback([&] {
        data::Dataset ds = load_dataset(aug_in);
        experiment::ExperimentConfig cfg;
        cfg.augmentation = aug_method;
        cfg.seed = aug_seed;
        cfg.translator_threads = aug_threads;
        auto translator = make_translator(aug_table, aug_budget);
        auto [grown, report] = experiment::apply_augmentation(ds, cfg, translator.get());
        save_dataset(grown, aug_out);
        if (report) std::cerr << report->to_string();
    });

    // --- embed ------------------------------------------------------------------------
    auto* cmd_embed = app.add_subcommand("embed", "vocabulary and vector-file tools");
    cmd_embed->require_subcommand(1);
    auto* cmd_bv = cmd_embed->add_subcommand("build-vocab", "frequency vocabulary");
    std::string bv_in, bv_out;
    std::size_t bv_max = 2000;
    cmd_bv->add_option("--input", bv_in, "train split TSV")->required();
    cmd_bv->add_option("--output", bv_out, "vocabulary file to write")->required();
    cmd_bv->add_option("--max-size", bv_max, "vocabulary cap (incl. <pad>/<unk>)");
    cmd_bv->callback([&] {
        embed::Vocabulary v = embed::build_vocab(load_dataset(bv_in), bv_max);
        v.save(bv_out);
        std::cerr << "vocabulary: " << v.size() << " words (" << v.content_id() << ")\n";
    });
    auto* cmd_el = cmd_embed->add_subcommand("load", "check vectors against a vocabulary");
    std::string el_vectors, el_vocab;
    std::uint64_t el_seed = default_seed();
    cmd_el->add_option("--vectors", el_vectors, "word2vec-style text vectors")
        ->required();
    cmd_el->add_option("--vocab", el_vocab, "vocabulary file")->required();
    cmd_el->add_option("--seed", el_seed, "seed for rows absent from the file");
    cmd_el->callback([&] {
        embed::Vocabulary v = embed::Vocabulary::load(el_vocab);
        auto loaded = embed::load_pretrained_file(el_vectors, v, el_seed);
        std::cout << "file_words\t" << loaded.file_word_count << "\n"
                  << "covered\t" << loaded.covered << "\n"
                  << "coverage\t" << loaded.coverage << "\n"
                  << "dim\t" << loaded.matrix.cols << "\n";
    });

    // --- train -------------------------------------------------------------------------
    auto* cmd_train = app.add_subcommand("train", "train a neural classifier");
    std::string tr_model = "blstm", tr_embedding = "online", tr_train, tr_test,
                tr_vectors, tr_save;
    double tr_valfrac = 0.1;
    std::uint64_t tr_seed = default_seed();
    NetFlags tr_net;
    cmd_train->add_option("--model", tr_model, "blstm|cnn");
    cmd_train->add_option("--embedding", tr_embedding, "online|pretrained");
    cmd_train->add_option("--train", tr_train, "train split TSV")->required();
    cmd_train->add_option("--test", tr_test, "test split TSV (report metrics)");
    cmd_train->add_option("--vectors", tr_vectors, "pretrained vector file");
    cmd_train->add_option("--save", tr_save, "checkpoint JSON to write");
    cmd_train->add_option("--validation-fraction", tr_valfrac,
                          "train share held out for model selection");
    cmd_train->add_option("--seed", tr_seed, "training seed");
    tr_net.add_to(cmd_train);
    cmd_train->callback([&] {
        data::Dataset train_ds = load_dataset(tr_train);
        data::ClassMap cmap = data::ClassMap::for_scheme(train_ds.scheme());

        data::Dataset fit = train_ds;
        std::optional<data::Dataset> val;
        if (tr_valfrac > 0.0) {
            labels::SplitSpec spec;
            spec.train_fraction = 1.0 - tr_valfrac;
            spec.seed = rng::mix(tr_seed ^ 0x5B117ull);
            auto s = labels::split(train_ds, spec);
            fit = std::move(s.train);
            val = std::move(s.test);
        }

        model::ModelConfig cfg = tr_net.to_config();
        cfg.kind = tr_model;
        cfg.embedding = tr_embedding;
        cfg.classes = cmap.num_classes;
        cfg.seed = tr_seed;

        embed::Vocabulary vocab = embed::build_vocab(fit, cfg.vocab_cap);
        embed::EmbeddingMatrix emb;
        if (tr_embedding == "pretrained") {
            if (tr_vectors.empty())
                throw ConfigError("--embedding pretrained needs --vectors");
            emb = embed::load_pretrained_file(tr_vectors, vocab, tr_seed).matrix;
        } else {
            emb = embed::random_embedding(vocab.size(), cfg.embed_dim, tr_seed);
        }

        model::SequenceClassifier clf(cfg, std::move(vocab), emb);
        model::TrainReport rep = model::train(clf, fit, val ? &*val : nullptr);
        for (const auto& e : rep.history) {
            std::cerr << "epoch " << e.epoch << "  loss " << e.train_loss << "  acc "
                      << e.train_accuracy;
            if (e.has_val) std::cerr << "  val_f1 " << e.val_weighted_f1;
            std::cerr << "\n";
        }
        if (!tr_save.empty()) checkpoint::save_model_file(clf, tr_save);
        if (!tr_test.empty()) {
            data::Dataset test_ds = load_dataset(tr_test);
            std::vector<std::size_t> y;
            for (const auto& r : test_ds.rows) y.push_back(cmap.index_of(r.label));
            auto cm = metrics::confusion(y, clf.predict_indices(test_ds),
                                         cmap.num_classes);
            print_metrics(metrics::evaluate(cm), std::cout);
        }
    });

    // --- predict -----------------------------------------------------------------------
    auto* cmd_pred = app.add_subcommand("predict", "label a dataset with a checkpoint");
    std::string pd_model, pd_data, pd_out;
    cmd_pred->add_option("--model", pd_model, "checkpoint JSON")->required();
    cmd_pred->add_option("--data", pd_data, "dataset TSV")->required();
    cmd_pred->add_option("--output", pd_out, "predictions TSV (default stdout)");
    cmd_pred->callback([&] {
        model::SequenceClassifier clf = checkpoint::load_model_file(pd_model);
        data::Dataset ds = load_dataset(pd_data);
        data::ClassMap cmap = data::ClassMap::for_scheme(ds.scheme());
        if (cmap.num_classes != clf.config().classes)
            throw ConfigError("dataset classes do not match the checkpoint");
        nn::Tensor probs = clf.predict_probs(ds);
        std::ofstream file;
        std::ostream* out = &std::cout;
        if (!pd_out.empty()) {
            file.open(pd_out, std::ios::binary);
            if (!file) throw DataError("cannot open for writing: " + pd_out);
            out = &file;
        }
        *out << "# predicted\tsource_id\tprobabilities\n";
        for (std::size_t i = 0; i < ds.rows.size(); ++i) {
            std::size_t best = 0;
            for (std::size_t c = 1; c < cmap.num_classes; ++c)
                if (probs.at(i, c) > probs.at(i, best)) best = c;
            *out << data::format_label(cmap.label_of(best)) << "\t"
                 << ds.rows[i].source_id << "\t";
            for (std::size_t c = 0; c < cmap.num_classes; ++c)
                *out << (c ? "," : "") << probs.at(i, c);
            *out << "\n";
        }
    });

    // --- evaluate -----------------------------------------------------------------------
    auto* cmd_eval = app.add_subcommand("evaluate", "score a checkpoint on a test split");
    std::string ev_model, ev_data;
    bool ev_csv = false;
    cmd_eval->add_option("--model", ev_model, "checkpoint JSON")->required();
    cmd_eval->add_option("--data", ev_data, "test split TSV")->required();
    cmd_eval->add_flag("--csv", ev_csv, "emit one CSV line instead of key=value");
    cmd_eval->callback([&] {
        model::SequenceClassifier clf = checkpoint::load_model_file(ev_model);
        data::Dataset ds = load_dataset(ev_data);
        data::ClassMap cmap = data::ClassMap::for_scheme(ds.scheme());
        if (cmap.num_classes != clf.config().classes)
            throw ConfigError("dataset classes do not match the checkpoint");
        std::vector<std::size_t> y;
        for (const auto& r : ds.rows) y.push_back(cmap.index_of(r.label));
        auto rep = metrics::evaluate(
            metrics::confusion(y, clf.predict_indices(ds), cmap.num_classes));
        if (ev_csv)
            std::cout << metrics::csv_header(rep.per_class.size()) << "\n"
                      << metrics::to_csv_row(rep) << "\n";
        else
            print_metrics(rep, std::cout);
    });

    // --- matrix -------------------------------------------------------------------------
    auto* cmd_matrix = app.add_subcommand("matrix", "augmentation x model grid");
    std::string mx_train, mx_test, mx_vectors, mx_table, mx_csv, mx_runs_dir;
    bool mx_synonym = false;
    std::uint64_t mx_seed = default_seed();
    double mx_valfrac = 0.1;
    std::size_t mx_budget = 10000;
    NetFlags mx_net;
    std::size_t mx_lin_epochs = 5;
    cmd_matrix->add_option("--train", mx_train, "train split TSV")->required();
    cmd_matrix->add_option("--test", mx_test, "test split TSV")->required();
    cmd_matrix->add_option("--pretrained", mx_vectors,
                           "vector file; adds the pretrained model columns");
    cmd_matrix->add_option("--table", mx_table, "translation table file");
    cmd_matrix->add_flag("--include-synonym", mx_synonym, "add the synonym row");
    cmd_matrix->add_option("--seed", mx_seed, "experiment seed");
    cmd_matrix->add_option("--validation-fraction", mx_valfrac, "validation share");
    cmd_matrix->add_option("--csv", mx_csv, "also write the grid as CSV here");
    cmd_matrix->add_option("--runs-dir", mx_runs_dir, "write per-run metadata JSONs");
    cmd_matrix->add_option("--budget", mx_budget, "max HTTP translation requests");
    cmd_matrix->add_option("--linear-epochs", mx_lin_epochs, "baseline SGD epochs");
    mx_net.add_to(cmd_matrix);
    cmd_matrix->callback([&] {
        experiment::MatrixOptions opts;
        opts.include_synonym = mx_synonym;
        opts.pretrained_path = mx_vectors;
        opts.translation_table = mx_table;
        opts.validation_fraction = mx_valfrac;
        opts.net = mx_net.to_config();
        opts.lin.epochs = mx_lin_epochs;
        opts.seed = mx_seed;
        auto translator = make_translator(mx_table, mx_budget);
        std::vector<experiment::RunResult> runs;
        auto grid = experiment::run_matrix(load_dataset(mx_train), load_dataset(mx_test),
                                           opts, translator.get(), &runs);
        std::cout << grid.to_text();
        for (const auto& line : grid.cells)
            for (const auto& cell : line)
                if (cell.failed)
                    std::cerr << "FAILED " << cell.augmentation << "/" << cell.model
                              << ": " << cell.error << "\n";
        if (!mx_csv.empty()) {
            std::ofstream out(mx_csv, std::ios::binary);
            if (!out) throw DataError("cannot open for writing: " + mx_csv);
            out << grid.to_csv();
        }
        if (!mx_runs_dir.empty()) {
            fs::create_directories(mx_runs_dir);
            for (const auto& run : runs) {
                std::string id = run.run_id.substr(run.run_id.find(':') + 1);
                std::ofstream out(fs::path(mx_runs_dir) / (id + ".json"),
                                  std::ios::binary);
                if (!out) throw DataError("cannot write run file in " + mx_runs_dir);
                out << run.metadata.dump(2) << "\n";
            }
        }
    });

    // --- report -------------------------------------------------------------------------
    auto* cmd_report = app.add_subcommand("report", "summarise stored runs");
    std::string rp_dir, rp_train, rp_test, rp_table;
    bool rp_rerun = false;
    cmd_report->add_option("--runs-dir", rp_dir, "directory of run JSONs")->required();
    cmd_report->add_flag("--rerun", rp_rerun,
                         "re-execute each run and require byte-identical metadata");
    cmd_report->add_option("--train", rp_train, "train TSV (needed for --rerun)");
    cmd_report->add_option("--test", rp_test, "test TSV (needed for --rerun)");
    cmd_report->add_option("--table", rp_table, "translation table (for --rerun)");
    cmd_report->callback([&] {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(rp_dir))
            if (entry.path().extension() == ".json") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty()) throw DataError("no run files in " + rp_dir);

        std::optional<data::Dataset> train_ds, test_ds;
        std::unique_ptr<augment::Translator> translator;
        if (rp_rerun) {
            if (rp_train.empty() || rp_test.empty())
                throw ConfigError("--rerun needs --train and --test");
            train_ds = load_dataset(rp_train);
            test_ds = load_dataset(rp_test);
            translator = make_translator(rp_table, 10000);
        }

        std::size_t mismatches = 0;
        for (const auto& file : files) {
            nlohmann::json j = nlohmann::json::parse(read_file(file.string()), nullptr,
                                                     false);
            if (j.is_discarded()) throw DataError(file.string() + ": not valid JSON");
            const auto& cfg_j = j.at("config");
            std::cout << cfg_j.at("augmentation").get<std::string>() << "\t"
                      << cfg_j.at("model").get<std::string>();
            if (cfg_j.at("embedding").get<std::string>() != "none")
                std::cout << "-" << cfg_j.at("embedding").get<std::string>();
            std::cout << "\t"
                      << j.at("result").at("weighted_f1").get<double>() * 100.0 << "\t"
                      << j.at("run_id").get<std::string>() << "\n";

            if (rp_rerun) {
                experiment::ExperimentConfig cfg;
                cfg.model = cfg_j.at("model").get<std::string>();
                std::string emb = cfg_j.at("embedding").get<std::string>();
                cfg.embedding = emb == "none" ? "online" : emb;
                cfg.augmentation = cfg_j.at("augmentation").get<std::string>();
                cfg.seed = cfg_j.at("seed").get<std::uint64_t>();
                cfg.validation_fraction = cfg_j.at("validation_fraction").get<double>();
                if (cfg_j.contains("pretrained"))
                    cfg.pretrained_path = cfg_j.at("pretrained").get<std::string>();
                if (cfg_j.contains("translation_table"))
                    cfg.translation_table =
                        cfg_j.at("translation_table").get<std::string>();
                if (cfg_j.contains("net")) {
                    cfg.net = checkpoint::config_from_json(cfg_j.at("net"));
                }
                if (cfg_j.contains("linear")) {
                    cfg.lin.epochs = cfg_j.at("linear").at("epochs").get<std::size_t>();
                    cfg.lin.eta0 = cfg_j.at("linear").at("eta0").get<double>();
                    cfg.lin.lambda = cfg_j.at("linear").at("lambda").get<double>();
                }
                auto res = experiment::run_experiment(cfg, *train_ds, *test_ds,
                                                      translator.get());
                std::string fresh = res.metadata.dump(2) + "\n";
                std::string stored = read_file(file.string());
                if (fresh != stored) {
                    ++mismatches;
                    std::cerr << "MISMATCH " << file.filename().string() << "\n";
                } else {
                    std::cerr << "ok " << file.filename().string() << "\n";
                }
            }
        }
        if (mismatches > 0)
            throw DataError(std::to_string(mismatches) +
                            " run(s) did not reproduce byte-identically");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const TranslatorError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
