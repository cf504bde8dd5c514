#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "persent/experiment.hpp"
#include "persent/labels.hpp"
#include "support.hpp"

using namespace persent;

namespace {

labels::SplitResult make_split(std::size_t per_class = 20, std::uint64_t seed = 5) {
    auto corpus = support::separable_corpus(per_class, seed);
    labels::SplitSpec spec;
    spec.train_fraction = 0.75;
    spec.seed = seed;
    return labels::split(corpus, spec);
}

model::ModelConfig tiny_net() {
    model::ModelConfig net;
    net.sequence_length = 16;
    net.vocab_cap = 64;
    net.embed_dim = 8;
    net.hidden = 4;
    net.dense_units = 8;
    net.cnn_dense_units = 8;
    net.kernels = {2, 2, 2};
    net.filters = 4;
    net.epochs = 2;
    net.batch_size = 8;
    return net;
}

experiment::ExperimentConfig baseline_cfg(const std::string& model) {
    experiment::ExperimentConfig cfg;
    cfg.model = model;
    cfg.validation_fraction = 0.0;
    cfg.lin.epochs = 4;
    return cfg;
}

experiment::ExperimentConfig neural_cfg(const std::string& model) {
    experiment::ExperimentConfig cfg;
    cfg.model = model;
    cfg.validation_fraction = 0.0;
    cfg.net = tiny_net();
    return cfg;
}

}  // namespace

TEST_CASE("experiment config validation", "[experiment]") {
    experiment::ExperimentConfig cfg;
    cfg.model = "tree";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.augmentation = "mixup";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.model = "nb";
    cfg.embedding = "pretrained";
    cfg.pretrained_path = "vecs.txt";
    CHECK_THROWS_WITH(cfg.validate(),
                      Catch::Matchers::ContainsSubstring("make no sense for model nb"));
    cfg = {};
    cfg.embedding = "pretrained";  // no vector file given
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.validation_fraction = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("input contracts are enforced with stage context", "[experiment]") {
    auto split = make_split();
    auto cfg = baseline_cfg("svm");

    SECTION("training data must carry split=train") {
        data::Dataset unsplit = split.train;
        unsplit.meta.erase("split");
        try {
            experiment::run_experiment(cfg, unsplit, split.test);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            std::string msg = e.what();
            CHECK(msg.find("stage validate:") == 0);
            CHECK(msg.find("split=train") != std::string::npos);
            CHECK(msg.find("split before augmenting or training") != std::string::npos);
        }
    }
    SECTION("evaluation data must be the test split") {
        CHECK_THROWS_WITH(experiment::run_experiment(cfg, split.train, split.train),
                          Catch::Matchers::ContainsSubstring("split=test"));
    }
    SECTION("schemes must agree") {
        data::Dataset ternary_test = split.test;
        ternary_test.set_scheme(data::Scheme::ternary);
        CHECK_THROWS_WITH(experiment::run_experiment(cfg, split.train, ternary_test),
                          Catch::Matchers::ContainsSubstring("schemes differ"));
    }
    SECTION("empty splits are data errors") {
        data::Dataset empty = split.train;
        empty.rows.clear();
        CHECK_THROWS_AS(experiment::run_experiment(cfg, empty, split.test), DataError);
    }
}

TEST_CASE("augmentation variants are applied per configuration", "[experiment]") {
    auto split = make_split();

    SECTION("original is a pass-through") {
        auto cfg = baseline_cfg("nb");
        auto [ds, rep] = experiment::apply_augmentation(split.train, cfg, nullptr);
        CHECK(ds.rows == split.train.rows);
        CHECK_FALSE(rep.has_value());
    }
    SECTION("balanced resamples to the median") {
        auto cfg = baseline_cfg("nb");
        cfg.augmentation = "balanced";
        auto [ds, rep] = experiment::apply_augmentation(split.train, cfg, nullptr);
        REQUIRE(rep.has_value());
        CHECK(rep->method == "balanced");
        auto counts = ds.label_counts();
        CHECK(counts.at(-1) == counts.at(1));
    }
    SECTION("translation without a backend is a config error") {
        auto cfg = baseline_cfg("nb");
        cfg.augmentation = "translation";
        CHECK_THROWS_WITH(experiment::apply_augmentation(split.train, cfg, nullptr),
                          Catch::Matchers::ContainsSubstring("translation backend"));
    }
    SECTION("synonym substitution runs through a dictionary backend") {
        augment::DictTranslator dict;
        for (int i = 0; i < 10; ++i) {
            dict.add("good" + std::to_string(i), {"fine" + std::to_string(i)});
            dict.add("bad" + std::to_string(i), {"poor" + std::to_string(i)});
        }
        auto cfg = baseline_cfg("nb");
        cfg.augmentation = "synonym";
        cfg.seed = 3;
        auto [ds, rep] = experiment::apply_augmentation(split.train, cfg, &dict);
        REQUIRE(rep.has_value());
        CHECK(rep->method == "synonym");
        CHECK(ds.rows.size() >= split.train.rows.size());
        CHECK(ds.rows.size() <= 2 * split.train.rows.size());
    }
}

TEST_CASE("baseline experiments produce complete, stable records", "[experiment]") {
    auto split = make_split();
    for (const std::string model : {"nb", "svm", "sgd"}) {
        auto cfg = baseline_cfg(model);
        auto res = experiment::run_experiment(cfg, split.train, split.test);
        CHECK(res.model_name == model);
        CHECK(res.run_id.rfind("fnv1a64:", 0) == 0);
        CHECK(res.report.total == split.test.rows.size());
        CHECK(res.report.weighted_f1 >= 0.0);
        CHECK(res.report.weighted_f1 <= 1.0);
        CHECK_FALSE(res.train_report.has_value());
        CHECK(res.metadata["config"]["embedding"] == "none");
        CHECK(res.metadata["run_id"] == res.run_id);
        CHECK_FALSE(res.metadata.contains("training"));

        auto again = experiment::run_experiment(cfg, split.train, split.test);
        CHECK(again.run_id == res.run_id);
        CHECK(again.metadata.dump() == res.metadata.dump());  // byte-identical
        CHECK(again.report.weighted_f1 == res.report.weighted_f1);
    }
}

TEST_CASE("neural experiments train, validate, and reproduce exactly", "[experiment]") {
    auto split = make_split();
    auto cfg = neural_cfg("blstm");
    cfg.validation_fraction = 0.25;
    cfg.seed = 9;

    auto res = experiment::run_experiment(cfg, split.train, split.test);
    CHECK(res.model_name == "blstm-online");
    REQUIRE(res.train_report.has_value());
    REQUIRE(res.train_report->history.size() == cfg.net.epochs);
    CHECK(res.train_report->history[0].has_val);
    CHECK(res.metadata.contains("training"));
    CHECK(res.metadata["config"]["validation_fraction"] == 0.25);

    auto again = experiment::run_experiment(cfg, split.train, split.test);
    CHECK(again.report.weighted_f1 == res.report.weighted_f1);  // bit-identical
    CHECK(again.metadata.dump() == res.metadata.dump());
}

TEST_CASE("neural run with balanced augmentation records the report", "[experiment]") {
    auto split = make_split();
    auto cfg = neural_cfg("cnn");
    cfg.augmentation = "balanced";
    auto res = experiment::run_experiment(cfg, split.train, split.test);
    CHECK(res.model_name == "cnn-online");
    REQUIRE(res.aug.has_value());
    CHECK(res.metadata["augmentation"]["method"] == "balanced");
}

TEST_CASE("the run id pins model, data, and seed", "[experiment]") {
    auto split = make_split();
    auto svm = experiment::run_experiment(baseline_cfg("svm"), split.train, split.test);
    auto sgd = experiment::run_experiment(baseline_cfg("sgd"), split.train, split.test);
    CHECK(svm.run_id != sgd.run_id);

    auto seeded = baseline_cfg("svm");
    seeded.seed = 123;
    auto other = experiment::run_experiment(seeded, split.train, split.test);
    CHECK(other.run_id != svm.run_id);

    auto smaller = make_split(12, 5);
    auto fewer =
        experiment::run_experiment(baseline_cfg("svm"), smaller.train, smaller.test);
    CHECK(fewer.run_id != svm.run_id);
}

TEST_CASE("the matrix sweeps every cell and survives failures", "[experiment]") {
    auto split = make_split();
    experiment::MatrixOptions opts;
    opts.net = tiny_net();
    opts.net.epochs = 1;
    opts.validation_fraction = 0.0;
    opts.lin.epochs = 3;

    std::vector<experiment::RunResult> runs;
    auto grid = experiment::run_matrix(split.train, split.test, opts, nullptr, &runs);

    REQUIRE(grid.rows == std::vector<std::string>{"original", "balanced", "translation"});
    REQUIRE(grid.cols ==
            std::vector<std::string>{"nb", "svm", "sgd", "blstm-online", "cnn-online"});
    REQUIRE(grid.cells.size() == 3);
    for (const auto& line : grid.cells) REQUIRE(line.size() == 5);

    // No translator: the translation row fails, everything else succeeds.
    for (std::size_t c = 0; c < 5; ++c) {
        CHECK_FALSE(grid.cells[0][c].failed);
        CHECK_FALSE(grid.cells[1][c].failed);
        CHECK(grid.cells[2][c].failed);
        CHECK(grid.cells[2][c].error.find("translation backend") != std::string::npos);
        CHECK_FALSE(grid.cells[0][c].run_id.empty());
    }
    CHECK(runs.size() == 10);

    auto csv = grid.to_csv();
    CHECK(csv.find("augmentation,nb,svm,sgd,blstm-online,cnn-online\n") == 0);
    CHECK(csv.find("FAILED") != std::string::npos);
    auto text = grid.to_text();
    CHECK(text.find("weighted-F1%") == 0);
    CHECK(text.find("translation") != std::string::npos);
}

TEST_CASE("the matrix grows synonym and pretrained lanes on demand", "[experiment]") {
    auto split = make_split(12, 7);
    support::TempDir tmp;
    std::vector<std::string> vocab_words;
    for (int i = 0; i < 10; ++i) {
        vocab_words.push_back("good" + std::to_string(i));
        vocab_words.push_back("bad" + std::to_string(i));
    }
    auto vec_path = tmp.file("vectors.txt");
    support::write_file(vec_path, support::vectors_file_text(vocab_words, 8, 4));

    augment::DictTranslator dict;
    for (int i = 0; i < 10; ++i) {
        dict.add("good" + std::to_string(i), {"fine" + std::to_string(i)});
        dict.add("bad" + std::to_string(i), {"poor" + std::to_string(i)});
        dict.add("fine" + std::to_string(i), {"good" + std::to_string(i)});
        dict.add("poor" + std::to_string(i), {"bad" + std::to_string(i)});
    }

    experiment::MatrixOptions opts;
    opts.include_synonym = true;
    opts.pretrained_path = vec_path;
    opts.net = tiny_net();
    opts.net.epochs = 1;
    opts.validation_fraction = 0.0;
    opts.lin.epochs = 2;

    auto grid = experiment::run_matrix(split.train, split.test, opts, &dict);
    REQUIRE(grid.rows.size() == 4);
    CHECK(grid.rows[3] == "synonym");
    REQUIRE(grid.cols.size() == 7);
    CHECK(grid.cols[5] == "blstm-pretrained");
    CHECK(grid.cols[6] == "cnn-pretrained");
    for (const auto& line : grid.cells)
        for (const auto& cell : line) {
            INFO(cell.model << " x " << cell.augmentation << ": " << cell.error);
            CHECK_FALSE(cell.failed);
        }
}
