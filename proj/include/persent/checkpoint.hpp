#ifndef PERSENT_CHECKPOINT_HPP
#define PERSENT_CHECKPOINT_HPP

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "persent/errors.hpp"
#include "persent/model.hpp"

// Versioned JSON checkpoints. Doubles survive the round trip bit-exactly
// (serializer emits shortest round-trippable form), so save -> load -> predict
// reproduces the original model's outputs.

namespace persent::checkpoint {

inline constexpr const char* kFormat = "persent-model";
inline constexpr int kVersion = 1;

inline nlohmann::json config_to_json(const model::ModelConfig& c) {
    return {{"kind", c.kind},
            {"embedding", c.embedding},
            {"sequence_length", c.sequence_length},
            {"vocab_cap", c.vocab_cap},
            {"embed_dim", c.embed_dim},
            {"hidden", c.hidden},
            {"dense_units", c.dense_units},
            {"cnn_dense_units", c.cnn_dense_units},
            {"kernels", c.kernels},
            {"filters", c.filters},
            {"pool", c.pool},
            {"pool_stride", c.pool_stride},
            {"dropout", c.dropout},
            {"classes", c.classes},
            {"learning_rate", c.learning_rate},
            {"beta1", c.beta1},
            {"beta2", c.beta2},
            {"adam_eps", c.adam_eps},
            {"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"seed", c.seed}};
}

inline model::ModelConfig config_from_json(const nlohmann::json& j) {
    model::ModelConfig c;
    try {
        j.at("kind").get_to(c.kind);
        j.at("embedding").get_to(c.embedding);
        j.at("sequence_length").get_to(c.sequence_length);
        j.at("vocab_cap").get_to(c.vocab_cap);
        j.at("embed_dim").get_to(c.embed_dim);
        j.at("hidden").get_to(c.hidden);
        j.at("dense_units").get_to(c.dense_units);
        j.at("cnn_dense_units").get_to(c.cnn_dense_units);
        j.at("kernels").get_to(c.kernels);
        j.at("filters").get_to(c.filters);
        j.at("pool").get_to(c.pool);
        j.at("pool_stride").get_to(c.pool_stride);
        j.at("dropout").get_to(c.dropout);
        j.at("classes").get_to(c.classes);
        j.at("learning_rate").get_to(c.learning_rate);
        j.at("beta1").get_to(c.beta1);
        j.at("beta2").get_to(c.beta2);
        j.at("adam_eps").get_to(c.adam_eps);
        j.at("epochs").get_to(c.epochs);
        j.at("batch_size").get_to(c.batch_size);
        j.at("seed").get_to(c.seed);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("checkpoint config: ") + e.what());
    }
    return c;
}

inline void save_model(model::SequenceClassifier& m, std::ostream& out) {
    nlohmann::json j;
    j["format"] = kFormat;
    j["version"] = kVersion;
    j["kind"] = m.config().kind;
    j["config"] = config_to_json(m.config());
    j["embedding_trainable"] = m.embedding_trainable();
    j["vocabulary"] = {{"hash", m.vocabulary().content_id()},
                       {"words", m.vocabulary().words()}};
    nlohmann::json params = nlohmann::json::array();
    for (auto& [name, var] : m.named_tensors())
        params.push_back({{"name", name},
                          {"shape", var->value.shape},
                          {"data", var->value.data}});
    j["params"] = std::move(params);
    out << j.dump();
    if (!out) throw DataError("checkpoint write failed");
}

inline void save_model_file(model::SequenceClassifier& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    save_model(m, out);
}

inline model::SequenceClassifier load_model(std::istream& in,
                                            const std::string& name = "<stream>") {
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw DataError(name + ": checkpoint is not valid JSON");
    if (!j.contains("format") || j["format"] != kFormat)
        throw DataError(name + ": not a model checkpoint");
    if (!j.contains("version") || !j["version"].is_number_integer())
        throw DataError(name + ": missing checkpoint version");
    int version = j["version"].get<int>();
    if (version != kVersion)
        throw DataError(name + ": unsupported checkpoint version " +
                        std::to_string(version));

    model::ModelConfig cfg = config_from_json(j.at("config"));
    bool trainable = j.value("embedding_trainable", true);

    embed::Vocabulary vocab;
    try {
        auto words = j.at("vocabulary").at("words").get<std::vector<std::string>>();
        if (words.size() < 2 || words[0] != embed::kPadWord ||
            words[1] != embed::kUnkWord)
            throw DataError(name + ": vocabulary reserved rows missing");
        for (std::size_t i = 2; i < words.size(); ++i) vocab.append(words[i]);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(name + ": checkpoint vocabulary: " + e.what());
    }

    // The stored embedding tensor seeds construction; the rest of the
    // tensors are restored afterwards by name.
    std::map<std::string, nn::Tensor> tensors;
    try {
        for (const auto& p : j.at("params")) {
            std::string pname = p.at("name").get<std::string>();
            nn::Shape shape = p.at("shape").get<nn::Shape>();
            std::vector<double> data = p.at("data").get<std::vector<double>>();
            tensors[pname] = nn::Tensor(std::move(shape), std::move(data));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(name + ": checkpoint params: " + e.what());
    }
    auto eit = tensors.find("embedding");
    if (eit == tensors.end()) throw DataError(name + ": checkpoint lacks embedding");
    if (eit->second.rank() != 2 || eit->second.dim(0) != vocab.size())
        throw DataError(name + ": embedding shape does not match vocabulary");

    embed::EmbeddingMatrix emb;
    emb.rows = eit->second.dim(0);
    emb.cols = eit->second.dim(1);
    emb.data = eit->second.data;
    emb.trainable = trainable;

    model::SequenceClassifier m(std::move(cfg), std::move(vocab), emb);
    m.restore(tensors);
    return m;
}

inline model::SequenceClassifier load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    return load_model(in, path);
}

}  // namespace persent::checkpoint

#endif  // PERSENT_CHECKPOINT_HPP
