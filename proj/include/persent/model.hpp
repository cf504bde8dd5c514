#ifndef PERSENT_MODEL_HPP
#define PERSENT_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "persent/dataset.hpp"
#include "persent/embed.hpp"
#include "persent/errors.hpp"
#include "persent/metrics.hpp"
#include "persent/ops.hpp"
#include "persent/rng.hpp"

// The two sequence classifiers, sharing one embedding front end:
//
//   blstm: bilstm -> global_maxpool -> dropout -> dense+relu -> dropout
//          -> dense+softmax                                   (6 layers)
//   cnn:   [conv+relu -> maxpool(2/1)] x2 -> conv+relu -> global_maxpool
//          -> dropout -> dense+sigmoid -> dense+softmax       (9 layers)

namespace persent::model {

struct ModelConfig {
    std::string kind = "blstm";        // blstm | cnn
    std::string embedding = "online";  // online | pretrained (provenance only)
    std::size_t sequence_length = 257;
    std::size_t vocab_cap = 2000;
    std::size_t embed_dim = 128;  // online table width
    std::size_t hidden = 128;     // LSTM units per direction
    std::size_t dense_units = 600;
    std::size_t cnn_dense_units = 256;
    std::vector<std::size_t> kernels = {4, 8, 16};
    std::size_t filters = 64;
    std::size_t pool = 2;
    std::size_t pool_stride = 1;
    double dropout = 0.10;
    std::size_t classes = 2;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t epochs = 10;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;

    void validate() const {
        if (kind != "blstm" && kind != "cnn")
            throw ConfigError("unknown model kind: " + kind);
        if (embedding != "online" && embedding != "pretrained")
            throw ConfigError("unknown embedding scheme: " + embedding);
        if (classes != 2 && classes != 5)
            throw ConfigError("classes must be 2 or 5, got " + std::to_string(classes));
        if (sequence_length == 0 || batch_size == 0)
            throw ConfigError("sequence_length and batch_size must be positive");
        if (dropout < 0.0 || dropout >= 1.0)
            throw ConfigError("dropout must be in [0,1)");
        if (kind == "cnn") {
            if (kernels.empty() || filters == 0)
                throw ConfigError("cnn needs kernels and filters");
            if (pool == 0 || pool_stride == 0)
                throw ConfigError("pool and pool_stride must be positive");
            // Shortest input the conv stack accepts: each conv eats k-1
            // steps and each interleaved pool (stride 1) another pool-1.
            std::size_t need = 1 + (kernels.size() - 1) * (pool - 1);
            for (std::size_t k : kernels) need += k - 1;
            if (sequence_length < need)
                throw ConfigError("sequence_length " + std::to_string(sequence_length) +
                                  " too short for conv stack (needs >= " +
                                  std::to_string(need) + ")");
        }
        if (kind == "blstm" && hidden == 0) throw ConfigError("hidden must be positive");
    }
};

namespace detail {

inline nn::Tensor glorot(nn::Shape shape, std::size_t fan_in, std::size_t fan_out,
                         rng::Engine& eng) {
    nn::Tensor t(std::move(shape));
    double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (double& v : t.data) v = rng::uniform(eng, -limit, limit);
    return t;
}

// LSTM bias with the forget gate set to one: standard trick that stops early
// training from flushing the cell state.
inline nn::Tensor lstm_bias(std::size_t H) {
    nn::Tensor b({4 * H});
    for (std::size_t u = 0; u < H; ++u) b.data[H + u] = 1.0;
    return b;
}

}  // namespace detail

class SequenceClassifier {
public:
    SequenceClassifier(ModelConfig cfg, embed::Vocabulary vocab,
                       const embed::EmbeddingMatrix& emb)
        : cfg_(std::move(cfg)), vocab_(std::move(vocab)) {
        cfg_.validate();
        if (emb.rows != vocab_.size())
            throw ConfigError("embedding rows " + std::to_string(emb.rows) +
                              " != vocabulary size " + std::to_string(vocab_.size()));
        if (emb.cols == 0) throw ConfigError("embedding dimension must be positive");
        embed_dim_ = emb.cols;
        nn::Tensor table({emb.rows, emb.cols}, emb.data);
        if (emb.trainable) {
            embedding_ = nn::parameter(std::move(table), "embedding");
            params_.push_back(embedding_);
        } else {
            embedding_ = nn::constant(std::move(table), "embedding");
        }
        rng::Engine eng = rng::derive(cfg_.seed, 0x1417ull);
        if (cfg_.kind == "blstm") build_blstm(eng);
        else build_cnn(eng);
    }

    const ModelConfig& config() const { return cfg_; }
    const embed::Vocabulary& vocabulary() const { return vocab_; }
    std::size_t embed_dim() const { return embed_dim_; }
    bool embedding_trainable() const { return embedding_->requires_grad; }

    // Trainable parameters, embedding included when it trains.
    std::vector<nn::Var>& parameters() { return params_; }

    // Every tensor, for checkpoints: embedding first, then layer weights.
    std::vector<std::pair<std::string, nn::Var>> named_tensors() {
        std::vector<std::pair<std::string, nn::Var>> out;
        out.emplace_back("embedding", embedding_);
        for (auto& [name, var] : layer_params_) out.emplace_back(name, var);
        return out;
    }

    std::vector<std::string> layer_summary() const {
        std::vector<std::string> out;
        std::ostringstream d;
        d << "dropout(" << cfg_.dropout << ")";
        if (cfg_.kind == "blstm") {
            out.push_back("bilstm(units=" + std::to_string(cfg_.hidden) +
                          " per direction)");
            out.push_back("global_maxpool");
            out.push_back(d.str());
            out.push_back("dense(" + std::to_string(cfg_.dense_units) + ", relu)");
            out.push_back(d.str());
            out.push_back("dense(" + std::to_string(cfg_.classes) + ", softmax)");
        } else {
            for (std::size_t i = 0; i < cfg_.kernels.size(); ++i) {
                out.push_back("conv1d(kernel=" + std::to_string(cfg_.kernels[i]) +
                              ", filters=" + std::to_string(cfg_.filters) + ", relu)");
                if (i + 1 < cfg_.kernels.size())
                    out.push_back("maxpool1d(pool=" + std::to_string(cfg_.pool) +
                                  ", stride=" + std::to_string(cfg_.pool_stride) + ")");
            }
            out.push_back("global_maxpool");
            out.push_back(d.str());
            out.push_back("dense(" + std::to_string(cfg_.cnn_dense_units) +
                          ", sigmoid)");
            out.push_back("dense(" + std::to_string(cfg_.classes) + ", softmax)");
        }
        return out;
    }

    // Remaining sequence length after each conv/pool stage, for length
    // bookkeeping and sanity checks.
    std::vector<std::size_t> conv_length_chain() const {
        std::vector<std::size_t> out;
        std::size_t len = cfg_.sequence_length;
        for (std::size_t i = 0; i < cfg_.kernels.size(); ++i) {
            len = len - (cfg_.kernels[i] - 1);
            out.push_back(len);
            if (i + 1 < cfg_.kernels.size()) {
                len = (len - cfg_.pool) / cfg_.pool_stride + 1;
                out.push_back(len);
            }
        }
        return out;
    }

    // indices: B*T batch (row-major); lengths: true token counts per row.
    nn::Var forward(const std::vector<int>& indices,
                    const std::vector<std::size_t>& lengths, std::size_t B,
                    bool training, rng::Engine& dropout_eng) {
        std::size_t T = cfg_.sequence_length;
        nn::Var x = nn::ops::embedding_lookup(embedding_, indices, B, T);
        if (cfg_.kind == "blstm") {
            nn::Var seq = nn::ops::bilstm(x, lengths, p("lstm_fwd_wx"), p("lstm_fwd_wh"),
                                          p("lstm_fwd_b"), p("lstm_bwd_wx"),
                                          p("lstm_bwd_wh"), p("lstm_bwd_b"));
            nn::Var pooled = nn::ops::global_maxpool(seq, lengths);
            nn::Var h = nn::ops::dropout(pooled, cfg_.dropout, dropout_eng, training);
            h = nn::ops::relu(nn::ops::dense(h, p("dense1_w"), p("dense1_b")));
            h = nn::ops::dropout(h, cfg_.dropout, dropout_eng, training);
            return nn::ops::softmax(nn::ops::dense(h, p("out_w"), p("out_b")));
        }
        std::vector<std::size_t> lens = lengths;
        nn::Var h = x;
        for (std::size_t i = 0; i < cfg_.kernels.size(); ++i) {
            std::string tag = "conv" + std::to_string(i + 1);
            h = nn::ops::relu(nn::ops::conv1d(h, p(tag + "_w"), p(tag + "_b")));
            for (auto& l : lens) l = l > cfg_.kernels[i] - 1 ? l - (cfg_.kernels[i] - 1) : 1;
            if (i + 1 < cfg_.kernels.size()) {
                h = nn::ops::maxpool1d(h, cfg_.pool, cfg_.pool_stride);
                // pool p / stride s turns length L into (L-p)/s + 1.
                for (auto& l : lens) {
                    std::size_t pooled = l >= cfg_.pool
                                             ? (l - cfg_.pool) / cfg_.pool_stride + 1
                                             : 1;
                    l = std::max<std::size_t>(pooled, 1);
                }
            }
        }
        nn::Var pooled = nn::ops::global_maxpool(h, lens);
        nn::Var d = nn::ops::dropout(pooled, cfg_.dropout, dropout_eng, training);
        d = nn::ops::sigmoid(nn::ops::dense(d, p("dense1_w"), p("dense1_b")));
        return nn::ops::softmax(nn::ops::dense(d, p("out_w"), p("out_b")));
    }

    // Probability matrix [N, classes] for a whole dataset, dropout off.
    nn::Tensor predict_probs(const data::Dataset& ds) {
        std::size_t N = ds.rows.size();
        nn::Tensor probs({N, cfg_.classes});
        rng::Engine dummy = rng::make_engine(0);
        std::size_t batch = cfg_.batch_size;
        for (std::size_t start = 0; start < N; start += batch) {
            std::size_t B = std::min(batch, N - start);
            std::vector<int> indices;
            std::vector<std::size_t> lengths;
            encode_batch(ds, start, B, indices, lengths);
            nn::Var out = forward(indices, lengths, B, false, dummy);
            for (std::size_t i = 0; i < B; ++i)
                for (std::size_t c = 0; c < cfg_.classes; ++c)
                    probs.at(start + i, c) = out->value.at(i, c);
        }
        return probs;
    }

    std::vector<std::size_t> predict_indices(const data::Dataset& ds) {
        nn::Tensor probs = predict_probs(ds);
        std::vector<std::size_t> out(ds.rows.size());
        for (std::size_t i = 0; i < ds.rows.size(); ++i) {
            std::size_t best = 0;
            for (std::size_t c = 1; c < cfg_.classes; ++c)
                if (probs.at(i, c) > probs.at(i, best)) best = c;
            out[i] = best;
        }
        return out;
    }

    void encode_batch(const data::Dataset& ds, std::size_t start, std::size_t B,
                      std::vector<int>& indices, std::vector<std::size_t>& lengths) const {
        std::size_t T = cfg_.sequence_length;
        indices.assign(B * T, embed::kPadIndex);
        lengths.assign(B, 0);
        for (std::size_t i = 0; i < B; ++i) {
            auto enc = embed::encode(data::tokens_of(ds.rows[start + i].text), vocab_, T);
            for (std::size_t t = 0; t < T; ++t)
                indices[i * T + t] = static_cast<int>(enc.indices[t]);
            lengths[i] = enc.true_length;
        }
    }

    // Deep copy / restore of every tensor value (grads not included).
    std::map<std::string, nn::Tensor> snapshot() {
        std::map<std::string, nn::Tensor> out;
        for (auto& [name, var] : named_tensors()) out[name] = var->value;
        return out;
    }
    void restore(const std::map<std::string, nn::Tensor>& snap) {
        for (auto& [name, var] : named_tensors()) {
            auto it = snap.find(name);
            if (it == snap.end())
                throw ConfigError("restore: missing tensor " + name);
            if (!(it->second.shape == var->value.shape))
                throw ShapeError("restore: tensor " + name + " has shape " +
                                 nn::shape_str(it->second.shape) + ", expected " +
                                 nn::shape_str(var->value.shape));
            var->value = it->second;
        }
    }

private:
    nn::Var p(const std::string& name) const {
        auto it = layer_params_.find(name);
        if (it == layer_params_.end())
            throw ConfigError("unknown model parameter: " + name);
        return it->second;
    }

    void add_param(const std::string& name, nn::Tensor t) {
        nn::Var v = nn::parameter(std::move(t), name);
        layer_params_.emplace(name, v);
        params_.push_back(v);
    }

    void build_blstm(rng::Engine& eng) {
        std::size_t D = embed_dim_, H = cfg_.hidden;
        for (const char* dir : {"fwd", "bwd"}) {
            std::string base = std::string("lstm_") + dir;
            add_param(base + "_wx", detail::glorot({D, 4 * H}, D, 4 * H, eng));
            add_param(base + "_wh", detail::glorot({H, 4 * H}, H, 4 * H, eng));
            add_param(base + "_b", detail::lstm_bias(H));
        }
        add_param("dense1_w",
                  detail::glorot({2 * H, cfg_.dense_units}, 2 * H, cfg_.dense_units, eng));
        add_param("dense1_b", nn::Tensor({cfg_.dense_units}));
        add_param("out_w", detail::glorot({cfg_.dense_units, cfg_.classes},
                                          cfg_.dense_units, cfg_.classes, eng));
        add_param("out_b", nn::Tensor({cfg_.classes}));
    }

    void build_cnn(rng::Engine& eng) {
        std::size_t in_ch = embed_dim_;
        for (std::size_t i = 0; i < cfg_.kernels.size(); ++i) {
            std::size_t K = cfg_.kernels[i];
            std::string tag = "conv" + std::to_string(i + 1);
            add_param(tag + "_w", detail::glorot({K, in_ch, cfg_.filters}, K * in_ch,
                                                 cfg_.filters, eng));
            add_param(tag + "_b", nn::Tensor({cfg_.filters}));
            in_ch = cfg_.filters;
        }
        add_param("dense1_w", detail::glorot({cfg_.filters, cfg_.cnn_dense_units},
                                             cfg_.filters, cfg_.cnn_dense_units, eng));
        add_param("dense1_b", nn::Tensor({cfg_.cnn_dense_units}));
        add_param("out_w", detail::glorot({cfg_.cnn_dense_units, cfg_.classes},
                                          cfg_.cnn_dense_units, cfg_.classes, eng));
        add_param("out_b", nn::Tensor({cfg_.classes}));
    }

    ModelConfig cfg_;
    embed::Vocabulary vocab_;
    std::size_t embed_dim_ = 0;
    nn::Var embedding_;
    std::map<std::string, nn::Var> layer_params_;
    std::vector<nn::Var> params_;
};

// --- Adam ----------------------------------------------------------------------

class Adam {
public:
    Adam(std::vector<nn::Var> params, double lr, double beta1 = 0.9,
         double beta2 = 0.999, double eps = 1e-8)
        : params_(std::move(params)), lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {
        for (const auto& p : params_) {
            m_.emplace_back(p->value.numel(), 0.0);
            v_.emplace_back(p->value.numel(), 0.0);
        }
    }

    void step() {
        ++t_;
        double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
        double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
        for (std::size_t i = 0; i < params_.size(); ++i) {
            nn::Node& p = *params_[i];
            if (!p.has_grad()) continue;
            for (std::size_t j = 0; j < p.value.numel(); ++j) {
                double g = p.grad.data[j];
                m_[i][j] = b1_ * m_[i][j] + (1.0 - b1_) * g;
                v_[i][j] = b2_ * v_[i][j] + (1.0 - b2_) * g * g;
                double mhat = m_[i][j] / c1;
                double vhat = v_[i][j] / c2;
                p.value.data[j] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
            }
        }
    }

private:
    std::vector<nn::Var> params_;
    double lr_, b1_, b2_, eps_;
    std::size_t t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

// --- training --------------------------------------------------------------------

struct EpochStats {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_weighted_f1 = 0.0;
    bool has_val = false;
};

struct TrainReport {
    std::vector<EpochStats> history;
    std::size_t best_epoch = 0;   // 1-based; 0 = never evaluated
    double best_val_f1 = 0.0;
    bool restored_best = false;
};

inline double grad_norm(const std::vector<nn::Var>& params) {
    double total = 0.0;
    for (const auto& p : params)
        if (p->has_grad())
            for (double g : p->grad.data) total += g * g;
    return std::sqrt(total);
}

// Mini-batch Adam training. When `val` is given, the epoch with the best
// validation weighted-F1 wins: its weights are restored at the end.
inline TrainReport train(SequenceClassifier& model, const data::Dataset& train_ds,
                         const data::Dataset* val = nullptr) {
    const ModelConfig& cfg = model.config();
    if (train_ds.rows.empty()) throw DataError("train: empty training set");
    data::ClassMap cmap = data::ClassMap::for_scheme(train_ds.scheme());
    if (cmap.num_classes != cfg.classes)
        throw ConfigError("dataset has " + std::to_string(cmap.num_classes) +
                          " classes but model expects " + std::to_string(cfg.classes));

    std::vector<int> y(train_ds.rows.size());
    for (std::size_t i = 0; i < train_ds.rows.size(); ++i)
        y[i] = static_cast<int>(cmap.index_of(train_ds.rows[i].label));

    std::vector<std::size_t> y_val;
    if (val) {
        if (val->scheme() != train_ds.scheme())
            throw ConfigError("train/validation scheme mismatch");
        for (const auto& row : val->rows) y_val.push_back(cmap.index_of(row.label));
    }

    TrainReport report;
    Adam opt(model.parameters(), cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_eps);
    std::map<std::string, nn::Tensor> best;

    std::vector<std::size_t> order(train_ds.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::size_t T = cfg.sequence_length;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        rng::Engine shuffle_eng = rng::derive(cfg.seed, 1000 + epoch);
        rng::Engine dropout_eng = rng::derive(cfg.seed, 2000 + epoch);
        rng::shuffle(order, shuffle_eng);

        double loss_sum = 0.0;
        std::size_t correct = 0, seen = 0, batch_no = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            ++batch_no;
            std::size_t B = std::min(cfg.batch_size, order.size() - start);
            std::vector<int> indices(B * T, embed::kPadIndex);
            std::vector<std::size_t> lengths(B);
            std::vector<int> labels(B);
            for (std::size_t i = 0; i < B; ++i) {
                std::size_t r = order[start + i];
                auto enc = embed::encode(data::tokens_of(train_ds.rows[r].text),
                                         model.vocabulary(), T);
                for (std::size_t t = 0; t < T; ++t)
                    indices[i * T + t] = static_cast<int>(enc.indices[t]);
                lengths[i] = enc.true_length;
                labels[i] = y[r];
            }
            nn::Var probs = model.forward(indices, lengths, B, true, dropout_eng);
            nn::Var loss = nn::ops::cross_entropy(probs, labels);
            double lv = loss->value.data[0];
            nn::zero_grad(model.parameters());
            nn::backward(loss);
            if (!std::isfinite(lv))
                throw NumericError("epoch " + std::to_string(epoch) + " batch " +
                                   std::to_string(batch_no) +
                                   ": loss is not finite (grad norm " +
                                   std::to_string(grad_norm(model.parameters())) + ")");
            opt.step();
            loss_sum += lv * static_cast<double>(B);
            seen += B;
            for (std::size_t i = 0; i < B; ++i) {
                std::size_t bestc = 0;
                for (std::size_t c = 1; c < cfg.classes; ++c)
                    if (probs->value.at(i, c) > probs->value.at(i, bestc)) bestc = c;
                if (static_cast<int>(bestc) == labels[i]) ++correct;
            }
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = loss_sum / static_cast<double>(seen);
        stats.train_accuracy = static_cast<double>(correct) / static_cast<double>(seen);
        if (val && !val->rows.empty()) {
            std::vector<std::size_t> pred = model.predict_indices(*val);
            auto cm = metrics::confusion(y_val, pred, cfg.classes);
            stats.val_weighted_f1 = metrics::weighted_f1(cm);
            stats.has_val = true;
            if (report.best_epoch == 0 || stats.val_weighted_f1 > report.best_val_f1) {
                report.best_epoch = epoch;
                report.best_val_f1 = stats.val_weighted_f1;
                best = model.snapshot();
            }
        }
        report.history.push_back(stats);
    }

    if (!best.empty()) {
        model.restore(best);
        report.restored_best = true;
    }
    return report;
}

}  // namespace persent::model

#endif  // PERSENT_MODEL_HPP
