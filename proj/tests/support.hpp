#ifndef PERSENT_TESTS_SUPPORT_HPP
#define PERSENT_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "persent/autodiff.hpp"
#include "persent/dataset.hpp"
#include "persent/rng.hpp"

namespace support {

namespace fs = std::filesystem;

// Self-deleting scratch directory for file-backed tests.
class TempDir {
public:
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "persent-test-XXXXXX").string();
        std::vector<char> buf(tmpl.begin(), tmpl.end());
        buf.push_back('\0');
        if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
        path_ = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --- finite-difference gradient checking -------------------------------------

struct GradCheck {
    double max_rel_err = 0.0;
    std::size_t checked = 0;
};

// `build` must rebuild the scalar loss graph from the current parameter
// values (deterministically). Analytic gradients from one backward pass are
// compared against central differences element by element.
inline GradCheck grad_check(const std::vector<persent::nn::Var>& params,
                            const std::function<persent::nn::Var()>& build,
                            double h = 1e-5) {
    using persent::nn::backward;
    using persent::nn::zero_grad;
    persent::nn::Var loss = build();
    zero_grad(params);
    backward(loss);
    GradCheck res;
    for (const auto& p : params) {
        for (std::size_t i = 0; i < p->value.numel(); ++i) {
            double orig = p->value.data[i];
            p->value.data[i] = orig + h;
            double fp = build()->value.data[0];
            p->value.data[i] = orig - h;
            double fm = build()->value.data[0];
            p->value.data[i] = orig;
            double fd = (fp - fm) / (2.0 * h);
            double an = p->has_grad() ? p->grad.data[i] : 0.0;
            double rel =
                std::abs(an - fd) / (std::max(std::abs(an), std::abs(fd)) + 1e-8);
            res.max_rel_err = std::max(res.max_rel_err, rel);
            ++res.checked;
        }
    }
    return res;
}

// Random tensor with entries in [lo, hi].
inline persent::nn::Tensor rand_tensor(persent::nn::Shape shape, persent::rng::Engine& eng,
                                       double lo = -1.0, double hi = 1.0) {
    persent::nn::Tensor t(std::move(shape));
    for (double& v : t.data) v = persent::rng::uniform(eng, lo, hi);
    return t;
}

// Random tensor whose values are distinct multiples of `gap` in shuffled
// order: max-pooling argmaxes sit far from finite-difference step sizes.
inline persent::nn::Tensor spread_tensor(persent::nn::Shape shape,
                                         persent::rng::Engine& eng, double gap = 0.01) {
    persent::nn::Tensor t(std::move(shape));
    std::vector<std::size_t> ranks(t.numel());
    for (std::size_t i = 0; i < ranks.size(); ++i) ranks[i] = i;
    persent::rng::shuffle(ranks, eng);
    for (std::size_t i = 0; i < t.numel(); ++i)
        t.data[i] = static_cast<double>(ranks[i]) * gap -
                    gap * static_cast<double>(t.numel()) / 2.0;
    return t;
}

// --- synthetic corpora ----------------------------------------------------------

// Perfectly separable binary corpus: each class draws from its own token
// pool. `per_class` sentences per label.
inline persent::data::Dataset separable_corpus(std::size_t per_class,
                                               std::uint64_t seed,
                                               std::size_t min_len = 8,
                                               std::size_t max_len = 16) {
    using namespace persent;
    rng::Engine eng = rng::make_engine(seed);
    data::Dataset ds;
    ds.set_scheme(data::Scheme::binary);
    std::size_t n = 0;
    for (int label : {-1, +1}) {
        const char* stem = label < 0 ? "bad" : "good";
        for (std::size_t i = 0; i < per_class; ++i) {
            std::size_t len = min_len + rng::below(eng, max_len - min_len + 1);
            std::string text;
            for (std::size_t t = 0; t < len; ++t) {
                if (t) text.push_back(' ');
                text += stem + std::to_string(rng::below(eng, 10));
            }
            ds.rows.push_back({label, "s" + std::to_string(n++), text});
        }
    }
    return ds;
}

// Corpus for the augmentation direction-of-effect check. The training split
// is imbalanced and written mostly with "canonical" class tokens; the test
// split is balanced and often uses "alternate" spellings that only the
// translation round trip introduces into training. A slice of train labels
// is flipped as noise.
struct DirectionCorpus {
    persent::data::Dataset train;
    persent::data::Dataset test;
    std::string table;  // canonical -> EN -> alternate round-trip table
};

inline DirectionCorpus direction_corpus(std::uint64_t seed, std::size_t majority = 120,
                                        std::size_t minority = 40,
                                        std::size_t test_per_class = 50,
                                        double alt_frac_train = 0.05,
                                        double alt_frac_test = 0.5,
                                        double noise = 0.08) {
    using namespace persent;
    constexpr std::size_t kWords = 6;
    rng::Engine eng = rng::derive(seed, 0xD1CEull);

    // Suffixes stay alphabetic so the text-cleaning pass (which strips digit
    // characters) leaves every token intact.
    auto suffix = [](std::size_t i) { return std::string(1, char('a' + i % 26)); };

    auto word = [&](bool pos, bool alt, std::size_t i) {
        const char* stem = pos ? (alt ? "shine" : "bright") : (alt ? "gloom" : "dark");
        return stem + suffix(i);
    };

    auto sentence = [&](bool pos, double alt_frac) {
        std::size_t len = 6 + rng::below(eng, 5);
        std::string text;
        for (std::size_t t = 0; t < len; ++t) {
            if (t) text.push_back(' ');
            if (rng::uniform(eng) < 0.4) {
                text += "fill" + suffix(rng::below(eng, 10));
            } else {
                bool alt = rng::uniform(eng) < alt_frac;
                text += word(pos, alt, rng::below(eng, kWords));
            }
        }
        return text;
    };

    DirectionCorpus out;
    out.train.set_scheme(data::Scheme::binary);
    out.train.meta["split"] = "train";
    out.test.set_scheme(data::Scheme::binary);
    out.test.meta["split"] = "test";

    std::size_t n = 0;
    for (std::size_t i = 0; i < majority; ++i)
        out.train.rows.push_back({+1, "tr" + std::to_string(n++), sentence(true, alt_frac_train)});
    for (std::size_t i = 0; i < minority; ++i)
        out.train.rows.push_back({-1, "tr" + std::to_string(n++), sentence(false, alt_frac_train)});
    for (auto& row : out.train.rows)
        if (rng::uniform(eng) < noise) row.label = -row.label;

    n = 0;
    for (std::size_t i = 0; i < test_per_class; ++i)
        out.test.rows.push_back({+1, "te" + std::to_string(n++), sentence(true, alt_frac_test)});
    for (std::size_t i = 0; i < test_per_class; ++i)
        out.test.rows.push_back({-1, "te" + std::to_string(n++), sentence(false, alt_frac_test)});

    std::ostringstream table;
    for (std::size_t i = 0; i < kWords; ++i) {
        table << word(true, false, i) << "\tenpos" << suffix(i) << "\n";
        table << "enpos" << suffix(i) << "\t" << word(true, true, i) << "\n";
        table << word(false, false, i) << "\tenneg" << suffix(i) << "\n";
        table << "enneg" << suffix(i) << "\t" << word(false, true, i) << "\n";
    }
    out.table = table.str();
    return out;
}

// word2vec-style text vector file (with header) covering `words`.
inline std::string vectors_file_text(const std::vector<std::string>& words,
                                     std::size_t dim, std::uint64_t seed) {
    using namespace persent;
    rng::Engine eng = rng::derive(seed, 0xFEC7ull);
    std::ostringstream out;
    out << words.size() << " " << dim << "\n";
    out.precision(17);
    for (const auto& w : words) {
        out << w;
        for (std::size_t d = 0; d < dim; ++d) out << " " << rng::uniform(eng, -0.5, 0.5);
        out << "\n";
    }
    return out.str();
}

}  // namespace support

#endif  // PERSENT_TESTS_SUPPORT_HPP
