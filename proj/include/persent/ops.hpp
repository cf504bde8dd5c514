#ifndef PERSENT_OPS_HPP
#define PERSENT_OPS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "persent/autodiff.hpp"
#include "persent/rng.hpp"
#include "persent/tensor.hpp"

// Differentiable ops. Every op validates shapes up front (ShapeError names
// both sides) and wires a backward closure that accumulates into whichever
// parents require gradients. Recurrent ops are fused: one node per sequence,
// hand-written BPTT inside, instead of thousands of per-step nodes.

namespace persent::nn::ops {

namespace detail {

inline void accumulate(const Var& p, const Tensor& g) {
    if (!p->requires_grad) return;
    for (std::size_t i = 0; i < g.numel(); ++i) p->grad.data[i] += g.data[i];
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace detail

// --- elementwise / reduction --------------------------------------------------

inline Var add(const Var& a, const Var& b) {
    require_same_shape(a->value, b->value, "add");
    Tensor out = a->value;
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] += b->value.data[i];
    return make_result(std::move(out), {a, b},
                       [a, b](Node& self) {
                           detail::accumulate(a, self.grad);
                           detail::accumulate(b, self.grad);
                       },
                       "add");
}

inline Var mul(const Var& a, const Var& b) {
    require_same_shape(a->value, b->value, "mul");
    Tensor out = a->value;
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] *= b->value.data[i];
    return make_result(std::move(out), {a, b},
                       [a, b](Node& self) {
                           if (a->requires_grad)
                               for (std::size_t i = 0; i < self.grad.numel(); ++i)
                                   a->grad.data[i] += self.grad.data[i] * b->value.data[i];
                           if (b->requires_grad)
                               for (std::size_t i = 0; i < self.grad.numel(); ++i)
                                   b->grad.data[i] += self.grad.data[i] * a->value.data[i];
                       },
                       "mul");
}

inline Var scale(const Var& a, double k) {
    Tensor out = a->value;
    for (double& v : out.data) v *= k;
    return make_result(std::move(out), {a},
                       [a, k](Node& self) {
                           if (a->requires_grad)
                               for (std::size_t i = 0; i < self.grad.numel(); ++i)
                                   a->grad.data[i] += k * self.grad.data[i];
                       },
                       "scale");
}

inline Var sum(const Var& a) {
    double total = 0.0;
    for (double v : a->value.data) total += v;
    return make_result(Tensor::scalar(total), {a},
                       [a](Node& self) {
                           if (a->requires_grad) {
                               double g = self.grad.data[0];
                               for (double& d : a->grad.data) d += g;
                           }
                       },
                       "sum");
}

inline Var relu(const Var& a) {
    Tensor out = a->value;
    for (double& v : out.data) v = v > 0.0 ? v : 0.0;
    return make_result(std::move(out), {a},
                       [a](Node& self) {
                           if (a->requires_grad)
                               for (std::size_t i = 0; i < self.grad.numel(); ++i)
                                   if (self.value.data[i] > 0.0)
                                       a->grad.data[i] += self.grad.data[i];
                       },
                       "relu");
}

inline Var sigmoid(const Var& a) {
    Tensor out = a->value;
    for (double& v : out.data) v = detail::sigmoid(v);
    return make_result(std::move(out), {a},
                       [a](Node& self) {
                           if (a->requires_grad)
                               for (std::size_t i = 0; i < self.grad.numel(); ++i) {
                                   double y = self.value.data[i];
                                   a->grad.data[i] += self.grad.data[i] * y * (1.0 - y);
                               }
                       },
                       "sigmoid");
}

inline Var tanh(const Var& a) {
    Tensor out = a->value;
    for (double& v : out.data) v = std::tanh(v);
    return make_result(std::move(out), {a},
                       [a](Node& self) {
                           if (a->requires_grad)
                               for (std::size_t i = 0; i < self.grad.numel(); ++i) {
                                   double y = self.value.data[i];
                                   a->grad.data[i] += self.grad.data[i] * (1.0 - y * y);
                               }
                       },
                       "tanh");
}

// --- dense ---------------------------------------------------------------------

// x:[B,in] W:[in,out] b:[out] -> [B,out]
inline Var dense(const Var& x, const Var& W, const Var& b) {
    require_rank(x->value, 2, "dense input");
    require_rank(W->value, 2, "dense weight");
    require_rank(b->value, 1, "dense bias");
    std::size_t B = x->value.dim(0), in = x->value.dim(1);
    std::size_t out_dim = W->value.dim(1);
    if (W->value.dim(0) != in)
        throw ShapeError("dense: input " + shape_str(x->value.shape) +
                         " incompatible with weight " + shape_str(W->value.shape));
    if (b->value.dim(0) != out_dim)
        throw ShapeError("dense: bias " + shape_str(b->value.shape) +
                         " incompatible with weight " + shape_str(W->value.shape));
    Tensor out({B, out_dim});
    for (std::size_t i = 0; i < B; ++i)
        for (std::size_t j = 0; j < out_dim; ++j) out.at(i, j) = b->value.at(j);
    gemm_acc(B, in, out_dim, x->value.data.data(), W->value.data.data(), out.data.data());
    return make_result(
        std::move(out), {x, W, b},
        [x, W, b, B, in, out_dim](Node& self) {
            const double* g = self.grad.data.data();
            if (x->requires_grad)
                gemm_A_Bt_acc(B, out_dim, in, g, W->value.data.data(),
                              x->grad.data.data());
            if (W->requires_grad)
                gemm_At_B_acc(B, in, out_dim, x->value.data.data(), g,
                              W->grad.data.data());
            if (b->requires_grad)
                for (std::size_t i = 0; i < B; ++i)
                    for (std::size_t j = 0; j < out_dim; ++j)
                        b->grad.data[j] += g[i * out_dim + j];
        },
        "dense");
}

// --- softmax / cross-entropy -----------------------------------------------------

// Row-wise stable softmax on [B,C].
inline Var softmax(const Var& x) {
    require_rank(x->value, 2, "softmax");
    std::size_t B = x->value.dim(0), C = x->value.dim(1);
    Tensor out({B, C});
    for (std::size_t i = 0; i < B; ++i) {
        double mx = x->value.at(i, 0);
        for (std::size_t j = 1; j < C; ++j) mx = std::max(mx, x->value.at(i, j));
        double z = 0.0;
        for (std::size_t j = 0; j < C; ++j) {
            double e = std::exp(x->value.at(i, j) - mx);
            out.at(i, j) = e;
            z += e;
        }
        for (std::size_t j = 0; j < C; ++j) out.at(i, j) /= z;
    }
    return make_result(std::move(out), {x},
                       [x, B, C](Node& self) {
                           if (!x->requires_grad) return;
                           for (std::size_t i = 0; i < B; ++i) {
                               double dot = 0.0;
                               for (std::size_t j = 0; j < C; ++j)
                                   dot += self.grad.at(i, j) * self.value.at(i, j);
                               for (std::size_t j = 0; j < C; ++j)
                                   x->grad.at(i, j) += self.value.at(i, j) *
                                                       (self.grad.at(i, j) - dot);
                           }
                       },
                       "softmax");
}

// Mean negative log-likelihood of the true class; probabilities are clipped
// below at 1e-12 so a confidently wrong model yields a finite loss.
inline constexpr double kProbClip = 1e-12;

inline Var cross_entropy(const Var& probs, const std::vector<int>& labels) {
    require_rank(probs->value, 2, "cross_entropy");
    std::size_t B = probs->value.dim(0), C = probs->value.dim(1);
    if (labels.size() != B)
        throw ShapeError("cross_entropy: " + std::to_string(labels.size()) +
                         " labels for batch shape " + shape_str(probs->value.shape));
    for (int y : labels)
        if (y < 0 || static_cast<std::size_t>(y) >= C)
            throw ShapeError("cross_entropy: label " + std::to_string(y) +
                             " outside " + std::to_string(C) + " classes");
    double loss = 0.0;
    for (std::size_t i = 0; i < B; ++i)
        loss -= std::log(std::max(probs->value.at(i, labels[i]), kProbClip));
    loss /= static_cast<double>(B);
    return make_result(Tensor::scalar(loss), {probs},
                       [probs, labels, B](Node& self) {
                           if (!probs->requires_grad) return;
                           double g = self.grad.data[0] / static_cast<double>(B);
                           for (std::size_t i = 0; i < B; ++i) {
                               double p = probs->value.at(i, labels[i]);
                               if (p >= kProbClip)
                                   probs->grad.at(i, labels[i]) -= g / p;
                           }
                       },
                       "cross_entropy");
}

// --- embedding -------------------------------------------------------------------

// E:[V,D], indices:[B*T] -> [B,T,D]. Row 0 is the padding row: it never
// receives gradient, so a zero-initialised pad row stays zero for good.
inline Var embedding_lookup(const Var& E, const std::vector<int>& indices,
                            std::size_t B, std::size_t T) {
    require_rank(E->value, 2, "embedding table");
    std::size_t V = E->value.dim(0), D = E->value.dim(1);
    if (indices.size() != B * T)
        throw ShapeError("embedding_lookup: " + std::to_string(indices.size()) +
                         " indices for batch " + std::to_string(B) + "x" +
                         std::to_string(T));
    Tensor out({B, T, D});
    for (std::size_t n = 0; n < B * T; ++n) {
        int idx = indices[n];
        if (idx < 0 || static_cast<std::size_t>(idx) >= V)
            throw ShapeError("embedding_lookup: index " + std::to_string(idx) +
                             " outside vocabulary of " + std::to_string(V));
        const double* row = E->value.data.data() + static_cast<std::size_t>(idx) * D;
        std::copy(row, row + D, out.data.data() + n * D);
    }
    return make_result(std::move(out), {E},
                       [E, indices, D](Node& self) {
                           if (!E->requires_grad) return;
                           for (std::size_t n = 0; n < indices.size(); ++n) {
                               int idx = indices[n];
                               if (idx == 0) continue;  // frozen pad row
                               double* grow =
                                   E->grad.data.data() + static_cast<std::size_t>(idx) * D;
                               const double* g = self.grad.data.data() + n * D;
                               for (std::size_t d = 0; d < D; ++d) grow[d] += g[d];
                           }
                       },
                       "embedding_lookup");
}

// --- dropout ---------------------------------------------------------------------

// Inverted dropout: surviving activations are scaled by 1/keep at train time
// so inference needs no rescaling. Identity when not training or rate == 0.
inline Var dropout(const Var& x, double rate, rng::Engine& eng, bool training) {
    if (rate < 0.0 || rate >= 1.0)
        throw ConfigError("dropout rate must be in [0,1), got " + std::to_string(rate));
    if (!training || rate == 0.0) return x;
    double keep = 1.0 - rate;
    auto mask = std::make_shared<std::vector<double>>(x->value.numel());
    Tensor out = x->value;
    for (std::size_t i = 0; i < out.numel(); ++i) {
        double m = rng::uniform(eng) >= rate ? 1.0 / keep : 0.0;
        (*mask)[i] = m;
        out.data[i] *= m;
    }
    return make_result(std::move(out), {x},
                       [x, mask](Node& self) {
                           if (x->requires_grad)
                               for (std::size_t i = 0; i < self.grad.numel(); ++i)
                                   x->grad.data[i] += self.grad.data[i] * (*mask)[i];
                       },
                       "dropout");
}

// --- convolution / pooling ---------------------------------------------------------

// x:[B,T,D] W:[K,D,F] b:[F] -> [B,T-K+1,F], valid padding, stride 1.
inline Var conv1d(const Var& x, const Var& W, const Var& b) {
    require_rank(x->value, 3, "conv1d input");
    require_rank(W->value, 3, "conv1d kernel");
    require_rank(b->value, 1, "conv1d bias");
    std::size_t B = x->value.dim(0), T = x->value.dim(1), D = x->value.dim(2);
    std::size_t K = W->value.dim(0), F = W->value.dim(2);
    if (W->value.dim(1) != D)
        throw ShapeError("conv1d: input " + shape_str(x->value.shape) +
                         " incompatible with kernel " + shape_str(W->value.shape));
    if (b->value.dim(0) != F)
        throw ShapeError("conv1d: bias " + shape_str(b->value.shape) +
                         " incompatible with kernel " + shape_str(W->value.shape));
    if (T < K)
        throw ShapeError("conv1d: sequence length " + std::to_string(T) +
                         " shorter than kernel " + std::to_string(K));
    std::size_t To = T - K + 1;
    Tensor out({B, To, F});
    for (std::size_t bi = 0; bi < B; ++bi)
        for (std::size_t t = 0; t < To; ++t) {
            double* yrow = out.data.data() + (bi * To + t) * F;
            for (std::size_t f = 0; f < F; ++f) yrow[f] = b->value.at(f);
            for (std::size_t k = 0; k < K; ++k) {
                const double* xrow = x->value.data.data() + (bi * T + t + k) * D;
                const double* wplane = W->value.data.data() + k * D * F;
                for (std::size_t d = 0; d < D; ++d) {
                    double xv = xrow[d];
                    if (xv == 0.0) continue;
                    const double* wrow = wplane + d * F;
                    for (std::size_t f = 0; f < F; ++f) yrow[f] += xv * wrow[f];
                }
            }
        }
    return make_result(
        std::move(out), {x, W, b},
        [x, W, b, B, T, D, K, F, To](Node& self) {
            const double* g = self.grad.data.data();
            for (std::size_t bi = 0; bi < B; ++bi)
                for (std::size_t t = 0; t < To; ++t) {
                    const double* grow = g + (bi * To + t) * F;
                    if (b->requires_grad)
                        for (std::size_t f = 0; f < F; ++f) b->grad.data[f] += grow[f];
                    for (std::size_t k = 0; k < K; ++k) {
                        const double* xrow =
                            x->value.data.data() + (bi * T + t + k) * D;
                        double* dxrow =
                            x->requires_grad
                                ? x->grad.data.data() + (bi * T + t + k) * D
                                : nullptr;
                        for (std::size_t d = 0; d < D; ++d) {
                            const double* wrow = W->value.data.data() + (k * D + d) * F;
                            if (dxrow) {
                                double acc = 0.0;
                                for (std::size_t f = 0; f < F; ++f)
                                    acc += grow[f] * wrow[f];
                                dxrow[d] += acc;
                            }
                            if (W->requires_grad && xrow[d] != 0.0) {
                                double* dwrow = W->grad.data.data() + (k * D + d) * F;
                                double xv = xrow[d];
                                for (std::size_t f = 0; f < F; ++f)
                                    dwrow[f] += xv * grow[f];
                            }
                        }
                    }
                }
        },
        "conv1d");
}

// x:[B,T,F] -> [B,(T-pool)/stride+1,F], max over each window.
inline Var maxpool1d(const Var& x, std::size_t pool, std::size_t stride) {
    require_rank(x->value, 3, "maxpool1d");
    if (pool == 0 || stride == 0)
        throw ConfigError("maxpool1d: pool and stride must be positive");
    std::size_t B = x->value.dim(0), T = x->value.dim(1), F = x->value.dim(2);
    if (T < pool)
        throw ShapeError("maxpool1d: sequence length " + std::to_string(T) +
                         " shorter than pool " + std::to_string(pool));
    std::size_t To = (T - pool) / stride + 1;
    Tensor out({B, To, F});
    auto arg = std::make_shared<std::vector<std::size_t>>(B * To * F);
    for (std::size_t bi = 0; bi < B; ++bi)
        for (std::size_t t = 0; t < To; ++t)
            for (std::size_t f = 0; f < F; ++f) {
                std::size_t best = bi * T * F + (t * stride) * F + f;
                double bv = x->value.data[best];
                for (std::size_t p = 1; p < pool; ++p) {
                    std::size_t cand = bi * T * F + (t * stride + p) * F + f;
                    if (x->value.data[cand] > bv) {
                        bv = x->value.data[cand];
                        best = cand;
                    }
                }
                out.at(bi, t, f) = bv;
                (*arg)[(bi * To + t) * F + f] = best;
            }
    return make_result(std::move(out), {x},
                       [x, arg](Node& self) {
                           if (!x->requires_grad) return;
                           for (std::size_t i = 0; i < self.grad.numel(); ++i)
                               x->grad.data[(*arg)[i]] += self.grad.data[i];
                       },
                       "maxpool1d");
}

// x:[B,T,F] -> [B,F], max over the first `lengths[b]` steps of each example;
// positions past the valid length never win. Lengths are clamped to [1,T] so
// an all-padding row still produces a defined output.
inline Var global_maxpool(const Var& x, const std::vector<std::size_t>& lengths) {
    require_rank(x->value, 3, "global_maxpool");
    std::size_t B = x->value.dim(0), T = x->value.dim(1), F = x->value.dim(2);
    if (lengths.size() != B)
        throw ShapeError("global_maxpool: " + std::to_string(lengths.size()) +
                         " lengths for batch shape " + shape_str(x->value.shape));
    Tensor out({B, F});
    auto arg = std::make_shared<std::vector<std::size_t>>(B * F);
    for (std::size_t bi = 0; bi < B; ++bi) {
        std::size_t len = std::clamp<std::size_t>(lengths[bi], 1, T);
        for (std::size_t f = 0; f < F; ++f) {
            std::size_t best = bi * T * F + f;
            double bv = x->value.data[best];
            for (std::size_t t = 1; t < len; ++t) {
                std::size_t cand = bi * T * F + t * F + f;
                if (x->value.data[cand] > bv) {
                    bv = x->value.data[cand];
                    best = cand;
                }
            }
            out.at(bi, f) = bv;
            (*arg)[bi * F + f] = best;
        }
    }
    return make_result(std::move(out), {x},
                       [x, arg](Node& self) {
                           if (!x->requires_grad) return;
                           for (std::size_t i = 0; i < self.grad.numel(); ++i)
                               x->grad.data[(*arg)[i]] += self.grad.data[i];
                       },
                       "global_maxpool");
}

// --- LSTM -----------------------------------------------------------------------

namespace detail {

// Saved forward activations for one direction of an LSTM sweep.
struct LstmTrace {
    Tensor i, f, g, o, c, h;  // each [T,B,H]
    explicit LstmTrace(std::size_t T, std::size_t B, std::size_t H)
        : i({T, B, H}), f({T, B, H}), g({T, B, H}), o({T, B, H}), c({T, B, H}),
          h({T, B, H}) {}
};

// One masked LSTM sweep. `fwd` picks time order; masked steps carry state
// unchanged. x:[B,T,D]; Wx:[D,4H]; Wh:[H,4H]; b:[4H]. Gate order i,f,g,o.
inline void lstm_sweep(const Tensor& x, const std::vector<std::size_t>& lengths,
                       const Tensor& Wx, const Tensor& Wh, const Tensor& bias,
                       bool fwd, LstmTrace& trace) {
    std::size_t B = x.dim(0), T = x.dim(1), D = x.dim(2);
    std::size_t H = Wh.dim(0);
    std::vector<double> z(B * 4 * H);
    std::vector<double> h_prev(B * H, 0.0), c_prev(B * H, 0.0);
    for (std::size_t s = 0; s < T; ++s) {
        std::size_t t = fwd ? s : T - 1 - s;
        // z = x_t Wx + h_prev Wh + b
        for (std::size_t bi = 0; bi < B; ++bi)
            for (std::size_t j = 0; j < 4 * H; ++j)
                z[bi * 4 * H + j] = bias.data[j];
        // Gather x_t rows into a contiguous view for gemm.
        for (std::size_t bi = 0; bi < B; ++bi) {
            const double* xrow = x.data.data() + (bi * T + t) * D;
            double* zrow = z.data() + bi * 4 * H;
            for (std::size_t d = 0; d < D; ++d) {
                double xv = xrow[d];
                if (xv == 0.0) continue;
                const double* wrow = Wx.data.data() + d * 4 * H;
                for (std::size_t j = 0; j < 4 * H; ++j) zrow[j] += xv * wrow[j];
            }
        }
        gemm_acc(B, H, 4 * H, h_prev.data(), Wh.data.data(), z.data());
        for (std::size_t bi = 0; bi < B; ++bi) {
            double* hp = h_prev.data() + bi * H;
            double* cp = c_prev.data() + bi * H;
            std::size_t base = (t * B + bi) * H;
            if (t >= lengths[bi]) {
                // Masked step: carry state, store it for the backward sweep.
                for (std::size_t u = 0; u < H; ++u) {
                    trace.h.data[base + u] = hp[u];
                    trace.c.data[base + u] = cp[u];
                    trace.i.data[base + u] = 0.0;
                    trace.f.data[base + u] = 0.0;
                    trace.g.data[base + u] = 0.0;
                    trace.o.data[base + u] = 0.0;
                }
                continue;
            }
            const double* zrow = z.data() + bi * 4 * H;
            for (std::size_t u = 0; u < H; ++u) {
                double iv = sigmoid(zrow[u]);
                double fv = sigmoid(zrow[H + u]);
                double gv = std::tanh(zrow[2 * H + u]);
                double ov = sigmoid(zrow[3 * H + u]);
                double cv = fv * cp[u] + iv * gv;
                double hv = ov * std::tanh(cv);
                trace.i.data[base + u] = iv;
                trace.f.data[base + u] = fv;
                trace.g.data[base + u] = gv;
                trace.o.data[base + u] = ov;
                trace.c.data[base + u] = cv;
                trace.h.data[base + u] = hv;
                cp[u] = cv;
                hp[u] = hv;
            }
        }
    }
}

// BPTT matching lstm_sweep. g_h:[T,B,H] is dL/dh_t for every step (zero at
// masked steps). Accumulates into dx [B,T,D] (nullable) and parameter grads
// (nullable). Previous-state values are read back from the trace.
inline void lstm_sweep_backward(const Tensor& x, const std::vector<std::size_t>& lengths,
                                const Tensor& Wx, const Tensor& Wh, bool fwd,
                                const LstmTrace& trace, const Tensor& g_h, Tensor* dx,
                                Tensor* dWx, Tensor* dWh, Tensor* db) {
    std::size_t B = x.dim(0), T = x.dim(1), D = x.dim(2);
    std::size_t H = Wh.dim(0);
    std::vector<double> dh(B * H, 0.0), dc(B * H, 0.0);
    std::vector<double> dz(B * 4 * H);
    std::vector<double> h_prev_step(B * H);
    for (std::size_t s = T; s-- > 0;) {
        std::size_t t = fwd ? s : T - 1 - s;
        std::fill(dz.begin(), dz.end(), 0.0);
        bool any_valid = false;
        for (std::size_t bi = 0; bi < B; ++bi) {
            std::size_t base = (t * B + bi) * H;
            double* dhr = dh.data() + bi * H;
            double* dcr = dc.data() + bi * H;
            for (std::size_t u = 0; u < H; ++u) dhr[u] += g_h.data[base + u];
            if (t >= lengths[bi]) continue;  // carry dh/dc through unchanged
            any_valid = true;
            // Previous state: the stored trace at the previously-processed
            // step, or zeros at the first step of the sweep.
            bool first = fwd ? t == 0 : t == T - 1;
            std::size_t pt = fwd ? t - 1 : t + 1;
            const double* cp = first ? nullptr : trace.c.data.data() + (pt * B + bi) * H;
            const double* hp = first ? nullptr : trace.h.data.data() + (pt * B + bi) * H;
            double* hps = h_prev_step.data() + bi * H;
            double* dzr = dz.data() + bi * 4 * H;
            for (std::size_t u = 0; u < H; ++u) {
                double iv = trace.i.data[base + u], fv = trace.f.data[base + u];
                double gv = trace.g.data[base + u], ov = trace.o.data[base + u];
                double cv = trace.c.data[base + u];
                double tc = std::tanh(cv);
                double c_old = cp ? cp[u] : 0.0;
                hps[u] = hp ? hp[u] : 0.0;
                double dho = dhr[u];
                double d_o = dho * tc;
                double dct = dcr[u] + dho * ov * (1.0 - tc * tc);
                double d_f = dct * c_old;
                double d_i = dct * gv;
                double d_g = dct * iv;
                dzr[u] = d_i * iv * (1.0 - iv);
                dzr[H + u] = d_f * fv * (1.0 - fv);
                dzr[2 * H + u] = d_g * (1.0 - gv * gv);
                dzr[3 * H + u] = d_o * ov * (1.0 - ov);
                // State grads handed to the previous step.
                dcr[u] = dct * fv;
                dhr[u] = 0.0;  // replaced below by dz . Wh^T
            }
        }
        if (!any_valid) continue;
        // dh_prev += dz Wh^T ; db += colsum dz ; dWh += h_prev^T dz ; x terms.
        for (std::size_t bi = 0; bi < B; ++bi) {
            if (t >= lengths[bi]) continue;
            const double* dzr = dz.data() + bi * 4 * H;
            double* dhr = dh.data() + bi * H;
            for (std::size_t u = 0; u < H; ++u) {
                const double* wrow = Wh.data.data() + u * 4 * H;
                double acc = 0.0;
                for (std::size_t j = 0; j < 4 * H; ++j) acc += dzr[j] * wrow[j];
                dhr[u] += acc;
            }
            if (db)
                for (std::size_t j = 0; j < 4 * H; ++j) db->data[j] += dzr[j];
            if (dWh) {
                const double* hps = h_prev_step.data() + bi * H;
                for (std::size_t u = 0; u < H; ++u) {
                    double hv = hps[u];
                    if (hv == 0.0) continue;
                    double* drow = dWh->data.data() + u * 4 * H;
                    for (std::size_t j = 0; j < 4 * H; ++j) drow[j] += hv * dzr[j];
                }
            }
            const double* xrow = x.data.data() + (bi * T + t) * D;
            if (dWx)
                for (std::size_t d = 0; d < D; ++d) {
                    double xv = xrow[d];
                    if (xv == 0.0) continue;
                    double* drow = dWx->data.data() + d * 4 * H;
                    for (std::size_t j = 0; j < 4 * H; ++j) drow[j] += xv * dzr[j];
                }
            if (dx) {
                double* dxrow = dx->data.data() + (bi * T + t) * D;
                for (std::size_t d = 0; d < D; ++d) {
                    const double* wrow = Wx.data.data() + d * 4 * H;
                    double acc = 0.0;
                    for (std::size_t j = 0; j < 4 * H; ++j) acc += dzr[j] * wrow[j];
                    dxrow[d] += acc;
                }
            }
        }
    }
}

inline void check_lstm_params(const Tensor& x, const Tensor& Wx, const Tensor& Wh,
                              const Tensor& b, const char* who) {
    require_rank(Wx, 2, who);
    require_rank(Wh, 2, who);
    require_rank(b, 1, who);
    std::size_t D = x.dim(x.rank() - 1);
    std::size_t H = Wh.dim(0);
    if (Wx.dim(0) != D || Wx.dim(1) != 4 * H || Wh.dim(1) != 4 * H ||
        b.dim(0) != 4 * H)
        throw ShapeError(std::string(who) + ": input " + shape_str(x.shape) +
                         " with Wx " + shape_str(Wx.shape) + ", Wh " +
                         shape_str(Wh.shape) + ", b " + shape_str(b.shape) +
                         " is not a consistent (D,H) LSTM parameter set");
}

}  // namespace detail

// Bidirectional LSTM over a padded batch. x:[B,T,D], per-example valid
// lengths; output [B,T,2H] = forward states then backward states, zero at
// padded positions. One fused node: BPTT runs inside the closure.
inline Var bilstm(const Var& x, const std::vector<std::size_t>& lengths,
                  const Var& Wx_f, const Var& Wh_f, const Var& b_f, const Var& Wx_b,
                  const Var& Wh_b, const Var& b_b) {
    require_rank(x->value, 3, "bilstm input");
    detail::check_lstm_params(x->value, Wx_f->value, Wh_f->value, b_f->value, "bilstm");
    detail::check_lstm_params(x->value, Wx_b->value, Wh_b->value, b_b->value, "bilstm");
    if (Wh_f->value.dim(0) != Wh_b->value.dim(0))
        throw ShapeError("bilstm: direction widths differ: Wh " +
                         shape_str(Wh_f->value.shape) + " vs " +
                         shape_str(Wh_b->value.shape));
    std::size_t B = x->value.dim(0), T = x->value.dim(1);
    std::size_t H = Wh_f->value.dim(0);
    if (lengths.size() != B)
        throw ShapeError("bilstm: " + std::to_string(lengths.size()) +
                         " lengths for batch shape " + shape_str(x->value.shape));
    auto clamped = std::make_shared<std::vector<std::size_t>>(lengths);
    for (auto& l : *clamped) l = std::min(l, T);

    auto tr_f = std::make_shared<detail::LstmTrace>(T, B, H);
    auto tr_b = std::make_shared<detail::LstmTrace>(T, B, H);
    detail::lstm_sweep(x->value, *clamped, Wx_f->value, Wh_f->value, b_f->value, true,
                       *tr_f);
    detail::lstm_sweep(x->value, *clamped, Wx_b->value, Wh_b->value, b_b->value, false,
                       *tr_b);

    Tensor out({B, T, 2 * H});
    for (std::size_t bi = 0; bi < B; ++bi)
        for (std::size_t t = 0; t < (*clamped)[bi]; ++t) {
            const double* hf = tr_f->h.data.data() + (t * B + bi) * H;
            const double* hb = tr_b->h.data.data() + (t * B + bi) * H;
            double* yrow = out.data.data() + (bi * T + t) * 2 * H;
            std::copy(hf, hf + H, yrow);
            std::copy(hb, hb + H, yrow + H);
        }

    return make_result(
        std::move(out), {x, Wx_f, Wh_f, b_f, Wx_b, Wh_b, b_b},
        [x, Wx_f, Wh_f, b_f, Wx_b, Wh_b, b_b, clamped, tr_f, tr_b, B, T, H](Node& self) {
            // Split the output gradient back into per-direction dL/dh planes.
            Tensor gf({T, B, H}), gb({T, B, H});
            for (std::size_t bi = 0; bi < B; ++bi)
                for (std::size_t t = 0; t < (*clamped)[bi]; ++t) {
                    const double* grow = self.grad.data.data() + (bi * T + t) * 2 * H;
                    std::copy(grow, grow + H, gf.data.data() + (t * B + bi) * H);
                    std::copy(grow + H, grow + 2 * H,
                              gb.data.data() + (t * B + bi) * H);
                }
            Tensor* dx = x->requires_grad ? &x->grad : nullptr;
            detail::lstm_sweep_backward(
                x->value, *clamped, Wx_f->value, Wh_f->value, true, *tr_f, gf, dx,
                Wx_f->requires_grad ? &Wx_f->grad : nullptr,
                Wh_f->requires_grad ? &Wh_f->grad : nullptr,
                b_f->requires_grad ? &b_f->grad : nullptr);
            detail::lstm_sweep_backward(
                x->value, *clamped, Wx_b->value, Wh_b->value, false, *tr_b, gb, dx,
                Wx_b->requires_grad ? &Wx_b->grad : nullptr,
                Wh_b->requires_grad ? &Wh_b->grad : nullptr,
                b_b->requires_grad ? &b_b->grad : nullptr);
        },
        "bilstm");
}

// Single LSTM step. x:[B,I], state:[B,2H] = concat(h,c); returns the new
// concat(h,c) as [B,2H].
inline Var lstm_cell(const Var& x, const Var& state, const Var& Wx, const Var& Wh,
                     const Var& b) {
    require_rank(x->value, 2, "lstm_cell input");
    require_rank(state->value, 2, "lstm_cell state");
    detail::check_lstm_params(x->value, Wx->value, Wh->value, b->value, "lstm_cell");
    std::size_t B = x->value.dim(0), I = x->value.dim(1);
    std::size_t H = Wh->value.dim(0);
    if (state->value.dim(0) != B || state->value.dim(1) != 2 * H)
        throw ShapeError("lstm_cell: state " + shape_str(state->value.shape) +
                         " does not match batch " + std::to_string(B) + ", width 2x" +
                         std::to_string(H));
    auto gates = std::make_shared<Tensor>(Shape{B, 4 * H});  // post-activation
    Tensor out({B, 2 * H});
    for (std::size_t bi = 0; bi < B; ++bi) {
        std::vector<double> z(4 * H);
        for (std::size_t j = 0; j < 4 * H; ++j) z[j] = b->value.data[j];
        const double* xrow = x->value.data.data() + bi * I;
        for (std::size_t d = 0; d < I; ++d) {
            double xv = xrow[d];
            if (xv == 0.0) continue;
            const double* wrow = Wx->value.data.data() + d * 4 * H;
            for (std::size_t j = 0; j < 4 * H; ++j) z[j] += xv * wrow[j];
        }
        const double* hrow = state->value.data.data() + bi * 2 * H;
        for (std::size_t u = 0; u < H; ++u) {
            double hv = hrow[u];
            if (hv == 0.0) continue;
            const double* wrow = Wh->value.data.data() + u * 4 * H;
            for (std::size_t j = 0; j < 4 * H; ++j) z[j] += hv * wrow[j];
        }
        const double* crow = hrow + H;
        double* grow = gates->data.data() + bi * 4 * H;
        double* yrow = out.data.data() + bi * 2 * H;
        for (std::size_t u = 0; u < H; ++u) {
            double iv = detail::sigmoid(z[u]);
            double fv = detail::sigmoid(z[H + u]);
            double gv = std::tanh(z[2 * H + u]);
            double ov = detail::sigmoid(z[3 * H + u]);
            double cv = fv * crow[u] + iv * gv;
            grow[u] = iv;
            grow[H + u] = fv;
            grow[2 * H + u] = gv;
            grow[3 * H + u] = ov;
            yrow[u] = ov * std::tanh(cv);
            yrow[H + u] = cv;
        }
    }
    return make_result(
        std::move(out), {x, state, Wx, Wh, b},
        [x, state, Wx, Wh, b, gates, B, I, H](Node& self) {
            for (std::size_t bi = 0; bi < B; ++bi) {
                const double* grow = gates->data.data() + bi * 4 * H;
                const double* yrow = self.value.data.data() + bi * 2 * H;
                const double* gy = self.grad.data.data() + bi * 2 * H;
                const double* hrow = state->value.data.data() + bi * 2 * H;
                const double* crow = hrow + H;
                std::vector<double> dz(4 * H);
                std::vector<double> dc_prev(H);
                for (std::size_t u = 0; u < H; ++u) {
                    double iv = grow[u], fv = grow[H + u];
                    double gv = grow[2 * H + u], ov = grow[3 * H + u];
                    double cv = yrow[H + u];
                    double tc = std::tanh(cv);
                    double dho = gy[u];
                    double d_o = dho * tc;
                    double dct = gy[H + u] + dho * ov * (1.0 - tc * tc);
                    double d_f = dct * crow[u];
                    double d_i = dct * gv;
                    double d_g = dct * iv;
                    dz[u] = d_i * iv * (1.0 - iv);
                    dz[H + u] = d_f * fv * (1.0 - fv);
                    dz[2 * H + u] = d_g * (1.0 - gv * gv);
                    dz[3 * H + u] = d_o * ov * (1.0 - ov);
                    dc_prev[u] = dct * fv;
                }
                if (b->requires_grad)
                    for (std::size_t j = 0; j < 4 * H; ++j) b->grad.data[j] += dz[j];
                if (x->requires_grad) {
                    double* dxr = x->grad.data.data() + bi * I;
                    for (std::size_t d = 0; d < I; ++d) {
                        const double* wrow = Wx->value.data.data() + d * 4 * H;
                        double acc = 0.0;
                        for (std::size_t j = 0; j < 4 * H; ++j) acc += dz[j] * wrow[j];
                        dxr[d] += acc;
                    }
                }
                if (Wx->requires_grad) {
                    const double* xr = x->value.data.data() + bi * I;
                    for (std::size_t d = 0; d < I; ++d) {
                        double xv = xr[d];
                        if (xv == 0.0) continue;
                        double* drow = Wx->grad.data.data() + d * 4 * H;
                        for (std::size_t j = 0; j < 4 * H; ++j) drow[j] += xv * dz[j];
                    }
                }
                if (Wh->requires_grad)
                    for (std::size_t u = 0; u < H; ++u) {
                        double hv = hrow[u];
                        if (hv == 0.0) continue;
                        double* drow = Wh->grad.data.data() + u * 4 * H;
                        for (std::size_t j = 0; j < 4 * H; ++j) drow[j] += hv * dz[j];
                    }
                if (state->requires_grad) {
                    double* dsr = state->grad.data.data() + bi * 2 * H;
                    for (std::size_t u = 0; u < H; ++u) {
                        const double* wrow = Wh->value.data.data() + u * 4 * H;
                        double acc = 0.0;
                        for (std::size_t j = 0; j < 4 * H; ++j) acc += dz[j] * wrow[j];
                        dsr[u] += acc;
                        dsr[H + u] += dc_prev[u];
                    }
                }
            }
        },
        "lstm_cell");
}

}  // namespace persent::nn::ops

#endif  // PERSENT_OPS_HPP
