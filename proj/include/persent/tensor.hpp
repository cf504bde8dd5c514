#ifndef PERSENT_TENSOR_HPP
#define PERSENT_TENSOR_HPP

#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "persent/errors.hpp"

// Dense row-major double tensor. Small and dumb on purpose: the op layer on
// top does all the interesting work.

namespace persent::nn {

using Shape = std::vector<std::size_t>;

inline std::string shape_str(const Shape& s) {
    std::ostringstream out;
    out << "[";
    for (std::size_t i = 0; i < s.size(); ++i) out << (i ? "," : "") << s[i];
    out << "]";
    return out.str();
}

inline std::size_t shape_numel(const Shape& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
}

struct Tensor {
    Shape shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(Shape s) : shape(std::move(s)), data(shape_numel(shape), 0.0) {}
    Tensor(Shape s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != shape_numel(shape))
            throw ShapeError("tensor data size " + std::to_string(data.size()) +
                             " does not match shape " + shape_str(shape));
    }

    static Tensor zeros(Shape s) { return Tensor(std::move(s)); }
    static Tensor full(Shape s, double v) {
        Tensor t(std::move(s));
        std::fill(t.data.begin(), t.data.end(), v);
        return t;
    }
    static Tensor scalar(double v) { return Tensor({1}, {v}); }

    std::size_t numel() const { return data.size(); }
    std::size_t rank() const { return shape.size(); }
    std::size_t dim(std::size_t i) const { return shape.at(i); }

    double& at(std::size_t i) { return data[i]; }
    double at(std::size_t i) const { return data[i]; }
    double& at(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
    double at(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) {
        return data[(i * shape[1] + j) * shape[2] + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const {
        return data[(i * shape[1] + j) * shape[2] + k];
    }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

inline void require_rank(const Tensor& t, std::size_t rank, const char* who) {
    if (t.rank() != rank)
        throw ShapeError(std::string(who) + ": expected rank " + std::to_string(rank) +
                         " tensor, got shape " + shape_str(t.shape));
}

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* who) {
    if (!a.same_shape(b))
        throw ShapeError(std::string(who) + ": shape mismatch " + shape_str(a.shape) +
                         " vs " + shape_str(b.shape));
}

// C[m,n] += A[m,k] * B[k,n]; ikj order keeps the inner loop contiguous.
inline void gemm_acc(std::size_t m, std::size_t k, std::size_t n, const double* A,
                     const double* B, double* C) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* a_row = A + i * k;
        double* c_row = C + i * n;
        for (std::size_t kk = 0; kk < k; ++kk) {
            double a = a_row[kk];
            if (a == 0.0) continue;
            const double* b_row = B + kk * n;
            for (std::size_t j = 0; j < n; ++j) c_row[j] += a * b_row[j];
        }
    }
}

// C[k,n] += A^T[k,m] * B[m,n] where A is [m,k].
inline void gemm_At_B_acc(std::size_t m, std::size_t k, std::size_t n, const double* A,
                          const double* B, double* C) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* a_row = A + i * k;
        const double* b_row = B + i * n;
        for (std::size_t kk = 0; kk < k; ++kk) {
            double a = a_row[kk];
            if (a == 0.0) continue;
            double* c_row = C + kk * n;
            for (std::size_t j = 0; j < n; ++j) c_row[j] += a * b_row[j];
        }
    }
}

// C[m,k] += A[m,n] * B^T[n,k] where B is [k,n].
inline void gemm_A_Bt_acc(std::size_t m, std::size_t n, std::size_t k, const double* A,
                          const double* B, double* C) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* a_row = A + i * n;
        double* c_row = C + i * k;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double* b_row = B + kk * n;
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += a_row[j] * b_row[j];
            c_row[kk] += acc;
        }
    }
}

}  // namespace persent::nn

#endif  // PERSENT_TENSOR_HPP
