#ifndef PERSENT_AUTODIFF_HPP
#define PERSENT_AUTODIFF_HPP

#include <functional>
#include <memory>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "persent/errors.hpp"
#include "persent/tensor.hpp"

// Tape-free reverse-mode autodiff: each op returns a Node holding its value,
// its parents, and a closure that pushes the node's gradient into the
// parents. backward() topologically sorts the graph (iteratively; sentence
// graphs are deep) and runs the closures in reverse.

namespace persent::nn {

struct Node;
using Var = std::shared_ptr<Node>;

struct Node {
    Tensor value;
    Tensor grad;  // allocated lazily by backward()
    bool requires_grad = false;
    std::vector<Var> parents;
    std::function<void(Node&)> backward_fn;  // may be empty (leaf / no grad path)
    std::string name;

    bool has_grad() const { return grad.numel() == value.numel() && grad.numel() > 0; }
    void ensure_grad() {
        if (!has_grad()) grad = Tensor::zeros(value.shape);
    }
};

inline Var constant(Tensor value, std::string name = "const") {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->name = std::move(name);
    return n;
}

inline Var parameter(Tensor value, std::string name) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->requires_grad = true;
    n->name = std::move(name);
    return n;
}

// Helper used by every op: the result needs gradients iff any input does.
inline bool any_requires_grad(const std::vector<Var>& parents) {
    for (const auto& p : parents)
        if (p && p->requires_grad) return true;
    return false;
}

inline Var make_result(Tensor value, std::vector<Var> parents,
                       std::function<void(Node&)> backward_fn, std::string name) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->requires_grad = any_requires_grad(parents);
    if (n->requires_grad) {
        n->parents = std::move(parents);
        n->backward_fn = std::move(backward_fn);
    }
    n->name = std::move(name);
    return n;
}

// Post-order DFS with an explicit stack; graphs from long sequences would
// blow the call stack otherwise.
inline std::vector<Node*> topo_order(const Var& root) {
    std::vector<Node*> order;
    std::unordered_set<Node*> visited;
    std::vector<std::pair<Node*, std::size_t>> stack;
    stack.emplace_back(root.get(), 0);
    visited.insert(root.get());
    while (!stack.empty()) {
        auto& [node, child] = stack.back();
        if (child < node->parents.size()) {
            Node* parent = node->parents[child].get();
            ++child;
            if (parent && !visited.count(parent)) {
                visited.insert(parent);
                stack.emplace_back(parent, 0);
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
    return order;
}

// Seeds the (scalar) root with gradient 1 and propagates.
inline void backward(const Var& root) {
    if (!root) throw ConfigError("backward: null root");
    if (root->value.numel() != 1)
        throw ShapeError("backward: root must be scalar, got shape " +
                         shape_str(root->value.shape));
    if (!root->requires_grad) return;
    std::vector<Node*> order = topo_order(root);
    for (Node* n : order)
        if (n->requires_grad) n->ensure_grad();
    root->grad.data[0] = 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backward_fn) n->backward_fn(*n);
    }
}

inline void zero_grad(const std::vector<Var>& params) {
    for (const auto& p : params)
        if (p && p->has_grad()) std::fill(p->grad.data.begin(), p->grad.data.end(), 0.0);
}

}  // namespace persent::nn

#endif  // PERSENT_AUTODIFF_HPP
