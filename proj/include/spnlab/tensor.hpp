#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "spnlab/error.hpp"

namespace spnlab {

using Shape = std::vector<int>;

inline int64_t shape_numel(const Shape& s) {
    int64_t n = 1;
    for (int d : s) n *= d;
    return n;
}

inline std::string shape_str(const Shape& s) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
    os << "]";
    return os.str();
}

// One node of the dynamic op graph. Data is immutable after construction;
// grad is the only mutable buffer. backward_fn reads this->grad and
// accumulates into the parents' grads.
template <class T>
struct NodeT {
    Shape shape;
    std::vector<T> data;
    std::vector<T> grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<NodeT>> parents;
    std::function<void(NodeT&)> backward_fn;

    int64_t numel() const { return static_cast<int64_t>(data.size()); }
    void ensure_grad() {
        if (grad.size() != data.size()) grad.assign(data.size(), T(0));
    }
};

template <class T>
class TensorT {
public:
    using Node = NodeT<T>;

    TensorT() = default;
    explicit TensorT(std::shared_ptr<Node> n) : node_(std::move(n)) {}

    static TensorT zeros(Shape shape, bool requires_grad = false) {
        return filled(std::move(shape), T(0), requires_grad);
    }
    static TensorT filled(Shape shape, T value, bool requires_grad = false) {
        auto n = std::make_shared<Node>();
        n->shape = std::move(shape);
        n->data.assign(static_cast<size_t>(shape_numel(n->shape)), value);
        n->requires_grad = requires_grad;
        return TensorT(n);
    }
    static TensorT from_data(Shape shape, std::vector<T> data, bool requires_grad = false) {
        if (shape_numel(shape) != static_cast<int64_t>(data.size()))
            throw ShapeError("tensor data length " + std::to_string(data.size()) +
                             " does not match shape " + shape_str(shape));
        auto n = std::make_shared<Node>();
        n->shape = std::move(shape);
        n->data = std::move(data);
        n->requires_grad = requires_grad;
        return TensorT(n);
    }
    static TensorT scalar(T value) { return from_data({1}, {value}); }

    bool defined() const { return node_ != nullptr; }
    const Shape& shape() const { return node_->shape; }
    int dim(int i) const { return node_->shape[static_cast<size_t>(i)]; }
    int rank() const { return static_cast<int>(node_->shape.size()); }
    int64_t numel() const { return node_->numel(); }

    std::vector<T>& data() { return node_->data; }
    const std::vector<T>& data() const { return node_->data; }
    std::vector<T>& grad() { return node_->grad; }
    const std::vector<T>& grad() const { return node_->grad; }

    bool requires_grad() const { return node_->requires_grad; }
    void set_requires_grad(bool v) {
        node_->requires_grad = v;
        if (!v) node_->grad.clear();
    }
    void zero_grad() {
        if (node_->requires_grad) node_->grad.assign(node_->data.size(), T(0));
    }

    T item() const {
        if (numel() != 1) throw ShapeError("item() requires a scalar tensor, got " + shape_str(shape()));
        return node_->data[0];
    }

    std::shared_ptr<Node> node() const { return node_; }

    // Leaf copy that shares no graph history.
    TensorT detach() const {
        auto n = std::make_shared<Node>();
        n->shape = node_->shape;
        n->data = node_->data;
        n->requires_grad = false;
        return TensorT(n);
    }

private:
    std::shared_ptr<Node> node_;
};

namespace detail {

// Post-order DFS over the op graph (iterative; graphs from long recurrent
// rollouts can be deep).
template <class T>
void topo_order(NodeT<T>* root, std::vector<NodeT<T>*>& order) {
    std::unordered_set<NodeT<T>*> visited;
    std::vector<std::pair<NodeT<T>*, size_t>> stack;
    stack.push_back({root, 0});
    visited.insert(root);
    while (!stack.empty()) {
        auto& [node, idx] = stack.back();
        if (idx < node->parents.size()) {
            NodeT<T>* p = node->parents[idx++].get();
            if (p->requires_grad && !visited.count(p)) {
                visited.insert(p);
                stack.push_back({p, 0});
            }
        } else {
            order.push_back(node);
            stack.pop_back();
        }
    }
}

}  // namespace detail

// Reverse-mode sweep from a scalar root. Populates grad on every reachable
// requires_grad tensor; each node's rule runs exactly once.
template <class T>
void backward(const TensorT<T>& root, bool check_finite = true) {
    if (root.numel() != 1) throw ShapeError("backward() requires a scalar root, got " + shape_str(root.shape()));
    NodeT<T>* r = root.node().get();
    if (!r->requires_grad) return;

    std::vector<NodeT<T>*> order;
    detail::topo_order(r, order);

    r->ensure_grad();
    r->grad[0] += T(1);

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        NodeT<T>* n = *it;
        if (n->backward_fn) {
            for (auto& p : n->parents)
                if (p->requires_grad) p->ensure_grad();
            n->backward_fn(*n);
        }
    }
    if (check_finite) {
        for (NodeT<T>* n : order) {
            for (T g : n->grad) {
                if (!std::isfinite(static_cast<double>(g)))
                    throw std::runtime_error("backward produced a non-finite gradient");
            }
        }
    }
}

using Tensor = TensorT<float>;
using TensorD = TensorT<double>;

}  // namespace spnlab
