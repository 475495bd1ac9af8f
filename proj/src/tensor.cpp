// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace panoact {

namespace {
thread_local bool g_grad_enabled = true;

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}
}  // namespace

std::size_t numel(const Shape& shape) {
    std::size_t n = 1;
    for (auto e : shape) n *= e;
    return n;
}

std::string to_string(const Shape& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

std::vector<double>& detail::Node::ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
    return grad;
}

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
    for (auto e : shape) {
        if (e == 0) throw ShapeError("tensor extents must be positive, got " + to_string(shape));
    }
    if (panoact::numel(shape) != values.size()) {
        throw ShapeError("shape " + to_string(shape) + " needs " +
                         std::to_string(panoact::numel(shape)) + " values, got " +
                         std::to_string(values.size()));
    }
    auto node = std::make_shared<detail::Node>();
    node->shape = std::move(shape);
    node->value = std::move(values);
    node->requires_grad = requires_grad;
    return Tensor(std::move(node));
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) { return full(std::move(shape), 0.0, requires_grad); }

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
    const auto n = panoact::numel(shape);
    return from(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) { return from({1}, {value}, requires_grad); }

detail::Node& Tensor::node() const {
    if (!node_) throw std::logic_error("use of undefined tensor");
    return *node_;
}

const Shape& Tensor::shape() const { return node().shape; }

std::size_t Tensor::dim(std::size_t axis) const {
    const auto& s = shape();
    if (axis >= s.size()) {
        throw ShapeError("axis " + std::to_string(axis) + " out of range for shape " + to_string(s));
    }
    return s[axis];
}

std::size_t Tensor::numel() const { return node().value.size(); }
std::span<const double> Tensor::data() const { return node().value; }
std::span<double> Tensor::mutable_data() { return node().value; }
std::span<const double> Tensor::grad() const { return node().grad; }
std::span<double> Tensor::mutable_grad() { return node().ensure_grad(); }
bool Tensor::has_grad() const { return !node().grad.empty(); }
bool Tensor::requires_grad() const { return node().requires_grad; }
void Tensor::set_requires_grad(bool flag) { node().requires_grad = flag; }
const char* Tensor::op_name() const { return node().op; }

double Tensor::item() const {
    if (numel() != 1) throw ShapeError("item() on tensor of shape " + to_string(shape()));
    return node().value[0];
}

double Tensor::at(std::initializer_list<std::size_t> index) const {
    const auto& s = shape();
    if (index.size() != s.size()) throw ShapeError("index rank mismatch for shape " + to_string(s));
    std::size_t flat = 0;
    std::size_t axis = 0;
    for (auto i : index) {
        if (i >= s[axis]) throw ShapeError("index out of range for shape " + to_string(s));
        flat = flat * s[axis] + i;
        ++axis;
    }
    return node().value[flat];
}

void Tensor::zero_grad() { node().grad.clear(); }

Tensor Tensor::clone() const { return from(shape(), node().value, false); }
Tensor Tensor::detach() const { return clone(); }

Tensor Tensor::make_result(const char* op, Shape shape, std::vector<double> value,
                           std::vector<Tensor> parents, std::function<void(detail::Node&)> backward) {
    if (!all_finite(value)) {
        throw NumericError(std::string("non-finite value produced by op '") + op + "'");
    }
    Tensor out = from(std::move(shape), std::move(value), false);
    out.node_->op = op;
    if (!g_grad_enabled) return out;
    const bool any = std::any_of(parents.begin(), parents.end(),
                                 [](const Tensor& p) { return p.requires_grad(); });
    if (!any) return out;
    out.node_->requires_grad = true;
    out.node_->parents.reserve(parents.size());
    for (auto& p : parents) out.node_->parents.push_back(p.node_);
    out.node_->backward = std::move(backward);
    return out;
}

void Tensor::backward() const {
    auto& root = node();
    if (root.value.size() != 1) {
        throw ShapeError("backward() requires a scalar, got shape " + to_string(root.shape));
    }
    if (!root.requires_grad) return;

    // Iterative post-order DFS gives a topological order.
    std::vector<detail::Node*> order;
    std::unordered_set<detail::Node*> seen;
    std::vector<std::pair<detail::Node*, std::size_t>> stack{{&root, 0}};
    seen.insert(&root);
    while (!stack.empty()) {
        auto& [n, next] = stack.back();
        if (next < n->parents.size()) {
            detail::Node* p = n->parents[next++].get();
            if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(n);
            stack.pop_back();
        }
    }

    root.ensure_grad()[0] += 1.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        detail::Node* n = *it;
        if (!n->backward || n->grad.empty()) continue;
        n->backward(*n);
        for (auto& p : n->parents) {
            if (!p->grad.empty() && !all_finite(p->grad)) {
                throw NumericError(std::string("non-finite gradient flowing out of op '") + n->op + "'");
            }
        }
    }
    // Interior gradients are scratch; keep only leaf accumulators.
    for (auto* n : order) {
        if (n->backward) n->grad.clear();
    }
}

}  // namespace panoact
