// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace panoact {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string to_string(const Shape& shape);

struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// Raised when an activation or gradient becomes NaN/Inf.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// One record on the define-by-run tape. Parents are kept alive by the child,
/// so the graph lives exactly as long as the tensors that reference it.
struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;  // empty until first accumulation
    bool requires_grad = false;
    const char* op = "leaf";
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward;

    std::vector<double>& ensure_grad();
};

}  // namespace detail

/// Dense row-major tensor of doubles with reverse-mode autodiff.
///
/// Copies share the underlying node (handle semantics); use clone() for a
/// value copy.
class Tensor {
public:
    Tensor() = default;

    static Tensor zeros(Shape shape, bool requires_grad = false);
    static Tensor full(Shape shape, double value, bool requires_grad = false);
    static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
    static Tensor scalar(double value, bool requires_grad = false);

    bool defined() const { return static_cast<bool>(node_); }
    const Shape& shape() const;
    std::size_t rank() const { return shape().size(); }
    std::size_t dim(std::size_t axis) const;
    std::size_t numel() const;

    std::span<const double> data() const;
    /// Mutable access for leaves (parameters, inputs). Mutating a tensor that
    /// already feeds a recorded graph invalidates that graph.
    std::span<double> mutable_data();
    std::span<const double> grad() const;
    std::span<double> mutable_grad();
    bool has_grad() const;

    bool requires_grad() const;
    void set_requires_grad(bool flag);

    double item() const;
    double at(std::initializer_list<std::size_t> index) const;

    /// Reverse-mode sweep from this scalar; accumulates into every
    /// requires_grad leaf reachable from it.
    void backward() const;
    void zero_grad();

    /// Value copy without history.
    Tensor clone() const;
    /// Same values, cut from the graph.
    Tensor detach() const;

    const char* op_name() const;

    // Internal: construct an op output. Records parents and backward rule
    // only when grad mode is on and some parent requires grad.
    static Tensor make_result(const char* op, Shape shape, std::vector<double> value,
                              std::vector<Tensor> parents,
                              std::function<void(detail::Node&)> backward);
    detail::Node& node() const;

private:
    explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
    std::shared_ptr<detail::Node> node_;
};

/// Whether ops currently record backward rules (thread-local).
bool grad_enabled();

class NoGradGuard {
public:
    NoGradGuard();
    ~NoGradGuard();
    NoGradGuard(const NoGradGuard&) = delete;
    NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
    bool previous_;
};

}  // namespace panoact
