// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "panoact/kernels.hpp"

namespace panoact {

namespace {

using detail::Node;

[[noreturn]] void shape_fail(const char* op, const Shape& a, const Shape& b) {
    throw ShapeError(std::string(op) + ": incompatible shapes " + to_string(a) + " and " + to_string(b));
}

// Gradient target for parent i, or nullptr when that parent is constant.
std::vector<double>* grad_of(Node& self, std::size_t i) {
    auto& p = self.parents.at(i);
    return p->requires_grad ? &p->ensure_grad() : nullptr;
}

const std::vector<double>& value_of(const Node& self, std::size_t i) { return self.parents.at(i)->value; }

std::vector<std::size_t> strides_of(const Shape& s) {
    std::vector<std::size_t> st(s.size(), 1);
    for (std::size_t i = s.size(); i-- > 1;) st[i - 1] = st[i] * s[i];
    return st;
}

// Flat offsets into each operand for every output element.
struct Broadcast {
    Shape out;
    bool same = false;
    std::vector<std::size_t> ia, ib;
};

Broadcast plan_broadcast(const char* op, const Shape& a, const Shape& b) {
    Broadcast plan;
    if (a == b) {
        plan.out = a;
        plan.same = true;
        return plan;
    }
    const std::size_t rank = std::max(a.size(), b.size());
    Shape pa(rank, 1), pb(rank, 1);
    std::copy(a.begin(), a.end(), pa.begin() + static_cast<std::ptrdiff_t>(rank - a.size()));
    std::copy(b.begin(), b.end(), pb.begin() + static_cast<std::ptrdiff_t>(rank - b.size()));
    plan.out.resize(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        if (pa[i] != pb[i] && pa[i] != 1 && pb[i] != 1) shape_fail(op, a, b);
        plan.out[i] = std::max(pa[i], pb[i]);
    }
    const auto sa = strides_of(pa), sb = strides_of(pb);
    const std::size_t n = numel(plan.out);
    plan.ia.resize(n);
    plan.ib.resize(n);
    std::vector<std::size_t> idx(rank, 0);
    for (std::size_t flat = 0; flat < n; ++flat) {
        std::size_t oa = 0, ob = 0;
        for (std::size_t d = 0; d < rank; ++d) {
            if (pa[d] != 1) oa += idx[d] * sa[d];
            if (pb[d] != 1) ob += idx[d] * sb[d];
        }
        plan.ia[flat] = oa;
        plan.ib[flat] = ob;
        for (std::size_t d = rank; d-- > 0;) {
            if (++idx[d] < plan.out[d]) break;
            idx[d] = 0;
        }
    }
    return plan;
}

// f(x, y) forward; da(x, y, out) and db(x, y, out) are local partials.
template <class F, class DA, class DB>
Tensor binary(const char* op, const Tensor& a, const Tensor& b, F f, DA da, DB db) {
    auto plan = std::make_shared<Broadcast>(plan_broadcast(op, a.shape(), b.shape()));
    const auto& av = a.data();
    const auto& bv = b.data();
    const std::size_t n = numel(plan->out);
    std::vector<double> out(n);
    if (plan->same) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(av[i], bv[i]);
    } else {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(av[plan->ia[i]], bv[plan->ib[i]]);
    }
    return Tensor::make_result(op, plan->out, std::move(out), {a, b}, [plan, da, db](Node& self) {
        const auto& x = value_of(self, 0);
        const auto& y = value_of(self, 1);
        auto* gx = grad_of(self, 0);
        auto* gy = grad_of(self, 1);
        const std::size_t n = self.value.size();
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t ix = plan->same ? i : plan->ia[i];
            const std::size_t iy = plan->same ? i : plan->ib[i];
            const double g = self.grad[i];
            if (gx) (*gx)[ix] += g * da(x[ix], y[iy], self.value[i]);
            if (gy) (*gy)[iy] += g * db(x[ix], y[iy], self.value[i]);
        }
    });
}

// f(x) forward; df(x, out) local derivative.
template <class F, class DF>
Tensor unary(const char* op, const Tensor& a, F f, DF df) {
    const auto& av = a.data();
    std::vector<double> out(av.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i]);
    return Tensor::make_result(op, a.shape(), std::move(out), {a}, [df](Node& self) {
        auto* gx = grad_of(self, 0);
        if (!gx) return;
        const auto& x = value_of(self, 0);
        for (std::size_t i = 0; i < x.size(); ++i) (*gx)[i] += self.grad[i] * df(x[i], self.value[i]);
    });
}

void check_axis(const char* op, const Tensor& a, std::size_t axis) {
    if (axis >= a.rank()) {
        throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) + " out of range for shape " +
                         to_string(a.shape()));
    }
}

// [outer, n, inner] decomposition around an axis.
struct AxisSplit {
    std::size_t outer = 1, n = 1, inner = 1;
};

AxisSplit split_at(const Shape& s, std::size_t axis) {
    AxisSplit sp;
    for (std::size_t i = 0; i < axis; ++i) sp.outer *= s[i];
    sp.n = s[axis];
    for (std::size_t i = axis + 1; i < s.size(); ++i) sp.inner *= s[i];
    return sp;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    return binary(
        "add", a, b, [](double x, double y) { return x + y; }, [](double, double, double) { return 1.0; },
        [](double, double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    return binary(
        "sub", a, b, [](double x, double y) { return x - y; }, [](double, double, double) { return 1.0; },
        [](double, double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    return binary(
        "mul", a, b, [](double x, double y) { return x * y; }, [](double, double y, double) { return y; },
        [](double x, double, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
    return binary(
        "div", a, b, [](double x, double y) { return x / y; }, [](double, double y, double) { return 1.0 / y; },
        [](double, double y, double out) { return -out / y; });
}

Tensor neg(const Tensor& a) {
    return unary("neg", a, [](double x) { return -x; }, [](double, double) { return -1.0; });
}

Tensor scale(const Tensor& a, double factor) {
    return unary(
        "scale", a, [factor](double x) { return x * factor; }, [factor](double, double) { return factor; });
}

Tensor add_scalar(const Tensor& a, double value) {
    return unary("add_scalar", a, [value](double x) { return x + value; }, [](double, double) { return 1.0; });
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() < 1 || b.rank() != 2 || a.shape().back() != b.dim(0)) shape_fail("matmul", a.shape(), b.shape());
    const std::size_t k = b.dim(0), n = b.dim(1), m = a.numel() / k;
    Shape out_shape = a.shape();
    out_shape.back() = n;
    if (a.rank() == 1) out_shape = {n};
    std::vector<double> out(m * n);
    kernels::gemm(a.data().data(), b.data().data(), out.data(), {m, k, n, false, false, false});
    return Tensor::make_result("matmul", std::move(out_shape), std::move(out), {a, b}, [m, k, n](Node& self) {
        const auto& av = value_of(self, 0);
        const auto& bv = value_of(self, 1);
        if (auto* ga = grad_of(self, 0)) {
            kernels::gemm(self.grad.data(), bv.data(), ga->data(), {m, n, k, false, true, true});
        }
        if (auto* gb = grad_of(self, 1)) {
            kernels::gemm(av.data(), self.grad.data(), gb->data(), {k, m, n, true, false, true});
        }
    });
}

Tensor bmm(const Tensor& a, const Tensor& b, bool transpose_b) {
    if (a.rank() != 3 || b.rank() != 3 || a.dim(0) != b.dim(0)) shape_fail("bmm", a.shape(), b.shape());
    const std::size_t batch = a.dim(0), m = a.dim(1), k = a.dim(2);
    const std::size_t n = transpose_b ? b.dim(1) : b.dim(2);
    if ((transpose_b ? b.dim(2) : b.dim(1)) != k) shape_fail("bmm", a.shape(), b.shape());
    std::vector<double> out(batch * m * n);
    const double* av = a.data().data();
    const double* bv = b.data().data();
    for (std::size_t i = 0; i < batch; ++i) {
        kernels::gemm(av + i * m * k, bv + i * k * n, out.data() + i * m * n, {m, k, n, false, transpose_b, false});
    }
    return Tensor::make_result(
        "bmm", {batch, m, n}, std::move(out), {a, b}, [batch, m, k, n, transpose_b](Node& self) {
            const auto& av = value_of(self, 0);
            const auto& bv = value_of(self, 1);
            auto* ga = grad_of(self, 0);
            auto* gb = grad_of(self, 1);
            for (std::size_t i = 0; i < batch; ++i) {
                const double* g = self.grad.data() + i * m * n;
                if (ga) {
                    // dA = G * op(B)^T
                    kernels::gemm(g, bv.data() + i * k * n, ga->data() + i * m * k,
                                  {m, n, k, false, !transpose_b, true});
                }
                if (gb) {
                    if (transpose_b) {
                        // B stored [n,k]: dB = G^T * A
                        kernels::gemm(g, av.data() + i * m * k, gb->data() + i * k * n, {n, m, k, true, false, true});
                    } else {
                        kernels::gemm(av.data() + i * m * k, g, gb->data() + i * k * n, {k, m, n, true, false, true});
                    }
                }
            }
        });
}

Tensor permute(const Tensor& a, const std::vector<std::size_t>& axes) {
    const auto& in_shape = a.shape();
    const std::size_t rank = in_shape.size();
    if (axes.size() != rank) throw ShapeError("permute: axes rank mismatch for shape " + to_string(in_shape));
    std::vector<bool> used(rank, false);
    Shape out_shape(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        if (axes[i] >= rank || used[axes[i]]) {
            throw ShapeError("permute: invalid axis order for shape " + to_string(in_shape));
        }
        used[axes[i]] = true;
        out_shape[i] = in_shape[axes[i]];
    }
    const auto in_strides = strides_of(in_shape);
    const std::size_t n = a.numel();
    // map[out_flat] = in_flat
    auto map = std::make_shared<std::vector<std::size_t>>(n);
    std::vector<std::size_t> idx(rank, 0);
    for (std::size_t flat = 0; flat < n; ++flat) {
        std::size_t off = 0;
        for (std::size_t d = 0; d < rank; ++d) off += idx[d] * in_strides[axes[d]];
        (*map)[flat] = off;
        for (std::size_t d = rank; d-- > 0;) {
            if (++idx[d] < out_shape[d]) break;
            idx[d] = 0;
        }
    }
    const auto& av = a.data();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = av[(*map)[i]];
    return Tensor::make_result("permute", std::move(out_shape), std::move(out), {a}, [map](Node& self) {
        auto* ga = grad_of(self, 0);
        if (!ga) return;
        for (std::size_t i = 0; i < map->size(); ++i) (*ga)[(*map)[i]] += self.grad[i];
    });
}

Tensor transpose(const Tensor& a) {
    if (a.rank() < 2) throw ShapeError("transpose: need rank >= 2, got " + to_string(a.shape()));
    std::vector<std::size_t> axes(a.rank());
    std::iota(axes.begin(), axes.end(), 0);
    std::swap(axes[a.rank() - 1], axes[a.rank() - 2]);
    return permute(a, axes);
}

Tensor reshape(const Tensor& a, Shape shape) {
    if (numel(shape) != a.numel()) shape_fail("reshape", a.shape(), shape);
    std::vector<double> out(a.data().begin(), a.data().end());
    return Tensor::make_result("reshape", std::move(shape), std::move(out), {a}, [](Node& self) {
        auto* ga = grad_of(self, 0);
        if (!ga) return;
        for (std::size_t i = 0; i < self.grad.size(); ++i) (*ga)[i] += self.grad[i];
    });
}

Tensor slice(const Tensor& a, std::size_t axis, std::size_t start, std::size_t length) {
    check_axis("slice", a, axis);
    if (length == 0 || start + length > a.dim(axis)) {
        throw ShapeError("slice: range [" + std::to_string(start) + ", " + std::to_string(start + length) +
                         ") out of bounds for shape " + to_string(a.shape()));
    }
    const auto sp = split_at(a.shape(), axis);
    Shape out_shape = a.shape();
    out_shape[axis] = length;
    std::vector<double> out(sp.outer * length * sp.inner);
    const auto& av = a.data();
    for (std::size_t o = 0; o < sp.outer; ++o) {
        std::copy_n(av.begin() + static_cast<std::ptrdiff_t>((o * sp.n + start) * sp.inner), length * sp.inner,
                    out.begin() + static_cast<std::ptrdiff_t>(o * length * sp.inner));
    }
    return Tensor::make_result("slice", std::move(out_shape), std::move(out), {a},
                               [sp, start, length](Node& self) {
                                   auto* ga = grad_of(self, 0);
                                   if (!ga) return;
                                   for (std::size_t o = 0; o < sp.outer; ++o) {
                                       for (std::size_t j = 0; j < length * sp.inner; ++j) {
                                           (*ga)[(o * sp.n + start) * sp.inner + j] +=
                                               self.grad[o * length * sp.inner + j];
                                       }
                                   }
                               });
}

Tensor concat(const std::vector<Tensor>& parts, std::size_t axis) {
    if (parts.empty()) throw ShapeError("concat: no inputs");
    check_axis("concat", parts[0], axis);
    Shape out_shape = parts[0].shape();
    std::size_t total = 0;
    for (const auto& p : parts) {
        if (p.rank() != out_shape.size()) shape_fail("concat", parts[0].shape(), p.shape());
        for (std::size_t d = 0; d < out_shape.size(); ++d) {
            if (d != axis && p.dim(d) != out_shape[d]) shape_fail("concat", parts[0].shape(), p.shape());
        }
        total += p.dim(axis);
    }
    out_shape[axis] = total;
    const auto sp = split_at(out_shape, axis);
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> extents;
    std::vector<double> out(numel(out_shape));
    std::size_t off = 0;
    for (const auto& p : parts) {
        const std::size_t len = p.dim(axis);
        const auto& pv = p.data();
        for (std::size_t o = 0; o < sp.outer; ++o) {
            std::copy_n(pv.begin() + static_cast<std::ptrdiff_t>(o * len * sp.inner), len * sp.inner,
                        out.begin() + static_cast<std::ptrdiff_t>((o * total + off) * sp.inner));
        }
        offsets.push_back(off);
        extents.push_back(len);
        off += len;
    }
    return Tensor::make_result("concat", std::move(out_shape), std::move(out), parts,
                               [sp, total, offsets, extents](Node& self) {
                                   for (std::size_t i = 0; i < offsets.size(); ++i) {
                                       auto* gp = grad_of(self, i);
                                       if (!gp) continue;
                                       const std::size_t len = extents[i];
                                       for (std::size_t o = 0; o < sp.outer; ++o) {
                                           for (std::size_t j = 0; j < len * sp.inner; ++j) {
                                               (*gp)[o * len * sp.inner + j] +=
                                                   self.grad[(o * total + offsets[i]) * sp.inner + j];
                                           }
                                       }
                                   }
                               });
}

Tensor index_rows(const Tensor& a, const std::vector<std::size_t>& rows) {
    if (a.rank() < 1 || rows.empty()) throw ShapeError("index_rows: empty selection on " + to_string(a.shape()));
    const std::size_t row = a.numel() / a.dim(0);
    Shape out_shape = a.shape();
    out_shape[0] = rows.size();
    std::vector<double> out(rows.size() * row);
    const auto& av = a.data();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= a.dim(0)) {
            throw ShapeError("index_rows: row " + std::to_string(rows[i]) + " out of range for " +
                             to_string(a.shape()));
        }
        std::copy_n(av.begin() + static_cast<std::ptrdiff_t>(rows[i] * row), row,
                    out.begin() + static_cast<std::ptrdiff_t>(i * row));
    }
    return Tensor::make_result("index_rows", std::move(out_shape), std::move(out), {a}, [rows, row](Node& self) {
        auto* ga = grad_of(self, 0);
        if (!ga) return;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t j = 0; j < row; ++j) (*ga)[rows[i] * row + j] += self.grad[i * row + j];
        }
    });
}

Tensor broadcast_to(const Tensor& a, const Shape& shape) {
    auto plan = std::make_shared<Broadcast>(plan_broadcast("broadcast_to", a.shape(), shape));
    if (plan->out != shape) shape_fail("broadcast_to", a.shape(), shape);
    const auto& av = a.data();
    std::vector<double> out(numel(shape));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[plan->same ? i : plan->ia[i]];
    return Tensor::make_result("broadcast_to", shape, std::move(out), {a}, [plan](Node& self) {
        auto* ga = grad_of(self, 0);
        if (!ga) return;
        for (std::size_t i = 0; i < self.grad.size(); ++i) (*ga)[plan->same ? i : plan->ia[i]] += self.grad[i];
    });
}

Tensor sum(const Tensor& a) {
    const auto& av = a.data();
    double total = 0.0;
    for (double x : av) total += x;
    return Tensor::make_result("sum", {1}, {total}, {a}, [](Node& self) {
        auto* ga = grad_of(self, 0);
        if (!ga) return;
        for (auto& g : *ga) g += self.grad[0];
    });
}

Tensor sum(const Tensor& a, std::size_t axis, bool keepdim) {
    check_axis("sum", a, axis);
    const auto sp = split_at(a.shape(), axis);
    Shape out_shape = a.shape();
    if (keepdim) {
        out_shape[axis] = 1;
    } else {
        out_shape.erase(out_shape.begin() + static_cast<std::ptrdiff_t>(axis));
        if (out_shape.empty()) out_shape = {1};
    }
    const auto& av = a.data();
    std::vector<double> out(sp.outer * sp.inner, 0.0);
    for (std::size_t o = 0; o < sp.outer; ++o) {
        for (std::size_t j = 0; j < sp.n; ++j) {
            for (std::size_t in = 0; in < sp.inner; ++in) {
                out[o * sp.inner + in] += av[(o * sp.n + j) * sp.inner + in];
            }
        }
    }
    return Tensor::make_result("sum_axis", std::move(out_shape), std::move(out), {a}, [sp](Node& self) {
        auto* ga = grad_of(self, 0);
        if (!ga) return;
        for (std::size_t o = 0; o < sp.outer; ++o) {
            for (std::size_t j = 0; j < sp.n; ++j) {
                for (std::size_t in = 0; in < sp.inner; ++in) {
                    (*ga)[(o * sp.n + j) * sp.inner + in] += self.grad[o * sp.inner + in];
                }
            }
        }
    });
}

Tensor mean(const Tensor& a) { return scale(sum(a), 1.0 / static_cast<double>(a.numel())); }

Tensor mean(const Tensor& a, std::size_t axis, bool keepdim) {
    check_axis("mean", a, axis);
    return scale(sum(a, axis, keepdim), 1.0 / static_cast<double>(a.dim(axis)));
}

Tensor exp(const Tensor& a) {
    return unary("exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor log(const Tensor& a) {
    return unary("log", a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor sqrt(const Tensor& a) {
    return unary("sqrt", a, [](double x) { return std::sqrt(x); }, [](double, double y) { return 0.5 / y; });
}

Tensor square(const Tensor& a) {
    return unary("square", a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor relu(const Tensor& a) {
    return unary(
        "relu", a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
    return unary(
        "sigmoid", a,
        [](double x) {
            if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
            const double e = std::exp(x);
            return e / (1.0 + e);
        },
        [](double, double y) { return y * (1.0 - y); });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
    return unary(
        "clamp", a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
        [lo, hi](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Tensor softmax(const Tensor& a, std::size_t axis) {
    check_axis("softmax", a, axis);
    const auto sp = split_at(a.shape(), axis);
    std::vector<double> out(a.numel());
    kernels::softmax(a.data().data(), out.data(), sp.outer, sp.n, sp.inner);
    return Tensor::make_result("softmax", a.shape(), std::move(out), {a}, [sp](Node& self) {
        auto* ga = grad_of(self, 0);
        if (!ga) return;
        const auto& y = self.value;
        const auto& g = self.grad;
        for (std::size_t o = 0; o < sp.outer; ++o) {
            for (std::size_t in = 0; in < sp.inner; ++in) {
                double dot = 0.0;
                for (std::size_t j = 0; j < sp.n; ++j) {
                    const std::size_t i = (o * sp.n + j) * sp.inner + in;
                    dot += g[i] * y[i];
                }
                for (std::size_t j = 0; j < sp.n; ++j) {
                    const std::size_t i = (o * sp.n + j) * sp.inner + in;
                    (*ga)[i] += y[i] * (g[i] - dot);
                }
            }
        }
    });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
    if (x.rank() < 1) throw ShapeError("layer_norm: scalar input");
    const std::size_t n = x.shape().back();
    if (gain.numel() != n || bias.numel() != n) shape_fail("layer_norm", x.shape(), gain.shape());
    const std::size_t rows = x.numel() / n;
    const auto& xv = x.data();
    const auto& gv = gain.data();
    const auto& bv = bias.data();
    auto xhat = std::make_shared<std::vector<double>>(x.numel());
    auto rstd = std::make_shared<std::vector<double>>(rows);
    std::vector<double> out(x.numel());
    for (std::size_t r = 0; r < rows; ++r) {
        const double* xr = xv.data() + r * n;
        double mu = 0.0;
        for (std::size_t j = 0; j < n; ++j) mu += xr[j];
        mu /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t j = 0; j < n; ++j) var += (xr[j] - mu) * (xr[j] - mu);
        var /= static_cast<double>(n);
        const double rs = 1.0 / std::sqrt(var + eps);
        (*rstd)[r] = rs;
        for (std::size_t j = 0; j < n; ++j) {
            const double h = (xr[j] - mu) * rs;
            (*xhat)[r * n + j] = h;
            out[r * n + j] = h * gv[j] + bv[j];
        }
    }
    return Tensor::make_result("layer_norm", x.shape(), std::move(out), {x, gain, bias},
                               [xhat, rstd, n, rows](Node& self) {
                                   auto* gx = grad_of(self, 0);
                                   auto* gg = grad_of(self, 1);
                                   auto* gb = grad_of(self, 2);
                                   const auto& gain = value_of(self, 1);
                                   std::vector<double> dh(n);
                                   for (std::size_t r = 0; r < rows; ++r) {
                                       const double* g = self.grad.data() + r * n;
                                       const double* h = xhat->data() + r * n;
                                       double mean_dh = 0.0, mean_dh_h = 0.0;
                                       for (std::size_t j = 0; j < n; ++j) {
                                           if (gg) (*gg)[j] += g[j] * h[j];
                                           if (gb) (*gb)[j] += g[j];
                                           dh[j] = g[j] * gain[j];
                                           mean_dh += dh[j];
                                           mean_dh_h += dh[j] * h[j];
                                       }
                                       if (!gx) continue;
                                       mean_dh /= static_cast<double>(n);
                                       mean_dh_h /= static_cast<double>(n);
                                       for (std::size_t j = 0; j < n; ++j) {
                                           (*gx)[r * n + j] += (*rstd)[r] * (dh[j] - mean_dh - h[j] * mean_dh_h);
                                       }
                                   }
                               });
}

}  // namespace panoact
