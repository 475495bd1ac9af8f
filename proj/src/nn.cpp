// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/nn.hpp"

#include <algorithm>
#include <cmath>

namespace panoact {

Tensor ParamStore::add(const std::string& name, Tensor value) {
    if (contains(name)) throw ConfigError("duplicate parameter name: " + name);
    value.set_requires_grad(true);
    items_.emplace_back(name, value);
    return value;
}

Tensor ParamStore::get(const std::string& name) const {
    for (const auto& [n, t] : items_) {
        if (n == name) return t;
    }
    throw ConfigError("unknown parameter: " + name);
}

bool ParamStore::contains(const std::string& name) const {
    return std::any_of(items_.begin(), items_.end(), [&](const auto& item) { return item.first == name; });
}

std::size_t ParamStore::scalar_count() const {
    std::size_t n = 0;
    for (const auto& item : items_) n += item.second.numel();
    return n;
}

void ParamStore::zero_grad() {
    for (auto& item : items_) item.second.zero_grad();
}

void ParamStore::fill(const std::string& prefix, double value) {
    for (auto& [name, t] : items_) {
        if (name.rfind(prefix, 0) == 0) {
            auto d = t.mutable_data();
            std::fill(d.begin(), d.end(), value);
        }
    }
}

Tensor Initializer::glorot(std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    std::vector<double> v(fan_in * fan_out);
    for (auto& x : v) x = dist(rng_);
    return Tensor::from({fan_in, fan_out}, std::move(v));
}

Tensor Initializer::normal(Shape shape, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    std::vector<double> v(numel(shape));
    for (auto& x : v) x = dist(rng_);
    return Tensor::from(std::move(shape), std::move(v));
}

Linear make_linear(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out,
                   Initializer& init, bool with_bias) {
    Linear layer;
    layer.weight = store.add(prefix + ".weight", init.glorot(in, out));
    if (with_bias) layer.bias = store.add(prefix + ".bias", Tensor::zeros({out}));
    return layer;
}

Tensor apply(const Linear& layer, const Tensor& x) {
    Tensor y = matmul(x, layer.weight);
    return layer.bias.defined() ? add(y, layer.bias) : y;
}

MhsaParams make_mhsa(ParamStore& store, const std::string& prefix, std::size_t d, std::size_t heads,
                     Initializer& init) {
    if (heads == 0 || d % heads != 0) {
        throw ConfigError("attention width " + std::to_string(d) + " is not divisible by " + std::to_string(heads) +
                          " heads");
    }
    MhsaParams p;
    p.query = make_linear(store, prefix + ".query", d, d, init);
    p.key = make_linear(store, prefix + ".key", d, d, init, /*with_bias=*/false);
    p.value = make_linear(store, prefix + ".value", d, d, init);
    p.output = make_linear(store, prefix + ".output", d, d, init);
    p.heads = heads;
    return p;
}

Tensor multi_head_self_attention(const Tensor& x, const MhsaParams& params) {
    const bool batched = x.rank() == 3;
    if (x.rank() != 2 && !batched) throw ShapeError("attention input must be [S,d] or [B,S,d], got " + to_string(x.shape()));
    const std::size_t batch = batched ? x.dim(0) : 1;
    const std::size_t seq = x.dim(x.rank() - 2);
    const std::size_t d = x.dim(x.rank() - 1);
    const std::size_t heads = params.heads;
    if (heads == 0 || d % heads != 0) {
        throw ConfigError("attention width " + std::to_string(d) + " is not divisible by " + std::to_string(heads) +
                          " heads");
    }
    const std::size_t dh = d / heads;

    // [B,S,d] -> [B*H, S, dh]
    auto split_heads = [&](const Tensor& t) {
        return reshape(permute(reshape(t, {batch, seq, heads, dh}), {0, 2, 1, 3}), {batch * heads, seq, dh});
    };
    const Tensor q = split_heads(apply(params.query, x));
    const Tensor k = split_heads(apply(params.key, x));
    const Tensor v = split_heads(apply(params.value, x));

    const Tensor scores = scale(bmm(q, k, /*transpose_b=*/true), 1.0 / std::sqrt(static_cast<double>(dh)));
    const Tensor weights = softmax(scores, 2);
    const Tensor context = bmm(weights, v);
    Tensor merged = reshape(permute(reshape(context, {batch, heads, seq, dh}), {0, 2, 1, 3}), {batch, seq, d});
    if (!batched) merged = reshape(merged, {seq, d});
    return apply(params.output, merged);
}

EncoderBlockParams make_encoder_block(ParamStore& store, const std::string& prefix, std::size_t d,
                                      std::size_t heads, Initializer& init) {
    EncoderBlockParams p;
    p.norm1_gain = store.add(prefix + ".norm1.gain", Tensor::full({d}, 1.0));
    p.norm1_bias = store.add(prefix + ".norm1.bias", Tensor::zeros({d}));
    p.attention = make_mhsa(store, prefix + ".attn", d, heads, init);
    p.norm2_gain = store.add(prefix + ".norm2.gain", Tensor::full({d}, 1.0));
    p.norm2_bias = store.add(prefix + ".norm2.bias", Tensor::zeros({d}));
    p.ffn_in = make_linear(store, prefix + ".ffn.in", d, kFfnMultiplier * d, init);
    p.ffn_out = make_linear(store, prefix + ".ffn.out", kFfnMultiplier * d, d, init);
    return p;
}

Tensor encoder_block(const Tensor& x, const EncoderBlockParams& p) {
    const Tensor h = add(x, multi_head_self_attention(layer_norm(x, p.norm1_gain, p.norm1_bias, kLayerNormEps),
                                                      p.attention));
    const Tensor f = apply(p.ffn_out, relu(apply(p.ffn_in, layer_norm(h, p.norm2_gain, p.norm2_bias, kLayerNormEps))));
    return add(h, f);
}

Tensor sinusoidal_embedding(std::size_t length, std::size_t d) {
    if (d == 0 || d % 2 != 0) throw ConfigError("sinusoidal embedding width must be even, got " + std::to_string(d));
    std::vector<double> v(length * d);
    for (std::size_t pos = 0; pos < length; ++pos) {
        for (std::size_t k = 0; k < d / 2; ++k) {
            const double freq = std::pow(10000.0, static_cast<double>(2 * k) / static_cast<double>(d));
            const double angle = static_cast<double>(pos) / freq;
            v[pos * d + 2 * k] = std::sin(angle);
            v[pos * d + 2 * k + 1] = std::cos(angle);
        }
    }
    return Tensor::from({length, d}, std::move(v));
}

}  // namespace panoact
