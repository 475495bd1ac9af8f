// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "panoact/ops.hpp"

namespace panoact {

/// Named, ordered collection of learnable leaves. Names are stable and used as
/// checkpoint keys.
class ParamStore {
public:
    Tensor add(const std::string& name, Tensor value);
    Tensor get(const std::string& name) const;
    bool contains(const std::string& name) const;

    std::vector<std::pair<std::string, Tensor>>& items() { return items_; }
    const std::vector<std::pair<std::string, Tensor>>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    std::size_t scalar_count() const;

    void zero_grad();
    /// Sets every parameter whose name starts with prefix to zero.
    void fill(const std::string& prefix, double value);

private:
    std::vector<std::pair<std::string, Tensor>> items_;
};

class Initializer {
public:
    explicit Initializer(std::uint64_t seed) : rng_(seed) {}
    /// Glorot-uniform matrix [fan_in, fan_out].
    Tensor glorot(std::size_t fan_in, std::size_t fan_out);
    Tensor normal(Shape shape, double stddev);
    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
};

struct Linear {
    Tensor weight;  // [in, out]
    Tensor bias;    // [out]; may be undefined
};

Linear make_linear(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out, Initializer& init,
                   bool with_bias = true);
Tensor apply(const Linear& layer, const Tensor& x);

// The key projection has no bias: it shifts every score in a row equally and
// cancels in the softmax.
struct MhsaParams {
    Linear query, key, value, output;
    std::size_t heads = 1;
};

MhsaParams make_mhsa(ParamStore& store, const std::string& prefix, std::size_t d, std::size_t heads,
                     Initializer& init);

/// Scaled dot-product self-attention over the sequence axis of x, which is
/// [S, d] or [B, S, d]; sequences in a batch never see each other.
Tensor multi_head_self_attention(const Tensor& x, const MhsaParams& params);

/// Pre-norm transformer encoder block: x + MHSA(LN(x)), then + FFN(LN(.)).
struct EncoderBlockParams {
    Tensor norm1_gain, norm1_bias;
    MhsaParams attention;
    Tensor norm2_gain, norm2_bias;
    Linear ffn_in, ffn_out;
};

constexpr std::size_t kFfnMultiplier = 4;
constexpr double kLayerNormEps = 1e-9;

EncoderBlockParams make_encoder_block(ParamStore& store, const std::string& prefix, std::size_t d,
                                      std::size_t heads, Initializer& init);
Tensor encoder_block(const Tensor& x, const EncoderBlockParams& params);

/// [length, d] table: (pos, 2k) = sin(pos / 10000^(2k/d)), (pos, 2k+1) = cos(...).
Tensor sinusoidal_embedding(std::size_t length, std::size_t d);

}  // namespace panoact
