// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <ostream>
#include <span>
#include <string>

namespace panoact::byteio {

template <class Float, class Bits>
inline void write_le(std::ostream& out, std::span<const Float> values) {
    static_assert(sizeof(Float) == sizeof(Bits));
    for (Float x : values) {
        auto bits = std::bit_cast<Bits>(x);
        char bytes[sizeof(Bits)];
        for (std::size_t i = 0; i < sizeof(Bits); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
        out.write(bytes, sizeof(Bits));
    }
}

template <class Float, class Bits>
inline void read_le(const char* src, std::span<Float> values) {
    for (std::size_t k = 0; k < values.size(); ++k) {
        Bits bits = 0;
        for (std::size_t i = 0; i < sizeof(Bits); ++i) {
            bits |= static_cast<Bits>(static_cast<unsigned char>(src[k * sizeof(Bits) + i])) << (8 * i);
        }
        values[k] = std::bit_cast<Float>(bits);
    }
}

template <class Float, class Bits>
inline std::string encode_le(std::span<const Float> values) {
    std::string out(values.size() * sizeof(Bits), '\0');
    for (std::size_t k = 0; k < values.size(); ++k) {
        auto bits = std::bit_cast<Bits>(values[k]);
        for (std::size_t i = 0; i < sizeof(Bits); ++i) {
            out[k * sizeof(Bits) + i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
        }
    }
    return out;
}

/// 64-bit FNV-1a, used to detect corrupted blob ranges.
inline std::uint64_t fnv1a64(const char* data, std::size_t size) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string encode_le_f64(std::span<const double> v) { return encode_le<double, std::uint64_t>(v); }
inline std::string encode_le_f32(std::span<const float> v) { return encode_le<float, std::uint32_t>(v); }
inline void write_le_f64(std::ostream& out, std::span<const double> v) { write_le<double, std::uint64_t>(out, v); }
inline void write_le_f32(std::ostream& out, std::span<const float> v) { write_le<float, std::uint32_t>(out, v); }
inline void read_le_f64(const char* src, std::span<double> v) { read_le<double, std::uint64_t>(src, v); }
inline void read_le_f32(const char* src, std::span<float> v) { read_le<float, std::uint32_t>(src, v); }

}  // namespace panoact::byteio
