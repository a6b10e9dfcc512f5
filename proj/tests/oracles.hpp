// Copyright 2026 The pqevot Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Test-only reference computations. None of these touch the log/exp tables or the
// packed coefficient layout used by the library.

#include <cstdint>
#include <vector>

#include "pqevot/central_map.hpp"
#include "pqevot/gf256.hpp"
#include "pqevot/mq_system.hpp"

namespace oracle {

/// Shift-and-add carryless product followed by explicit reduction by 0x11B.
inline std::uint8_t peasant_mul(std::uint8_t a, std::uint8_t b) {
    std::uint16_t prod = 0;
    for (int i = 0; i < 8; ++i)
        if ((b >> i) & 1) prod ^= std::uint16_t(a) << i;
    for (int bit = 14; bit >= 8; --bit)
        if (prod & (1u << bit)) prod ^= std::uint16_t(0x11b << (bit - 8));
    return static_cast<std::uint8_t>(prod);
}

inline std::uint8_t peasant_inv(std::uint8_t a) {
    for (int c = 1; c < 256; ++c)
        if (peasant_mul(a, std::uint8_t(c)) == 1) return std::uint8_t(c);
    return 0;
}

using Bytes = std::vector<std::uint8_t>;

inline Bytes raw(const pqevot::gf::Vector& v) { return v.raw_bytes(); }

/// Row-by-row dot products with peasant multiplication.
inline Bytes matvec(const pqevot::gf::Matrix& m, const Bytes& v) {
    Bytes out(m.rows(), 0);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out[r] ^= peasant_mul(m(r, c).value(), v[c]);
    return out;
}

/// Expands every monomial of every polynomial term by term.
inline Bytes expand_eval(const pqevot::mq::QuadraticSystem& s, const Bytes& x) {
    Bytes y(s.outputs(), 0);
    for (std::size_t k = 0; k < s.outputs(); ++k) {
        std::uint8_t acc = s.constant(k).value();
        for (std::size_t i = 0; i < s.inputs(); ++i) {
            acc ^= peasant_mul(s.lin(k, i).value(), x[i]);
            for (std::size_t j = i; j < s.inputs(); ++j)
                acc ^= peasant_mul(s.quad(k, i, j).value(), peasant_mul(x[i], x[j]));
        }
        y[k] = acc;
    }
    return y;
}

/// outer(F(inner(x))) evaluated pointwise, one map at a time.
inline Bytes pointwise_compose(const pqevot::gf::AffineMap& outer, const pqevot::mq::CentralMap& f,
                               const pqevot::gf::AffineMap& inner, const Bytes& x) {
    auto t = matvec(inner.matrix(), x);
    for (std::size_t i = 0; i < t.size(); ++i) t[i] ^= inner.offset()[i].value();
    auto y = expand_eval(f.system(), t);
    auto s = matvec(outer.matrix(), y);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] ^= outer.offset()[i].value();
    return s;
}

}  // namespace oracle
