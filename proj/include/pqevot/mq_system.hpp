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

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "pqevot/bytes.hpp"
#include "pqevot/drbg.hpp"
#include "pqevot/gf256.hpp"

namespace pqevot::mq {

using gf::Element;
using gf::Vector;

/// Tag byte in the serialized header. Public systems carry kPlain.
enum class SystemKind : std::uint8_t { kPlain = 0, kOilVinegar = 1, kTriangular = 2 };

/// m quadratic polynomials in n variables over GF(2^8).
///
/// Each polynomial stores its quadratic form upper-triangular: slot (i, j) with
/// i <= j holds the coefficient of x_i x_j. In characteristic two x_i x_j and
/// x_j x_i merge into one slot, while x_i^2 keeps its own diagonal slot.
class QuadraticSystem {
public:
    QuadraticSystem() = default;

    QuadraticSystem(std::size_t n, std::size_t m)
        : n_(n), m_(m), quad_(m * tri(n)), lin_(m * n), constant_(m) {
        if (n == 0 || m == 0) throw gf::DimensionError("quadratic system arity must be positive");
    }

    template <EntropySource R>
    static QuadraticSystem random(std::size_t n, std::size_t m, R& rng) {
        QuadraticSystem s(n, m);
        fill_random(s.quad_, rng);
        fill_random(s.lin_, rng);
        fill_random(s.constant_, rng);
        return s;
    }

    std::size_t inputs() const { return n_; }
    std::size_t outputs() const { return m_; }

    /// Quadratic coefficient of x_i x_j in polynomial k (requires i <= j).
    Element& quad(std::size_t k, std::size_t i, std::size_t j) { return quad_[k * tri(n_) + slot(i, j)]; }
    Element quad(std::size_t k, std::size_t i, std::size_t j) const {
        return quad_[k * tri(n_) + slot(i, j)];
    }
    Element& lin(std::size_t k, std::size_t i) { return lin_[k * n_ + i]; }
    Element lin(std::size_t k, std::size_t i) const { return lin_[k * n_ + i]; }
    Element& constant(std::size_t k) { return constant_[k]; }
    Element constant(std::size_t k) const { return constant_[k]; }

    /// Value of polynomial k at x.
    Element eval_poly(std::size_t k, const Vector& x) const {
        const Element* q = &quad_[k * tri(n_)];
        const Element* l = &lin_[k * n_];
        std::uint8_t total = constant_[k].value();
        std::size_t idx = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            std::uint8_t row = l[i].value();
            for (std::size_t j = i; j < n_; ++j, ++idx) row ^= gf::mul(q[idx].value(), x[j].value());
            total ^= gf::mul(row, x[i].value());
        }
        return Element(total);
    }

    Vector eval(const Vector& x) const {
        if (x.size() != n_) throw gf::DimensionError("mq eval: arity mismatch");
        Vector y(m_);
        for (std::size_t k = 0; k < m_; ++k) y[k] = eval_poly(k, x);
        return y;
    }

    friend bool operator==(const QuadraticSystem&, const QuadraticSystem&) = default;

    /// Header (n u32, m u32, kind u8), then per polynomial: upper-triangular
    /// quadratic coefficients row-major, linear coefficients, constant.
    void serialize(ByteWriter& w, SystemKind kind = SystemKind::kPlain) const {
        w.u32(static_cast<std::uint32_t>(n_)).u32(static_cast<std::uint32_t>(m_)).u8(std::uint8_t(kind));
        for (std::size_t k = 0; k < m_; ++k) {
            for (std::size_t s = 0; s < tri(n_); ++s) w.u8(quad_[k * tri(n_) + s].value());
            for (std::size_t i = 0; i < n_; ++i) w.u8(lin_[k * n_ + i].value());
            w.u8(constant_[k].value());
        }
    }

    Bytes serialize(SystemKind kind = SystemKind::kPlain) const {
        ByteWriter w;
        serialize(w, kind);
        return w.take();
    }

    static QuadraticSystem deserialize(ByteReader& r, SystemKind expected = SystemKind::kPlain) {
        auto n = r.u32();
        auto m = r.u32();
        auto kind = r.u8();
        if (kind != std::uint8_t(expected)) throw DecodeError("quadratic system: unexpected kind tag");
        if (n == 0 || m == 0 || n > 1024 || m > 1024) throw DecodeError("quadratic system: bad arity");
        QuadraticSystem s(n, m);
        for (std::size_t k = 0; k < m; ++k) {
            auto block = r.raw(tri(n) + n + 1);
            for (std::size_t t = 0; t < tri(n); ++t) s.quad_[k * tri(n) + t] = Element(block[t]);
            for (std::size_t i = 0; i < n; ++i) s.lin_[k * n + i] = Element(block[tri(n) + i]);
            s.constant_[k] = Element(block[tri(n) + n]);
        }
        return s;
    }

    static constexpr std::size_t tri(std::size_t n) { return n * (n + 1) / 2; }

    std::size_t serialized_size() const { return 9 + m_ * (tri(n_) + n_ + 1); }

private:
    // Row-major offset of (i, j), i <= j, within the packed upper triangle.
    std::size_t slot(std::size_t i, std::size_t j) const {
        if (i > j || j >= n_) throw std::out_of_range("quadratic slot must satisfy i <= j < n");
        return i * n_ - i * (i - 1) / 2 + (j - i);
    }

    template <EntropySource R>
    static void fill_random(std::vector<Element>& v, R& rng) {
        Bytes raw(v.size());
        rng.fill(raw);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = Element(raw[i]);
    }

    std::size_t n_ = 0;
    std::size_t m_ = 0;
    std::vector<Element> quad_;
    std::vector<Element> lin_;
    std::vector<Element> constant_;
};

class InstanceTooLarge : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Largest search space the exhaustive solver accepts.
inline constexpr std::uint64_t kBruteforceLimit = std::uint64_t{1} << 24;

/// Every common root of the system, found by enumerating all q^n inputs in
/// lexicographic order. Only meant for tiny instances.
inline std::vector<Vector> bruteforce_solve(const QuadraticSystem& system) {
    const auto n = system.inputs();
    if (n * 8 > 24) throw InstanceTooLarge("brute-force search space exceeds 2^24");
    const std::uint64_t space = std::uint64_t{1} << (8 * n);
    std::vector<Vector> roots;
    Vector x(n);
    for (std::uint64_t idx = 0; idx < space; ++idx) {
        for (std::size_t i = 0; i < n; ++i) x[i] = Element(std::uint8_t(idx >> (8 * (n - 1 - i))));
        bool root = true;
        for (std::size_t k = 0; k < system.outputs() && root; ++k) root = system.eval_poly(k, x).is_zero();
        if (root) roots.push_back(x);
    }
    return roots;
}

/// The shifted system P(x) - target, whose roots are the preimages of target.
inline QuadraticSystem shift_to_target(QuadraticSystem system, const Vector& target) {
    if (target.size() != system.outputs()) throw gf::DimensionError("target length mismatch");
    for (std::size_t k = 0; k < system.outputs(); ++k) system.constant(k) += target[k];
    return system;
}

}  // namespace pqevot::mq
