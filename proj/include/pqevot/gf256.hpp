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

// GF(2^8) with reduction polynomial x^8 + x^4 + x^3 + x + 1 (0x11B), plus the
// fixed-length vectors, matrices and invertible affine maps built on it.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqevot/bytes.hpp"
#include "pqevot/drbg.hpp"

namespace pqevot::gf {

inline constexpr std::uint16_t kReductionPolynomial = 0x11b;

namespace detail {

struct Tables {
    std::array<std::uint8_t, 512> exp{};
    std::array<std::uint8_t, 256> log{};
};

// 0x03 generates the multiplicative group under 0x11B.
constexpr Tables make_tables() {
    Tables t;
    std::uint8_t x = 1;
    for (int i = 0; i < 255; ++i) {
        t.exp[i] = x;
        t.exp[i + 255] = x;
        t.log[x] = static_cast<std::uint8_t>(i);
        std::uint8_t doubled = static_cast<std::uint8_t>((x << 1) ^ ((x & 0x80) ? 0x1b : 0x00));
        x = static_cast<std::uint8_t>(doubled ^ x);
    }
    t.exp[510] = t.exp[0];
    t.exp[511] = t.exp[1];
    return t;
}

inline constexpr Tables kTables = make_tables();

}  // namespace detail

constexpr std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
    if (a == 0 || b == 0) return 0;
    return detail::kTables.exp[detail::kTables.log[a] + detail::kTables.log[b]];
}

/// Multiplicative inverse; inv(0) is defined as 0 so callers can test for it.
constexpr std::uint8_t inv(std::uint8_t a) {
    if (a == 0) return 0;
    return detail::kTables.exp[255 - detail::kTables.log[a]];
}

/// Field element. Addition and subtraction are both XOR.
class Element {
public:
    constexpr Element() = default;
    constexpr explicit Element(std::uint8_t v) : value_(v) {}

    constexpr std::uint8_t value() const { return value_; }
    constexpr bool is_zero() const { return value_ == 0; }

    friend constexpr Element operator+(Element a, Element b) { return Element(a.value_ ^ b.value_); }
    friend constexpr Element operator-(Element a, Element b) { return Element(a.value_ ^ b.value_); }
    friend constexpr Element operator*(Element a, Element b) { return Element(mul(a.value_, b.value_)); }
    friend constexpr Element operator/(Element a, Element b) {
        if (b.is_zero()) throw std::domain_error("division by zero in GF(2^8)");
        return Element(mul(a.value_, inv(b.value_)));
    }
    constexpr Element& operator+=(Element b) { return *this = *this + b; }
    constexpr Element& operator*=(Element b) { return *this = *this * b; }
    friend constexpr bool operator==(Element, Element) = default;

private:
    std::uint8_t value_ = 0;
};

constexpr Element inverse(Element a) {
    if (a.is_zero()) throw std::domain_error("zero has no inverse in GF(2^8)");
    return Element(inv(a.value()));
}

constexpr Element pow(Element a, unsigned e) {
    Element r(1);
    while (e) {
        if (e & 1u) r *= a;
        a *= a;
        e >>= 1;
    }
    return r;
}

/// Square root. Squaring is the Frobenius automorphism, so the root is a^(2^7).
constexpr Element sqrt(Element a) { return pow(a, 128); }

template <EntropySource R>
Element random_element(R& rng) {
    std::uint8_t b;
    rng.fill({&b, 1});
    return Element(b);
}

template <EntropySource R>
Element random_nonzero(R& rng) {
    for (;;) {
        auto e = random_element(rng);
        if (!e.is_zero()) return e;
    }
}

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Fixed-length vector over GF(2^8).
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t n) : elems_(n) {}
    explicit Vector(std::vector<Element> elems) : elems_(std::move(elems)) {}

    static Vector from_bytes(ByteView raw) {
        Vector v(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) v.elems_[i] = Element(raw[i]);
        return v;
    }

    template <EntropySource R>
    static Vector random(std::size_t n, R& rng) {
        Bytes raw(n);
        rng.fill(raw);
        return from_bytes(raw);
    }

    std::size_t size() const { return elems_.size(); }
    Element& operator[](std::size_t i) { return elems_[i]; }
    Element operator[](std::size_t i) const { return elems_[i]; }
    Element at(std::size_t i) const {
        if (i >= elems_.size()) throw std::out_of_range("vector index");
        return elems_[i];
    }

    auto begin() const { return elems_.begin(); }
    auto end() const { return elems_.end(); }

    bool is_zero() const {
        for (auto e : elems_)
            if (!e.is_zero()) return false;
        return true;
    }

    friend Vector operator+(const Vector& a, const Vector& b) {
        if (a.size() != b.size()) throw DimensionError("vector length mismatch");
        Vector r(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) r.elems_[i] = a.elems_[i] + b.elems_[i];
        return r;
    }

    friend Vector operator-(const Vector& a, const Vector& b) { return a + b; }

    /// Concatenation.
    friend Vector operator|(const Vector& a, const Vector& b) {
        Vector r(a.size() + b.size());
        std::copy(a.elems_.begin(), a.elems_.end(), r.elems_.begin());
        std::copy(b.elems_.begin(), b.elems_.end(), r.elems_.begin() + a.size());
        return r;
    }

    friend bool operator==(const Vector&, const Vector&) = default;

    /// One byte per element, no length.
    Bytes raw_bytes() const {
        Bytes out(elems_.size());
        for (std::size_t i = 0; i < elems_.size(); ++i) out[i] = elems_[i].value();
        return out;
    }

    /// Canonical form: 4-byte BE length, then one byte per element.
    void serialize(ByteWriter& w) const {
        w.u32(static_cast<std::uint32_t>(elems_.size()));
        w.raw(raw_bytes());
    }

    Bytes serialize() const {
        ByteWriter w;
        serialize(w);
        return w.take();
    }

    static Vector deserialize(ByteReader& r) {
        auto n = r.u32();
        return from_bytes(r.raw(n));
    }

private:
    std::vector<Element> elems_;
};

/// Dense row-major matrix over GF(2^8).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Element(1);
        return m;
    }

    template <EntropySource R>
    static Matrix random(std::size_t rows, std::size_t cols, R& rng) {
        Matrix m(rows, cols);
        Bytes raw(rows * cols);
        rng.fill(raw);
        for (std::size_t i = 0; i < raw.size(); ++i) m.data_[i] = Element(raw[i]);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Element& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    Element operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

    Vector operator*(const Vector& v) const {
        if (v.size() != cols_) throw DimensionError("matrix-vector dimension mismatch");
        Vector out(rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            std::uint8_t acc = 0;
            const Element* row = &data_[r * cols_];
            for (std::size_t c = 0; c < cols_; ++c) acc ^= mul(row[c].value(), v[c].value());
            out[r] = Element(acc);
        }
        return out;
    }

    Matrix operator*(const Matrix& o) const {
        if (cols_ != o.rows_) throw DimensionError("matrix-matrix dimension mismatch");
        Matrix out(rows_, o.cols_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t k = 0; k < cols_; ++k) {
                auto a = (*this)(r, k).value();
                if (a == 0) continue;
                for (std::size_t c = 0; c < o.cols_; ++c)
                    out(r, c) = Element(out(r, c).value() ^ mul(a, o(k, c).value()));
            }
        return out;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    /// Gauss-Jordan inverse; nullopt when singular.
    std::optional<Matrix> inverse() const {
        if (rows_ != cols_) throw DimensionError("inverse of a non-square matrix");
        const std::size_t n = rows_;
        Matrix a = *this;
        Matrix inv_m = identity(n);
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t pivot = col;
            while (pivot < n && a(pivot, col).is_zero()) ++pivot;
            if (pivot == n) return std::nullopt;
            if (pivot != col) {
                a.swap_rows(pivot, col);
                inv_m.swap_rows(pivot, col);
            }
            auto scale = gf::inverse(a(col, col));
            a.scale_row(col, scale);
            inv_m.scale_row(col, scale);
            for (std::size_t r = 0; r < n; ++r) {
                if (r == col || a(r, col).is_zero()) continue;
                auto f = a(r, col);
                a.add_scaled_row(r, col, f);
                inv_m.add_scaled_row(r, col, f);
            }
        }
        return inv_m;
    }

    bool is_invertible() const { return inverse().has_value(); }

private:
    void swap_rows(std::size_t a, std::size_t b) {
        for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
    }
    void scale_row(std::size_t r, Element s) {
        for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) *= s;
    }
    // row[dst] += f * row[src]
    void add_scaled_row(std::size_t dst, std::size_t src, Element f) {
        for (std::size_t c = 0; c < cols_; ++c) (*this)(dst, c) += f * (*this)(src, c);
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Element> data_;
};

/// Solves A x = b for square A. nullopt when A is singular.
inline std::optional<Vector> solve(Matrix a, Vector b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n) throw DimensionError("solve: dimension mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a(pivot, col).is_zero()) ++pivot;
        if (pivot == n) return std::nullopt;
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
            std::swap(b[pivot], b[col]);
        }
        auto s = inverse(a(col, col));
        for (std::size_t c = col; c < n; ++c) a(col, c) *= s;
        b[col] *= s;
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a(r, col).is_zero()) continue;
            auto f = a(r, col);
            for (std::size_t c = col; c < n; ++c) a(r, c) += f * a(col, c);
            b[r] += f * b[col];
        }
    }
    return b;
}

/// x -> M x + offset, with M invertible. The inverse matrix is cached at construction.
class AffineMap {
public:
    AffineMap(Matrix matrix, Vector offset) : matrix_(std::move(matrix)), offset_(std::move(offset)) {
        if (matrix_.rows() != matrix_.cols() || matrix_.rows() != offset_.size() || offset_.size() == 0)
            throw DimensionError("affine map: matrix must be square and match the offset");
        auto inv_m = matrix_.inverse();
        if (!inv_m) throw std::invalid_argument("affine map: matrix is singular");
        inverse_ = std::move(*inv_m);
    }

    static AffineMap identity(std::size_t dim) { return {Matrix::identity(dim), Vector(dim)}; }

    /// Rejection-samples the matrix until it is invertible.
    template <EntropySource R>
    static AffineMap random(std::size_t dim, R& rng) {
        if (dim == 0) throw DimensionError("affine map dimension must be positive");
        for (;;) {
            auto m = Matrix::random(dim, dim, rng);
            if (!m.is_invertible()) continue;
            auto offset = Vector::random(dim, rng);
            return {std::move(m), std::move(offset)};
        }
    }

    std::size_t dim() const { return offset_.size(); }
    const Matrix& matrix() const { return matrix_; }
    const Vector& offset() const { return offset_; }
    const Matrix& inverse_matrix() const { return inverse_; }

    Vector apply(const Vector& v) const {
        if (v.size() != dim()) throw DimensionError("affine apply: dimension mismatch");
        return matrix_ * v + offset_;
    }

    Vector invert_apply(const Vector& v) const {
        if (v.size() != dim()) throw DimensionError("affine invert: dimension mismatch");
        return inverse_ * (v + offset_);
    }

    friend bool operator==(const AffineMap& a, const AffineMap& b) {
        return a.matrix_ == b.matrix_ && a.offset_ == b.offset_;
    }

    /// dimension (4 bytes BE), matrix row-major, then offset.
    void serialize(ByteWriter& w) const {
        const auto n = dim();
        w.u32(static_cast<std::uint32_t>(n));
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) w.u8(matrix_(r, c).value());
        w.raw(offset_.raw_bytes());
    }

    Bytes serialize() const {
        ByteWriter w;
        serialize(w);
        return w.take();
    }

    static AffineMap deserialize(ByteReader& r) {
        auto n = r.u32();
        if (n == 0 || n > 4096) throw DecodeError("affine map: bad dimension");
        Matrix m(n, n);
        auto raw = r.raw(std::size_t(n) * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) m(i, j) = Element(raw[i * n + j]);
        auto offset = Vector::from_bytes(r.raw(n));
        if (!m.is_invertible()) throw DecodeError("affine map: singular matrix");
        return {std::move(m), std::move(offset)};
    }

private:
    Matrix matrix_;
    Vector offset_;
    Matrix inverse_;
};

}  // namespace pqevot::gf
