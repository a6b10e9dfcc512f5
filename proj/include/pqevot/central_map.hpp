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
#include <optional>
#include <stdexcept>
#include <vector>

#include "pqevot/gf256.hpp"
#include "pqevot/mq_system.hpp"

namespace pqevot::mq {

/// Vinegar resamples before central inversion gives up.
inline constexpr int kVinegarRetries = 256;

/// Easily invertible quadratic map hidden inside a trapdoor.
///
/// OilVinegar: variables are ordered vinegar first, then oil; no polynomial has an
/// oil-times-oil term, so fixing the vinegar leaves a linear system in the oil.
/// Many preimages exist, which is what signing wants.
///
/// Triangular: n = m and polynomial i is
///     alpha_i * u_i(x_i) + g_i(x_0 .. x_{i-1})
/// with alpha_i != 0, u_i either the identity or squaring (both bijective on
/// GF(2^8)) and g_i an arbitrary quadratic in the earlier variables. The map is a
/// bijection, so decryption is unique.
class CentralMap {
public:
    enum class Kind : std::uint8_t { kOilVinegar = 1, kTriangular = 2 };
    enum class Step : std::uint8_t { kLinear = 0, kSquare = 1 };

    template <EntropySource R>
    static CentralMap random_oil_vinegar(std::size_t vinegar, std::size_t oil, R& rng) {
        if (oil == 0 || vinegar == 0) throw gf::DimensionError("oil and vinegar counts must be positive");
        const std::size_t n = vinegar + oil;
        auto system = QuadraticSystem::random(n, oil, rng);
        for (std::size_t k = 0; k < oil; ++k)
            for (std::size_t i = vinegar; i < n; ++i)
                for (std::size_t j = i; j < n; ++j) system.quad(k, i, j) = Element{};
        CentralMap f(Kind::kOilVinegar, std::move(system));
        f.vinegar_ = vinegar;
        return f;
    }

    template <EntropySource R>
    static CentralMap random_triangular(std::size_t n, R& rng) {
        if (n == 0) throw gf::DimensionError("triangular map needs at least one variable");
        auto system = QuadraticSystem::random(n, n, rng);
        std::vector<Step> steps(n);
        for (std::size_t k = 0; k < n; ++k) {
            // Clear every slot touching x_k or later, then set the univariate step.
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = std::max(i, k); j < n; ++j) system.quad(k, i, j) = Element{};
            for (std::size_t i = k; i < n; ++i) system.lin(k, i) = Element{};
            steps[k] = (rng_bit(rng) ? Step::kSquare : Step::kLinear);
            auto alpha = gf::random_nonzero(rng);
            if (steps[k] == Step::kSquare)
                system.quad(k, k, k) = alpha;
            else
                system.lin(k, k) = alpha;
        }
        CentralMap f(Kind::kTriangular, std::move(system));
        f.steps_ = std::move(steps);
        return f;
    }

    Kind kind() const { return kind_; }
    std::size_t inputs() const { return system_.inputs(); }
    std::size_t outputs() const { return system_.outputs(); }
    std::size_t vinegar() const { return vinegar_; }
    std::size_t oil() const { return kind_ == Kind::kOilVinegar ? system_.outputs() : 0; }
    const QuadraticSystem& system() const { return system_; }

    Vector apply(const Vector& x) const { return system_.eval(x); }

    /// One preimage of y, or nullopt. OilVinegar draws vinegar values from rng and
    /// retries up to kVinegarRetries times; Triangular ignores rng.
    template <EntropySource R>
    std::optional<Vector> invert(const Vector& y, R& rng) const {
        if (y.size() != outputs()) throw gf::DimensionError("central invert: length mismatch");
        if (kind_ == Kind::kTriangular) return invert_triangular(y);
        for (int attempt = 0; attempt < kVinegarRetries; ++attempt) {
            auto vinegar = Vector::random(vinegar_, rng);
            if (auto x = solve_oil(y, vinegar)) return x;
        }
        return std::nullopt;
    }

    /// Deterministic back-substitution. Only valid for Triangular maps.
    std::optional<Vector> invert_triangular(const Vector& y) const {
        if (kind_ != Kind::kTriangular) throw std::logic_error("invert_triangular on a non-triangular map");
        if (y.size() != outputs()) throw gf::DimensionError("central invert: length mismatch");
        const std::size_t n = inputs();
        Vector x(n);
        for (std::size_t k = 0; k < n; ++k) {
            // x_k is still zero here, so this evaluates g_k on the solved prefix.
            auto rest = y[k] - system_.eval_poly(k, x);
            auto alpha = steps_[k] == Step::kSquare ? system_.quad(k, k, k) : system_.lin(k, k);
            if (alpha.is_zero()) return std::nullopt;
            auto u = rest / alpha;
            x[k] = steps_[k] == Step::kSquare ? gf::sqrt(u) : u;
        }
        return x;
    }

    /// Tagged system bytes followed by the structure parameters.
    void serialize(ByteWriter& w) const {
        system_.serialize(w, kind_ == Kind::kOilVinegar ? SystemKind::kOilVinegar : SystemKind::kTriangular);
        if (kind_ == Kind::kOilVinegar) {
            w.u32(static_cast<std::uint32_t>(vinegar_));
        } else {
            for (auto s : steps_) w.u8(std::uint8_t(s));
        }
    }

    static CentralMap deserialize(ByteReader& r) {
        // Peek at the kind tag in the system header.
        ByteReader peek = r;
        peek.u32();
        peek.u32();
        auto tag = peek.u8();
        if (tag == std::uint8_t(SystemKind::kOilVinegar)) {
            auto system = QuadraticSystem::deserialize(r, SystemKind::kOilVinegar);
            auto vinegar = r.u32();
            if (vinegar == 0 || vinegar + system.outputs() != system.inputs())
                throw DecodeError("oil-vinegar map: inconsistent dimensions");
            const auto n = system.inputs();
            for (std::size_t k = 0; k < system.outputs(); ++k)
                for (std::size_t i = vinegar; i < n; ++i)
                    for (std::size_t j = i; j < n; ++j)
                        if (!system.quad(k, i, j).is_zero()) throw DecodeError("oil-vinegar map: oil x oil term");
            CentralMap f(Kind::kOilVinegar, std::move(system));
            f.vinegar_ = vinegar;
            return f;
        }
        if (tag == std::uint8_t(SystemKind::kTriangular)) {
            auto system = QuadraticSystem::deserialize(r, SystemKind::kTriangular);
            const auto n = system.inputs();
            if (system.outputs() != n) throw DecodeError("triangular map must be square");
            std::vector<Step> steps(n);
            for (auto& s : steps) {
                auto b = r.u8();
                if (b > 1) throw DecodeError("triangular map: bad step kind");
                s = Step(b);
            }
            for (std::size_t k = 0; k < n; ++k) {
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = std::max(i, k); j < n; ++j) {
                        bool allowed = steps[k] == Step::kSquare && i == k && j == k;
                        if (!allowed && !system.quad(k, i, j).is_zero())
                            throw DecodeError("triangular map: term outside the triangle");
                    }
                for (std::size_t i = k; i < n; ++i) {
                    bool allowed = steps[k] == Step::kLinear && i == k;
                    if (!allowed && !system.lin(k, i).is_zero())
                        throw DecodeError("triangular map: term outside the triangle");
                }
                auto alpha = steps[k] == Step::kSquare ? system.quad(k, k, k) : system.lin(k, k);
                if (alpha.is_zero()) throw DecodeError("triangular map: zero step coefficient");
            }
            CentralMap f(Kind::kTriangular, std::move(system));
            f.steps_ = std::move(steps);
            return f;
        }
        throw DecodeError("central map: unknown kind tag");
    }

    friend bool operator==(const CentralMap&, const CentralMap&) = default;

private:
    CentralMap(Kind kind, QuadraticSystem system) : kind_(kind), system_(std::move(system)) {}

    template <EntropySource R>
    static bool rng_bit(R& rng) {
        std::uint8_t b;
        rng.fill({&b, 1});
        return b & 1;
    }

    // With the vinegar fixed, polynomial k is affine in the oil variables:
    //   f_k = sum_j a_kj * oil_j + c_k
    std::optional<Vector> solve_oil(const Vector& y, const Vector& vinegar) const {
        const std::size_t v = vinegar_;
        const std::size_t o = outputs();
        Vector x = vinegar | Vector(o);
        gf::Matrix a(o, o);
        Vector rhs(o);
        for (std::size_t k = 0; k < o; ++k) {
            // Oil entries of x are zero, so this is exactly c_k.
            rhs[k] = y[k] - system_.eval_poly(k, x);
            for (std::size_t j = 0; j < o; ++j) {
                auto coeff = system_.lin(k, v + j);
                for (std::size_t i = 0; i < v; ++i) coeff += system_.quad(k, i, v + j) * vinegar[i];
                a(k, j) = coeff;
            }
        }
        auto oil = gf::solve(std::move(a), std::move(rhs));
        if (!oil) return std::nullopt;
        for (std::size_t j = 0; j < o; ++j) x[v + j] = (*oil)[j];
        return x;
    }

    Kind kind_ = Kind::kOilVinegar;
    QuadraticSystem system_;
    std::size_t vinegar_ = 0;
    std::vector<Step> steps_;
};

/// Explicit public system P with P(x) = outer(F(inner(x))) for all x.
///
/// Substitutes inner(x) = M x + t into every quadratic form of F symbolically,
///   f(Mx + t) = x^T (M^T Q M) x + ((Q + Q^T) t + l)^T M x + (t^T Q t + l^T t + c)
/// then folds the full quadratic matrix back to upper-triangular form and mixes the
/// polynomials through outer.
inline QuadraticSystem compose_trapdoor(const gf::AffineMap& outer, const CentralMap& f,
                                        const gf::AffineMap& inner) {
    const std::size_t n = f.inputs();
    const std::size_t m = f.outputs();
    if (inner.dim() != n || outer.dim() != m) throw gf::DimensionError("compose: dimension chain mismatch");

    const auto& fs = f.system();
    const auto& mat = inner.matrix();
    const auto& t = inner.offset();
    const auto mat_t = mat.transpose();

    QuadraticSystem inner_composed(n, m);
    for (std::size_t k = 0; k < m; ++k) {
        gf::Matrix q(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) q(i, j) = fs.quad(k, i, j);

        auto full = mat_t * (q * mat);
        for (std::size_t i = 0; i < n; ++i) {
            inner_composed.quad(k, i, i) = full(i, i);
            for (std::size_t j = i + 1; j < n; ++j) inner_composed.quad(k, i, j) = full(i, j) + full(j, i);
        }

        Vector sym_t(n);
        Element const_term = fs.constant(k);
        for (std::size_t i = 0; i < n; ++i) {
            Element acc = fs.lin(k, i);
            for (std::size_t j = 0; j < n; ++j) {
                auto qij = i <= j ? q(i, j) : Element{};
                auto qji = j <= i ? q(j, i) : Element{};
                acc += (qij + qji) * t[j];
            }
            sym_t[i] = acc;
            const_term += fs.lin(k, i) * t[i];
            for (std::size_t j = i; j < n; ++j) const_term += q(i, j) * t[i] * t[j];
        }
        auto lin = mat_t * sym_t;
        for (std::size_t i = 0; i < n; ++i) inner_composed.lin(k, i) = lin[i];
        inner_composed.constant(k) = const_term;
    }

    QuadraticSystem out(n, m);
    const auto& s = outer.matrix();
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t k = 0; k < m; ++k) {
            auto coeff = s(r, k);
            if (coeff.is_zero()) continue;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i; j < n; ++j) out.quad(r, i, j) += coeff * inner_composed.quad(k, i, j);
                out.lin(r, i) += coeff * inner_composed.lin(k, i);
            }
            out.constant(r) += coeff * inner_composed.constant(k);
        }
        out.constant(r) += outer.offset()[r];
    }
    return out;
}

}  // namespace pqevot::mq
