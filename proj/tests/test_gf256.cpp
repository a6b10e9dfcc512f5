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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pqevot/drbg.hpp"
#include "pqevot/gf256.hpp"

namespace {

using pqevot::Drbg;
using pqevot::gf::AffineMap;
using pqevot::gf::Element;
using pqevot::gf::Matrix;
using pqevot::gf::Vector;

TEST(Gf256, MultiplicationMatchesPeasantOracleExhaustively) {
    for (int a = 0; a < 256; ++a)
        for (int b = 0; b < 256; ++b)
            ASSERT_EQ(pqevot::gf::mul(a, b), oracle::peasant_mul(a, b)) << a << " * " << b;
}

TEST(Gf256, ZeroAndOne) {
    for (int a = 0; a < 256; ++a) {
        EXPECT_EQ(pqevot::gf::mul(a, 0), 0);
        EXPECT_EQ(pqevot::gf::mul(a, 1), a);
    }
}

TEST(Gf256, KnownProduct) {
    // Frozen from the peasant oracle; 0x53 and 0xCA are inverses under 0x11B.
    EXPECT_EQ(oracle::peasant_mul(0x53, 0xca), 0x01);
    EXPECT_EQ(pqevot::gf::mul(0x53, 0xca), 0x01);
}

TEST(Gf256, AdditionIsSelfInverse) {
    for (int a = 0; a < 256; ++a) {
        Element e(a);
        EXPECT_TRUE((e + e).is_zero());
    }
}

TEST(Gf256, InverseAgreesWithOracle) {
    for (int a = 1; a < 256; ++a) {
        EXPECT_EQ(pqevot::gf::inv(a), oracle::peasant_inv(a));
        EXPECT_EQ(Element(a) * pqevot::gf::inverse(Element(a)), Element(1));
    }
    EXPECT_THROW(pqevot::gf::inverse(Element(0)), std::domain_error);
}

TEST(Gf256, SqrtInvertsSquaring) {
    for (int a = 0; a < 256; ++a) {
        Element e(a);
        EXPECT_EQ(pqevot::gf::sqrt(e * e), e);
    }
}

TEST(Gf256, RingAxiomsOnRandomTriples) {
    auto rng = Drbg::from_seed(1);
    for (int i = 0; i < 100000; ++i) {
        Element a(rng.byte()), b(rng.byte()), c(rng.byte());
        ASSERT_EQ(a * (b * c), (a * b) * c);
        ASSERT_EQ(a * (b + c), a * b + a * c);
        ASSERT_EQ(a * b, b * a);
    }
}

TEST(AffineMap, IdentityIsNoOp) {
    auto rng = Drbg::from_seed(2);
    auto id = AffineMap::identity(8);
    auto v = Vector::random(8, rng);
    EXPECT_EQ(id.apply(v), v);
    EXPECT_EQ(id.invert_apply(v), v);
}

TEST(AffineMap, InverseRoundtrip) {
    auto rng = Drbg::from_seed(3);
    auto map = AffineMap::random(12, rng);
    for (int i = 0; i < 1000; ++i) {
        auto v = Vector::random(12, rng);
        ASSERT_EQ(map.invert_apply(map.apply(v)), v);
        ASSERT_EQ(map.apply(map.invert_apply(v)), v);
    }
}

TEST(AffineMap, TwoByTwoMatchesDotProductOracle) {
    Matrix m(2, 2);
    m(0, 0) = Element(0x02);
    m(0, 1) = Element(0x03);
    m(1, 0) = Element(0x01);
    m(1, 1) = Element(0x57);
    Vector off(std::vector<Element>{Element(0x10), Element(0x20)});
    AffineMap map(m, off);
    Vector v(std::vector<Element>{Element(0x83), Element(0x1f)});
    auto expected = oracle::matvec(m, {0x83, 0x1f});
    expected[0] ^= 0x10;
    expected[1] ^= 0x20;
    EXPECT_EQ(map.apply(v).raw_bytes(), expected);
}

TEST(AffineMap, TwoByTwoInverseMatchesCramerOracle) {
    // [[a b][c d]]^-1 = det^-1 [[d b][c a]] in characteristic two.
    auto rng = Drbg::from_seed(4);
    for (int trial = 0; trial < 200; ++trial) {
        auto map = AffineMap::random(2, rng);
        auto v = Vector::random(2, rng);
        const auto& m = map.matrix();
        std::uint8_t a = m(0, 0).value(), b = m(0, 1).value(), c = m(1, 0).value(), d = m(1, 1).value();
        std::uint8_t det = oracle::peasant_mul(a, d) ^ oracle::peasant_mul(b, c);
        ASSERT_NE(det, 0);
        std::uint8_t det_inv = oracle::peasant_inv(det);
        std::uint8_t r0 = v[0].value() ^ map.offset()[0].value();
        std::uint8_t r1 = v[1].value() ^ map.offset()[1].value();
        std::uint8_t u0 = oracle::peasant_mul(det_inv, oracle::peasant_mul(d, r0) ^ oracle::peasant_mul(b, r1));
        std::uint8_t u1 = oracle::peasant_mul(det_inv, oracle::peasant_mul(c, r0) ^ oracle::peasant_mul(a, r1));
        auto u = map.invert_apply(v);
        ASSERT_EQ(u[0].value(), u0);
        ASSERT_EQ(u[1].value(), u1);
    }
}

TEST(AffineMap, RandomDimensionOneIsNonzero) {
    auto rng = Drbg::from_seed(5);
    for (int i = 0; i < 100; ++i) EXPECT_FALSE(AffineMap::random(1, rng).matrix()(0, 0).is_zero());
}

TEST(AffineMap, RandomMapsAreInvertible) {
    auto rng = Drbg::from_seed(6);
    for (int i = 0; i < 100; ++i) EXPECT_TRUE(AffineMap::random(16, rng).matrix().is_invertible());
}

TEST(AffineMap, SeededGenerationIsDeterministic) {
    auto r1 = Drbg::from_seed(77);
    auto r2 = Drbg::from_seed(77);
    EXPECT_EQ(AffineMap::random(2, r1), AffineMap::random(2, r2));
}

TEST(AffineMap, DimensionMismatchThrows) {
    auto rng = Drbg::from_seed(7);
    auto map = AffineMap::random(4, rng);
    EXPECT_THROW(map.apply(Vector(3)), pqevot::gf::DimensionError);
    EXPECT_THROW(map.invert_apply(Vector(5)), pqevot::gf::DimensionError);
    EXPECT_THROW(AffineMap::random(0, rng), pqevot::gf::DimensionError);
}

TEST(AffineMap, SingularMatrixRejected) {
    Matrix m(2, 2);
    m(0, 0) = Element(1);
    m(0, 1) = Element(2);
    m(1, 0) = Element(2);
    m(1, 1) = Element(4);  // row 1 = 2 * row 0
    EXPECT_THROW(AffineMap(m, Vector(2)), std::invalid_argument);
}

TEST(Serialization, VectorAndAffineMapLayout) {
    Vector v(std::vector<Element>{Element(0xaa), Element(0xbb)});
    EXPECT_EQ(v.serialize(), (pqevot::Bytes{0, 0, 0, 2, 0xaa, 0xbb}));

    auto map = AffineMap::identity(2);
    EXPECT_EQ(map.serialize(), (pqevot::Bytes{0, 0, 0, 2, 1, 0, 0, 1, 0, 0}));

    auto rng = Drbg::from_seed(8);
    auto random_map = AffineMap::random(5, rng);
    auto bytes = random_map.serialize();
    pqevot::ByteReader r(bytes);
    EXPECT_EQ(AffineMap::deserialize(r), random_map);
    EXPECT_TRUE(r.done());
}

}  // namespace
