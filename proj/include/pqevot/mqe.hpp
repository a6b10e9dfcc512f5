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

// Multivariate public-key encryption for byte payloads.
//
// KEM: a uniform x in GF(256)^n is encapsulated as y = P(x) with P = L o F o T and
// F triangular, so the holder of (L, F, T) recovers x uniquely.
// DEM: payload XOR SHAKE-256(H(x)), authenticated by tag = SHA3-256(x || body).

#include <cstdint>
#include <stdexcept>

#include "pqevot/bytes.hpp"
#include "pqevot/central_map.hpp"
#include "pqevot/drbg.hpp"
#include "pqevot/expected.hpp"
#include "pqevot/gf256.hpp"
#include "pqevot/hash.hpp"
#include "pqevot/mq_system.hpp"
#include "pqevot/mqs.hpp"

namespace pqevot::mqe {

struct Params {
    std::size_t n;

    static constexpr Params reference() { return {32}; }
    static constexpr Params tiny() { return {4}; }
};

enum class DecryptError : std::uint8_t { kTag = 1, kNoPreimage = 2 };

inline const char* to_string(DecryptError e) {
    switch (e) {
        case DecryptError::kTag: return "tag mismatch";
        case DecryptError::kNoPreimage: return "encapsulation has no preimage";
    }
    return "unknown";
}

struct DecryptionKey {
    gf::AffineMap outer;  // L, m x m
    mq::CentralMap central;
    gf::AffineMap inner;  // T, n x n

    friend bool operator==(const DecryptionKey&, const DecryptionKey&) = default;

    void serialize(ByteWriter& w) const {
        outer.serialize(w);
        central.serialize(w);
        inner.serialize(w);
    }
    Bytes serialize() const {
        ByteWriter w;
        serialize(w);
        return w.take();
    }
    static DecryptionKey deserialize(ByteReader& r) {
        auto l = gf::AffineMap::deserialize(r);
        auto f = mq::CentralMap::deserialize(r);
        auto t = gf::AffineMap::deserialize(r);
        if (f.kind() != mq::CentralMap::Kind::kTriangular) throw DecodeError("decryption key: central map is not triangular");
        if (l.dim() != f.outputs() || t.dim() != f.inputs()) throw DecodeError("decryption key: dimension chain");
        return {std::move(l), std::move(f), std::move(t)};
    }
    static DecryptionKey deserialize(ByteView bytes) {
        ByteReader r(bytes);
        auto k = deserialize(r);
        r.expect_end();
        return k;
    }

    mq::QuadraticSystem public_key() const { return mq::compose_trapdoor(outer, central, inner); }
};

struct KeyPair {
    DecryptionKey secret;
    mq::QuadraticSystem public_key;
    KeyId key_id{};
};

struct Ciphertext {
    gf::Vector encap;
    Bytes body;
    Digest tag{};

    friend bool operator==(const Ciphertext&, const Ciphertext&) = default;

    /// encap vector || 4-byte BE body length || body || 32-byte tag.
    void serialize(ByteWriter& w) const {
        encap.serialize(w);
        w.bytes(body);
        w.raw(tag);
    }
    Bytes serialize() const {
        ByteWriter w;
        serialize(w);
        return w.take();
    }
    static Ciphertext deserialize(ByteReader& r) {
        Ciphertext c;
        c.encap = gf::Vector::deserialize(r);
        c.body = r.bytes();
        c.tag = r.array<32>();
        return c;
    }
    static Ciphertext deserialize(ByteView bytes) {
        ByteReader r(bytes);
        auto c = deserialize(r);
        r.expect_end();
        return c;
    }
};

/// Serialized size of a ciphertext for a payload of `payload_len` bytes.
inline std::size_t ciphertext_size(std::size_t m, std::size_t payload_len) {
    return 4 + m + 4 + payload_len + 32;
}

namespace detail {

inline Bytes keystream(const gf::Vector& seed, std::size_t len) {
    auto key = sha3_256("mqe-seed-v1", seed.raw_bytes());
    return shake256("mqe-keystream-v1", key, len);
}

inline Digest tag(const gf::Vector& seed, ByteView body) {
    auto raw = seed.raw_bytes();
    return Hasher::sha3_256().update("mqe-tag-v1").update(raw).update_u64(body.size()).update(body).digest();
}

}  // namespace detail

template <EntropySource R>
KeyPair keygen(Params params, R& rng) {
    if (params.n < 2) throw std::invalid_argument("mqe: need n >= 2");
    auto l = gf::AffineMap::random(params.n, rng);
    auto f = mq::CentralMap::random_triangular(params.n, rng);
    auto t = gf::AffineMap::random(params.n, rng);
    auto p = mq::compose_trapdoor(l, f, t);
    auto id = key_id_of(p);
    return {{std::move(l), std::move(f), std::move(t)}, std::move(p), id};
}

template <EntropySource R>
Ciphertext encrypt(const mq::QuadraticSystem& public_key, ByteView payload, R& rng) {
    auto x = gf::Vector::random(public_key.inputs(), rng);
    Ciphertext ct;
    ct.encap = public_key.eval(x);
    auto ks = detail::keystream(x, payload.size());
    ct.body.resize(payload.size());
    for (std::size_t i = 0; i < payload.size(); ++i) ct.body[i] = payload[i] ^ ks[i];
    ct.tag = detail::tag(x, ct.body);
    return ct;
}

/// z = L^-1(y), w = F^-1(z), x = T^-1(w).
inline std::optional<gf::Vector> recover_seed(const DecryptionKey& key, const gf::Vector& encap) {
    if (encap.size() != key.outer.dim()) return std::nullopt;
    auto z = key.outer.invert_apply(encap);
    auto w = key.central.invert_triangular(z);
    if (!w) return std::nullopt;
    return key.inner.invert_apply(*w);
}

inline Expected<Bytes, DecryptError> decrypt(const DecryptionKey& key, const Ciphertext& ct) {
    auto x = recover_seed(key, ct.encap);
    if (!x) return unexpected(DecryptError::kNoPreimage);
    if (detail::tag(*x, ct.body) != ct.tag) return unexpected(DecryptError::kTag);
    auto ks = detail::keystream(*x, ct.body.size());
    Bytes out(ct.body.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = ct.body[i] ^ ks[i];
    return out;
}

}  // namespace pqevot::mqe
