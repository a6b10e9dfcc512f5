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

// Hash-and-sign multivariate signatures over an Oil-Vinegar trapdoor.
//
// The verification key is P = S o F o T. To sign a message, its salted SHAKE-256
// digest is mapped to a target x in GF(256)^m and pulled back through S^-1, F^-1
// and T^-1 in that order. Reference parameters are desk scale and make no
// security claim.

#include <array>
#include <cstdint>
#include <stdexcept>

#include "pqevot/bytes.hpp"
#include "pqevot/central_map.hpp"
#include "pqevot/drbg.hpp"
#include "pqevot/gf256.hpp"
#include "pqevot/hash.hpp"
#include "pqevot/mq_system.hpp"

namespace pqevot {

using KeyId = std::array<std::uint8_t, 16>;

/// First 16 bytes of the domain-separated SHA3-256 of a serialized public system.
inline KeyId key_id_of(const mq::QuadraticSystem& public_key) {
    auto d = sha3_256("key-id-v1", public_key.serialize());
    KeyId id{};
    std::copy_n(d.begin(), id.size(), id.begin());
    return id;
}

}  // namespace pqevot

namespace pqevot::mqs {

inline constexpr std::size_t kSaltBytes = 16;
inline constexpr int kSaltRetries = 256;

struct Params {
    std::size_t vinegar;
    std::size_t oil;

    static constexpr Params reference() { return {24, 16}; }
    static constexpr Params tiny() { return {4, 2}; }

    std::size_t n() const { return vinegar + oil; }
    std::size_t m() const { return oil; }
};

class SigningFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Signature {
    gf::Vector w;
    std::array<std::uint8_t, kSaltBytes> salt{};

    friend bool operator==(const Signature&, const Signature&) = default;

    /// w as a FieldVector, then the 16-byte salt.
    void serialize(ByteWriter& out) const {
        w.serialize(out);
        out.raw(salt);
    }
    Bytes serialize() const {
        ByteWriter out;
        serialize(out);
        return out.take();
    }
    static Signature deserialize(ByteReader& in) {
        Signature s;
        s.w = gf::Vector::deserialize(in);
        s.salt = in.array<kSaltBytes>();
        return s;
    }
    static Signature deserialize(ByteView bytes) {
        ByteReader in(bytes);
        auto s = deserialize(in);
        in.expect_end();
        return s;
    }
};

struct SigningKey {
    gf::AffineMap outer;  // S, m x m
    mq::CentralMap central;
    gf::AffineMap inner;  // T, n x n

    friend bool operator==(const SigningKey&, const SigningKey&) = default;

    void serialize(ByteWriter& w) const {
        outer.serialize(w);
        central.serialize(w);
        inner.serialize(w);
    }
    static SigningKey deserialize(ByteReader& r) {
        auto s = gf::AffineMap::deserialize(r);
        auto f = mq::CentralMap::deserialize(r);
        auto t = gf::AffineMap::deserialize(r);
        if (f.kind() != mq::CentralMap::Kind::kOilVinegar) throw DecodeError("signing key: central map is not oil-vinegar");
        if (s.dim() != f.outputs() || t.dim() != f.inputs()) throw DecodeError("signing key: dimension chain");
        return {std::move(s), std::move(f), std::move(t)};
    }
};

struct KeyPair {
    SigningKey signing;
    mq::QuadraticSystem verification;
    KeyId key_id{};
};

/// Hash target for (msg, salt) as an m-vector.
inline gf::Vector message_target(ByteView msg, std::span<const std::uint8_t> salt, std::size_t m) {
    return gf::Vector::from_bytes(
        Hasher::shake256().update("mqs-target-v1").update_u64(msg.size()).update(msg).update(salt).squeeze(m));
}

template <EntropySource R>
KeyPair keygen(Params params, R& rng) {
    if (params.oil == 0 || params.vinegar < params.oil) throw std::invalid_argument("mqs: need vinegar >= oil >= 1");
    auto s = gf::AffineMap::random(params.m(), rng);
    auto f = mq::CentralMap::random_oil_vinegar(params.vinegar, params.oil, rng);
    auto t = gf::AffineMap::random(params.n(), rng);
    auto p = mq::compose_trapdoor(s, f, t);
    auto id = key_id_of(p);
    return {{std::move(s), std::move(f), std::move(t)}, std::move(p), id};
}

template <EntropySource R>
Signature sign(const SigningKey& key, ByteView msg, R& rng) {
    const auto m = key.central.outputs();
    for (int attempt = 0; attempt < kSaltRetries; ++attempt) {
        Signature sig;
        rng.fill(sig.salt);
        auto x = message_target(msg, sig.salt, m);
        auto y = key.outer.invert_apply(x);
        auto z = key.central.invert(y, rng);
        if (!z) continue;
        sig.w = key.inner.invert_apply(*z);
        return sig;
    }
    throw SigningFailure("mqs: no preimage after salt retries; regenerate the key");
}

/// Accepts iff P(w) equals the salted hash target. Malformed input rejects.
inline bool verify(ByteView msg, const Signature& sig, const mq::QuadraticSystem& public_key) {
    if (sig.w.size() != public_key.inputs()) return false;
    return public_key.eval(sig.w) == message_target(msg, sig.salt, public_key.outputs());
}

}  // namespace pqevot::mqs
