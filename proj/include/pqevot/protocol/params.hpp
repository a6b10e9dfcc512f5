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

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pqevot/bytes.hpp"
#include "pqevot/drbg.hpp"
#include "pqevot/mq_system.hpp"
#include "pqevot/mqe.hpp"
#include "pqevot/mqs.hpp"
#include "pqevot/protocol/manifest.hpp"
#include "pqevot/protocol/meter.hpp"

namespace pqevot::protocol {

/// The four authorities, in the order their keys appear in the public parameters.
enum class Role : std::uint8_t { kRegCenter = 0, kPollOfficer = 1, kCountCenter = 2, kVotCenter = 3 };
inline constexpr std::size_t kAuthorityCount = 4;
inline constexpr std::array<Role, kAuthorityCount> kAuthorities = {Role::kRegCenter, Role::kPollOfficer,
                                                                   Role::kCountCenter, Role::kVotCenter};

inline const char* to_string(Role r) {
    static constexpr const char* names[] = {"RC", "PO", "CC", "VC"};
    return names[static_cast<std::size_t>(r)];
}

/// Shape of the pseudonym system: inputs are (hashed identity || voter randomness).
struct PseudonymParams {
    std::uint32_t id_elems = 16;
    std::uint32_t rand_elems = 16;
    std::uint32_t outputs = 16;

    static constexpr PseudonymParams reference() { return {16, 16, 16}; }
    /// q^n = 2^16, small enough for exhaustive preimage search.
    static constexpr PseudonymParams tiny() { return {1, 1, 2}; }

    std::size_t inputs() const { return std::size_t(id_elems) + rand_elems; }
    friend bool operator==(const PseudonymParams&, const PseudonymParams&) = default;
};

struct Profile {
    mqs::Params sig = mqs::Params::reference();
    mqe::Params enc = mqe::Params::reference();
    PseudonymParams pseudonym = PseudonymParams::reference();

    static Profile reference() { return {}; }
};

/// pp: the authorities' public keys, the pseudonym system and the manifest.
struct PublicParams {
    std::array<mq::QuadraticSystem, kAuthorityCount> sig_keys;
    std::array<mq::QuadraticSystem, kAuthorityCount> enc_keys;
    PseudonymParams pseudonym;
    mq::QuadraticSystem pseudonym_system;
    Manifest manifest;

    const mq::QuadraticSystem& sig_key(Role r) const { return sig_keys[static_cast<std::size_t>(r)]; }
    const mq::QuadraticSystem& enc_key(Role r) const { return enc_keys[static_cast<std::size_t>(r)]; }
    std::size_t candidate_count() const { return manifest.candidates.size(); }

    friend bool operator==(const PublicParams&, const PublicParams&) = default;

    void validate() const {
        manifest.validate();
        std::set<KeyId> ids;
        for (const auto& k : sig_keys) ids.insert(key_id_of(k));
        for (const auto& k : enc_keys) ids.insert(key_id_of(k));
        if (ids.size() != 2 * kAuthorityCount) throw ManifestError("public parameters: key digests not distinct");
        if (pseudonym_system.inputs() != pseudonym.inputs() || pseudonym_system.outputs() != pseudonym.outputs)
            throw ManifestError("public parameters: pseudonym system shape mismatch");
    }

    void serialize(ByteWriter& w) const {
        w.u8(1);
        for (const auto& k : sig_keys) k.serialize(w);
        for (const auto& k : enc_keys) k.serialize(w);
        w.u32(pseudonym.id_elems).u32(pseudonym.rand_elems).u32(pseudonym.outputs);
        pseudonym_system.serialize(w);
        manifest.serialize(w);
    }

    Bytes serialize() const {
        ByteWriter w;
        serialize(w);
        return w.take();
    }

    static PublicParams deserialize(ByteView bytes) {
        ByteReader r(bytes);
        if (r.u8() != 1) throw DecodeError("public parameters: unknown version");
        PublicParams pp;
        for (auto& k : pp.sig_keys) k = mq::QuadraticSystem::deserialize(r);
        for (auto& k : pp.enc_keys) k = mq::QuadraticSystem::deserialize(r);
        pp.pseudonym = {r.u32(), r.u32(), r.u32()};
        pp.pseudonym_system = mq::QuadraticSystem::deserialize(r);
        pp.manifest = Manifest::deserialize(r);
        r.expect_end();
        pp.validate();
        return pp;
    }
};

/// One authority's private material.
struct RoleSecrets {
    mqe::DecryptionKey enc;
    mqs::SigningKey sig;

    friend bool operator==(const RoleSecrets&, const RoleSecrets&) = default;

    Bytes serialize() const {
        ByteWriter w;
        w.u8(1);
        enc.serialize(w);
        sig.serialize(w);
        return w.take();
    }

    static RoleSecrets deserialize(ByteView bytes) {
        ByteReader r(bytes);
        if (r.u8() != 1) throw DecodeError("role secrets: unknown version");
        auto enc = mqe::DecryptionKey::deserialize(r);
        auto sig = mqs::SigningKey::deserialize(r);
        r.expect_end();
        return {std::move(enc), std::move(sig)};
    }
};

struct ElectionSetup {
    PublicParams pp;
    std::vector<RoleSecrets> secrets;  // indexed by Role

    const RoleSecrets& secret(Role r) const { return secrets[static_cast<std::size_t>(r)]; }
};

/// Preparation phase: one encryption and one signature keypair per authority plus
/// a random pseudonym system. Exactly 4 + 4 key generations are metered.
inline ElectionSetup prepare_election(const Manifest& manifest, const Profile& profile, Drbg& rng,
                                      Meter* meter = nullptr) {
    manifest.validate();
    ElectionSetup setup;
    setup.pp.manifest = manifest;
    setup.pp.pseudonym = profile.pseudonym;
    for (auto role : kAuthorities) {
        auto i = static_cast<std::size_t>(role);
        auto enc = mqe::keygen(profile.enc, rng);
        tick(meter, Phase::kPreparation, Op::kKgEnc);
        auto sig = mqs::keygen(profile.sig, rng);
        tick(meter, Phase::kPreparation, Op::kKgSig);
        setup.pp.enc_keys[i] = std::move(enc.public_key);
        setup.pp.sig_keys[i] = std::move(sig.verification);
        setup.secrets.push_back({std::move(enc.secret), std::move(sig.signing)});
    }
    setup.pp.pseudonym_system = mq::QuadraticSystem::random(profile.pseudonym.inputs(), profile.pseudonym.outputs, rng);
    setup.pp.validate();
    return setup;
}

/// Identity bytes hashed to the fixed number of field elements the pseudonym system expects.
inline gf::Vector encode_identity(std::string_view id, std::size_t elems) {
    return gf::Vector::from_bytes(shake256("identity-v1", as_bytes(id), elems));
}

}  // namespace pqevot::protocol
