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

// Hash commitment: c = SHA3-256("commit-v1" || len(m) || m || r), r 32 random bytes.
// Computationally hiding and computationally binding. Anything with the same
// comm/open shape can replace it without touching the protocol.

#include <array>
#include <cstdint>
#include <utility>

#include "pqevot/bytes.hpp"
#include "pqevot/drbg.hpp"
#include "pqevot/hash.hpp"

namespace pqevot::commit {

struct Commitment {
    Digest c{};
    friend bool operator==(const Commitment&, const Commitment&) = default;
};

struct Opening {
    std::array<std::uint8_t, 32> r{};
    friend bool operator==(const Opening&, const Opening&) = default;
};

inline constexpr std::size_t kCommitmentBytes = 32;
inline constexpr std::size_t kOpeningBytes = 32;

inline Commitment commit_with(ByteView m, const Opening& opening) {
    return {Hasher::sha3_256()
                .update("commit-v1")
                .update_u32(static_cast<std::uint32_t>(m.size()))
                .update(m)
                .update(opening.r)
                .digest()};
}

template <EntropySource R>
std::pair<Commitment, Opening> comm(ByteView m, R& rng) {
    Opening opening;
    rng.fill(opening.r);
    return {commit_with(m, opening), opening};
}

inline bool open(ByteView m, const Commitment& c, const Opening& opening) {
    return commit_with(m, opening) == c;
}

}  // namespace pqevot::commit
