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
#include <concepts>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>

#include "pqevot/bytes.hpp"
#include "pqevot/hash.hpp"

namespace pqevot {

class EntropyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Anything that can fill a buffer with random bytes.
template <class T>
concept EntropySource = requires(T& src, std::span<std::uint8_t> out) { src.fill(out); };

/// Deterministic random bit generator: SHAKE-256 in counter mode over a 32-byte key.
///
/// Seeded instances make whole elections reproducible. derive() produces a child
/// stream that depends only on the parent key and a label, never on how much of
/// the parent stream was consumed, so independent parties can be given stable
/// streams regardless of scheduling.
class Drbg {
public:
    explicit Drbg(ByteView seed) : key_(sha3_256("drbg-seed-v1", seed)) {}

    static Drbg from_seed(std::uint64_t seed) {
        ByteWriter w;
        w.u64(seed);
        return Drbg(w.view());
    }

    static Drbg from_os() {
        std::array<std::uint8_t, 32> seed{};
        try {
            std::random_device rd;
            for (std::size_t i = 0; i < seed.size(); i += 4) {
                auto word = rd();
                for (std::size_t k = 0; k < 4; ++k) seed[i + k] = std::uint8_t(word >> (8 * k));
            }
        } catch (const std::exception& e) {
            throw EntropyError(std::string("OS entropy unavailable: ") + e.what());
        }
        return Drbg(seed);
    }

    Drbg derive(std::string_view label) const {
        auto child = Hasher::sha3_256().update("drbg-derive-v1").update(key_).update(label).digest();
        return Drbg(child, Raw{});
    }

    void fill(std::span<std::uint8_t> out) {
        for (auto& b : out) {
            if (pos_ == buf_.size()) refill();
            b = buf_[pos_++];
        }
    }

    std::uint8_t byte() {
        std::uint8_t b;
        fill({&b, 1});
        return b;
    }

    std::uint64_t u64() {
        std::array<std::uint8_t, 8> b{};
        fill(b);
        std::uint64_t v = 0;
        for (auto c : b) v = (v << 8) | c;
        return v;
    }

    /// Uniform integer in [0, bound).
    std::uint64_t uniform(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("uniform: empty range");
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        for (;;) {
            auto v = u64();
            if (v < limit) return v % bound;
        }
    }

    Bytes bytes(std::size_t n) {
        Bytes out(n);
        fill(out);
        return out;
    }

    template <std::size_t N>
    std::array<std::uint8_t, N> array() {
        std::array<std::uint8_t, N> out{};
        fill(out);
        return out;
    }

private:
    struct Raw {};
    Drbg(const Digest& key, Raw) : key_(key) {}

    void refill() {
        auto block = Hasher::shake256().update("drbg-block-v1").update(key_).update_u64(counter_++).squeeze(
            buf_.size());
        std::copy(block.begin(), block.end(), buf_.begin());
        pos_ = 0;
    }

    Digest key_;
    std::uint64_t counter_ = 0;
    std::array<std::uint8_t, 136> buf_{};
    std::size_t pos_ = buf_.size();
};

static_assert(EntropySource<Drbg>);

}  // namespace pqevot
