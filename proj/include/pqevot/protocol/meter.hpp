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

// Per-phase counters of the expensive primitive calls made by protocol roles.

#include <array>
#include <atomic>
#include <cstdint>
#include <ostream>
#include <string>

namespace pqevot::protocol {

enum class Phase : std::uint8_t {
    kPreparation,
    kRegistration,
    kVoting,
    kCollection,  // PO hands ballots to VC and collects VC receipts
    kVerification,
    kTally,
};
inline constexpr std::size_t kPhaseCount = 6;

enum class Op : std::uint8_t { kKgSig, kKgEnc, kEnc, kDec, kSign, kVer, kEval };
inline constexpr std::size_t kOpCount = 7;

inline const char* to_string(Phase p) {
    static constexpr const char* names[] = {"Preparation", "Registration", "Voting",
                                            "Collection",  "Verification", "Tally"};
    return names[static_cast<std::size_t>(p)];
}

inline const char* to_string(Op o) {
    static constexpr const char* names[] = {"kg_sig", "kg_enc", "enc", "dec", "sign", "ver", "eval"};
    return names[static_cast<std::size_t>(o)];
}

struct OpCounts {
    std::array<std::uint64_t, kOpCount> n{};

    std::uint64_t operator[](Op o) const { return n[static_cast<std::size_t>(o)]; }
    std::uint64_t& operator[](Op o) { return n[static_cast<std::size_t>(o)]; }

    static OpCounts of(std::initializer_list<std::pair<Op, std::uint64_t>> items) {
        OpCounts c;
        for (auto [op, v] : items) c[op] = v;
        return c;
    }

    OpCounts scaled(std::uint64_t k) const {
        OpCounts c = *this;
        for (auto& v : c.n) v *= k;
        return c;
    }

    friend OpCounts operator-(OpCounts a, const OpCounts& b) {
        for (std::size_t i = 0; i < kOpCount; ++i) a.n[i] -= b.n[i];
        return a;
    }
    friend OpCounts operator+(OpCounts a, const OpCounts& b) {
        for (std::size_t i = 0; i < kOpCount; ++i) a.n[i] += b.n[i];
        return a;
    }
    friend bool operator==(const OpCounts&, const OpCounts&) = default;

    std::string to_string() const {
        std::string s = "{";
        bool first = true;
        for (std::size_t i = 0; i < kOpCount; ++i) {
            if (n[i] == 0) continue;
            if (!first) s += ", ";
            s += protocol::to_string(Op(i));
            s += ": " + std::to_string(n[i]);
            first = false;
        }
        return s + "}";
    }
};

inline std::ostream& operator<<(std::ostream& os, const OpCounts& c) { return os << c.to_string(); }

using CounterReport = std::array<OpCounts, kPhaseCount>;

/// Thread-safe counters. Roles hold a nullable pointer and tick through it.
class Meter {
public:
    void tick(Phase p, Op o, std::uint64_t k = 1) {
        counts_[static_cast<std::size_t>(p)][static_cast<std::size_t>(o)].fetch_add(k, std::memory_order_relaxed);
    }

    OpCounts phase(Phase p) const {
        OpCounts c;
        for (std::size_t i = 0; i < kOpCount; ++i)
            c.n[i] = counts_[static_cast<std::size_t>(p)][i].load(std::memory_order_relaxed);
        return c;
    }

    CounterReport report() const {
        CounterReport r;
        for (std::size_t p = 0; p < kPhaseCount; ++p) r[p] = phase(Phase(p));
        return r;
    }

    void reset() {
        for (auto& row : counts_)
            for (auto& c : row) c.store(0);
    }

private:
    std::array<std::array<std::atomic<std::uint64_t>, kOpCount>, kPhaseCount> counts_{};
};

inline void tick(Meter* m, Phase p, Op o, std::uint64_t k = 1) {
    if (m) m->tick(p, o, k);
}

}  // namespace pqevot::protocol
