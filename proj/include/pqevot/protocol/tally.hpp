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

// Ballot validity and the published tally. Shared by the Count-Center and the
// public auditor so both apply the same rule.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pqevot/bytes.hpp"
#include "pqevot/commit.hpp"
#include "pqevot/expected.hpp"
#include "pqevot/mqe.hpp"
#include "pqevot/mqs.hpp"
#include "pqevot/protocol/board.hpp"
#include "pqevot/protocol/messages.hpp"
#include "pqevot/protocol/meter.hpp"
#include "pqevot/protocol/params.hpp"

namespace pqevot::protocol {

enum class RejectReason : std::uint8_t {
    kDecryptFailed = 1,
    kMalformed = 2,
    kBadSignature = 3,
    kBadOpening = 4,
    kUnknownCandidate = 5,
};

inline const char* to_string(RejectReason r) {
    switch (r) {
        case RejectReason::kDecryptFailed: return "DecryptFailed";
        case RejectReason::kMalformed: return "Malformed";
        case RejectReason::kBadSignature: return "BadSignature";
        case RejectReason::kBadOpening: return "BadOpening";
        case RejectReason::kUnknownCandidate: return "UnknownCandidate";
    }
    return "?";
}

struct Rejection {
    std::uint64_t seq = 0;
    RejectReason reason = RejectReason::kMalformed;
    friend bool operator==(const Rejection&, const Rejection&) = default;
};

/// The FinalTally payload. counts follow manifest order.
struct TallyResult {
    std::vector<std::pair<std::string, std::uint64_t>> counts;
    std::uint64_t total_valid = 0;
    std::vector<Rejection> rejected;

    friend bool operator==(const TallyResult&, const TallyResult&) = default;

    static TallyResult empty_for(const Manifest& m) {
        TallyResult t;
        for (const auto& c : m.candidates) t.counts.emplace_back(c, 0);
        return t;
    }

    std::uint64_t count(std::string_view candidate) const {
        for (const auto& [name, n] : counts)
            if (name == candidate) return n;
        return 0;
    }

    Bytes serialize() const {
        ByteWriter w;
        w.u32(static_cast<std::uint32_t>(counts.size()));
        for (const auto& [name, n] : counts) w.str(name).u64(n);
        w.u64(total_valid);
        w.u32(static_cast<std::uint32_t>(rejected.size()));
        for (const auto& r : rejected) w.u64(r.seq).u8(static_cast<std::uint8_t>(r.reason));
        return w.take();
    }

    static TallyResult deserialize(ByteView bytes) {
        ByteReader r(bytes);
        TallyResult t;
        auto n = r.u32();
        if (n > 4096) throw DecodeError("tally: too many candidates");
        for (std::uint32_t i = 0; i < n; ++i) {
            auto name = r.str();
            t.counts.emplace_back(std::move(name), r.u64());
        }
        t.total_valid = r.u64();
        auto k = r.u32();
        if (k > r.remaining() / 9) throw DecodeError("tally: bad rejection count");
        for (std::uint32_t i = 0; i < k; ++i) {
            auto seq = r.u64();
            auto reason = r.u8();
            if (reason < 1 || reason > 5) throw DecodeError("tally: unknown reason");
            t.rejected.push_back({seq, RejectReason(reason)});
        }
        r.expect_end();
        return t;
    }
};

/// Decide one Ballot entry: decrypt under the Count-Center key, then require
/// the Poll-Officer signature over CAN_j || c, a valid opening, and a known
/// candidate. Ticks one dec and (when decryption succeeds) one ver.
inline Expected<std::string, RejectReason> evaluate_ballot(ByteView ballot_bytes, const mqe::DecryptionKey& cc_key,
                                                           const PublicParams& pp, Meter* meter, Phase phase) {
    mqe::Ciphertext ballot;
    try {
        ballot = mqe::Ciphertext::deserialize(ballot_bytes);
    } catch (const DecodeError&) {
        return unexpected(RejectReason::kMalformed);
    }
    auto plain = mqe::decrypt(cc_key, ballot);
    tick(meter, phase, Op::kDec);
    if (!plain) return unexpected(RejectReason::kDecryptFailed);
    BallotContent content;
    try {
        content = BallotContent::deserialize(*plain);
    } catch (const DecodeError&) {
        return unexpected(RejectReason::kMalformed);
    }
    const auto& vote = content.vote;
    bool sig_ok = mqs::verify(candidate_message(content.candidate, vote.commitment), vote.signature,
                              pp.sig_key(Role::kPollOfficer));
    tick(meter, phase, Op::kVer);
    if (!sig_ok) return unexpected(RejectReason::kBadSignature);
    if (!commit::open(as_bytes(content.candidate), vote.commitment, vote.opening))
        return unexpected(RejectReason::kBadOpening);
    if (!pp.manifest.candidate_index(content.candidate)) return unexpected(RejectReason::kUnknownCandidate);
    return content.candidate;
}

/// Count every Ballot entry. Marks are returned in board order.
inline std::pair<TallyResult, std::vector<TallyMark>> compute_tally(const std::vector<BoardEntry>& entries,
                                                                    const mqe::DecryptionKey& cc_key,
                                                                    const PublicParams& pp, Meter* meter = nullptr,
                                                                    Phase phase = Phase::kTally) {
    auto result = TallyResult::empty_for(pp.manifest);
    std::vector<TallyMark> marks;
    for (const auto* e : entries_of(entries, EntryKind::kBallot)) {
        auto verdict = evaluate_ballot(e->payload, cc_key, pp, meter, phase);
        if (!verdict) {
            result.rejected.push_back({e->seq, verdict.error()});
            continue;
        }
        auto idx = *pp.manifest.candidate_index(*verdict);
        ++result.counts[idx].second;
        ++result.total_valid;
        marks.push_back({e->seq, *verdict});
    }
    return {std::move(result), std::move(marks)};
}

}  // namespace pqevot::protocol
