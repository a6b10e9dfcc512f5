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

// Public audit: anyone holding the board and pp can recount once the
// Count-Center key is disclosed.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pqevot/bytes.hpp"
#include "pqevot/mqe.hpp"
#include "pqevot/protocol/board.hpp"
#include "pqevot/protocol/params.hpp"
#include "pqevot/protocol/tally.hpp"

namespace pqevot::protocol {

enum class AuditVerdict { kConsistent, kDiscrepancy, kNotYetPublic };

inline const char* to_string(AuditVerdict v) {
    switch (v) {
        case AuditVerdict::kConsistent: return "Consistent";
        case AuditVerdict::kDiscrepancy: return "Discrepancy";
        case AuditVerdict::kNotYetPublic: return "NotYetPublic";
    }
    return "?";
}

struct AuditReport {
    AuditVerdict verdict = AuditVerdict::kConsistent;
    std::optional<std::uint64_t> seq;  // first divergent entry
    std::string detail;
    std::optional<TallyResult> recomputed;
    std::optional<TallyResult> published;

    bool consistent() const { return verdict == AuditVerdict::kConsistent; }
};

namespace detail {

inline AuditReport discrepancy(std::uint64_t seq, std::string detail) {
    AuditReport r;
    r.verdict = AuditVerdict::kDiscrepancy;
    r.seq = seq;
    r.detail = std::move(detail);
    return r;
}

inline std::string describe_counts(const TallyResult& t) {
    std::string s;
    for (const auto& [name, n] : t.counts) {
        if (!s.empty()) s += ", ";
        s += name + "=" + std::to_string(n);
    }
    return s + " (valid " + std::to_string(t.total_valid) + ", rejected " + std::to_string(t.rejected.size()) + ")";
}

}  // namespace detail

/// Verify the chain, check the disclosed key against pk_E of the Count-Center,
/// recount every Ballot entry and compare against each TallyMark and the
/// FinalTally, reporting the first entry that disagrees.
inline AuditReport audit(const std::vector<BoardEntry>& entries, const PublicParams& pp) {
    if (auto bad = first_bad_link(entries)) return detail::discrepancy(*bad, "hash chain broken");

    const BoardEntry* disclosure = nullptr;
    const BoardEntry* final_entry = nullptr;
    for (const auto& e : entries) {
        if (e.kind == EntryKind::kCCKeyDisclosure && !disclosure) disclosure = &e;
        if (e.kind == EntryKind::kFinalTally && !final_entry) final_entry = &e;
    }
    if (!disclosure) {
        AuditReport r;
        r.verdict = AuditVerdict::kNotYetPublic;
        r.detail = "no Count-Center key disclosure on the board";
        return r;
    }
    if (!final_entry) return detail::discrepancy(disclosure->seq, "key disclosed without a final tally");

    std::optional<mqe::DecryptionKey> key;
    try {
        key = mqe::DecryptionKey::deserialize(disclosure->payload);
    } catch (const DecodeError& e) {
        return detail::discrepancy(disclosure->seq, std::string("disclosed key unreadable: ") + e.what());
    }
    if (key->public_key() != pp.enc_key(Role::kCountCenter))
        return detail::discrepancy(disclosure->seq, "disclosed key does not match the Count-Center public key");

    // Ballots are only meaningful before the tally started.
    for (const auto& e : entries)
        if (e.kind == EntryKind::kBallot && e.seq > final_entry->seq)
            return detail::discrepancy(e.seq, "ballot appended after the final tally");

    auto [recount, marks] = compute_tally(entries, *key, pp);

    std::size_t next_mark = 0;
    for (const auto& e : entries) {
        if (e.kind != EntryKind::kTallyMark) continue;
        TallyMark published;
        try {
            published = TallyMark::deserialize(e.payload);
        } catch (const DecodeError&) {
            return detail::discrepancy(e.seq, "unreadable tally mark");
        }
        if (next_mark >= marks.size())
            return detail::discrepancy(e.seq, "tally mark for ballot " + std::to_string(published.ballot_seq) +
                                                  " has no valid ballot behind it");
        const auto& expect = marks[next_mark];
        if (published != expect)
            return detail::discrepancy(e.seq, "tally mark says ballot " + std::to_string(published.ballot_seq) +
                                                  " -> " + published.candidate + ", recount says ballot " +
                                                  std::to_string(expect.ballot_seq) + " -> " + expect.candidate);
        ++next_mark;
    }
    if (next_mark < marks.size())
        return detail::discrepancy(final_entry->seq, "valid ballot " + std::to_string(marks[next_mark].ballot_seq) +
                                                         " has no tally mark");

    TallyResult published;
    try {
        published = TallyResult::deserialize(final_entry->payload);
    } catch (const DecodeError&) {
        return detail::discrepancy(final_entry->seq, "unreadable final tally");
    }
    if (published != recount) {
        auto r = detail::discrepancy(final_entry->seq, "final tally published " + detail::describe_counts(published) +
                                                           "; recount " + detail::describe_counts(recount));
        r.recomputed = recount;
        r.published = published;
        return r;
    }

    AuditReport r;
    r.detail = "recount matches: " + detail::describe_counts(recount);
    r.recomputed = recount;
    r.published = published;
    return r;
}

}  // namespace pqevot::protocol
