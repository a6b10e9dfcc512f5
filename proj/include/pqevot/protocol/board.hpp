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

// Append-only, hash-chained public log.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqevot/bytes.hpp"
#include "pqevot/hash.hpp"

namespace pqevot::protocol {

enum class EntryKind : std::uint8_t {
    kPseudonym = 1,
    kBallot = 2,
    kTallyMark = 3,
    kFinalTally = 4,
    kCCKeyDisclosure = 5,
};

inline const char* to_string(EntryKind k) {
    switch (k) {
        case EntryKind::kPseudonym: return "Pseudonym";
        case EntryKind::kBallot: return "Ballot";
        case EntryKind::kTallyMark: return "TallyMark";
        case EntryKind::kFinalTally: return "FinalTally";
        case EntryKind::kCCKeyDisclosure: return "CCKeyDisclosure";
    }
    return "?";
}

inline bool is_entry_kind(std::uint8_t k) { return k >= 1 && k <= 5; }

struct BoardEntry {
    std::uint64_t seq = 0;
    EntryKind kind = EntryKind::kPseudonym;
    Bytes payload;
    Digest prev_hash{};
    Digest entry_hash{};

    friend bool operator==(const BoardEntry&, const BoardEntry&) = default;

    static Digest compute_hash(std::uint64_t seq, EntryKind kind, ByteView payload, const Digest& prev) {
        return Hasher::sha3_256()
            .update("board-v1")
            .update_u64(seq)
            .update(std::array<std::uint8_t, 1>{static_cast<std::uint8_t>(kind)})
            .update_u32(static_cast<std::uint32_t>(payload.size()))
            .update(payload)
            .update(prev)
            .digest();
    }

    bool hash_matches() const { return compute_hash(seq, kind, payload, prev_hash) == entry_hash; }

    void serialize(ByteWriter& w) const {
        w.u64(seq).u8(static_cast<std::uint8_t>(kind)).bytes(payload).raw(prev_hash).raw(entry_hash);
    }
    Bytes serialize() const {
        ByteWriter w;
        serialize(w);
        return w.take();
    }
    static BoardEntry deserialize(ByteReader& r) {
        BoardEntry e;
        e.seq = r.u64();
        auto kind = r.u8();
        if (!is_entry_kind(kind)) throw DecodeError("board entry: unknown kind");
        e.kind = EntryKind(kind);
        e.payload = r.bytes();
        e.prev_hash = r.array<32>();
        e.entry_hash = r.array<32>();
        return e;
    }
    static BoardEntry deserialize(ByteView bytes) {
        ByteReader r(bytes);
        auto e = deserialize(r);
        r.expect_end();
        return e;
    }
};

/// A contiguous read. head is the last seq on the board, -1 when empty.
struct BoardSlice {
    std::vector<BoardEntry> entries;
    std::int64_t head = -1;

    void serialize(ByteWriter& w) const {
        w.i64(head).u32(static_cast<std::uint32_t>(entries.size()));
        for (const auto& e : entries) e.serialize(w);
    }
    Bytes serialize() const {
        ByteWriter w;
        serialize(w);
        return w.take();
    }
    static BoardSlice deserialize(ByteView bytes) {
        ByteReader r(bytes);
        BoardSlice s;
        s.head = r.i64();
        auto n = r.u32();
        for (std::uint32_t i = 0; i < n; ++i) s.entries.push_back(BoardEntry::deserialize(r));
        r.expect_end();
        return s;
    }
};

/// Index of the first entry that breaks the chain (bad hash, bad link or
/// non-dense seq), or nullopt if the whole sequence verifies from genesis.
inline std::optional<std::size_t> first_bad_link(const std::vector<BoardEntry>& entries) {
    Digest prev{};
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.seq != i || e.prev_hash != prev || !e.hash_matches()) return i;
        prev = e.entry_hash;
    }
    return std::nullopt;
}

/// Rebuild a chain over the given (kind, payload) records. Used by tests that
/// need a well-linked board with altered content.
inline std::vector<BoardEntry> rechain(const std::vector<BoardEntry>& entries) {
    std::vector<BoardEntry> out;
    Digest prev{};
    for (const auto& src : entries) {
        BoardEntry e{out.size(), src.kind, src.payload, prev, {}};
        e.entry_hash = BoardEntry::compute_hash(e.seq, e.kind, e.payload, prev);
        prev = e.entry_hash;
        out.push_back(std::move(e));
    }
    return out;
}

class BoardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// What writers and readers of the board see, local or remote.
class BoardAccess {
public:
    virtual ~BoardAccess() = default;
    /// Append and return the new entry's seq.
    virtual std::uint64_t append(EntryKind kind, ByteView payload) = 0;
    /// Entries with from <= seq < to, truncated at the head.
    virtual BoardSlice read(std::uint64_t from, std::uint64_t to) const = 0;

    BoardSlice read_all() const { return read(0, UINT64_MAX); }
};

class BulletinBoard final : public BoardAccess {
public:
    /// Called with each new entry before it becomes visible; throwing aborts the append.
    using Persist = std::function<void(const BoardEntry&)>;

    BulletinBoard() = default;

    /// Adopt entries recovered from storage. The chain must verify.
    explicit BulletinBoard(std::vector<BoardEntry> recovered) : entries_(std::move(recovered)) {
        if (auto bad = first_bad_link(entries_)) throw BoardError("board chain broken at seq " + std::to_string(*bad));
    }

    void set_persist(Persist p) { persist_ = std::move(p); }

    std::uint64_t append(EntryKind kind, ByteView payload) override {
        std::lock_guard append_lock(append_mu_);
        BoardEntry e;
        {
            std::shared_lock read_lock(mu_);
            e.seq = entries_.size();
            e.prev_hash = entries_.empty() ? Digest{} : entries_.back().entry_hash;
        }
        e.kind = kind;
        e.payload.assign(payload.begin(), payload.end());
        e.entry_hash = BoardEntry::compute_hash(e.seq, e.kind, e.payload, e.prev_hash);
        if (persist_) persist_(e);
        std::unique_lock write_lock(mu_);
        entries_.push_back(std::move(e));
        return entries_.back().seq;
    }

    BoardSlice read(std::uint64_t from, std::uint64_t to) const override {
        std::shared_lock lock(mu_);
        BoardSlice s;
        s.head = static_cast<std::int64_t>(entries_.size()) - 1;
        auto end = std::min<std::uint64_t>(to, entries_.size());
        for (auto i = from; i < end; ++i) s.entries.push_back(entries_[i]);
        return s;
    }

    std::size_t size() const {
        std::shared_lock lock(mu_);
        return entries_.size();
    }
    std::vector<BoardEntry> entries() const {
        std::shared_lock lock(mu_);
        return entries_;
    }

private:
    std::mutex append_mu_;  // orders appends, held across persistence
    mutable std::shared_mutex mu_;
    std::vector<BoardEntry> entries_;
    Persist persist_;
};

/// Payload of a TallyMark: the counted ballot's seq and the candidate it went to.
struct TallyMark {
    std::uint64_t ballot_seq = 0;
    std::string candidate;

    friend bool operator==(const TallyMark&, const TallyMark&) = default;

    Bytes serialize() const {
        ByteWriter w;
        w.u64(ballot_seq).str(candidate);
        return w.take();
    }
    static TallyMark deserialize(ByteView bytes) {
        ByteReader r(bytes);
        TallyMark m;
        m.ballot_seq = r.u64();
        m.candidate = r.str();
        r.expect_end();
        return m;
    }
};

/// Board entries of one kind, in board order.
inline std::vector<const BoardEntry*> entries_of(const std::vector<BoardEntry>& entries, EntryKind kind) {
    std::vector<const BoardEntry*> out;
    for (const auto& e : entries)
        if (e.kind == kind) out.push_back(&e);
    return out;
}

}  // namespace pqevot::protocol
