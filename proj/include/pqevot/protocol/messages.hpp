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

// Protocol messages and their canonical encodings. Every message travels in an
// envelope: 1-byte tag, 4-byte BE payload length, payload.

#include <cstdint>
#include <string>
#include <vector>

#include "pqevot/bytes.hpp"
#include "pqevot/commit.hpp"
#include "pqevot/gf256.hpp"
#include "pqevot/hash.hpp"
#include "pqevot/mqe.hpp"
#include "pqevot/mqs.hpp"

namespace pqevot::protocol {

/// Frozen tag table; see docs/protocol.md.
enum class MessageTag : std::uint8_t {
    kRegisterRequest = 0x01,
    kTicketIssued = 0x02,
    kTicketSubmission = 0x03,
    kCommitmentSubmission = 0x04,
    kObliviousBundle = 0x05,
    kBallotSubmission = 0x06,
    kPollReceipt = 0x07,
    kForwardBallot = 0x08,
    kCenterReceipt = 0x09,
    kTallyMark = 0x0A,
    kFinalTally = 0x0B,
    kCCKeyDisclosure = 0x0C,
};

inline bool is_protocol_tag(std::uint8_t t) { return t >= 0x01 && t <= 0x0C; }

struct Envelope {
    std::uint8_t tag = 0;
    Bytes payload;

    Bytes encode() const {
        ByteWriter w;
        w.u8(tag).bytes(payload);
        return w.take();
    }

    static Envelope decode(ByteView bytes) {
        ByteReader r(bytes);
        Envelope e;
        e.tag = r.u8();
        e.payload = r.bytes();
        r.expect_end();
        return e;
    }
};

inline Envelope wrap(MessageTag tag, Bytes payload) { return {static_cast<std::uint8_t>(tag), std::move(payload)}; }

/// The voter's anonymous credential: pseudonym plus the Reg-Center's signature on it.
struct Ticket {
    gf::Vector pseudonym;
    mqs::Signature signature;

    friend bool operator==(const Ticket&, const Ticket&) = default;

    void serialize(ByteWriter& w) const {
        pseudonym.serialize(w);
        signature.serialize(w);
    }
    Bytes serialize() const {
        ByteWriter w;
        serialize(w);
        return w.take();
    }
    static Ticket deserialize(ByteReader& r) {
        Ticket t;
        t.pseudonym = gf::Vector::deserialize(r);
        t.signature = mqs::Signature::deserialize(r);
        return t;
    }
    static Ticket deserialize(ByteView bytes) {
        ByteReader r(bytes);
        auto t = deserialize(r);
        r.expect_end();
        return t;
    }

    bool verifies(const mq::QuadraticSystem& rc_sig_key) const {
        return mqs::verify(pseudonym.serialize(), signature, rc_sig_key);
    }
};

struct RegisterRequest {
    std::string id;
    gf::Vector pseudonym;

    Bytes serialize() const {
        ByteWriter w;
        w.str(id);
        pseudonym.serialize(w);
        return w.take();
    }
    static RegisterRequest deserialize(ByteView bytes) {
        ByteReader r(bytes);
        RegisterRequest m;
        m.id = r.str();
        m.pseudonym = gf::Vector::deserialize(r);
        r.expect_end();
        return m;
    }
};

/// Plaintext of ET_u: Ticket || tm_u.
struct TicketPresentation {
    Ticket ticket;
    std::int64_t timestamp = 0;

    Bytes serialize() const {
        ByteWriter w;
        ticket.serialize(w);
        w.i64(timestamp);
        return w.take();
    }
    static TicketPresentation deserialize(ByteView bytes) {
        ByteReader r(bytes);
        TicketPresentation p;
        p.ticket = Ticket::deserialize(r);
        p.timestamp = r.i64();
        r.expect_end();
        return p;
    }
};

struct CommitmentSubmission {
    std::uint64_t session = 0;
    commit::Commitment commitment;

    Bytes serialize() const {
        ByteWriter w;
        w.u64(session).raw(commitment.c);
        return w.take();
    }
    static CommitmentSubmission deserialize(ByteView bytes) {
        ByteReader r(bytes);
        CommitmentSubmission m;
        m.session = r.u64();
        m.commitment.c = r.array<32>();
        r.expect_end();
        return m;
    }
};

/// sigma~ = (sigma_1 .. sigma_L), one PO signature per candidate over CAN_i || c.
struct ObliviousBundle {
    std::vector<mqs::Signature> signatures;

    Bytes serialize() const {
        ByteWriter w;
        w.u32(static_cast<std::uint32_t>(signatures.size()));
        for (const auto& s : signatures) s.serialize(w);
        return w.take();
    }
    static ObliviousBundle deserialize(ByteView bytes) {
        ByteReader r(bytes);
        ObliviousBundle b;
        auto n = r.u32();
        if (n > 4096) throw DecodeError("bundle too large");
        for (std::uint32_t i = 0; i < n; ++i) b.signatures.push_back(mqs::Signature::deserialize(r));
        r.expect_end();
        return b;
    }
};

struct BallotSubmission {
    std::uint64_t session = 0;
    mqe::Ciphertext encrypted_vote;  // EV_u

    Bytes serialize() const {
        ByteWriter w;
        w.u64(session);
        encrypted_vote.serialize(w);
        return w.take();
    }
    static BallotSubmission deserialize(ByteView bytes) {
        ByteReader r(bytes);
        BallotSubmission m;
        m.session = r.u64();
        m.encrypted_vote = mqe::Ciphertext::deserialize(r);
        r.expect_end();
        return m;
    }
};

/// The message PO signs for candidate i: CAN_i || c.
inline Bytes candidate_message(std::string_view candidate, const commit::Commitment& c) {
    ByteWriter w;
    w.str(candidate).raw(c.c);
    return w.take();
}

/// Sigma = (sigma_j, c, r): the vote the voter keeps after oblivious signing.
struct Vote {
    mqs::Signature signature;
    commit::Commitment commitment;
    commit::Opening opening;

    void serialize(ByteWriter& w) const {
        signature.serialize(w);
        w.raw(commitment.c).raw(opening.r);
    }
    Bytes serialize() const {
        ByteWriter w;
        serialize(w);
        return w.take();
    }
    static Vote deserialize(ByteReader& r) {
        Vote v;
        v.signature = mqs::Signature::deserialize(r);
        v.commitment.c = r.array<32>();
        v.opening.r = r.array<32>();
        return v;
    }
};

/// Plaintext of B_j^u: Sigma || CAN_j.
struct BallotContent {
    Vote vote;
    std::string candidate;

    Bytes serialize() const {
        ByteWriter w;
        vote.serialize(w);
        w.str(candidate);
        return w.take();
    }
    static BallotContent deserialize(ByteView bytes) {
        ByteReader r(bytes);
        BallotContent b;
        b.vote = Vote::deserialize(r);
        b.candidate = r.str();
        r.expect_end();
        return b;
    }
};

/// Plaintext of EV_u: Ticket || B_j^u.
struct CastBallot {
    Ticket ticket;
    mqe::Ciphertext ballot;

    Bytes serialize() const {
        ByteWriter w;
        ticket.serialize(w);
        ballot.serialize(w);
        return w.take();
    }
    static CastBallot deserialize(ByteView bytes) {
        ByteReader r(bytes);
        CastBallot c;
        c.ticket = Ticket::deserialize(r);
        c.ballot = mqe::Ciphertext::deserialize(r);
        r.expect_end();
        return c;
    }
};

/// H(EV_u): what receipts sign and what idempotent handling keys on.
inline Digest ballot_digest(const mqe::Ciphertext& ev) { return sha3_256("cast-ballot-v1", ev.serialize()); }

inline bool receipt_verifies(const mqe::Ciphertext& ev, const mqs::Signature& receipt,
                             const mq::QuadraticSystem& signer_key) {
    return mqs::verify(ballot_digest(ev), receipt, signer_key);
}

}  // namespace pqevot::protocol
