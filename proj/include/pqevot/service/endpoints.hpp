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

// Frame handlers that put a role object behind a socket, and client stubs
// that implement the same role interfaces by calling one.

#include <cstdint>
#include <vector>

#include "pqevot/protocol/board.hpp"
#include "pqevot/protocol/messages.hpp"
#include "pqevot/protocol/roles.hpp"
#include "pqevot/protocol/tally.hpp"
#include "pqevot/service/tcp.hpp"
#include "pqevot/service/wire.hpp"

namespace pqevot::service {

namespace proto = pqevot::protocol;

// ---------------------------------------------------------------------------
// Bodies that only exist on the wire

inline Bytes encode_receipts(const std::vector<proto::Receipt>& rs) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(rs.size()));
    for (const auto& r : rs) {
        w.raw(r.digest);
        r.signature.serialize(w);
    }
    return w.take();
}

inline std::vector<proto::Receipt> decode_receipts(ByteView bytes) {
    ByteReader r(bytes);
    std::vector<proto::Receipt> out;
    auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        proto::Receipt rc;
        rc.digest = r.array<32>();
        rc.signature = mqs::Signature::deserialize(r);
        out.push_back(std::move(rc));
    }
    r.expect_end();
    return out;
}

inline Bytes encode_outcomes(const std::vector<proto::PublishOutcome>& os) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(os.size()));
    for (const auto& o : os) w.raw(o.digest).i64(o.seq).u8(static_cast<std::uint8_t>(o.error));
    return w.take();
}

inline std::vector<proto::PublishOutcome> decode_outcomes(ByteView bytes) {
    ByteReader r(bytes);
    std::vector<proto::PublishOutcome> out;
    auto n = r.u32();
    for (std::uint32_t i = 0; i < n; ++i) {
        proto::PublishOutcome o;
        o.digest = r.array<32>();
        o.seq = r.i64();
        o.error = proto::VCError(r.u8());
        out.push_back(o);
    }
    r.expect_end();
    return out;
}

inline Bytes encode_u64(std::uint64_t v) {
    ByteWriter w;
    w.u64(v);
    return w.take();
}

inline std::uint64_t decode_u64(ByteView bytes) {
    ByteReader r(bytes);
    auto v = r.u64();
    r.expect_end();
    return v;
}

/// Tag used to append each board entry kind. Kinds with their own protocol
/// message use it; the rest go through the generic append.
inline Tag append_tag(proto::EntryKind k) {
    switch (k) {
        case proto::EntryKind::kTallyMark: return Tag::kTallyMark;
        case proto::EntryKind::kFinalTally: return Tag::kFinalTally;
        case proto::EntryKind::kCCKeyDisclosure: return Tag::kCCKeyDisclosure;
        default: return Tag::kBoardAppend;
    }
}

// ---------------------------------------------------------------------------
// Server side

inline WireEnvelope not_served(Tag t) {
    return error_frame(ErrorDomain::kWire, 2, "tag " + std::to_string(int(t)) + " not served by this role");
}

/// Clock control shared by every role handler; only answered when the node
/// runs on a manual clock.
inline std::optional<WireEnvelope> handle_clock(const WireEnvelope& req, proto::ManualClock* clock) {
    if (req.tag != Tag::kSetClock) return std::nullopt;
    if (!clock) return error_frame(ErrorDomain::kWire, 3, "clock is not settable on this node");
    ByteReader r(req.body);
    auto t = r.i64();
    r.expect_end();
    clock->set(t);
    return make(Tag::kAck);
}

inline Handler board_handler(proto::BulletinBoard& board) {
    return [&board](const WireEnvelope& req) -> WireEnvelope {
        switch (req.tag) {
            case Tag::kBoardAppend: {
                if (req.body.empty()) throw DecodeError("empty append");
                auto kind = req.body[0];
                if (!proto::is_entry_kind(kind)) throw DecodeError("unknown entry kind");
                return make(Tag::kBoardAppended,
                            encode_u64(board.append(proto::EntryKind(kind), ByteView(req.body).subspan(1))));
            }
            case Tag::kTallyMark:
                proto::TallyMark::deserialize(req.body);
                return make(Tag::kBoardAppended, encode_u64(board.append(proto::EntryKind::kTallyMark, req.body)));
            case Tag::kFinalTally:
                proto::TallyResult::deserialize(req.body);
                return make(Tag::kBoardAppended, encode_u64(board.append(proto::EntryKind::kFinalTally, req.body)));
            case Tag::kCCKeyDisclosure:
                mqe::DecryptionKey::deserialize(req.body);
                return make(Tag::kBoardAppended,
                            encode_u64(board.append(proto::EntryKind::kCCKeyDisclosure, req.body)));
            case Tag::kBoardRead: {
                ByteReader r(req.body);
                auto from = r.u64();
                auto to = r.u64();
                r.expect_end();
                return make(Tag::kBoardSlice, board.read(from, to).serialize());
            }
            default: return not_served(req.tag);
        }
    };
}

inline Handler rc_handler(proto::RegCenter& rc, proto::ManualClock* clock) {
    return [&rc, clock](const WireEnvelope& req) -> WireEnvelope {
        if (auto c = handle_clock(req, clock)) return *c;
        if (req.tag != Tag::kRegisterRequest) return not_served(req.tag);
        auto t = rc.register_voter(proto::RegisterRequest::deserialize(req.body));
        if (!t) return error_frame(ErrorDomain::kRegistration, std::uint8_t(t.error()), to_string(t.error()));
        return make(Tag::kTicketIssued, t->serialize());
    };
}

inline Handler po_handler(proto::PollOfficer& po, proto::ManualClock* clock) {
    return [&po, clock](const WireEnvelope& req) -> WireEnvelope {
        if (auto c = handle_clock(req, clock)) return *c;
        auto vote_err = [](proto::VoteError e) {
            return error_frame(ErrorDomain::kVoting, std::uint8_t(e), to_string(e));
        };
        switch (req.tag) {
            case Tag::kTicketSubmission: {
                auto s = po.present_ticket(mqe::Ciphertext::deserialize(req.body));
                return s ? make(Tag::kSessionOpened, encode_u64(*s)) : vote_err(s.error());
            }
            case Tag::kCommitmentSubmission: {
                auto b = po.sign_commitment(proto::CommitmentSubmission::deserialize(req.body));
                return b ? make(Tag::kObliviousBundle, b->serialize()) : vote_err(b.error());
            }
            case Tag::kBallotSubmission: {
                auto r = po.submit_ballot(proto::BallotSubmission::deserialize(req.body));
                return r ? make(Tag::kPollReceipt, r->serialize()) : vote_err(r.error());
            }
            case Tag::kForwardBatch:
                if (!req.body.empty()) throw DecodeError("forward batch takes no body");
                return make(Tag::kReceiptList, encode_receipts(po.forward_batch()));
            default: return not_served(req.tag);
        }
    };
}

inline Handler vc_handler(proto::VotCenter& vc, proto::ManualClock* clock) {
    return [&vc, clock](const WireEnvelope& req) -> WireEnvelope {
        if (auto c = handle_clock(req, clock)) return *c;
        switch (req.tag) {
            case Tag::kForwardBallot: {
                auto r = vc.receive_ballot(mqe::Ciphertext::deserialize(req.body));
                if (!r) return error_frame(ErrorDomain::kVotCenter, std::uint8_t(r.error()), to_string(r.error()));
                return make(Tag::kCenterReceipt, r->serialize());
            }
            case Tag::kPublishPending:
                if (!req.body.empty()) throw DecodeError("publish takes no body");
                return make(Tag::kPublishOutcomes, encode_outcomes(vc.publish_pending()));
            default: return not_served(req.tag);
        }
    };
}

inline Handler cc_handler(proto::CountCenter& cc, proto::ManualClock* clock) {
    return [&cc, clock](const WireEnvelope& req) -> WireEnvelope {
        if (auto c = handle_clock(req, clock)) return *c;
        if (req.tag != Tag::kRunTally) return not_served(req.tag);
        if (!req.body.empty()) throw DecodeError("run tally takes no body");
        auto r = cc.run_tally();
        if (!r) return error_frame(ErrorDomain::kTally, std::uint8_t(r.error()), to_string(r.error()));
        return make(Tag::kFinalTally, r->serialize());
    };
}

// ---------------------------------------------------------------------------
// Client side

namespace detail {

/// Call and return the body when the reply carries the expected tag. Errors
/// from the given domain are handed back as the code; anything else throws.
inline Expected<Bytes, std::uint8_t> call_expect(TcpClient& c, const WireEnvelope& req, Tag want,
                                                 std::optional<ErrorDomain> domain = std::nullopt) {
    auto reply = c.call(req);
    if (reply.tag == want) return std::move(reply.body);
    if (reply.tag == Tag::kError) {
        auto err = ErrorBody::deserialize(reply.body);
        if (domain && err.domain == *domain) return unexpected(err.code);
        throw RemoteError(std::move(err));
    }
    throw WireError("unexpected reply tag " + std::to_string(int(reply.tag)));
}

}  // namespace detail

inline void set_remote_clock(TcpClient& c, std::int64_t t) {
    ByteWriter w;
    w.i64(t);
    detail::call_expect(c, make(Tag::kSetClock, w.take()), Tag::kAck);
}

class RemoteBoard final : public proto::BoardAccess {
public:
    explicit RemoteBoard(Address a) : client_(std::move(a)) {}

    std::uint64_t append(proto::EntryKind kind, ByteView payload) override {
        auto tag = append_tag(kind);
        Bytes body;
        if (tag == Tag::kBoardAppend) body.push_back(static_cast<std::uint8_t>(kind));
        body.insert(body.end(), payload.begin(), payload.end());
        return decode_u64(*detail::call_expect(client_, make(tag, std::move(body)), Tag::kBoardAppended));
    }

    proto::BoardSlice read(std::uint64_t from, std::uint64_t to) const override {
        ByteWriter w;
        w.u64(from).u64(to);
        return proto::BoardSlice::deserialize(
            *detail::call_expect(client_, make(Tag::kBoardRead, w.take()), Tag::kBoardSlice));
    }

    TcpClient& client() { return client_; }

private:
    mutable TcpClient client_;
};

class RemoteRegCenter final : public proto::RegistrationEndpoint {
public:
    explicit RemoteRegCenter(Address a) : client_(std::move(a)) {}

    Expected<proto::Ticket, proto::RegError> register_voter(const proto::RegisterRequest& req) override {
        auto r = detail::call_expect(client_, make(Tag::kRegisterRequest, req.serialize()), Tag::kTicketIssued,
                                     ErrorDomain::kRegistration);
        if (!r) return unexpected(proto::RegError(r.error()));
        return proto::Ticket::deserialize(*r);
    }

    TcpClient& client() { return client_; }

private:
    TcpClient client_;
};

class RemotePollOfficer final : public proto::PollingEndpoint, public proto::CollectionControl {
public:
    explicit RemotePollOfficer(Address a) : client_(std::move(a)) {}

    Expected<std::uint64_t, proto::VoteError> present_ticket(const mqe::Ciphertext& et) override {
        auto r = detail::call_expect(client_, make(Tag::kTicketSubmission, et.serialize()), Tag::kSessionOpened,
                                     ErrorDomain::kVoting);
        if (!r) return unexpected(proto::VoteError(r.error()));
        return decode_u64(*r);
    }

    Expected<proto::ObliviousBundle, proto::VoteError> sign_commitment(
        const proto::CommitmentSubmission& sub) override {
        auto r = detail::call_expect(client_, make(Tag::kCommitmentSubmission, sub.serialize()),
                                     Tag::kObliviousBundle, ErrorDomain::kVoting);
        if (!r) return unexpected(proto::VoteError(r.error()));
        return proto::ObliviousBundle::deserialize(*r);
    }

    Expected<mqs::Signature, proto::VoteError> submit_ballot(const proto::BallotSubmission& sub) override {
        auto r = detail::call_expect(client_, make(Tag::kBallotSubmission, sub.serialize()), Tag::kPollReceipt,
                                     ErrorDomain::kVoting);
        if (!r) return unexpected(proto::VoteError(r.error()));
        return mqs::Signature::deserialize(*r);
    }

    std::vector<proto::Receipt> forward_batch() override {
        return decode_receipts(*detail::call_expect(client_, make(Tag::kForwardBatch), Tag::kReceiptList));
    }

    TcpClient& client() { return client_; }

private:
    TcpClient client_;
};

class RemoteVotCenter final : public proto::BallotSink, public proto::PublicationControl {
public:
    explicit RemoteVotCenter(Address a) : client_(std::move(a)) {}

    Expected<mqs::Signature, proto::VCError> receive_ballot(const mqe::Ciphertext& ev) override {
        auto r = detail::call_expect(client_, make(Tag::kForwardBallot, ev.serialize()), Tag::kCenterReceipt,
                                     ErrorDomain::kVotCenter);
        if (!r) return unexpected(proto::VCError(r.error()));
        return mqs::Signature::deserialize(*r);
    }

    std::vector<proto::PublishOutcome> publish_pending() override {
        return decode_outcomes(*detail::call_expect(client_, make(Tag::kPublishPending), Tag::kPublishOutcomes));
    }

    TcpClient& client() { return client_; }

private:
    TcpClient client_;
};

class RemoteCountCenter final : public proto::TallyControl {
public:
    explicit RemoteCountCenter(Address a) : client_(std::move(a)) {}

    Expected<proto::TallyResult, proto::TallyError> run_tally() override {
        auto r = detail::call_expect(client_, make(Tag::kRunTally), Tag::kFinalTally, ErrorDomain::kTally);
        if (!r) return unexpected(proto::TallyError(r.error()));
        return proto::TallyResult::deserialize(*r);
    }

    TcpClient& client() { return client_; }

private:
    TcpClient client_;
};

}  // namespace pqevot::service
