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

// The five role state machines. Authorities talk to each other and to voters
// only through the endpoint interfaces below, so the same objects can sit
// behind a socket or be called directly.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "pqevot/bytes.hpp"
#include "pqevot/commit.hpp"
#include "pqevot/drbg.hpp"
#include "pqevot/expected.hpp"
#include "pqevot/mqe.hpp"
#include "pqevot/mqs.hpp"
#include "pqevot/protocol/board.hpp"
#include "pqevot/protocol/messages.hpp"
#include "pqevot/protocol/meter.hpp"
#include "pqevot/protocol/params.hpp"
#include "pqevot/protocol/tally.hpp"

namespace pqevot::protocol {

using Clock = std::function<std::int64_t()>;

inline Clock system_clock() {
    return [] {
        return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
            .count();
    };
}

/// Settable clock for scripted runs.
class ManualClock {
public:
    explicit ManualClock(std::int64_t t = 0) : t_(t) {}
    std::int64_t now() const { return t_.load(); }
    void set(std::int64_t t) { t_.store(t); }
    Clock clock() {
        return [this] { return now(); };
    }

private:
    std::atomic<std::int64_t> t_;
};

/// Accepted distance between a voter's timestamp and the Poll-Officer's clock.
inline constexpr std::int64_t kFreshnessWindow = 120;

/// Receives one record per state transition, before the transition is visible.
/// A role rebuilt by replaying the same records reaches the same state.
using Journal = std::function<void(ByteView)>;

enum class RegError : std::uint8_t {
    kWindowClosed = 1,
    kNotEligible = 2,
    kAlreadyRegistered = 3,
    kDuplicatePseudonym = 4,
    kMalformed = 5,
};

enum class VoteError : std::uint8_t {
    kWindowClosed = 1,
    kStaleTime = 2,
    kBadTicket = 3,
    kTicketReused = 4,
    kBadObliviousBundle = 5,
    kUnknownSession = 6,
    kMalformed = 7,
    kNoTicket = 8,
};

enum class VCError : std::uint8_t {
    kBadTicket = 1,
    kDuplicate = 2,
    kDecryptFailed = 3,
    kTallyStarted = 4,
    kMalformed = 5,
};

enum class TallyError : std::uint8_t { kTooEarly = 1 };

inline const char* to_string(RegError e) {
    static constexpr const char* names[] = {"?", "WindowClosed", "NotEligible", "AlreadyRegistered",
                                            "DuplicatePseudonym", "Malformed"};
    auto i = static_cast<std::size_t>(e);
    return i < 6 ? names[i] : "?";
}

inline const char* to_string(VoteError e) {
    static constexpr const char* names[] = {"?",          "WindowClosed",       "StaleTime",
                                            "BadTicket",  "TicketReused",       "BadObliviousBundle",
                                            "UnknownSession", "Malformed",      "NoTicket"};
    auto i = static_cast<std::size_t>(e);
    return i < 9 ? names[i] : "?";
}

inline const char* to_string(VCError e) {
    static constexpr const char* names[] = {"?", "BadTicket", "Duplicate", "DecryptFailed", "TallyStarted",
                                            "Malformed"};
    auto i = static_cast<std::size_t>(e);
    return i < 6 ? names[i] : "?";
}

inline const char* to_string(TallyError) { return "TooEarly"; }

// ---------------------------------------------------------------------------
// Endpoint interfaces

class RegistrationEndpoint {
public:
    virtual ~RegistrationEndpoint() = default;
    virtual Expected<Ticket, RegError> register_voter(const RegisterRequest& req) = 0;
};

class PollingEndpoint {
public:
    virtual ~PollingEndpoint() = default;
    /// ET_u in, voting session id out.
    virtual Expected<std::uint64_t, VoteError> present_ticket(const mqe::Ciphertext& et) = 0;
    virtual Expected<ObliviousBundle, VoteError> sign_commitment(const CommitmentSubmission& sub) = 0;
    /// EV_u in, PO receipt out.
    virtual Expected<mqs::Signature, VoteError> submit_ballot(const BallotSubmission& sub) = 0;
};

/// Where the Poll-Officer delivers collected ballots.
class BallotSink {
public:
    virtual ~BallotSink() = default;
    virtual Expected<mqs::Signature, VCError> receive_ballot(const mqe::Ciphertext& ev) = 0;
};

struct Receipt {
    Digest digest{};
    mqs::Signature signature;
    friend bool operator==(const Receipt&, const Receipt&) = default;
};

struct PublishOutcome {
    Digest digest{};
    std::int64_t seq = -1;
    VCError error = VCError::kMalformed;

    bool ok() const { return seq >= 0; }
    friend bool operator==(const PublishOutcome&, const PublishOutcome&) = default;
};

/// Phase triggers the runner (or an operator) fires at the authorities.
class CollectionControl {
public:
    virtual ~CollectionControl() = default;
    virtual std::vector<Receipt> forward_batch() = 0;
};

class PublicationControl {
public:
    virtual ~PublicationControl() = default;
    virtual std::vector<PublishOutcome> publish_pending() = 0;
};

class TallyControl {
public:
    virtual ~TallyControl() = default;
    virtual Expected<TallyResult, TallyError> run_tally() = 0;
};

namespace detail {

inline std::string key_of(const gf::Vector& v) { return pqevot::to_string(v.raw_bytes()); }

inline std::string key_of(const Digest& d) { return pqevot::to_string(d); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Reg-Center

class RegCenter final : public RegistrationEndpoint {
public:
    RegCenter(PublicParams pp, mqs::SigningKey sk, std::vector<std::string> roll, BoardAccess& board, Drbg rng,
              Clock clock, Meter* meter = nullptr)
        : pp_(std::move(pp)),
          sk_(std::move(sk)),
          roll_(roll.begin(), roll.end()),
          board_(board),
          rng_(std::move(rng)),
          clock_(std::move(clock)),
          meter_(meter) {}

    void set_journal(Journal j) { journal_ = std::move(j); }

    Expected<Ticket, RegError> register_voter(const RegisterRequest& req) override {
        std::lock_guard lock(mu_);
        if (!pp_.manifest.registration.contains(clock_())) return unexpected(RegError::kWindowClosed);
        if (req.pseudonym.size() != pp_.pseudonym.outputs) return unexpected(RegError::kMalformed);
        if (!roll_.contains(req.id)) return unexpected(RegError::kNotEligible);
        if (issued_.contains(req.id)) return unexpected(RegError::kAlreadyRegistered);
        if (pseudonyms_.contains(detail::key_of(req.pseudonym))) return unexpected(RegError::kDuplicatePseudonym);

        Ticket ticket{req.pseudonym, mqs::sign(sk_, req.pseudonym.serialize(), rng_)};
        tick(meter_, Phase::kRegistration, Op::kSign);
        ByteWriter rec;
        rec.str(req.id);
        ticket.serialize(rec);
        if (journal_) journal_(rec.take());
        board_.append(EntryKind::kPseudonym, req.pseudonym.serialize());
        remember(req.id, ticket);
        return ticket;
    }

    void replay(ByteView record) {
        ByteReader r(record);
        auto id = r.str();
        auto ticket = Ticket::deserialize(r);
        r.expect_end();
        std::lock_guard lock(mu_);
        remember(id, ticket);
    }

    bool is_registered(const std::string& id) const {
        std::lock_guard lock(mu_);
        return issued_.contains(id);
    }
    std::size_t registered_count() const {
        std::lock_guard lock(mu_);
        return issued_.size();
    }

private:
    void remember(const std::string& id, const Ticket& t) {
        issued_.emplace(id, t);
        pseudonyms_.insert(detail::key_of(t.pseudonym));
    }

    PublicParams pp_;
    mqs::SigningKey sk_;
    std::set<std::string> roll_;
    BoardAccess& board_;
    Drbg rng_;
    Clock clock_;
    Meter* meter_;
    Journal journal_;
    mutable std::mutex mu_;
    std::map<std::string, Ticket> issued_;
    std::unordered_set<std::string> pseudonyms_;
};

// ---------------------------------------------------------------------------
// Voter

enum class BoardCheck { kFound, kMissing };

inline const char* to_string(BoardCheck c) { return c == BoardCheck::kFound ? "Found" : "Missing"; }

/// What the voter keeps after a successful round.
struct CastRecord {
    std::size_t candidate = 0;
    Vote vote;
    mqe::Ciphertext ballot;          // B_j^u
    mqe::Ciphertext encrypted_vote;  // EV_u
    mqs::Signature receipt;          // PO's receipt over H(EV_u)
};

class Voter {
public:
    Voter(const PublicParams& pp, std::string id, Drbg rng, Meter* meter = nullptr)
        : pp_(pp), id_(std::move(id)), rng_(std::move(rng)), meter_(meter) {}

    const std::string& id() const { return id_; }

    /// v_p = P(encode(ID) || a) with fresh a.
    const gf::Vector& make_pseudonym() {
        a_ = gf::Vector::random(pp_.pseudonym.rand_elems, rng_);
        auto input = encode_identity(id_, pp_.pseudonym.id_elems) | *a_;
        pseudonym_ = pp_.pseudonym_system.eval(input);
        tick(meter_, Phase::kRegistration, Op::kEval);
        return *pseudonym_;
    }

    Expected<Ticket, RegError> register_with(RegistrationEndpoint& rc) {
        make_pseudonym();
        auto t = rc.register_voter({id_, *pseudonym_});
        if (t) ticket_ = *t;
        return t;
    }

    void set_ticket(Ticket t) { ticket_ = std::move(t); }
    const std::optional<Ticket>& ticket() const { return ticket_; }
    const std::optional<gf::Vector>& pseudonym() const { return pseudonym_; }
    const std::optional<gf::Vector>& randomness() const { return a_; }
    const std::optional<CastRecord>& cast() const { return cast_; }

    Expected<CastRecord, VoteError> vote(PollingEndpoint& po, std::size_t candidate, std::int64_t now) {
        if (!ticket_) return unexpected(VoteError::kNoTicket);
        if (candidate >= pp_.candidate_count()) return unexpected(VoteError::kMalformed);
        const auto& can_j = pp_.manifest.candidates[candidate];

        auto et = mqe::encrypt(pp_.enc_key(Role::kPollOfficer), TicketPresentation{*ticket_, now}.serialize(), rng_);
        tick(meter_, Phase::kVoting, Op::kEnc);
        auto session = po.present_ticket(et);
        if (!session) return unexpected(session.error());

        auto [c, r] = commit::comm(as_bytes(can_j), rng_);
        auto bundle = po.sign_commitment({*session, c});
        if (!bundle) return unexpected(bundle.error());
        if (bundle->signatures.size() != pp_.candidate_count()) return unexpected(VoteError::kBadObliviousBundle);
        bool all_ok = true;
        for (std::size_t i = 0; i < bundle->signatures.size(); ++i) {
            all_ok &= mqs::verify(candidate_message(pp_.manifest.candidates[i], c), bundle->signatures[i],
                                  pp_.sig_key(Role::kPollOfficer));
            tick(meter_, Phase::kVoting, Op::kVer);
        }
        if (!all_ok) return unexpected(VoteError::kBadObliviousBundle);

        CastRecord rec;
        rec.candidate = candidate;
        rec.vote = {bundle->signatures[candidate], c, r};
        rec.ballot = mqe::encrypt(pp_.enc_key(Role::kCountCenter), BallotContent{rec.vote, can_j}.serialize(), rng_);
        tick(meter_, Phase::kVoting, Op::kEnc);
        rec.encrypted_vote =
            mqe::encrypt(pp_.enc_key(Role::kVotCenter), CastBallot{*ticket_, rec.ballot}.serialize(), rng_);
        tick(meter_, Phase::kVoting, Op::kEnc);
        auto receipt = po.submit_ballot({*session, rec.encrypted_vote});
        if (!receipt) return unexpected(receipt.error());
        rec.receipt = *receipt;
        cast_ = rec;
        return rec;
    }

    /// Found iff some Ballot entry carries B_j^u byte for byte.
    BoardCheck check_board(const BoardAccess& board) const {
        if (!cast_) return BoardCheck::kMissing;
        auto mine = cast_->ballot.serialize();
        for (const auto& e : board.read_all().entries)
            if (e.kind == EntryKind::kBallot && e.payload == mine) return BoardCheck::kFound;
        return BoardCheck::kMissing;
    }

private:
    const PublicParams& pp_;
    std::string id_;
    Drbg rng_;
    Meter* meter_;
    std::optional<gf::Vector> a_;
    std::optional<gf::Vector> pseudonym_;
    std::optional<Ticket> ticket_;
    std::optional<CastRecord> cast_;
};

// ---------------------------------------------------------------------------
// Poll-Officer

class PollOfficer final : public PollingEndpoint, public CollectionControl {
public:
    PollOfficer(PublicParams pp, RoleSecrets secrets, Drbg rng, Clock clock, Meter* meter = nullptr)
        : pp_(std::move(pp)),
          secrets_(std::move(secrets)),
          rng_(std::move(rng)),
          clock_(std::move(clock)),
          meter_(meter) {}

    void set_journal(Journal j) { journal_ = std::move(j); }
    void connect(BallotSink* vc) { vc_ = vc; }

    Expected<std::uint64_t, VoteError> present_ticket(const mqe::Ciphertext& et) override {
        std::lock_guard lock(mu_);
        auto now = clock_();
        if (!pp_.manifest.voting.contains(now)) return unexpected(VoteError::kWindowClosed);
        auto plain = mqe::decrypt(secrets_.enc, et);
        tick(meter_, Phase::kVoting, Op::kDec);
        if (!plain) return unexpected(VoteError::kMalformed);
        TicketPresentation pres;
        try {
            pres = TicketPresentation::deserialize(*plain);
        } catch (const DecodeError&) {
            return unexpected(VoteError::kMalformed);
        }
        if (pres.timestamp > now + kFreshnessWindow || pres.timestamp < now - kFreshnessWindow)
            return unexpected(VoteError::kStaleTime);
        bool valid = pres.ticket.verifies(pp_.sig_key(Role::kRegCenter));
        tick(meter_, Phase::kVoting, Op::kVer);
        if (!valid) return unexpected(VoteError::kBadTicket);
        auto key = detail::key_of(pres.ticket.pseudonym);
        if (used_.contains(key)) return unexpected(VoteError::kTicketReused);

        ByteWriter rec;
        rec.u8(kRecUsed);
        pres.ticket.pseudonym.serialize(rec);
        if (journal_) journal_(rec.take());
        used_.insert(key);
        used_order_.push_back(pres.ticket.pseudonym);
        auto id = next_session_++;
        sessions_[id] = Stage::kTicketAccepted;
        return id;
    }

    Expected<ObliviousBundle, VoteError> sign_commitment(const CommitmentSubmission& sub) override {
        std::lock_guard lock(mu_);
        auto it = sessions_.find(sub.session);
        if (it == sessions_.end() || it->second != Stage::kTicketAccepted)
            return unexpected(VoteError::kUnknownSession);
        ObliviousBundle bundle;
        for (const auto& can : pp_.manifest.candidates) {
            bundle.signatures.push_back(mqs::sign(secrets_.sig, candidate_message(can, sub.commitment), rng_));
            tick(meter_, Phase::kVoting, Op::kSign);
        }
        it->second = Stage::kBundleIssued;
        return bundle;
    }

    Expected<mqs::Signature, VoteError> submit_ballot(const BallotSubmission& sub) override {
        std::lock_guard lock(mu_);
        auto it = sessions_.find(sub.session);
        if (it == sessions_.end() || it->second != Stage::kBundleIssued) return unexpected(VoteError::kUnknownSession);
        auto receipt = mqs::sign(secrets_.sig, ballot_digest(sub.encrypted_vote), rng_);
        tick(meter_, Phase::kVoting, Op::kSign);
        ByteWriter rec;
        rec.u8(kRecPending);
        sub.encrypted_vote.serialize(rec);
        if (journal_) journal_(rec.take());
        sessions_.erase(it);
        pending_.push_back(sub.encrypted_vote);
        return receipt;
    }

    /// Hand every ballot without a Vot-Center receipt to the connected sink.
    /// Safe to repeat: the sink answers a resent ballot with the same receipt.
    std::vector<Receipt> forward_batch() override {
        std::vector<mqe::Ciphertext> todo;
        {
            std::lock_guard lock(mu_);
            if (!vc_) throw std::logic_error("poll officer: no vot-center connected");
            for (const auto& ev : pending_)
                if (!vc_receipts_.contains(detail::key_of(ballot_digest(ev)))) todo.push_back(ev);
        }
        std::vector<Receipt> out;
        for (const auto& ev : todo) {
            auto r = vc_->receive_ballot(ev);
            if (!r) continue;
            auto digest = ballot_digest(ev);
            bool ok = receipt_verifies(ev, *r, pp_.sig_key(Role::kVotCenter));
            tick(meter_, Phase::kCollection, Op::kVer);
            if (!ok) continue;
            std::lock_guard lock(mu_);
            ByteWriter rec;
            rec.u8(kRecVcReceipt).raw(digest);
            r->serialize(rec);
            if (journal_) journal_(rec.take());
            vc_receipts_[detail::key_of(digest)] = *r;
            out.push_back({digest, *r});
        }
        return out;
    }

    void replay(ByteView record) {
        ByteReader r(record);
        std::lock_guard lock(mu_);
        switch (r.u8()) {
            case kRecUsed: {
                auto v = gf::Vector::deserialize(r);
                used_.insert(detail::key_of(v));
                used_order_.push_back(std::move(v));
                break;
            }
            case kRecPending: pending_.push_back(mqe::Ciphertext::deserialize(r)); break;
            case kRecVcReceipt: {
                auto d = r.array<32>();
                vc_receipts_[detail::key_of(d)] = mqs::Signature::deserialize(r);
                break;
            }
            default: throw DecodeError("poll officer: unknown journal record");
        }
        r.expect_end();
    }

    bool is_used(const gf::Vector& pseudonym) const {
        std::lock_guard lock(mu_);
        return used_.contains(detail::key_of(pseudonym));
    }
    std::size_t pending_count() const {
        std::lock_guard lock(mu_);
        return pending_.size();
    }

    /// Everything this authority holds besides its keys: used pseudonyms,
    /// collected ballots, Vot-Center receipts.
    Bytes state_dump() const {
        std::lock_guard lock(mu_);
        ByteWriter w;
        for (const auto& v : used_order_) v.serialize(w);
        for (const auto& ev : pending_) ev.serialize(w);
        for (const auto& [d, sig] : vc_receipts_) {
            w.bytes(as_bytes(d));
            sig.serialize(w);
        }
        return w.take();
    }

private:
    enum class Stage { kTicketAccepted, kBundleIssued };
    static constexpr std::uint8_t kRecUsed = 1, kRecPending = 2, kRecVcReceipt = 3;

    PublicParams pp_;
    RoleSecrets secrets_;
    Drbg rng_;
    Clock clock_;
    Meter* meter_;
    Journal journal_;
    BallotSink* vc_ = nullptr;
    mutable std::mutex mu_;
    std::unordered_set<std::string> used_;
    std::vector<gf::Vector> used_order_;
    std::map<std::uint64_t, Stage> sessions_;
    std::uint64_t next_session_ = 1;
    std::vector<mqe::Ciphertext> pending_;
    std::map<std::string, mqs::Signature> vc_receipts_;
};

// ---------------------------------------------------------------------------
// Vot-Center

class VotCenter final : public BallotSink, public PublicationControl {
public:
    /// Dishonest behaviour for adversarial scenarios: ballots whose digest is
    /// listed here are acknowledged but never published.
    struct Misbehavior {
        std::set<Digest> withhold;
    };

    VotCenter(PublicParams pp, RoleSecrets secrets, BoardAccess& board, Drbg rng, Clock clock,
              Meter* meter = nullptr)
        : pp_(std::move(pp)),
          secrets_(std::move(secrets)),
          board_(board),
          rng_(std::move(rng)),
          clock_(std::move(clock)),
          meter_(meter) {}

    void set_journal(Journal j) { journal_ = std::move(j); }
    void set_misbehavior(Misbehavior m) {
        std::lock_guard lock(mu_);
        misbehavior_ = std::move(m);
    }

    Expected<mqs::Signature, VCError> receive_ballot(const mqe::Ciphertext& ev) override {
        std::lock_guard lock(mu_);
        auto digest = ballot_digest(ev);
        auto key = detail::key_of(digest);
        if (auto it = receipts_.find(key); it != receipts_.end()) return it->second;
        if (clock_() >= pp_.manifest.tally_start) return unexpected(VCError::kTallyStarted);
        auto receipt = mqs::sign(secrets_.sig, digest, rng_);
        tick(meter_, Phase::kCollection, Op::kSign);
        ByteWriter rec;
        rec.u8(kRecReceived);
        ev.serialize(rec);
        receipt.serialize(rec);
        if (journal_) journal_(rec.take());
        receipts_[key] = receipt;
        received_.push_back(ev);
        return receipt;
    }

    /// Verify one EV_u and put its inner ballot on the board. Repeating a
    /// ballot that was already published returns the original seq.
    Expected<std::uint64_t, VCError> verify_and_publish(const mqe::Ciphertext& ev) {
        std::lock_guard lock(mu_);
        return verify_and_publish_locked(ev);
    }

    std::vector<PublishOutcome> publish_pending() override {
        std::lock_guard lock(mu_);
        std::vector<PublishOutcome> out;
        for (; next_unpublished_ < received_.size(); ++next_unpublished_) {
            const auto& ev = received_[next_unpublished_];
            auto digest = ballot_digest(ev);
            if (!misbehavior_.withhold.contains(digest)) {
                auto r = verify_and_publish_locked(ev);
                PublishOutcome o{digest};
                if (r)
                    o.seq = static_cast<std::int64_t>(*r);
                else
                    o.error = r.error();
                out.push_back(o);
            }
            ByteWriter cursor;
            cursor.u8(kRecCursor).u64(next_unpublished_ + 1);
            if (journal_) journal_(cursor.take());
        }
        return out;
    }

    void replay(ByteView record) {
        ByteReader r(record);
        std::lock_guard lock(mu_);
        switch (r.u8()) {
            case kRecReceived: {
                auto ev = mqe::Ciphertext::deserialize(r);
                receipts_[detail::key_of(ballot_digest(ev))] = mqs::Signature::deserialize(r);
                received_.push_back(std::move(ev));
                break;
            }
            case kRecPublished: {
                auto digest = r.array<32>();
                auto seq = r.u64();
                auto pair = CastBallot::deserialize(r.bytes());
                published_[detail::key_of(digest)] = seq;
                by_pseudonym_.insert(detail::key_of(pair.ticket.pseudonym));
                database_.push_back(std::move(pair));
                break;
            }
            case kRecCursor: next_unpublished_ = r.u64(); break;
            default: throw DecodeError("vot center: unknown journal record");
        }
        r.expect_end();
    }

    std::size_t published_count() const {
        std::lock_guard lock(mu_);
        return database_.size();
    }

    /// The (Ticket, B) database plus every received EV_u.
    Bytes state_dump() const {
        std::lock_guard lock(mu_);
        ByteWriter w;
        for (const auto& pair : database_) w.bytes(pair.serialize());
        for (const auto& ev : received_) ev.serialize(w);
        return w.take();
    }

private:
    static constexpr std::uint8_t kRecReceived = 1, kRecPublished = 2, kRecCursor = 3;

    Expected<std::uint64_t, VCError> verify_and_publish_locked(const mqe::Ciphertext& ev) {
        auto digest = ballot_digest(ev);
        auto key = detail::key_of(digest);
        if (auto it = published_.find(key); it != published_.end()) return it->second;
        if (clock_() >= pp_.manifest.tally_start) return unexpected(VCError::kTallyStarted);
        auto plain = mqe::decrypt(secrets_.enc, ev);
        tick(meter_, Phase::kVerification, Op::kDec);
        if (!plain) return unexpected(VCError::kDecryptFailed);
        CastBallot pair;
        try {
            pair = CastBallot::deserialize(*plain);
        } catch (const DecodeError&) {
            return unexpected(VCError::kMalformed);
        }
        bool valid = pair.ticket.verifies(pp_.sig_key(Role::kRegCenter));
        tick(meter_, Phase::kVerification, Op::kVer);
        if (!valid) return unexpected(VCError::kBadTicket);
        refresh_pseudonyms();
        auto pkey = detail::key_of(pair.ticket.pseudonym);
        if (!registered_.contains(pkey)) return unexpected(VCError::kBadTicket);
        if (by_pseudonym_.contains(pkey)) return unexpected(VCError::kDuplicate);

        auto seq = board_.append(EntryKind::kBallot, pair.ballot.serialize());
        ByteWriter rec;
        rec.u8(kRecPublished).raw(digest).u64(seq).bytes(pair.serialize());
        if (journal_) journal_(rec.take());
        published_[key] = seq;
        by_pseudonym_.insert(pkey);
        database_.push_back(std::move(pair));
        return seq;
    }

    /// Pick up pseudonyms the Reg-Center published since the last look.
    void refresh_pseudonyms() {
        auto slice = board_.read(board_seen_, UINT64_MAX);
        for (const auto& e : slice.entries) {
            if (e.kind == EntryKind::kPseudonym) {
                ByteReader pr(e.payload);
                registered_.insert(detail::key_of(gf::Vector::deserialize(pr)));
            }
            board_seen_ = e.seq + 1;
        }
    }

    PublicParams pp_;
    RoleSecrets secrets_;
    BoardAccess& board_;
    Drbg rng_;
    Clock clock_;
    Meter* meter_;
    Misbehavior misbehavior_;
    Journal journal_;
    mutable std::mutex mu_;
    std::map<std::string, mqs::Signature> receipts_;
    std::vector<mqe::Ciphertext> received_;
    std::size_t next_unpublished_ = 0;
    std::map<std::string, std::uint64_t> published_;
    std::unordered_set<std::string> by_pseudonym_;
    std::vector<CastBallot> database_;
    std::unordered_set<std::string> registered_;
    std::uint64_t board_seen_ = 0;
};

// ---------------------------------------------------------------------------
// Count-Center

class CountCenter final : public TallyControl {
public:
    /// Dishonest behaviour: add delta to one candidate's published count.
    struct Misbehavior {
        std::string inflate_candidate;
        std::uint64_t inflate_by = 0;
    };

    CountCenter(PublicParams pp, RoleSecrets secrets, BoardAccess& board, Clock clock, Meter* meter = nullptr)
        : pp_(std::move(pp)),
          secrets_(std::move(secrets)),
          board_(board),
          clock_(std::move(clock)),
          meter_(meter) {}

    void set_misbehavior(Misbehavior m) {
        std::lock_guard lock(mu_);
        misbehavior_ = std::move(m);
    }

    /// Count, then publish marks, the final tally and the decryption key.
    /// Once the board carries a FinalTally this returns it unchanged.
    Expected<TallyResult, TallyError> run_tally() override {
        std::lock_guard lock(mu_);
        auto entries = board_.read_all().entries;
        for (const auto& e : entries)
            if (e.kind == EntryKind::kFinalTally) return TallyResult::deserialize(e.payload);
        if (clock_() < pp_.manifest.tally_start) return unexpected(TallyError::kTooEarly);

        auto [result, marks] = compute_tally(entries, secrets_.enc, pp_, meter_, Phase::kTally);
        if (misbehavior_.inflate_by > 0) {
            for (auto& [name, n] : result.counts)
                if (name == misbehavior_.inflate_candidate) n += misbehavior_.inflate_by;
            result.total_valid += misbehavior_.inflate_by;
        }
        for (const auto& m : marks) board_.append(EntryKind::kTallyMark, m.serialize());
        board_.append(EntryKind::kFinalTally, result.serialize());
        board_.append(EntryKind::kCCKeyDisclosure, secrets_.enc.serialize());
        return result;
    }

    Bytes state_dump() const {
        ByteWriter w;
        secrets_.enc.serialize(w);
        return w.take();
    }

private:
    PublicParams pp_;
    RoleSecrets secrets_;
    BoardAccess& board_;
    Clock clock_;
    Meter* meter_;
    Misbehavior misbehavior_;
    std::mutex mu_;
};

}  // namespace pqevot::protocol
