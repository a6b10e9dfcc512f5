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

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <memory>
#include <set>
#include <thread>

#include "pqevot/protocol/audit.hpp"
#include "pqevot/protocol/deployment.hpp"

namespace {

using namespace pqevot;
using namespace pqevot::protocol;

Manifest test_manifest(std::vector<std::string> candidates) {
    Manifest m;
    m.election_id = "unit";
    m.candidates = std::move(candidates);
    m.registration = {100, 200};
    m.voting = {200, 300};
    m.tally_start = 400;
    return m;
}

constexpr std::int64_t kRegTime = 150;
constexpr std::int64_t kVoteTime = 250;
constexpr std::int64_t kCollectTime = 299;
constexpr std::int64_t kTallyTime = 400;

std::vector<std::string> candidates(std::size_t l) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < l; ++i) out.push_back("cand-" + std::to_string(i + 1));
    return out;
}

/// One election with its roles, built once per L and reused read-only.
const ElectionSetup& setup_for(std::size_t l) {
    static std::map<std::size_t, std::unique_ptr<ElectionSetup>> cache;
    auto& slot = cache[l];
    if (!slot) {
        auto rng = setup_rng(1000 + l);
        slot = std::make_unique<ElectionSetup>(prepare_election(test_manifest(candidates(l)), Profile::reference(), rng));
    }
    return *slot;
}

std::vector<std::string> roll_of(std::size_t n) {
    std::vector<std::string> r;
    for (std::size_t i = 0; i < n; ++i) r.push_back("voter-" + std::to_string(i));
    return r;
}

struct Election {
    explicit Election(std::size_t l, std::size_t roll = 8, std::uint64_t seed = 7)
        : setup(setup_for(l)), net(setup, roll_of(roll), seed, &meter), seed(seed) {}

    Voter voter(const std::string& id) { return Voter(setup.pp, id, voter_rng(seed, id), &meter); }

    Voter registered(const std::string& id) {
        auto v = voter(id);
        net.clock().set(kRegTime);
        auto t = v.register_with(net.rc());
        EXPECT_TRUE(t.has_value());
        return v;
    }

    const ElectionSetup& setup;
    Meter meter;
    LocalDeployment net;
    std::uint64_t seed;
};

// ---------------------------------------------------------------------------

TEST(Prepare, CountsFourAndFourKeygens) {
    Meter meter;
    auto rng = setup_rng(1);
    auto setup = prepare_election(test_manifest(candidates(2)), Profile::reference(), rng, &meter);
    EXPECT_EQ(meter.phase(Phase::kPreparation), OpCounts::of({{Op::kKgSig, 4}, {Op::kKgEnc, 4}}));
    EXPECT_NO_THROW(setup.pp.validate());
}

TEST(Prepare, SingleCandidateRejected) {
    auto rng = setup_rng(2);
    EXPECT_THROW(prepare_election(test_manifest({"only"}), Profile::reference(), rng), ManifestError);
}

TEST(Prepare, SameSeedSameParameters) {
    auto r1 = setup_rng(3), r2 = setup_rng(3);
    auto a = prepare_election(test_manifest(candidates(3)), Profile::reference(), r1);
    auto b = prepare_election(test_manifest(candidates(3)), Profile::reference(), r2);
    EXPECT_EQ(a.pp.serialize(), b.pp.serialize());
    EXPECT_EQ(PublicParams::deserialize(a.pp.serialize()), a.pp);
}

// ---------------------------------------------------------------------------

TEST(Register, EligibleVoterGetsVerifyingTicket) {
    Election e(2);
    auto v = e.registered("voter-0");
    ASSERT_TRUE(v.ticket());
    EXPECT_TRUE(v.ticket()->verifies(e.setup.pp.sig_key(Role::kRegCenter)));
    EXPECT_EQ(e.meter.phase(Phase::kRegistration), OpCounts::of({{Op::kEval, 1}, {Op::kSign, 1}}));
    auto board = e.net.board().entries();
    ASSERT_EQ(board.size(), 1u);
    EXPECT_EQ(board[0].kind, EntryKind::kPseudonym);
    EXPECT_EQ(board[0].payload, v.pseudonym()->serialize());
}

TEST(Register, SecondRequestRefused) {
    Election e(2);
    auto v = e.registered("voter-1");
    auto again = e.voter("voter-1");
    auto r = again.register_with(e.net.rc());
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error(), RegError::kAlreadyRegistered);
}

TEST(Register, NotOnRollRefused) {
    Election e(2);
    e.net.clock().set(kRegTime);
    auto v = e.voter("mallory");
    auto r = v.register_with(e.net.rc());
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error(), RegError::kNotEligible);
}

TEST(Register, OutsideWindowAndReusedPseudonym) {
    Election e(2);
    e.net.clock().set(kVoteTime);
    auto late = e.voter("voter-2");
    auto r = late.register_with(e.net.rc());
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error(), RegError::kWindowClosed);

    auto v = e.registered("voter-3");
    auto dup = e.net.rc().register_voter({"voter-4", *v.pseudonym()});
    ASSERT_FALSE(dup);
    EXPECT_EQ(dup.error(), RegError::kDuplicatePseudonym);
}

TEST(Pseudonym, DeterministicAndDistinct) {
    const auto& pp = setup_for(2).pp;
    Voter a(pp, "alice", voter_rng(5, "alice"));
    Voter b(pp, "alice", voter_rng(5, "alice"));
    EXPECT_EQ(a.make_pseudonym(), b.make_pseudonym());
    Voter c(pp, "alice", voter_rng(6, "alice"));
    EXPECT_NE(a.make_pseudonym(), c.make_pseudonym());
    // Same voter, fresh randomness each call.
    std::set<std::string> seen;
    for (int i = 0; i < 200; ++i) seen.insert(hex(a.make_pseudonym().raw_bytes()));
    EXPECT_EQ(seen.size(), 200u);
}

TEST(Pseudonym, TinyInversionNeedsFullEnumeration) {
    auto rng = setup_rng(8);
    Profile tiny = Profile::reference();
    tiny.pseudonym = PseudonymParams::tiny();
    auto setup = prepare_election(test_manifest(candidates(2)), tiny, rng);
    Voter v(setup.pp, "alice", voter_rng(8, "alice"));
    auto vp = v.make_pseudonym();
    auto target = mq::shift_to_target(setup.pp.pseudonym_system, vp);
    ASSERT_EQ(target.inputs(), 2u);
    auto roots = mq::bruteforce_solve(target);
    auto truth = encode_identity("alice", 1) | *v.randomness();
    EXPECT_NE(std::find(roots.begin(), roots.end(), truth), roots.end());
    for (const auto& x : roots) EXPECT_EQ(setup.pp.pseudonym_system.eval(x), vp);
}

// ---------------------------------------------------------------------------

class VotingCounters : public ::testing::TestWithParam<std::size_t> {};

TEST_P(VotingCounters, OneRoundMatchesFormula) {
    auto l = GetParam();
    Election e(l);
    auto v = e.registered("voter-0");
    e.net.clock().set(kVoteTime);
    auto before = e.meter.phase(Phase::kVoting);
    auto cast = v.vote(e.net.po(), l - 1, kVoteTime);
    ASSERT_TRUE(cast) << to_string(cast.error());
    auto used = e.meter.phase(Phase::kVoting) - before;
    EXPECT_EQ(used, OpCounts::of({{Op::kEnc, 3}, {Op::kSign, l + 1}, {Op::kVer, l + 1}, {Op::kDec, 1}}));
    EXPECT_TRUE(receipt_verifies(cast->encrypted_vote, cast->receipt, e.setup.pp.sig_key(Role::kPollOfficer)));
}

INSTANTIATE_TEST_SUITE_P(L, VotingCounters, ::testing::Values(2u, 5u, 10u));

TEST(Voting, ReplayedTicketRefused) {
    Election e(3);
    auto v = e.registered("voter-0");
    e.net.clock().set(kVoteTime);
    ASSERT_TRUE(v.vote(e.net.po(), 0, kVoteTime));
    auto again = v.vote(e.net.po(), 1, kVoteTime + 5);
    ASSERT_FALSE(again);
    EXPECT_EQ(again.error(), VoteError::kTicketReused);
}

TEST(Voting, StaleTimestampRefused) {
    Election e(2);
    auto v = e.registered("voter-0");
    e.net.clock().set(kVoteTime);
    auto r = v.vote(e.net.po(), 0, kVoteTime - kFreshnessWindow - 1);
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error(), VoteError::kStaleTime);
    // The edge of the window is still fresh, and the stale try did not burn the ticket.
    EXPECT_TRUE(v.vote(e.net.po(), 0, kVoteTime + kFreshnessWindow));
}

TEST(Voting, ForgedTicketRefused) {
    Election e(2);
    auto v = e.voter("voter-0");
    auto rng = Drbg::from_seed(77);
    auto vp = v.make_pseudonym();
    mqs::Signature forged;
    forged.w = gf::Vector::random(e.setup.pp.sig_key(Role::kRegCenter).inputs(), rng);
    v.set_ticket({vp, forged});
    e.net.clock().set(kVoteTime);
    auto r = v.vote(e.net.po(), 0, kVoteTime);
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error(), VoteError::kBadTicket);
}

/// Passes through to the real Poll-Officer but damages one bundle signature.
class CorruptingPo final : public PollingEndpoint {
public:
    explicit CorruptingPo(PollingEndpoint& inner) : inner_(inner) {}
    Expected<std::uint64_t, VoteError> present_ticket(const mqe::Ciphertext& et) override {
        return inner_.present_ticket(et);
    }
    Expected<ObliviousBundle, VoteError> sign_commitment(const CommitmentSubmission& sub) override {
        auto b = inner_.sign_commitment(sub);
        if (b) b->signatures.back().w[0] += gf::Element(1);
        return b;
    }
    Expected<mqs::Signature, VoteError> submit_ballot(const BallotSubmission& sub) override {
        return inner_.submit_ballot(sub);
    }

private:
    PollingEndpoint& inner_;
};

TEST(Voting, CorruptedBundleIsBottom) {
    Election e(3);
    auto v = e.registered("voter-0");
    e.net.clock().set(kVoteTime);
    CorruptingPo bad(e.net.po());
    auto r = v.vote(bad, 0, kVoteTime);
    ASSERT_FALSE(r);
    EXPECT_EQ(r.error(), VoteError::kBadObliviousBundle);
    EXPECT_FALSE(v.cast());
}

TEST(Voting, PoStateHoldsNothingAboutTheChoice) {
    Election e(3);
    auto v = e.registered("voter-0");
    e.net.clock().set(kVoteTime);
    auto cast = v.vote(e.net.po(), 2, kVoteTime);
    ASSERT_TRUE(cast);
    auto dump = e.net.po().state_dump();
    for (const auto& can : e.setup.pp.manifest.candidates) EXPECT_FALSE(contains(dump, as_bytes(can)));
    EXPECT_FALSE(contains(dump, cast->vote.commitment.c));
    EXPECT_FALSE(contains(dump, cast->vote.opening.r));
    EXPECT_FALSE(contains(dump, cast->ballot.serialize()));
}

// ---------------------------------------------------------------------------

/// Voters 0..n-1 register and vote for choices[i].
std::vector<Voter> run_votes(Election& e, const std::vector<std::size_t>& choices) {
    std::vector<Voter> voters;
    e.net.clock().set(kRegTime);
    for (std::size_t i = 0; i < choices.size(); ++i) {
        voters.push_back(e.voter("voter-" + std::to_string(i)));
        EXPECT_TRUE(voters.back().register_with(e.net.rc()));
    }
    e.net.clock().set(kVoteTime);
    for (std::size_t i = 0; i < choices.size(); ++i) EXPECT_TRUE(voters[i].vote(e.net.po(), choices[i], kVoteTime));
    return voters;
}

TEST(Collection, ReceiptsForEveryBallotAndIdempotentResend) {
    Election e(2);
    auto voters = run_votes(e, {0, 1, 0});
    e.net.clock().set(kCollectTime);
    auto receipts = e.net.po().forward_batch();
    ASSERT_EQ(receipts.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& ev = voters[i].cast()->encrypted_vote;
        EXPECT_EQ(receipts[i].digest, ballot_digest(ev));
        EXPECT_TRUE(receipt_verifies(ev, receipts[i].signature, e.setup.pp.sig_key(Role::kVotCenter)));
        auto again = e.net.vc().receive_ballot(ev);
        ASSERT_TRUE(again);
        EXPECT_EQ(*again, receipts[i].signature);
    }
    EXPECT_TRUE(e.net.po().forward_batch().empty());
}

TEST(Collection, EmptyBatch) {
    Election e(2);
    EXPECT_TRUE(e.net.po().forward_batch().empty());
}

TEST(Verification, HonestBallotLandsOnBoardAndDecrypts) {
    Election e(2);
    auto voters = run_votes(e, {1});
    e.net.clock().set(kCollectTime);
    e.net.po().forward_batch();
    auto before = e.meter.phase(Phase::kVerification);
    auto out = e.net.vc().publish_pending();
    ASSERT_EQ(out.size(), 1u);
    ASSERT_TRUE(out[0].ok());
    EXPECT_EQ(e.meter.phase(Phase::kVerification) - before, OpCounts::of({{Op::kDec, 1}, {Op::kVer, 1}}));
    auto entry = e.net.board().entries().at(out[0].seq);
    EXPECT_EQ(entry.kind, EntryKind::kBallot);
    auto plain = mqe::decrypt(e.setup.secret(Role::kCountCenter).enc, mqe::Ciphertext::deserialize(entry.payload));
    ASSERT_TRUE(plain);
    auto content = BallotContent::deserialize(*plain);
    EXPECT_EQ(content.candidate, "cand-2");
    EXPECT_EQ(voters[0].check_board(e.net.board()), BoardCheck::kFound);

    // Publishing the same EV again keeps a single entry.
    auto again = e.net.vc().verify_and_publish(voters[0].cast()->encrypted_vote);
    ASSERT_TRUE(again);
    EXPECT_EQ(static_cast<std::int64_t>(*again), out[0].seq);
    EXPECT_EQ(entries_of(e.net.board().entries(), EntryKind::kBallot).size(), 1u);
}

mqe::Ciphertext craft_ev(const PublicParams& pp, const Ticket& ticket, const BallotContent& content, Drbg& rng) {
    auto b = mqe::encrypt(pp.enc_key(Role::kCountCenter), content.serialize(), rng);
    return mqe::encrypt(pp.enc_key(Role::kVotCenter), CastBallot{ticket, b}.serialize(), rng);
}

TEST(Verification, BadTicketAndDuplicatePseudonym) {
    Election e(2);
    auto voters = run_votes(e, {0});
    e.net.clock().set(kCollectTime);
    auto rng = Drbg::from_seed(90);
    const auto& cast = *voters[0].cast();
    BallotContent content{cast.vote, "cand-1"};

    auto forged = *voters[0].ticket();
    forged.signature.w[1] += gf::Element(7);
    auto bad = e.net.vc().verify_and_publish(craft_ev(e.setup.pp, forged, content, rng));
    ASSERT_FALSE(bad);
    EXPECT_EQ(bad.error(), VCError::kBadTicket);

    ASSERT_TRUE(e.net.vc().verify_and_publish(cast.encrypted_vote));
    auto dup = e.net.vc().verify_and_publish(craft_ev(e.setup.pp, *voters[0].ticket(), content, rng));
    ASSERT_FALSE(dup);
    EXPECT_EQ(dup.error(), VCError::kDuplicate);

    mqe::Ciphertext garbage = cast.encrypted_vote;
    garbage.body[0] ^= 1;
    auto broken = e.net.vc().verify_and_publish(garbage);
    ASSERT_FALSE(broken);
    EXPECT_EQ(broken.error(), VCError::kDecryptFailed);
}

TEST(Verification, SignedButUnpublishedPseudonymRefused) {
    // A ticket RC never published (signed out of band) is not accepted.
    Election e(2);
    auto v = e.voter("voter-5");
    auto vp = v.make_pseudonym();
    auto rng = Drbg::from_seed(91);
    Ticket t{vp, mqs::sign(e.setup.secret(Role::kRegCenter).sig, vp.serialize(), rng)};
    e.net.clock().set(kCollectTime);
    commit::Opening r{};
    BallotContent content{{mqs::Signature{}, commit::commit_with(as_bytes("cand-1"), r), r}, "cand-1"};
    content.vote.signature.w = gf::Vector(40);
    auto res = e.net.vc().verify_and_publish(craft_ev(e.setup.pp, t, content, rng));
    ASSERT_FALSE(res);
    EXPECT_EQ(res.error(), VCError::kBadTicket);
}

TEST(BoardCheck, WithheldBallotIsMissingWithReceipt) {
    Election e(2);
    auto voters = run_votes(e, {0, 1});
    e.net.clock().set(kCollectTime);
    e.net.po().forward_batch();
    e.net.vc().set_misbehavior({{ballot_digest(voters[1].cast()->encrypted_vote)}});
    e.net.vc().publish_pending();
    EXPECT_EQ(voters[0].check_board(e.net.board()), BoardCheck::kFound);
    EXPECT_EQ(voters[1].check_board(e.net.board()), BoardCheck::kMissing);
    const auto& c = *voters[1].cast();
    EXPECT_TRUE(receipt_verifies(c.encrypted_vote, c.receipt, e.setup.pp.sig_key(Role::kPollOfficer)));
}

TEST(BoardCheck, EmptyBoardIsMissing) {
    Election e(2);
    auto voters = run_votes(e, {0});
    BulletinBoard empty;
    EXPECT_EQ(voters[0].check_board(empty), BoardCheck::kMissing);
}

// ---------------------------------------------------------------------------

struct Finished {
    std::unique_ptr<Election> e;
    std::vector<Voter> voters;
    TallyResult result;
};

Finished finished(std::size_t l, const std::vector<std::size_t>& choices) {
    Finished f{std::make_unique<Election>(l, choices.size() + 2), {}, {}};
    f.voters = run_votes(*f.e, choices);
    f.e->net.clock().set(kCollectTime);
    f.e->net.po().forward_batch();
    f.e->net.vc().publish_pending();
    f.e->net.clock().set(kTallyTime);
    auto r = f.e->net.cc().run_tally();
    EXPECT_TRUE(r);
    f.result = *r;
    return f;
}

TEST(Tally, CountsAndPerBallotCost) {
    auto f = finished(2, {0, 0, 1});
    EXPECT_EQ(f.result.count("cand-1"), 2u);
    EXPECT_EQ(f.result.count("cand-2"), 1u);
    EXPECT_EQ(f.result.total_valid, 3u);
    EXPECT_TRUE(f.result.rejected.empty());
    EXPECT_EQ(f.e->meter.phase(Phase::kTally), OpCounts::of({{Op::kDec, 3}, {Op::kVer, 3}}));
    auto board = f.e->net.board().entries();
    EXPECT_EQ(entries_of(board, EntryKind::kTallyMark).size(), 3u);
    EXPECT_EQ(board.back().kind, EntryKind::kCCKeyDisclosure);
    EXPECT_EQ(board[board.size() - 2].kind, EntryKind::kFinalTally);
    EXPECT_TRUE(audit(board, f.e->setup.pp).consistent());
}

TEST(Tally, TooEarlyAndRepeat) {
    Election e(2);
    e.net.clock().set(kCollectTime);
    auto early = e.net.cc().run_tally();
    ASSERT_FALSE(early);
    auto f = finished(2, {1});
    auto size = f.e->net.board().size();
    auto again = f.e->net.cc().run_tally();
    ASSERT_TRUE(again);
    EXPECT_EQ(*again, f.result);
    EXPECT_EQ(f.e->net.board().size(), size);
}

TEST(Tally, BadOpeningRejectedNotCounted) {
    Election e(2, 4);
    auto voters = run_votes(e, {0});
    auto extra = e.voter("voter-3");
    e.net.clock().set(kRegTime);
    ASSERT_TRUE(extra.register_with(e.net.rc()));
    e.net.clock().set(kVoteTime);
    ASSERT_TRUE(extra.vote(e.net.po(), 1, kVoteTime));
    // Re-wrap the second voter's vote with a wrong opening.
    auto vote = extra.cast()->vote;
    vote.opening.r[0] ^= 0xff;
    auto rng = Drbg::from_seed(92);
    e.net.clock().set(kCollectTime);
    e.net.vc().verify_and_publish(voters[0].cast()->encrypted_vote);
    auto seq = e.net.vc().verify_and_publish(craft_ev(e.setup.pp, *extra.ticket(), {vote, "cand-2"}, rng));
    ASSERT_TRUE(seq);
    e.net.clock().set(kTallyTime);
    auto r = e.net.cc().run_tally();
    ASSERT_TRUE(r);
    EXPECT_EQ(r->total_valid, 1u);
    ASSERT_EQ(r->rejected.size(), 1u);
    EXPECT_EQ(r->rejected[0], (Rejection{*seq, RejectReason::kBadOpening}));
    EXPECT_TRUE(audit(e.net.board().entries(), e.setup.pp).consistent());
}

TEST(Tally, ResultEncodingRoundtrip) {
    TallyResult t;
    t.counts = {{"a", 3}, {"b", 0}};
    t.total_valid = 3;
    t.rejected = {{9, RejectReason::kBadSignature}};
    EXPECT_EQ(TallyResult::deserialize(t.serialize()), t);
}

// ---------------------------------------------------------------------------

TEST(Audit, InflatedCountFlaggedAtFinalTally) {
    Election e(2, 5);
    e.net.cc().set_misbehavior({"cand-1", 2});
    run_votes(e, {0, 1, 1});
    e.net.clock().set(kCollectTime);
    e.net.po().forward_batch();
    e.net.vc().publish_pending();
    e.net.clock().set(kTallyTime);
    ASSERT_TRUE(e.net.cc().run_tally());
    auto board = e.net.board().entries();
    auto rep = audit(board, e.setup.pp);
    EXPECT_EQ(rep.verdict, AuditVerdict::kDiscrepancy);
    ASSERT_TRUE(rep.seq);
    EXPECT_EQ(board[*rep.seq].kind, EntryKind::kFinalTally);
}

TEST(Audit, BrokenChainFlaggedAtFirstBadLink) {
    auto f = finished(2, {0, 1});
    auto board = f.e->net.board().entries();
    board[3].payload[5] ^= 1;
    auto rep = audit(board, f.e->setup.pp);
    EXPECT_EQ(rep.verdict, AuditVerdict::kDiscrepancy);
    EXPECT_EQ(rep.seq, 3u);
}

TEST(Audit, MissingMarkAndNotYetPublic) {
    auto f = finished(2, {0, 1});
    auto board = f.e->net.board().entries();
    std::vector<BoardEntry> cut;
    for (const auto& e : board)
        if (!(e.kind == EntryKind::kTallyMark && cut.size() > 0 && cut.back().kind == EntryKind::kTallyMark)) cut.push_back(e);
    cut = rechain(cut);
    auto rep = audit(cut, f.e->setup.pp);
    EXPECT_EQ(rep.verdict, AuditVerdict::kDiscrepancy);
    ASSERT_TRUE(rep.seq);
    EXPECT_EQ(cut[*rep.seq].kind, EntryKind::kFinalTally);

    std::vector<BoardEntry> pre(board.begin(), board.end() - 1);
    EXPECT_EQ(audit(pre, f.e->setup.pp).verdict, AuditVerdict::kNotYetPublic);
}

TEST(Audit, WrongDisclosedKey) {
    auto f = finished(2, {0});
    auto board = f.e->net.board().entries();
    board.back().payload = f.e->setup.secret(Role::kPollOfficer).enc.serialize();
    board = rechain(board);
    auto rep = audit(board, f.e->setup.pp);
    EXPECT_EQ(rep.verdict, AuditVerdict::kDiscrepancy);
    EXPECT_EQ(rep.seq, board.back().seq);
}

// ---------------------------------------------------------------------------

TEST(Board, EmptyAndTruncatedReads) {
    BulletinBoard b;
    auto s = b.read(0, 10);
    EXPECT_TRUE(s.entries.empty());
    EXPECT_EQ(s.head, -1);
    for (int i = 0; i < 3; ++i) b.append(EntryKind::kPseudonym, to_bytes("p" + std::to_string(i)));
    s = b.read(1, 100);
    EXPECT_EQ(s.entries.size(), 2u);
    EXPECT_EQ(s.head, 2);
    EXPECT_FALSE(first_bad_link(b.entries()));
    EXPECT_EQ(BoardSlice::deserialize(s.serialize()).entries, s.entries);
}

TEST(Board, RecoveredChainMustVerify) {
    BulletinBoard b;
    for (int i = 0; i < 4; ++i) b.append(EntryKind::kBallot, to_bytes("b" + std::to_string(i)));
    auto entries = b.entries();
    EXPECT_NO_THROW(BulletinBoard{entries});
    entries[2].payload.push_back(0);
    EXPECT_EQ(first_bad_link(entries), 2u);
    EXPECT_THROW(BulletinBoard{entries}, BoardError);
}

TEST(Board, PersistFailureLeavesBoardUnchanged) {
    BulletinBoard b;
    b.append(EntryKind::kPseudonym, to_bytes("x"));
    b.set_persist([](const BoardEntry&) { throw std::runtime_error("disk full"); });
    EXPECT_THROW(b.append(EntryKind::kPseudonym, to_bytes("y")), std::runtime_error);
    EXPECT_EQ(b.size(), 1u);
}

// ---------------------------------------------------------------------------

TEST(Journal, ReplayRestoresUsedTickets) {
    Election e(2);
    std::vector<Bytes> log;
    e.net.po().set_journal([&](ByteView rec) { log.emplace_back(rec.begin(), rec.end()); });
    auto voters = run_votes(e, {0, 1});
    ASSERT_FALSE(log.empty());

    PollOfficer restarted(e.setup.pp, e.setup.secret(Role::kPollOfficer), Drbg::from_seed(1), e.net.clock().clock());
    for (const auto& rec : log) restarted.replay(rec);
    EXPECT_EQ(restarted.pending_count(), 2u);
    EXPECT_EQ(restarted.state_dump(), e.net.po().state_dump());
    auto again = voters[0].vote(restarted, 1, kVoteTime);
    ASSERT_FALSE(again);
    EXPECT_EQ(again.error(), VoteError::kTicketReused);
}

TEST(Journal, ConcurrentReplayOnlyOneWins) {
    Election e(2);
    auto v = e.registered("voter-0");
    e.net.clock().set(kVoteTime);
    auto rng = Drbg::from_seed(93);
    auto et = mqe::encrypt(e.setup.pp.enc_key(Role::kPollOfficer), TicketPresentation{*v.ticket(), kVoteTime}.serialize(),
                           rng);
    std::atomic<int> wins{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < 8; ++i)
        threads.emplace_back([&] {
            if (e.net.po().present_ticket(et)) ++wins;
        });
    for (auto& t : threads) t.join();
    EXPECT_EQ(wins.load(), 1);
}

}  // namespace
