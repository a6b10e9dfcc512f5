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

// Runs a scenario end to end, in process or through live role endpoints on
// loopback, and checks each adversary directive against its expected outcome.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pqevot/cli/scenario.hpp"
#include "pqevot/commit.hpp"
#include "pqevot/protocol/audit.hpp"
#include "pqevot/protocol/deployment.hpp"
#include "pqevot/protocol/tally.hpp"
#include "pqevot/service/node.hpp"

namespace pqevot::cli {

namespace proto = pqevot::protocol;

enum class Transport { kInProcess, kWire };

struct RunOptions {
    Transport transport = Transport::kInProcess;
    bool parallel_voters = false;
    std::filesystem::path store_dir;  // wire only; empty keeps node state in memory
};

struct DirectiveOutcome {
    std::string directive;
    std::string expected;
    std::string observed;
    bool pass = false;
};

struct VoterOutcome {
    std::string id;
    std::optional<std::string> candidate;
    bool registered = false;
    bool cast = false;
    bool withheld = false;
    std::optional<proto::BoardCheck> board_check;
    bool receipt_verifies = false;
    std::string error;  // why registration or casting failed
};

/// How many times each phase ran its per-ballot work.
struct PhaseVolumes {
    std::uint64_t registered = 0;
    std::uint64_t cast = 0;
    std::uint64_t collected = 0;
    std::uint64_t verified = 0;
    std::uint64_t tallied = 0;
};

struct Samples {
    std::optional<proto::Ticket> ticket;
    std::optional<proto::Vote> vote;
    std::optional<mqe::Ciphertext> ballot;
    std::optional<mqe::Ciphertext> encrypted_vote;
    std::optional<mqs::Signature> receipt;
    std::string candidate;
};

struct RunResult {
    Scenario scenario;
    proto::ElectionSetup setup;
    std::vector<proto::BoardEntry> board;
    std::optional<proto::TallyResult> tally;
    proto::TallyResult scripted;  // honest casts that should be counted
    bool tally_matches_script = false;
    proto::AuditReport audit;
    proto::CounterReport counters;   // honest traffic only
    proto::CounterReport adversary;  // what the directives cost, kept apart
    PhaseVolumes volumes;
    std::vector<VoterOutcome> voters;
    std::vector<DirectiveOutcome> outcomes;
    Samples samples;

    bool directives_pass() const {
        return std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.pass; });
    }
};

/// Times at which the runner acts inside each window.
struct Timeline {
    std::int64_t reg, vote, collect, tally;

    static Timeline of(const proto::Manifest& m) {
        return {m.registration.start, m.voting.start, m.voting.end - 1, m.tally_start};
    }
};

/// Identity-linking material in a byte dump of authority state.
struct CollusionFinding {
    std::size_t ids_found = 0;
    std::size_t encoded_ids_found = 0;
    bool encoded_scanned = false;
    std::vector<std::string> leaked;
};

/// Shorter needles match random bytes by chance and say nothing.
inline constexpr std::size_t kMinEncodedNeedle = 8;

inline CollusionFinding scan_for_identities(ByteView dump, const std::vector<std::string>& ids,
                                            const proto::PublicParams& pp) {
    CollusionFinding f;
    f.encoded_scanned = pp.pseudonym.id_elems >= kMinEncodedNeedle;
    for (const auto& id : ids) {
        bool leak = false;
        if (contains(dump, as_bytes(id))) {
            ++f.ids_found;
            leak = true;
        }
        if (f.encoded_scanned && contains(dump, proto::encode_identity(id, pp.pseudonym.id_elems).raw_bytes())) {
            ++f.encoded_ids_found;
            leak = true;
        }
        if (leak) f.leaked.push_back(id);
    }
    return f;
}

struct PreimageSearch {
    std::uint64_t evaluated = 0;
    std::vector<gf::Vector> preimages;
};

/// Every input of the pseudonym system that maps to v_p. Only sensible when
/// the input space is tiny; the caller checks.
inline PreimageSearch search_pseudonym_preimages(const proto::PublicParams& pp, const gf::Vector& v_p) {
    PreimageSearch s;
    auto n = pp.pseudonym.inputs();
    if (n > 3) throw std::invalid_argument("preimage search over 2^" + std::to_string(8 * n) + " inputs refused");
    std::uint64_t total = std::uint64_t(1) << (8 * n);
    Bytes x(n);
    for (std::uint64_t i = 0; i < total; ++i) {
        for (std::size_t k = 0; k < n; ++k) x[k] = static_cast<std::uint8_t>(i >> (8 * k));
        auto in = gf::Vector::from_bytes(x);
        if (pp.pseudonym_system.eval(in) == v_p) s.preimages.push_back(in);
        ++s.evaluated;
    }
    return s;
}

namespace detail {

/// The endpoints plus direct handles on the authorities for scripting
/// misbehaviour and dumping state.
class Harness {
public:
    virtual ~Harness() = default;
    virtual proto::Deployment view() = 0;
    virtual proto::PollOfficer& po() = 0;
    virtual proto::VotCenter& vc() = 0;
    virtual proto::CountCenter& cc() = 0;
};

class LocalHarness final : public Harness {
public:
    LocalHarness(const proto::ElectionSetup& setup, std::vector<std::string> roll, std::uint64_t seed,
                 proto::Meter* meter)
        : net_(setup, std::move(roll), seed, meter) {}
    proto::Deployment view() override { return net_.view(); }
    proto::PollOfficer& po() override { return net_.po(); }
    proto::VotCenter& vc() override { return net_.vc(); }
    proto::CountCenter& cc() override { return net_.cc(); }

private:
    proto::LocalDeployment net_;
};

class WireHarness final : public Harness {
public:
    WireHarness(const proto::ElectionSetup& setup, std::vector<std::string> roll, std::uint64_t seed,
                proto::Meter* meter, const std::filesystem::path& store_dir) {
        using service::NodeRole;
        auto cfg = [&](NodeRole r) {
            service::NodeConfig c;
            c.role = r;
            c.bind = {"127.0.0.1", 0};
            c.seed = seed;
            c.manual_clock = true;
            if (!store_dir.empty()) c.store = store_dir / (std::string(service::to_string(r)) + ".log");
            return c;
        };
        auto secrets = [&](NodeRole r) { return &setup.secret(service::authority_of(r)); };

        board_ = std::make_unique<service::RoleNode>(cfg(NodeRole::kBoard), nullptr, nullptr);
        auto with_board = [&](NodeRole r) {
            auto c = cfg(r);
            c.board = board_->address();
            return c;
        };
        vc_ = std::make_unique<service::RoleNode>(with_board(NodeRole::kVotCenter), &setup.pp,
                                                  secrets(NodeRole::kVotCenter), std::vector<std::string>{}, meter);
        auto po_cfg = cfg(NodeRole::kPollOfficer);
        po_cfg.vc = vc_->address();
        po_ = std::make_unique<service::RoleNode>(po_cfg, &setup.pp, secrets(NodeRole::kPollOfficer),
                                                  std::vector<std::string>{}, meter);
        rc_ = std::make_unique<service::RoleNode>(with_board(NodeRole::kRegCenter), &setup.pp,
                                                  secrets(NodeRole::kRegCenter), std::move(roll), meter);
        cc_ = std::make_unique<service::RoleNode>(with_board(NodeRole::kCountCenter), &setup.pp,
                                                  secrets(NodeRole::kCountCenter), std::vector<std::string>{}, meter);
        remote_ = std::make_unique<service::RemoteDeployment>(service::RemoteDeployment::Addresses{
            board_->address(), rc_->address(), po_->address(), vc_->address(), cc_->address()});
    }

    proto::Deployment view() override { return remote_->view(); }
    proto::PollOfficer& po() override { return *po_->po(); }
    proto::VotCenter& vc() override { return *vc_->vc(); }
    proto::CountCenter& cc() override { return *cc_->cc(); }

private:
    std::unique_ptr<service::RoleNode> board_, vc_, po_, rc_, cc_;
    std::unique_ptr<service::RemoteDeployment> remote_;
};

inline proto::CounterReport operator_minus(const proto::CounterReport& a, const proto::CounterReport& b) {
    proto::CounterReport r;
    for (std::size_t i = 0; i < proto::kPhaseCount; ++i) r[i] = a[i] - b[i];
    return r;
}

inline proto::CounterReport operator_plus(const proto::CounterReport& a, const proto::CounterReport& b) {
    proto::CounterReport r;
    for (std::size_t i = 0; i < proto::kPhaseCount; ++i) r[i] = a[i] + b[i];
    return r;
}

/// Runs f and books whatever it costs to the adversary column.
template <class F>
auto as_adversary(proto::Meter& meter, proto::CounterReport& adversary, F&& f) {
    auto before = meter.report();
    struct Book {
        proto::Meter& m;
        proto::CounterReport& adv;
        proto::CounterReport before;
        ~Book() { adv = operator_plus(adv, operator_minus(m.report(), before)); }
    } book{meter, adversary, before};
    return f();
}

}  // namespace detail

inline RunResult run_scenario(const Scenario& s, const RunOptions& opt = {}) {
    s.validate();
    RunResult out{s, {}, {}, {}, proto::TallyResult::empty_for(s.manifest), false, {}, {}, {}, {}, {}, {}, {}};
    proto::Meter meter;
    proto::CounterReport& adversary = out.adversary;
    {
        auto rng = proto::setup_rng(s.seed);
        out.setup = proto::prepare_election(s.manifest, s.profile(), rng, &meter);
    }
    const auto& pp = out.setup.pp;
    auto when = Timeline::of(s.manifest);

    std::unique_ptr<detail::Harness> harness;
    if (opt.transport == Transport::kWire)
        harness = std::make_unique<detail::WireHarness>(out.setup, s.roll(), s.seed, &meter, opt.store_dir);
    else
        harness = std::make_unique<detail::LocalHarness>(out.setup, s.roll(), s.seed, &meter);
    auto net = harness->view();

    std::map<std::string, std::vector<const Directive*>> by_kind;
    for (const auto& d : s.directives) by_kind[to_string(d.kind)].push_back(&d);
    auto directives = [&](DirectiveKind k) { return by_kind[to_string(k)]; };
    auto adv_rng = Drbg::from_seed(s.seed).derive("adversary");

    // Registration.
    net.set_time(when.reg);
    std::vector<proto::Voter> voters;
    voters.reserve(s.voters.size());
    for (const auto& sv : s.voters) {
        voters.emplace_back(pp, sv.id, proto::voter_rng(s.seed, sv.id), &meter);
        VoterOutcome vo;
        vo.id = sv.id;
        vo.candidate = sv.candidate;
        auto t = voters.back().register_with(*net.rc);
        vo.registered = t.has_value();
        if (!t) vo.error = to_string(t.error());
        if (t) ++out.volumes.registered;
        if (t && !out.samples.ticket) out.samples.ticket = *t;
        out.voters.push_back(std::move(vo));
    }
    std::vector<std::unique_ptr<proto::Voter>> outsiders;
    for (const auto* d : directives(DirectiveKind::kOutsiderVote)) {
        auto& o = *outsiders.emplace_back(
            std::make_unique<proto::Voter>(pp, d->subject, proto::voter_rng(s.seed, d->subject), nullptr));
        auto reg = detail::as_adversary(meter, adversary, [&] { return o.register_with(*net.rc); });
        DirectiveOutcome oc{d->describe(), "registration NotEligible, no ballot accepted", "", false};
        oc.observed = reg ? "registered" : std::string("registration ") + to_string(reg.error());
        oc.pass = !reg && reg.error() == proto::RegError::kNotEligible;
        out.outcomes.push_back(std::move(oc));
    }

    // Voting.
    net.set_time(when.vote);
    auto cast_one = [&](std::size_t i) {
        const auto& sv = s.voters[i];
        if (!sv.candidate || !out.voters[i].registered) return;
        auto r = voters[i].vote(*net.po, *pp.manifest.candidate_index(*sv.candidate), when.vote);
        out.voters[i].cast = r.has_value();
        if (!r) out.voters[i].error = to_string(r.error());
    };
    if (opt.parallel_voters) {
        std::vector<std::thread> pool;
        auto workers = std::max(2u, std::min(8u, std::thread::hardware_concurrency()));
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < voters.size(); i += workers) cast_one(i);
            });
        for (auto& t : pool) t.join();
    } else {
        for (std::size_t i = 0; i < voters.size(); ++i) cast_one(i);
    }
    for (std::size_t i = 0; i < voters.size(); ++i) {
        if (!out.voters[i].cast) continue;
        ++out.volumes.cast;
        if (!out.samples.vote) {
            const auto& rec = *voters[i].cast();
            out.samples.vote = rec.vote;
            out.samples.ballot = rec.ballot;
            out.samples.encrypted_vote = rec.encrypted_vote;
            out.samples.receipt = rec.receipt;
            out.samples.candidate = pp.manifest.candidates[rec.candidate];
        }
    }

    auto index_of = [&](const std::string& id) {
        for (std::size_t i = 0; i < s.voters.size(); ++i)
            if (s.voters[i].id == id) return i;
        throw ScenarioError("unknown voter " + id);
    };

    std::vector<std::pair<const Directive*, Expected<proto::CastRecord, proto::VoteError>>> replays;
    for (const auto* d : directives(DirectiveKind::kReplayTicket)) {
        auto i = index_of(d->subject);
        auto r = detail::as_adversary(meter, adversary, [&] {
            // A copy of the voter keeps the honest record intact.
            proto::Voter again(pp, d->subject, proto::voter_rng(s.seed, d->subject).derive("replay"), nullptr);
            if (voters[i].ticket()) again.set_ticket(*voters[i].ticket());
            return again.vote(*net.po, *pp.manifest.candidate_index(*s.voters[i].candidate), when.vote);
        });
        replays.emplace_back(d, std::move(r));
    }

    for (const auto* d : directives(DirectiveKind::kForgeTicket)) {
        auto r = detail::as_adversary(meter, adversary, [&] {
            auto fake_rc = mqs::keygen(s.profile().sig, adv_rng);
            auto v_p = gf::Vector::random(pp.pseudonym.outputs, adv_rng);
            proto::Ticket forged{v_p, mqs::sign(fake_rc.signing, v_p.serialize(), adv_rng)};
            proto::Voter forger(pp, "forger", adv_rng.derive("forger"), nullptr);
            forger.set_ticket(forged);
            return forger.vote(*net.po, *pp.manifest.candidate_index(d->candidate), when.vote);
        });
        DirectiveOutcome oc{d->describe(), "vote refused with BadTicket", "", false};
        oc.observed = r ? "ballot accepted" : std::string("vote refused with ") + to_string(r.error());
        oc.pass = !r && r.error() == proto::VoteError::kBadTicket;
        out.outcomes.push_back(std::move(oc));
    }

    // Collection: PO hands everything to VC before the window closes.
    net.set_time(when.collect);
    auto receipts = net.po_control->forward_batch();
    out.volumes.collected = receipts.size();

    // Verification, with any scripted withholding.
    proto::VotCenter::Misbehavior vc_bad;
    for (const auto* d : directives(DirectiveKind::kVCWithhold)) {
        auto i = index_of(d->subject);
        if (voters[i].cast()) {
            vc_bad.withhold.insert(proto::ballot_digest(voters[i].cast()->encrypted_vote));
            out.voters[i].withheld = true;
        }
    }
    if (!vc_bad.withhold.empty()) harness->vc().set_misbehavior(vc_bad);
    auto published = net.vc_control->publish_pending();
    for (const auto& p : published)
        if (p.ok()) ++out.volumes.verified;

    // Voters look for their ballots.
    for (std::size_t i = 0; i < voters.size(); ++i) {
        if (!out.voters[i].cast) continue;
        out.voters[i].board_check = voters[i].check_board(*net.board);
        const auto& rec = *voters[i].cast();
        out.voters[i].receipt_verifies =
            proto::receipt_verifies(rec.encrypted_vote, rec.receipt, pp.sig_key(proto::Role::kPollOfficer));
    }

    // Tally.
    for (const auto* d : directives(DirectiveKind::kCCInflate))
        harness->cc().set_misbehavior({d->candidate, d->delta});
    net.set_time(when.tally);
    auto tally = net.cc->run_tally();
    if (tally) out.tally = *tally;

    out.board = net.board->read_all().entries;
    out.volumes.tallied = proto::entries_of(out.board, proto::EntryKind::kBallot).size();
    out.audit = proto::audit(out.board, pp);

    for (std::size_t i = 0; i < voters.size(); ++i) {
        if (!out.voters[i].cast || out.voters[i].withheld) continue;
        for (auto& [name, n] : out.scripted.counts)
            if (name == *s.voters[i].candidate) ++n;
        ++out.scripted.total_valid;
    }
    out.tally_matches_script = out.tally && out.tally->counts == out.scripted.counts &&
                               out.tally->total_valid == out.scripted.total_valid && out.tally->rejected.empty();

    // Directive outcomes that needed the finished board.
    auto ballots = proto::entries_of(out.board, proto::EntryKind::kBallot);
    for (auto& [d, r] : replays) {
        auto i = index_of(d->subject);
        std::size_t copies = 0;
        if (voters[i].cast()) {
            auto mine = voters[i].cast()->ballot.serialize();
            for (const auto* e : ballots) copies += e->payload == mine;
        }
        DirectiveOutcome oc{d->describe(), "second attempt TicketReused, one counted ballot", "", false};
        oc.observed = (r ? std::string("second ballot accepted") : std::string("second attempt ") + to_string(r.error())) +
                      ", " + std::to_string(copies) + " ballot(s) on board, " + std::to_string(ballots.size()) +
                      " ballots for " + std::to_string(out.volumes.cast) + " honest casts";
        oc.pass = !r && r.error() == proto::VoteError::kTicketReused && copies == 1 &&
                  ballots.size() == out.volumes.verified;
        out.outcomes.push_back(std::move(oc));
    }

    for (const auto* d : directives(DirectiveKind::kVCWithhold)) {
        const auto& vo = out.voters[index_of(d->subject)];
        DirectiveOutcome oc{d->describe(), "voter board check Missing while holding a verifying receipt", "", false};
        oc.observed = std::string("board check ") + (vo.board_check ? to_string(*vo.board_check) : "not run") +
                      ", receipt " + (vo.receipt_verifies ? "verifies" : "does not verify");
        oc.pass = vo.board_check == proto::BoardCheck::kMissing && vo.receipt_verifies;
        out.outcomes.push_back(std::move(oc));
    }

    for (const auto* d : directives(DirectiveKind::kCCInflate)) {
        std::optional<std::uint64_t> final_seq;
        if (auto f = proto::entries_of(out.board, proto::EntryKind::kFinalTally); !f.empty()) final_seq = f.back()->seq;
        DirectiveOutcome oc{d->describe(), "audit Discrepancy at the FinalTally entry", "", false};
        oc.observed = std::string("audit ") + proto::to_string(out.audit.verdict) +
                      (out.audit.seq ? " at seq " + std::to_string(*out.audit.seq) : std::string()) +
                      (final_seq ? ", FinalTally at seq " + std::to_string(*final_seq) : std::string());
        oc.pass = out.audit.verdict == proto::AuditVerdict::kDiscrepancy && out.audit.seq && final_seq &&
                  *out.audit.seq == *final_seq;
        out.outcomes.push_back(std::move(oc));
    }

    for (const auto* d : directives(DirectiveKind::kCollude)) {
        Bytes dump;
        for (const auto& part : {harness->po().state_dump(), harness->vc().state_dump(), harness->cc().state_dump()})
            dump.insert(dump.end(), part.begin(), part.end());
        auto ids = s.roll();
        auto finding = scan_for_identities(dump, ids, pp);
        DirectiveOutcome oc{d->describe(), "no identity bytes in the PO+VC+CC dump", "", false};
        oc.observed = std::to_string(dump.size()) + " dump bytes, " + std::to_string(finding.ids_found) + " ids";
        oc.observed += finding.encoded_scanned
                           ? " and " + std::to_string(finding.encoded_ids_found) + " encoded ids found"
                           : " found (encoded ids are " + std::to_string(pp.pseudonym.id_elems) +
                                 " bytes here, too short to scan)";
        bool inversion_ok = true;
        auto n = pp.pseudonym.inputs();
        if (n <= 3) {
            // Recover the first registered voter's input by exhaustive search.
            std::size_t target = s.voters.size();
            for (std::size_t i = 0; i < s.voters.size(); ++i)
                if (out.voters[i].registered) {
                    target = i;
                    break;
                }
            if (target < s.voters.size()) {
                auto search = search_pseudonym_preimages(pp, *voters[target].pseudonym());
                auto truth = proto::encode_identity(s.voters[target].id, pp.pseudonym.id_elems) |
                             *voters[target].randomness();
                bool found = std::find(search.preimages.begin(), search.preimages.end(), truth) !=
                             search.preimages.end();
                inversion_ok = found && search.evaluated == (std::uint64_t(1) << (8 * n));
                oc.expected += "; inversion needs all q^n inputs";
                oc.observed += "; exhaustive search evaluated " + std::to_string(search.evaluated) + " inputs, " +
                               std::to_string(search.preimages.size()) + " preimage(s), true input " +
                               (found ? "among them" : "missing");
            }
        } else {
            oc.observed += "; pseudonym input space 2^" + std::to_string(8 * n) + ", search not attempted";
        }
        oc.pass = finding.ids_found == 0 && finding.encoded_ids_found == 0 && inversion_ok;
        out.outcomes.push_back(std::move(oc));
    }

    out.counters = detail::operator_minus(meter.report(), adversary);
    return out;
}

}  // namespace pqevot::cli
