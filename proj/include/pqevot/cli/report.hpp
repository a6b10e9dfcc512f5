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

// Cost and size reports: the symbolic tables with L substituted, next to what
// a run actually counted and serialized.

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "pqevot/cli/runner.hpp"
#include "pqevot/commit.hpp"

namespace pqevot::cli {

// ---------------------------------------------------------------------------
// Operation counts

struct CostRow {
    proto::Phase phase;
    std::string formula;    // as the cost table writes it
    proto::OpCounts unit;   // what one unit of work costs
    std::uint64_t volume;   // how many units the run performed
    proto::OpCounts measured;
    std::string note;

    proto::OpCounts predicted() const { return unit.scaled(volume); }
    bool equal() const { return predicted() == measured; }
};

inline std::vector<CostRow> cost_rows(const RunResult& r) {
    using proto::Op;
    using proto::OpCounts;
    using proto::Phase;
    auto l = r.setup.pp.candidate_count();
    auto at = [&](Phase p) { return r.counters[static_cast<std::size_t>(p)]; };
    std::vector<CostRow> rows;
    rows.push_back({Phase::kPreparation, "4 T_kg-sig + 4 T_kg-enc", OpCounts::of({{Op::kKgSig, 4}, {Op::kKgEnc, 4}}), 1,
                    at(Phase::kPreparation), "once per election"});
    rows.push_back({Phase::kRegistration, "T_eval + T_sig", OpCounts::of({{Op::kEval, 1}, {Op::kSign, 1}}),
                    r.volumes.registered, at(Phase::kRegistration), "per registered voter"});
    rows.push_back({Phase::kVoting, "3 T_enc + (L+1) T_sig + (L+1) T_ver + T_dec",
                    OpCounts::of({{Op::kEnc, 3}, {Op::kSign, l + 1}, {Op::kVer, l + 1}, {Op::kDec, 1}}),
                    r.volumes.cast, at(Phase::kVoting), "per cast ballot, L = " + std::to_string(l)});
    rows.push_back({Phase::kCollection, "(not tabulated)", OpCounts::of({{Op::kSign, 1}, {Op::kVer, 1}}),
                    r.volumes.collected, at(Phase::kCollection),
                    "per forwarded ballot: VC receipt signature, PO checks it"});
    rows.push_back({Phase::kVerification, "T_dec + T_sig", OpCounts::of({{Op::kDec, 1}, {Op::kVer, 1}}),
                    r.volumes.verified, at(Phase::kVerification),
                    "per published ballot; the narrative's one Dec + one Ver is what runs, the table's T_sig reads as T_ver"});
    rows.push_back({Phase::kTally, "T_dec + T_ver", OpCounts::of({{Op::kDec, 1}, {Op::kVer, 1}}), r.volumes.tallied,
                    at(Phase::kTally), "per ballot on the board"});
    return rows;
}

inline bool costs_match(const RunResult& r) {
    for (const auto& row : cost_rows(r))
        if (!row.equal()) return false;
    return true;
}

inline std::string format_costs(const RunResult& r) {
    std::ostringstream os;
    os << "Operation counts (" << r.scenario.name << ", L = " << r.setup.pp.candidate_count() << ")\n";
    for (const auto& row : cost_rows(r)) {
        os << "  " << std::left << std::setw(13) << proto::to_string(row.phase) << std::setw(46) << row.formula
           << (row.equal() ? "equal" : "DIFFERS") << "\n"
           << "      unit      " << row.unit << " x " << row.volume << "\n"
           << "      predicted " << row.predicted() << "\n"
           << "      measured  " << row.measured << "\n"
           << "      note      " << row.note << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Sizes

struct SizeRow {
    std::string item;
    std::size_t measured = 0;
    std::string table;        // symbolic value from the storage table
    std::size_t table_bytes = 0;
    std::string composition;  // how the measured encoding breaks down
    std::string delta_note;

    long long delta() const { return static_cast<long long>(measured) - static_cast<long long>(table_bytes); }
};

struct SizePrimitives {
    std::size_t s = 0;           // |S|
    std::size_t e_overhead = 0;  // |E| minus its plaintext
    std::size_t commit = 0;      // |Commit|
    std::size_t opening = 0;     // r
    std::size_t sk_e = 0, pk_e = 0, sk_s = 0, pk_s = 0;
};

inline SizePrimitives size_primitives(const RunResult& r) {
    SizePrimitives p;
    const auto& smp = r.samples;
    if (!smp.ticket || !smp.vote || !smp.ballot || !smp.encrypted_vote)
        throw std::logic_error("size report needs at least one cast ballot");
    p.s = smp.vote->signature.serialize().size();
    p.e_overhead = smp.ballot->serialize().size() -
                   proto::BallotContent{*smp.vote, smp.candidate}.serialize().size();
    p.commit = smp.vote->commitment.c.size();
    p.opening = smp.vote->opening.r.size();
    const auto& cc = r.setup.secret(proto::Role::kCountCenter);
    p.sk_e = cc.enc.serialize().size();
    p.pk_e = r.setup.pp.enc_key(proto::Role::kCountCenter).serialize().size();
    {
        ByteWriter w;
        cc.sig.serialize(w);
        p.sk_s = w.take().size();
    }
    p.pk_s = r.setup.pp.sig_key(proto::Role::kCountCenter).serialize().size();
    return p;
}

inline std::vector<SizeRow> size_rows(const RunResult& r) {
    auto p = size_primitives(r);
    const auto& smp = r.samples;
    auto ticket = smp.ticket->serialize().size();
    auto pseudonym = smp.ticket->pseudonym.serialize().size();
    auto vote = smp.vote->serialize().size();
    auto ballot = smp.ballot->serialize().size();
    auto ev = smp.encrypted_vote->serialize().size();
    auto ballot_plain = ballot - p.e_overhead;
    auto ev_plain = ev - p.e_overhead;
    auto pp = r.setup.pp.serialize().size();
    auto table_pp = 4 * (p.sk_e + p.pk_e + p.sk_s + p.pk_s);
    auto n = [](std::size_t v) { return std::to_string(v); };

    std::vector<SizeRow> rows;
    rows.push_back({"Ticket", ticket, "|S|", p.s, "|v_p| " + n(pseudonym) + " + |S| " + n(p.s),
                    "the table omits the pseudonym v_p the signature is over"});
    rows.push_back({"Ballot B_j^u", ballot, "|E|", ballot, "E overhead " + n(p.e_overhead) + " + plaintext " +
                        n(ballot_plain) + " (vote + candidate name)",
                    "|E| taken as the measured ciphertext"});
    rows.push_back({"Cast ballot EV_u", ev, "|E|", ev, "E overhead " + n(p.e_overhead) + " + plaintext " + n(ev_plain) +
                        " (Ticket " + n(ticket) + " + B_j^u " + n(ballot) + ")",
                    "|E| taken as the measured ciphertext; it nests B_j^u so it is not the same |E|"});
    rows.push_back({"Public parameters pp", pp, "4|SK-E| + 4|PK-E| + 4|SK-S| + 4|PK-S|", table_pp,
                    "8 public keys + pseudonym system + manifest; SK-E " + n(p.sk_e) + ", PK-E " + n(p.pk_e) +
                        ", SK-S " + n(p.sk_s) + ", PK-S " + n(p.pk_s),
                    "pp carries no secret keys; the table counts them"});
    rows.push_back({"Vote (sigma_j || c || r)", vote, "|S| + |Commit|", p.s + p.commit,
                    "|S| " + n(p.s) + " + |Commit| " + n(p.commit) + " + |r| " + n(p.opening),
                    "encoding overhead: the opening r travels with the vote"});
    return rows;
}

inline std::string format_sizes(const RunResult& r) {
    auto p = size_primitives(r);
    std::ostringstream os;
    os << "Sizes in bytes (" << r.scenario.name << ")\n"
       << "  primitives: |S| = " << p.s << ", |E| overhead = " << p.e_overhead << ", |Commit| = " << p.commit
       << ", |r| = " << p.opening << "\n";
    for (const auto& row : size_rows(r)) {
        os << "  " << row.item << ": measured " << row.measured << ", table " << row.table << " = " << row.table_bytes
           << ", delta " << (row.delta() > 0 ? "+" : "") << row.delta() << "\n"
           << "      composition " << row.composition << "\n"
           << "      note        " << row.delta_note << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Run summary

inline std::string format_tally(const proto::TallyResult& t) {
    std::ostringstream os;
    for (const auto& [name, n] : t.counts) os << "  " << name << ": " << n << "\n";
    os << "  total valid: " << t.total_valid << ", rejected: " << t.rejected.size() << "\n";
    return os.str();
}

inline std::string format_run(const RunResult& r) {
    std::ostringstream os;
    os << "scenario " << r.scenario.name << " (seed " << r.scenario.seed << ", " << r.scenario.voters.size()
       << " voters, L = " << r.setup.pp.candidate_count() << ")\n";
    os << "registered " << r.volumes.registered << ", cast " << r.volumes.cast << ", collected " << r.volumes.collected
       << ", published " << r.volumes.verified << ", board entries " << r.board.size() << "\n";
    if (r.tally) {
        os << "published tally:\n" << format_tally(*r.tally);
    } else {
        os << "no tally published\n";
    }
    os << "scripted tally " << (r.tally_matches_script ? "matches" : "does not match") << "\n";
    os << "audit: " << proto::to_string(r.audit.verdict);
    if (r.audit.seq) os << " at seq " << *r.audit.seq;
    if (!r.audit.detail.empty()) os << " (" << r.audit.detail << ")";
    os << "\n";
    for (const auto& o : r.outcomes)
        os << (o.pass ? "PASS " : "FAIL ") << o.directive << "\n     expected: " << o.expected
           << "\n     observed: " << o.observed << "\n";
    return os.str();
}

}  // namespace pqevot::cli
