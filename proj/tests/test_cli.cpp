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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pqevot/cli/commands.hpp"
#include "pqevot/cli/report.hpp"
#include "pqevot/cli/runner.hpp"

namespace {

using namespace pqevot;
using namespace pqevot::cli;
namespace proto = pqevot::protocol;
namespace fs = std::filesystem;

const fs::path kSource = PQEVOT_SOURCE_DIR;

Scenario fixture(const std::string& name) { return load_scenario(kSource / "scenarios" / (name + ".scn")); }

const char* kHeader = R"(
election t
candidate a
candidate b
registration 100 200
voting 200 300
tally 400
)";

Scenario parse(const std::string& body) { return parse_scenario(std::string(kHeader) + body, "t"); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Golden files open with a '#' license block.
std::string golden(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::string line, out;
    bool head = true;
    while (std::getline(in, line)) {
        if (head && (line.empty() || line[0] == '#')) continue;
        head = false;
        out += line + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------

TEST(ScenarioFile, CrowdExpandsInOrder) {
    auto s = parse("crowd x a=2 b=1\nvoter y -\n");
    ASSERT_EQ(s.voters.size(), 4u);
    EXPECT_EQ(s.voters[0].id, "x-1");
    EXPECT_EQ(s.voters[2].id, "x-3");
    EXPECT_EQ(*s.voters[2].candidate, "b");
    EXPECT_FALSE(s.voters[3].candidate);
    EXPECT_EQ(s.roll().size(), 4u);
}

TEST(ScenarioFile, DirectivesMustReferToScriptedThings) {
    EXPECT_THROW(parse("voter v a\nreplay_ticket w\n"), ScenarioError);
    EXPECT_THROW(parse("voter v -\nreplay_ticket v\n"), ScenarioError);
    EXPECT_THROW(parse("voter v a\ncc_inflate c 2\n"), ScenarioError);
    EXPECT_THROW(parse("voter v a\ncc_inflate a 0\n"), ScenarioError);
    EXPECT_THROW(parse("voter v a\noutsider_vote v a\n"), ScenarioError);
    EXPECT_THROW(parse("voter v z\n"), ScenarioError);
    EXPECT_THROW(parse("voter v a\nvoter v b\n"), ScenarioError);
    EXPECT_THROW(parse("voter v a\nvc_withhold v\nvc_withhold v\n"), ScenarioError);
    EXPECT_THROW(parse("teleport v\n"), ScenarioError);
    EXPECT_THROW(parse("voter v a extra\n"), ScenarioError);
    EXPECT_THROW(parse_scenario("election t\ncandidate a\ncandidate b\n"), ScenarioError);
    EXPECT_NO_THROW(parse("voter v a\nreplay_ticket v\nvc_withhold v\ncc_inflate b 1\ncollude\nforge_ticket a\n"));
}

// ---------------------------------------------------------------------------

TEST(Run, HonestThreeCandidatesMatchesHistogram) {
    auto r = run_scenario(fixture("honest-l3"));
    ASSERT_TRUE(r.tally);
    EXPECT_EQ(r.tally->counts, (std::vector<std::pair<std::string, std::uint64_t>>{{"oak", 4}, {"elm", 3}, {"ash", 3}}));
    EXPECT_TRUE(r.tally_matches_script);
    EXPECT_TRUE(r.audit.consistent());
    EXPECT_TRUE(run_as_expected(r));
}

TEST(Run, SameSeedSameBoardAndReports) {
    auto a = run_scenario(fixture("honest-10"));
    auto b = run_scenario(fixture("honest-10"));
    EXPECT_EQ(a.board, b.board);
    EXPECT_EQ(format_costs(a), format_costs(b));
    EXPECT_EQ(format_sizes(a), format_sizes(b));
    auto s = fixture("honest-10");
    s.seed += 1;
    auto c = run_scenario(s);
    EXPECT_NE(a.board, c.board);
}

TEST(Run, ParallelVotersStillCountEveryone) {
    RunOptions opt;
    opt.parallel_voters = true;
    auto r = run_scenario(fixture("honest-50"), opt);
    EXPECT_TRUE(r.tally_matches_script);
    EXPECT_TRUE(r.audit.consistent());
    EXPECT_TRUE(costs_match(r));
}

TEST(Run, ReplayRejectedAndCountedOnce) {
    auto r = run_scenario(fixture("replay-ticket"));
    ASSERT_EQ(r.outcomes.size(), 1u);
    EXPECT_TRUE(r.outcomes[0].pass) << r.outcomes[0].observed;
    EXPECT_EQ(r.tally->total_valid, 3u);
    EXPECT_TRUE(run_as_expected(r));
    // The rejected attempt's costs are kept out of the honest counts.
    EXPECT_TRUE(costs_match(r));
    EXPECT_EQ(r.adversary[static_cast<std::size_t>(proto::Phase::kVoting)][proto::Op::kDec], 1u);
}

TEST(Run, OutsiderAndForgerRejected) {
    auto r = run_scenario(fixture("outsider"));
    ASSERT_EQ(r.outcomes.size(), 2u);
    for (const auto& o : r.outcomes) EXPECT_TRUE(o.pass) << o.directive << ": " << o.observed;
    EXPECT_EQ(r.tally->total_valid, 2u);
    EXPECT_TRUE(costs_match(r));
}

TEST(Run, WithheldBallotShowsMissingWithVerifyingReceipt) {
    auto r = run_scenario(fixture("vc-withhold"));
    ASSERT_EQ(r.outcomes.size(), 1u);
    EXPECT_TRUE(r.outcomes[0].pass) << r.outcomes[0].observed;
    for (const auto& v : r.voters)
        EXPECT_EQ(v.board_check, v.id == "resident-boris" ? proto::BoardCheck::kMissing : proto::BoardCheck::kFound);
    EXPECT_EQ(r.volumes.collected, 3u);
    EXPECT_EQ(r.volumes.verified, 2u);
    EXPECT_TRUE(costs_match(r));
}

TEST(Run, InflationCaughtAtFinalTally) {
    auto r = run_scenario(fixture("cc-inflate"));
    ASSERT_EQ(r.outcomes.size(), 1u);
    EXPECT_TRUE(r.outcomes[0].pass) << r.outcomes[0].observed;
    EXPECT_FALSE(r.tally_matches_script);
    EXPECT_EQ(r.tally->count("left"), 3u);
    ASSERT_TRUE(r.audit.recomputed);
    EXPECT_EQ(r.audit.recomputed->count("left"), 1u);
}

TEST(Run, CollusionDumpsCarryNoIdentities) {
    for (const auto* name : {"collude", "collude-reference"}) {
        auto r = run_scenario(fixture(name));
        ASSERT_EQ(r.outcomes.size(), 1u);
        EXPECT_TRUE(r.outcomes[0].pass) << name << ": " << r.outcomes[0].observed;
    }
}

TEST(Run, IdentityScanFindsPlantedBytes) {
    auto r = run_scenario(fixture("collude-reference"));
    Bytes dump = to_bytes("....resident-3....");
    auto f = scan_for_identities(dump, r.scenario.roll(), r.setup.pp);
    EXPECT_EQ(f.ids_found, 1u);
    auto enc = proto::encode_identity("resident-7", r.setup.pp.pseudonym.id_elems).raw_bytes();
    f = scan_for_identities(enc, r.scenario.roll(), r.setup.pp);
    EXPECT_TRUE(f.encoded_scanned);
    EXPECT_EQ(f.encoded_ids_found, 1u);
}

// ---------------------------------------------------------------------------

class CostTable : public ::testing::TestWithParam<const char*> {};

TEST_P(CostTable, MeasuredEqualsPredictedForEveryPhase) {
    auto r = run_scenario(fixture(GetParam()));
    for (const auto& row : cost_rows(r))
        EXPECT_EQ(row.predicted(), row.measured) << GetParam() << " " << proto::to_string(row.phase);
}

INSTANTIATE_TEST_SUITE_P(Fixtures, CostTable, ::testing::Values("honest-10", "honest-50", "honest-200"));

TEST(CostTable, VotingRowForTwoCandidates) {
    auto r = run_scenario(fixture("honest-10"));
    auto rows = cost_rows(r);
    auto voting = rows[2];
    ASSERT_EQ(voting.phase, proto::Phase::kVoting);
    using proto::Op;
    auto want = proto::OpCounts::of({{Op::kEnc, 3}, {Op::kSign, 3}, {Op::kVer, 3}, {Op::kDec, 1}});
    EXPECT_EQ(voting.unit, want);
}

TEST(SizeTable, MatchesGoldenFile) {
    auto r = run_scenario(fixture("honest-10"));
    auto got = format_sizes(r);
    auto want = golden(kSource / "tests" / "golden" / "sizes-honest-10.txt");
    EXPECT_EQ(got, want) << "regenerate with: evote report scenarios/honest-10.scn --table 2, keeping the license block";
}

TEST(SizeTable, CompositionsAddUp) {
    auto r = run_scenario(fixture("honest-l3"));
    auto p = size_primitives(r);
    EXPECT_EQ(p.s, r.samples.receipt->serialize().size());
    EXPECT_EQ(r.samples.ticket->serialize().size(), r.samples.ticket->pseudonym.serialize().size() + p.s);
    EXPECT_EQ(r.samples.vote->serialize().size(), p.s + p.commit + p.opening);
    auto plain = proto::CastBallot{*r.samples.ticket, *r.samples.ballot}.serialize().size();
    EXPECT_EQ(r.samples.encrypted_vote->serialize().size(), p.e_overhead + plain);
    for (const auto& row : size_rows(r)) EXPECT_GT(row.measured, 0u) << row.item;
}

// ---------------------------------------------------------------------------

class AuditCommand : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("pqevot-cli-" + std::to_string(::getpid()));
        fs::create_directories(dir_);
        run_ = std::make_unique<RunResult>(run_scenario(fixture("honest-l3")));
        write_binary(dir_ / "pp.bin", run_->setup.pp.serialize());
    }
    void TearDown() override { fs::remove_all(dir_); }

    int audit_board(const std::vector<proto::BoardEntry>& board, std::string* text = nullptr) {
        export_board(dir_ / "board.log", board);
        std::ostringstream out, err;
        auto code = audit_command(dir_ / "board.log", dir_ / "pp.bin", out, err);
        if (text) *text = out.str() + err.str();
        return code;
    }

    fs::path dir_;
    std::unique_ptr<RunResult> run_;
};

TEST_F(AuditCommand, HonestBoardExitsZero) { EXPECT_EQ(audit_board(run_->board), kAuditConsistent); }

TEST_F(AuditCommand, MissingTallyMarkExitsNonZeroWithDivergence) {
    auto board = run_->board;
    auto it = std::find_if(board.begin(), board.end(), [](const auto& e) { return e.kind == proto::EntryKind::kTallyMark; });
    ASSERT_NE(it, board.end());
    auto seq = it->seq;
    board.erase(it);
    proto::rechain(board);
    std::string text;
    EXPECT_EQ(audit_board(board, &text), kAuditDiscrepancy);
    EXPECT_NE(text.find("first divergence at seq " + std::to_string(seq)), std::string::npos) << text;
}

TEST_F(AuditCommand, BeforeDisclosureSaysNotYetPublic) {
    auto board = run_->board;
    while (!board.empty() && board.back().kind != proto::EntryKind::kBallot) board.pop_back();
    std::string text;
    EXPECT_EQ(audit_board(board, &text), kAuditNotYetPublic);
    EXPECT_NE(text.find("not yet public"), std::string::npos);
}

TEST_F(AuditCommand, UnreadableInputIsAnError) {
    std::ostringstream out, err;
    EXPECT_EQ(audit_command(dir_ / "absent.log", dir_ / "pp.bin", out, err), kAuditError);
    export_board(dir_ / "board.log", run_->board);
    auto raw = read_binary(dir_ / "board.log");
    raw[10] ^= 0xFF;
    write_binary(dir_ / "board.log", raw);
    EXPECT_EQ(audit_command(dir_ / "board.log", dir_ / "pp.bin", out, err), kAuditError);
}

}  // namespace
