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

// The evote subcommands as plain functions returning exit codes, so tests can
// call them without a process.

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "pqevot/cli/report.hpp"
#include "pqevot/cli/runner.hpp"
#include "pqevot/protocol/audit.hpp"
#include "pqevot/service/store.hpp"

namespace pqevot::cli {

namespace fs = std::filesystem;

/// audit exit codes.
enum AuditExit : int { kAuditConsistent = 0, kAuditDiscrepancy = 1, kAuditNotYetPublic = 2, kAuditError = 3 };

inline Bytes read_binary(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_binary(const fs::path& p, ByteView b) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

inline std::vector<proto::BoardEntry> load_board(const fs::path& p) {
    std::vector<proto::BoardEntry> out;
    for (const auto& rec : service::read_log(p)) out.push_back(proto::BoardEntry::deserialize(rec));
    return out;
}

inline void export_board(const fs::path& p, const std::vector<proto::BoardEntry>& board) {
    std::vector<Bytes> recs;
    for (const auto& e : board) recs.push_back(e.serialize());
    service::write_log(p, recs);
}

inline int audit_command(const fs::path& board_path, const fs::path& pp_path, std::ostream& out, std::ostream& err) {
    std::vector<proto::BoardEntry> board;
    proto::PublicParams pp;
    try {
        pp = proto::PublicParams::deserialize(read_binary(pp_path));
        board = load_board(board_path);
    } catch (const std::exception& e) {
        err << "audit: " << e.what() << "\n";
        return kAuditError;
    }
    auto rep = proto::audit(board, pp);
    out << "board: " << board.size() << " entries\n";
    out << "verdict: " << proto::to_string(rep.verdict) << "\n";
    if (rep.seq) out << "first divergence at seq " << *rep.seq << "\n";
    if (!rep.detail.empty()) out << "detail: " << rep.detail << "\n";
    if (rep.recomputed) out << "recomputed tally:\n" << format_tally(*rep.recomputed);
    if (rep.published) out << "published tally:\n" << format_tally(*rep.published);
    switch (rep.verdict) {
        case proto::AuditVerdict::kConsistent: return kAuditConsistent;
        case proto::AuditVerdict::kDiscrepancy: return kAuditDiscrepancy;
        case proto::AuditVerdict::kNotYetPublic:
            out << "tally not yet public: no key disclosure on the board\n";
            return kAuditNotYetPublic;
    }
    return kAuditError;
}

/// Whether a run ended the way its scenario says it should: every directive
/// met its expectation, and unless CC was told to cheat, the published tally
/// is the scripted one and the audit agrees.
inline bool run_as_expected(const RunResult& r) {
    if (!r.directives_pass()) return false;
    if (r.scenario.has(DirectiveKind::kCCInflate)) return true;
    return r.tally_matches_script && r.audit.consistent();
}

}  // namespace pqevot::cli
