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

// Scenario files. One directive per line, '#' starts a comment.
//
//   election <id>
//   candidate <name>                  at least two
//   registration <start> <end>
//   voting <start> <end>
//   tally <start>
//   seed <u64>
//   pseudonym reference|tiny          tiny: 2^16 input space
//   voter <id> <candidate>|-          '-' registers but never votes
//   crowd <prefix> <cand>=<n> ...     voters <prefix>-1.. in the listed order
//   eligible <id>                     on the roll, scripts nothing
//
// Adversary directives:
//
//   replay_ticket <voter>             vote a second time with the same ticket
//   forge_ticket <candidate>          vote with a ticket RC never signed
//   outsider_vote <id> <candidate>    someone off the roll tries to register and vote
//   vc_withhold <voter>               VC acknowledges the ballot and never publishes it
//   cc_inflate <candidate> <delta>    CC adds delta to one published count
//   collude                           dump PO+VC+CC state and look for identities

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqevot/protocol/manifest.hpp"
#include "pqevot/protocol/params.hpp"

namespace pqevot::cli {

class ScenarioError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ScriptedVoter {
    std::string id;
    std::optional<std::string> candidate;  // nullopt: registers only
};

enum class DirectiveKind { kReplayTicket, kForgeTicket, kOutsiderVote, kVCWithhold, kCCInflate, kCollude };

inline const char* to_string(DirectiveKind k) {
    switch (k) {
        case DirectiveKind::kReplayTicket: return "replay_ticket";
        case DirectiveKind::kForgeTicket: return "forge_ticket";
        case DirectiveKind::kOutsiderVote: return "outsider_vote";
        case DirectiveKind::kVCWithhold: return "vc_withhold";
        case DirectiveKind::kCCInflate: return "cc_inflate";
        case DirectiveKind::kCollude: return "collude";
    }
    return "?";
}

struct Directive {
    DirectiveKind kind;
    std::string subject;    // voter id, outsider id or candidate
    std::string candidate;  // outsider_vote, forge_ticket, cc_inflate
    std::uint64_t delta = 0;

    std::string describe() const {
        std::string s = to_string(kind);
        if (!subject.empty()) s += " " + subject;
        if (!candidate.empty() && candidate != subject) s += " " + candidate;
        if (kind == DirectiveKind::kCCInflate) s += " +" + std::to_string(delta);
        return s;
    }
};

struct Scenario {
    std::string name;
    protocol::Manifest manifest;
    std::vector<ScriptedVoter> voters;
    std::vector<std::string> extra_eligible;
    std::vector<Directive> directives;
    std::uint64_t seed = 1;
    bool tiny_pseudonym = false;

    std::vector<std::string> roll() const {
        std::vector<std::string> r;
        for (const auto& v : voters) r.push_back(v.id);
        r.insert(r.end(), extra_eligible.begin(), extra_eligible.end());
        return r;
    }

    protocol::Profile profile() const {
        auto p = protocol::Profile::reference();
        if (tiny_pseudonym) p.pseudonym = protocol::PseudonymParams::tiny();
        return p;
    }

    bool has(DirectiveKind k) const {
        for (const auto& d : directives)
            if (d.kind == k) return true;
        return false;
    }

    const ScriptedVoter* voter(std::string_view id) const {
        for (const auto& v : voters)
            if (v.id == id) return &v;
        return nullptr;
    }

    void validate() const {
        try {
            manifest.validate();
        } catch (const protocol::ManifestError& e) {
            throw ScenarioError(e.what());
        }
        std::set<std::string> ids;
        for (const auto& v : voters) {
            if (!ids.insert(v.id).second) throw ScenarioError("duplicate voter " + v.id);
            if (v.candidate && !manifest.candidate_index(*v.candidate))
                throw ScenarioError("voter " + v.id + " votes for unknown candidate " + *v.candidate);
        }
        for (const auto& id : extra_eligible)
            if (!ids.insert(id).second) throw ScenarioError("duplicate voter " + id);
        auto need_candidate = [&](const Directive& d, const std::string& c) {
            if (!manifest.candidate_index(c)) throw ScenarioError(d.describe() + ": unknown candidate " + c);
        };
        std::set<std::string> withheld;
        for (const auto& d : directives) {
            switch (d.kind) {
                case DirectiveKind::kReplayTicket:
                case DirectiveKind::kVCWithhold: {
                    auto* v = voter(d.subject);
                    if (!v) throw ScenarioError(d.describe() + ": unknown voter " + d.subject);
                    if (!v->candidate) throw ScenarioError(d.describe() + ": voter " + d.subject + " does not vote");
                    if (d.kind == DirectiveKind::kVCWithhold && !withheld.insert(d.subject).second)
                        throw ScenarioError(d.describe() + ": listed twice");
                    break;
                }
                case DirectiveKind::kOutsiderVote:
                    if (ids.contains(d.subject)) throw ScenarioError(d.describe() + ": " + d.subject + " is on the roll");
                    need_candidate(d, d.candidate);
                    break;
                case DirectiveKind::kForgeTicket:
                case DirectiveKind::kCCInflate: need_candidate(d, d.candidate); break;
                case DirectiveKind::kCollude: break;
            }
        }
    }
};

inline Scenario parse_scenario(std::string_view text, std::string name = "scenario") {
    Scenario s;
    s.name = std::move(name);
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    bool have_reg = false, have_vote = false, have_tally = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        auto fail = [&](const std::string& what) {
            throw ScenarioError(s.name + " line " + std::to_string(lineno) + ": " + what);
        };
        auto word = [&](const char* what) {
            std::string w;
            if (!(ls >> w)) fail(std::string("missing ") + what);
            return w;
        };
        auto number = [&](const char* what) {
            std::int64_t v;
            if (!(ls >> v)) fail(std::string("missing or bad ") + what);
            return v;
        };
        auto& m = s.manifest;
        if (key == "election") {
            m.election_id = word("election id");
        } else if (key == "candidate") {
            m.candidates.push_back(word("candidate name"));
        } else if (key == "registration") {
            m.registration = {number("window start"), number("window end")};
            have_reg = true;
        } else if (key == "voting") {
            m.voting = {number("window start"), number("window end")};
            have_vote = true;
        } else if (key == "tally") {
            m.tally_start = number("tally start");
            have_tally = true;
        } else if (key == "seed") {
            auto v = number("seed");
            if (v < 0) fail("seed must be non-negative");
            s.seed = static_cast<std::uint64_t>(v);
        } else if (key == "pseudonym") {
            auto p = word("pseudonym profile");
            if (p == "tiny") s.tiny_pseudonym = true;
            else if (p == "reference") s.tiny_pseudonym = false;
            else fail("pseudonym profile must be reference or tiny");
        } else if (key == "voter") {
            ScriptedVoter v{word("voter id"), std::nullopt};
            auto c = word("candidate or '-'");
            if (c != "-") v.candidate = c;
            s.voters.push_back(std::move(v));
        } else if (key == "crowd") {
            auto prefix = word("crowd prefix");
            std::string spec;
            std::size_t next = 1;
            bool any = false;
            while (ls >> spec) {
                auto eq = spec.find('=');
                if (eq == std::string::npos) fail("crowd entries are <candidate>=<count>");
                std::size_t count = 0;
                try {
                    count = std::stoul(spec.substr(eq + 1));
                } catch (const std::exception&) {
                    fail("bad crowd count in " + spec);
                }
                for (std::size_t i = 0; i < count; ++i)
                    s.voters.push_back({prefix + "-" + std::to_string(next++), spec.substr(0, eq)});
                any = true;
            }
            if (!any) fail("crowd needs at least one <candidate>=<count>");
        } else if (key == "eligible") {
            s.extra_eligible.push_back(word("identity"));
        } else if (key == "replay_ticket") {
            s.directives.push_back({DirectiveKind::kReplayTicket, word("voter id"), "", 0});
        } else if (key == "forge_ticket") {
            auto c = word("candidate");
            s.directives.push_back({DirectiveKind::kForgeTicket, "", c, 0});
        } else if (key == "outsider_vote") {
            auto id = word("outsider id");
            auto c = word("candidate");
            s.directives.push_back({DirectiveKind::kOutsiderVote, id, c, 0});
        } else if (key == "vc_withhold") {
            s.directives.push_back({DirectiveKind::kVCWithhold, word("voter id"), "", 0});
        } else if (key == "cc_inflate") {
            auto c = word("candidate");
            auto d = number("delta");
            if (d <= 0) fail("delta must be positive");
            s.directives.push_back({DirectiveKind::kCCInflate, "", c, static_cast<std::uint64_t>(d)});
        } else if (key == "collude") {
            s.directives.push_back({DirectiveKind::kCollude, "", "", 0});
        } else {
            fail("unknown directive '" + key + "'");
        }
        std::string extra;
        if (ls >> extra) fail("trailing text '" + extra + "'");
    }
    if (!have_reg || !have_vote || !have_tally) throw ScenarioError(s.name + ": missing a time window");
    s.validate();
    return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.stem().string());
}

}  // namespace pqevot::cli
