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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqevot/bytes.hpp"

namespace pqevot::protocol {

class ManifestError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Half-open time interval [start, end) in seconds.
struct Window {
    std::int64_t start = 0;
    std::int64_t end = 0;

    bool contains(std::int64_t t) const { return start <= t && t < end; }
    friend bool operator==(const Window&, const Window&) = default;
};

/// Public description of one election. Carried inside the public parameters.
struct Manifest {
    std::string election_id;
    std::vector<std::string> candidates;
    Window registration;
    Window voting;
    std::int64_t tally_start = 0;

    friend bool operator==(const Manifest&, const Manifest&) = default;

    std::optional<std::size_t> candidate_index(std::string_view name) const {
        for (std::size_t i = 0; i < candidates.size(); ++i)
            if (candidates[i] == name) return i;
        return std::nullopt;
    }

    void validate() const {
        if (election_id.empty()) throw ManifestError("manifest: empty election id");
        if (candidates.size() < 2) throw ManifestError("manifest: need at least two candidates");
        std::set<std::string> unique;
        for (const auto& c : candidates) {
            if (c.empty()) throw ManifestError("manifest: empty candidate name");
            if (!unique.insert(c).second) throw ManifestError("manifest: duplicate candidate " + c);
        }
        if (!(registration.start < registration.end && registration.end <= voting.start &&
              voting.start < voting.end && voting.end <= tally_start))
            throw ManifestError("manifest: windows must be strictly ordered");
    }

    void serialize(ByteWriter& w) const {
        w.str(election_id);
        w.u32(static_cast<std::uint32_t>(candidates.size()));
        for (const auto& c : candidates) w.str(c);
        w.i64(registration.start).i64(registration.end);
        w.i64(voting.start).i64(voting.end);
        w.i64(tally_start);
    }

    static Manifest deserialize(ByteReader& r) {
        Manifest m;
        m.election_id = r.str();
        auto count = r.u32();
        if (count > 4096) throw DecodeError("manifest: too many candidates");
        for (std::uint32_t i = 0; i < count; ++i) m.candidates.push_back(r.str());
        m.registration = {r.i64(), r.i64()};
        m.voting = {r.i64(), r.i64()};
        m.tally_start = r.i64();
        return m;
    }
};

/// A manifest file: the public manifest plus the registration roll it references.
struct ManifestFile {
    Manifest manifest;
    std::vector<std::string> roll;
};

/// Line-oriented manifest text. Blank lines and '#' comments are ignored.
///
///   election <id>
///   candidate <name>
///   registration <start> <end>
///   voting <start> <end>
///   tally <start>
///   eligible <identity>
///   roll <path>            one identity per line, relative to the manifest
inline ManifestFile parse_manifest(std::string_view text, const std::filesystem::path& base_dir = {}) {
    ManifestFile out;
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
            throw ManifestError("manifest line " + std::to_string(lineno) + ": " + what);
        };
        if (key == "election") {
            if (!(ls >> out.manifest.election_id)) fail("missing election id");
        } else if (key == "candidate") {
            std::string name;
            if (!(ls >> name)) fail("missing candidate name");
            out.manifest.candidates.push_back(name);
        } else if (key == "registration") {
            if (!(ls >> out.manifest.registration.start >> out.manifest.registration.end)) fail("bad window");
            have_reg = true;
        } else if (key == "voting") {
            if (!(ls >> out.manifest.voting.start >> out.manifest.voting.end)) fail("bad window");
            have_vote = true;
        } else if (key == "tally") {
            if (!(ls >> out.manifest.tally_start)) fail("bad tally start");
            have_tally = true;
        } else if (key == "eligible") {
            std::string id;
            if (!(ls >> id)) fail("missing identity");
            out.roll.push_back(id);
        } else if (key == "roll") {
            std::string rel;
            if (!(ls >> rel)) fail("missing roll path");
            std::ifstream roll_file(base_dir / rel);
            if (!roll_file) fail("cannot open roll file " + rel);
            std::string id;
            while (roll_file >> id) out.roll.push_back(id);
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    if (!have_reg || !have_vote || !have_tally) throw ManifestError("manifest: missing a time window");
    out.manifest.validate();
    return out;
}

inline ManifestFile load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot open manifest " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str(), path.parent_path());
}

}  // namespace pqevot::protocol
