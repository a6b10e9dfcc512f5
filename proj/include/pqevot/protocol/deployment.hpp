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

// A deployment is the set of endpoints a driver talks to. LocalDeployment
// wires all roles in one process around a shared board and manual clock; the
// service layer provides a remote one with the same shape.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "pqevot/drbg.hpp"
#include "pqevot/protocol/board.hpp"
#include "pqevot/protocol/meter.hpp"
#include "pqevot/protocol/params.hpp"
#include "pqevot/protocol/roles.hpp"

namespace pqevot::protocol {

/// Stable per-role randomness from one election seed.
inline Drbg role_rng(std::uint64_t seed, Role r) { return Drbg::from_seed(seed).derive(std::string("role:") + to_string(r)); }
inline Drbg voter_rng(std::uint64_t seed, std::string_view id) {
    return Drbg::from_seed(seed).derive("voter:" + std::string(id));
}
inline Drbg setup_rng(std::uint64_t seed) { return Drbg::from_seed(seed).derive("prepare"); }

struct Deployment {
    BoardAccess* board = nullptr;
    RegistrationEndpoint* rc = nullptr;
    PollingEndpoint* po = nullptr;
    CollectionControl* po_control = nullptr;
    BallotSink* vc = nullptr;
    PublicationControl* vc_control = nullptr;
    TallyControl* cc = nullptr;
    /// Moves every authority's clock.
    std::function<void(std::int64_t)> set_time;
};

class LocalDeployment {
public:
    LocalDeployment(const ElectionSetup& setup, std::vector<std::string> roll, std::uint64_t seed,
                    Meter* meter = nullptr)
        : rc_(setup.pp, setup.secret(Role::kRegCenter).sig, std::move(roll), board_, role_rng(seed, Role::kRegCenter),
              clock_.clock(), meter),
          po_(setup.pp, setup.secret(Role::kPollOfficer), role_rng(seed, Role::kPollOfficer), clock_.clock(), meter),
          vc_(setup.pp, setup.secret(Role::kVotCenter), board_, role_rng(seed, Role::kVotCenter), clock_.clock(),
              meter),
          cc_(setup.pp, setup.secret(Role::kCountCenter), board_, clock_.clock(), meter) {
        po_.connect(&vc_);
    }

    LocalDeployment(const LocalDeployment&) = delete;
    LocalDeployment& operator=(const LocalDeployment&) = delete;

    Deployment view() {
        return {&board_, &rc_, &po_, &po_, &vc_, &vc_, &cc_, [this](std::int64_t t) { clock_.set(t); }};
    }

    BulletinBoard& board() { return board_; }
    ManualClock& clock() { return clock_; }
    RegCenter& rc() { return rc_; }
    PollOfficer& po() { return po_; }
    VotCenter& vc() { return vc_; }
    CountCenter& cc() { return cc_; }

private:
    BulletinBoard board_;
    ManualClock clock_;
    RegCenter rc_;
    PollOfficer po_;
    VotCenter vc_;
    CountCenter cc_;
};

}  // namespace pqevot::protocol
