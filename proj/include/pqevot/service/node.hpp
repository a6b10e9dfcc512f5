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

// One role behind one TCP endpoint, with its store. Opening a node replays the
// store before the socket is bound, so the first request sees recovered state.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pqevot/protocol/deployment.hpp"
#include "pqevot/protocol/roles.hpp"
#include "pqevot/service/endpoints.hpp"
#include "pqevot/service/store.hpp"
#include "pqevot/service/tcp.hpp"

namespace pqevot::service {

enum class NodeRole { kBoard, kRegCenter, kPollOfficer, kVotCenter, kCountCenter };

inline const char* to_string(NodeRole r) {
    switch (r) {
        case NodeRole::kBoard: return "board";
        case NodeRole::kRegCenter: return "rc";
        case NodeRole::kPollOfficer: return "po";
        case NodeRole::kVotCenter: return "vc";
        case NodeRole::kCountCenter: return "cc";
    }
    return "?";
}

inline std::optional<NodeRole> parse_node_role(std::string_view s) {
    for (auto r : {NodeRole::kBoard, NodeRole::kRegCenter, NodeRole::kPollOfficer, NodeRole::kVotCenter,
                   NodeRole::kCountCenter})
        if (s == to_string(r)) return r;
    return std::nullopt;
}

inline protocol::Role authority_of(NodeRole r) {
    switch (r) {
        case NodeRole::kRegCenter: return protocol::Role::kRegCenter;
        case NodeRole::kPollOfficer: return protocol::Role::kPollOfficer;
        case NodeRole::kVotCenter: return protocol::Role::kVotCenter;
        case NodeRole::kCountCenter: return protocol::Role::kCountCenter;
        case NodeRole::kBoard: break;
    }
    throw std::invalid_argument("the board holds no keys");
}

struct NodeConfig {
    NodeRole role = NodeRole::kBoard;
    Address bind;
    std::filesystem::path store;  // empty: keep state in memory only
    std::uint64_t seed = 0;
    std::optional<Address> board;  // rc, vc, cc
    std::optional<Address> vc;     // po
    bool manual_clock = false;     // clock moved by SetClock frames; tests only
    std::int64_t start_time = 0;
};

class RoleNode {
public:
    /// pp and secrets are unused by the board node; roll only by rc.
    RoleNode(const NodeConfig& cfg, const protocol::PublicParams* pp, const protocol::RoleSecrets* secrets,
             std::vector<std::string> roll = {}, protocol::Meter* meter = nullptr)
        : cfg_(cfg), manual_(cfg.start_time) {
        if (cfg.role != NodeRole::kBoard && (!pp || !secrets))
            throw std::invalid_argument(std::string("role ") + to_string(cfg.role) + " needs keys");
        if (!cfg.store.empty()) log_ = std::make_unique<AppendLog>(cfg.store);
        protocol::Clock clock = cfg.manual_clock ? manual_.clock() : protocol::system_clock();
        auto need = [&](const std::optional<Address>& a, const char* what) -> const Address& {
            if (!a) throw std::invalid_argument(std::string(to_string(cfg.role)) + " node needs the " + what + " address");
            return *a;
        };
        auto* mc = cfg.manual_clock ? &manual_ : nullptr;

        switch (cfg.role) {
            case NodeRole::kBoard: {
                std::vector<protocol::BoardEntry> entries;
                if (log_)
                    for (const auto& rec : log_->recovered()) entries.push_back(protocol::BoardEntry::deserialize(rec));
                board_ = std::make_unique<protocol::BulletinBoard>(std::move(entries));
                if (log_) board_->set_persist([this](const protocol::BoardEntry& e) { log_->append(e.serialize()); });
                handler_ = board_handler(*board_);
                break;
            }
            case NodeRole::kRegCenter: {
                remote_board_ = std::make_unique<RemoteBoard>(need(cfg.board, "board"));
                rc_ = std::make_unique<protocol::RegCenter>(*pp, secrets->sig, std::move(roll), *remote_board_,
                                                            rng(protocol::Role::kRegCenter), clock, meter);
                replay_into(*rc_);
                handler_ = rc_handler(*rc_, mc);
                break;
            }
            case NodeRole::kPollOfficer: {
                remote_vc_ = std::make_unique<RemoteVotCenter>(need(cfg.vc, "vc"));
                po_ = std::make_unique<protocol::PollOfficer>(*pp, *secrets, rng(protocol::Role::kPollOfficer), clock,
                                                              meter);
                po_->connect(remote_vc_.get());
                replay_into(*po_);
                handler_ = po_handler(*po_, mc);
                break;
            }
            case NodeRole::kVotCenter: {
                remote_board_ = std::make_unique<RemoteBoard>(need(cfg.board, "board"));
                vc_ = std::make_unique<protocol::VotCenter>(*pp, *secrets, *remote_board_,
                                                            rng(protocol::Role::kVotCenter), clock, meter);
                replay_into(*vc_);
                handler_ = vc_handler(*vc_, mc);
                break;
            }
            case NodeRole::kCountCenter: {
                // CC keeps no state of its own; the board is its record.
                remote_board_ = std::make_unique<RemoteBoard>(need(cfg.board, "board"));
                cc_ = std::make_unique<protocol::CountCenter>(*pp, *secrets, *remote_board_, clock, meter);
                handler_ = cc_handler(*cc_, mc);
                break;
            }
        }
        server_ = std::make_unique<TcpServer>(cfg.bind, handler_);
    }

    RoleNode(const RoleNode&) = delete;
    RoleNode& operator=(const RoleNode&) = delete;

    ~RoleNode() { stop(); }

    void stop() {
        if (server_) server_->stop();
    }

    NodeRole role() const { return cfg_.role; }
    Address address() const { return {cfg_.bind.host == "0.0.0.0" ? "127.0.0.1" : cfg_.bind.host, server_->port()}; }
    std::size_t recovered_records() const { return log_ ? log_->recovered().size() : 0; }
    std::uint64_t truncated_bytes() const { return log_ ? log_->truncated_bytes() : 0; }

    // Direct access for scenario drivers that script misbehaviour.
    protocol::BulletinBoard* board() { return board_.get(); }
    protocol::RegCenter* rc() { return rc_.get(); }
    protocol::PollOfficer* po() { return po_.get(); }
    protocol::VotCenter* vc() { return vc_.get(); }
    protocol::CountCenter* cc() { return cc_.get(); }

private:
    // The first boot uses the same stream as an in-process run, so a fresh
    // deployment produces the same bytes. Later boots branch off by boot count
    // so signing randomness is never replayed after a crash.
    Drbg rng(protocol::Role r) {
        auto base = protocol::role_rng(cfg_.seed, r);
        if (!log_) return base;
        auto boots_path = log_->path();
        boots_path += ".boots";
        AppendLog boots(boots_path);
        auto n = boots.recovered().size();
        boots.append({});
        return n == 0 ? base : base.derive("boot:" + std::to_string(n));
    }

    template <class R>
    void replay_into(R& role) {
        if (!log_) return;
        for (const auto& rec : log_->recovered()) role.replay(rec);
        role.set_journal([this](ByteView b) { log_->append(b); });
    }

    NodeConfig cfg_;
    protocol::ManualClock manual_;
    std::unique_ptr<AppendLog> log_;
    std::unique_ptr<protocol::BulletinBoard> board_;
    std::unique_ptr<RemoteBoard> remote_board_;
    std::unique_ptr<RemoteVotCenter> remote_vc_;
    std::unique_ptr<protocol::RegCenter> rc_;
    std::unique_ptr<protocol::PollOfficer> po_;
    std::unique_ptr<protocol::VotCenter> vc_;
    std::unique_ptr<protocol::CountCenter> cc_;
    Handler handler_;
    std::unique_ptr<TcpServer> server_;
};

/// Client stubs for a full set of nodes, shaped like the in-process deployment.
class RemoteDeployment {
public:
    struct Addresses {
        Address board, rc, po, vc, cc;
    };

    explicit RemoteDeployment(const Addresses& a)
        : board_(a.board), rc_(a.rc), po_(a.po), vc_(a.vc), cc_(a.cc) {}

    protocol::Deployment view() {
        return {&board_, &rc_, &po_, &po_, &vc_, &vc_, &cc_, [this](std::int64_t t) { set_time(t); }};
    }

    void set_time(std::int64_t t) {
        for (auto* c : {&rc_.client(), &po_.client(), &vc_.client(), &cc_.client()}) set_remote_clock(*c, t);
    }

    RemoteBoard& board() { return board_; }

private:
    RemoteBoard board_;
    RemoteRegCenter rc_;
    RemotePollOfficer po_;
    RemoteVotCenter vc_;
    RemoteCountCenter cc_;
};

}  // namespace pqevot::service
