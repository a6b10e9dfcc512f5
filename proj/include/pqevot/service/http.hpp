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

// HTTP front for browser clients. Bodies are the same canonical bytes as on
// the TCP wire, base64 inside a small JSON object:
//
//   POST /v1/message/{rc|po|vc|cc|board}  {"tag": 3, "body": "<base64>"}
//        -> {"tag": 49, "body": "<base64>"}  (+ "error" when tag is 0x7F)
//   GET  /v1/board?from=0&to=100
//   GET  /v1/params
//   POST /v1/demo/verify  {"role": "po", "message": "<b64>", "signature": "<b64>"}
//
// /v1/demo/verify checks an MQ signature on the server. It exists so a demo
// page need not port the field arithmetic; it means the page trusts this
// server for that check.

#include <openssl/evp.h>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "pqevot/protocol/board.hpp"
#include "pqevot/protocol/params.hpp"
#include "pqevot/service/endpoints.hpp"
#include "pqevot/service/tcp.hpp"

namespace pqevot::service {

using json = nlohmann::json;

inline std::string base64_encode(ByteView b) {
    std::string out(4 * ((b.size() + 2) / 3), '\0');
    auto n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), b.data(), static_cast<int>(b.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

inline std::optional<Bytes> base64_decode(std::string_view s) {
    if (s.size() % 4 != 0) return std::nullopt;
    Bytes out(3 * (s.size() / 4));
    auto n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(s.data()), static_cast<int>(s.size()));
    if (n < 0) return std::nullopt;
    // DecodeBlock counts padding as zero bytes.
    std::size_t pad = 0;
    if (!s.empty() && s.back() == '=') ++pad;
    if (s.size() > 1 && s[s.size() - 2] == '=') ++pad;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

inline json board_slice_json(const protocol::BoardSlice& slice) {
    json entries = json::array();
    for (const auto& e : slice.entries)
        entries.push_back({{"seq", e.seq},
                           {"kind", protocol::to_string(e.kind)},
                           {"payload", base64_encode(e.payload)},
                           {"prev_hash", hex(e.prev_hash)},
                           {"entry_hash", hex(e.entry_hash)}});
    return {{"head", slice.head}, {"entries", entries}};
}

struct GatewayConfig {
    std::string host = "127.0.0.1";
    int port = 0;
    std::map<std::string, Address> upstream;  // "rc", "po", "vc", "cc", "board"
};

class HttpGateway {
public:
    HttpGateway(GatewayConfig cfg, protocol::PublicParams pp) : cfg_(std::move(cfg)), pp_(std::move(pp)) {
        for (const auto& [name, addr] : cfg_.upstream) clients_.emplace(name, std::make_unique<TcpClient>(addr));
        routes();
        port_ = cfg_.port == 0 ? server_.bind_to_any_port(cfg_.host) : cfg_.port;
        if (port_ < 0 || (cfg_.port != 0 && !server_.bind_to_port(cfg_.host, cfg_.port)))
            throw WireError("http bind " + cfg_.host + ":" + std::to_string(cfg_.port) + " failed");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    HttpGateway(const HttpGateway&) = delete;
    HttpGateway& operator=(const HttpGateway&) = delete;

    ~HttpGateway() { stop(); }

    void stop() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    int port() const { return port_; }

private:
    static void reply(httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    static void fail(httplib::Response& res, int status, const std::string& msg) {
        reply(res, status, {{"error", {{"message", msg}}}});
    }

    TcpClient* upstream(const std::string& role) {
        auto it = clients_.find(role);
        return it == clients_.end() ? nullptr : it->second.get();
    }

    void routes() {
        server_.Get("/v1/params", [this](const httplib::Request&, httplib::Response& res) {
            const auto& m = pp_.manifest;
            reply(res, 200,
                  {{"pp", base64_encode(pp_.serialize())},
                   {"election_id", m.election_id},
                   {"candidates", m.candidates},
                   {"registration", {m.registration.start, m.registration.end}},
                   {"voting", {m.voting.start, m.voting.end}},
                   {"tally_start", m.tally_start}});
        });

        server_.Get("/v1/board", [this](const httplib::Request& req, httplib::Response& res) {
            auto* c = upstream("board");
            if (!c) return fail(res, 404, "no board configured");
            std::uint64_t from = 0, to = UINT64_MAX;
            try {
                if (req.has_param("from")) from = std::stoull(req.get_param_value("from"));
                if (req.has_param("to")) to = std::stoull(req.get_param_value("to"));
            } catch (const std::exception&) {
                return fail(res, 400, "from/to must be integers");
            }
            try {
                ByteWriter w;
                w.u64(from).u64(to);
                auto r = c->call(make(Tag::kBoardRead, w.take()));
                if (r.tag != Tag::kBoardSlice) return fail(res, 502, "board answered tag " + std::to_string(int(r.tag)));
                reply(res, 200, board_slice_json(protocol::BoardSlice::deserialize(r.body)));
            } catch (const std::exception& e) {
                fail(res, 502, e.what());
            }
        });

        server_.Post(R"(/v1/message/(\w+))", [this](const httplib::Request& req, httplib::Response& res) {
            auto role = req.matches[1].str();
            auto* c = upstream(role);
            if (!c) return fail(res, 404, "unknown role " + role);
            json in = json::parse(req.body, nullptr, false);
            if (in.is_discarded() || !in.is_object() || !in.contains("tag") || !in["tag"].is_number_unsigned() ||
                !in.contains("body") || !in["body"].is_string())
                return fail(res, 400, "expected {\"tag\": <int>, \"body\": <base64>}");
            auto tag = in["tag"].get<std::uint64_t>();
            if (tag > 0xFF || !is_known_tag(static_cast<std::uint8_t>(tag)))
                return fail(res, 400, "unknown message tag " + std::to_string(tag));
            if (Tag(tag) == Tag::kSetClock) return fail(res, 403, "clock control is not exposed over http");
            auto body = base64_decode(in["body"].get<std::string>());
            if (!body) return fail(res, 400, "body is not valid base64");
            try {
                auto r = c->call(make(Tag(tag), std::move(*body)));
                json out = {{"tag", static_cast<int>(r.tag)}, {"body", base64_encode(r.body)}};
                if (r.tag == Tag::kError) {
                    auto e = ErrorBody::deserialize(r.body);
                    out["error"] = {{"domain", static_cast<int>(e.domain)}, {"code", e.code}, {"message", e.message}};
                }
                reply(res, 200, out);
            } catch (const std::exception& e) {
                fail(res, 502, e.what());
            }
        });

        server_.Post("/v1/demo/verify", [this](const httplib::Request& req, httplib::Response& res) {
            json in = json::parse(req.body, nullptr, false);
            if (in.is_discarded() || !in.is_object()) return fail(res, 400, "expected a json object");
            static const std::map<std::string, protocol::Role> roles = {{"rc", protocol::Role::kRegCenter},
                                                                       {"po", protocol::Role::kPollOfficer},
                                                                       {"vc", protocol::Role::kVotCenter},
                                                                       {"cc", protocol::Role::kCountCenter}};
            auto role = in.value("role", std::string());
            auto it = roles.find(role);
            if (it == roles.end()) return fail(res, 400, "role must be rc, po, vc or cc");
            auto msg = base64_decode(in.value("message", std::string()));
            auto sig = base64_decode(in.value("signature", std::string()));
            if (!msg || !sig) return fail(res, 400, "message and signature must be base64");
            bool valid = false;
            try {
                valid = mqs::verify(*msg, mqs::Signature::deserialize(*sig), pp_.sig_key(it->second));
            } catch (const DecodeError&) {
                valid = false;
            }
            reply(res, 200, {{"valid", valid}, {"demo_offload", true}});
        });
    }

    GatewayConfig cfg_;
    protocol::PublicParams pp_;
    std::map<std::string, std::unique_ptr<TcpClient>> clients_;
    httplib::Server server_;
    int port_ = -1;
    std::thread thread_;
};

}  // namespace pqevot::service
