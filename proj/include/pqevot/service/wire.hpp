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

// Wire frames: version (1) || tag (1) || body length (4, BE) || body.
// Tag values are frozen; see docs/protocol.md.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "pqevot/bytes.hpp"

namespace pqevot::service {

inline constexpr std::uint8_t kWireVersion = 0x01;
inline constexpr std::uint32_t kMaxBody = 16u << 20;

/// Every tag a service will accept or send. 0x01..0x0C are the protocol
/// messages; the rest are service plumbing.
enum class Tag : std::uint8_t {
    kRegisterRequest = 0x01,
    kTicketIssued = 0x02,
    kTicketSubmission = 0x03,
    kCommitmentSubmission = 0x04,
    kObliviousBundle = 0x05,
    kBallotSubmission = 0x06,
    kPollReceipt = 0x07,
    kForwardBallot = 0x08,
    kCenterReceipt = 0x09,
    kTallyMark = 0x0A,
    kFinalTally = 0x0B,
    kCCKeyDisclosure = 0x0C,

    kBoardAppend = 0x20,
    kBoardAppended = 0x21,
    kBoardRead = 0x22,
    kBoardSlice = 0x23,
    kSessionOpened = 0x31,
    kForwardBatch = 0x40,
    kPublishPending = 0x41,
    kRunTally = 0x42,
    kReceiptList = 0x43,
    kPublishOutcomes = 0x44,
    kSetClock = 0x50,
    kAck = 0x51,
    kError = 0x7F,
};

inline bool is_known_tag(std::uint8_t t) {
    switch (Tag(t)) {
        case Tag::kRegisterRequest:
        case Tag::kTicketIssued:
        case Tag::kTicketSubmission:
        case Tag::kCommitmentSubmission:
        case Tag::kObliviousBundle:
        case Tag::kBallotSubmission:
        case Tag::kPollReceipt:
        case Tag::kForwardBallot:
        case Tag::kCenterReceipt:
        case Tag::kTallyMark:
        case Tag::kFinalTally:
        case Tag::kCCKeyDisclosure:
        case Tag::kBoardAppend:
        case Tag::kBoardAppended:
        case Tag::kBoardRead:
        case Tag::kBoardSlice:
        case Tag::kSessionOpened:
        case Tag::kForwardBatch:
        case Tag::kPublishPending:
        case Tag::kRunTally:
        case Tag::kReceiptList:
        case Tag::kPublishOutcomes:
        case Tag::kSetClock:
        case Tag::kAck:
        case Tag::kError: return true;
    }
    return false;
}

class WireError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct WireEnvelope {
    std::uint8_t version = kWireVersion;
    Tag tag = Tag::kError;
    Bytes body;

    Bytes encode() const {
        ByteWriter w;
        w.u8(version).u8(static_cast<std::uint8_t>(tag)).bytes(body);
        return w.take();
    }

    /// Checks version and tag before the body is looked at.
    static WireEnvelope decode(ByteView frame) {
        if (frame.size() < 6) throw WireError("frame too short");
        if (frame[0] != kWireVersion) throw WireError("unsupported wire version " + std::to_string(frame[0]));
        if (!is_known_tag(frame[1])) throw WireError("unknown message tag " + std::to_string(frame[1]));
        ByteReader r(frame.subspan(2));
        WireEnvelope e;
        e.tag = Tag(frame[1]);
        e.body = r.bytes();
        r.expect_end();
        return e;
    }
};

inline WireEnvelope make(Tag tag, Bytes body = {}) { return {kWireVersion, tag, std::move(body)}; }

/// Which error family a kError frame carries; code is that family's enum value.
enum class ErrorDomain : std::uint8_t {
    kWire = 0,
    kRegistration = 1,
    kVoting = 2,
    kVotCenter = 3,
    kTally = 4,
    kInternal = 5,
};

struct ErrorBody {
    ErrorDomain domain = ErrorDomain::kWire;
    std::uint8_t code = 0;
    std::string message;

    Bytes serialize() const {
        ByteWriter w;
        w.u8(static_cast<std::uint8_t>(domain)).u8(code).str(message);
        return w.take();
    }
    static ErrorBody deserialize(ByteView bytes) {
        ByteReader r(bytes);
        ErrorBody e;
        auto d = r.u8();
        if (d > 5) throw DecodeError("error frame: unknown domain");
        e.domain = ErrorDomain(d);
        e.code = r.u8();
        e.message = r.str();
        r.expect_end();
        return e;
    }
};

inline WireEnvelope error_frame(ErrorDomain domain, std::uint8_t code, std::string message) {
    return make(Tag::kError, ErrorBody{domain, code, std::move(message)}.serialize());
}

/// A remote peer answered with an error outside the protocol outcomes the
/// caller knows how to branch on.
class RemoteError : public std::runtime_error {
public:
    explicit RemoteError(ErrorBody e)
        : std::runtime_error("remote error (domain " + std::to_string(int(e.domain)) + ", code " +
                             std::to_string(e.code) + "): " + e.message),
          body_(std::move(e)) {}
    const ErrorBody& body() const { return body_; }

private:
    ErrorBody body_;
};

}  // namespace pqevot::service
