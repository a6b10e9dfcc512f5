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

// SHA3-256 and SHAKE-256 over OpenSSL's EVP interface. Every digest in the
// project goes through here; callers prepend a domain tag so digests from
// different purposes never share an input space.

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string_view>

#include "pqevot/bytes.hpp"

namespace pqevot {

using Digest = std::array<std::uint8_t, 32>;

namespace detail {

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

}  // namespace detail

class HashError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Incremental Keccak-family hasher. Absorb with update(), finish once.
class Hasher {
public:
    static Hasher sha3_256() { return Hasher(EVP_sha3_256()); }
    static Hasher shake256() { return Hasher(EVP_shake256()); }

    Hasher& update(ByteView data) {
        if (EVP_DigestUpdate(ctx_.get(), data.data(), data.size()) != 1)
            throw HashError("EVP_DigestUpdate failed");
        return *this;
    }

    Hasher& update(std::string_view s) { return update(as_bytes(s)); }

    Hasher& update_u32(std::uint32_t v) {
        std::uint8_t b[4] = {std::uint8_t(v >> 24), std::uint8_t(v >> 16), std::uint8_t(v >> 8),
                             std::uint8_t(v)};
        return update(ByteView(b, 4));
    }

    Hasher& update_u64(std::uint64_t v) {
        std::uint8_t b[8];
        for (int i = 0; i < 8; ++i) b[i] = std::uint8_t(v >> (56 - 8 * i));
        return update(ByteView(b, 8));
    }

    Digest digest() {
        Digest out{};
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), out.data(), &len) != 1 || len != out.size())
            throw HashError("EVP_DigestFinal_ex failed");
        return out;
    }

    Bytes squeeze(std::size_t n) {
        Bytes out(n);
        if (n == 0) return out;
        if (EVP_DigestFinalXOF(ctx_.get(), out.data(), out.size()) != 1)
            throw HashError("EVP_DigestFinalXOF failed");
        return out;
    }

private:
    explicit Hasher(const EVP_MD* md) : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), md, nullptr) != 1)
            throw HashError("EVP_DigestInit_ex failed");
    }

    std::unique_ptr<EVP_MD_CTX, detail::MdCtxDeleter> ctx_;
};

inline Digest sha3_256(std::string_view tag, ByteView data) {
    return Hasher::sha3_256().update(tag).update(data).digest();
}

inline Bytes shake256(std::string_view tag, ByteView data, std::size_t out_len) {
    return Hasher::shake256().update(tag).update(data).squeeze(out_len);
}

}  // namespace pqevot
