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

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pqevot {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Thrown when canonical bytes cannot be parsed back into an object.
class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline ByteView as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline Bytes to_bytes(std::string_view s) {
    auto v = as_bytes(s);
    return {v.begin(), v.end()};
}

inline std::string to_string(ByteView b) {
    return {reinterpret_cast<const char*>(b.data()), b.size()};
}

inline std::string hex(ByteView b) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(b.size() * 2);
    for (auto c : b) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0x0f]);
    }
    return out;
}

inline bool contains(ByteView haystack, ByteView needle) {
    if (needle.empty()) return true;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
           haystack.end();
}

/// Big-endian append-only encoder for canonical encodings.
class ByteWriter {
public:
    ByteWriter& u8(std::uint8_t v) {
        buf_.push_back(v);
        return *this;
    }

    ByteWriter& u32(std::uint32_t v) {
        for (int shift = 24; shift >= 0; shift -= 8) buf_.push_back(std::uint8_t(v >> shift));
        return *this;
    }

    ByteWriter& u64(std::uint64_t v) {
        for (int shift = 56; shift >= 0; shift -= 8) buf_.push_back(std::uint8_t(v >> shift));
        return *this;
    }

    ByteWriter& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }

    ByteWriter& raw(ByteView b) {
        buf_.insert(buf_.end(), b.begin(), b.end());
        return *this;
    }

    /// 4-byte BE length followed by the bytes.
    ByteWriter& bytes(ByteView b) {
        if (b.size() > 0xffffffffu) throw std::length_error("field too long for u32 prefix");
        u32(static_cast<std::uint32_t>(b.size()));
        return raw(b);
    }

    ByteWriter& str(std::string_view s) { return bytes(as_bytes(s)); }

    const Bytes& view() const { return buf_; }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

/// Bounds-checked cursor over canonical bytes. Every read past the end throws DecodeError.
class ByteReader {
public:
    explicit ByteReader(ByteView data) : data_(data) {}

    std::uint8_t u8() { return raw(1)[0]; }

    std::uint32_t u32() {
        auto b = raw(4);
        return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
               (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
    }

    std::uint64_t u64() {
        auto b = raw(8);
        std::uint64_t v = 0;
        for (auto c : b) v = (v << 8) | c;
        return v;
    }

    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }

    ByteView raw(std::size_t n) {
        if (n > remaining()) throw DecodeError("truncated input");
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    template <std::size_t N>
    std::array<std::uint8_t, N> array() {
        std::array<std::uint8_t, N> out{};
        auto b = raw(N);
        std::copy(b.begin(), b.end(), out.begin());
        return out;
    }

    Bytes bytes() {
        auto n = u32();
        auto b = raw(n);
        return {b.begin(), b.end()};
    }

    std::string str() {
        auto n = u32();
        return to_string(raw(n));
    }

    std::size_t remaining() const { return data_.size() - pos_; }
    std::size_t position() const { return pos_; }
    bool done() const { return remaining() == 0; }

    void expect_end() const {
        if (!done()) throw DecodeError("trailing bytes after object");
    }

private:
    ByteView data_;
    std::size_t pos_ = 0;
};

}  // namespace pqevot
