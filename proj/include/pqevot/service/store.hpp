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

// One append-only log file per role.
//
//   record := len (4 bytes BE) || bytes || SHA3-256("log-record-v1", bytes)
//
// A record is either fully present or treated as never written: a short tail
// left by a crash is cut off on open. A complete record whose digest does not
// match means the file was altered, and opening fails.

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqevot/bytes.hpp"
#include "pqevot/hash.hpp"

namespace pqevot::service {

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised on open when a complete record fails its digest.
class StoreCorrupt : public StoreError {
public:
    StoreCorrupt(std::size_t index, std::uint64_t offset)
        : StoreError("store corrupt: record " + std::to_string(index) + " at byte offset " + std::to_string(offset) +
                     " fails its digest"),
          index_(index),
          offset_(offset) {}

    std::size_t index() const { return index_; }
    std::uint64_t offset() const { return offset_; }

private:
    std::size_t index_;
    std::uint64_t offset_;
};

inline Digest record_digest(ByteView bytes) { return sha3_256("log-record-v1", bytes); }

inline Bytes encode_record(ByteView bytes) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(bytes.size())).raw(bytes).raw(record_digest(bytes));
    return w.take();
}

struct LogScan {
    std::vector<Bytes> records;
    std::uint64_t good_end = 0;  // offset just past the last intact record
};

/// Parse raw log bytes, stopping at a torn tail.
inline LogScan scan_log(ByteView data) {
    LogScan scan;
    ByteReader r(data);
    while (r.remaining() >= 4) {
        auto len = r.u32();
        if (r.remaining() < std::uint64_t(len) + 32) break;
        auto body = r.raw(len);
        auto stored = r.array<32>();
        if (record_digest(body) != stored) throw StoreCorrupt(scan.records.size(), scan.good_end);
        scan.records.emplace_back(body.begin(), body.end());
        scan.good_end = r.position();
    }
    return scan;
}

inline Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

class AppendLog {
public:
    /// Open (creating if absent) and recover every intact record.
    explicit AppendLog(std::filesystem::path path) : path_(std::move(path)) {
        if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
        auto data = read_file(path_);
        auto scan = scan_log(data);
        records_ = std::move(scan.records);
        auto off = scan.good_end;
        fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_CLOEXEC, 0644);
        if (fd_ < 0) throw StoreError("cannot open store " + path_.string() + ": " + std::strerror(errno));
        if (off < data.size()) {
            // Drop the torn tail so the next append starts on a record boundary.
            if (::ftruncate(fd_, static_cast<off_t>(off)) != 0) {
                ::close(fd_);
                throw StoreError("cannot truncate torn tail of " + path_.string());
            }
            truncated_ = data.size() - off;
        }
        if (::lseek(fd_, static_cast<off_t>(off), SEEK_SET) < 0) {
            ::close(fd_);
            throw StoreError("cannot seek in " + path_.string());
        }
    }

    AppendLog(const AppendLog&) = delete;
    AppendLog& operator=(const AppendLog&) = delete;

    ~AppendLog() {
        if (fd_ >= 0) ::close(fd_);
    }

    const std::vector<Bytes>& recovered() const { return records_; }
    std::uint64_t truncated_bytes() const { return truncated_; }
    const std::filesystem::path& path() const { return path_; }

    /// Durable once this returns.
    void append(ByteView bytes) {
        auto rec = encode_record(bytes);
        std::lock_guard lock(mu_);
        std::size_t done = 0;
        while (done < rec.size()) {
            auto n = ::write(fd_, rec.data() + done, rec.size() - done);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw StoreError("store write failed: " + std::string(std::strerror(errno)));
            }
            done += static_cast<std::size_t>(n);
        }
        if (::fdatasync(fd_) != 0) throw StoreError("store sync failed: " + std::string(std::strerror(errno)));
        ++appended_;
    }

    std::size_t appended() const { return appended_; }

private:
    std::filesystem::path path_;
    std::vector<Bytes> records_;
    std::uint64_t truncated_ = 0;
    int fd_ = -1;
    std::mutex mu_;
    std::size_t appended_ = 0;
};

/// Read every intact record of a log file without opening it for writing.
inline std::vector<Bytes> read_log(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw StoreError("no such store " + path.string());
    return scan_log(read_file(path)).records;
}

/// Write a complete log file from scratch, replacing any previous content.
inline void write_log(const std::filesystem::path& path, const std::vector<Bytes>& records) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw StoreError("cannot write " + path.string());
    for (const auto& r : records) {
        auto rec = encode_record(r);
        out.write(reinterpret_cast<const char*>(rec.data()), static_cast<std::streamsize>(rec.size()));
    }
    if (!out) throw StoreError("short write to " + path.string());
}

}  // namespace pqevot::service
