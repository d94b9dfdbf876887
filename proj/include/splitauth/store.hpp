#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "splitauth/core.hpp"

namespace splitauth {

class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class StorePutResult {
    Stored,
    Unchanged, // identical share already present; idempotent
    Conflict,  // different share already present
};

/// One share per username per node.
class ShareStore {
public:
    virtual ~ShareStore() = default;

    virtual std::optional<DigestShare> get(const std::string& username) const = 0;
    virtual StorePutResult put(const std::string& username, const DigestShare& share) = 0;
    virtual void del(const std::string& username) = 0;

    /// Snapshot sorted by username.
    virtual std::vector<std::pair<std::string, DigestShare>> entries() const = 0;
};

class MemoryShareStore final : public ShareStore {
public:
    std::optional<DigestShare> get(const std::string& username) const override;
    StorePutResult put(const std::string& username, const DigestShare& share) override;
    void del(const std::string& username) override;
    std::vector<std::pair<std::string, DigestShare>> entries() const override;

private:
    std::map<std::string, DigestShare> map_;
};

/// Append-only JSON-lines file, one record per line:
///   {"username":...,"index":...,"total":...,"mode":...,"payload":<hex>}
///   {"op":"del","username":...}
/// Recovery replays the file in order; the last record per username wins.
/// A torn final line (crash mid-append) is ignored; corruption elsewhere is an
/// error. Every put/del is flushed and fsync'd before returning.
class FileShareStore final : public ShareStore {
public:
    explicit FileShareStore(const std::string& path);
    ~FileShareStore() override;

    FileShareStore(const FileShareStore&) = delete;
    FileShareStore& operator=(const FileShareStore&) = delete;

    std::optional<DigestShare> get(const std::string& username) const override;
    StorePutResult put(const std::string& username, const DigestShare& share) override;
    void del(const std::string& username) override;
    std::vector<std::pair<std::string, DigestShare>> entries() const override;

    const std::string& path() const { return path_; }

private:
    void append_line(const std::string& line);

    std::string path_;
    int fd_ = -1;
    mutable std::mutex mutex_;
    std::map<std::string, DigestShare> map_;
};

} // namespace splitauth
