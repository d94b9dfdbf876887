#include "splitauth/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "splitauth/hex.hpp"

namespace splitauth {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string share_record(const std::string& username, const DigestShare& share) {
    ordered_json j;
    j["username"] = username;
    j["index"] = share.index;
    j["total"] = share.total;
    j["mode"] = split_mode_name(share.mode);
    j["payload"] = to_hex(share.payload);
    return j.dump();
}

std::string del_record(const std::string& username) {
    ordered_json j;
    j["op"] = "del";
    j["username"] = username;
    return j.dump();
}

/// Applies one record line to the map. Throws StoreError on a bad record.
void apply_record(std::map<std::string, DigestShare>& map, const std::string& line) {
    ordered_json j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw StoreError("store record is not a JSON object");
    }
    if (j.contains("op")) {
        if (j["op"] != "del" || !j.contains("username") || !j["username"].is_string()) {
            throw StoreError("bad del record");
        }
        map.erase(j["username"].get<std::string>());
        return;
    }
    try {
        DigestShare share;
        share.index = j.at("index").get<std::uint32_t>();
        share.total = j.at("total").get<std::uint32_t>();
        share.mode = parse_split_mode(j.at("mode").get<std::string>());
        share.payload = from_hex(j.at("payload").get<std::string>());
        map[j.at("username").get<std::string>()] = std::move(share);
    } catch (const std::exception& e) {
        throw StoreError(std::string("bad share record: ") + e.what());
    }
}

} // namespace

std::optional<DigestShare> MemoryShareStore::get(const std::string& username) const {
    auto it = map_.find(username);
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

StorePutResult MemoryShareStore::put(const std::string& username, const DigestShare& share) {
    auto it = map_.find(username);
    if (it != map_.end()) {
        return it->second == share ? StorePutResult::Unchanged : StorePutResult::Conflict;
    }
    map_.emplace(username, share);
    return StorePutResult::Stored;
}

void MemoryShareStore::del(const std::string& username) {
    map_.erase(username);
}

std::vector<std::pair<std::string, DigestShare>> MemoryShareStore::entries() const {
    return {map_.begin(), map_.end()};
}

FileShareStore::FileShareStore(const std::string& path) : path_(path) {
    // Recover the map before opening for append.
    std::ifstream in(path_);
    if (in.good()) {
        std::vector<std::string> lines;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) lines.push_back(line);
        }
        for (std::size_t i = 0; i < lines.size(); ++i) {
            try {
                apply_record(map_, lines[i]);
            } catch (const StoreError&) {
                if (i + 1 == lines.size()) {
                    break; // torn final line from a crash mid-append
                }
                throw;
            }
        }
    }

    fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0600);
    if (fd_ < 0) {
        throw StoreError("cannot open store file " + path_ + ": " + std::strerror(errno));
    }
}

FileShareStore::~FileShareStore() {
    if (fd_ >= 0) ::close(fd_);
}

void FileShareStore::append_line(const std::string& line) {
    std::string buf = line;
    buf.push_back('\n');
    std::size_t done = 0;
    while (done < buf.size()) {
        ssize_t n = ::write(fd_, buf.data() + done, buf.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw StoreError("store append failed: " + std::string(std::strerror(errno)));
        }
        done += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) {
        throw StoreError("store fsync failed: " + std::string(std::strerror(errno)));
    }
}

std::optional<DigestShare> FileShareStore::get(const std::string& username) const {
    std::lock_guard lock(mutex_);
    auto it = map_.find(username);
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

StorePutResult FileShareStore::put(const std::string& username, const DigestShare& share) {
    std::lock_guard lock(mutex_);
    auto it = map_.find(username);
    if (it != map_.end()) {
        return it->second == share ? StorePutResult::Unchanged : StorePutResult::Conflict;
    }
    append_line(share_record(username, share)); // durable before ack
    map_.emplace(username, share);
    return StorePutResult::Stored;
}

void FileShareStore::del(const std::string& username) {
    std::lock_guard lock(mutex_);
    if (map_.erase(username) > 0) {
        append_line(del_record(username));
    }
}

std::vector<std::pair<std::string, DigestShare>> FileShareStore::entries() const {
    std::lock_guard lock(mutex_);
    return {map_.begin(), map_.end()};
}

} // namespace splitauth
