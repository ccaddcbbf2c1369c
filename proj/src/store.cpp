#include "coach/store.hpp"

#include "coach/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace coach {

namespace {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return {};
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_all(int fd, std::string_view data, const std::filesystem::path& path) {
    while (!data.empty()) {
        const ssize_t n = ::write(fd, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            fail(ErrorCode::storage, "write to " + path.string() + " failed: " + std::strerror(errno));
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
    if (::fsync(fd) != 0) fail(ErrorCode::storage, "fsync of " + path.string() + " failed: " + std::strerror(errno));
}

void append_durably(const std::filesystem::path& path, std::string_view data) {
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) fail(ErrorCode::storage, "cannot open " + path.string() + ": " + std::strerror(errno));
    try {
        write_all(fd, data, path);
    } catch (...) {
        ::close(fd);
        throw;
    }
    ::close(fd);
}

}  // namespace

struct EventStore::UserLog {
    std::mutex mu;
    bool loaded = false;
    std::uint64_t last_seq = 0;
    std::optional<Timestamp> last_at;
};

EventStore::EventStore(std::filesystem::path data_dir, Clock clock)
    : dir_(std::move(data_dir)), clock_(std::move(clock)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_ / "users", ec);
    if (ec) fail(ErrorCode::storage, "cannot create data directory " + dir_.string() + ": " + ec.message());
}

EventStore::~EventStore() = default;

void EventStore::check_user_id(const std::string& user_id) {
    if (user_id.empty() || user_id.size() > 64) fail(ErrorCode::validation, "invalid user id");
    for (char c : user_id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                        c == '_';
        if (!ok) fail(ErrorCode::validation, "invalid user id: " + user_id);
    }
}

std::filesystem::path EventStore::log_path(const std::string& user_id) const {
    return dir_ / "users" / (user_id + ".ndjson");
}

std::shared_ptr<EventStore::UserLog> EventStore::log_for(const std::string& user_id) {
    std::lock_guard lock(map_mu_);
    auto& slot = logs_[user_id];
    if (!slot) slot = std::make_shared<UserLog>();
    return slot;
}

std::vector<EventRecord> EventStore::parse_log(std::string_view content) {
    std::vector<EventRecord> events;
    std::size_t pos = 0;
    while (pos < content.size()) {
        const auto nl = content.find('\n', pos);
        if (nl == std::string_view::npos) break;  // torn tail
        const auto line = content.substr(pos, nl - pos);
        pos = nl + 1;
        if (line.empty()) continue;
        const Json parsed = Json::parse(line, nullptr, false);
        if (parsed.is_discarded()) fail(ErrorCode::storage, "corrupt event line in log");
        auto event = event_from_json(parsed);
        const std::uint64_t expected = events.empty() ? 1 : events.back().seq + 1;
        if (event.seq != expected) {
            fail(ErrorCode::storage, "event log seq gap: expected " + std::to_string(expected) + ", found " +
                                         std::to_string(event.seq));
        }
        events.push_back(std::move(event));
    }
    return events;
}

std::vector<EventRecord> EventStore::append(const std::string& user_id, std::vector<PendingEvent> events) {
    check_user_id(user_id);
    for (const auto& e : events) validate_payload(e.kind, e.payload);
    if (events.empty()) return {};

    auto log = log_for(user_id);
    std::lock_guard lock(log->mu);
    const auto path = log_path(user_id);

    if (!log->loaded) {
        std::string content = slurp(path);
        if (!content.empty() && content.back() != '\n') {
            const auto keep = content.rfind('\n');
            const auto new_size = keep == std::string::npos ? 0 : keep + 1;
            spdlog::warn("truncating torn tail of {} ({} bytes)", path.string(), content.size() - new_size);
            std::filesystem::resize_file(path, new_size);
            content.resize(new_size);
        }
        const auto existing = parse_log(content);
        if (!existing.empty()) {
            log->last_seq = existing.back().seq;
            log->last_at = existing.back().at;
        }
        log->loaded = true;
    }

    const bool first = log->last_seq == 0;
    std::vector<EventRecord> records;
    std::string batch;
    std::uint64_t seq = log->last_seq;
    auto last_at = log->last_at;
    for (auto& e : events) {
        Timestamp at = clock_();
        if (last_at && at <= *last_at) at = *last_at + std::chrono::milliseconds(1);
        EventRecord rec{++seq, at, e.kind, std::move(e.payload)};
        batch += to_json(rec).dump();
        batch += '\n';
        last_at = at;
        records.push_back(std::move(rec));
    }
    append_durably(path, batch);
    log->last_seq = seq;
    log->last_at = last_at;
    if (first) add_to_index(user_id, records.front().at);
    return records;
}

EventRecord EventStore::append(const std::string& user_id, PendingEvent event) {
    std::vector<PendingEvent> batch;
    batch.push_back(std::move(event));
    return std::move(append(user_id, std::move(batch)).front());
}

void EventStore::add_to_index(const std::string& user_id, Timestamp at) {
    Json line = Json::object();
    line["user_id"] = user_id;
    line["file"] = "users/" + user_id + ".ndjson";
    line["created_at"] = format_timestamp(at);
    std::lock_guard lock(index_mu_);
    append_durably(dir_ / "index.ndjson", line.dump() + "\n");
}

std::vector<EventRecord> EventStore::read(const std::string& user_id) const {
    check_user_id(user_id);
    auto events = parse_log(slurp(log_path(user_id)));
    if (events.empty()) fail(ErrorCode::not_found, "unknown user " + user_id);
    return events;
}

bool EventStore::exists(const std::string& user_id) const {
    std::error_code ec;
    return std::filesystem::file_size(log_path(user_id), ec) > 0 && !ec;
}

std::vector<std::string> EventStore::users() const {
    std::vector<std::string> ids;
    const std::string content = slurp(dir_ / "index.ndjson");
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        const Json parsed = Json::parse(line, nullptr, false);
        if (parsed.is_object() && parsed.contains("user_id") && parsed["user_id"].is_string()) {
            ids.push_back(parsed["user_id"].get<std::string>());
        }
    }
    // Logs written before a crash could record them in the index.
    std::vector<std::string> unindexed;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir_ / "users", ec)) {
        if (entry.path().extension() != ".ndjson") continue;
        auto id = entry.path().stem().string();
        if (std::find(ids.begin(), ids.end(), id) == ids.end() && exists(id)) unindexed.push_back(std::move(id));
    }
    std::sort(unindexed.begin(), unindexed.end());
    ids.insert(ids.end(), unindexed.begin(), unindexed.end());
    return ids;
}

}  // namespace coach
