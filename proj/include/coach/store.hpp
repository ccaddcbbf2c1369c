#pragma once

#include "coach/events.hpp"

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace coach {

/// Append-only, per-user event log on disk.
///
/// Layout under the data directory:
///   users/<user_id>.ndjson   one JSON event per line
///   index.ndjson             one {"user_id", "file", "created_at"} line per user
///
/// Appends for a user are serialized and fsync'd before returning. Event
/// timestamps are strictly increasing per user (at least 1 ms apart).
class EventStore {
public:
    explicit EventStore(std::filesystem::path data_dir, Clock clock = system_now);
    ~EventStore();

    EventStore(const EventStore&) = delete;
    EventStore& operator=(const EventStore&) = delete;

    /// Validates every payload, assigns consecutive seqs and writes the batch
    /// with a single write. Nothing is written if any payload is invalid.
    std::vector<EventRecord> append(const std::string& user_id, std::vector<PendingEvent> events);
    EventRecord append(const std::string& user_id, PendingEvent event);

    /// All complete events for the user in seq order; not_found if the log is empty or absent.
    std::vector<EventRecord> read(const std::string& user_id) const;

    bool exists(const std::string& user_id) const;

    /// Users listed in the index, in registration order.
    std::vector<std::string> users() const;

    const std::filesystem::path& data_dir() const noexcept { return dir_; }

    /// Parses a log file's content; a torn final line (no trailing newline) is ignored.
    static std::vector<EventRecord> parse_log(std::string_view content);

    static void check_user_id(const std::string& user_id);

private:
    struct UserLog;

    std::shared_ptr<UserLog> log_for(const std::string& user_id);
    std::filesystem::path log_path(const std::string& user_id) const;
    void add_to_index(const std::string& user_id, Timestamp at);

    std::filesystem::path dir_;
    Clock clock_;
    std::mutex map_mu_;
    std::unordered_map<std::string, std::shared_ptr<UserLog>> logs_;
    std::mutex index_mu_;
};

}  // namespace coach
