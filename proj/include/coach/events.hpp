#pragma once

#include "coach/json_extract.hpp"
#include "coach/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace coach {

enum class EventKind {
    user_registered,
    session_started,
    coach_turn,
    student_turn,
    session_ended,
    confidence_submitted,
    profile_extracted,
    mood_computed,
    insights_added,
    order_recommended,
    speech_toggled,
};

std::string_view to_string(EventKind kind) noexcept;
std::optional<EventKind> event_kind_from_string(std::string_view name) noexcept;

struct PendingEvent {
    EventKind kind;
    Json payload;
};

struct EventRecord {
    std::uint64_t seq = 0;
    Timestamp at;
    EventKind kind = EventKind::user_registered;
    Json payload;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

/// Throws a validation error naming the first schema violation for the kind.
void validate_payload(EventKind kind, const Json& payload);

/// One log line: {"seq", "at", "kind", "payload"} in that order.
Json to_json(const EventRecord& event);
EventRecord event_from_json(const Json& line);

}  // namespace coach
