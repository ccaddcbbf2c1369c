#pragma once

#include "coach/affect.hpp"
#include "coach/json_extract.hpp"
#include "coach/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace coach {

struct UserAccount {
    std::string user_id;
    std::string name;
    std::string major;
    Year year = Year::other;
    std::string coach_name;
    std::string coach_personality;
    bool speech_enabled = true;

    friend bool operator==(const UserAccount&, const UserAccount&) = default;
};

struct ConversationTurn {
    Role role;
    std::string text;  // as produced; coach turns keep the marker and any trailing JSON
    Timestamp at;
    std::optional<AffectReading> affect;  // student turns only

    friend bool operator==(const ConversationTurn&, const ConversationTurn&) = default;
};

struct Session {
    std::string session_id;
    std::string user_id;
    SessionKind kind = SessionKind::intro();
    std::vector<ConversationTurn> turns;
    Timestamp started_at;
    std::optional<Timestamp> ended_at;
    bool ended = false;

    friend bool operator==(const Session&, const Session&) = default;
};

inline constexpr std::string_view kUnknown = "unknown";

struct UserProfile {
    std::string user_id;
    Json raw;  // object exactly as returned by the model
    std::vector<std::string> interests;
    std::string academics;
    std::string routine;
    std::string goals;
    std::string motivations;
    std::vector<std::string> obstacles;
    std::string prior_tools;
    Timestamp extracted_at;

    friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

enum class LessonStatus { not_started, in_progress, mastered };

std::string_view to_string(LessonStatus s) noexcept;

struct LessonRecord {
    std::string user_id;
    LessonId lesson = LessonId::time_blocking;
    LessonStatus status = LessonStatus::not_started;
    std::optional<int> confidence;
    double elapsed_minutes = 0.0;
    std::optional<std::string> session_id;

    friend bool operator==(const LessonRecord&, const LessonRecord&) = default;
};

inline constexpr int kMinConfidence = 1;
inline constexpr int kMaxConfidence = 5;

inline constexpr std::string_view kTerminationMarker = "[Conversation End]";

/// Exact, case-sensitive substring test for the termination marker.
bool detect_termination(std::string_view coach_text) noexcept;

/// Text shown or spoken to the student: the marker and any JSON block after it are removed.
std::string display_text(std::string_view coach_text);

}  // namespace coach
