#pragma once

#include <array>
#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace coach {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Clock = std::function<Timestamp()>;

Timestamp system_now();

/// RFC 3339 UTC with millisecond precision, e.g. "2026-03-01T09:00:00.000Z".
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(std::string_view text);

double minutes_between(Timestamp from, Timestamp to);

enum class LessonId {
    time_blocking,
    time_tracking,
    task_breakdown,
    eisenhower_matrix,
    abcde_method,
    eat_that_frog,
};

inline constexpr std::array<LessonId, 6> kAllLessons{
    LessonId::time_blocking,     LessonId::time_tracking, LessonId::task_breakdown,
    LessonId::eisenhower_matrix, LessonId::abcde_method,  LessonId::eat_that_frog,
};

/// Fallback plan order when the model's recommendation cannot be used.
inline constexpr std::array<LessonId, 6> kDefaultLessonOrder{
    LessonId::task_breakdown,    LessonId::time_blocking, LessonId::time_tracking,
    LessonId::eisenhower_matrix, LessonId::abcde_method,  LessonId::eat_that_frog,
};

std::string_view to_string(LessonId lesson) noexcept;
std::optional<LessonId> lesson_from_string(std::string_view name) noexcept;

/// Title-case strategy name for display, e.g. "Eisenhower Matrix".
std::string_view display_name(LessonId lesson) noexcept;

/// Canonical position of a lesson, used for deterministic tie breaks.
constexpr std::size_t canonical_index(LessonId lesson) noexcept {
    return static_cast<std::size_t>(lesson);
}

/// Either the introductory conversation or one of the six lessons.
class SessionKind {
public:
    static SessionKind intro() { return SessionKind{}; }
    static SessionKind lesson(LessonId id) { return SessionKind{id}; }

    bool is_intro() const noexcept { return !lesson_; }
    std::optional<LessonId> lesson() const noexcept { return lesson_; }
    std::string_view name() const noexcept;

    static std::optional<SessionKind> parse(std::string_view name);

    friend bool operator==(const SessionKind&, const SessionKind&) = default;

private:
    SessionKind() = default;
    explicit SessionKind(LessonId id) : lesson_(id) {}

    std::optional<LessonId> lesson_;
};

enum class Year { first, second, third, fourth, other };

std::string_view to_string(Year year) noexcept;
/// Accepts "first".."fourth" and "1".."4" case-insensitively; anything else is Year::other.
Year parse_year(std::string_view text) noexcept;

enum class Role { coach, student };

std::string_view to_string(Role role) noexcept;

}  // namespace coach
