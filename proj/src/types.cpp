#include "coach/types.hpp"

#include "coach/error.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace coach {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::validation: return "validation";
        case ErrorCode::not_found: return "not_found";
        case ErrorCode::state: return "state";
        case ErrorCode::busy: return "busy";
        case ErrorCode::upstream: return "upstream";
        case ErrorCode::storage: return "storage";
        case ErrorCode::script: return "script";
        case ErrorCode::extraction: return "extraction";
        case ErrorCode::parse: return "parse";
    }
    return "unknown";
}

Timestamp system_now() {
    return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::string format_timestamp(Timestamp t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()), static_cast<int>(hms.subseconds().count()));
    return buf;
}

Timestamp parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    int y = 0;
    unsigned mo = 0, d = 0;
    int h = 0, mi = 0, s = 0, consumed = 0;
    const std::string str(text);
    if (std::sscanf(str.c_str(), "%4d-%2u-%2uT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &s, &consumed) != 6) {
        fail(ErrorCode::validation, "malformed timestamp: " + str);
    }
    const year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 60) fail(ErrorCode::validation, "malformed timestamp: " + str);

    std::size_t pos = static_cast<std::size_t>(consumed);
    int millis = 0;
    if (pos < str.size() && str[pos] == '.') {
        ++pos;
        int digits = 0;
        while (pos < str.size() && std::isdigit(static_cast<unsigned char>(str[pos]))) {
            if (digits < 3) millis = millis * 10 + (str[pos] - '0');
            ++digits;
            ++pos;
        }
        if (digits == 0) fail(ErrorCode::validation, "malformed timestamp: " + str);
        for (; digits < 3; ++digits) millis *= 10;
    }
    if (pos + 1 != str.size() || (str[pos] != 'Z' && str[pos] != 'z')) {
        fail(ErrorCode::validation, "timestamp must be UTC with Z suffix: " + str);
    }
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{millis};
}

double minutes_between(Timestamp from, Timestamp to) {
    return static_cast<double>((to - from).count()) / 60000.0;
}

std::string_view to_string(LessonId lesson) noexcept {
    switch (lesson) {
        case LessonId::time_blocking: return "time_blocking";
        case LessonId::time_tracking: return "time_tracking";
        case LessonId::task_breakdown: return "task_breakdown";
        case LessonId::eisenhower_matrix: return "eisenhower_matrix";
        case LessonId::abcde_method: return "abcde_method";
        case LessonId::eat_that_frog: return "eat_that_frog";
    }
    return "";
}

std::optional<LessonId> lesson_from_string(std::string_view name) noexcept {
    for (auto lesson : kAllLessons) {
        if (to_string(lesson) == name) return lesson;
    }
    return std::nullopt;
}

std::string_view display_name(LessonId lesson) noexcept {
    switch (lesson) {
        case LessonId::time_blocking: return "Time Blocking";
        case LessonId::time_tracking: return "Time Tracking";
        case LessonId::task_breakdown: return "Task Breakdown";
        case LessonId::eisenhower_matrix: return "Eisenhower Matrix";
        case LessonId::abcde_method: return "ABCDE Method";
        case LessonId::eat_that_frog: return "Eat That Frog";
    }
    return "";
}

std::string_view SessionKind::name() const noexcept {
    return lesson_ ? to_string(*lesson_) : std::string_view{"intro"};
}

std::optional<SessionKind> SessionKind::parse(std::string_view name) {
    if (name == "intro") return intro();
    if (auto lesson = lesson_from_string(name)) return SessionKind::lesson(*lesson);
    return std::nullopt;
}

std::string_view to_string(Year year) noexcept {
    switch (year) {
        case Year::first: return "first";
        case Year::second: return "second";
        case Year::third: return "third";
        case Year::fourth: return "fourth";
        case Year::other: return "other";
    }
    return "other";
}

Year parse_year(std::string_view text) noexcept {
    std::string lowered;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
    }
    if (lowered == "first" || lowered == "1") return Year::first;
    if (lowered == "second" || lowered == "2") return Year::second;
    if (lowered == "third" || lowered == "3") return Year::third;
    if (lowered == "fourth" || lowered == "4") return Year::fourth;
    return Year::other;
}

std::string_view to_string(Role role) noexcept {
    return role == Role::coach ? "coach" : "student";
}

}  // namespace coach
