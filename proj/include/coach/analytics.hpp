#pragma once

#include "coach/domain.hpp"
#include "coach/gateway.hpp"
#include "coach/prompt.hpp"

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace coach {

// ---------------------------------------------------------------------------
// Engagement

std::size_t word_count(std::span<const std::string> student_turns);

/// Distinct tokens over total tokens; 0 for no tokens.
double lexical_diversity(std::span<const std::string> student_turns);

struct EngagementStats {
    LessonId lesson;
    std::size_t word_count = 0;
    double lexical_diversity = 0.0;
};

EngagementStats engagement_for(LessonId lesson, std::span<const std::string> student_turns);

/// Counts within this fraction of a cluster head are "similar" and ordered by diversity instead.
inline constexpr int kBandNumerator = 9;
inline constexpr int kBandDenominator = 10;

/// Top three lessons by engagement.
///
/// Zero-word lessons are dropped. Remaining lessons are sorted by word count
/// (descending) and grouped greedily: a lesson joins the current group when
/// its count is at least 0.9 times the group head's count, otherwise it opens
/// a new group. Each group is ordered by lexical diversity (descending, then
/// canonical lesson order) and groups are concatenated.
std::vector<LessonId> rank_engagement(std::span<const EngagementStats> stats);

// ---------------------------------------------------------------------------
// Progress

struct Progress {
    int mastered = 0;
    int remaining = 6;

    friend bool operator==(const Progress&, const Progress&) = default;
};

/// Requires exactly one record per lesson.
Progress progress(std::span<const LessonRecord> records);

// ---------------------------------------------------------------------------
// Mood

enum class MoodOverall { Positive, Negative, Neutral };

std::string_view to_string(MoodOverall m) noexcept;
std::optional<MoodOverall> mood_overall_from_string(std::string_view s) noexcept;

/// The three detailed labels allowed for each overall class.
std::span<const std::string_view> detailed_moods(MoodOverall overall) noexcept;

struct MoodReport {
    MoodOverall overall = MoodOverall::Neutral;
    std::string detailed = "Balanced and Centered";
    bool fallback = false;  // true when the model never produced a valid report

    friend bool operator==(const MoodReport&, const MoodReport&) = default;
};

MoodReport fallback_mood();

bool satisfies_taxonomy(const MoodReport& report) noexcept;

/// Parses {"overall": ..., "detailed": ...} from model text; nullopt on any
/// extraction, schema, or taxonomy violation.
std::optional<MoodReport> parse_mood_reply(std::string_view model_text);

/// Runs the mood prompt at temperature 0. Invalid replies get one retry and
/// then the fallback report. Gateway failures propagate as upstream errors.
MoodReport classify_mood(ChatBackend& backend, const TemplateLibrary& templates,
                         const std::string& conversation_history, const std::string& conversation_id);

// ---------------------------------------------------------------------------
// Lesson ordering

struct LessonOrder {
    std::array<LessonId, 6> order = kDefaultLessonOrder;
    bool fallback = true;

    friend bool operator==(const LessonOrder&, const LessonOrder&) = default;
};

/// Accepts a JSON array naming every lesson exactly once. Names match
/// case-insensitively and ignore separators ("Eat That Frog" == eat_that_frog).
/// Anything else yields the default order with fallback set.
LessonOrder validate_lesson_order(std::string_view model_output);

/// Runs the ordering prompt over the profile and validates the reply.
/// Gateway failures propagate.
LessonOrder recommend_lesson_order(ChatBackend& backend, const TemplateLibrary& templates, const Json& profile,
                                   const std::string& conversation_id);

// ---------------------------------------------------------------------------
// Insights

struct InsightEntry {
    std::string insight;
    std::string suggestion;
    SessionKind generated_after = SessionKind::intro();
    Timestamp at;

    friend bool operator==(const InsightEntry&, const InsightEntry&) = default;
};

struct InsightPair {
    std::string insight;
    std::string suggestion;

    friend bool operator==(const InsightPair&, const InsightPair&) = default;
};

/// Parses a JSON array of {insight, suggestion} with non-empty texts; nullopt on any violation.
std::optional<std::vector<InsightPair>> parse_insights_reply(std::string_view model_text);

/// Runs the insights prompt; one retry on a malformed reply, then no pairs.
/// Gateway failures propagate.
std::vector<InsightPair> generate_insights(ChatBackend& backend, const TemplateLibrary& templates,
                                           const std::string& conversation_history,
                                           const std::string& conversation_id);

// ---------------------------------------------------------------------------
// Dashboard

struct DashboardSnapshot {
    int progress_mastered = 0;
    int progress_remaining = 6;
    std::optional<MoodReport> mood;
    std::map<LessonId, double> time_per_lesson;
    std::map<LessonId, std::optional<int>> confidence_per_lesson;
    std::vector<LessonId> top_engagement;
    std::vector<InsightEntry> insights;

    friend bool operator==(const DashboardSnapshot&, const DashboardSnapshot&) = default;
};

/// Serialization consumed by the web UI and the export command; field order is stable.
Json to_json(const DashboardSnapshot& snapshot);
Json to_json(const MoodReport& mood);
Json to_json(const InsightEntry& entry);

}  // namespace coach
