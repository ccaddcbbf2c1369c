#include "coach/analytics.hpp"

#include "coach/error.hpp"
#include "coach/text.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <set>
#include <unordered_set>

namespace coach {

namespace {

constexpr std::string_view kPositiveMoods[] = {"Hopeful and Inspired", "Confident and Determined",
                                               "Energized and Focused"};
constexpr std::string_view kNeutralMoods[] = {"Calm and Grounded", "Reflective and Observant",
                                              "Balanced and Centered"};
constexpr std::string_view kNegativeMoods[] = {"Overwhelmed and Stressed", "Frustrated and Discouraged",
                                               "Anxious and Uncertain"};

bool iequals(std::string_view a, std::string_view b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](char x, char y) {
        return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
    });
}

constexpr int kMaxStructuredTokens = 1024;

ChatRequest structured_request(std::string prompt, const TemplateId& id, const std::string& conversation_id) {
    ChatRequest req;
    req.system_prompt = std::move(prompt);
    req.temperature = kStructuredTemperature;
    req.max_output_tokens = kMaxStructuredTokens;
    req.template_id = std::string(id.name());
    req.conversation_id = conversation_id;
    return req;
}

}  // namespace

// ---------------------------------------------------------------------------
// Engagement

std::size_t word_count(std::span<const std::string> student_turns) {
    std::size_t total = 0;
    for (const auto& turn : student_turns) total += text::tokenize(turn).size();
    return total;
}

double lexical_diversity(std::span<const std::string> student_turns) {
    std::size_t total = 0;
    std::unordered_set<std::string> distinct;
    for (const auto& turn : student_turns) {
        for (auto& tok : text::tokenize(turn)) {
            ++total;
            distinct.insert(std::move(tok));
        }
    }
    return total == 0 ? 0.0 : static_cast<double>(distinct.size()) / static_cast<double>(total);
}

EngagementStats engagement_for(LessonId lesson, std::span<const std::string> student_turns) {
    return EngagementStats{lesson, word_count(student_turns), lexical_diversity(student_turns)};
}

std::vector<LessonId> rank_engagement(std::span<const EngagementStats> stats) {
    std::set<LessonId> seen;
    std::vector<EngagementStats> engaged;
    for (const auto& s : stats) {
        if (!seen.insert(s.lesson).second) {
            fail(ErrorCode::validation, "duplicate engagement entry for " + std::string(to_string(s.lesson)));
        }
        if (s.word_count > 0) engaged.push_back(s);
    }
    std::sort(engaged.begin(), engaged.end(), [](const EngagementStats& a, const EngagementStats& b) {
        if (a.word_count != b.word_count) return a.word_count > b.word_count;
        return canonical_index(a.lesson) < canonical_index(b.lesson);
    });

    std::vector<LessonId> ranked;
    auto cluster_begin = engaged.begin();
    while (cluster_begin != engaged.end()) {
        const std::size_t head = cluster_begin->word_count;
        auto cluster_end = std::find_if(cluster_begin, engaged.end(), [head](const EngagementStats& s) {
            return s.word_count * kBandDenominator < head * kBandNumerator;
        });
        std::sort(cluster_begin, cluster_end, [](const EngagementStats& a, const EngagementStats& b) {
            if (a.lexical_diversity != b.lexical_diversity) return a.lexical_diversity > b.lexical_diversity;
            return canonical_index(a.lesson) < canonical_index(b.lesson);
        });
        for (auto it = cluster_begin; it != cluster_end; ++it) ranked.push_back(it->lesson);
        cluster_begin = cluster_end;
    }
    if (ranked.size() > 3) ranked.resize(3);
    return ranked;
}

// ---------------------------------------------------------------------------
// Progress

Progress progress(std::span<const LessonRecord> records) {
    if (records.size() != kAllLessons.size()) {
        fail(ErrorCode::validation, "progress needs exactly 6 lesson records, got " + std::to_string(records.size()));
    }
    std::set<LessonId> lessons;
    int mastered = 0;
    for (const auto& r : records) {
        if (!lessons.insert(r.lesson).second) {
            fail(ErrorCode::validation, "duplicate lesson record for " + std::string(to_string(r.lesson)));
        }
        if (r.status == LessonStatus::mastered) ++mastered;
    }
    return Progress{mastered, 6 - mastered};
}

// ---------------------------------------------------------------------------
// Mood

std::string_view to_string(MoodOverall m) noexcept {
    switch (m) {
        case MoodOverall::Positive: return "Positive";
        case MoodOverall::Negative: return "Negative";
        case MoodOverall::Neutral: return "Neutral";
    }
    return "Neutral";
}

std::optional<MoodOverall> mood_overall_from_string(std::string_view s) noexcept {
    for (auto m : {MoodOverall::Positive, MoodOverall::Negative, MoodOverall::Neutral}) {
        if (iequals(to_string(m), s)) return m;
    }
    return std::nullopt;
}

std::span<const std::string_view> detailed_moods(MoodOverall overall) noexcept {
    switch (overall) {
        case MoodOverall::Positive: return kPositiveMoods;
        case MoodOverall::Negative: return kNegativeMoods;
        case MoodOverall::Neutral: return kNeutralMoods;
    }
    return kNeutralMoods;
}

MoodReport fallback_mood() { return MoodReport{MoodOverall::Neutral, "Balanced and Centered", true}; }

bool satisfies_taxonomy(const MoodReport& report) noexcept {
    const auto allowed = detailed_moods(report.overall);
    return std::find(allowed.begin(), allowed.end(), report.detailed) != allowed.end();
}

std::optional<MoodReport> parse_mood_reply(std::string_view model_text) {
    Json obj;
    try {
        obj = extract_json_object(model_text).value;
    } catch (const CoachError&) {
        return std::nullopt;
    }
    const auto overall_it = obj.find("overall");
    const auto detailed_it = obj.find("detailed");
    if (overall_it == obj.end() || detailed_it == obj.end() || !overall_it->is_string() ||
        !detailed_it->is_string()) {
        return std::nullopt;
    }
    const auto overall = mood_overall_from_string(text::trim(overall_it->get<std::string>()));
    if (!overall) return std::nullopt;
    const std::string detailed = text::trim(detailed_it->get<std::string>());
    for (auto allowed : detailed_moods(*overall)) {
        if (iequals(allowed, detailed)) return MoodReport{*overall, std::string(allowed), false};
    }
    return std::nullopt;
}

MoodReport classify_mood(ChatBackend& backend, const TemplateLibrary& templates,
                         const std::string& conversation_history, const std::string& conversation_id) {
    if (text::trim(conversation_history).empty()) fail(ErrorCode::validation, "mood needs a conversation history");
    const std::string prompt = templates.render(TemplateId::mood(), {{"conversation_history", conversation_history}});
    for (int attempt = 0; attempt < 2; ++attempt) {
        const auto reply = backend.complete(structured_request(prompt, TemplateId::mood(), conversation_id));
        if (auto report = parse_mood_reply(reply.text)) return *report;
        spdlog::warn("mood reply failed validation (attempt {}): {}", attempt + 1, reply.text);
    }
    spdlog::warn("mood classification fell back to Neutral / Balanced and Centered");
    return fallback_mood();
}

// ---------------------------------------------------------------------------
// Lesson ordering

LessonOrder validate_lesson_order(std::string_view model_output) {
    Json arr;
    try {
        arr = extract_json_array(model_output).value;
    } catch (const CoachError&) {
        spdlog::warn("lesson order reply has no JSON array; using default order");
        return LessonOrder{};
    }
    if (arr.size() != kAllLessons.size()) {
        spdlog::warn("lesson order reply has {} entries; using default order", arr.size());
        return LessonOrder{};
    }
    LessonOrder result;
    std::set<LessonId> used;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_string()) return LessonOrder{};
        const std::string folded = text::fold_identifier(arr[i].get<std::string>());
        std::optional<LessonId> match;
        for (auto lesson : kAllLessons) {
            if (text::fold_identifier(to_string(lesson)) == folded) match = lesson;
        }
        if (!match || !used.insert(*match).second) {
            spdlog::warn("lesson order reply is not a permutation of the six lessons; using default order");
            return LessonOrder{};
        }
        result.order[i] = *match;
    }
    result.fallback = false;
    return result;
}

LessonOrder recommend_lesson_order(ChatBackend& backend, const TemplateLibrary& templates, const Json& profile,
                                   const std::string& conversation_id) {
    const std::string prompt = templates.render(TemplateId::ordering(), {{"user_profile", profile.dump()}});
    const auto reply = backend.complete(structured_request(prompt, TemplateId::ordering(), conversation_id));
    return validate_lesson_order(reply.text);
}

// ---------------------------------------------------------------------------
// Insights

std::optional<std::vector<InsightPair>> parse_insights_reply(std::string_view model_text) {
    Json arr;
    try {
        arr = extract_json_array(model_text).value;
    } catch (const CoachError&) {
        return std::nullopt;
    }
    std::vector<InsightPair> pairs;
    for (const auto& item : arr) {
        if (!item.is_object()) return std::nullopt;
        const auto insight = item.find("insight");
        const auto suggestion = item.find("suggestion");
        if (insight == item.end() || suggestion == item.end() || !insight->is_string() || !suggestion->is_string()) {
            return std::nullopt;
        }
        InsightPair pair{text::trim(insight->get<std::string>()), text::trim(suggestion->get<std::string>())};
        if (pair.insight.empty() || pair.suggestion.empty()) return std::nullopt;
        pairs.push_back(std::move(pair));
    }
    return pairs;
}

std::vector<InsightPair> generate_insights(ChatBackend& backend, const TemplateLibrary& templates,
                                           const std::string& conversation_history,
                                           const std::string& conversation_id) {
    if (text::trim(conversation_history).empty()) {
        fail(ErrorCode::validation, "insights need a conversation history");
    }
    const std::string prompt =
        templates.render(TemplateId::insights(), {{"conversation_history", conversation_history}});
    for (int attempt = 0; attempt < 2; ++attempt) {
        const auto reply = backend.complete(structured_request(prompt, TemplateId::insights(), conversation_id));
        if (auto pairs = parse_insights_reply(reply.text)) return std::move(*pairs);
        spdlog::warn("insights reply malformed (attempt {})", attempt + 1);
    }
    spdlog::warn("no insights recorded: model reply malformed twice");
    return {};
}

// ---------------------------------------------------------------------------
// Dashboard

Json to_json(const MoodReport& mood) {
    return Json{{"overall", to_string(mood.overall)}, {"detailed", mood.detailed}, {"fallback", mood.fallback}};
}

Json to_json(const InsightEntry& entry) {
    return Json{
        {"insight", entry.insight},
        {"suggestion", entry.suggestion},
        {"generated_after", entry.generated_after.name()},
        {"at", format_timestamp(entry.at)},
    };
}

Json to_json(const DashboardSnapshot& s) {
    Json time = Json::object();
    Json confidence = Json::object();
    for (auto lesson : kAllLessons) {
        const auto t = s.time_per_lesson.find(lesson);
        time[std::string(to_string(lesson))] = t == s.time_per_lesson.end() ? 0.0 : t->second;
        const auto c = s.confidence_per_lesson.find(lesson);
        confidence[std::string(to_string(lesson))] =
            (c == s.confidence_per_lesson.end() || !c->second) ? Json() : Json(*c->second);
    }
    Json top = Json::array();
    for (auto lesson : s.top_engagement) top.push_back(to_string(lesson));
    Json insights = Json::array();
    for (const auto& entry : s.insights) insights.push_back(to_json(entry));

    Json out = Json::object();
    out["progress_mastered"] = s.progress_mastered;
    out["progress_remaining"] = s.progress_remaining;
    out["mood"] = s.mood ? to_json(*s.mood) : Json();
    out["time_per_lesson"] = std::move(time);
    out["confidence_per_lesson"] = std::move(confidence);
    out["top_engagement"] = std::move(top);
    out["insights"] = std::move(insights);
    return out;
}

}  // namespace coach
