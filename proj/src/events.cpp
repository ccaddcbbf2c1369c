#include "coach/events.hpp"

#include "coach/affect.hpp"
#include "coach/analytics.hpp"
#include "coach/error.hpp"
#include "coach/text.hpp"

#include <set>

namespace coach {

namespace {

constexpr std::pair<EventKind, std::string_view> kKindNames[] = {
    {EventKind::user_registered, "user_registered"},
    {EventKind::session_started, "session_started"},
    {EventKind::coach_turn, "coach_turn"},
    {EventKind::student_turn, "student_turn"},
    {EventKind::session_ended, "session_ended"},
    {EventKind::confidence_submitted, "confidence_submitted"},
    {EventKind::profile_extracted, "profile_extracted"},
    {EventKind::mood_computed, "mood_computed"},
    {EventKind::insights_added, "insights_added"},
    {EventKind::order_recommended, "order_recommended"},
    {EventKind::speech_toggled, "speech_toggled"},
};

class SchemaCheck {
public:
    SchemaCheck(EventKind kind, const Json& payload) : kind_(kind), payload_(payload) {
        if (!payload.is_object()) violation("payload must be an object");
    }

    const Json& field(const Json& obj, std::string_view key, std::string_view path) const {
        auto it = obj.find(std::string(key));
        if (it == obj.end()) violation("missing field " + std::string(path));
        return *it;
    }

    std::string str(std::string_view key, bool non_empty = false) const { return str_in(payload_, key, key, non_empty); }

    std::string str_in(const Json& obj, std::string_view key, std::string_view path, bool non_empty) const {
        const auto& v = field(obj, key, path);
        if (!v.is_string()) violation(std::string(path) + " must be a string");
        auto s = v.get<std::string>();
        if (non_empty && text::trim(s).empty()) violation(std::string(path) + " must not be empty");
        return s;
    }

    bool boolean(std::string_view key) const {
        const auto& v = field(payload_, key, key);
        if (!v.is_boolean()) violation(std::string(key) + " must be a boolean");
        return v.get<bool>();
    }

    const Json& object(const Json& obj, std::string_view key, std::string_view path) const {
        const auto& v = field(obj, key, path);
        if (!v.is_object()) violation(std::string(path) + " must be an object");
        return v;
    }

    const Json& array(const Json& obj, std::string_view key, std::string_view path) const {
        const auto& v = field(obj, key, path);
        if (!v.is_array()) violation(std::string(path) + " must be an array");
        return v;
    }

    void string_array(const Json& obj, std::string_view key, std::string_view path) const {
        for (const auto& item : array(obj, key, path)) {
            if (!item.is_string()) violation(std::string(path) + " must contain strings");
        }
    }

    [[noreturn]] void violation(const std::string& what) const {
        fail(ErrorCode::validation, std::string(to_string(kind_)) + " payload: " + what);
    }

private:
    EventKind kind_;
    const Json& payload_;
};

void check_session_kind(const SchemaCheck& c, const std::string& name) {
    if (!SessionKind::parse(name)) c.violation("unknown session kind '" + name + "'");
}

}  // namespace

std::string_view to_string(EventKind kind) noexcept {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) return name;
    }
    return "";
}

std::optional<EventKind> event_kind_from_string(std::string_view name) noexcept {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) return k;
    }
    return std::nullopt;
}

void validate_payload(EventKind kind, const Json& payload) {
    const SchemaCheck c(kind, payload);
    switch (kind) {
        case EventKind::user_registered:
            c.str("user_id", true);
            c.str("name", true);
            c.str("major", true);
            c.str("coach_name", true);
            c.str("coach_personality", true);
            if (auto y = c.str("year"); to_string(parse_year(y)) != y) c.violation("year must be a canonical value");
            break;
        case EventKind::session_started:
            c.str("session_id", true);
            check_session_kind(c, c.str("kind"));
            c.str("system_prompt", true);
            break;
        case EventKind::coach_turn:
            c.str("session_id", true);
            c.str("text");
            break;
        case EventKind::student_turn: {
            c.str("session_id", true);
            c.str("text", true);
            const auto& affect = c.object(payload, "affect", "affect");
            const auto& compound = c.field(affect, "compound", "affect.compound");
            if (!compound.is_number()) c.violation("affect.compound must be a number");
            const double v = compound.get<double>();
            if (!(v >= -1.0 && v <= 1.0)) c.violation("affect.compound must be within [-1, 1]");
            const auto polarity = polarity_from_string(c.str_in(affect, "polarity", "affect.polarity", true));
            if (!polarity) c.violation("affect.polarity is not a known polarity");
            if (*polarity != polarity_of(v)) c.violation("affect.polarity disagrees with affect.compound");
            if (!emotion_from_string(c.str_in(affect, "emotion", "affect.emotion", true))) {
                c.violation("affect.emotion is not a known emotion");
            }
            break;
        }
        case EventKind::session_ended:
            c.str("session_id", true);
            break;
        case EventKind::confidence_submitted: {
            if (!lesson_from_string(c.str("lesson"))) c.violation("unknown lesson");
            const auto& score = c.field(payload, "score", "score");
            if (!score.is_number_integer() || score.get<int>() < 1 || score.get<int>() > 5) {
                c.violation("score must be an integer in [1, 5]");
            }
            break;
        }
        case EventKind::profile_extracted: {
            const auto& profile = c.object(payload, "profile", "profile");
            c.object(profile, "raw", "profile.raw");
            c.string_array(profile, "interests", "profile.interests");
            c.string_array(profile, "obstacles", "profile.obstacles");
            for (std::string_view key : {"academics", "routine", "goals", "motivations", "prior_tools"}) {
                c.str_in(profile, key, "profile." + std::string(key), true);
            }
            break;
        }
        case EventKind::mood_computed: {
            const auto overall = mood_overall_from_string(c.str("overall"));
            if (!overall || to_string(*overall) != payload["overall"].get<std::string>()) {
                c.violation("overall must be Positive, Negative or Neutral");
            }
            const MoodReport report{*overall, c.str("detailed"), c.boolean("fallback")};
            if (!satisfies_taxonomy(report)) c.violation("detailed '" + report.detailed + "' is not listed under " + std::string(to_string(*overall)));
            break;
        }
        case EventKind::insights_added: {
            check_session_kind(c, c.str("after"));
            const auto& entries = c.array(payload, "entries", "entries");
            for (const auto& e : entries) {
                if (!e.is_object()) c.violation("entries must contain objects");
                c.str_in(e, "insight", "entries[].insight", true);
                c.str_in(e, "suggestion", "entries[].suggestion", true);
            }
            break;
        }
        case EventKind::order_recommended: {
            const auto& order = c.array(payload, "order", "order");
            std::set<LessonId> seen;
            for (const auto& item : order) {
                const auto lesson = item.is_string() ? lesson_from_string(item.get<std::string>()) : std::nullopt;
                if (!lesson || !seen.insert(*lesson).second) c.violation("order must be a permutation of the lessons");
            }
            if (seen.size() != kAllLessons.size()) c.violation("order must name all six lessons");
            c.boolean("fallback");
            break;
        }
        case EventKind::speech_toggled:
            c.boolean("enabled");
            break;
    }
}

Json to_json(const EventRecord& event) {
    Json line = Json::object();
    line["seq"] = event.seq;
    line["at"] = format_timestamp(event.at);
    line["kind"] = to_string(event.kind);
    line["payload"] = event.payload;
    return line;
}

EventRecord event_from_json(const Json& line) {
    if (!line.is_object()) fail(ErrorCode::validation, "event line is not an object");
    const auto seq = line.find("seq");
    const auto at = line.find("at");
    const auto kind = line.find("kind");
    const auto payload = line.find("payload");
    if (seq == line.end() || !seq->is_number_unsigned() || at == line.end() || !at->is_string() ||
        kind == line.end() || !kind->is_string() || payload == line.end()) {
        fail(ErrorCode::validation, "event line lacks seq/at/kind/payload");
    }
    const auto parsed_kind = event_kind_from_string(kind->get<std::string>());
    if (!parsed_kind) fail(ErrorCode::validation, "unknown event kind " + kind->get<std::string>());
    validate_payload(*parsed_kind, *payload);
    return EventRecord{seq->get<std::uint64_t>(), parse_timestamp(at->get<std::string>()), *parsed_kind, *payload};
}

}  // namespace coach
