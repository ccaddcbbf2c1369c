#include "coach/domain.hpp"

#include "coach/error.hpp"
#include "coach/text.hpp"

namespace coach {

std::string_view to_string(LessonStatus s) noexcept {
    switch (s) {
        case LessonStatus::not_started: return "not_started";
        case LessonStatus::in_progress: return "in_progress";
        case LessonStatus::mastered: return "mastered";
    }
    return "not_started";
}

bool detect_termination(std::string_view coach_text) noexcept {
    return coach_text.find(kTerminationMarker) != std::string_view::npos;
}

std::string display_text(std::string_view coach_text) {
    const auto pos = coach_text.find(kTerminationMarker);
    if (pos == std::string_view::npos) return text::trim(coach_text);

    std::string after(coach_text.substr(pos + kTerminationMarker.size()));
    try {
        after = extract_json_object(after).remainder;
    } catch (const JsonParseError& e) {
        if (auto at = after.rfind(e.block()); at != std::string::npos) after.erase(at, e.block().size());
    } catch (const CoachError&) {
        // no JSON block after the marker
    }
    for (std::string_view fence : {kTerminationMarker, std::string_view("```json"), std::string_view("```JSON"),
                                   std::string_view("```")}) {
        for (std::size_t p; (p = after.find(fence)) != std::string::npos;) after.erase(p, fence.size());
    }

    std::string shown = text::trim(coach_text.substr(0, pos));
    const std::string tail = text::trim(after);
    if (!tail.empty()) {
        if (!shown.empty()) shown += ' ';
        shown += tail;
    }
    return shown;
}

}  // namespace coach
