#pragma once

#include "coach/types.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace coach {

/// Identifies one of the ten prompt families: intro, six lessons, and the
/// three auxiliary prompts (lesson ordering, mood analysis, insights).
class TemplateId {
public:
    enum class Family { intro, lesson, ordering, mood, insights };

    static TemplateId intro() { return TemplateId{Family::intro, std::nullopt}; }
    static TemplateId lesson(LessonId id) { return TemplateId{Family::lesson, id}; }
    static TemplateId ordering() { return TemplateId{Family::ordering, std::nullopt}; }
    static TemplateId mood() { return TemplateId{Family::mood, std::nullopt}; }
    static TemplateId insights() { return TemplateId{Family::insights, std::nullopt}; }
    static TemplateId for_session(const SessionKind& kind);

    Family family() const noexcept { return family_; }
    std::optional<LessonId> lesson_id() const noexcept { return lesson_; }

    /// Manifest / script key: "intro", a lesson name, "ordering", "mood" or "insights".
    std::string_view name() const noexcept;
    static std::optional<TemplateId> parse(std::string_view name);
    static std::vector<TemplateId> all();

    friend bool operator==(const TemplateId&, const TemplateId&) = default;
    friend bool operator<(const TemplateId& a, const TemplateId& b) { return a.name() < b.name(); }

private:
    TemplateId(Family family, std::optional<LessonId> lesson) : family_(family), lesson_(lesson) {}

    Family family_;
    std::optional<LessonId> lesson_;
};

/// Placeholder names used across the shipped templates.
inline constexpr std::string_view kKnownPlaceholders[] = {
    "coach_name", "coach_personality", "username", "major", "year", "user_profile", "conversation_history",
};

struct PromptTemplate {
    TemplateId id;
    std::string body;
    std::set<std::string> required_placeholders;  // every [name] occurring in body
};

using PlaceholderMap = std::map<std::string, std::string, std::less<>>;

/// Scans a template body for [placeholder] tokens (lowercase identifiers in brackets).
std::set<std::string> find_placeholders(std::string_view body);

/// Substitutes bindings into a template body.
///
/// Every required placeholder must be bound to a non-blank value, otherwise a
/// validation error names the first missing one. A bound value that itself
/// contains "[" followed by a known placeholder name has that bracket turned
/// into "(" so the output never carries an unresolved-looking placeholder.
std::string render(const PromptTemplate& tmpl, const PlaceholderMap& bindings);

/// Immutable set of templates loaded from a directory with a manifest.json
/// mapping template id -> file name. All ten ids must be present.
class TemplateLibrary {
public:
    static TemplateLibrary load(const std::filesystem::path& dir);

    const PromptTemplate& get(const TemplateId& id) const;
    const PromptTemplate& lesson_template_for(LessonId lesson) const { return get(TemplateId::lesson(lesson)); }

    std::string render(const TemplateId& id, const PlaceholderMap& bindings) const {
        return coach::render(get(id), bindings);
    }

private:
    std::map<TemplateId, PromptTemplate> templates_;
};

/// Structural check every lesson prompt must pass: the coach role sentence,
/// the 50-word rule, a numbered step list (1..N, N >= 10), the profile
/// placeholder, and a final step carrying the termination marker.
/// Returns human-readable violations; empty means the template conforms.
std::vector<std::string> check_lesson_protocol(std::string_view body);

}  // namespace coach
