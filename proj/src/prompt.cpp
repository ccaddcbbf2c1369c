#include "coach/prompt.hpp"

#include "coach/error.hpp"
#include "coach/json_extract.hpp"
#include "coach/text.hpp"

#include <fstream>
#include <regex>
#include <sstream>

namespace coach {

namespace {

const std::regex& placeholder_pattern() {
    static const std::regex re(R"(\[([a-z][a-z0-9_]*)\])");
    return re;
}

std::string neutralize(std::string value) {
    for (std::size_t pos = 0; (pos = value.find('[', pos)) != std::string::npos; ++pos) {
        const std::string_view rest = std::string_view(value).substr(pos + 1);
        for (auto name : kKnownPlaceholders) {
            if (rest.substr(0, name.size()) == name) {
                value[pos] = '(';
                break;
            }
        }
    }
    return value;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::not_found, "cannot read template file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TemplateId TemplateId::for_session(const SessionKind& kind) {
    if (auto lesson = kind.lesson()) return TemplateId::lesson(*lesson);
    return intro();
}

std::string_view TemplateId::name() const noexcept {
    switch (family_) {
        case Family::intro: return "intro";
        case Family::lesson: return to_string(*lesson_);
        case Family::ordering: return "ordering";
        case Family::mood: return "mood";
        case Family::insights: return "insights";
    }
    return "";
}

std::optional<TemplateId> TemplateId::parse(std::string_view name) {
    if (name == "intro") return intro();
    if (name == "ordering") return ordering();
    if (name == "mood") return mood();
    if (name == "insights") return insights();
    if (auto lesson = lesson_from_string(name)) return TemplateId::lesson(*lesson);
    return std::nullopt;
}

std::vector<TemplateId> TemplateId::all() {
    std::vector<TemplateId> ids{intro()};
    for (auto lesson : kAllLessons) ids.push_back(TemplateId::lesson(lesson));
    ids.push_back(ordering());
    ids.push_back(mood());
    ids.push_back(insights());
    return ids;
}

std::set<std::string> find_placeholders(std::string_view body) {
    std::set<std::string> names;
    const std::string s(body);
    for (std::sregex_iterator it(s.begin(), s.end(), placeholder_pattern()), end; it != end; ++it) {
        names.insert((*it)[1].str());
    }
    return names;
}

std::string render(const PromptTemplate& tmpl, const PlaceholderMap& bindings) {
    for (const auto& name : tmpl.required_placeholders) {
        auto it = bindings.find(name);
        if (it == bindings.end() || text::trim(it->second).empty()) {
            fail(ErrorCode::validation,
                 "template '" + std::string(tmpl.id.name()) + "' is missing placeholder: " + name);
        }
    }

    std::string out;
    out.reserve(tmpl.body.size() + 256);
    std::size_t last = 0;
    const std::string& body = tmpl.body;
    for (std::sregex_iterator it(body.begin(), body.end(), placeholder_pattern()), end; it != end; ++it) {
        const auto& m = *it;
        out.append(body, last, static_cast<std::size_t>(m.position(0)) - last);
        out += neutralize(bindings.find(m[1].str())->second);
        last = static_cast<std::size_t>(m.position(0) + m.length(0));
    }
    out.append(body, last);
    return out;
}

TemplateLibrary TemplateLibrary::load(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    if (!std::filesystem::is_regular_file(manifest_path)) {
        fail(ErrorCode::not_found, "template manifest not found: " + manifest_path.string());
    }
    const Json manifest = Json::parse(read_file(manifest_path), nullptr, false);
    if (!manifest.is_object()) fail(ErrorCode::validation, "template manifest is not a JSON object");

    TemplateLibrary lib;
    for (const auto& [key, file] : manifest.items()) {
        auto id = TemplateId::parse(key);
        if (!id) fail(ErrorCode::validation, "unknown template id in manifest: " + key);
        if (!file.is_string()) fail(ErrorCode::validation, "manifest entry for " + key + " must be a file name");
        std::string body = read_file(dir / file.get<std::string>());
        auto required = find_placeholders(body);
        lib.templates_.insert_or_assign(*id, PromptTemplate{*id, std::move(body), std::move(required)});
    }
    for (const auto& id : TemplateId::all()) {
        if (!lib.templates_.count(id)) {
            fail(ErrorCode::validation, "template manifest lacks id: " + std::string(id.name()));
        }
    }
    for (auto lesson : kAllLessons) {
        const auto violations = check_lesson_protocol(lib.lesson_template_for(lesson).body);
        if (!violations.empty()) {
            fail(ErrorCode::validation,
                 "lesson template " + std::string(to_string(lesson)) + " is malformed: " + violations.front());
        }
    }
    return lib;
}

const PromptTemplate& TemplateLibrary::get(const TemplateId& id) const {
    auto it = templates_.find(id);
    if (it == templates_.end()) fail(ErrorCode::not_found, "no template for " + std::string(id.name()));
    return it->second;
}

std::vector<std::string> check_lesson_protocol(std::string_view body) {
    std::vector<std::string> violations;
    const std::string s(body);

    static const std::regex role(
        R"(Your name is \[coach_name\] and you are a \[coach_personality\] productivity coach for college students\.)");
    if (!std::regex_search(s, role)) violations.emplace_back("missing coach role sentence");

    if (s.find("Don't have more than 50 words per response") == std::string::npos) {
        violations.emplace_back("missing 50-word response rule");
    }
    if (s.find("[user_profile]") == std::string::npos) violations.emplace_back("missing [user_profile] placeholder");

    static const std::regex step(R"((?:^|\n)[ \t]*(\d+)\.[ \t]+([^\n]+))");
    std::vector<std::string> steps;
    int expected = 1;
    for (std::sregex_iterator it(s.begin(), s.end(), step), end; it != end; ++it) {
        if (std::stoi((*it)[1].str()) != expected) {
            violations.emplace_back("step numbering is not consecutive at step " + std::to_string(expected));
            break;
        }
        steps.push_back((*it)[2].str());
        ++expected;
    }
    if (steps.size() < 10) {
        violations.emplace_back("expected at least 10 numbered steps, found " + std::to_string(steps.size()));
    }
    if (steps.empty() || steps.back().find("[Conversation End]") == std::string::npos) {
        violations.emplace_back("final step lacks the [Conversation End] termination instruction");
    }
    return violations;
}

}  // namespace coach
