#include "coach/json_extract.hpp"

#include "coach/error.hpp"

#include <spdlog/spdlog.h>

#include <vector>

namespace coach {

namespace {

struct Span {
    std::size_t begin;
    std::size_t end;  // one past the closing bracket
};

// Returns the end of the balanced block opened at `begin`, or npos.
std::size_t match_block(std::string_view s, std::size_t begin, char open, char close) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = begin; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == open) {
            ++depth;
        } else if (c == close) {
            if (--depth == 0) return i + 1;
        }
    }
    return std::string_view::npos;
}

std::vector<Span> top_level_blocks(std::string_view s, char open, char close) {
    std::vector<Span> spans;
    std::size_t pos = 0;
    while ((pos = s.find(open, pos)) != std::string_view::npos) {
        const std::size_t end = match_block(s, pos, open, close);
        if (end == std::string_view::npos) {
            ++pos;
            continue;
        }
        spans.push_back({pos, end});
        pos = end;
    }
    return spans;
}

std::optional<Json> try_parse(std::string_view block) {
    Json parsed = Json::parse(block, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) return std::nullopt;
    return parsed;
}

std::optional<Json> parse_with_repair(std::string_view block) {
    if (auto parsed = try_parse(block)) return parsed;
    if (auto repaired = repair_json(block)) {
        if (auto parsed = try_parse(*repaired)) {
            spdlog::info("repaired malformed JSON from model output ({} bytes)", block.size());
            return parsed;
        }
    }
    return std::nullopt;
}

std::string cut(std::string_view text, Span span) {
    std::string out(text.substr(0, span.begin));
    out.append(text.substr(span.end));
    return out;
}

void replace_all(std::string& s, std::string_view from, std::string_view to) {
    for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size()) {
        s.replace(pos, from.size(), to);
    }
}

}  // namespace

std::optional<std::string> repair_json(std::string_view block) {
    std::string s(block);
    replace_all(s, "“", "\"");
    replace_all(s, "”", "\"");
    replace_all(s, "„", "\"");
    replace_all(s, "‘", "'");
    replace_all(s, "’", "'");

    // Drop commas that directly precede a closing bracket (ignoring whitespace), outside strings.
    std::string out;
    out.reserve(s.size());
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            out += c;
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') in_string = true;
        if (c == ',') {
            std::size_t j = i + 1;
            while (j < s.size() && (s[j] == ' ' || s[j] == '\n' || s[j] == '\r' || s[j] == '\t')) ++j;
            if (j < s.size() && (s[j] == '}' || s[j] == ']')) continue;
        }
        out += c;
    }
    if (out == block) return std::nullopt;
    return out;
}

ExtractedJson extract_json_object(std::string_view text) {
    const auto spans = top_level_blocks(text, '{', '}');
    if (spans.empty()) fail(ErrorCode::extraction, "no JSON object found in model output");
    const Span last = spans.back();
    const std::string_view block = text.substr(last.begin, last.end - last.begin);
    auto parsed = parse_with_repair(block);
    if (!parsed) throw JsonParseError(std::string(block), "model output contains an unparsable JSON object");
    return {std::move(*parsed), cut(text, last)};
}

ExtractedJson extract_json_array(std::string_view text) {
    const auto spans = top_level_blocks(text, '[', ']');
    if (spans.empty()) fail(ErrorCode::extraction, "no JSON array found in model output");
    for (auto it = spans.rbegin(); it != spans.rend(); ++it) {
        const std::string_view block = text.substr(it->begin, it->end - it->begin);
        if (auto parsed = parse_with_repair(block); parsed && parsed->is_array()) {
            return {std::move(*parsed), cut(text, *it)};
        }
    }
    const Span last = spans.back();
    throw JsonParseError(std::string(text.substr(last.begin, last.end - last.begin)),
                         "model output contains no parsable JSON array");
}

}  // namespace coach
