#pragma once

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace coach {

using Json = nlohmann::ordered_json;

struct ExtractedJson {
    Json value;
    std::string remainder;  // input with the extracted block cut out, otherwise untouched
};

/// Finds the last balanced {...} block in model text and parses it.
///
/// Brace matching skips over string literals (with escapes) inside the block.
/// An unparsable block gets one repair pass (trailing commas, typographic
/// quotes) before JsonParseError is thrown. No block at all throws
/// CoachError(extraction).
ExtractedJson extract_json_object(std::string_view text);

/// Same contract for a top-level [...] array. Bracketed prose such as
/// "[Conversation End]" is skipped: the last balanced block that parses as a
/// JSON array wins.
ExtractedJson extract_json_array(std::string_view text);

/// The repair pass on its own; returns nullopt when nothing changed.
std::optional<std::string> repair_json(std::string_view block);

}  // namespace coach
