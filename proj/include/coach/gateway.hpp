#pragma once

#include "coach/types.hpp"

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace coach {

inline constexpr double kCoachingTemperature = 0.7;
inline constexpr double kStructuredTemperature = 0.0;

struct ChatMessage {
    Role role;
    std::string text;
};

struct ChatRequest {
    std::string system_prompt;
    std::vector<ChatMessage> history;
    double temperature = kCoachingTemperature;
    int max_output_tokens = 512;
    // Routing for the scripted stub; ignored on the wire.
    std::string template_id;
    std::string conversation_id;
};

struct ChatResponse {
    std::string text;
    std::string model_name;
    std::int64_t latency_ms = 0;
};

/// Rejects requests that violate the ChatRequest invariants.
void validate(const ChatRequest& req);

struct GatewayConfig {
    enum class Mode { live, scripted };

    Mode mode = Mode::scripted;
    std::string base_url;
    std::string api_key;
    std::string model;
    std::filesystem::path script_path;
    int retries = 2;
    int timeout_ms = 60000;
    int backoff_ms = 500;  // first retry delay; doubles per attempt

    /// Reads COACH_LLM_MODE, COACH_LLM_BASE_URL, COACH_LLM_API_KEY,
    /// COACH_LLM_MODEL and COACH_LLM_SCRIPT (plus optional COACH_LLM_RETRIES,
    /// COACH_LLM_TIMEOUT_MS). Mode defaults to scripted.
    static GatewayConfig from_env();

    /// Throws a validation error when required fields for the mode are missing.
    void validate() const;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual ChatResponse complete(const ChatRequest& req) = 0;
};

/// Deterministic stand-in for the model: replays fixture replies keyed by
/// template id, with one cursor per (conversation, template) pair.
class ScriptedBackend final : public ChatBackend {
public:
    using Script = std::map<std::string, std::vector<std::string>>;

    explicit ScriptedBackend(Script script) : script_(std::move(script)) {}

    /// Script file: JSON array of {"template_id": ..., "replies": [text, ...]}.
    /// Repeated template ids have their replies concatenated.
    static Script load_script(const std::filesystem::path& path);
    static Script parse_script(std::string_view json_text);

    ChatResponse complete(const ChatRequest& req) override;

    /// Number of replies consumed for a (conversation, template) pair.
    std::size_t consumed(const std::string& conversation_id, const std::string& template_id) const;

private:
    Script script_;
    mutable std::mutex mu_;
    std::map<std::pair<std::string, std::string>, std::size_t> cursors_;
};

/// OpenAI-compatible chat-completions client with retry on transport errors
/// and 5xx responses.
class OpenAiBackend final : public ChatBackend {
public:
    explicit OpenAiBackend(GatewayConfig config);

    ChatResponse complete(const ChatRequest& req) override;

    /// Wire body for a request: model, messages[], temperature, max_tokens.
    static std::string build_body(const ChatRequest& req, const std::string& model);

private:
    GatewayConfig config_;
    std::string origin_;     // scheme://host[:port]
    std::string path_base_;  // path prefix, e.g. "/v1"
};

std::unique_ptr<ChatBackend> make_backend(const GatewayConfig& config);

}  // namespace coach
