#include "coach/gateway.hpp"

#include "coach/error.hpp"
#include "coach/json_extract.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace coach {

namespace {

std::string env_or(const char* name, std::string fallback = {}) {
    const char* v = std::getenv(name);
    return v ? std::string(v) : std::move(fallback);
}

int env_int(const char* name, int fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    try {
        return std::stoi(v);
    } catch (const std::exception&) {
        fail(ErrorCode::validation, std::string(name) + " must be an integer");
    }
}

std::string_view wire_role(Role role) { return role == Role::coach ? "assistant" : "user"; }

}  // namespace

void validate(const ChatRequest& req) {
    if (req.system_prompt.empty()) fail(ErrorCode::validation, "chat request needs a system prompt");
    if (!(req.temperature >= 0.0 && req.temperature <= 2.0)) {
        fail(ErrorCode::validation, "temperature must be within [0, 2]");
    }
    if (req.max_output_tokens <= 0) fail(ErrorCode::validation, "max_output_tokens must be positive");
}

GatewayConfig GatewayConfig::from_env() {
    GatewayConfig cfg;
    const std::string mode = env_or("COACH_LLM_MODE", "scripted");
    if (mode == "live") {
        cfg.mode = Mode::live;
    } else if (mode == "scripted") {
        cfg.mode = Mode::scripted;
    } else {
        fail(ErrorCode::validation, "COACH_LLM_MODE must be 'live' or 'scripted', got '" + mode + "'");
    }
    cfg.base_url = env_or("COACH_LLM_BASE_URL", "https://api.openai.com/v1");
    cfg.api_key = env_or("COACH_LLM_API_KEY");
    cfg.model = env_or("COACH_LLM_MODEL", "gpt-4");
    cfg.script_path = env_or("COACH_LLM_SCRIPT");
    cfg.retries = env_int("COACH_LLM_RETRIES", cfg.retries);
    cfg.timeout_ms = env_int("COACH_LLM_TIMEOUT_MS", cfg.timeout_ms);
    return cfg;
}

void GatewayConfig::validate() const {
    if (retries < 0) fail(ErrorCode::validation, "retries must be non-negative");
    if (timeout_ms <= 0) fail(ErrorCode::validation, "timeout_ms must be positive");
    if (mode == Mode::live) {
        if (base_url.empty()) fail(ErrorCode::validation, "live mode requires COACH_LLM_BASE_URL");
        if (api_key.empty()) fail(ErrorCode::validation, "live mode requires COACH_LLM_API_KEY");
        if (model.empty()) fail(ErrorCode::validation, "live mode requires COACH_LLM_MODEL");
    } else if (script_path.empty()) {
        fail(ErrorCode::validation, "scripted mode requires COACH_LLM_SCRIPT");
    }
}

// ---------------------------------------------------------------------------
// Scripted stub

ScriptedBackend::Script ScriptedBackend::parse_script(std::string_view json_text) {
    const Json doc = Json::parse(json_text, nullptr, false);
    if (!doc.is_array()) fail(ErrorCode::script, "script must be a JSON array");
    Script script;
    for (const auto& entry : doc) {
        if (!entry.is_object() || !entry.contains("template_id") || !entry["template_id"].is_string() ||
            !entry.contains("replies") || !entry["replies"].is_array()) {
            fail(ErrorCode::script, "script entries need a string template_id and a replies array");
        }
        auto& replies = script[entry["template_id"].get<std::string>()];
        for (const auto& reply : entry["replies"]) {
            if (!reply.is_string()) fail(ErrorCode::script, "script replies must be strings");
            replies.push_back(reply.get<std::string>());
        }
    }
    return script;
}

ScriptedBackend::Script ScriptedBackend::load_script(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::script, "cannot read script file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_script(buf.str());
}

ChatResponse ScriptedBackend::complete(const ChatRequest& req) {
    validate(req);
    auto it = script_.find(req.template_id);
    if (it == script_.end()) fail(ErrorCode::script, "script has no replies for template " + req.template_id);

    std::lock_guard lock(mu_);
    auto& cursor = cursors_[{req.conversation_id, req.template_id}];
    if (cursor >= it->second.size()) {
        fail(ErrorCode::script, "script exhausted for template " + req.template_id + " in conversation " +
                                    req.conversation_id);
    }
    return ChatResponse{it->second[cursor++], "scripted", 0};
}

std::size_t ScriptedBackend::consumed(const std::string& conversation_id, const std::string& template_id) const {
    std::lock_guard lock(mu_);
    auto it = cursors_.find({conversation_id, template_id});
    return it == cursors_.end() ? 0 : it->second;
}

// ---------------------------------------------------------------------------
// Live client

OpenAiBackend::OpenAiBackend(GatewayConfig config) : config_(std::move(config)) {
    config_.validate();
    const auto scheme_end = config_.base_url.find("://");
    if (scheme_end == std::string::npos) fail(ErrorCode::validation, "base_url must include a scheme");
    const auto path_start = config_.base_url.find('/', scheme_end + 3);
    origin_ = config_.base_url.substr(0, path_start);
    path_base_ = path_start == std::string::npos ? "" : config_.base_url.substr(path_start);
    while (!path_base_.empty() && path_base_.back() == '/') path_base_.pop_back();
}

std::string OpenAiBackend::build_body(const ChatRequest& req, const std::string& model) {
    Json messages = Json::array();
    messages.push_back({{"role", "system"}, {"content", req.system_prompt}});
    for (const auto& m : req.history) {
        messages.push_back({{"role", wire_role(m.role)}, {"content", m.text}});
    }
    Json body = {
        {"model", model},
        {"messages", std::move(messages)},
        {"temperature", req.temperature},
        {"max_tokens", req.max_output_tokens},
    };
    return body.dump();
}

ChatResponse OpenAiBackend::complete(const ChatRequest& req) {
    validate(req);
    const std::string body = build_body(req, config_.model);
    const std::string path = path_base_ + "/chat/completions";

    httplib::Client client(origin_);
    client.set_bearer_token_auth(config_.api_key);
    const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    int last_status = 0;
    std::string last_message;
    for (int attempt = 0; attempt <= config_.retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(config_.backoff_ms) * (1 << (attempt - 1)));
        }
        const auto started = std::chrono::steady_clock::now();
        auto res = client.Post(path, body, "application/json");
        const auto latency =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();

        if (!res) {
            last_status = 0;
            last_message = "transport error: " + httplib::to_string(res.error());
            spdlog::warn("LLM call attempt {} failed: {}", attempt + 1, last_message);
            continue;
        }
        last_status = res->status;
        if (res->status >= 500) {
            last_message = "upstream returned HTTP " + std::to_string(res->status);
            spdlog::warn("LLM call attempt {} failed: {}", attempt + 1, last_message);
            continue;
        }
        if (res->status < 200 || res->status >= 300) {
            throw UpstreamError(res->status, "upstream rejected request with HTTP " + std::to_string(res->status));
        }

        const Json doc = Json::parse(res->body, nullptr, false);
        if (!doc.is_object() || !doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
            throw UpstreamError(res->status, "upstream response lacks choices");
        }
        const auto& message = doc["choices"][0].value("message", Json::object());
        const auto& content = message.contains("content") ? message["content"] : Json();
        ChatResponse out;
        out.text = content.is_string() ? content.get<std::string>() : std::string{};
        out.model_name = doc.value("model", config_.model);
        out.latency_ms = latency;
        return out;
    }
    throw UpstreamError(last_status, "LLM call failed after " + std::to_string(config_.retries + 1) +
                                         " attempts: " + last_message);
}

std::unique_ptr<ChatBackend> make_backend(const GatewayConfig& config) {
    config.validate();
    if (config.mode == GatewayConfig::Mode::live) return std::make_unique<OpenAiBackend>(config);
    return std::make_unique<ScriptedBackend>(ScriptedBackend::load_script(config.script_path));
}

}  // namespace coach
