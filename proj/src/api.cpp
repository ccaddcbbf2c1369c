#include "coach/api.hpp"

#include "coach/error.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <charconv>
#include <limits>
#include <memory>

namespace coach {

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

Json parse_body(const httplib::Request& req) {
    if (req.body.empty()) fail(ErrorCode::validation, "request body must be a JSON object");
    Json body = Json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) fail(ErrorCode::validation, "request body must be a JSON object");
    return body;
}

std::string string_field(const Json& body, const char* name) {
    auto it = body.find(name);
    if (it == body.end() || !it->is_string()) fail(ErrorCode::validation, std::string(name) + " must be a string");
    return it->get<std::string>();
}

const std::string& path_param(const httplib::Request& req, const char* name) {
    return req.path_params.at(name);
}

std::uint64_t parse_seq(const std::string& text) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        fail(ErrorCode::validation, "seq must be a non-negative integer");
    }
    return value;
}

Json cues_json(const std::vector<CueEvent>& cues) {
    Json out = Json::array();
    for (const auto& c : cues) out.push_back(to_json(c));
    return out;
}

Json user_json(const UserState& state) {
    Json out = Json::object();
    out["account"] = to_json(state.account);
    out["profile"] = state.profile ? to_json(*state.profile) : Json();
    Json sessions = Json::array();
    for (const auto& s : state.sessions) {
        sessions.push_back(Json{{"session_id", s.session.session_id},
                                {"kind", s.session.kind.name()},
                                {"ended", s.session.ended}});
    }
    out["sessions"] = std::move(sessions);
    return out;
}

Json plan_json(const LessonPlan& plan) {
    Json order = Json::array();
    for (auto l : plan.order.order) order.push_back(to_string(l));
    Json lessons = Json::array();
    for (const auto& r : plan.lessons) {
        Json entry = to_json(r);
        entry["display_name"] = display_name(r.lesson);
        lessons.push_back(std::move(entry));
    }
    Json out = Json::object();
    out["order"] = std::move(order);
    out["recommended"] = plan.recommended;
    out["fallback"] = plan.order.fallback;
    out["profile_ready"] = plan.profile_ready;
    out["lessons"] = std::move(lessons);
    return out;
}

// Runs a handler body and turns escaping exceptions into the error envelope.
template <typename F>
httplib::Server::Handler guarded(F body) {
    return [body = std::move(body)](const httplib::Request& req, httplib::Response& res) {
        try {
            body(req, res);
        } catch (const std::exception& e) {
            const auto err = to_api_error(e);
            if (err.status >= 500) {
                spdlog::error("{} {} -> {} {}", req.method, req.path, err.status, err.message);
            }
            send_json(res, err.status, to_json(err));
        }
    };
}

}  // namespace

ApiError to_api_error(const std::exception& e) {
    const auto* ce = dynamic_cast<const CoachError*>(&e);
    if (!ce) return {500, "storage", std::string("internal error: ") + e.what()};
    switch (ce->code()) {
        case ErrorCode::validation: return {400, "validation", e.what()};
        case ErrorCode::not_found: return {404, "not_found", e.what()};
        case ErrorCode::state: return {409, "state", e.what()};
        case ErrorCode::busy: return {409, "busy", e.what()};
        case ErrorCode::storage: return {500, "storage", e.what()};
        // Anything wrong with the model call or its output is the upstream's fault from the client's view.
        case ErrorCode::upstream:
        case ErrorCode::script:
        case ErrorCode::extraction:
        case ErrorCode::parse: return {502, "upstream", e.what()};
    }
    return {500, "storage", e.what()};
}

Json to_json(const ApiError& error) {
    return Json{{"error", Json{{"code", error.code}, {"message", error.message}}}};
}

void HttpApi::mount(httplib::Server& server) {
    auto& svc = service_;

    server.Post("/api/v1/users", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        Registration form;
        form.name = string_field(body, "name");
        form.major = string_field(body, "major");
        form.year = string_field(body, "year");
        form.coach_name = string_field(body, "coach_name");
        form.coach_personality = string_field(body, "coach_personality");
        send_json(res, 201, to_json(svc.register_user(form)));
    }));

    server.Get("/api/v1/users/:id", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, user_json(svc.user_state(path_param(req, "id"))));
    }));

    server.Put("/api/v1/users/:id/speech", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        auto it = body.find("enabled");
        if (it == body.end() || !it->is_boolean()) fail(ErrorCode::validation, "enabled must be a boolean");
        send_json(res, 200, to_json(svc.set_speech(path_param(req, "id"), it->get<bool>())));
    }));

    server.Get("/api/v1/users/:id/lessons", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, plan_json(svc.lesson_plan(path_param(req, "id"))));
    }));

    server.Post("/api/v1/users/:id/lessons/:lesson/confidence",
                guarded([&svc](const httplib::Request& req, httplib::Response& res) {
                    const auto& name = path_param(req, "lesson");
                    const auto lesson = lesson_from_string(name);
                    if (!lesson) fail(ErrorCode::not_found, "unknown lesson " + name);
                    const auto body = parse_body(req);
                    auto it = body.find("score");
                    if (it == body.end() || !it->is_number_integer()) {
                        fail(ErrorCode::validation, "score must be an integer between 1 and 5");
                    }
                    const auto score = it->get<long long>();
                    if (score < kMinConfidence || score > kMaxConfidence) {
                        fail(ErrorCode::validation, "score must be an integer between 1 and 5");
                    }
                    send_json(res, 200,
                              to_json(svc.submit_confidence(path_param(req, "id"), *lesson, static_cast<int>(score))));
                }));

    server.Get("/api/v1/users/:id/dashboard", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, to_json(svc.dashboard(path_param(req, "id"))));
    }));

    const auto poll = options_.poll_interval;
    server.Get("/api/v1/users/:id/cues", guarded([&svc, poll](const httplib::Request& req, httplib::Response& res) {
        const std::string user_id = path_param(req, "id");
        std::uint64_t after = 0;
        if (req.has_param("seq")) after = parse_seq(req.get_param_value("seq"));
        const bool follow = !req.has_param("follow") || req.get_param_value("follow") != "0";
        // Existence check: a cursor past the end yields nothing but still 404s for unknown users.
        svc.cues_after(user_id, std::numeric_limits<std::uint64_t>::max());

        auto cursor = std::make_shared<std::uint64_t>(after);
        res.status = 200;
        res.set_chunked_content_provider(
            "application/x-ndjson", [&svc, poll, user_id, follow, cursor](std::size_t, httplib::DataSink& sink) {
                if (follow && svc.shutting_down()) {
                    sink.done();
                    return true;
                }
                std::vector<CueEvent> cues;
                try {
                    cues = svc.cues_after(user_id, *cursor, follow ? poll : std::chrono::milliseconds(0));
                } catch (const std::exception& e) {
                    spdlog::warn("cue stream for {} stopped: {}", user_id, e.what());
                    return false;
                }
                for (const auto& c : cues) {
                    const auto line = to_json(c).dump() + "\n";
                    if (!sink.write(line.data(), line.size())) return false;
                    *cursor = c.seq;
                }
                if (!follow) {
                    sink.done();
                    return true;
                }
                return sink.is_writable();
            });
    }));

    server.Post("/api/v1/sessions", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        const auto user_id = string_field(body, "user_id");
        const auto kind_name = string_field(body, "kind");
        const auto kind = SessionKind::parse(kind_name);
        if (!kind) fail(ErrorCode::validation, "unknown session kind " + kind_name);
        const auto started = svc.start_session(user_id, *kind);
        Json out = Json::object();
        out["session"] = to_json(started.session);
        out["greeting"] = started.greeting;
        out["cues"] = cues_json(started.cues);
        out["ended"] = started.session.ended;
        send_json(res, 201, out);
    }));

    server.Get("/api/v1/sessions/:id", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, to_json(svc.session(path_param(req, "id"))));
    }));

    server.Post("/api/v1/sessions/:id/messages", guarded([&svc](const httplib::Request& req, httplib::Response& res) {
        const auto body = parse_body(req);
        const auto result = svc.post_student_message(path_param(req, "id"), string_field(body, "text"));
        Json out = Json::object();
        out["reply"] = result.reply;
        out["cues"] = cues_json(result.cues);
        out["ended"] = result.ended;
        send_json(res, 200, out);
    }));

    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        if (res.status == 404) {
            send_json(res, 404, to_json(ApiError{404, "not_found", "no route for " + req.method + " " + req.path}));
        }
    });
}

}  // namespace coach
