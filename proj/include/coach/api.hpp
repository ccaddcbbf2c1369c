#pragma once

#include "coach/session.hpp"

#include <chrono>
#include <exception>
#include <string>

namespace httplib {
class Server;
}

namespace coach {

struct ApiError {
    int status = 500;
    std::string code;  // validation, not_found, state, busy, upstream, storage
    std::string message;
};

/// Maps any exception escaping the service onto the HTTP error contract.
ApiError to_api_error(const std::exception& e);

Json to_json(const ApiError& error);

/// REST endpoints and the NDJSON cue stream, mounted under /api/v1.
///
///   POST /users                                  register
///   GET  /users/{id}                             account + profile
///   PUT  /users/{id}/speech                      {enabled}
///   GET  /users/{id}/lessons                     ordered plan with statuses
///   POST /users/{id}/lessons/{lesson}/confidence {score}
///   GET  /users/{id}/dashboard                   DashboardSnapshot
///   GET  /users/{id}/cues?seq=N&follow=0|1       cue stream, resumes after seq N
///   POST /sessions                               {user_id, kind}
///   GET  /sessions/{id}                          transcript
///   POST /sessions/{id}/messages                 {text} -> {reply, cues, ended}
class HttpApi {
public:
    struct Options {
        // How long a follow stream waits for new cues before re-checking the connection.
        std::chrono::milliseconds poll_interval{500};
    };

    explicit HttpApi(CoachService& service) : HttpApi(service, Options{}) {}
    HttpApi(CoachService& service, Options options) : service_(service), options_(options) {}

    void mount(httplib::Server& server);

private:
    CoachService& service_;
    Options options_;
};

}  // namespace coach
