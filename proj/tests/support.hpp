// Shared fixtures for the unit tests and the acceptance runner.
#pragma once

#include "coach/session.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace coach::testing {

namespace fs = std::filesystem;

inline fs::path data_dir() { return COACH_DATA_DIR; }
inline fs::path fixture_dir() { return COACH_FIXTURE_DIR; }

inline std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& p, std::string_view content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
}

/// Unique scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = fs::temp_directory_path() /
                ("coach-test-" + std::to_string(rd()) + "-" + std::to_string(counter.fetch_add(1)));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

/// Deterministic clock: starts at a fixed instant and advances by `step` per reading.
class FakeClock {
public:
    explicit FakeClock(std::chrono::milliseconds step = std::chrono::seconds(30))
        : now_(std::make_shared<std::atomic<long long>>(kStart)), step_(step.count()) {}

    Clock clock() const {
        return [now = now_, step = step_] { return Timestamp(std::chrono::milliseconds(now->fetch_add(step))); };
    }
    void advance(std::chrono::milliseconds d) const { now_->fetch_add(d.count()); }

    static constexpr long long kStart = 1'767'225'600'000;  // 2026-01-01T00:00:00Z

private:
    std::shared_ptr<std::atomic<long long>> now_;
    long long step_;
};

/// Ids u-1, s-2, ... so logs are reproducible.
inline IdGenerator sequential_ids() {
    auto n = std::make_shared<std::atomic<int>>(0);
    return [n](std::string_view prefix) { return std::string(prefix) + "-" + std::to_string(n->fetch_add(1) + 1); };
}

inline TemplateLibrary shipped_templates() { return TemplateLibrary::load(data_dir() / "templates"); }
inline AffectAnalyzer shipped_affect() { return AffectAnalyzer::load(data_dir() / "lexicon"); }

inline ScriptedBackend::Script journey_script() {
    return ScriptedBackend::load_script(fixture_dir() / "scripts" / "journey.json");
}

/// Student lines matching journey.json, keyed by session kind name.
inline std::vector<std::string> journey_student(const std::string& kind) {
    const auto doc = nlohmann::json::parse(read_file(fixture_dir() / "scripts" / "journey_student.json"));
    return doc.at(kind).get<std::vector<std::string>>();
}

inline Registration alex() { return Registration{"Alex", "Computer Science", "third", "Robo", "friendly"}; }

/// Store + scripted backend + service over a scratch directory.
struct Harness {
    explicit Harness(ScriptedBackend::Script script = journey_script(),
                     std::chrono::milliseconds clock_step = std::chrono::seconds(30))
        : clock(clock_step),
          store(std::make_unique<EventStore>(dir.path(), clock.clock())),
          backend(std::make_unique<ScriptedBackend>(std::move(script))) {
        restart_service();
    }

    /// Rebuilds the service from what is on disk (a process restart).
    void restart_service() {
        service.reset();
        CoachService::Options opts;
        opts.ids = ids;
        service = std::make_unique<CoachService>(*store, shipped_templates(), shipped_affect(), *backend, opts);
    }

    TempDir dir;
    FakeClock clock;
    IdGenerator ids = sequential_ids();
    std::unique_ptr<EventStore> store;
    std::unique_ptr<ScriptedBackend> backend;
    std::unique_ptr<CoachService> service;
};

struct RunResult {
    std::string session_id;
    std::vector<PostResult> replies;
    StartedSession started;
};

/// Starts a session of `kind` and posts every student line; waits for background jobs.
inline RunResult run_session(CoachService& svc, const std::string& user_id, const SessionKind& kind,
                             const std::vector<std::string>& lines) {
    RunResult r;
    r.started = svc.start_session(user_id, kind);
    r.session_id = r.started.session.session_id;
    for (const auto& line : lines) {
        r.replies.push_back(svc.post_student_message(r.session_id, line));
        if (r.replies.back().ended) break;
    }
    svc.wait_for_background();
    return r;
}

}  // namespace coach::testing
