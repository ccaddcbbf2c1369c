#pragma once

#include "coach/affect.hpp"
#include "coach/gateway.hpp"
#include "coach/jobs.hpp"
#include "coach/prompt.hpp"
#include "coach/state.hpp"
#include "coach/store.hpp"

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace coach {

struct Registration {
    std::string name;
    std::string major;
    std::string year;
    std::string coach_name;
    std::string coach_personality;
};

struct StartedSession {
    Session session;
    std::string greeting;  // opening coach line as displayed
    std::vector<CueEvent> cues;
};

struct PostResult {
    std::string reply;  // marker and trailing JSON removed
    std::vector<CueEvent> cues;
    bool ended = false;
};

struct LessonPlan {
    LessonOrder order;       // default order with fallback=true until a recommendation exists
    bool recommended = false;
    bool profile_ready = false;
    std::vector<LessonRecord> lessons;  // in plan order
};

/// Generates opaque ids with the given prefix ("u", "s").
using IdGenerator = std::function<std::string(std::string_view prefix)>;

IdGenerator random_ids();

/// The coaching state machine: registration, intro and lesson conversations,
/// confidence capture, speech toggle, and the background mood / insights /
/// ordering jobs triggered when a session ends.
///
/// Every state change is an event appended to the store and then folded into
/// the in-memory UserState, so the live state always equals a replay of the
/// log. One message may be in flight per session; a second concurrent post
/// to the same session fails with a busy error.
class CoachService {
public:
    struct Options {
        std::size_t background_threads = 2;
        IdGenerator ids = random_ids();
        int coaching_max_tokens = 512;
    };

    CoachService(EventStore& store, TemplateLibrary templates, AffectAnalyzer affect, ChatBackend& backend,
                 Options options);
    CoachService(EventStore& store, TemplateLibrary templates, AffectAnalyzer affect, ChatBackend& backend)
        : CoachService(store, std::move(templates), std::move(affect), backend, Options{}) {}
    ~CoachService();

    UserAccount register_user(const Registration& form);
    StartedSession start_session(const std::string& user_id, const SessionKind& kind);
    PostResult post_student_message(const std::string& session_id, const std::string& text);
    LessonRecord submit_confidence(const std::string& user_id, LessonId lesson, int score);
    UserAccount set_speech(const std::string& user_id, bool enabled);

    UserState user_state(const std::string& user_id) const;
    Session session(const std::string& session_id) const;
    LessonPlan lesson_plan(const std::string& user_id) const;
    DashboardSnapshot dashboard(const std::string& user_id) const;

    /// Cues with seq greater than after_seq; waits up to `timeout` for at least one.
    std::vector<CueEvent> cues_after(const std::string& user_id, std::uint64_t after_seq,
                                     std::chrono::milliseconds timeout = std::chrono::milliseconds(0)) const;

    /// Blocks until all background analytics jobs have finished.
    void wait_for_background();

    /// Wakes cue waiters so long-lived streams can observe shutdown.
    void shutdown();
    bool shutting_down() const;

    const TemplateLibrary& templates() const noexcept { return templates_; }
    const AffectAnalyzer& affect() const noexcept { return affect_; }

private:
    struct UserSlot;

    std::shared_ptr<UserSlot> slot(const std::string& user_id) const;
    std::shared_ptr<UserSlot> slot_for_session(const std::string& session_id) const;
    std::vector<EventRecord> commit(UserSlot& slot, std::vector<PendingEvent> events);
    PlaceholderMap bindings_for(const UserState& state) const;
    void schedule_session_end_jobs(const std::string& user_id, const std::string& session_id);

    EventStore& store_;
    TemplateLibrary templates_;
    AffectAnalyzer affect_;
    ChatBackend& backend_;
    Options options_;

    mutable std::mutex mu_;
    std::unordered_map<std::string, std::shared_ptr<UserSlot>> users_;
    std::unordered_map<std::string, std::string> session_owner_;
    std::unordered_set<std::string> in_flight_;
    std::atomic<bool> shutting_down_{false};

    KeyedSerialExecutor jobs_;
};

}  // namespace coach
