#include "coach/session.hpp"

#include "coach/error.hpp"
#include "coach/text.hpp"

#include <spdlog/spdlog.h>

#include <condition_variable>
#include <random>

namespace coach {

struct CoachService::UserSlot {
    mutable std::mutex mu;
    mutable std::condition_variable cue_cv;
    UserState state;
};

namespace {

std::uint64_t last_cue_seq(const UserState& state) { return state.cues.empty() ? 0 : state.cues.back().seq; }

std::vector<CueEvent> cues_since(const UserState& state, std::uint64_t after) {
    if (after >= state.cues.size()) return {};
    return {state.cues.begin() + static_cast<std::ptrdiff_t>(after), state.cues.end()};
}

Json affect_json(const AffectReading& r) {
    Json out = Json::object();
    out["compound"] = r.compound;
    out["polarity"] = to_string(r.polarity);
    out["emotion"] = to_string(r.emotion);
    return out;
}

Json profile_payload(const UserProfile& p) {
    Json profile = Json::object();
    profile["raw"] = p.raw;
    profile["interests"] = p.interests;
    profile["academics"] = p.academics;
    profile["routine"] = p.routine;
    profile["goals"] = p.goals;
    profile["motivations"] = p.motivations;
    profile["obstacles"] = p.obstacles;
    profile["prior_tools"] = p.prior_tools;
    return Json{{"profile", std::move(profile)}};
}

PendingEvent session_event(EventKind kind, const std::string& session_id) {
    Json payload = Json::object();
    payload["session_id"] = session_id;
    return {kind, std::move(payload)};
}

// Appends session_ended (and, for the intro, profile_extracted) when the coach text terminates the session.
void add_termination_events(std::vector<PendingEvent>& events, const std::string& user_id, const Session& session,
                            const std::string& coach_text) {
    if (!detect_termination(coach_text)) return;
    events.push_back(session_event(EventKind::session_ended, session.session_id));
    if (!session.kind.is_intro()) return;
    const auto marker = coach_text.find(kTerminationMarker);
    try {
        // The profile follows the marker; fall back to the whole reply if the model put it first.
        Json raw;
        try {
            raw = extract_json_object(std::string_view(coach_text).substr(marker)).value;
        } catch (const CoachError&) {
            raw = extract_json_object(coach_text).value;
        }
        const auto profile = profile_from_json(user_id, raw, Timestamp{});
        events.push_back({EventKind::profile_extracted, profile_payload(profile)});
    } catch (const CoachError& e) {
        spdlog::warn("intro session {} ended without a usable JSON profile: {}", session.session_id, e.what());
    }
}

std::string require_field(const std::string& value, std::string_view field) {
    auto trimmed = text::trim(value);
    if (trimmed.empty()) fail(ErrorCode::validation, std::string(field) + " must not be empty");
    return trimmed;
}

}  // namespace

IdGenerator random_ids() {
    struct Source {
        std::mutex mu;
        std::mt19937_64 rng{std::random_device{}()};
    };
    auto source = std::make_shared<Source>();
    return [source](std::string_view prefix) {
        std::uint64_t value = 0;
        {
            std::lock_guard lock(source->mu);
            value = source->rng();
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
        return std::string(prefix) + "-" + buf;
    };
}

CoachService::CoachService(EventStore& store, TemplateLibrary templates, AffectAnalyzer affect, ChatBackend& backend,
                           Options options)
    : store_(store),
      templates_(std::move(templates)),
      affect_(std::move(affect)),
      backend_(backend),
      options_(std::move(options)),
      jobs_(options_.background_threads) {
    for (const auto& user_id : store_.users()) {
        auto slot = std::make_shared<UserSlot>();
        try {
            slot->state = replay(store_, user_id);
        } catch (const CoachError& e) {
            spdlog::error("skipping user {}: {}", user_id, e.what());
            continue;
        }
        for (const auto& s : slot->state.sessions) session_owner_[s.session.session_id] = user_id;
        users_[user_id] = std::move(slot);
    }
    if (!users_.empty()) spdlog::info("loaded {} users from {}", users_.size(), store_.data_dir().string());
}

CoachService::~CoachService() {
    shutdown();
    jobs_.wait_idle();
}

std::shared_ptr<CoachService::UserSlot> CoachService::slot(const std::string& user_id) const {
    std::lock_guard lock(mu_);
    auto it = users_.find(user_id);
    if (it == users_.end()) fail(ErrorCode::not_found, "unknown user " + user_id);
    return it->second;
}

std::shared_ptr<CoachService::UserSlot> CoachService::slot_for_session(const std::string& session_id) const {
    std::lock_guard lock(mu_);
    auto owner = session_owner_.find(session_id);
    if (owner == session_owner_.end()) fail(ErrorCode::not_found, "unknown session " + session_id);
    return users_.at(owner->second);
}

std::vector<EventRecord> CoachService::commit(UserSlot& slot, std::vector<PendingEvent> events) {
    auto records = store_.append(slot.state.account.user_id, std::move(events));
    for (const auto& r : records) apply(slot.state, r);
    slot.cue_cv.notify_all();
    return records;
}

PlaceholderMap CoachService::bindings_for(const UserState& state) const {
    const auto& a = state.account;
    PlaceholderMap b{
        {"coach_name", a.coach_name}, {"coach_personality", a.coach_personality}, {"username", a.name},
        {"major", a.major},           {"year", std::string(to_string(a.year))},
    };
    if (state.profile) b["user_profile"] = state.profile->raw.dump();
    return b;
}

UserAccount CoachService::register_user(const Registration& form) {
    Json payload = Json::object();
    const auto name = require_field(form.name, "name");
    const auto major = require_field(form.major, "major");
    const auto coach_name = require_field(form.coach_name, "coach_name");
    const auto personality = require_field(form.coach_personality, "coach_personality");
    const auto user_id = options_.ids("u");
    payload["user_id"] = user_id;
    payload["name"] = name;
    payload["major"] = major;
    payload["year"] = to_string(parse_year(form.year));
    payload["coach_name"] = coach_name;
    payload["coach_personality"] = personality;

    auto slot = std::make_shared<UserSlot>();
    slot->state.account.user_id = user_id;
    {
        std::lock_guard lock(slot->mu);
        commit(*slot, {{EventKind::user_registered, std::move(payload)}});
    }
    std::lock_guard lock(mu_);
    users_[user_id] = slot;
    return slot->state.account;
}

StartedSession CoachService::start_session(const std::string& user_id, const SessionKind& kind) {
    auto s = slot(user_id);
    PlaceholderMap bindings;
    {
        std::lock_guard lock(s->mu);
        if (kind.lesson() && !s->state.profile) {
            fail(ErrorCode::state, "lesson sessions need the profile from a finished introductory conversation");
        }
        bindings = bindings_for(s->state);
    }
    const std::string prompt = templates_.render(TemplateId::for_session(kind), bindings);
    const std::string session_id = options_.ids("s");

    ChatRequest req;
    req.system_prompt = prompt;
    req.temperature = kCoachingTemperature;
    req.max_output_tokens = options_.coaching_max_tokens;
    req.template_id = std::string(kind.name());
    req.conversation_id = session_id;
    const auto reply = backend_.complete(req);

    StartedSession out;
    {
        std::lock_guard lock(s->mu);
        const auto before = last_cue_seq(s->state);
        Json started = Json::object();
        started["session_id"] = session_id;
        started["kind"] = kind.name();
        started["system_prompt"] = prompt;
        Json turn = Json::object();
        turn["session_id"] = session_id;
        turn["text"] = reply.text;
        std::vector<PendingEvent> events{{EventKind::session_started, std::move(started)},
                                         {EventKind::coach_turn, std::move(turn)}};
        Session pending;
        pending.session_id = session_id;
        pending.kind = kind;
        add_termination_events(events, user_id, pending, reply.text);
        commit(*s, std::move(events));
        out.session = s->state.find_session(session_id)->session;
        out.cues = cues_since(s->state, before);
    }
    {
        std::lock_guard lock(mu_);
        session_owner_[session_id] = user_id;
    }
    out.greeting = display_text(reply.text);
    if (out.session.ended) schedule_session_end_jobs(user_id, session_id);
    return out;
}

PostResult CoachService::post_student_message(const std::string& session_id, const std::string& text) {
    if (text::trim(text).empty()) fail(ErrorCode::validation, "message text must not be empty");
    auto s = slot_for_session(session_id);
    {
        std::lock_guard lock(mu_);
        if (!in_flight_.insert(session_id).second) {
            fail(ErrorCode::busy, "a message for session " + session_id + " is already being processed");
        }
    }
    struct Release {
        CoachService* self;
        const std::string& id;
        ~Release() {
            std::lock_guard lock(self->mu_);
            self->in_flight_.erase(id);
        }
    } release{this, session_id};

    ChatRequest req;
    std::string user_id;
    Session snapshot;
    {
        std::lock_guard lock(s->mu);
        const auto* ss = s->state.find_session(session_id);
        if (ss->session.ended) fail(ErrorCode::state, "session " + session_id + " has ended");
        snapshot = ss->session;
        user_id = s->state.account.user_id;
        req.system_prompt = ss->system_prompt;
    }
    for (const auto& t : snapshot.turns) req.history.push_back({t.role, t.text});
    req.history.push_back({Role::student, text});
    req.temperature = kCoachingTemperature;
    req.max_output_tokens = options_.coaching_max_tokens;
    req.template_id = std::string(snapshot.kind.name());
    req.conversation_id = session_id;

    const auto reading = affect_.analyze(text);
    const auto reply = backend_.complete(req);

    PostResult out;
    {
        std::lock_guard lock(s->mu);
        const auto before = last_cue_seq(s->state);
        Json student = Json::object();
        student["session_id"] = session_id;
        student["text"] = text;
        student["affect"] = affect_json(reading);
        Json coach = Json::object();
        coach["session_id"] = session_id;
        coach["text"] = reply.text;
        std::vector<PendingEvent> events{{EventKind::student_turn, std::move(student)},
                                         {EventKind::coach_turn, std::move(coach)}};
        add_termination_events(events, user_id, snapshot, reply.text);
        commit(*s, std::move(events));
        out.ended = s->state.find_session(session_id)->session.ended;
        out.cues = cues_since(s->state, before);
    }
    out.reply = display_text(reply.text);
    if (out.ended) schedule_session_end_jobs(user_id, session_id);
    return out;
}

LessonRecord CoachService::submit_confidence(const std::string& user_id, LessonId lesson, int score) {
    if (score < kMinConfidence || score > kMaxConfidence) {
        fail(ErrorCode::validation, "confidence score must be between 1 and 5");
    }
    auto s = slot(user_id);
    std::lock_guard lock(s->mu);
    const auto& record = s->state.lesson(lesson);
    const auto* session = record.session_id ? s->state.find_session(*record.session_id) : nullptr;
    if (!session || !session->session.ended) {
        fail(ErrorCode::state, "the " + std::string(to_string(lesson)) + " lesson has not ended yet");
    }
    Json payload = Json::object();
    payload["lesson"] = to_string(lesson);
    payload["score"] = score;
    commit(*s, {{EventKind::confidence_submitted, std::move(payload)}});
    return s->state.lesson(lesson);
}

UserAccount CoachService::set_speech(const std::string& user_id, bool enabled) {
    auto s = slot(user_id);
    std::lock_guard lock(s->mu);
    commit(*s, {{EventKind::speech_toggled, Json{{"enabled", enabled}}}});
    return s->state.account;
}

UserState CoachService::user_state(const std::string& user_id) const {
    auto s = slot(user_id);
    std::lock_guard lock(s->mu);
    return s->state;
}

Session CoachService::session(const std::string& session_id) const {
    auto s = slot_for_session(session_id);
    std::lock_guard lock(s->mu);
    return s->state.find_session(session_id)->session;
}

LessonPlan CoachService::lesson_plan(const std::string& user_id) const {
    auto s = slot(user_id);
    std::lock_guard lock(s->mu);
    LessonPlan plan;
    plan.recommended = s->state.order.has_value();
    plan.order = s->state.order.value_or(LessonOrder{});
    plan.profile_ready = s->state.profile.has_value();
    for (auto lesson : plan.order.order) plan.lessons.push_back(s->state.lesson(lesson));
    return plan;
}

DashboardSnapshot CoachService::dashboard(const std::string& user_id) const {
    auto s = slot(user_id);
    std::lock_guard lock(s->mu);
    return build_snapshot(s->state);
}

std::vector<CueEvent> CoachService::cues_after(const std::string& user_id, std::uint64_t after_seq,
                                               std::chrono::milliseconds timeout) const {
    auto s = slot(user_id);
    std::unique_lock lock(s->mu);
    if (timeout.count() > 0) {
        s->cue_cv.wait_for(lock, timeout,
                           [&] { return shutting_down_.load() || last_cue_seq(s->state) > after_seq; });
    }
    return cues_since(s->state, after_seq);
}

void CoachService::wait_for_background() { jobs_.wait_idle(); }

void CoachService::shutdown() {
    shutting_down_ = true;
    std::lock_guard lock(mu_);
    for (auto& [id, s] : users_) {
        std::lock_guard slot_lock(s->mu);
        s->cue_cv.notify_all();
    }
}

bool CoachService::shutting_down() const { return shutting_down_.load(); }

void CoachService::schedule_session_end_jobs(const std::string& user_id, const std::string& session_id) {
    jobs_.submit(user_id, [this, user_id, session_id] {
        auto s = slot(user_id);
        UserState state;
        {
            std::lock_guard lock(s->mu);
            state = s->state;
        }
        const auto* ss = state.find_session(session_id);
        if (!ss) return;
        const SessionKind kind = ss->session.kind;

        if (kind.is_intro() && state.profile) {
            try {
                const auto order = recommend_lesson_order(backend_, templates_, state.profile->raw, user_id);
                Json ids = Json::array();
                for (auto l : order.order) ids.push_back(to_string(l));
                std::lock_guard lock(s->mu);
                commit(*s, {{EventKind::order_recommended, Json{{"order", ids}, {"fallback", order.fallback}}}});
            } catch (const CoachError& e) {
                spdlog::warn("lesson ordering for {} failed: {}", user_id, e.what());
            }
        }

        try {
            const auto pairs = generate_insights(backend_, templates_, transcript(*ss), user_id);
            if (!pairs.empty()) {
                Json entries = Json::array();
                for (const auto& p : pairs) entries.push_back(Json{{"insight", p.insight}, {"suggestion", p.suggestion}});
                std::lock_guard lock(s->mu);
                commit(*s, {{EventKind::insights_added, Json{{"after", kind.name()}, {"entries", entries}}}});
            }
        } catch (const CoachError& e) {
            spdlog::warn("insight generation for {} failed: {}", user_id, e.what());
        }

        try {
            const auto mood = classify_mood(backend_, templates_, full_history(state), user_id);
            Json payload = to_json(mood);
            std::lock_guard lock(s->mu);
            commit(*s, {{EventKind::mood_computed, std::move(payload)}});
        } catch (const CoachError& e) {
            spdlog::warn("mood analysis for {} failed; keeping the previous report: {}", user_id, e.what());
        }
    });
}

}  // namespace coach
