#include "coach/state.hpp"

#include "coach/error.hpp"
#include "coach/store.hpp"
#include "coach/text.hpp"

#include <algorithm>
#include <cmath>

namespace coach {

namespace {

// Folded key spellings accepted for each profile field.
const std::vector<std::string> kInterestKeys{"interests", "hobbies", "personalinterests", "interestsandhobbies",
                                             "hobbiesandinterests", "personalinterestsandhobbies"};
const std::vector<std::string> kAcademicKeys{"academics", "academic", "academicjourney", "academicinterests",
                                             "academicbackground", "favoritesubjects", "studies", "extracurriculars"};
const std::vector<std::string> kRoutineKeys{"routine", "dailyroutine", "typicalday", "habits", "dailyhabits",
                                            "schedule", "dailyschedule"};
const std::vector<std::string> kGoalKeys{"goals", "shorttermgoals", "longtermgoals", "productivitygoals",
                                         "aspirations", "shortandlongtermgoals"};
const std::vector<std::string> kMotivationKeys{"motivations", "motivation", "motivators", "whatmotivates"};
const std::vector<std::string> kObstacleKeys{"obstacles", "challenges", "obstaclesandchallenges", "struggles",
                                             "currentobstacles", "currentchallenges"};
const std::vector<std::string> kToolKeys{"priortools", "previoustools", "productivitytools", "previousexperience",
                                         "priorexperience", "toolsused", "pastexperience",
                                         "experiencewithproductivitytools", "previousexperiencewithtools",
                                         "priorexperiences", "previousexperiences"};

std::string to_text(const Json& v) {
    if (v.is_string()) return text::trim(v.get<std::string>());
    if (v.is_null()) return {};
    if (v.is_array()) {
        std::string out;
        for (const auto& item : v) {
            auto part = to_text(item);
            if (part.empty()) continue;
            if (!out.empty()) out += "; ";
            out += part;
        }
        return out;
    }
    if (v.is_object()) {
        std::string out;
        for (const auto& [key, item] : v.items()) {
            auto part = to_text(item);
            if (part.empty()) continue;
            if (!out.empty()) out += "; ";
            out += key + ": " + part;
        }
        return out;
    }
    return v.dump();
}

std::vector<const Json*> matching(const Json& obj, const std::vector<std::string>& keys) {
    std::vector<const Json*> found;
    for (const auto& [key, value] : obj.items()) {
        if (std::find(keys.begin(), keys.end(), text::fold_identifier(key)) != keys.end()) found.push_back(&value);
    }
    return found;
}

std::string text_field(const Json& obj, const std::vector<std::string>& keys) {
    std::string out;
    for (const Json* v : matching(obj, keys)) {
        auto part = to_text(*v);
        if (part.empty()) continue;
        if (!out.empty()) out += "; ";
        out += part;
    }
    return out.empty() ? std::string(kUnknown) : out;
}

std::vector<std::string> list_field(const Json& obj, const std::vector<std::string>& keys) {
    std::vector<std::string> out;
    for (const Json* v : matching(obj, keys)) {
        if (v->is_array()) {
            for (const auto& item : *v) {
                if (auto t = to_text(item); !t.empty()) out.push_back(std::move(t));
            }
        } else if (auto t = to_text(*v); !t.empty()) {
            out.push_back(std::move(t));
        }
    }
    if (out.empty()) out.emplace_back(kUnknown);
    return out;
}

Json string_list(const std::vector<std::string>& items) {
    Json arr = Json::array();
    for (const auto& s : items) arr.push_back(s);
    return arr;
}

std::vector<std::string> strings_of(const Json& arr) {
    std::vector<std::string> out;
    for (const auto& item : arr) out.push_back(item.get<std::string>());
    return out;
}

[[noreturn]] void corrupt(const EventRecord& e, const std::string& why) {
    fail(ErrorCode::storage, "event " + std::to_string(e.seq) + " (" + std::string(to_string(e.kind)) + "): " + why);
}

SessionState& session_of(UserState& state, const EventRecord& e) {
    const auto id = e.payload["session_id"].get<std::string>();
    auto* s = state.find_session(id);
    if (!s) corrupt(e, "unknown session " + id);
    return *s;
}

LessonRecord* linked_record(UserState& state, const Session& session) {
    const auto lesson = session.kind.lesson();
    if (!lesson) return nullptr;
    auto& record = state.lessons[canonical_index(*lesson)];
    return record.session_id == session.session_id ? &record : nullptr;
}

void push_cue(UserState& state, const std::string& session_id, RobotCue cue) {
    const std::uint64_t seq = state.cues.empty() ? 1 : state.cues.back().seq + 1;
    state.cues.push_back(CueEvent{seq, session_id, std::move(cue)});
}

}  // namespace

const SessionState* UserState::find_session(std::string_view session_id) const {
    for (const auto& s : sessions) {
        if (s.session.session_id == session_id) return &s;
    }
    return nullptr;
}

SessionState* UserState::find_session(std::string_view session_id) {
    return const_cast<SessionState*>(std::as_const(*this).find_session(session_id));
}

UserProfile profile_from_json(const std::string& user_id, const Json& raw, Timestamp at) {
    if (!raw.is_object()) fail(ErrorCode::validation, "user profile must be a JSON object");
    const Json* fields = &raw;
    // {"user_profile": {...}} and similar single-key wrappers
    if (raw.size() == 1 && raw.begin().value().is_object()) fields = &raw.begin().value();

    UserProfile p;
    p.user_id = user_id;
    p.raw = raw;
    p.interests = list_field(*fields, kInterestKeys);
    p.academics = text_field(*fields, kAcademicKeys);
    p.routine = text_field(*fields, kRoutineKeys);
    p.goals = text_field(*fields, kGoalKeys);
    p.motivations = text_field(*fields, kMotivationKeys);
    p.obstacles = list_field(*fields, kObstacleKeys);
    p.prior_tools = text_field(*fields, kToolKeys);
    p.extracted_at = at;
    return p;
}

void apply(UserState& state, const EventRecord& e) {
    if (e.seq != state.last_seq + 1) corrupt(e, "out of sequence");
    if (state.last_seq == 0 && e.kind != EventKind::user_registered) corrupt(e, "log must start with registration");
    const Json& p = e.payload;

    switch (e.kind) {
        case EventKind::user_registered: {
            if (state.last_seq != 0) corrupt(e, "duplicate registration");
            auto& a = state.account;
            a.user_id = p["user_id"].get<std::string>();
            a.name = p["name"].get<std::string>();
            a.major = p["major"].get<std::string>();
            a.year = parse_year(p["year"].get<std::string>());
            a.coach_name = p["coach_name"].get<std::string>();
            a.coach_personality = p["coach_personality"].get<std::string>();
            a.speech_enabled = true;
            for (auto lesson : kAllLessons) {
                LessonRecord r;
                r.user_id = a.user_id;
                r.lesson = lesson;
                state.lessons[canonical_index(lesson)] = r;
            }
            break;
        }
        case EventKind::session_started: {
            const auto id = p["session_id"].get<std::string>();
            if (state.find_session(id)) corrupt(e, "session " + id + " started twice");
            SessionState s;
            s.session.session_id = id;
            s.session.user_id = state.account.user_id;
            s.session.kind = *SessionKind::parse(p["kind"].get<std::string>());
            s.session.started_at = e.at;
            s.system_prompt = p["system_prompt"].get<std::string>();
            state.sessions.push_back(std::move(s));
            break;
        }
        case EventKind::student_turn: {
            auto& s = session_of(state, e);
            if (s.session.ended) corrupt(e, "student turn after session end");
            if (s.session.turns.empty() || s.session.turns.back().role != Role::coach) {
                corrupt(e, "student turn must follow a coach turn");
            }
            const auto& affect = p["affect"];
            AffectReading reading{affect["compound"].get<double>(),
                                  *polarity_from_string(affect["polarity"].get<std::string>()),
                                  *emotion_from_string(affect["emotion"].get<std::string>())};
            s.session.turns.push_back(ConversationTurn{Role::student, p["text"].get<std::string>(), e.at, reading});
            if (auto* record = linked_record(state, s.session)) {
                record->elapsed_minutes = minutes_between(s.session.started_at, e.at);
            }
            break;
        }
        case EventKind::coach_turn: {
            auto& s = session_of(state, e);
            if (s.session.ended) corrupt(e, "coach turn after session end");
            if (!s.session.turns.empty() && s.session.turns.back().role != Role::student) {
                corrupt(e, "coach turns must alternate with student turns");
            }
            const bool opening = s.session.turns.empty();
            const std::string text = p["text"].get<std::string>();
            std::optional<AffectReading> previous;
            if (!opening) previous = s.session.turns.back().affect;
            s.session.turns.push_back(ConversationTurn{Role::coach, text, e.at, std::nullopt});
            if (detect_termination(text)) {
                s.session.ended = true;
                s.session.ended_at = e.at;
            }

            if (const auto lesson = s.session.kind.lesson(); lesson && opening) {
                auto& record = state.lessons[canonical_index(*lesson)];
                record.session_id = s.session.session_id;
                record.status = LessonStatus::in_progress;
                record.confidence.reset();
            }
            if (auto* record = linked_record(state, s.session)) {
                record->elapsed_minutes = minutes_between(s.session.started_at, e.at);
            }

            const auto cues = opening ? opening_cues() : map_to_cues(*previous);
            for (const auto& cue : cues) push_cue(state, s.session.session_id, cue);
            if (state.account.speech_enabled) {
                push_cue(state, s.session.session_id, RobotCue{CueKind::say, display_text(text)});
            }
            break;
        }
        case EventKind::session_ended: {
            const auto& s = session_of(state, e);
            if (!s.session.ended) corrupt(e, "session_ended without a terminating coach turn");
            break;
        }
        case EventKind::confidence_submitted: {
            const auto lesson = *lesson_from_string(p["lesson"].get<std::string>());
            auto& record = state.lessons[canonical_index(lesson)];
            const auto* s = record.session_id ? state.find_session(*record.session_id) : nullptr;
            if (!s || !s->session.ended) corrupt(e, "confidence for a lesson whose session has not ended");
            record.confidence = p["score"].get<int>();
            record.status = LessonStatus::mastered;
            break;
        }
        case EventKind::profile_extracted: {
            const auto& prof = p["profile"];
            UserProfile profile;
            profile.user_id = state.account.user_id;
            profile.raw = prof["raw"];
            profile.interests = strings_of(prof["interests"]);
            profile.academics = prof["academics"].get<std::string>();
            profile.routine = prof["routine"].get<std::string>();
            profile.goals = prof["goals"].get<std::string>();
            profile.motivations = prof["motivations"].get<std::string>();
            profile.obstacles = strings_of(prof["obstacles"]);
            profile.prior_tools = prof["prior_tools"].get<std::string>();
            profile.extracted_at = e.at;
            state.profile = std::move(profile);
            break;
        }
        case EventKind::mood_computed:
            state.mood = MoodReport{*mood_overall_from_string(p["overall"].get<std::string>()),
                                    p["detailed"].get<std::string>(), p["fallback"].get<bool>()};
            break;
        case EventKind::insights_added: {
            const auto after = *SessionKind::parse(p["after"].get<std::string>());
            for (const auto& entry : p["entries"]) {
                state.insights.push_back(InsightEntry{entry["insight"].get<std::string>(),
                                                      entry["suggestion"].get<std::string>(), after, e.at});
            }
            break;
        }
        case EventKind::order_recommended: {
            LessonOrder order;
            for (std::size_t i = 0; i < order.order.size(); ++i) {
                order.order[i] = *lesson_from_string(p["order"][i].get<std::string>());
            }
            order.fallback = p["fallback"].get<bool>();
            state.order = order;
            break;
        }
        case EventKind::speech_toggled:
            state.account.speech_enabled = p["enabled"].get<bool>();
            break;
    }
    state.last_seq = e.seq;
}

UserState fold(const std::vector<EventRecord>& events) {
    UserState state;
    for (const auto& e : events) apply(state, e);
    return state;
}

UserState replay(const EventStore& store, const std::string& user_id) {
    return fold(store.read(user_id));
}

std::vector<std::string> check_invariants(const UserState& state) {
    std::vector<std::string> problems;
    const auto& a = state.account;
    if (state.last_seq == 0) return problems;
    for (const auto* field : {&a.name, &a.major, &a.coach_name, &a.coach_personality}) {
        if (text::trim(*field).empty()) problems.emplace_back("account has an empty required field");
    }

    for (const auto& ss : state.sessions) {
        const auto& s = ss.session;
        for (std::size_t i = 0; i < s.turns.size(); ++i) {
            const Role expected = i % 2 == 0 ? Role::coach : Role::student;
            if (s.turns[i].role != expected) problems.push_back(s.session_id + ": turns do not alternate");
            if (s.turns[i].affect.has_value() != (s.turns[i].role == Role::student)) {
                problems.push_back(s.session_id + ": affect present on a non-student turn or missing");
            }
        }
        const bool marker = std::any_of(s.turns.begin(), s.turns.end(), [](const ConversationTurn& t) {
            return t.role == Role::coach && detect_termination(t.text);
        });
        if (marker != s.ended) problems.push_back(s.session_id + ": ended flag disagrees with termination marker");
        if (s.ended_at.has_value() != s.ended) problems.push_back(s.session_id + ": ended_at set iff ended violated");
        if (s.ended_at && *s.ended_at < s.started_at) problems.push_back(s.session_id + ": ended before started");
    }

    for (auto lesson : kAllLessons) {
        const auto& r = state.lesson(lesson);
        const std::string name(to_string(lesson));
        if (r.lesson != lesson) problems.push_back(name + ": record in wrong slot");
        if (r.confidence && (*r.confidence < kMinConfidence || *r.confidence > kMaxConfidence)) {
            problems.push_back(name + ": confidence out of range");
        }
        if (r.status == LessonStatus::mastered) {
            const auto* s = r.session_id ? state.find_session(*r.session_id) : nullptr;
            if (!s || !s->session.ended || !r.confidence) {
                problems.push_back(name + ": mastered without an ended session and a confidence score");
            }
        }
        if ((r.elapsed_minutes == 0.0) != (r.status == LessonStatus::not_started)) {
            problems.push_back(name + ": elapsed_minutes is zero iff not_started violated");
        }
        if (r.elapsed_minutes < 0.0) problems.push_back(name + ": negative elapsed time");
    }

    if (state.mood && !satisfies_taxonomy(*state.mood)) problems.emplace_back("mood violates taxonomy");
    for (std::size_t i = 1; i < state.cues.size(); ++i) {
        if (state.cues[i].seq != state.cues[i - 1].seq + 1) problems.emplace_back("cue seqs are not consecutive");
    }
    return problems;
}

std::vector<EngagementStats> engagement_stats(const UserState& state) {
    std::vector<EngagementStats> stats;
    for (auto lesson : kAllLessons) {
        const auto& r = state.lesson(lesson);
        std::vector<std::string> student;
        if (const auto* s = r.session_id ? state.find_session(*r.session_id) : nullptr) {
            for (const auto& t : s->session.turns) {
                if (t.role == Role::student) student.push_back(t.text);
            }
        }
        stats.push_back(engagement_for(lesson, student));
    }
    return stats;
}

DashboardSnapshot build_snapshot(const UserState& state) {
    DashboardSnapshot snap;
    const auto p = progress(state.lessons);
    snap.progress_mastered = p.mastered;
    snap.progress_remaining = p.remaining;
    snap.mood = state.mood;
    for (auto lesson : kAllLessons) {
        const auto& r = state.lesson(lesson);
        snap.time_per_lesson[lesson] = r.elapsed_minutes;
        snap.confidence_per_lesson[lesson] = r.confidence;
    }
    snap.top_engagement = rank_engagement(engagement_stats(state));
    snap.insights = state.insights;
    return snap;
}

std::string transcript(const SessionState& session) {
    std::string out;
    for (const auto& t : session.session.turns) {
        if (t.role == Role::coach) {
            out += "Coach: " + display_text(t.text) + "\n";
        } else {
            out += "Student: " + t.text + "\n";
        }
    }
    return out;
}

std::string full_history(const UserState& state) {
    std::string out;
    for (const auto& s : state.sessions) {
        if (s.session.turns.empty()) continue;
        if (!out.empty()) out += "\n";
        out += "[" + std::string(s.session.kind.name()) + " session]\n";
        out += transcript(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

Json to_json(const UserAccount& a) {
    Json out = Json::object();
    out["user_id"] = a.user_id;
    out["name"] = a.name;
    out["major"] = a.major;
    out["year"] = to_string(a.year);
    out["coach_name"] = a.coach_name;
    out["coach_personality"] = a.coach_personality;
    out["speech_enabled"] = a.speech_enabled;
    return out;
}

Json to_json(const UserProfile& p) {
    Json out = Json::object();
    out["raw"] = p.raw;
    out["interests"] = string_list(p.interests);
    out["academics"] = p.academics;
    out["routine"] = p.routine;
    out["goals"] = p.goals;
    out["motivations"] = p.motivations;
    out["obstacles"] = string_list(p.obstacles);
    out["prior_tools"] = p.prior_tools;
    out["extracted_at"] = format_timestamp(p.extracted_at);
    return out;
}

Json to_json(const LessonRecord& r) {
    Json out = Json::object();
    out["lesson"] = to_string(r.lesson);
    out["status"] = to_string(r.status);
    out["confidence"] = r.confidence ? Json(*r.confidence) : Json();
    out["elapsed_minutes"] = r.elapsed_minutes;
    out["session_id"] = r.session_id ? Json(*r.session_id) : Json();
    return out;
}

Json to_json(const Session& s) {
    Json turns = Json::array();
    for (const auto& t : s.turns) {
        Json turn = Json::object();
        turn["role"] = to_string(t.role);
        turn["text"] = t.text;
        turn["at"] = format_timestamp(t.at);
        if (t.affect) {
            turn["affect"] = Json{{"compound", t.affect->compound},
                                  {"polarity", to_string(t.affect->polarity)},
                                  {"emotion", to_string(t.affect->emotion)}};
        }
        turns.push_back(std::move(turn));
    }
    Json out = Json::object();
    out["session_id"] = s.session_id;
    out["user_id"] = s.user_id;
    out["kind"] = s.kind.name();
    out["started_at"] = format_timestamp(s.started_at);
    out["ended_at"] = s.ended_at ? Json(format_timestamp(*s.ended_at)) : Json();
    out["ended"] = s.ended;
    out["turns"] = std::move(turns);
    return out;
}

Json to_json(const CueEvent& c) {
    Json out = Json::object();
    out["seq"] = c.seq;
    out["type"] = to_string(c.cue.kind);
    out[c.cue.kind == CueKind::say ? "text" : "name"] = c.cue.value;
    return out;
}

Json to_json(const UserState& state) {
    Json sessions = Json::array();
    for (const auto& s : state.sessions) sessions.push_back(to_json(s.session));
    Json lessons = Json::array();
    for (const auto& r : state.lessons) lessons.push_back(to_json(r));
    Json order = Json();
    if (state.order) {
        Json ids = Json::array();
        for (auto l : state.order->order) ids.push_back(to_string(l));
        order = Json{{"order", ids}, {"fallback", state.order->fallback}};
    }
    Json out = Json::object();
    out["account"] = to_json(state.account);
    out["profile"] = state.profile ? to_json(*state.profile) : Json();
    out["sessions"] = std::move(sessions);
    out["lessons"] = std::move(lessons);
    out["lesson_order"] = std::move(order);
    out["last_seq"] = state.last_seq;
    out["dashboard"] = to_json(build_snapshot(state));
    return out;
}

}  // namespace coach
