#pragma once

#include "coach/analytics.hpp"
#include "coach/domain.hpp"
#include "coach/events.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace coach {

class EventStore;

struct CueEvent {
    std::uint64_t seq = 0;  // per-user cue sequence, starting at 1
    std::string session_id;
    RobotCue cue;

    friend bool operator==(const CueEvent&, const CueEvent&) = default;
};

struct SessionState {
    Session session;
    std::string system_prompt;

    friend bool operator==(const SessionState&, const SessionState&) = default;
};

/// Everything known about one user, obtained by folding their event log.
struct UserState {
    UserAccount account;
    std::optional<UserProfile> profile;
    std::vector<SessionState> sessions;  // in start order
    std::array<LessonRecord, 6> lessons;  // indexed by canonical lesson order
    std::optional<LessonOrder> order;
    std::optional<MoodReport> mood;
    std::vector<InsightEntry> insights;
    std::vector<CueEvent> cues;
    std::uint64_t last_seq = 0;

    const SessionState* find_session(std::string_view session_id) const;
    SessionState* find_session(std::string_view session_id);
    const LessonRecord& lesson(LessonId id) const { return lessons[canonical_index(id)]; }

    friend bool operator==(const UserState&, const UserState&) = default;
};

/// Applies one event. Events must arrive in seq order starting with
/// user_registered; anything else is a storage error.
///
/// A lesson record switches to the new session (status in_progress,
/// confidence cleared) when that session's opening coach turn lands.
/// Elapsed minutes run from session start to the latest turn, and freeze
/// at the coach turn carrying the termination marker. Each coach turn
/// produces expression and gesture cues (from the preceding student turn's
/// affect, or the greeting pair for an opening turn) followed by a say cue
/// unless speech is disabled.
void apply(UserState& state, const EventRecord& event);

UserState fold(const std::vector<EventRecord>& events);

/// Reads and folds the user's log; not_found when the user has no events.
UserState replay(const EventStore& store, const std::string& user_id);

/// Problems with a state that should be impossible; empty for a valid state.
std::vector<std::string> check_invariants(const UserState& state);

DashboardSnapshot build_snapshot(const UserState& state);

/// Student messages of the session currently linked to each lesson.
std::vector<EngagementStats> engagement_stats(const UserState& state);

/// "Coach: ..." / "Student: ..." lines for one session, coach text as displayed.
std::string transcript(const SessionState& session);

/// All sessions' transcripts in start order, separated by blank lines.
std::string full_history(const UserState& state);

UserProfile profile_from_json(const std::string& user_id, const Json& raw, Timestamp at);

Json to_json(const UserAccount& account);
Json to_json(const UserProfile& profile);
Json to_json(const LessonRecord& record);
Json to_json(const Session& session);
Json to_json(const CueEvent& cue);
Json to_json(const UserState& state);

}  // namespace coach
