#include "coach/error.hpp"
#include "coach/state.hpp"
#include "coach/store.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace coach;
using coach::testing::fixture_dir;
using coach::testing::read_file;

namespace {

std::vector<EventRecord> golden_events() {
    return EventStore::parse_log(read_file(fixture_dir() / "golden" / "users" / "u-amna.ndjson"));
}

}  // namespace

TEST(Replay, GoldenLogMatchesGoldenDashboard) {
    EventStore store(fixture_dir() / "golden");
    const auto state = replay(store, "u-amna");
    EXPECT_TRUE(check_invariants(state).empty());
    const auto golden = Json::parse(read_file(fixture_dir() / "golden" / "dashboard_u-amna.json"));
    EXPECT_EQ(to_json(build_snapshot(state)), golden);
    EXPECT_EQ(to_json(build_snapshot(state)).dump(2) + "\n", read_file(fixture_dir() / "golden" / "dashboard_u-amna.json"));
}

TEST(Replay, GoldenLogState) {
    const auto state = fold(golden_events());
    EXPECT_EQ(state.account.name, "Amna");
    EXPECT_EQ(state.account.year, Year::third);
    EXPECT_FALSE(state.account.speech_enabled);
    ASSERT_TRUE(state.profile);
    EXPECT_EQ(state.profile->interests, (std::vector<std::string>{"theatre"}));
    ASSERT_EQ(state.sessions.size(), 3u);
    EXPECT_TRUE(state.sessions[0].session.ended);
    EXPECT_FALSE(state.sessions[2].session.ended);

    const auto& tb = state.lesson(LessonId::task_breakdown);
    EXPECT_EQ(tb.status, LessonStatus::mastered);
    EXPECT_EQ(tb.confidence, 4);
    EXPECT_DOUBLE_EQ(tb.elapsed_minutes, 15.0);
    // Mid-lesson: not ended, elapsed accruing up to the latest turn.
    const auto& blk = state.lesson(LessonId::time_blocking);
    EXPECT_EQ(blk.status, LessonStatus::in_progress);
    EXPECT_DOUBLE_EQ(blk.elapsed_minutes, 3.0);
    EXPECT_EQ(state.lesson(LessonId::eat_that_frog).status, LessonStatus::not_started);

    ASSERT_TRUE(state.order);
    EXPECT_EQ(state.order->order[2], LessonId::eat_that_frog);
    EXPECT_EQ(state.last_seq, 22u);
}

TEST(Replay, CuesFollowTheTable) {
    const auto state = fold(golden_events());
    // Intro opening (3 cues), reply to "I love theatre." (3), lesson openings and replies...
    ASSERT_GE(state.cues.size(), 6u);
    EXPECT_EQ(state.cues[0].cue, (RobotCue{CueKind::expression, "happy"}));
    EXPECT_EQ(state.cues[1].cue, (RobotCue{CueKind::gesture, "wave"}));
    EXPECT_EQ(state.cues[2].cue.kind, CueKind::say);
    EXPECT_EQ(state.cues[3].cue, (RobotCue{CueKind::expression, "happy"}));
    EXPECT_EQ(state.cues[4].cue, (RobotCue{CueKind::gesture, "encourage"}));
    EXPECT_EQ(state.cues[5].cue, (RobotCue{CueKind::say, "Lovely! I'll support you every step of the way."}));
    for (std::size_t i = 0; i < state.cues.size(); ++i) EXPECT_EQ(state.cues[i].seq, i + 1);
}

TEST(Replay, DeterministicBytes) {
    const auto a = to_json(fold(golden_events())).dump();
    const auto b = to_json(fold(golden_events())).dump();
    EXPECT_EQ(a, b);
}

TEST(Replay, EveryPrefixIsValid) {
    const auto events = golden_events();
    for (std::size_t n = 1; n <= events.size(); ++n) {
        const std::vector<EventRecord> prefix(events.begin(), events.begin() + static_cast<std::ptrdiff_t>(n));
        const auto state = fold(prefix);
        const auto problems = check_invariants(state);
        EXPECT_TRUE(problems.empty()) << "prefix " << n << ": " << problems.front();
        EXPECT_NO_THROW(build_snapshot(state));
    }
}

TEST(Replay, EveryByteTruncationParsesToAPrefix) {
    const auto content = read_file(fixture_dir() / "golden" / "users" / "u-amna.ndjson");
    const auto all = EventStore::parse_log(content);
    for (std::size_t cut = 0; cut <= content.size(); ++cut) {
        const auto events = EventStore::parse_log(std::string_view(content).substr(0, cut));
        ASSERT_LE(events.size(), all.size());
        ASSERT_TRUE(std::equal(events.begin(), events.end(), all.begin()));
        if (!events.empty()) ASSERT_TRUE(check_invariants(fold(events)).empty()) << "cut at " << cut;
    }
}

TEST(Fold, RejectsImpossibleLogs) {
    auto events = golden_events();
    // Must start with registration.
    EXPECT_THROW(fold({events.begin() + 1, events.end()}), CoachError);
    // Student turn before any coach turn.
    std::vector<EventRecord> bad(events.begin(), events.begin() + 2);
    auto turn = events[3];
    turn.seq = 3;
    bad.push_back(turn);
    EXPECT_THROW(fold(bad), CoachError);
    // Confidence before the lesson ended.
    std::vector<EventRecord> early(events.begin(), events.begin() + 12);
    auto conf = events[17];
    conf.seq = 13;
    early.push_back(conf);
    EXPECT_THROW(fold(early), CoachError);
}

TEST(Fold, RestartingAMasteredLessonResetsIt) {
    auto events = golden_events();
    auto next = [&](EventKind kind, Json payload) {
        EventRecord e{events.back().seq + 1, events.back().at + std::chrono::minutes(1), kind, std::move(payload)};
        events.push_back(e);
    };
    next(EventKind::session_started, Json{{"session_id", "s-tb2"}, {"kind", "task_breakdown"}, {"system_prompt", "p"}});
    auto mid = fold(events);
    // Until the new opening turn lands, the record still points at the mastered session.
    EXPECT_EQ(mid.lesson(LessonId::task_breakdown).status, LessonStatus::mastered);
    next(EventKind::coach_turn, Json{{"session_id", "s-tb2"}, {"text", "Welcome back!"}});
    const auto state = fold(events);
    const auto& r = state.lesson(LessonId::task_breakdown);
    EXPECT_EQ(r.status, LessonStatus::in_progress);
    EXPECT_FALSE(r.confidence);
    EXPECT_EQ(r.session_id, "s-tb2");
    EXPECT_DOUBLE_EQ(r.elapsed_minutes, 1.0);
    EXPECT_TRUE(check_invariants(state).empty());
    // Speech was off, so the opening produced no say cue.
    EXPECT_EQ(state.cues.back().cue, (RobotCue{CueKind::gesture, "wave"}));
}

TEST(Profile, FieldSynonymsAndDefaults) {
    const auto p = profile_from_json("u", Json::parse(R"({"user_profile": {
        "Hobbies": ["chess", "running"], "Academic Journey": "Biology", "Daily Routine": "early riser",
        "Goals": {"short_term": "pass exams"}, "Challenges": "procrastination"}})"),
                                     Timestamp{});
    EXPECT_EQ(p.interests, (std::vector<std::string>{"chess", "running"}));
    EXPECT_EQ(p.academics, "Biology");
    EXPECT_EQ(p.routine, "early riser");
    EXPECT_NE(p.goals.find("pass exams"), std::string::npos);
    EXPECT_EQ(p.obstacles, (std::vector<std::string>{"procrastination"}));
    EXPECT_EQ(p.motivations, kUnknown);
    EXPECT_EQ(p.prior_tools, kUnknown);
}

TEST(History, TranscriptsUseDisplayText) {
    const auto state = fold(golden_events());
    const auto t = transcript(state.sessions[0]);
    EXPECT_EQ(t, "Coach: Hi Amna! What do you enjoy doing outside class?\nStudent: I love theatre.\n"
                 "Coach: Lovely! I'll support you every step of the way.\n");
    const auto h = full_history(state);
    EXPECT_EQ(h.rfind("[intro session]\n", 0), 0u);
    EXPECT_NE(h.find("\n[task_breakdown session]\n"), std::string::npos);
    EXPECT_NE(h.find("\n[time_blocking session]\n"), std::string::npos);
}
