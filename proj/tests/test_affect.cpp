#include "coach/affect.hpp"
#include "coach/error.hpp"
#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace coach;

namespace {

const AffectAnalyzer& analyzer() {
    static const AffectAnalyzer a = coach::testing::shipped_affect();
    return a;
}

const oracle::Lexicon& lexicon() {
    static const oracle::Lexicon lx = oracle::load_lexicon(coach::testing::data_dir() / "lexicon");
    return lx;
}

Emotion oracle_emotion(const std::string& text) {
    static const Emotion order[] = {Emotion::happiness, Emotion::sadness, Emotion::anger, Emotion::fear,
                                    Emotion::surprise};
    const int i = oracle::emotion_index(lexicon(), text);
    return i < 0 ? Emotion::neutral : order[i];
}

std::vector<std::string> vocabulary() {
    std::vector<std::string> v = {"i", "my", "the", "plan", "study", "today", "and", "but", "it", "really"};
    for (const auto& [k, _] : lexicon().valence) v.push_back(k);
    for (const auto& [k, _] : lexicon().boosters) v.push_back(k);
    for (const auto& k : lexicon().negators) v.push_back(k);
    for (const auto& e : lexicon().emotions) {
        for (const auto& [k, _] : e) v.push_back(k);
    }
    return v;
}

std::string random_sentence(std::mt19937& rng, const std::vector<std::string>& vocab, int max_words) {
    std::string s;
    const int n = std::uniform_int_distribution<int>(0, max_words)(rng);
    static const char* seps[] = {" ", " ", ", ", "! ", ". ", " - "};
    for (int i = 0; i < n; ++i) {
        auto w = vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)];
        if (rng() % 4 == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        s += w;
        s += seps[rng() % 6];
    }
    return s;
}

}  // namespace

TEST(Affect, LexiconVersionIsPinned) { EXPECT_EQ(analyzer().version(), "coach-lexicon 1.0.0"); }

TEST(Affect, WorkedExamples) {
    EXPECT_EQ(analyzer().compound_sentiment(""), 0.0);
    const double great = analyzer().compound_sentiment("I feel great about my plan");
    EXPECT_GT(great, 0.05);
    EXPECT_DOUBLE_EQ(great, oracle::compound(lexicon(), "I feel great about my plan"));
    const double not_happy = analyzer().compound_sentiment("I am not happy with my progress");
    EXPECT_LT(not_happy, 0.0);
    EXPECT_DOUBLE_EQ(not_happy, oracle::compound(lexicon(), "I am not happy with my progress"));

    EXPECT_EQ(analyzer().classify_emotion(""), Emotion::neutral);
    EXPECT_EQ(analyzer().classify_emotion("I'm so excited and happy today"), Emotion::happiness);
    EXPECT_EQ(analyzer().classify_emotion("I'm terrified of failing this exam"), Emotion::fear);
    EXPECT_EQ(oracle_emotion("I'm so excited and happy today"), Emotion::happiness);
    EXPECT_EQ(oracle_emotion("I'm terrified of failing this exam"), Emotion::fear);
}

TEST(Affect, CompoundMatchesOracleOnRandomSentences) {
    std::mt19937 rng(99);
    const auto vocab = vocabulary();
    for (int i = 0; i < 3000; ++i) {
        const auto s = random_sentence(rng, vocab, 14);
        ASSERT_NEAR(analyzer().compound_sentiment(s), oracle::compound(lexicon(), s), 1e-12) << s;
        ASSERT_EQ(analyzer().classify_emotion(s), oracle_emotion(s)) << s;
    }
}

TEST(Affect, NormalizationFormula) {
    // A single token of valence v scores v / sqrt(v^2 + 15).
    for (const auto& [word, v] : lexicon().valence) {
        if (lexicon().boosters.count(word) || lexicon().negators.count(word) || v == 0.0) continue;
        ASSERT_NEAR(analyzer().compound_sentiment(word), v / std::sqrt(v * v + 15.0), 1e-12) << word;
    }
}

TEST(Affect, NegationWindowIsThreeTokens) {
    const double v = lexicon().valence.at("happy");
    auto score = [](double s) { return s / std::sqrt(s * s + 15.0); };
    EXPECT_NEAR(analyzer().compound_sentiment("not happy"), score(-0.74 * v), 1e-12);
    EXPECT_NEAR(analyzer().compound_sentiment("not at all happy"), score(-0.74 * v), 1e-12);
    EXPECT_NEAR(analyzer().compound_sentiment("not one two three happy"), score(v), 1e-12);
    EXPECT_NEAR(analyzer().compound_sentiment("isn't happy"), score(-0.74 * v), 1e-12);
}

TEST(Affect, BoostersScaleTheFollowingToken) {
    const double v = lexicon().valence.at("happy");
    const double b = lexicon().boosters.at("very");
    auto score = [](double s) { return s / std::sqrt(s * s + 15.0); };
    EXPECT_NEAR(analyzer().compound_sentiment("very happy"), score(v + b), 1e-12);
    const double sad = lexicon().valence.at("sad");
    EXPECT_NEAR(analyzer().compound_sentiment("very sad"), score(sad - b), 1e-12);
    // A booster not followed directly by a sentiment token does nothing.
    EXPECT_NEAR(analyzer().compound_sentiment("very plan happy"), score(v), 1e-12);
}

TEST(Affect, RangeOnFuzzedUnicode) {
    std::mt19937 rng(4242);
    const auto vocab = vocabulary();
    for (int i = 0; i < 3000; ++i) {
        std::string s = oracle::random_text(rng, 40).text + random_sentence(rng, vocab, 30);
        // Long runs of the same strong word push the sum far from zero.
        if (i % 10 == 0) {
            for (int k = 0; k < 200; ++k) s += i % 20 == 0 ? " amazing" : " terrible";
        }
        // Random raw bytes, including malformed UTF-8.
        for (int k = std::uniform_int_distribution<int>(0, 8)(rng); k > 0; --k) s += static_cast<char>(rng() & 0xFF);
        const auto r = analyzer().analyze(s);
        ASSERT_GE(r.compound, -1.0);
        ASSERT_LE(r.compound, 1.0);
        ASSERT_EQ(r.polarity, polarity_of(r.compound));
    }
}

TEST(Affect, PolarityBoundariesAreExact) {
    EXPECT_EQ(polarity_of(0.05), Polarity::positive);
    EXPECT_EQ(polarity_of(std::nextafter(0.05, 0.0)), Polarity::neutral);
    EXPECT_EQ(polarity_of(-0.05), Polarity::negative);
    EXPECT_EQ(polarity_of(std::nextafter(-0.05, 0.0)), Polarity::neutral);
    EXPECT_EQ(polarity_of(0.0), Polarity::neutral);
    EXPECT_EQ(polarity_of(1.0), Polarity::positive);
    EXPECT_EQ(polarity_of(-1.0), Polarity::negative);
}

TEST(Affect, MonotoneUnderAppendedPositiveToken) {
    std::mt19937 rng(5);
    const auto vocab = vocabulary();
    std::vector<std::string> positives;
    for (const auto& [k, v] : lexicon().valence) {
        if (v > 0 && !lexicon().boosters.count(k) && !lexicon().negators.count(k)) positives.push_back(k);
    }
    for (int i = 0; i < 2000; ++i) {
        // Three neutral filler tokens keep the appended word outside any negation scope.
        const auto base = random_sentence(rng, vocab, 12) + " plan plan plan ";
        const auto extended = base + positives[rng() % positives.size()];
        ASSERT_GE(analyzer().compound_sentiment(extended), analyzer().compound_sentiment(base)) << extended;
    }
}

TEST(Affect, EmotionIgnoresWordOrder) {
    std::mt19937 rng(11);
    const auto vocab = vocabulary();
    for (int i = 0; i < 1000; ++i) {
        auto words = oracle::ascii_words(random_sentence(rng, vocab, 10));
        std::string a, b;
        for (const auto& w : words) a += w + " ";
        std::shuffle(words.begin(), words.end(), rng);
        for (const auto& w : words) b += w + " ";
        ASSERT_EQ(analyzer().classify_emotion(a), analyzer().classify_emotion(b));
    }
}

TEST(Affect, EmotionTiesFollowPriority) {
    // One keyword each: happiness beats sadness beats anger beats fear beats surprise.
    EXPECT_EQ(analyzer().classify_emotion("happy sad"), Emotion::happiness);
    EXPECT_EQ(analyzer().classify_emotion("angry sad"), Emotion::sadness);
    EXPECT_EQ(analyzer().classify_emotion("scared angry"), Emotion::anger);
    EXPECT_EQ(analyzer().classify_emotion("surprised scared"), Emotion::fear);
    EXPECT_EQ(analyzer().classify_emotion("surprised"), Emotion::surprise);
    EXPECT_EQ(analyzer().classify_emotion("sad sad happy"), Emotion::sadness);
}

TEST(Affect, HandLabelledSignAgreement) {
    const auto lines = coach::testing::read_file(coach::testing::fixture_dir() / "affect_labelled.tsv");
    std::istringstream in(lines);
    std::string line;
    int total = 0, agree = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        ++total;
        const double c = analyzer().compound_sentiment(line.substr(2));
        if ((line[0] == '+' && c > 0) || (line[0] == '-' && c < 0)) ++agree;
    }
    EXPECT_EQ(total, 30);
    EXPECT_GE(agree * 10, total * 9) << agree << "/" << total;
}

TEST(Cues, WorkedExamples) {
    using C = std::vector<RobotCue>;
    EXPECT_EQ(map_to_cues({0.8, Polarity::positive, Emotion::happiness}),
              (C{{CueKind::expression, "happy"}, {CueKind::gesture, "encourage"}}));
    EXPECT_EQ(map_to_cues({0.0, Polarity::neutral, Emotion::neutral}),
              (C{{CueKind::expression, "neutral"}, {CueKind::gesture, "nod"}}));
    EXPECT_EQ(map_to_cues({-0.6, Polarity::negative, Emotion::sadness}),
              (C{{CueKind::expression, "sad"}, {CueKind::gesture, "calm"}}));
    EXPECT_EQ(opening_cues(), (C{{CueKind::expression, "happy"}, {CueKind::gesture, "wave"}}));
}

TEST(Cues, FullTable) {
    const std::map<Emotion, std::string> by_emotion{{Emotion::happiness, "happy"}, {Emotion::sadness, "sad"},
                                                    {Emotion::anger, "angry"},     {Emotion::fear, "afraid"},
                                                    {Emotion::surprise, "surprised"}};
    const std::map<Polarity, std::string> neutral_face{
        {Polarity::positive, "happy"}, {Polarity::negative, "sad"}, {Polarity::neutral, "neutral"}};
    const std::map<Polarity, std::string> gesture{
        {Polarity::positive, "encourage"}, {Polarity::negative, "calm"}, {Polarity::neutral, "nod"}};
    const std::map<Polarity, double> compound{{Polarity::positive, 0.5}, {Polarity::negative, -0.5},
                                              {Polarity::neutral, 0.0}};
    for (auto e : {Emotion::happiness, Emotion::fear, Emotion::surprise, Emotion::sadness, Emotion::anger,
                   Emotion::neutral}) {
        for (auto p : {Polarity::positive, Polarity::neutral, Polarity::negative}) {
            const auto cues = map_to_cues({compound.at(p), p, e});
            ASSERT_EQ(cues.size(), 2u);
            EXPECT_EQ(cues[0].kind, CueKind::expression);
            EXPECT_EQ(cues[0].value, e == Emotion::neutral ? neutral_face.at(p) : by_emotion.at(e));
            EXPECT_EQ(cues[1].kind, CueKind::gesture);
            EXPECT_EQ(cues[1].value, gesture.at(p));
            EXPECT_NE(std::find(kExpressions.begin(), kExpressions.end(), cues[0].value), kExpressions.end());
            EXPECT_NE(std::find(kGestures.begin(), kGestures.end(), cues[1].value), kGestures.end());
        }
    }
}

TEST(Affect, LexiconValidation) {
    ValenceLexicon bad;
    bad.entries = {{"good", 5.0}};
    EXPECT_THROW(AffectAnalyzer(bad, {}, "x"), CoachError);
    ValenceLexicon empty;
    EXPECT_THROW(AffectAnalyzer(empty, {}, "x"), CoachError);
    EXPECT_THROW(AffectAnalyzer::load("/nonexistent/lexicon"), CoachError);
}
