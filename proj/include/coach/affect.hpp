#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace coach {

enum class Polarity { positive, neutral, negative };
enum class Emotion { happiness, fear, surprise, sadness, anger, neutral };

std::string_view to_string(Polarity p) noexcept;
std::string_view to_string(Emotion e) noexcept;
std::optional<Polarity> polarity_from_string(std::string_view s) noexcept;
std::optional<Emotion> emotion_from_string(std::string_view s) noexcept;

inline constexpr double kPolarityThreshold = 0.05;
inline constexpr double kNegationFactor = -0.74;
inline constexpr double kNormalizationAlpha = 15.0;
inline constexpr std::size_t kNegationWindow = 3;

/// positive iff compound >= 0.05, negative iff compound <= -0.05.
Polarity polarity_of(double compound) noexcept;

struct AffectReading {
    double compound = 0.0;
    Polarity polarity = Polarity::neutral;
    Emotion emotion = Emotion::neutral;

    friend bool operator==(const AffectReading&, const AffectReading&) = default;
};

enum class CueKind { say, expression, gesture };

std::string_view to_string(CueKind k) noexcept;

inline constexpr std::array<std::string_view, 6> kExpressions{"happy", "sad", "neutral", "surprised", "afraid", "angry"};
inline constexpr std::array<std::string_view, 5> kGestures{"nod", "wave", "encourage", "calm", "idle"};

struct RobotCue {
    CueKind kind;
    std::string value;  // expression/gesture name, or the text to speak

    friend bool operator==(const RobotCue&, const RobotCue&) = default;
};

struct ValenceLexicon {
    std::unordered_map<std::string, double> entries;   // token -> valence in [-4, 4]
    std::unordered_map<std::string, double> boosters;  // token -> increment
    std::unordered_set<std::string> negators;
};

/// Emotions that have keyword lexicons, in tie-break priority order.
inline constexpr std::array<Emotion, 5> kEmotionPriority{
    Emotion::happiness, Emotion::sadness, Emotion::anger, Emotion::fear, Emotion::surprise,
};

/// Rule-based sentiment and emotion classifier over immutable lexicons.
///
/// Lexicon directory layout (UTF-8, "token<TAB>value" per line, '#' comments):
///   VERSION                 single line identifying the lexicon release
///   valence.tsv             sentiment tokens and valences
///   boosters.tsv            intensity modifiers and their increments
///   negators.tsv            negation tokens (value column optional, ignored)
///   emotion_<name>.tsv      keyword weights, one file per non-neutral emotion
class AffectAnalyzer {
public:
    static AffectAnalyzer load(const std::filesystem::path& dir);
    AffectAnalyzer(ValenceLexicon valence,
                   std::array<std::unordered_map<std::string, double>, 5> emotion_keywords,
                   std::string version);

    /// Compound score in [-1, 1]. Booster increments accumulate over a run of
    /// booster tokens and are added (in the direction of the valence's sign)
    /// to the sentiment token that immediately follows the run; a negator
    /// among the three preceding tokens multiplies the valence by -0.74. The
    /// sum s is normalized as s / sqrt(s^2 + 15).
    double compound_sentiment(std::string_view text) const;

    /// Argmax over keyword-weight sums; all-zero is neutral; ties follow kEmotionPriority.
    Emotion classify_emotion(std::string_view text) const;

    AffectReading analyze(std::string_view text) const;

    const ValenceLexicon& lexicon() const noexcept { return valence_; }
    const std::string& version() const noexcept { return version_; }

private:
    ValenceLexicon valence_;
    std::array<std::unordered_map<std::string, double>, 5> emotion_keywords_;  // indexed like kEmotionPriority
    std::string version_;
};

/// Expression from the emotion (or from polarity when neutral), gesture from polarity.
std::vector<RobotCue> map_to_cues(const AffectReading& reading);

/// Cues accompanying the coach's opening line of a session, where no student affect exists yet.
std::vector<RobotCue> opening_cues();

}  // namespace coach
