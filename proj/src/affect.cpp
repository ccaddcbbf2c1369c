#include "coach/affect.hpp"

#include "coach/error.hpp"
#include "coach/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace coach {

namespace {

std::string_view emotion_file_stem(Emotion e) {
    switch (e) {
        case Emotion::happiness: return "emotion_happiness.tsv";
        case Emotion::sadness: return "emotion_sadness.tsv";
        case Emotion::anger: return "emotion_anger.tsv";
        case Emotion::fear: return "emotion_fear.tsv";
        case Emotion::surprise: return "emotion_surprise.tsv";
        case Emotion::neutral: break;
    }
    return "";
}

struct TsvLine {
    std::string token;
    std::optional<double> value;
};

std::vector<TsvLine> read_tsv(const std::filesystem::path& path, bool value_required) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::not_found, "cannot read lexicon file " + path.string());
    std::vector<TsvLine> lines;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        TsvLine entry{text::trim(line.substr(0, tab)), std::nullopt};
        if (tab != std::string::npos) {
            const std::string value = text::trim(line.substr(tab + 1));
            try {
                std::size_t used = 0;
                entry.value = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                fail(ErrorCode::validation, path.filename().string() + ":" + std::to_string(lineno) +
                                                ": bad value '" + value + "'");
            }
        }
        if (value_required && !entry.value) {
            fail(ErrorCode::validation, path.filename().string() + ":" + std::to_string(lineno) + ": missing value");
        }
        const auto toks = text::tokenize(entry.token);
        if (toks.size() != 1 || toks.front() != entry.token) {
            fail(ErrorCode::validation, path.filename().string() + ":" + std::to_string(lineno) + ": '" +
                                            entry.token + "' is not a single normalized token");
        }
        lines.push_back(std::move(entry));
    }
    return lines;
}

}  // namespace

std::string_view to_string(Polarity p) noexcept {
    switch (p) {
        case Polarity::positive: return "positive";
        case Polarity::neutral: return "neutral";
        case Polarity::negative: return "negative";
    }
    return "neutral";
}

std::string_view to_string(Emotion e) noexcept {
    switch (e) {
        case Emotion::happiness: return "happiness";
        case Emotion::fear: return "fear";
        case Emotion::surprise: return "surprise";
        case Emotion::sadness: return "sadness";
        case Emotion::anger: return "anger";
        case Emotion::neutral: return "neutral";
    }
    return "neutral";
}

std::optional<Polarity> polarity_from_string(std::string_view s) noexcept {
    for (auto p : {Polarity::positive, Polarity::neutral, Polarity::negative}) {
        if (to_string(p) == s) return p;
    }
    return std::nullopt;
}

std::optional<Emotion> emotion_from_string(std::string_view s) noexcept {
    for (auto e : {Emotion::happiness, Emotion::fear, Emotion::surprise, Emotion::sadness, Emotion::anger,
                   Emotion::neutral}) {
        if (to_string(e) == s) return e;
    }
    return std::nullopt;
}

std::string_view to_string(CueKind k) noexcept {
    switch (k) {
        case CueKind::say: return "say";
        case CueKind::expression: return "expression";
        case CueKind::gesture: return "gesture";
    }
    return "say";
}

Polarity polarity_of(double compound) noexcept {
    if (compound >= kPolarityThreshold) return Polarity::positive;
    if (compound <= -kPolarityThreshold) return Polarity::negative;
    return Polarity::neutral;
}

AffectAnalyzer::AffectAnalyzer(ValenceLexicon valence,
                               std::array<std::unordered_map<std::string, double>, 5> emotion_keywords,
                               std::string version)
    : valence_(std::move(valence)), emotion_keywords_(std::move(emotion_keywords)), version_(std::move(version)) {
    if (valence_.entries.empty()) fail(ErrorCode::validation, "valence lexicon is empty");
    for (const auto& [token, v] : valence_.entries) {
        if (!(v >= -4.0 && v <= 4.0)) fail(ErrorCode::validation, "valence out of [-4, 4] for " + token);
        if (valence_.boosters.count(token) || valence_.negators.count(token)) {
            fail(ErrorCode::validation, "token '" + token + "' is both a sentiment word and a modifier");
        }
    }
    for (const auto& [token, inc] : valence_.boosters) {
        if (valence_.negators.count(token)) {
            fail(ErrorCode::validation, "token '" + token + "' is both a booster and a negator");
        }
    }
}

AffectAnalyzer AffectAnalyzer::load(const std::filesystem::path& dir) {
    std::ifstream vin(dir / "VERSION");
    std::string version;
    if (!vin || !std::getline(vin, version) || text::trim(version).empty()) {
        fail(ErrorCode::not_found, "lexicon VERSION missing in " + dir.string());
    }

    ValenceLexicon lex;
    for (auto& e : read_tsv(dir / "valence.tsv", true)) lex.entries.insert_or_assign(e.token, *e.value);
    for (auto& e : read_tsv(dir / "boosters.tsv", true)) lex.boosters.insert_or_assign(e.token, *e.value);
    for (auto& e : read_tsv(dir / "negators.tsv", false)) lex.negators.insert(e.token);

    std::array<std::unordered_map<std::string, double>, 5> emotions;
    for (std::size_t i = 0; i < kEmotionPriority.size(); ++i) {
        for (auto& e : read_tsv(dir / emotion_file_stem(kEmotionPriority[i]), true)) {
            emotions[i].insert_or_assign(e.token, *e.value);
        }
        if (emotions[i].empty()) {
            fail(ErrorCode::validation, "empty emotion lexicon " + std::string(emotion_file_stem(kEmotionPriority[i])));
        }
    }
    return AffectAnalyzer(std::move(lex), std::move(emotions), text::trim(version));
}

double AffectAnalyzer::compound_sentiment(std::string_view input) const {
    const auto tokens = text::tokenize(input);
    double sum = 0.0;
    double pending_boost = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& tok = tokens[i];
        if (auto b = valence_.boosters.find(tok); b != valence_.boosters.end()) {
            pending_boost += b->second;
            continue;
        }
        if (auto e = valence_.entries.find(tok); e != valence_.entries.end() && e->second != 0.0) {
            const double base = e->second;
            double v = base + (base > 0.0 ? pending_boost : -pending_boost);
            if (v * base < 0.0) v = 0.0;  // a dampener never flips the sign
            const std::size_t from = i >= kNegationWindow ? i - kNegationWindow : 0;
            const bool negated = std::any_of(tokens.begin() + static_cast<std::ptrdiff_t>(from),
                                             tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                             [&](const std::string& t) { return valence_.negators.count(t) > 0; });
            if (negated) v *= kNegationFactor;
            sum += v;
        }
        pending_boost = 0.0;
    }
    if (sum == 0.0) return 0.0;
    const double score = sum / std::sqrt(sum * sum + kNormalizationAlpha);
    return std::clamp(score, -1.0, 1.0);
}

Emotion AffectAnalyzer::classify_emotion(std::string_view input) const {
    std::array<double, 5> scores{};
    for (const auto& tok : text::tokenize(input)) {
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (auto it = emotion_keywords_[i].find(tok); it != emotion_keywords_[i].end()) scores[i] += it->second;
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
        if (scores[i] > scores[best]) best = i;  // strict: earlier entries win ties
    }
    return scores[best] > 0.0 ? kEmotionPriority[best] : Emotion::neutral;
}

AffectReading AffectAnalyzer::analyze(std::string_view text) const {
    const double c = compound_sentiment(text);
    return AffectReading{c, polarity_of(c), classify_emotion(text)};
}

std::vector<RobotCue> map_to_cues(const AffectReading& reading) {
    std::string expression;
    switch (reading.emotion) {
        case Emotion::happiness: expression = "happy"; break;
        case Emotion::sadness: expression = "sad"; break;
        case Emotion::anger: expression = "angry"; break;
        case Emotion::fear: expression = "afraid"; break;
        case Emotion::surprise: expression = "surprised"; break;
        case Emotion::neutral:
            expression = reading.polarity == Polarity::positive   ? "happy"
                         : reading.polarity == Polarity::negative ? "sad"
                                                                  : "neutral";
            break;
    }
    std::string gesture = reading.polarity == Polarity::positive   ? "encourage"
                          : reading.polarity == Polarity::negative ? "calm"
                                                                   : "nod";
    return {RobotCue{CueKind::expression, std::move(expression)}, RobotCue{CueKind::gesture, std::move(gesture)}};
}

std::vector<RobotCue> opening_cues() {
    return {RobotCue{CueKind::expression, "happy"}, RobotCue{CueKind::gesture, "wave"}};
}

}  // namespace coach
