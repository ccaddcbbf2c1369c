// Independent reference implementations used to cross-check the library.
// They are written from the metric definitions, deliberately naive, and share
// no code with src/.
#pragma once

#include "coach/types.hpp"

#include <algorithm>
#include <cctype>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace coach::oracle {

// ---------------------------------------------------------------------------
// Labelled glyph alphabet for random text. Each glyph carries whether it is
// part of a word, so the expected tokenization is known by construction.

struct Glyph {
    std::string utf8;
    bool word;
};

inline const std::vector<Glyph>& glyphs() {
    static const std::vector<Glyph> g = [] {
        std::vector<Glyph> out;
        for (char c = 'a'; c <= 'z'; ++c) out.push_back({std::string(1, c), true});
        for (char c = 'A'; c <= 'Z'; ++c) out.push_back({std::string(1, c), true});
        for (char c = '0'; c <= '9'; ++c) out.push_back({std::string(1, c), true});
        for (const char* s : {"é", "ß", "ñ", "ж", "Ж", "λ", "学", "習", "ا", "ü"}) out.push_back({s, true});
        for (const char* s : {" ", " ", " ", ",", ".", "'", "-", "!", "?", "\t", "\n", "(", "\"", "’", "“", "—",
                              "…", "、", "。", "😀", "🚀", "×", "«", "\xc2\xa0"}) {
            out.push_back({s, false});
        }
        return out;
    }();
    return g;
}

struct LabelledText {
    std::string text;
    std::vector<std::string> tokens;  // expected tokenization
};

inline char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

/// Random text plus its expected tokens (ASCII lowercased, other letters untouched).
inline LabelledText random_text(std::mt19937& rng, std::size_t max_glyphs) {
    const auto& g = glyphs();
    std::uniform_int_distribution<std::size_t> len(0, max_glyphs);
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    LabelledText out;
    std::string current;
    const auto n = len(rng);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& gl = g[pick(rng)];
        out.text += gl.utf8;
        if (gl.word) {
            for (char c : gl.utf8) current += ascii_lower(c);
        } else if (!current.empty()) {
            out.tokens.push_back(current);
            current.clear();
        }
    }
    if (!current.empty()) out.tokens.push_back(current);
    return out;
}

// ---------------------------------------------------------------------------
// Engagement

inline std::size_t word_count(const std::vector<std::vector<std::string>>& turn_tokens) {
    std::size_t n = 0;
    for (const auto& t : turn_tokens) n += t.size();
    return n;
}

inline double lexical_diversity(const std::vector<std::vector<std::string>>& turn_tokens) {
    std::set<std::string> distinct;
    std::size_t n = 0;
    for (const auto& t : turn_tokens) {
        for (const auto& w : t) {
            distinct.insert(w);
            ++n;
        }
    }
    return n == 0 ? 0.0 : static_cast<double>(distinct.size()) / static_cast<double>(n);
}

struct Engagement {
    LessonId lesson;
    std::size_t words;
    double diversity;
};

/// Brute force over every ordering of the engaged lessons: the answer is the
/// unique ordering that is (a) sorted into 10% bands built greedily from the
/// largest count and (b) sorted by diversity then canonical order inside each band.
inline std::vector<LessonId> rank_engagement(std::vector<Engagement> stats) {
    std::erase_if(stats, [](const Engagement& e) { return e.words == 0; });
    // Band of each lesson: walk counts from the top, opening a band whenever a
    // count falls below 90% of the band's first count.
    std::vector<std::size_t> counts;
    for (const auto& e : stats) counts.push_back(e.words);
    std::sort(counts.rbegin(), counts.rend());
    std::map<std::size_t, int> band_of_count;
    int band = -1;
    double head = 0;
    for (auto c : counts) {
        if (band < 0 || static_cast<double>(c) < 0.9 * head - 1e-9) {
            ++band;
            head = static_cast<double>(c);
        }
        band_of_count.emplace(c, band);
    }
    auto before = [&](const Engagement& a, const Engagement& b) {
        const int ba = band_of_count.at(a.words), bb = band_of_count.at(b.words);
        if (ba != bb) return ba < bb;
        if (a.diversity != b.diversity) return a.diversity > b.diversity;
        return canonical_index(a.lesson) < canonical_index(b.lesson);
    };
    std::vector<std::size_t> idx(stats.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<LessonId> best;
    bool found = false;
    do {
        bool ok = true;
        for (std::size_t i = 0; i + 1 < idx.size() && ok; ++i) ok = before(stats[idx[i]], stats[idx[i + 1]]);
        if (ok) {
            if (found) return {};  // not unique: signal a broken oracle with an impossible answer
            found = true;
            for (auto i : idx) best.push_back(stats[i].lesson);
        }
    } while (std::next_permutation(idx.begin(), idx.end()));
    if (best.size() > 3) best.resize(3);
    return best;
}

// ---------------------------------------------------------------------------
// Sentiment, read straight from the shipped TSV files.

struct Lexicon {
    std::map<std::string, double> valence;
    std::map<std::string, double> boosters;
    std::set<std::string> negators;
    std::array<std::map<std::string, double>, 5> emotions;  // happiness, sadness, anger, fear, surprise
};

inline std::map<std::string, double> read_tsv(const std::filesystem::path& p) {
    std::map<std::string, double> out;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        const std::string key = line.substr(0, tab);
        out[key] = tab == std::string::npos ? 0.0 : std::stod(line.substr(tab + 1));
    }
    return out;
}

inline Lexicon load_lexicon(const std::filesystem::path& dir) {
    Lexicon lx;
    lx.valence = read_tsv(dir / "valence.tsv");
    lx.boosters = read_tsv(dir / "boosters.tsv");
    for (const auto& [k, v] : read_tsv(dir / "negators.tsv")) lx.negators.insert(k);
    const char* names[] = {"happiness", "sadness", "anger", "fear", "surprise"};
    for (int i = 0; i < 5; ++i) lx.emotions[i] = read_tsv(dir / (std::string("emotion_") + names[i] + ".tsv"));
    return lx;
}

/// Lowercase, split on anything that is not an ASCII letter or digit. Only valid for ASCII text.
inline std::vector<std::string> ascii_words(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur += ascii_lower(c);
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

/// Sum of per-token valences before normalization.
inline double raw_sentiment_sum(const Lexicon& lx, const std::vector<std::string>& w) {
    double s = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        auto it = lx.valence.find(w[i]);
        if (it == lx.valence.end() || lx.boosters.count(w[i])) continue;
        double v = it->second;
        // Booster run immediately before this token.
        double boost = 0;
        for (std::size_t j = i; j > 0 && lx.boosters.count(w[j - 1]); --j) boost += lx.boosters.at(w[j - 1]);
        const double boosted = v > 0 ? v + boost : v - boost;
        v = (boosted > 0) == (v > 0) ? boosted : 0.0;
        bool negated = false;
        for (std::size_t back = 1; back <= 3 && back <= i; ++back) negated = negated || lx.negators.count(w[i - back]);
        if (negated) v *= -0.74;
        s += v;
    }
    return s;
}

inline double compound(const Lexicon& lx, const std::string& text) {
    const double s = raw_sentiment_sum(lx, ascii_words(text));
    return std::max(-1.0, std::min(1.0, s / std::sqrt(s * s + 15.0)));
}

/// 0 happiness, 1 sadness, 2 anger, 3 fear, 4 surprise, -1 neutral.
inline int emotion_index(const Lexicon& lx, const std::string& text) {
    std::array<double, 5> score{};
    for (const auto& w : ascii_words(text)) {
        for (int e = 0; e < 5; ++e) {
            if (auto it = lx.emotions[e].find(w); it != lx.emotions[e].end()) score[e] += it->second;
        }
    }
    int best = -1;
    double top = 0;
    for (int e = 0; e < 5; ++e) {
        if (score[e] > top) {
            top = score[e];
            best = e;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Mood replies with validity known by construction.

inline const std::array<std::pair<const char*, std::array<const char*, 3>>, 3>& mood_lists() {
    static const std::array<std::pair<const char*, std::array<const char*, 3>>, 3> lists{{
        {"Positive", {"Hopeful and Inspired", "Confident and Determined", "Energized and Focused"}},
        {"Neutral", {"Calm and Grounded", "Reflective and Observant", "Balanced and Centered"}},
        {"Negative", {"Overwhelmed and Stressed", "Frustrated and Discouraged", "Anxious and Uncertain"}},
    }};
    return lists;
}

struct MoodSample {
    std::string text;
    bool valid;
    std::string overall;   // canonical spelling when valid
    std::string detailed;  // canonical spelling when valid
};

inline std::string json_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

inline std::string recase(std::mt19937& rng, std::string s) {
    switch (rng() % 4) {
        case 0: for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c))); break;
        case 1: for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c))); break;
        default: break;
    }
    return s;
}

inline MoodSample random_mood_output(std::mt19937& rng) {
    const auto& lists = mood_lists();
    const auto& home = lists[rng() % 3];
    const std::string overall = home.first;
    const std::string detailed = home.second[rng() % 3];
    static const char* prefixes[] = {"", "Here is my analysis:\n", "```json\n", "Sure! "};
    static const char* suffixes[] = {"", "\n```", " Hope this helps.", "\n"};
    const std::string pre = prefixes[rng() % 4];
    const std::string post = suffixes[rng() % 4];
    auto object = [&](const std::string& o, const std::string& d) {
        return rng() % 2 ? "{\"overall\": " + json_quote(o) + ", \"detailed\": " + json_quote(d) + "}"
                         : "{\n  \"detailed\": " + json_quote(d) + ",\n  \"overall\": " + json_quote(o) + "\n}";
    };
    switch (rng() % 10) {
        case 0: case 1: case 2: case 3:  // valid, canonical
            return {pre + object(overall, detailed) + post, true, overall, detailed};
        case 4:  // valid, case-mangled
            return {pre + object(recase(rng, overall), recase(rng, detailed)) + post, true, overall, detailed};
        case 5: {  // cross-list
            const auto& other = lists[(&home - &lists[0] + 1 + rng() % 2) % 3];
            return {pre + object(overall, other.second[rng() % 3]) + post, false, "", ""};
        }
        case 6: {  // unknown labels
            static const char* bogus[] = {"Happy", "Mixed", "", "Positive and Negative", "Calm"};
            return {pre + object(rng() % 2 ? overall : bogus[rng() % 5], bogus[rng() % 5]) + post, false, "", ""};
        }
        case 7: {  // missing or mistyped keys
            static const char* shapes[] = {"{\"overall\": \"Positive\"}", "{\"detailed\": \"Calm and Grounded\"}",
                                           "{\"overall\": 1, \"detailed\": \"Calm and Grounded\"}",
                                           "{\"overall\": [\"Neutral\"], \"detailed\": \"Calm and Grounded\"}",
                                           "{}", "{\"mood\": {\"overall\": \"Neutral\"}}"};
            return {pre + shapes[rng() % 6] + post, false, "", ""};
        }
        case 8: {  // not JSON at all, or truncated
            std::string full = object(overall, detailed);
            static const char* junk[] = {"I think the student is positive.", "", "overall: Positive",
                                         "[\"Positive\", \"Hopeful and Inspired\"]"};
            return {rng() % 2 ? std::string(junk[rng() % 4]) : full.substr(0, full.size() - 1 - rng() % 8), false, "",
                    ""};
        }
        default: {  // random bytes with braces
            std::string s = "{";
            for (int i = 0; i < 20; ++i) s += static_cast<char>(32 + rng() % 95);
            return {s + "}", false, "", ""};
        }
    }
}

}  // namespace coach::oracle
