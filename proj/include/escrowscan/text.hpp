#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace escrowscan {

// Lowercased maximal ASCII-letter runs. Digits, apostrophes and anything else
// split tokens.
std::vector<std::string> tokenize_words(std::string_view text);

// Sentences delimited by runs of . ! ? that are followed by whitespace or end
// of text. Text without a terminator counts as one sentence if non-empty.
std::size_t count_sentences(std::string_view text);

// The eight vocabulary richness statistics, in slot order.
struct RichnessStats {
    double total_tokens = 0;   // N
    double distinct = 0;       // V
    double hapax = 0;          // V1, items occurring exactly once
    double dis = 0;            // V2, items occurring exactly twice
    double type_token_ratio = 0; // V/N
    double yules_k = 0;        // 1e4 * (sum_i i^2 V_i - N) / N^2
    double honores_h = 0;      // 100 * ln N / (1 - V1/V), denominator clamped to 1e-6
    double sichels_s = 0;      // V2/V

    std::array<double, 8> as_array() const {
        return {total_tokens, distinct, hapax, dis, type_token_ratio,
                yules_k, honores_h, sichels_s};
    }
};

RichnessStats vocabulary_richness(const std::vector<std::string>& tokens);

// Pluggable part-of-speech tagger. Tags are short uppercase codes.
class PosTagger {
public:
    virtual ~PosTagger() = default;
    virtual std::vector<std::string> tag(const std::vector<std::string>& tokens) const = 0;
    virtual std::string name() const = 0;
};

// Default tagger: lexicon lookup with suffix fallback rules over a 12-tag set
// (DT NN VB JJ RB PR IN CC CD MD TO OT).
class LexiconSuffixTagger : public PosTagger {
public:
    LexiconSuffixTagger(); // uses the bundled lexicon
    explicit LexiconSuffixTagger(std::vector<std::pair<std::string, std::string>> lexicon);

    std::vector<std::string> tag(const std::vector<std::string>& tokens) const override;
    std::string name() const override { return "lexicon-suffix"; }

private:
    std::vector<std::pair<std::string, std::string>> lexicon_; // sorted by word
};

} // namespace escrowscan
