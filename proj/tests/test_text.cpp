#include "escrowscan/text.hpp"

#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

using namespace escrowscan;

TEST_CASE("tokenize_words lowercases and splits on non-letters") {
    CHECK(tokenize_words("Hello, World!") == std::vector<std::string>{"hello", "world"});
    CHECK(tokenize_words("don't") == std::vector<std::string>{"don", "t"});
    CHECK(tokenize_words("abc123def") == std::vector<std::string>{"abc", "def"});
    CHECK(tokenize_words("   ") == std::vector<std::string>{});
    CHECK(tokenize_words("") == std::vector<std::string>{});
    CHECK(tokenize_words("end") == std::vector<std::string>{"end"});
}

TEST_CASE("count_sentences terminator rules") {
    CHECK(count_sentences("One. Two! Three?") == 3);
    CHECK(count_sentences("No terminator") == 1);
    CHECK(count_sentences("") == 0);
    CHECK(count_sentences("   \t\n") == 0);
    // a '.' glued to the next word is not a sentence boundary
    CHECK(count_sentences("example.com is a host") == 1);
    // a run of terminators counts once
    CHECK(count_sentences("Wait... what?") == 2);
    CHECK(count_sentences("Done.") == 1);
    CHECK(count_sentences("Q?! Sure.") == 2);
}

TEST_CASE("vocabulary richness hand case") {
    // tokens: a a b c -> N=4, V=3, V1=2, V2=1
    RichnessStats s = vocabulary_richness({"a", "a", "b", "c"});
    CHECK(s.total_tokens == 4);
    CHECK(s.distinct == 3);
    CHECK(s.hapax == 2);
    CHECK(s.dis == 1);
    CHECK(s.type_token_ratio == doctest::Approx(0.75));
    // K = 1e4 * (1^2*2 + 2^2*1 - 4) / 16
    CHECK(s.yules_k == doctest::Approx(1e4 * 2.0 / 16.0));
    // H = 100 ln 4 / (1 - 2/3)
    CHECK(s.honores_h == doctest::Approx(100.0 * std::log(4.0) / (1.0 - 2.0 / 3.0)));
    CHECK(s.sichels_s == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("vocabulary richness all-hapax clamps Honore") {
    RichnessStats s = vocabulary_richness({"x", "y", "z"});
    CHECK(s.hapax == 3);
    // denominator 1 - V1/V = 0 is clamped to 1e-6
    CHECK(s.honores_h == doctest::Approx(100.0 * std::log(3.0) / 1e-6));
    CHECK(s.sichels_s == 0.0);
}

TEST_CASE("vocabulary richness empty input") {
    RichnessStats s = vocabulary_richness({});
    CHECK(s.total_tokens == 0);
    CHECK(s.distinct == 0);
    CHECK(s.yules_k == 0);
    CHECK(s.honores_h == 0);
}

TEST_CASE("richness as_array slot order") {
    RichnessStats s = vocabulary_richness({"a", "a", "b"});
    auto a = s.as_array();
    CHECK(a[0] == s.total_tokens);
    CHECK(a[1] == s.distinct);
    CHECK(a[2] == s.hapax);
    CHECK(a[3] == s.dis);
    CHECK(a[4] == s.type_token_ratio);
    CHECK(a[5] == s.yules_k);
    CHECK(a[6] == s.honores_h);
    CHECK(a[7] == s.sichels_s);
}

TEST_CASE("lexicon tagger prefers the lexicon, falls back to suffixes") {
    LexiconSuffixTagger tagger({{"dog", "NN"}, {"run", "VB"}, {"the", "DT"}});
    auto tags = tagger.tag({"the", "dog", "run", "quickly", "providing"});
    REQUIRE(tags.size() == 5);
    CHECK(tags[0] == "DT");
    CHECK(tags[1] == "NN");
    CHECK(tags[2] == "VB");
    CHECK(tags[3] == "RB");  // -ly
    CHECK(tags[4] == "VB");  // -ing
}

TEST_CASE("suffix fallback classes") {
    LexiconSuffixTagger tagger(std::vector<std::pair<std::string, std::string>>{});
    auto tags = tagger.tag({"transaction", "careful", "payments", "go"});
    CHECK(tags[0] == "NN"); // -tion
    CHECK(tags[1] == "JJ"); // -ful
    CHECK(tags[2] == "NN"); // plural-ish
    CHECK(tags[3] == "NN"); // default
}

TEST_CASE("bundled tagger loads and covers a 12-tag set") {
    LexiconSuffixTagger tagger;
    CHECK(tagger.name() == "lexicon-suffix");
    auto tags = tagger.tag({"the", "and", "of", "is"});
    for (const auto& t : tags) {
        CHECK(t.size() == 2);
        CHECK(t == std::string{char(std::toupper(t[0])), char(std::toupper(t[1]))});
    }
}
