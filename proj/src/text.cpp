#include "escrowscan/text.hpp"
#include "escrowscan/wordlists.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

namespace escrowscan {

std::vector<std::string> tokenize_words(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalpha(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::size_t count_sentences(std::string_view text) {
    std::size_t n = 0;
    bool any_content = false;
    bool in_terminator = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char ch = text[i];
        bool is_term = ch == '.' || ch == '!' || ch == '?';
        if (is_term) {
            if (!in_terminator) {
                bool at_end = true;
                for (std::size_t j = i + 1; j < text.size(); ++j) {
                    if (text[j] == '.' || text[j] == '!' || text[j] == '?') continue;
                    at_end = std::isspace(static_cast<unsigned char>(text[j])) != 0;
                    break;
                }
                if (at_end) {
                    ++n;
                    in_terminator = true;
                }
            }
        } else {
            in_terminator = false;
            if (!std::isspace(static_cast<unsigned char>(ch))) any_content = true;
        }
    }
    if (n == 0 && any_content) n = 1;
    return n;
}

RichnessStats vocabulary_richness(const std::vector<std::string>& tokens) {
    RichnessStats s;
    if (tokens.empty()) return s;

    std::map<std::string_view, std::size_t> counts;
    for (const auto& t : tokens) ++counts[t];

    double N = static_cast<double>(tokens.size());
    double V = static_cast<double>(counts.size());
    double V1 = 0, V2 = 0;
    double sum_i2_vi = 0;
    std::map<std::size_t, std::size_t> freq_of_freq;
    for (const auto& [word, c] : counts) ++freq_of_freq[c];
    for (const auto& [i, vi] : freq_of_freq) {
        double di = static_cast<double>(i), dvi = static_cast<double>(vi);
        sum_i2_vi += di * di * dvi;
        if (i == 1) V1 = dvi;
        if (i == 2) V2 = dvi;
    }

    s.total_tokens = N;
    s.distinct = V;
    s.hapax = V1;
    s.dis = V2;
    s.type_token_ratio = V / N;
    s.yules_k = 1e4 * (sum_i2_vi - N) / (N * N);
    double denom = 1.0 - V1 / V;
    if (denom < 1e-6) denom = 1e-6;
    s.honores_h = 100.0 * std::log(N) / denom;
    s.sichels_s = V2 / V;
    return s;
}

namespace {

// Suffix fallback for words missing from the lexicon.
std::string suffix_tag(const std::string& w) {
    auto ends = [&](std::string_view suf) {
        return w.size() > suf.size() &&
               w.compare(w.size() - suf.size(), suf.size(), suf) == 0;
    };
    if (ends("ly")) return "RB";
    if (ends("ing") || ends("ize") || ends("ise") || ends("ate")) return "VB";
    if (ends("ed") || ends("en")) return "VB";
    if (ends("ous") || ends("ful") || ends("ive") || ends("ible") ||
        ends("able") || ends("ic") || ends("al") || ends("ish"))
        return "JJ";
    if (ends("tion") || ends("sion") || ends("ment") || ends("ness") ||
        ends("ity") || ends("ship") || ends("ism") || ends("ance") ||
        ends("ence") || ends("er") || ends("or") || ends("ist"))
        return "NN";
    if (ends("s") && w.size() > 3) return "NN"; // plural-ish
    return "NN"; // default open class
}

} // namespace

LexiconSuffixTagger::LexiconSuffixTagger() : LexiconSuffixTagger(load_pos_lexicon()) {}

LexiconSuffixTagger::LexiconSuffixTagger(
    std::vector<std::pair<std::string, std::string>> lexicon)
    : lexicon_(std::move(lexicon)) {
    std::sort(lexicon_.begin(), lexicon_.end());
}

std::vector<std::string> LexiconSuffixTagger::tag(
    const std::vector<std::string>& tokens) const {
    std::vector<std::string> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) {
        auto it = std::lower_bound(
            lexicon_.begin(), lexicon_.end(), t,
            [](const auto& entry, const std::string& key) { return entry.first < key; });
        if (it != lexicon_.end() && it->first == t) {
            out.push_back(it->second);
        } else {
            out.push_back(suffix_tag(t));
        }
    }
    return out;
}

} // namespace escrowscan
