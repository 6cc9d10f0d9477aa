#pragma once

#include "escrowscan/corpus.hpp"
#include "escrowscan/text.hpp"
#include "escrowscan/types.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace escrowscan {

// n-gram orders per selectable feature group plus the candidate document
// frequency floor.
struct NgramConfig {
    int char_min = 1, char_max = 3;   // letter/digit n-grams (body text)
    int word_min = 1, word_max = 3;   // bag of words
    int pos_min = 1, pos_max = 3;     // part-of-speech tags
    int tag_min = 1, tag_max = 3;     // HTML tag names
    int uchar_min = 1, uchar_max = 3; // URL characters
    int utok_min = 1, utok_max = 3;   // URL tokens
    std::size_t min_df = 3;           // min pages containing a candidate

    std::string describe() const;
};

// Ordered feature vocabulary for one category. Entry names carry a group
// prefix ("fw:the", "char:ab", "pix:0042"); fixed-slot groups come first in a
// frozen canonical order, n-gram entries follow sorted lexicographically.
class FeatureDictionary {
public:
    FeatureDictionary() = default;
    FeatureDictionary(Category cat, std::vector<std::string> entries, NgramConfig config);

    Category category() const { return category_; }
    const std::vector<std::string>& entries() const { return entries_; }
    const NgramConfig& config() const { return config_; }
    std::size_t size() const { return entries_.size(); }
    int index_of(const std::string& name) const; // -1 when absent
    std::uint64_t content_hash() const;

    // Group prefix of an entry name ("fw:the" -> "fw").
    static std::string group_of(const std::string& entry);
    // Fixed groups are kept unconditionally by feature selection and are never
    // L1-normalized.
    static bool is_fixed_group(const std::string& group);

private:
    Category category_ = Category::BodyText;
    std::vector<std::string> entries_;
    NgramConfig config_;
    std::map<std::string, int> index_;
};

// Sparse non-negative feature vector aligned to a dictionary.
struct FeatureVector {
    PageId page_id;
    Category category = Category::BodyText;
    std::size_t dim = 0;
    std::vector<std::pair<int, double>> items; // sorted by index, values > 0

    double at(int index) const;
    std::vector<double> to_dense() const;
    static FeatureVector from_dense(PageId id, Category cat, const std::vector<double>& v);
};

// Figure-1 structural attributes of a page.
struct PageAttributes {
    int page_level = 0;
    int in_link_count = 0;
    int out_link_count = 0;

    static PageAttributes of(const WebPage& p) {
        return {p.page_level, p.in_link_count, p.out_link_count};
    }
};

// Everything extractors need besides the page: the frozen slot lists, the
// spell-check vocabulary, and the POS tagger.
struct ExtractionContext {
    std::vector<std::string> function_words;   // 300, order = slots
    std::vector<std::string> punct_chars;      // 29 single chars
    std::vector<std::string> structure_names;  // 64
    std::vector<std::string> english_words;    // sorted for binary search
    std::shared_ptr<const PosTagger> tagger;

    bool is_english_word(const std::string& w) const;
    static ExtractionContext load_default(); // from data_dir()
};

// Candidate dictionary: all fixed slots plus every n-gram with document
// frequency >= config.min_df over the given pages. Throws on empty input.
FeatureDictionary build_dictionary(const std::vector<const WebPage*>& pages,
                                   Category category, const NgramConfig& config,
                                   const ExtractionContext& ctx);
FeatureDictionary build_dictionary(const Corpus& corpus, Category category,
                                   const NgramConfig& config, const ExtractionContext& ctx);

// Category extractors. Pure functions of their inputs; all values >= 0.
FeatureVector extract_body_text(const WebPage& page, const FeatureDictionary& dict,
                                const ExtractionContext& ctx);
FeatureVector extract_html(const WebPage& page, const FeatureDictionary& dict);
FeatureVector extract_url(const WebPage& page, const FeatureDictionary& dict);
FeatureVector extract_image(const WebPage& page, const Website& site,
                            const FeatureDictionary& dict);
FeatureVector extract_link(const WebPage& page, const Website& site,
                           const FeatureDictionary& dict);

// Dispatch on dict.category().
FeatureVector extract(const WebPage& page, const Website& site,
                      const FeatureDictionary& dict, const ExtractionContext& ctx);

// Extracts one category for every page of the corpus, parallel across pages.
// Output order: corpus site order, page order within site.
std::vector<FeatureVector> extract_matrix(const Corpus& corpus,
                                          const FeatureDictionary& dict,
                                          const ExtractionContext& ctx);

// L1-normalizes each selectable n-gram group in place (fixed slots untouched);
// applied before kernel use, never before selection.
void l1_normalize_ngram_groups(FeatureVector& vec, const FeatureDictionary& dict);

// The 64 document-structure values in data-file order (exposed for tests).
std::vector<double> document_structure_values(const WebPage& page,
                                              const std::vector<std::string>& names);

} // namespace escrowscan
