#pragma once

#include "escrowscan/corpus.hpp"
#include "escrowscan/features.hpp"
#include "escrowscan/kernel.hpp"
#include "escrowscan/pca.hpp"
#include "escrowscan/selection.hpp"
#include "escrowscan/svm.hpp"
#include "escrowscan/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace escrowscan {

struct TrainOptions {
    std::string technique = "svm";    // svm | pca
    std::string kernel = "composite"; // linear | composite
    std::string feature_set = "all";  // body | html | url | image | link | all
    std::string all_mode = "per-category";
    double C = 1.0;
    double smooth_eps = 0;
    bool include_self = false;
    bool ensemble_score_mean = false;
    std::uint64_t seed = 1;
    NgramConfig ngram;
    SelectionPolicy selection;
};

// A fully self-contained classifier: the frozen dictionaries, the training
// pages' normalized features and structural attributes (needed to evaluate
// the kernel against new pages), and the learned coefficients. linear+all is
// the five-member ensemble; composite+all folds all categories into one
// similarity vector per the configured all-mode.
struct TrainedModel {
    std::string technique;
    std::string kernel;
    std::string feature_set;
    std::string all_mode;
    double C = 1.0;
    double smooth_eps = 0;
    bool include_self = false;
    bool ensemble_score_mean = false;
    std::uint64_t seed = 0;

    std::vector<Category> categories;                    // 1 or 5, ascending
    std::vector<FeatureDictionary> dicts;                // aligned with categories
    std::vector<PageId> train_page_ids;
    std::vector<PageAttributes> train_attrs;
    std::vector<std::vector<FeatureVector>> train_features; // [category][page], normalized
    std::vector<SiteColumn> columns;                     // training sites, page indices
    std::vector<int> train_labels;                       // +1 Fake / -1 Real
    std::vector<SiteSimilarityVector> train_xs;          // composite kernels only

    std::vector<SvmModel> svm_members; // 1, or 5 for linear+all with technique svm
    std::vector<PcaModel> pca_members;

    bool uses_concat() const { return kernel == "composite" && feature_set == "all" && all_mode == "concat"; }
};

// Trains on every Real/Fake site of the corpus (Unknown sites skipped with a
// warning). Selection is pooled over all pages — this is a final model, not a
// cross-validation fold.
TrainedModel train_model(const Corpus& corpus, const TrainOptions& opt,
                         const ExtractionContext& ctx,
                         std::vector<std::string>* warnings = nullptr);

struct PageVerdict {
    PageId page;
    Label label = Label::Unknown;
    double score = 0; // positive leans Fake
};

struct SiteVerdict {
    SiteId site;
    Label verdict = Label::Unknown; // Fake iff strictly more than half the pages are Fake
    std::size_t fake_pages = 0;
    std::size_t total_pages = 0;
    std::vector<PageVerdict> pages;
};

// Classifies one page (already part of `site` for the image/link extractors).
std::pair<Label, double> classify_page(const TrainedModel& model, const WebPage& page,
                                       const Website& site, const ExtractionContext& ctx);

// Applies classify_page to every page; strict-majority site verdict.
SiteVerdict classify_site(const TrainedModel& model, const Website& site,
                          const ExtractionContext& ctx);

} // namespace escrowscan
