#pragma once

#include "escrowscan/corpus.hpp"
#include "escrowscan/features.hpp"
#include "escrowscan/selection.hpp"
#include "escrowscan/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace escrowscan {

// One experimental condition of the result grid.
struct CellSpec {
    std::string technique;   // svm | pca
    std::string kernel;      // linear | composite
    std::string feature_set; // body | html | url | image | link | all

    std::string name() const { return technique + "+" + kernel + "/" + feature_set; }
};

struct MatrixConfig {
    std::vector<std::string> techniques = {"svm", "pca"};
    std::vector<std::string> kernels = {"linear", "composite"};
    std::vector<std::string> feature_sets = {"body", "html", "url", "image", "link", "all"};

    int runs = 50;
    int folds = 10;
    int n_real = 50;
    int n_fake = 50;
    std::uint64_t seed = 1;

    double C = 1.0;
    NgramConfig ngram;
    SelectionPolicy selection;
    bool leakage_safe = false;       // fold-local dictionaries and selection
    bool fold_by_site = false;       // site-level stratified folds
    std::string all_mode = "per-category"; // composite "all": per-category | concat
    double smooth_eps = 0;
    bool include_self = false;
    bool ensemble_score_mean = false;

    double alpha = 0.01;
    int bonferroni_m = 25; // reproduces the 0.0004 threshold at alpha = 0.01

    std::vector<CellSpec> cells() const;
};

struct PagePrediction {
    SiteId site;
    PageId page;
    Label truth = Label::Unknown;
    Label predicted = Label::Unknown;
    double score = 0;
};

struct RunResult {
    int run = 0;
    std::vector<SiteId> sampled_sites;
    std::vector<PagePrediction> predictions;
    double site_accuracy = 0;
    // Filled in leakage-safe mode only: content hash of every fold-local
    // dictionary the cell used (fold-major, category ascending), so tests can
    // assert by construction that test pages shaped nothing.
    std::vector<std::uint64_t> fold_dictionary_hashes;
};

struct CellResult {
    CellSpec spec;
    std::vector<double> run_accuracies; // NaN where the run failed
    double mean = 0;                    // over completed runs
    std::vector<std::string> errors;

    bool complete() const;
};

struct SignificanceEntry {
    std::string hypothesis; // H1 | H2 | H3
    std::string cell_a, cell_b;
    double mean_a = 0, mean_b = 0;
    double t = 0, p = 1;
    double threshold = 0;
    bool significant = false;
};

struct MatrixResult {
    MatrixConfig config;
    std::vector<CellResult> cells;
    std::vector<SignificanceEntry> comparisons;
    std::vector<std::string> warnings;
};

// Uniform sampling without replacement within each label, deterministic in
// (seed, run). Throws when a label has fewer sites than requested.
std::vector<SiteId> bootstrap_sample(const Corpus& corpus, int n_real, int n_fake,
                                     std::uint64_t seed, int run);

// Page-level fold assignment shared by every cell of a run: a seeded shuffle
// split into near-equal folds (sizes differ by at most 1).
std::vector<int> assign_folds(std::size_t n_pages, int folds, std::uint64_t seed, int run);

// Fraction of sites with strictly more than 50% of pages correctly classified.
double site_accuracy(const std::vector<PagePrediction>& predictions,
                     std::vector<std::string>* warnings = nullptr);

struct TTestResult {
    double t = 0;
    double p = 1;
};

// Two-sided paired t-test on per-run differences. All-zero differences give
// (t=0, p=1); zero-variance nonzero differences give the documented p=0
// sentinel with t = +/-inf.
TTestResult paired_t_test(const std::vector<double>& acc_a, const std::vector<double>& acc_b);

// significant iff p < alpha/m (strict).
std::vector<bool> bonferroni_gate(const std::vector<double>& p_values, double alpha, int m);

// Candidate building plus information-gain selection in one step: the
// dictionary a training set freezes. page_sites[i] owns pages[i].
FeatureDictionary build_selected_dictionary(const std::vector<const WebPage*>& pages,
                                            const std::vector<const Website*>& page_sites,
                                            const std::vector<Label>& labels,
                                            Category category, const NgramConfig& ngram,
                                            const SelectionPolicy& policy,
                                            const ExtractionContext& ctx);

// Runs one condition over one bootstrap run (used by tests and the matrix).
RunResult cross_validate_cell(const Corpus& corpus, const CellSpec& cell,
                              const MatrixConfig& config, int run,
                              std::vector<std::string>* warnings = nullptr);

// The full experiment grid over shared bootstrap samples (pairing discipline:
// run i uses identical sites and folds in every cell), plus H1/H2/H3 pairwise
// t-tests with Bonferroni gating.
MatrixResult run_experiment_matrix(const Corpus& corpus, const MatrixConfig& config);

} // namespace escrowscan
