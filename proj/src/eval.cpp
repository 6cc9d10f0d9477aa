#include "escrowscan/eval.hpp"

#include "escrowscan/ensemble.hpp"
#include "escrowscan/hash.hpp"
#include "escrowscan/kernel.hpp"
#include "escrowscan/pca.hpp"
#include "escrowscan/rng.hpp"
#include "escrowscan/svm.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace escrowscan {

namespace {

constexpr std::uint64_t kSampleSalt = 101; // bootstrap site draws
constexpr std::uint64_t kFoldSalt = 202;   // fold shuffle

// Pseudo-category key for the concatenated all-features representation.
constexpr int kConcatKey = kCategoryCount;
// Fold key meaning "run-global features" (the default, selection pooled over
// every sampled page as in the original protocol).
constexpr int kGlobalFold = -1;

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

const char* kCategoryNames[kCategoryCount] = {"body", "html", "url", "image", "link"};

void validate_cell(const CellSpec& cell) {
    if (cell.technique != "svm" && cell.technique != "pca")
        throw std::invalid_argument("unknown technique '" + cell.technique +
                                    "' (expected svm|pca)");
    if (cell.kernel != "linear" && cell.kernel != "composite")
        throw std::invalid_argument("unknown kernel '" + cell.kernel +
                                    "' (expected linear|composite)");
    static const std::vector<std::string> kSets = {"body", "html", "url",
                                                   "image", "link", "all"};
    if (std::find(kSets.begin(), kSets.end(), cell.feature_set) == kSets.end())
        throw std::invalid_argument("unknown feature set '" + cell.feature_set + "'");
}

void validate_scalars(const MatrixConfig& cfg) {
    if (cfg.runs < 1) throw std::invalid_argument("runs must be >= 1");
    if (cfg.folds < 2) throw std::invalid_argument("folds must be >= 2");
    if (cfg.n_real < 1 || cfg.n_fake < 1)
        throw std::invalid_argument("need at least one site per label");
    if (cfg.C <= 0) throw std::invalid_argument("C must be positive");
    if (cfg.smooth_eps < 0) throw std::invalid_argument("smooth epsilon must be >= 0");
    if (cfg.alpha <= 0 || cfg.alpha >= 1)
        throw std::invalid_argument("alpha must lie in (0,1)");
    if (cfg.bonferroni_m < 1) throw std::invalid_argument("bonferroni m must be >= 1");
    if (cfg.all_mode != "per-category" && cfg.all_mode != "concat")
        throw std::invalid_argument("all-mode must be per-category or concat");
}

void validate_lists(const MatrixConfig& cfg) {
    if (cfg.techniques.empty() || cfg.kernels.empty() || cfg.feature_sets.empty())
        throw std::invalid_argument("experiment grid has an empty axis");
    for (const auto& t : cfg.techniques)
        for (const auto& k : cfg.kernels)
            for (const auto& f : cfg.feature_sets) validate_cell({t, k, f});
    auto has_dupes = [](std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        return std::adjacent_find(v.begin(), v.end()) != v.end();
    };
    if (has_dupes(cfg.techniques) || has_dupes(cfg.kernels) || has_dupes(cfg.feature_sets))
        throw std::invalid_argument("experiment grid axis lists an entry twice");
}

// --------------------------------------------------------------------------
// Per-run shared state. Every cell of a run sees the same sites, pages and
// folds (pairing discipline), and expensive artifacts — selected dictionaries,
// normalized feature rows, pairwise-similarity caches, linear per-category
// models — are built once and memoized here.

struct RunPages {
    std::vector<const Website*> sites;  // sampled, site-id order
    std::vector<const WebPage*> pages;  // site-major, page-id order within site
    std::vector<std::size_t> page_site; // index into sites per page
    std::vector<Label> page_label;
    std::vector<int> fold_of;
};

struct CatFeatures {
    FeatureDictionary dict; // default-constructed for the concat pseudo-set
    std::vector<FeatureVector> rows; // normalized, aligned with RunPages.pages
    std::vector<FeatureVector> svm_rows; // unit-L2 copies for the linear-SVM route
    std::uint64_t dict_hash = 0;
};

struct FoldSplit {
    std::vector<std::size_t> train_idx, test_idx;
    std::vector<int> train_y;
};

struct RunContext {
    const MatrixConfig* cfg = nullptr;
    const ExtractionContext* ctx = nullptr;
    int run = 0;
    RunPages rp;

    std::map<std::pair<int, int>, CatFeatures> feats; // (cat key, fold key)
    std::map<std::pair<int, int>, std::shared_ptr<const PairSimilarityCache>> caches;
    std::map<std::pair<int, int>, SvmModel> linear_svm_memo; // (cat, fold)
    std::map<std::pair<int, int>, PcaModel> linear_pca_memo;
    bool pooled_selection_warned = false;
};

RunPages build_run_pages(const Corpus& corpus, const MatrixConfig& cfg, int run,
                         std::vector<std::string>* warnings) {
    RunPages rp;
    auto sampled = bootstrap_sample(corpus, cfg.n_real, cfg.n_fake, cfg.seed, run);
    for (const auto& id : sampled) {
        const Website* s = corpus.find_site(id);
        if (!s) throw std::logic_error("sampled site vanished: " + id);
        if (s->pages.empty()) {
            if (warnings)
                warnings->push_back("site " + id + " has no pages; excluded from run " +
                                    std::to_string(run));
            continue;
        }
        rp.sites.push_back(s);
    }
    for (std::size_t si = 0; si < rp.sites.size(); ++si) {
        for (const WebPage& p : rp.sites[si]->pages) {
            rp.pages.push_back(&p);
            rp.page_site.push_back(si);
            rp.page_label.push_back(rp.sites[si]->label);
        }
    }
    if (cfg.fold_by_site) {
        auto site_fold = assign_folds(rp.sites.size(), cfg.folds, cfg.seed, run);
        rp.fold_of.resize(rp.pages.size());
        for (std::size_t i = 0; i < rp.pages.size(); ++i)
            rp.fold_of[i] = site_fold[rp.page_site[i]];
    } else {
        rp.fold_of = assign_folds(rp.pages.size(), cfg.folds, cfg.seed, run);
    }
    return rp;
}

FoldSplit make_split(const RunPages& rp, int fold, int run) {
    FoldSplit s;
    for (std::size_t i = 0; i < rp.pages.size(); ++i) {
        if (rp.fold_of[i] == fold)
            s.test_idx.push_back(i);
        else
            s.train_idx.push_back(i);
    }
    bool fake = false, real = false;
    for (auto i : s.train_idx) {
        s.train_y.push_back(label_sign(rp.page_label[i]));
        (s.train_y.back() > 0 ? fake : real) = true;
    }
    if (!s.train_idx.empty() && (!fake || !real))
        throw std::runtime_error("run " + std::to_string(run) + " fold " +
                                 std::to_string(fold) +
                                 ": training pages are single-class; reduce --folds or "
                                 "enlarge the sample");
    return s;
}

int feature_fold(const MatrixConfig& cfg, int fold) {
    return cfg.leakage_safe ? fold : kGlobalFold;
}

const CatFeatures& cat_features(RunContext& rc, int cat_key, int fold,
                                std::vector<std::string>* warnings);

CatFeatures build_concat_features(RunContext& rc, int fold,
                                  std::vector<std::string>* warnings) {
    CatFeatures cf;
    const CatFeatures* parts[kCategoryCount];
    std::size_t dim = 0;
    std::uint64_t h = 1469598103934665603ULL;
    for (int c = 0; c < kCategoryCount; ++c) {
        parts[c] = &cat_features(rc, c, fold, warnings);
        dim += parts[c]->dict.size();
        h = fnv1a(std::to_string(parts[c]->dict_hash), h);
    }
    cf.dict_hash = h;
    cf.rows.resize(rc.rp.pages.size());
    for (std::size_t i = 0; i < rc.rp.pages.size(); ++i) {
        FeatureVector v;
        v.page_id = rc.rp.pages[i]->page_id;
        v.dim = dim;
        std::size_t off = 0;
        for (int c = 0; c < kCategoryCount; ++c) {
            for (const auto& [idx, val] : parts[c]->rows[i].items)
                v.items.emplace_back(static_cast<int>(off) + idx, val);
            off += parts[c]->dict.size();
        }
        cf.rows[i] = std::move(v);
    }
    return cf;
}

const CatFeatures& cat_features(RunContext& rc, int cat_key, int fold,
                                std::vector<std::string>* warnings) {
    auto key = std::make_pair(cat_key, fold);
    if (auto it = rc.feats.find(key); it != rc.feats.end()) return it->second;

    CatFeatures cf;
    if (cat_key == kConcatKey) {
        cf = build_concat_features(rc, fold, warnings);
    } else {
        const RunPages& rp = rc.rp;
        const MatrixConfig& cfg = *rc.cfg;
        std::vector<const WebPage*> tpages;
        std::vector<const Website*> tsites;
        std::vector<Label> tlabels;
        for (std::size_t i = 0; i < rp.pages.size(); ++i) {
            if (fold != kGlobalFold && rp.fold_of[i] == fold) continue;
            tpages.push_back(rp.pages[i]);
            tsites.push_back(rp.sites[rp.page_site[i]]);
            tlabels.push_back(rp.page_label[i]);
        }
        if (fold == kGlobalFold && !rc.pooled_selection_warned) {
            if (warnings)
                warnings->push_back(
                    "feature selection pools every sampled page (original protocol); "
                    "pass --leakage-safe for fold-local dictionaries");
            rc.pooled_selection_warned = true;
        }
        cf.dict = build_selected_dictionary(tpages, tsites, tlabels,
                                            static_cast<Category>(cat_key), cfg.ngram,
                                            cfg.selection, *rc.ctx);
        cf.dict_hash = cf.dict.content_hash();
        cf.rows.resize(rp.pages.size());
        cf.svm_rows.resize(rp.pages.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rp.pages.size()); ++i) {
            cf.rows[i] = extract(*rp.pages[i], *rp.sites[rp.page_site[i]], cf.dict, *rc.ctx);
            l1_normalize_ngram_groups(cf.rows[i], cf.dict);
            cf.svm_rows[i] = l2_unit(cf.rows[i]);
        }
    }
    return rc.feats.emplace(key, std::move(cf)).first->second;
}

const PairSimilarityCache& cache_for(RunContext& rc, int cat_key, int fold,
                                     std::vector<std::string>* warnings) {
    auto key = std::make_pair(cat_key, fold);
    if (auto it = rc.caches.find(key); it != rc.caches.end()) return *it->second;

    const CatFeatures& cf = cat_features(rc, cat_key, fold, warnings);
    std::vector<SimPage> sp(rc.rp.pages.size());
    for (std::size_t i = 0; i < sp.size(); ++i)
        sp[i] = SimPage{PageAttributes::of(*rc.rp.pages[i]), cf.rows[i]};
    SimilarityOptions opt;
    opt.smooth_eps = rc.cfg->smooth_eps;
    opt.include_self = rc.cfg->include_self;
    auto cache = std::make_shared<PairSimilarityCache>(std::move(sp), opt);
    return *rc.caches.emplace(key, std::move(cache)).first->second;
}

std::vector<const FeatureVector*> gather_rows(const CatFeatures& cf,
                                              const std::vector<std::size_t>& idx) {
    std::vector<const FeatureVector*> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) out[i] = &cf.rows[idx[i]];
    return out;
}

const SvmModel& linear_svm_member(RunContext& rc, int cat, int fold, const FoldSplit& split,
                                  std::vector<std::string>* warnings) {
    auto key = std::make_pair(cat, fold);
    if (auto it = rc.linear_svm_memo.find(key); it != rc.linear_svm_memo.end())
        return it->second;
    const CatFeatures& cf = cat_features(rc, cat, feature_fold(*rc.cfg, fold), warnings);
    std::vector<const FeatureVector*> rows(split.train_idx.size());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = &cf.svm_rows[split.train_idx[i]];
    GramMatrix g = gram_linear(rows);
    SvmModel m = train_svm(g, split.train_y, rc.cfg->C, {}, warnings);
    m.kernel_spec = "linear";
    return rc.linear_svm_memo.emplace(key, std::move(m)).first->second;
}

const PcaModel& linear_pca_member(RunContext& rc, int cat, int fold, const FoldSplit& split,
                                  std::vector<std::string>* warnings) {
    auto key = std::make_pair(cat, fold);
    if (auto it = rc.linear_pca_memo.find(key); it != rc.linear_pca_memo.end())
        return it->second;
    const CatFeatures& cf = cat_features(rc, cat, feature_fold(*rc.cfg, fold), warnings);
    PcaModel m = train_pca(gather_rows(cf, split.train_idx), split.train_y, warnings);
    return rc.linear_pca_memo.emplace(key, std::move(m)).first->second;
}

// Margin-style score: positive means Fake for every member kind.
double svm_test_score(const RunContext& rc, const SvmModel& m, const CatFeatures& cf,
                      const FoldSplit& split, std::size_t test_i, Label* out_label) {
    auto sup = m.support_indices();
    std::vector<double> row(sup.size());
    for (std::size_t s = 0; s < sup.size(); ++s)
        row[s] = linear_kernel(cf.svm_rows[test_i], cf.svm_rows[split.train_idx[sup[s]]]);
    auto [lab, margin] = predict_svm(m, row);
    if (out_label) *out_label = lab;
    (void)rc;
    return margin;
}

double pca_test_score(const PcaModel& m, const CatFeatures& cf, std::size_t test_i,
                      Label* out_label) {
    PcaDecision d = classify_pca(m, cf.rows[test_i]);
    if (out_label) *out_label = d.label;
    return d.mean_dist_real - d.mean_dist_fake;
}

// Category keys a composite cell feeds through the similarity machinery.
std::vector<int> composite_cat_keys(const MatrixConfig& cfg, const std::string& fs) {
    if (fs != "all") return {static_cast<int>(category_from_string(fs))};
    if (cfg.all_mode == "concat") return {kConcatKey};
    std::vector<int> keys(kCategoryCount);
    std::iota(keys.begin(), keys.end(), 0);
    return keys;
}

// Training-fold pages of each training site, cache-indexed; empty columns
// (sites entirely in the test fold) are dropped.
std::vector<SiteColumn> fold_columns(const RunPages& rp, const FoldSplit& split) {
    std::vector<std::vector<std::size_t>> per_site(rp.sites.size());
    for (auto i : split.train_idx) per_site[rp.page_site[i]].push_back(i);
    std::vector<SiteColumn> cols;
    for (std::size_t s = 0; s < rp.sites.size(); ++s)
        if (!per_site[s].empty())
            cols.push_back(SiteColumn{rp.sites[s]->site_id, std::move(per_site[s])});
    return cols;
}

// x_a for every page of the run against the fold's training-site columns.
// A training page whose own site is represented only by itself scores (1,1)
// against that column (self-similarity); counted and reported by the caller.
std::vector<SiteSimilarityVector> build_fold_xs(
    const RunPages& rp, const std::vector<const PairSimilarityCache*>& caches,
    const std::vector<SiteColumn>& cols, bool include_self, std::size_t* self_only_columns) {
    std::vector<SiteSimilarityVector> xs(rp.pages.size());
    std::size_t degenerate = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : degenerate)
    for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(rp.pages.size()); ++a) {
        SiteSimilarityVector x;
        x.page_id = rp.pages[a]->page_id;
        x.entries.reserve(2 * caches.size() * cols.size());
        for (const SiteColumn& col : cols) {
            bool self_only = !include_self && col.page_indices.size() == 1 &&
                             col.page_indices[0] == static_cast<std::size_t>(a);
            if (self_only) ++degenerate;
            for (const PairSimilarityCache* c : caches) {
                if (self_only) {
                    x.entries.push_back(1.0);
                    x.entries.push_back(1.0);
                } else {
                    auto [ave, mx] = c->site_pair(static_cast<std::size_t>(a),
                                                  col.page_indices);
                    x.entries.push_back(ave);
                    x.entries.push_back(mx);
                }
            }
        }
        xs[a] = std::move(x);
    }
    if (self_only_columns) *self_only_columns += degenerate;
    return xs;
}

void record_fold_hashes(RunContext& rc, RunResult& rr, const std::vector<int>& cat_keys,
                        int fold, std::vector<std::string>* warnings) {
    if (!rc.cfg->leakage_safe) return;
    std::vector<int> cats;
    for (int k : cat_keys) {
        if (k == kConcatKey)
            for (int c = 0; c < kCategoryCount; ++c) cats.push_back(c);
        else
            cats.push_back(k);
    }
    std::sort(cats.begin(), cats.end());
    cats.erase(std::unique(cats.begin(), cats.end()), cats.end());
    for (int c : cats)
        rr.fold_dictionary_hashes.push_back(cat_features(rc, c, fold, warnings).dict_hash);
}

RunResult evaluate_cell(RunContext& rc, const CellSpec& cell,
                        std::vector<std::string>* warnings) {
    validate_cell(cell);
    const RunPages& rp = rc.rp;
    const MatrixConfig& cfg = *rc.cfg;

    RunResult rr;
    rr.run = rc.run;
    for (const Website* s : rp.sites) rr.sampled_sites.push_back(s->site_id);
    rr.predictions.resize(rp.pages.size());

    std::size_t self_only_columns = 0;
    std::size_t zero_vectors = 0;

    for (int fold = 0; fold < cfg.folds; ++fold) {
        FoldSplit split = make_split(rp, fold, rc.run);
        if (split.test_idx.empty()) continue;
        int ff = feature_fold(cfg, fold);

        auto record = [&](std::size_t test_i, Label lab, double score) {
            PagePrediction p;
            p.site = rp.pages[test_i]->site_id;
            p.page = rp.pages[test_i]->page_id;
            p.truth = rp.page_label[test_i];
            p.predicted = lab;
            p.score = score;
            rr.predictions[test_i] = std::move(p);
        };

        if (cell.kernel == "linear") {
            std::vector<int> cats;
            if (cell.feature_set == "all") {
                cats.resize(kCategoryCount);
                std::iota(cats.begin(), cats.end(), 0);
            } else {
                cats = {static_cast<int>(category_from_string(cell.feature_set))};
            }
            record_fold_hashes(rc, rr, cats, fold, warnings);

            // Train the members (one per category; five of them form the
            // linear-ensemble "all" condition).
            std::vector<const SvmModel*> svms;
            std::vector<const PcaModel*> pcas;
            for (int c : cats) {
                try {
                    if (cell.technique == "svm")
                        svms.push_back(&linear_svm_member(rc, c, fold, split, warnings));
                    else
                        pcas.push_back(&linear_pca_member(rc, c, fold, split, warnings));
                } catch (const std::exception& e) {
                    if (cats.size() > 1)
                        throw std::runtime_error(std::string("ensemble member '") +
                                                 kCategoryNames[c] + "' failed: " + e.what());
                    throw;
                }
            }

            for (std::size_t t : split.test_idx) {
                std::vector<Label> votes;
                std::vector<double> scores;
                for (std::size_t mi = 0; mi < cats.size(); ++mi) {
                    const CatFeatures& cf = cat_features(rc, cats[mi], ff, warnings);
                    Label lab = Label::Unknown;
                    double sc = cell.technique == "svm"
                                    ? svm_test_score(rc, *svms[mi], cf, split, t, &lab)
                                    : pca_test_score(*pcas[mi], cf, t, &lab);
                    votes.push_back(lab);
                    scores.push_back(sc);
                }
                Label lab;
                double score = std::accumulate(scores.begin(), scores.end(), 0.0) /
                               static_cast<double>(scores.size());
                if (votes.size() == 1)
                    lab = votes[0];
                else if (cfg.ensemble_score_mean)
                    lab = score_mean_vote(scores);
                else
                    lab = majority_vote(votes);
                record(t, lab, score);
            }
        } else {
            std::vector<int> cat_keys = composite_cat_keys(cfg, cell.feature_set);
            record_fold_hashes(rc, rr, cat_keys, fold, warnings);

            std::vector<const PairSimilarityCache*> caches;
            for (int k : cat_keys) caches.push_back(&cache_for(rc, k, ff, warnings));
            std::vector<SiteColumn> cols = fold_columns(rp, split);
            if (cols.empty())
                throw std::runtime_error("run " + std::to_string(rc.run) + " fold " +
                                         std::to_string(fold) +
                                         ": no training-site columns");
            std::vector<SiteSimilarityVector> xs =
                build_fold_xs(rp, caches, cols, cfg.include_self, &self_only_columns);

            std::vector<SiteSimilarityVector> train_xs;
            train_xs.reserve(split.train_idx.size());
            for (auto i : split.train_idx) train_xs.push_back(xs[i]);

            GramMatrix gram = gram_composite(train_xs, &zero_vectors);

            if (cell.technique == "svm") {
                SvmModel m = train_svm(gram, split.train_y, cfg.C, {}, warnings);
                m.kernel_spec = "composite";
                auto sup = m.support_indices();
                for (std::size_t t : split.test_idx) {
                    std::vector<double> row(sup.size());
                    for (std::size_t s = 0; s < sup.size(); ++s)
                        row[s] = composite_kernel(xs[t].entries, train_xs[sup[s]].entries);
                    auto [lab, margin] = predict_svm(m, row);
                    record(t, lab, margin);
                }
            } else {
                PcaModel m = train_kernel_pca(gram, split.train_y, warnings);
                for (std::size_t t : split.test_idx) {
                    std::vector<double> row(train_xs.size());
                    for (std::size_t j = 0; j < train_xs.size(); ++j)
                        row[j] = composite_kernel(xs[t].entries, train_xs[j].entries);
                    PcaDecision d = classify_kernel_pca(m, row);
                    record(t, d.label, d.mean_dist_real - d.mean_dist_fake);
                }
            }
        }
    }

    if (warnings && self_only_columns > 0)
        warnings->push_back("composite kernel: " + std::to_string(self_only_columns) +
                            " single-page own-site columns scored as self-similarity (1,1)");
    if (warnings && zero_vectors > 0)
        warnings->push_back("composite kernel: " + std::to_string(zero_vectors) +
                            " zero similarity vectors hit the 0-kernel sentinel");

    rr.site_accuracy = site_accuracy(rr.predictions, warnings);
    return rr;
}

// Messages repeat across folds and runs; collapse duplicates, keep first-seen
// order, and annotate counts.
struct WarningDedup {
    std::vector<std::pair<std::string, std::size_t>> entries;
    std::map<std::string, std::size_t> index;

    void add(const std::string& msg) {
        auto it = index.find(msg);
        if (it == index.end()) {
            index.emplace(msg, entries.size());
            entries.emplace_back(msg, 1);
        } else {
            ++entries[it->second].second;
        }
    }
    void add_all(const std::vector<std::string>& msgs) {
        for (const auto& m : msgs) add(m);
    }
    std::vector<std::string> render() const {
        std::vector<std::string> out;
        for (const auto& [msg, n] : entries)
            out.push_back(n == 1 ? msg : msg + " [x" + std::to_string(n) + "]");
        return out;
    }
};

double finite_mean(const std::vector<double>& v) {
    double sum = 0;
    std::size_t n = 0;
    for (double x : v)
        if (std::isfinite(x)) {
            sum += x;
            ++n;
        }
    return n ? sum / static_cast<double>(n) : nan_value();
}

} // namespace

std::vector<CellSpec> MatrixConfig::cells() const {
    std::vector<CellSpec> out;
    for (const auto& t : techniques)
        for (const auto& k : kernels)
            for (const auto& f : feature_sets) out.push_back({t, k, f});
    return out;
}

bool CellResult::complete() const {
    return std::all_of(run_accuracies.begin(), run_accuracies.end(),
                       [](double a) { return std::isfinite(a); });
}

std::vector<SiteId> bootstrap_sample(const Corpus& corpus, int n_real, int n_fake,
                                     std::uint64_t seed, int run) {
    if (n_real < 0 || n_fake < 0)
        throw std::invalid_argument("bootstrap_sample: negative sample size");
    std::vector<const Website*> real, fake;
    for (const auto& s : corpus.sites) {
        if (s.label == Label::Real) real.push_back(&s);
        if (s.label == Label::Fake) fake.push_back(&s);
    }
    if (real.size() < static_cast<std::size_t>(n_real) ||
        fake.size() < static_cast<std::size_t>(n_fake)) {
        std::ostringstream os;
        os << "bootstrap_sample: need " << n_real << " real / " << n_fake
           << " fake sites, corpus has " << real.size() << " real / " << fake.size()
           << " fake";
        throw std::runtime_error(os.str());
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(run), kSampleSalt));
    auto draw = [&rng](const std::vector<const Website*>& pool, int k,
                       std::vector<SiteId>& out) {
        std::vector<std::size_t> idx(pool.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (int i = 0; i < k; ++i) {
            std::size_t j = static_cast<std::size_t>(i) +
                            static_cast<std::size_t>(rng.bounded(idx.size() - i));
            std::swap(idx[i], idx[j]);
            out.push_back(pool[idx[i]]->site_id);
        }
    };
    std::vector<SiteId> out;
    draw(real, n_real, out);
    draw(fake, n_fake, out);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> assign_folds(std::size_t n_pages, int folds, std::uint64_t seed, int run) {
    if (folds < 2) throw std::invalid_argument("assign_folds: folds must be >= 2");
    if (n_pages < static_cast<std::size_t>(folds))
        throw std::runtime_error("assign_folds: " + std::to_string(n_pages) +
                                 " instances cannot fill " + std::to_string(folds) +
                                 " folds");
    std::vector<std::size_t> order(n_pages);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(run), kFoldSalt));
    rng.shuffle(order);
    std::vector<int> fold_of(n_pages, 0);
    std::size_t base = n_pages / static_cast<std::size_t>(folds);
    std::size_t extra = n_pages % static_cast<std::size_t>(folds);
    std::size_t pos = 0;
    for (int f = 0; f < folds; ++f) {
        std::size_t len = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
        for (std::size_t i = 0; i < len; ++i) fold_of[order[pos++]] = f;
    }
    return fold_of;
}

double site_accuracy(const std::vector<PagePrediction>& predictions,
                     std::vector<std::string>* warnings) {
    if (predictions.empty()) {
        if (warnings) warnings->push_back("site_accuracy: no predictions");
        return 0.0;
    }
    std::map<SiteId, std::pair<std::size_t, std::size_t>> per_site; // pages, correct
    for (const auto& p : predictions) {
        auto& e = per_site[p.site];
        ++e.first;
        if (p.predicted == p.truth) ++e.second;
    }
    std::size_t correct_sites = 0;
    for (const auto& [id, e] : per_site)
        if (2 * e.second > e.first) ++correct_sites; // strictly more than half
    return static_cast<double>(correct_sites) / static_cast<double>(per_site.size());
}

TTestResult paired_t_test(const std::vector<double>& acc_a, const std::vector<double>& acc_b) {
    if (acc_a.size() != acc_b.size())
        throw std::invalid_argument("paired_t_test: length mismatch (" +
                                    std::to_string(acc_a.size()) + " vs " +
                                    std::to_string(acc_b.size()) + ")");
    std::size_t n = acc_a.size();
    if (n < 2) throw std::invalid_argument("paired_t_test: need at least 2 pairs");
    std::vector<double> d(n);
    bool all_zero = true;
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = acc_a[i] - acc_b[i];
        if (d[i] != 0) all_zero = false;
    }
    if (all_zero) return {0.0, 1.0};
    double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(n);
    double ss = 0;
    for (double x : d) ss += (x - mean) * (x - mean);
    double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0) {
        double inf = std::numeric_limits<double>::infinity();
        return {mean > 0 ? inf : -inf, 0.0}; // documented sentinel
    }
    double t = mean / (sd / std::sqrt(static_cast<double>(n)));
    boost::math::students_t dist(static_cast<double>(n - 1));
    double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
    return {t, p};
}

std::vector<bool> bonferroni_gate(const std::vector<double>& p_values, double alpha, int m) {
    if (m < 1) throw std::invalid_argument("bonferroni_gate: m must be >= 1");
    if (alpha <= 0) throw std::invalid_argument("bonferroni_gate: alpha must be positive");
    double threshold = alpha / static_cast<double>(m);
    std::vector<bool> flags(p_values.size());
    for (std::size_t i = 0; i < p_values.size(); ++i)
        flags[i] = p_values[i] < threshold; // strict
    return flags;
}

FeatureDictionary build_selected_dictionary(const std::vector<const WebPage*>& pages,
                                            const std::vector<const Website*>& page_sites,
                                            const std::vector<Label>& labels,
                                            Category category, const NgramConfig& ngram,
                                            const SelectionPolicy& policy,
                                            const ExtractionContext& ctx) {
    if (pages.size() != page_sites.size() || pages.size() != labels.size())
        throw std::invalid_argument("build_selected_dictionary: ragged inputs");
    FeatureDictionary candidates = build_dictionary(pages, category, ngram, ctx);
    std::vector<FeatureVector> rows(pages.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(pages.size()); ++i)
        rows[i] = extract(*pages[i], *page_sites[i], candidates, ctx);
    return select_features(candidates, rows, labels, policy).first;
}

RunResult cross_validate_cell(const Corpus& corpus, const CellSpec& cell,
                              const MatrixConfig& config, int run,
                              std::vector<std::string>* warnings) {
    validate_scalars(config);
    validate_cell(cell);
    ExtractionContext ctx = ExtractionContext::load_default();
    RunContext rc;
    rc.cfg = &config;
    rc.ctx = &ctx;
    rc.run = run;
    std::vector<std::string> local;
    std::vector<std::string>* sink = warnings ? warnings : &local;
    rc.rp = build_run_pages(corpus, config, run, sink);
    return evaluate_cell(rc, cell, sink);
}

MatrixResult run_experiment_matrix(const Corpus& corpus, const MatrixConfig& config) {
    validate_scalars(config);
    validate_lists(config);

    MatrixResult mr;
    mr.config = config;
    std::vector<CellSpec> cells = config.cells();
    mr.cells.resize(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        mr.cells[i].spec = cells[i];
        mr.cells[i].run_accuracies.assign(static_cast<std::size_t>(config.runs),
                                          nan_value());
    }

    ExtractionContext ctx = ExtractionContext::load_default();
    WarningDedup dedup;

    for (int run = 0; run < config.runs; ++run) {
        std::vector<std::string> rw;
        RunContext rc;
        rc.cfg = &config;
        rc.ctx = &ctx;
        rc.run = run;
        try {
            rc.rp = build_run_pages(corpus, config, run, &rw);
        } catch (const std::exception& e) {
            for (auto& cell : mr.cells)
                cell.errors.push_back("run " + std::to_string(run) + ": " + e.what());
            dedup.add_all(rw);
            continue;
        }
        for (std::size_t ci = 0; ci < cells.size(); ++ci) {
            std::vector<std::string> cw;
            try {
                RunResult rr = evaluate_cell(rc, cells[ci], &cw);
                mr.cells[ci].run_accuracies[static_cast<std::size_t>(run)] =
                    rr.site_accuracy;
            } catch (const std::exception& e) {
                mr.cells[ci].errors.push_back("run " + std::to_string(run) + ": " +
                                              e.what());
            }
            dedup.add_all(cw);
        }
        dedup.add_all(rw);
    }

    for (auto& cell : mr.cells) cell.mean = finite_mean(cell.run_accuracies);

    auto cell_index = [&](const std::string& t, const std::string& k,
                          const std::string& f) -> int {
        for (std::size_t i = 0; i < cells.size(); ++i)
            if (cells[i].technique == t && cells[i].kernel == k && cells[i].feature_set == f)
                return static_cast<int>(i);
        return -1;
    };

    struct Planned {
        std::string hypothesis;
        int a, b;
    };
    std::vector<Planned> plan;
    static const std::vector<std::string> kSingles = {"body", "html", "url", "image",
                                                      "link"};
    // H1: all features against each single category, same technique and kernel.
    for (const auto& t : config.techniques)
        for (const auto& k : config.kernels) {
            int a = cell_index(t, k, "all");
            if (a < 0) continue;
            for (const auto& f : kSingles) {
                int b = cell_index(t, k, f);
                if (b >= 0) plan.push_back({"H1", a, b});
            }
        }
    // H2: SVM against PCA, same kernel and feature set.
    for (const auto& k : config.kernels)
        for (const auto& f : config.feature_sets) {
            int a = cell_index("svm", k, f);
            int b = cell_index("pca", k, f);
            if (a >= 0 && b >= 0) plan.push_back({"H2", a, b});
        }
    // H3: composite against linear kernel, same technique and feature set.
    for (const auto& t : config.techniques)
        for (const auto& f : config.feature_sets) {
            int a = cell_index(t, "composite", f);
            int b = cell_index(t, "linear", f);
            if (a >= 0 && b >= 0) plan.push_back({"H3", a, b});
        }

    double threshold = config.alpha / static_cast<double>(config.bonferroni_m);
    for (const auto& pl : plan) {
        const CellResult& ca = mr.cells[static_cast<std::size_t>(pl.a)];
        const CellResult& cb = mr.cells[static_cast<std::size_t>(pl.b)];
        SignificanceEntry se;
        se.hypothesis = pl.hypothesis;
        se.cell_a = ca.spec.name();
        se.cell_b = cb.spec.name();
        se.mean_a = ca.mean;
        se.mean_b = cb.mean;
        se.threshold = threshold;
        std::vector<double> pa, pb;
        for (int r = 0; r < config.runs; ++r) {
            double x = ca.run_accuracies[static_cast<std::size_t>(r)];
            double y = cb.run_accuracies[static_cast<std::size_t>(r)];
            if (std::isfinite(x) && std::isfinite(y)) {
                pa.push_back(x);
                pb.push_back(y);
            }
        }
        if (pa.size() < 2) {
            se.t = nan_value();
            se.p = nan_value();
            se.significant = false;
            dedup.add("comparison " + se.cell_a + " vs " + se.cell_b +
                      ": fewer than 2 completed paired runs; t-test skipped");
        } else {
            TTestResult tt = paired_t_test(pa, pb);
            se.t = tt.t;
            se.p = tt.p;
            se.significant = tt.p < threshold;
        }
        mr.comparisons.push_back(std::move(se));
    }

    mr.warnings = dedup.render();
    return mr;
}

} // namespace escrowscan
