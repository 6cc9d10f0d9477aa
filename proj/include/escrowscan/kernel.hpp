#pragma once

#include "escrowscan/features.hpp"
#include "escrowscan/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace escrowscan {

// |u-v|/(u+v) for u,v >= 0, with 0/0 defined as 0. Throws on negative input.
double canberra_term(double u, double v);

struct SimilarityOptions {
    double smooth_eps = 0.0;   // >0 replaces each product factor f by max(f, eps)
    bool include_self = false; // keep page k == a when scoring a's own site
};

// A page as the similarity computations see it: structural attributes plus one
// category's feature vector.
struct SimPage {
    PageAttributes attrs;
    FeatureVector features;
};

// 1 - [ c(lv)·c(in)·c(out)·(1/n)Σ_i c(a_i,k_i) ]. Throws on length mismatch.
double page_pair_similarity(const SimPage& a, const SimPage& k,
                            const SimilarityOptions& opt = {});

// Mean / max pair similarity of page a against a site's pages. Pages whose
// page_id equals a's are excluded unless opt.include_self; throws when no
// eligible page remains.
double sim_ave(const SimPage& a, const std::vector<SimPage>& site_pages,
               const SimilarityOptions& opt = {});
double sim_max(const SimPage& a, const std::vector<SimPage>& site_pages,
               const SimilarityOptions& opt = {});

// Figure-1 representation of one page: for each training site (outer) and each
// active category (inner), the pair (sim_ave, sim_max).
struct SiteSimilarityVector {
    PageId page_id;
    std::vector<double> entries; // length = 2 * categories * sites
};

// Cosine of two site-similarity vectors; zero vector gives 0 (sentinel).
// zero_flag, when given, is set if a zero vector was hit.
double composite_kernel(const std::vector<double>& x1, const std::vector<double>& x2,
                        bool* zero_flag = nullptr);

// Plain inner product of two aligned feature vectors.
double linear_kernel(const FeatureVector& f1, const FeatureVector& f2);

// Unit-L2 copy. Applied to rows on the linear-kernel SVM route so the Gram
// magnitude is independent of raw slot scales (the unnormalized counts make
// the SMO dual arbitrarily ill-conditioned); zero vectors pass through.
FeatureVector l2_unit(const FeatureVector& f);

struct GramMatrix {
    std::size_t n = 0;
    std::vector<double> data; // row-major n*n
    std::vector<PageId> ids;

    double at(std::size_t i, std::size_t j) const { return data[i * n + j]; }
    double& at(std::size_t i, std::size_t j) { return data[i * n + j]; }
};

// Symmetric Gram assembly (upper triangle computed, mirrored), parallel across
// rows. Composite: cosine of dense vectors. Linear: sparse dot of features.
GramMatrix gram_composite(const std::vector<SiteSimilarityVector>& xs,
                          std::size_t* zero_vectors = nullptr);
GramMatrix gram_linear(const std::vector<const FeatureVector*>& rows);

// ---------------------------------------------------------------------------
// Evaluation-scale plumbing: all pairwise similarities of a run's page set are
// computed once per category and reused across folds and cells.

class PairSimilarityCache {
public:
    PairSimilarityCache() = default;
    // Pages are addressed by index into these arrays from then on.
    PairSimilarityCache(std::vector<SimPage> pages, SimilarityOptions opt);

    std::size_t size() const { return pages_.size(); }
    const SimPage& page(std::size_t i) const { return pages_[i]; }
    double pair(std::size_t i, std::size_t j) const { return sim_[i * pages_.size() + j]; }

    // (sim_ave, sim_max) of page a against the listed page indices (a site
    // column). Index a itself is skipped unless include_self; throws when the
    // column ends up empty.
    std::pair<double, double> site_pair(std::size_t a,
                                        const std::vector<std::size_t>& column) const;

private:
    std::vector<SimPage> pages_;
    SimilarityOptions opt_;
    std::vector<double> sim_;
};

// One column of the Figure-1 representation: a training site and the page
// indices (into the cache) representing it.
struct SiteColumn {
    SiteId site_id;
    std::vector<std::size_t> page_indices;
};

// Builds x_a for page index a against ordered site columns, one cache per
// category (caches must share the page indexing).
SiteSimilarityVector build_similarity_vector(
    std::size_t a, const std::vector<const PairSimilarityCache*>& per_category,
    const std::vector<SiteColumn>& columns);

// Naive doubly-nested implementations used as oracles and benchmark baseline;
// no sparsity tricks, no caching — dense slot-by-slot evaluation.
namespace reference {
double page_pair_similarity(const SimPage& a, const SimPage& k,
                            const SimilarityOptions& opt = {});
double sim_ave(const SimPage& a, const std::vector<SimPage>& site_pages,
               const SimilarityOptions& opt = {});
double sim_max(const SimPage& a, const std::vector<SimPage>& site_pages,
               const SimilarityOptions& opt = {});
GramMatrix gram_composite(const std::vector<SiteSimilarityVector>& xs);
} // namespace reference

} // namespace escrowscan
