// Times the parallel similarity/Gram paths against the serial reference
// implementations on synthetic similarity fixtures.

#include "escrowscan/kernel.hpp"
#include "escrowscan/rng.hpp"

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

using namespace escrowscan;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

SimPage random_page(Rng& rng, int index, std::size_t dim, std::size_t nnz) {
    SimPage p;
    p.attrs.page_level = static_cast<int>(rng.bounded(6));
    p.attrs.in_link_count = static_cast<int>(rng.bounded(12));
    p.attrs.out_link_count = static_cast<int>(rng.bounded(12));
    p.features.page_id = "p" + std::to_string(index + 1);
    p.features.category = Category::BodyText;
    p.features.dim = dim;
    std::vector<bool> used(dim, false);
    for (std::size_t k = 0; k < nnz; ++k) {
        std::size_t slot = rng.bounded(dim);
        if (used[slot]) continue;
        used[slot] = true;
        p.features.items.emplace_back(static_cast<int>(slot), rng.uniform() + 0.01);
    }
    std::sort(p.features.items.begin(), p.features.items.end());
    return p;
}

} // namespace

int main() {
    Rng rng(42);
    const std::size_t dim = 4000, nnz = 250;
    const int n_pages = 400, n_sites = 20;

    std::vector<SimPage> pages;
    for (int i = 0; i < n_pages; ++i) pages.push_back(random_page(rng, i, dim, nnz));

    std::vector<SiteColumn> columns(n_sites);
    for (int i = 0; i < n_pages; ++i) {
        columns[i % n_sites].site_id = "site" + std::to_string(i % n_sites);
        columns[i % n_sites].page_indices.push_back(i);
    }

    std::printf("pages=%d sites=%d dim=%zu nnz=%zu\n", n_pages, n_sites, dim, nnz);

    // Pairwise cache (parallel) vs reference double loop over the same set.
    auto t0 = Clock::now();
    PairSimilarityCache cache(pages, {});
    double cache_ms = ms_since(t0);

    t0 = Clock::now();
    std::vector<SiteSimilarityVector> xs;
    for (int a = 0; a < n_pages; ++a) {
        std::vector<const PairSimilarityCache*> per_cat{&cache};
        xs.push_back(build_similarity_vector(a, per_cat, columns));
    }
    double vec_ms = ms_since(t0);

    t0 = Clock::now();
    std::vector<SiteSimilarityVector> ref_xs;
    for (int a = 0; a < n_pages; ++a) {
        SiteSimilarityVector x;
        x.page_id = pages[a].features.page_id;
        for (const auto& col : columns) {
            std::vector<SimPage> site_pages;
            for (auto idx : col.page_indices) site_pages.push_back(pages[idx]);
            x.entries.push_back(reference::sim_ave(pages[a], site_pages));
            x.entries.push_back(reference::sim_max(pages[a], site_pages));
        }
        ref_xs.push_back(std::move(x));
    }
    double ref_vec_ms = ms_since(t0);

    double max_dev = 0;
    for (int a = 0; a < n_pages; ++a)
        for (std::size_t e = 0; e < xs[a].entries.size(); ++e)
            max_dev = std::max(max_dev,
                               std::abs(xs[a].entries[e] - ref_xs[a].entries[e]));

    t0 = Clock::now();
    GramMatrix g = gram_composite(xs);
    double gram_ms = ms_since(t0);

    t0 = Clock::now();
    GramMatrix gr = reference::gram_composite(xs);
    double ref_gram_ms = ms_since(t0);

    double gram_dev = 0;
    for (std::size_t i = 0; i < g.data.size(); ++i)
        gram_dev = std::max(gram_dev, std::abs(g.data[i] - gr.data[i]));

    std::printf("pair cache + vectors : %8.1f ms (cache %.1f + vectors %.1f)\n",
                cache_ms + vec_ms, cache_ms, vec_ms);
    std::printf("reference vectors    : %8.1f ms   speedup %.1fx   max dev %.3g\n",
                ref_vec_ms, ref_vec_ms / (cache_ms + vec_ms), max_dev);
    std::printf("gram (parallel)      : %8.1f ms\n", gram_ms);
    std::printf("gram (reference)     : %8.1f ms   speedup %.1fx   max dev %.3g\n",
                ref_gram_ms, ref_gram_ms / gram_ms, gram_dev);
    return (max_dev < 1e-9 && gram_dev < 1e-12) ? 0 : 1;
}
