#include "escrowscan/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace escrowscan {

double canberra_term(double u, double v) {
    if (u < 0 || v < 0)
        throw std::invalid_argument("canberra_term: negative input");
    double denom = u + v;
    if (denom == 0) return 0.0;
    return std::abs(u - v) / denom;
}

namespace {

// Sum of per-slot Canberra terms between two sparse vectors of equal dim:
// slots present in only one vector contribute 1, shared slots |u-v|/(u+v),
// absent slots 0.
double canberra_sum_sparse(const FeatureVector& a, const FeatureVector& k) {
    std::size_t ia = 0, ik = 0;
    double sum = 0;
    std::size_t shared = 0;
    while (ia < a.items.size() && ik < k.items.size()) {
        int da = a.items[ia].first, dk = k.items[ik].first;
        if (da == dk) {
            sum += canberra_term(a.items[ia].second, k.items[ik].second);
            ++shared;
            ++ia;
            ++ik;
        } else if (da < dk) {
            ++ia;
        } else {
            ++ik;
        }
    }
    sum += static_cast<double>(a.items.size() - shared);
    sum += static_cast<double>(k.items.size() - shared);
    return sum;
}

double assemble(double f_lv, double f_in, double f_out, double f_feat,
                const SimilarityOptions& opt) {
    if (opt.smooth_eps > 0) {
        f_lv = std::max(f_lv, opt.smooth_eps);
        f_in = std::max(f_in, opt.smooth_eps);
        f_out = std::max(f_out, opt.smooth_eps);
        f_feat = std::max(f_feat, opt.smooth_eps);
    }
    return 1.0 - f_lv * f_in * f_out * f_feat;
}

} // namespace

double page_pair_similarity(const SimPage& a, const SimPage& k,
                            const SimilarityOptions& opt) {
    if (a.features.dim != k.features.dim)
        throw std::invalid_argument("page_pair_similarity: feature length mismatch");
    if (a.features.dim == 0)
        throw std::invalid_argument("page_pair_similarity: empty feature vectors");
    double f_lv = canberra_term(a.attrs.page_level, k.attrs.page_level);
    double f_in = canberra_term(a.attrs.in_link_count, k.attrs.in_link_count);
    double f_out = canberra_term(a.attrs.out_link_count, k.attrs.out_link_count);
    double f_feat =
        canberra_sum_sparse(a.features, k.features) / static_cast<double>(a.features.dim);
    return assemble(f_lv, f_in, f_out, f_feat, opt);
}

namespace {

template <typename Fold>
double fold_site(const SimPage& a, const std::vector<SimPage>& site_pages,
                 const SimilarityOptions& opt, Fold&& fold, double init, bool mean) {
    double acc = init;
    std::size_t m = 0;
    for (const auto& k : site_pages) {
        if (!opt.include_self && k.features.page_id == a.features.page_id) continue;
        acc = fold(acc, page_pair_similarity(a, k, opt));
        ++m;
    }
    if (m == 0)
        throw std::invalid_argument("site similarity: no eligible pages after self-exclusion");
    return mean ? acc / static_cast<double>(m) : acc;
}

} // namespace

double sim_ave(const SimPage& a, const std::vector<SimPage>& site_pages,
               const SimilarityOptions& opt) {
    return fold_site(a, site_pages, opt,
                     [](double acc, double s) { return acc + s; }, 0.0, true);
}

double sim_max(const SimPage& a, const std::vector<SimPage>& site_pages,
               const SimilarityOptions& opt) {
    return fold_site(a, site_pages, opt,
                     [](double acc, double s) { return std::max(acc, s); }, -1.0, false);
}

double composite_kernel(const std::vector<double>& x1, const std::vector<double>& x2,
                        bool* zero_flag) {
    if (x1.size() != x2.size())
        throw std::invalid_argument("composite_kernel: length mismatch");
    double dot = 0, n1 = 0, n2 = 0;
    for (std::size_t i = 0; i < x1.size(); ++i) {
        dot += x1[i] * x2[i];
        n1 += x1[i] * x1[i];
        n2 += x2[i] * x2[i];
    }
    if (n1 == 0 || n2 == 0) {
        if (zero_flag) *zero_flag = true;
        return 0.0;
    }
    return dot / std::sqrt(n1 * n2);
}

double linear_kernel(const FeatureVector& f1, const FeatureVector& f2) {
    if (f1.dim != f2.dim)
        throw std::invalid_argument("linear_kernel: length mismatch");
    double dot = 0;
    std::size_t i = 0, j = 0;
    while (i < f1.items.size() && j < f2.items.size()) {
        int a = f1.items[i].first, b = f2.items[j].first;
        if (a == b) {
            dot += f1.items[i].second * f2.items[j].second;
            ++i;
            ++j;
        } else if (a < b) {
            ++i;
        } else {
            ++j;
        }
    }
    return dot;
}

FeatureVector l2_unit(const FeatureVector& f) {
    FeatureVector out = f;
    double sq = 0;
    for (const auto& [slot, v] : out.items) sq += v * v;
    if (sq <= 0) return out;
    double inv = 1.0 / std::sqrt(sq);
    for (auto& [slot, v] : out.items) v *= inv;
    return out;
}

GramMatrix gram_composite(const std::vector<SiteSimilarityVector>& xs,
                          std::size_t* zero_vectors) {
    GramMatrix g;
    g.n = xs.size();
    g.data.assign(g.n * g.n, 0.0);
    for (const auto& x : xs) g.ids.push_back(x.page_id);

    std::vector<char> zero(g.n, 0);
    // Upper triangle; each element has exactly one writer.
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(g.n); ++i) {
        for (std::size_t j = static_cast<std::size_t>(i); j < g.n; ++j) {
            bool zf = false;
            double v = composite_kernel(xs[static_cast<std::size_t>(i)].entries,
                                        xs[j].entries, &zf);
            if (zf) zero[static_cast<std::size_t>(i)] = 1;
            g.data[static_cast<std::size_t>(i) * g.n + j] = v;
            g.data[j * g.n + static_cast<std::size_t>(i)] = v;
        }
    }
    if (zero_vectors)
        *zero_vectors = static_cast<std::size_t>(std::count(zero.begin(), zero.end(), 1));
    return g;
}

GramMatrix gram_linear(const std::vector<const FeatureVector*>& rows) {
    GramMatrix g;
    g.n = rows.size();
    g.data.assign(g.n * g.n, 0.0);
    for (const auto* r : rows) g.ids.push_back(r->page_id);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(g.n); ++i) {
        for (std::size_t j = static_cast<std::size_t>(i); j < g.n; ++j) {
            double v = linear_kernel(*rows[static_cast<std::size_t>(i)], *rows[j]);
            g.data[static_cast<std::size_t>(i) * g.n + j] = v;
            g.data[j * g.n + static_cast<std::size_t>(i)] = v;
        }
    }
    return g;
}

PairSimilarityCache::PairSimilarityCache(std::vector<SimPage> pages, SimilarityOptions opt)
    : pages_(std::move(pages)), opt_(opt) {
    std::size_t n = pages_.size();
    sim_.assign(n * n, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        for (std::size_t j = static_cast<std::size_t>(i); j < n; ++j) {
            double v = page_pair_similarity(pages_[static_cast<std::size_t>(i)], pages_[j],
                                            opt_);
            sim_[static_cast<std::size_t>(i) * n + j] = v;
            sim_[j * n + static_cast<std::size_t>(i)] = v;
        }
    }
}

std::pair<double, double> PairSimilarityCache::site_pair(
    std::size_t a, const std::vector<std::size_t>& column) const {
    double sum = 0, best = -1;
    std::size_t m = 0;
    for (std::size_t k : column) {
        if (!opt_.include_self && k == a) continue;
        double s = pair(a, k);
        sum += s;
        best = std::max(best, s);
        ++m;
    }
    if (m == 0)
        throw std::invalid_argument("site_pair: empty site column after self-exclusion");
    return {sum / static_cast<double>(m), best};
}

SiteSimilarityVector build_similarity_vector(
    std::size_t a, const std::vector<const PairSimilarityCache*>& per_category,
    const std::vector<SiteColumn>& columns) {
    SiteSimilarityVector x;
    x.page_id = per_category.at(0)->page(a).features.page_id;
    x.entries.reserve(2 * per_category.size() * columns.size());
    for (const auto& col : columns) {
        for (const auto* cache : per_category) {
            auto [ave, mx] = cache->site_pair(a, col.page_indices);
            x.entries.push_back(ave);
            x.entries.push_back(mx);
        }
    }
    return x;
}

// ---------------------------------------------------------------------------

namespace reference {

double page_pair_similarity(const SimPage& a, const SimPage& k,
                            const SimilarityOptions& opt) {
    if (a.features.dim != k.features.dim)
        throw std::invalid_argument("reference::page_pair_similarity: length mismatch");
    std::vector<double> da = a.features.to_dense();
    std::vector<double> dk = k.features.to_dense();
    double sum = 0;
    for (std::size_t i = 0; i < da.size(); ++i) sum += canberra_term(da[i], dk[i]);
    double f_lv = canberra_term(a.attrs.page_level, k.attrs.page_level);
    double f_in = canberra_term(a.attrs.in_link_count, k.attrs.in_link_count);
    double f_out = canberra_term(a.attrs.out_link_count, k.attrs.out_link_count);
    double f_feat = sum / static_cast<double>(da.size());
    if (opt.smooth_eps > 0) {
        f_lv = std::max(f_lv, opt.smooth_eps);
        f_in = std::max(f_in, opt.smooth_eps);
        f_out = std::max(f_out, opt.smooth_eps);
        f_feat = std::max(f_feat, opt.smooth_eps);
    }
    return 1.0 - f_lv * f_in * f_out * f_feat;
}

double sim_ave(const SimPage& a, const std::vector<SimPage>& site_pages,
               const SimilarityOptions& opt) {
    double sum = 0;
    std::size_t m = 0;
    for (const auto& k : site_pages) {
        if (!opt.include_self && k.features.page_id == a.features.page_id) continue;
        sum += reference::page_pair_similarity(a, k, opt);
        ++m;
    }
    if (m == 0) throw std::invalid_argument("reference::sim_ave: no eligible pages");
    return sum / static_cast<double>(m);
}

double sim_max(const SimPage& a, const std::vector<SimPage>& site_pages,
               const SimilarityOptions& opt) {
    double best = -1;
    std::size_t m = 0;
    for (const auto& k : site_pages) {
        if (!opt.include_self && k.features.page_id == a.features.page_id) continue;
        best = std::max(best, reference::page_pair_similarity(a, k, opt));
        ++m;
    }
    if (m == 0) throw std::invalid_argument("reference::sim_max: no eligible pages");
    return best;
}

GramMatrix gram_composite(const std::vector<SiteSimilarityVector>& xs) {
    GramMatrix g;
    g.n = xs.size();
    g.data.assign(g.n * g.n, 0.0);
    for (const auto& x : xs) g.ids.push_back(x.page_id);
    for (std::size_t i = 0; i < g.n; ++i)
        for (std::size_t j = 0; j < g.n; ++j)
            g.data[i * g.n + j] = composite_kernel(xs[i].entries, xs[j].entries);
    return g;
}

} // namespace reference

} // namespace escrowscan
