#include "escrowscan/model.hpp"

#include "escrowscan/ensemble.hpp"
#include "escrowscan/eval.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace escrowscan {

namespace {

void validate_options(const TrainOptions& opt) {
    if (opt.technique != "svm" && opt.technique != "pca")
        throw std::invalid_argument("unknown technique '" + opt.technique + "'");
    if (opt.kernel != "linear" && opt.kernel != "composite")
        throw std::invalid_argument("unknown kernel '" + opt.kernel + "'");
    static const std::vector<std::string> kSets = {"body", "html", "url",
                                                   "image", "link", "all"};
    if (std::find(kSets.begin(), kSets.end(), opt.feature_set) == kSets.end())
        throw std::invalid_argument("unknown feature set '" + opt.feature_set + "'");
    if (opt.all_mode != "per-category" && opt.all_mode != "concat")
        throw std::invalid_argument("all-mode must be per-category or concat");
    if (opt.C <= 0) throw std::invalid_argument("C must be positive");
    if (opt.smooth_eps < 0) throw std::invalid_argument("smooth epsilon must be >= 0");
}

std::vector<Category> model_categories(const std::string& feature_set) {
    if (feature_set == "all")
        return {Category::BodyText, Category::Html, Category::Url, Category::Image,
                Category::Link};
    return {category_from_string(feature_set)};
}

// Concatenation of one page's per-category normalized features, offsets in
// category order (the composite concat all-mode).
FeatureVector concat_features(const TrainedModel& m, std::size_t page_index) {
    FeatureVector v;
    v.page_id = m.train_page_ids[page_index];
    std::size_t off = 0;
    for (std::size_t c = 0; c < m.categories.size(); ++c) {
        for (const auto& [idx, val] : m.train_features[c][page_index].items)
            v.items.emplace_back(static_cast<int>(off) + idx, val);
        off += m.dicts[c].size();
    }
    v.dim = off;
    return v;
}

FeatureVector concat_probe(const TrainedModel& m, const std::vector<FeatureVector>& probe) {
    FeatureVector v;
    v.page_id = probe.empty() ? PageId{} : probe[0].page_id;
    std::size_t off = 0;
    for (std::size_t c = 0; c < m.categories.size(); ++c) {
        for (const auto& [idx, val] : probe[c].items)
            v.items.emplace_back(static_cast<int>(off) + idx, val);
        off += m.dicts[c].size();
    }
    v.dim = off;
    return v;
}

// x_a ordering shared by training and classification: site column outer,
// category inner, (sim_ave, sim_max) pairs. sim_pages holds one SimPage per
// training page per similarity channel (5 categories, or 1 for single /
// concat). A training page whose own column holds only itself scores (1,1).
std::vector<double> similarity_entries(
    const std::vector<std::vector<SimPage>>& sim_pages, const SimPage* probe_per_channel,
    std::size_t self_index, bool has_self, const std::vector<SiteColumn>& columns,
    const SimilarityOptions& opt) {
    std::vector<double> out;
    out.reserve(2 * sim_pages.size() * columns.size());
    for (const SiteColumn& col : columns) {
        bool self_only = has_self && !opt.include_self && col.page_indices.size() == 1 &&
                         col.page_indices[0] == self_index;
        for (std::size_t ch = 0; ch < sim_pages.size(); ++ch) {
            if (self_only) {
                out.push_back(1.0);
                out.push_back(1.0);
                continue;
            }
            double sum = 0, best = 0;
            std::size_t m = 0;
            for (std::size_t k : col.page_indices) {
                if (has_self && !opt.include_self && k == self_index) continue;
                double s = page_pair_similarity(*(probe_per_channel + ch),
                                                sim_pages[ch][k], opt);
                sum += s;
                best = std::max(best, s);
                ++m;
            }
            if (m == 0)
                throw std::logic_error("similarity column emptied unexpectedly");
            out.push_back(sum / static_cast<double>(m));
            out.push_back(best);
        }
    }
    return out;
}

} // namespace

TrainedModel train_model(const Corpus& corpus, const TrainOptions& opt,
                         const ExtractionContext& ctx,
                         std::vector<std::string>* warnings) {
    validate_options(opt);

    TrainedModel m;
    m.technique = opt.technique;
    m.kernel = opt.kernel;
    m.feature_set = opt.feature_set;
    m.all_mode = opt.all_mode;
    m.C = opt.C;
    m.smooth_eps = opt.smooth_eps;
    m.include_self = opt.include_self;
    m.ensemble_score_mean = opt.ensemble_score_mean;
    m.seed = opt.seed;
    m.categories = model_categories(opt.feature_set);

    std::vector<const Website*> sites;
    for (const Website& s : corpus.sites) {
        if (s.label == Label::Unknown) {
            if (warnings)
                warnings->push_back("site " + s.site_id + " is unlabeled; skipped");
            continue;
        }
        if (s.pages.empty()) {
            if (warnings) warnings->push_back("site " + s.site_id + " has no pages; skipped");
            continue;
        }
        sites.push_back(&s);
    }
    if (sites.size() < 2) throw std::runtime_error("training needs at least 2 labeled sites");

    std::vector<const WebPage*> pages;
    std::vector<const Website*> page_sites;
    for (const Website* s : sites) {
        SiteColumn col;
        col.site_id = s->site_id;
        for (const WebPage& p : s->pages) {
            col.page_indices.push_back(pages.size());
            pages.push_back(&p);
            page_sites.push_back(s);
            m.train_page_ids.push_back(p.page_id);
            m.train_attrs.push_back(PageAttributes::of(p));
            m.train_labels.push_back(label_sign(s->label));
        }
        m.columns.push_back(std::move(col));
    }
    bool fake = false, real = false;
    for (int y : m.train_labels) (y > 0 ? fake : real) = true;
    if (!fake || !real)
        throw std::runtime_error("training corpus is single-class; need Real and Fake sites");

    std::vector<Label> labels;
    for (std::size_t i = 0; i < pages.size(); ++i) labels.push_back(page_sites[i]->label);

    m.dicts.reserve(m.categories.size());
    m.train_features.resize(m.categories.size());
    for (std::size_t c = 0; c < m.categories.size(); ++c) {
        m.dicts.push_back(build_selected_dictionary(pages, page_sites, labels,
                                                    m.categories[c], opt.ngram,
                                                    opt.selection, ctx));
        auto& rows = m.train_features[c];
        rows.resize(pages.size());
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(pages.size()); ++i) {
            rows[i] = extract(*pages[i], *page_sites[i], m.dicts[c], ctx);
            l1_normalize_ngram_groups(rows[i], m.dicts[c]);
        }
    }

    SimilarityOptions sopt;
    sopt.smooth_eps = opt.smooth_eps;
    sopt.include_self = opt.include_self;

    if (opt.kernel == "linear") {
        for (std::size_t c = 0; c < m.categories.size(); ++c) {
            try {
                if (opt.technique == "svm") {
                    // Unit-L2 rows keep the linear-kernel dual well-scaled.
                    std::vector<FeatureVector> unit;
                    for (const auto& r : m.train_features[c]) unit.push_back(l2_unit(r));
                    std::vector<const FeatureVector*> rows;
                    for (const auto& r : unit) rows.push_back(&r);
                    GramMatrix g = gram_linear(rows);
                    SvmModel sm = train_svm(g, m.train_labels, opt.C, {}, warnings);
                    sm.kernel_spec = "linear";
                    m.svm_members.push_back(std::move(sm));
                } else {
                    std::vector<const FeatureVector*> rows;
                    for (const auto& r : m.train_features[c]) rows.push_back(&r);
                    m.pca_members.push_back(train_pca(rows, m.train_labels, warnings));
                }
            } catch (const std::exception& e) {
                if (m.categories.size() > 1)
                    throw std::runtime_error(std::string("ensemble member '") +
                                             to_string(m.categories[c]) +
                                             "' failed: " + e.what());
                throw;
            }
        }
    } else {
        // Channels: one per category, or a single concatenated one.
        std::vector<std::vector<SimPage>> channels;
        if (m.uses_concat()) {
            channels.emplace_back();
            for (std::size_t i = 0; i < pages.size(); ++i)
                channels[0].push_back(SimPage{m.train_attrs[i], concat_features(m, i)});
        } else {
            for (std::size_t c = 0; c < m.categories.size(); ++c) {
                channels.emplace_back();
                for (std::size_t i = 0; i < pages.size(); ++i)
                    channels[c].push_back(SimPage{m.train_attrs[i], m.train_features[c][i]});
            }
        }

        std::size_t self_only = 0;
        m.train_xs.resize(pages.size());
#pragma omp parallel for schedule(dynamic) reduction(+ : self_only)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(pages.size()); ++i) {
            std::vector<SimPage> probes;
            for (const auto& ch : channels) probes.push_back(ch[static_cast<std::size_t>(i)]);
            SiteSimilarityVector x;
            x.page_id = m.train_page_ids[static_cast<std::size_t>(i)];
            for (const SiteColumn& col : m.columns)
                if (!sopt.include_self && col.page_indices.size() == 1 &&
                    col.page_indices[0] == static_cast<std::size_t>(i))
                    ++self_only;
            x.entries = similarity_entries(channels, probes.data(),
                                           static_cast<std::size_t>(i), true, m.columns,
                                           sopt);
            m.train_xs[static_cast<std::size_t>(i)] = std::move(x);
        }
        if (self_only > 0 && warnings)
            warnings->push_back("composite kernel: " + std::to_string(self_only) +
                                " single-page own-site columns scored as (1,1)");

        std::size_t zero_vectors = 0;
        GramMatrix gram = gram_composite(m.train_xs, &zero_vectors);
        if (zero_vectors > 0 && warnings)
            warnings->push_back("composite kernel: " + std::to_string(zero_vectors) +
                                " zero similarity vectors hit the 0-kernel sentinel");
        if (opt.technique == "svm") {
            SvmModel sm = train_svm(gram, m.train_labels, opt.C, {}, warnings);
            sm.kernel_spec = "composite";
            m.svm_members.push_back(std::move(sm));
        } else {
            m.pca_members.push_back(train_kernel_pca(gram, m.train_labels, warnings));
        }
    }
    return m;
}

std::pair<Label, double> classify_page(const TrainedModel& model, const WebPage& page,
                                       const Website& site, const ExtractionContext& ctx) {
    std::vector<FeatureVector> probe(model.categories.size());
    for (std::size_t c = 0; c < model.categories.size(); ++c) {
        probe[c] = extract(page, site, model.dicts[c], ctx);
        l1_normalize_ngram_groups(probe[c], model.dicts[c]);
    }

    if (model.kernel == "linear") {
        std::vector<Label> votes;
        std::vector<double> scores;
        for (std::size_t c = 0; c < model.categories.size(); ++c) {
            if (model.technique == "svm") {
                const SvmModel& sm = model.svm_members[c];
                auto sup = sm.support_indices();
                FeatureVector unit_probe = l2_unit(probe[c]);
                std::vector<double> row(sup.size());
                for (std::size_t s = 0; s < sup.size(); ++s)
                    row[s] = linear_kernel(unit_probe, l2_unit(model.train_features[c][sup[s]]));
                auto [lab, margin] = predict_svm(sm, row);
                votes.push_back(lab);
                scores.push_back(margin);
            } else {
                PcaDecision d = classify_pca(model.pca_members[c], probe[c]);
                votes.push_back(d.label);
                scores.push_back(d.mean_dist_real - d.mean_dist_fake);
            }
        }
        double score = std::accumulate(scores.begin(), scores.end(), 0.0) /
                       static_cast<double>(scores.size());
        if (votes.size() == 1) return {votes[0], score};
        Label lab = model.ensemble_score_mean ? score_mean_vote(scores)
                                              : majority_vote(votes);
        return {lab, score};
    }

    SimilarityOptions sopt;
    sopt.smooth_eps = model.smooth_eps;
    sopt.include_self = model.include_self;

    std::vector<std::vector<SimPage>> channels;
    std::vector<SimPage> probes;
    PageAttributes attrs = PageAttributes::of(page);
    if (model.uses_concat()) {
        channels.emplace_back();
        for (std::size_t i = 0; i < model.train_page_ids.size(); ++i)
            channels[0].push_back(
                SimPage{model.train_attrs[i], concat_features(model, i)});
        probes.push_back(SimPage{attrs, concat_probe(model, probe)});
    } else {
        for (std::size_t c = 0; c < model.categories.size(); ++c) {
            channels.emplace_back();
            for (std::size_t i = 0; i < model.train_page_ids.size(); ++i)
                channels[c].push_back(SimPage{model.train_attrs[i], model.train_features[c][i]});
            probes.push_back(SimPage{attrs, probe[c]});
        }
    }
    std::vector<double> x = similarity_entries(channels, probes.data(), 0, false,
                                               model.columns, sopt);

    if (model.technique == "svm") {
        const SvmModel& sm = model.svm_members[0];
        auto sup = sm.support_indices();
        std::vector<double> row(sup.size());
        for (std::size_t s = 0; s < sup.size(); ++s)
            row[s] = composite_kernel(x, model.train_xs[sup[s]].entries);
        return predict_svm(sm, row);
    }
    std::vector<double> row(model.train_xs.size());
    for (std::size_t j = 0; j < model.train_xs.size(); ++j)
        row[j] = composite_kernel(x, model.train_xs[j].entries);
    PcaDecision d = classify_kernel_pca(model.pca_members[0], row);
    return {d.label, d.mean_dist_real - d.mean_dist_fake};
}

SiteVerdict classify_site(const TrainedModel& model, const Website& site,
                          const ExtractionContext& ctx) {
    if (site.pages.empty())
        throw std::runtime_error("site " + site.site_id + " has no pages to classify");
    SiteVerdict v;
    v.site = site.site_id;
    for (const WebPage& p : site.pages) {
        auto [lab, score] = classify_page(model, p, site, ctx);
        if (lab == Label::Fake) ++v.fake_pages;
        ++v.total_pages;
        v.pages.push_back(PageVerdict{p.page_id, lab, score});
    }
    v.verdict = (2 * v.fake_pages > v.total_pages) ? Label::Fake : Label::Real;
    return v;
}

} // namespace escrowscan
