#include "escrowscan/simmap.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace escrowscan {

namespace {

std::vector<FeatureVector> extract_normalized(const WebPage& page, const Website& site,
                                              const std::vector<FeatureDictionary>& dicts,
                                              const ExtractionContext& ctx) {
    std::vector<FeatureVector> out;
    out.reserve(dicts.size());
    for (const auto& dict : dicts) {
        FeatureVector v = extract(page, site, dict, ctx);
        l1_normalize_ngram_groups(v, dict);
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace

SimilarityMap build_similarity_map(const PageId& probe_id,
                                   const PageAttributes& probe_attrs,
                                   const std::vector<FeatureVector>& probe_features,
                                   const std::vector<std::uint64_t>& probe_dict_hashes,
                                   const Website& site,
                                   const std::vector<FeatureDictionary>& dicts,
                                   const ExtractionContext& ctx,
                                   const SimilarityOptions& opt) {
    if (dicts.empty()) throw std::invalid_argument("similarity map needs >= 1 dictionary");
    if (probe_features.size() != dicts.size() || probe_dict_hashes.size() != dicts.size())
        throw std::invalid_argument("probe feature/hash count does not match dictionary count");
    for (std::size_t c = 0; c < dicts.size(); ++c) {
        if (probe_dict_hashes[c] != dicts[c].content_hash())
            throw std::runtime_error(std::string("dictionary hash mismatch for category ") +
                                     to_string(dicts[c].category()) +
                                     ": probe was extracted with a different dictionary");
    }
    if (site.pages.empty())
        throw std::invalid_argument("site " + site.site_id + " has no pages");

    SimilarityMap map;
    map.target_site = site.site_id;
    map.probe_page = probe_id;
    map.edges = site.link_edges;

    // include_self semantics do not apply here (probe vs whole-site pages),
    // so pair each category directly.
    for (const auto& page : site.pages) {
        double total = 0;
        for (std::size_t c = 0; c < dicts.size(); ++c) {
            SimPage a{probe_attrs, probe_features[c]};
            FeatureVector pv = extract(page, site, dicts[c], ctx);
            l1_normalize_ngram_groups(pv, dicts[c]);
            SimPage k{PageAttributes::of(page), std::move(pv)};
            total += page_pair_similarity(a, k, opt);
        }
        map.nodes.push_back({page.page_id, page.page_level,
                             total / static_cast<double>(dicts.size())});
    }
    return map;
}

SimilarityMap build_similarity_map(const WebPage& probe, const Website& probe_site,
                                   const Website& site,
                                   const std::vector<FeatureDictionary>& dicts,
                                   const ExtractionContext& ctx,
                                   const SimilarityOptions& opt) {
    std::vector<FeatureVector> probe_features =
        extract_normalized(probe, probe_site, dicts, ctx);
    std::vector<std::uint64_t> hashes;
    hashes.reserve(dicts.size());
    for (const auto& dict : dicts) hashes.push_back(dict.content_hash());
    return build_similarity_map(probe.page_id, PageAttributes::of(probe), probe_features,
                                hashes, site, dicts, ctx, opt);
}

std::string render_dot(const SimilarityMap& map) {
    std::ostringstream os;
    os << "digraph simmap {\n";
    os << "  label=\"probe " << map.probe_page << " vs site " << map.target_site
       << "\";\n";
    os << "  node [shape=box, style=filled];\n";
    for (const auto& node : map.nodes) {
        int shade = static_cast<int>(std::lround((1.0 - node.similarity) * 100.0));
        if (shade < 0) shade = 0;
        if (shade > 100) shade = 100;
        char score[32];
        std::snprintf(score, sizeof score, "%.3f", node.similarity);
        os << "  \"" << node.page << "\" [label=\"" << node.page << "\\nlv" << node.level
           << " sim=" << score << "\", fillcolor=\"gray" << shade << "\"";
        if (shade < 50) os << ", fontcolor=\"white\"";
        os << "];\n";
    }
    for (const auto& [from, to] : map.edges)
        os << "  \"" << from << "\" -> \"" << to << "\";\n";
    os << "}\n";
    return os.str();
}

} // namespace escrowscan
