#pragma once

#include "escrowscan/corpus.hpp"
#include "escrowscan/features.hpp"
#include "escrowscan/kernel.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace escrowscan {

// One probe page scored against every page of a target site; rendered as a
// graph whose node darkness encodes the similarity.
struct SimilarityMap {
    struct Node {
        PageId page;
        int level = 0;
        double similarity = 0; // probe vs this page, in [0,1]
    };

    SiteId target_site;
    PageId probe_page;
    std::vector<Node> nodes;                         // site page order
    std::vector<std::pair<PageId, PageId>> edges;    // the site's link edges
};

// Per-node score = mean over the given dictionaries' categories of
// page_pair_similarity(probe, node). Probe and site pages are extracted with
// the same dictionaries, so the representations are aligned by construction.
SimilarityMap build_similarity_map(const WebPage& probe, const Website& probe_site,
                                   const Website& site,
                                   const std::vector<FeatureDictionary>& dicts,
                                   const ExtractionContext& ctx,
                                   const SimilarityOptions& opt = {});

// Variant for pre-extracted probes (one normalized vector per dictionary,
// same order). probe_dict_hashes are the content hashes of the dictionaries
// the probe was extracted with; any mismatch with `dicts` throws.
SimilarityMap build_similarity_map(const PageId& probe_id,
                                   const PageAttributes& probe_attrs,
                                   const std::vector<FeatureVector>& probe_features,
                                   const std::vector<std::uint64_t>& probe_dict_hashes,
                                   const Website& site,
                                   const std::vector<FeatureDictionary>& dicts,
                                   const ExtractionContext& ctx,
                                   const SimilarityOptions& opt = {});

// Graphviz dot document: one filled box per node, shade gray<N> with
// N = round((1 - similarity) * 100), so 0 -> white and 1 -> black; label
// carries the page id, level and score; edges follow the map's edge list.
std::string render_dot(const SimilarityMap& map);

} // namespace escrowscan
