#pragma once

#include "escrowscan/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace escrowscan {

struct ImageAsset {
    ImageId image_id;
    std::string extension;          // lowercase, no dot; matches the file suffix
    int width_px = 0;               // 0 when undecodable
    int height_px = 0;
    std::uint64_t file_size_bytes = 0;
    std::vector<std::uint8_t> raw_bytes;  // file contents as fetched
    std::vector<std::uint8_t> pixels;     // RGB interleaved; empty if undecodable

    bool has_pixels() const { return !pixels.empty(); }
};

struct WebPage {
    PageId page_id;
    SiteId site_id;
    std::string url;
    int page_level = 0;       // BFS hops from the site root (lv)
    int in_link_count = 0;    // intra-site edges into this page (in)
    int out_link_count = 0;   // intra-site edges out of this page (out)
    int ext_out_link_count = 0; // absolute links leaving the host
    int anchor_count = 0;       // all <a href> occurrences
    std::string html_source;
    std::string body_text;    // derived from html_source
    std::vector<ImageId> image_refs;
    std::int64_t fetched_at = 0; // unix seconds
};

struct Website {
    SiteId site_id;
    Label label = Label::Unknown;
    std::string root_url;
    std::string source;       // provenance: feed name or "synthetic"/"fetch"
    std::int64_t fetched_at = 0;
    PageId root_page_id;
    std::vector<WebPage> pages;                     // sorted by page_id
    std::vector<ImageAsset> images;                 // sorted by image_id
    std::vector<std::pair<PageId, PageId>> link_edges; // multiplicity kept, sorted

    const WebPage* find_page(const PageId& id) const;
    const ImageAsset* find_image(const ImageId& id) const;
};

struct Corpus {
    std::vector<Website> sites; // sorted by site_id
    std::vector<std::string> warnings;

    const Website* find_site(const SiteId& id) const;
};

// Recomputes everything derivable: sorts pages/images/edges, drops edges with
// missing endpoints (warning), recomputes BFS page levels from the root
// (unreachable pages get max reachable level + 1), recounts intra-site in/out
// link counts with multiplicity, re-extracts body text and anchor statistics
// from the raw HTML. Idempotent.
void establish_invariants(Website& site, std::vector<std::string>& warnings);

// Directory layout: <dir>/manifest, <dir>/pages/<page-id>.html,
// <dir>/images/<image-id>.<ext>. The label comes from the caller (the corpus
// layout encodes it as the parent directory name).
Website load_site(const std::filesystem::path& dir, Label label,
                  std::vector<std::string>& warnings);
void save_site(const Website& site, const std::filesystem::path& dir);

// Corpus layout: <root>/<label>/<site-id>/...  with label ∈ real|fake|unknown.
Corpus load_corpus(const std::filesystem::path& root);
void save_corpus(const Corpus& corpus, const std::filesystem::path& root);

struct StatsRow {
    std::string label;
    std::size_t sites = 0;
    std::size_t pages = 0;
    std::size_t images = 0;
    double pages_per_site = 0;  // total / sites, 0 when no sites
    double images_per_site = 0;
};

struct StatsTable {
    std::vector<StatsRow> rows; // real, fake, [unknown], total
};

StatsTable corpus_stats(const Corpus& corpus);

} // namespace escrowscan
