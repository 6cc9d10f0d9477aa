#include "escrowscan/synth.hpp"

#include "escrowscan/image.hpp"
#include "escrowscan/rng.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace escrowscan {

namespace {

// Trade vocabulary sprinkled through fake-site text; mostly outside the
// common-word list, so it also feeds the misspelling group.
const std::vector<std::string> kTradeTerms = {
    "escrow",   "secure",   "transaction", "payment",  "buyer",   "seller",
    "guarantee", "delivery", "shipping",   "verify",   "account", "funds",
    "transfer", "protection", "invoice",   "confirm",  "deposit", "release",
    "dispute",  "refund",   "tracking",    "merchant", "fee",     "balance",
    "wire",     "receipt",  "agreement",   "broker"};

const std::vector<std::string> kTlds = {"com", "net", "org", "info"};

std::string two_digits(const char* stem, int n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%02d", stem, n);
    return buf;
}

std::string page_num_id(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "p%04zu", i + 1);
    return buf;
}

std::string image_num_id(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "i%04zu", i + 1);
    return buf;
}

// Draws from [lo, hi) of the master list, so template and real-site
// vocabularies can live in disjoint ranges.
std::vector<std::string> sample_words(const std::vector<std::string>& pool, std::size_t n,
                                      std::size_t lo, std::size_t hi, Rng& rng) {
    if (hi > pool.size()) hi = pool.size();
    if (lo >= hi) lo = 0;
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(pool[lo + rng.bounded(hi - lo)]);
    return out;
}

std::string make_sentence(const std::vector<std::string>& pool,
                          const std::vector<std::string>& glue, Rng& rng) {
    std::size_t len = 7 + rng.bounded(7);
    std::string s;
    for (std::size_t i = 0; i < len; ++i) {
        const std::vector<std::string>& src = rng.bounded(3) == 0 ? glue : pool;
        std::string w = src[rng.bounded(src.size())];
        if (i == 0 && !w.empty())
            w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        if (i) s += ' ';
        s += w;
    }
    s += '.';
    return s;
}

// ---------------------------------------------------------------------------
// Topology: list of directed intra-site edges over page indices.

struct Topology {
    std::size_t pages = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
};

// Full navigation mesh: every page links to every other, so levels stay at
// 0/1 and in/out degrees sit at page count - 1 on every page. Identical for
// every site stamped from the template.
Topology template_topology(std::size_t pages) {
    Topology t;
    t.pages = pages;
    for (std::size_t a = 0; a < pages; ++a)
        for (std::size_t b = 0; b < pages; ++b)
            if (a != b) t.edges.emplace_back(a, b);
    return t;
}

// Random tree biased toward chains entered through a single page under the
// root: deep levels, degrees of a handful at most — the structural opposite
// of the template mesh.
Topology real_topology(std::size_t pages, Rng& rng) {
    Topology t;
    t.pages = pages;
    for (std::size_t i = 1; i < pages; ++i) {
        std::size_t parent = i == 1 ? 0
                             : rng.bounded(2) ? i - 1
                                              : 1 + rng.bounded(i - 1);
        t.edges.emplace_back(parent, i);
        if (rng.bounded(3) == 0) t.edges.emplace_back(i, parent);
    }
    std::size_t extras = rng.bounded(4);
    for (std::size_t e = 0; e < extras && pages > 3; ++e) {
        std::size_t a = 1 + rng.bounded(pages - 1), b = 1 + rng.bounded(pages - 1);
        if (a != b) t.edges.emplace_back(a, b);
    }
    return t;
}

// ---------------------------------------------------------------------------
// Images.

ImageAsset make_image(const ImageId& id, int w, int h, int r, int g, int b, int pattern) {
    DecodedImage img;
    img.width = w;
    img.height = h;
    img.rgb.resize(static_cast<std::size_t>(3) * w * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int rr = r, gg = g, bb = b;
            switch (pattern) {
            case 0: break; // solid
            case 1: // vertical bands
                if ((x / 8) % 2) { rr = 255 - r; gg = 255 - g; bb = 255 - b; }
                break;
            case 2: // checker
                if (((x / 4) + (y / 4)) % 2) { rr = r / 2; gg = g / 2; bb = b / 2; }
                break;
            default: // horizontal gradient
                rr = (r + x * 2) % 256;
                break;
            }
            std::size_t off = 3 * (static_cast<std::size_t>(y) * w + x);
            img.rgb[off] = static_cast<std::uint8_t>(rr);
            img.rgb[off + 1] = static_cast<std::uint8_t>(gg);
            img.rgb[off + 2] = static_cast<std::uint8_t>(bb);
        }
    }
    ImageAsset asset;
    asset.image_id = id;
    asset.extension = "png";
    asset.width_px = w;
    asset.height_px = h;
    asset.pixels = img.rgb;
    asset.raw_bytes = encode_png(img);
    asset.file_size_bytes = asset.raw_bytes.size();
    return asset;
}

// ---------------------------------------------------------------------------
// HTML assembly. The page text, anchors and image tags are embedded in the
// markup; corpus invariants re-derive body text and anchor counts from it.

struct PageContent {
    std::string title;
    std::vector<std::string> paragraphs;
    std::vector<std::string> nav_hrefs;      // intra-site, root-relative
    std::vector<std::string> external_urls;
    std::vector<std::string> img_srcs;
};

// Fixed boxy layout shared by every page stamped from a template: nav list,
// headline, fee table, form. Sites of one template differ only in the text.
std::string fake_html(const PageContent& c, std::size_t table_rows) {
    std::ostringstream os;
    os << "<html><head><title>" << c.title << "</title></head>\n<body>\n";
    os << "<div><ul>\n";
    for (const auto& href : c.nav_hrefs)
        os << "<li><a href=\"" << href << "\">" << c.title << "</a></li>\n";
    os << "</ul></div>\n<h1>" << c.title << "</h1>\n";
    for (const auto& src : c.img_srcs) os << "<img src=\"" << src << "\">\n";
    os << "<div>\n";
    for (const auto& p : c.paragraphs) os << "<p>" << p << "</p>\n";
    os << "</div>\n<table>\n";
    for (std::size_t rw = 0; rw < table_rows; ++rw)
        os << "<tr><td>step</td><td>fee</td><td>total</td></tr>\n";
    os << "</table>\n<form><input><input><input></form>\n";
    for (const auto& url : c.external_urls)
        os << "<a href=\"" << url << "\">partner</a>\n";
    os << "</body></html>\n";
    return os.str();
}

// Loose article layout with a per-site tag style and randomized section
// counts.
std::string real_html(const PageContent& c, const std::vector<std::string>& style_tags,
                      Rng& rng) {
    std::ostringstream os;
    os << "<html><head><title>" << c.title << "</title></head>\n<body>\n";
    for (const auto& href : c.nav_hrefs)
        os << "<a href=\"" << href << "\">" << c.title << "</a>\n";
    std::size_t pi = 0;
    for (const auto& p : c.paragraphs) {
        const std::string& wrap = style_tags[rng.bounded(style_tags.size())];
        os << "<" << wrap << ">";
        if (pi < c.img_srcs.size()) os << "<img src=\"" << c.img_srcs[pi] << "\">";
        os << "<p>" << p << "</p></" << wrap << ">\n";
        ++pi;
    }
    for (const auto& url : c.external_urls)
        os << "<a href=\"" << url << "\">source</a>\n";
    os << "</body></html>\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Template bundle: everything shared by the fake sites stamped from it.

struct SiteTemplate {
    Topology topo;
    std::vector<std::string> word_pool;   // template vocabulary
    std::vector<std::string> sentences;   // duplicated text bank
    std::vector<std::string> paths;       // page URL paths, index-aligned
    std::vector<ImageAsset> images;       // shared byte-identical assets
    std::string host_stem;                // hosts differ only by instance digits
    std::size_t table_rows = 1;
};

SiteTemplate build_template(int t, const SynthConfig& cfg, const ExtractionContext& ctx) {
    Rng rng(derive_seed(cfg.seed, 0xfa4e, static_cast<std::uint64_t>(t)));
    SiteTemplate tpl;

    std::size_t pages =
        static_cast<std::size_t>(cfg.pages_min) +
        static_cast<std::size_t>(t) % static_cast<std::size_t>(cfg.pages_max - cfg.pages_min + 1);
    tpl.topo = template_topology(pages);
    tpl.table_rows = 1 + static_cast<std::size_t>(t % 3);

    std::size_t half = ctx.english_words.size() / 2;
    tpl.word_pool = sample_words(ctx.english_words, 90, half, ctx.english_words.size(), rng);
    for (const auto& w : kTradeTerms) tpl.word_pool.push_back(w);

    for (int i = 0; i < 40; ++i)
        tpl.sentences.push_back(make_sentence(tpl.word_pool, ctx.function_words, rng));

    tpl.host_stem = kTradeTerms[rng.bounded(kTradeTerms.size())] + "-" +
                    kTradeTerms[rng.bounded(kTradeTerms.size())] + "-online";

    tpl.paths.push_back(""); // root
    for (std::size_t i = 1; i < pages; ++i) {
        std::string path = kTradeTerms[i % kTradeTerms.size()] + "-" +
                           tpl.word_pool[rng.bounded(tpl.word_pool.size())];
        tpl.paths.push_back(path + "-" + std::to_string(i) + ".html");
    }

    int base_r = static_cast<int>(rng.bounded(200));
    int base_g = static_cast<int>(rng.bounded(200));
    int base_b = static_cast<int>(rng.bounded(200));
    tpl.images.push_back(make_image("i0001", 96, 48, base_r, base_g, base_b, 1));
    tpl.images.push_back(make_image("i0002", 32, 32, base_g, base_b, base_r, 2));
    tpl.images.push_back(make_image("i0003", 140, 30, base_b, base_r, base_g, 3));
    return tpl;
}

std::vector<std::vector<std::string>> nav_href_lists(const Topology& topo,
                                                     const std::vector<std::string>& paths) {
    std::vector<std::vector<std::string>> out(topo.pages);
    for (const auto& [from, to] : topo.edges)
        out[from].push_back("/" + paths[to]);
    return out;
}

Website stamp_fake_site(int index, const SiteTemplate& tpl, const SynthConfig& cfg,
                        std::vector<std::string>& warnings) {
    Website site;
    site.site_id = two_digits("fake", index + 1);
    site.label = Label::Fake;
    site.source = "synthetic";
    std::string host =
        "www." + tpl.host_stem + std::to_string(index + 1) + "." + kTlds[index % kTlds.size()];
    site.root_url = "http://" + host + "/";

    Rng rng(derive_seed(cfg.seed, 0x517e, static_cast<std::uint64_t>(index)));
    auto navs = nav_href_lists(tpl.topo, tpl.paths);

    for (std::size_t i = 0; i < tpl.topo.pages; ++i) {
        WebPage page;
        page.page_id = page_num_id(i);
        page.site_id = site.site_id;
        page.url = "http://" + host + "/" + tpl.paths[i];

        PageContent c;
        c.title = tpl.word_pool[(i * 7) % tpl.word_pool.size()] + " " +
                  kTradeTerms[i % kTradeTerms.size()];
        // Text duplication: page i carries the same bank sentences on every
        // site of the template, plus one site-specific line.
        std::size_t n_sent = 5 + i % 3;
        for (std::size_t j = 0; j < n_sent; ++j)
            c.paragraphs.push_back(tpl.sentences[(i * 3 + j * 7) % tpl.sentences.size()]);
        c.paragraphs.push_back("Welcome to " + tpl.host_stem + " office " +
                               std::to_string(index + 1) + " " +
                               tpl.word_pool[rng.bounded(tpl.word_pool.size())] + ".");
        c.nav_hrefs = navs[i];
        c.img_srcs.push_back("/assets/logo.png");
        c.img_srcs.push_back(i % 2 == 0 ? "/assets/seal.png" : "/assets/banner.png");
        if (rng.bounded(4) == 0)
            c.external_urls.push_back("http://www.partner-network.example/verify");

        page.html_source = fake_html(c, tpl.table_rows);
        page.image_refs.push_back("i0001");
        page.image_refs.push_back(i % 2 == 0 ? "i0002" : "i0003");
        site.pages.push_back(std::move(page));
    }

    site.images = tpl.images;
    for (const auto& [from, to] : tpl.topo.edges)
        site.link_edges.emplace_back(page_num_id(from), page_num_id(to));
    site.root_page_id = "p0001";
    establish_invariants(site, warnings);
    return site;
}

// Which single template category, if any, a real site borrows.
enum class Borrow { None, Body, Html, Url, Image };

Website make_real_site(int index, Borrow borrow, const std::vector<SiteTemplate>& tpls,
                       const SynthConfig& cfg, const ExtractionContext& ctx,
                       std::vector<std::string>& warnings) {
    Website site;
    site.site_id = two_digits("real", index + 1);
    site.label = Label::Real;
    site.source = "synthetic";

    Rng rng(derive_seed(cfg.seed, 0x4ea1, static_cast<std::uint64_t>(index)));
    const SiteTemplate& donor = tpls[static_cast<std::size_t>(index) % tpls.size()];

    std::vector<std::string> pool =
        sample_words(ctx.english_words, 130, 0, ctx.english_words.size() / 2, rng);
    std::string host = "www." + pool[rng.bounded(pool.size())] +
                       pool[rng.bounded(pool.size())] + "." + kTlds[rng.bounded(kTlds.size())];
    site.root_url = "http://" + host + "/";

    std::size_t pages = static_cast<std::size_t>(cfg.pages_min) +
                        rng.bounded(static_cast<std::uint64_t>(cfg.pages_max - cfg.pages_min + 1));
    Topology topo = real_topology(pages, rng);

    static const std::vector<std::string> kTagPool = {
        "div", "span",  "section", "article", "aside",      "header",
        "em",  "strong", "ol",     "ul",      "blockquote", "pre"};
    std::vector<std::string> style = kTagPool;
    rng.shuffle(style);
    style.resize(4 + rng.bounded(4));

    // Paths.
    std::vector<std::string> paths(pages);
    if (borrow == Borrow::Url) {
        for (std::size_t i = 0; i < pages; ++i)
            paths[i] = donor.paths[i % donor.paths.size()];
        paths[0] = "";
    } else {
        static const std::vector<std::string> kExts = {".html", ".php", ""};
        for (std::size_t i = 1; i < pages; ++i)
            paths[i] = pool[rng.bounded(pool.size())] + "/" + pool[rng.bounded(pool.size())] +
                       kExts[rng.bounded(kExts.size())];
    }

    // Images.
    if (borrow == Borrow::Image) {
        site.images = donor.images;
    } else {
        std::size_t n_img = 1 + rng.bounded(3);
        for (std::size_t i = 0; i < n_img; ++i)
            site.images.push_back(make_image(
                image_num_id(i), 20 + static_cast<int>(rng.bounded(160)),
                20 + static_cast<int>(rng.bounded(120)), static_cast<int>(rng.bounded(256)),
                static_cast<int>(rng.bounded(256)), static_cast<int>(rng.bounded(256)),
                static_cast<int>(rng.bounded(4))));
    }

    auto navs = nav_href_lists(topo, paths);
    for (std::size_t i = 0; i < pages; ++i) {
        WebPage page;
        page.page_id = page_num_id(i);
        page.site_id = site.site_id;
        page.url = "http://" + host + "/" + paths[i];

        PageContent c;
        c.title = pool[rng.bounded(pool.size())] + " " + pool[rng.bounded(pool.size())];
        std::size_t n_sent = 5 + rng.bounded(4);
        for (std::size_t j = 0; j < n_sent; ++j) {
            if (borrow == Borrow::Body && j % 2 == 0)
                c.paragraphs.push_back(
                    donor.sentences[rng.bounded(donor.sentences.size())]);
            else
                c.paragraphs.push_back(make_sentence(pool, ctx.function_words, rng));
        }
        c.nav_hrefs = navs[i];
        std::size_t n_ext = 2 + rng.bounded(4);
        for (std::size_t e = 0; e < n_ext; ++e)
            c.external_urls.push_back("http://www." + pool[rng.bounded(pool.size())] +
                                      ".net/" + pool[rng.bounded(pool.size())]);
        std::size_t n_ref = rng.bounded(3);
        for (std::size_t k = 0; k < n_ref && k < site.images.size(); ++k) {
            c.img_srcs.push_back("/media/" + std::to_string(k) + ".png");
            page.image_refs.push_back(site.images[k].image_id);
        }

        page.html_source = borrow == Borrow::Html ? fake_html(c, donor.table_rows)
                                                  : real_html(c, style, rng);
        site.pages.push_back(std::move(page));
    }

    for (const auto& [from, to] : topo.edges)
        site.link_edges.emplace_back(page_num_id(from), page_num_id(to));
    site.root_page_id = "p0001";
    establish_invariants(site, warnings);
    return site;
}

} // namespace

Corpus generate_benchmark_corpus(const SynthConfig& cfg, const ExtractionContext& ctx) {
    if (cfg.fake_sites < 1 || cfg.real_sites < 1 || cfg.templates < 1)
        throw std::invalid_argument("benchmark corpus needs >= 1 fake/real site and template");
    if (cfg.fake_sites > 99 || cfg.real_sites > 99)
        throw std::invalid_argument("benchmark corpus caps at 99 sites per class");
    if (cfg.pages_min < 2 || cfg.pages_max < cfg.pages_min)
        throw std::invalid_argument("benchmark corpus needs 2 <= pages_min <= pages_max");

    Corpus corpus;
    std::vector<SiteTemplate> tpls;
    for (int t = 0; t < cfg.templates; ++t) tpls.push_back(build_template(t, cfg, ctx));

    for (int s = 0; s < cfg.fake_sites; ++s)
        corpus.sites.push_back(
            stamp_fake_site(s, tpls[static_cast<std::size_t>(s % cfg.templates)], cfg,
                            corpus.warnings));

    for (int r = 0; r < cfg.real_sites; ++r) {
        Borrow borrow = Borrow::None;
        if (cfg.confusers && cfg.real_sites >= 8) {
            int from_end = cfg.real_sites - 1 - r;
            if (from_end == 0) borrow = Borrow::Image;
            else if (from_end == 1) borrow = Borrow::Url;
            else if (from_end == 2) borrow = Borrow::Html;
            else if (from_end == 3) borrow = Borrow::Body;
        }
        corpus.sites.push_back(make_real_site(r, borrow, tpls, cfg, ctx, corpus.warnings));
    }
    return corpus;
}

} // namespace escrowscan
