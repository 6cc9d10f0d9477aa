#include "escrowscan/corpus.hpp"

#include "escrowscan/html.hpp"
#include "escrowscan/image.hpp"
#include "escrowscan/url.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace escrowscan {

namespace fs = std::filesystem;

const WebPage* Website::find_page(const PageId& id) const {
    auto it = std::lower_bound(pages.begin(), pages.end(), id,
                               [](const WebPage& p, const PageId& k) { return p.page_id < k; });
    return (it != pages.end() && it->page_id == id) ? &*it : nullptr;
}

const ImageAsset* Website::find_image(const ImageId& id) const {
    auto it = std::lower_bound(images.begin(), images.end(), id,
                               [](const ImageAsset& a, const ImageId& k) { return a.image_id < k; });
    return (it != images.end() && it->image_id == id) ? &*it : nullptr;
}

const Website* Corpus::find_site(const SiteId& id) const {
    auto it = std::lower_bound(sites.begin(), sites.end(), id,
                               [](const Website& s, const SiteId& k) { return s.site_id < k; });
    return (it != sites.end() && it->site_id == id) ? &*it : nullptr;
}

void establish_invariants(Website& site, std::vector<std::string>& warnings) {
    std::sort(site.pages.begin(), site.pages.end(),
              [](const WebPage& a, const WebPage& b) { return a.page_id < b.page_id; });
    std::sort(site.images.begin(), site.images.end(),
              [](const ImageAsset& a, const ImageAsset& b) { return a.image_id < b.image_id; });

    std::set<PageId> page_ids;
    for (const auto& p : site.pages)
        if (!page_ids.insert(p.page_id).second)
            throw std::runtime_error("site " + site.site_id + ": duplicate page id " + p.page_id);

    // Edges with missing endpoints cannot participate in the graph.
    auto valid = [&](const std::pair<PageId, PageId>& e) {
        return page_ids.count(e.first) && page_ids.count(e.second);
    };
    std::size_t before = site.link_edges.size();
    std::erase_if(site.link_edges, [&](const auto& e) { return !valid(e); });
    if (site.link_edges.size() != before)
        warnings.push_back("site " + site.site_id + ": dropped " +
                           std::to_string(before - site.link_edges.size()) +
                           " edge(s) with missing endpoints");
    std::sort(site.link_edges.begin(), site.link_edges.end());

    // Derived page state: text, anchors, image refs kept sorted.
    const std::string site_host = parse_url(site.root_url).host;
    for (auto& p : site.pages) {
        p.site_id = site.site_id;
        HtmlScan scan = scan_html(p.html_source);
        p.body_text = scan.text;
        p.anchor_count = static_cast<int>(scan.anchor_hrefs.size());
        int ext = 0;
        const std::string& base = p.url.empty() ? site.root_url : p.url;
        for (const auto& href : scan.anchor_hrefs) {
            if (is_unfetchable_ref(href)) continue;
            ParsedUrl r = parse_url(href);
            if (r.absolute() && r.host != site_host && r.host != parse_url(base).host) ++ext;
        }
        p.ext_out_link_count = ext;
        std::sort(p.image_refs.begin(), p.image_refs.end());
        p.image_refs.erase(std::unique(p.image_refs.begin(), p.image_refs.end()),
                           p.image_refs.end());
        std::erase_if(p.image_refs, [&](const ImageId& id) { return !site.find_image(id); });
    }

    // Root page: explicit id if valid, else match on root_url, else first page.
    if (site.root_page_id.empty() || !page_ids.count(site.root_page_id)) {
        site.root_page_id.clear();
        for (const auto& p : site.pages)
            if (p.url == site.root_url) { site.root_page_id = p.page_id; break; }
        if (site.root_page_id.empty() && !site.pages.empty()) {
            site.root_page_id = site.pages.front().page_id;
            warnings.push_back("site " + site.site_id +
                               ": no page matches root_url; using " + site.root_page_id);
        }
    }

    // Intra-site degree counts, multiplicity included.
    std::map<PageId, int> in_deg, out_deg;
    std::map<PageId, std::set<PageId>> adj; // deduped for BFS
    for (const auto& [from, to] : site.link_edges) {
        ++out_deg[from];
        ++in_deg[to];
        adj[from].insert(to);
    }

    // BFS levels from root over directed edges.
    std::map<PageId, int> level;
    if (!site.root_page_id.empty()) {
        std::deque<PageId> q{site.root_page_id};
        level[site.root_page_id] = 0;
        while (!q.empty()) {
            PageId cur = q.front();
            q.pop_front();
            auto it = adj.find(cur);
            if (it == adj.end()) continue;
            for (const auto& nxt : it->second) {
                if (level.count(nxt)) continue;
                level[nxt] = level[cur] + 1;
                q.push_back(nxt);
            }
        }
    }
    int max_reachable = 0;
    for (const auto& [id, lv] : level) max_reachable = std::max(max_reachable, lv);
    bool any_unreachable = false;
    for (auto& p : site.pages) {
        auto it = level.find(p.page_id);
        if (it != level.end()) {
            p.page_level = it->second;
        } else {
            p.page_level = max_reachable + 1;
            any_unreachable = true;
        }
        p.in_link_count = in_deg.count(p.page_id) ? in_deg[p.page_id] : 0;
        p.out_link_count = out_deg.count(p.page_id) ? out_deg[p.page_id] : 0;
    }
    if (any_unreachable)
        warnings.push_back("site " + site.site_id +
                           ": unreachable page(s) assigned level " +
                           std::to_string(max_reachable + 1));
}

namespace {

std::string ext_of(const fs::path& file) {
    std::string e = file.extension().string();
    if (!e.empty() && e[0] == '.') e.erase(0, 1);
    std::transform(e.begin(), e.end(), e.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return e;
}

std::vector<std::uint8_t> read_bytes(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + file.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& file, const void* data, std::size_t size) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
}

} // namespace

Website load_site(const fs::path& dir, Label label, std::vector<std::string>& warnings) {
    fs::path manifest = dir / "manifest";
    std::ifstream in(manifest);
    if (!in)
        throw std::runtime_error("load error: missing manifest in " + dir.string());

    Website site;
    site.site_id = dir.filename().string();
    site.label = label;

    std::string line;
    std::getline(in, line);
    if (!line.starts_with("escrowscan-manifest"))
        throw std::runtime_error("load error: bad manifest header in " + dir.string());

    struct PageRec { PageId id; std::int64_t at; std::string url; };
    std::vector<PageRec> page_recs;
    std::map<PageId, std::vector<ImageId>> refs;

    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string kw;
        ls >> kw;
        if (kw == "root_url") {
            ls >> site.root_url;
        } else if (kw == "fetched_at") {
            ls >> site.fetched_at;
        } else if (kw == "root_page") {
            ls >> site.root_page_id;
        } else if (kw == "source") {
            std::getline(ls, site.source);
            if (!site.source.empty() && site.source[0] == ' ') site.source.erase(0, 1);
        } else if (kw == "page") {
            PageRec r;
            ls >> r.id >> r.at >> r.url;
            if (r.id.empty())
                throw std::runtime_error("load error: bad page record in " + manifest.string());
            page_recs.push_back(std::move(r));
        } else if (kw == "edge") {
            PageId from, to;
            ls >> from >> to;
            site.link_edges.emplace_back(std::move(from), std::move(to));
        } else if (kw == "imgref") {
            PageId pid;
            ImageId iid;
            ls >> pid >> iid;
            refs[pid].push_back(iid);
        } else {
            warnings.push_back("site " + site.site_id + ": unknown manifest keyword '" +
                               kw + "' ignored");
        }
    }
    if (site.root_url.empty())
        throw std::runtime_error("load error: manifest missing root_url in " + dir.string());

    for (auto& r : page_recs) {
        WebPage p;
        p.page_id = r.id;
        p.site_id = site.site_id;
        p.url = r.url;
        p.fetched_at = r.at;
        fs::path html = dir / "pages" / (r.id + ".html");
        if (fs::exists(html)) {
            auto bytes = read_bytes(html);
            p.html_source.assign(bytes.begin(), bytes.end());
        } else {
            warnings.push_back("site " + site.site_id + ": missing page file " +
                               html.filename().string());
        }
        if (auto it = refs.find(r.id); it != refs.end()) p.image_refs = it->second;
        site.pages.push_back(std::move(p));
    }

    fs::path imgdir = dir / "images";
    if (fs::exists(imgdir)) {
        std::vector<fs::path> files;
        for (const auto& e : fs::directory_iterator(imgdir))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            ImageAsset a;
            a.image_id = f.stem().string();
            a.extension = ext_of(f);
            a.raw_bytes = read_bytes(f);
            a.file_size_bytes = a.raw_bytes.size();
            if (auto dec = decode_image(a.raw_bytes)) {
                a.width_px = dec->width;
                a.height_px = dec->height;
                a.pixels = std::move(dec->rgb);
            } else {
                warnings.push_back("site " + site.site_id + ": undecodable image " +
                                   f.filename().string());
            }
            site.images.push_back(std::move(a));
        }
    }

    establish_invariants(site, warnings);
    return site;
}

void save_site(const Website& site, const fs::path& dir) {
    fs::create_directories(dir / "pages");
    if (!site.images.empty()) fs::create_directories(dir / "images");

    std::ofstream mf(dir / "manifest");
    if (!mf) throw std::runtime_error("cannot write manifest in " + dir.string());
    mf << "escrowscan-manifest v1\n";
    mf << "root_url " << site.root_url << "\n";
    mf << "fetched_at " << site.fetched_at << "\n";
    if (!site.root_page_id.empty()) mf << "root_page " << site.root_page_id << "\n";
    if (!site.source.empty()) mf << "source " << site.source << "\n";
    for (const auto& p : site.pages)
        mf << "page " << p.page_id << " " << p.fetched_at << " " << p.url << "\n";
    for (const auto& [from, to] : site.link_edges) mf << "edge " << from << " " << to << "\n";
    for (const auto& p : site.pages)
        for (const auto& iid : p.image_refs) mf << "imgref " << p.page_id << " " << iid << "\n";
    mf.close();

    for (const auto& p : site.pages)
        write_bytes(dir / "pages" / (p.page_id + ".html"), p.html_source.data(),
                    p.html_source.size());
    for (const auto& a : site.images)
        write_bytes(dir / "images" / (a.image_id + "." + a.extension),
                    a.raw_bytes.data(), a.raw_bytes.size());
}

Corpus load_corpus(const fs::path& root) {
    Corpus corpus;
    if (!fs::exists(root))
        throw std::runtime_error("load error: corpus root does not exist: " + root.string());
    for (const char* label_dir : {"real", "fake", "unknown"}) {
        fs::path ld = root / label_dir;
        if (!fs::exists(ld)) continue;
        std::vector<fs::path> site_dirs;
        for (const auto& e : fs::directory_iterator(ld))
            if (e.is_directory()) site_dirs.push_back(e.path());
        std::sort(site_dirs.begin(), site_dirs.end());
        for (const auto& sd : site_dirs)
            corpus.sites.push_back(load_site(sd, label_from_string(label_dir), corpus.warnings));
    }
    std::sort(corpus.sites.begin(), corpus.sites.end(),
              [](const Website& a, const Website& b) { return a.site_id < b.site_id; });
    std::set<SiteId> ids;
    for (const auto& s : corpus.sites)
        if (!ids.insert(s.site_id).second)
            throw std::runtime_error("load error: duplicate site id " + s.site_id);
    return corpus;
}

void save_corpus(const Corpus& corpus, const fs::path& root) {
    for (const auto& s : corpus.sites)
        save_site(s, root / to_string(s.label) / s.site_id);
}

StatsTable corpus_stats(const Corpus& corpus) {
    auto row_for = [&](Label want, const std::string& name) {
        StatsRow r;
        r.label = name;
        for (const auto& s : corpus.sites) {
            if (s.label != want) continue;
            ++r.sites;
            r.pages += s.pages.size();
            r.images += s.images.size();
        }
        if (r.sites) {
            r.pages_per_site = static_cast<double>(r.pages) / static_cast<double>(r.sites);
            r.images_per_site = static_cast<double>(r.images) / static_cast<double>(r.sites);
        }
        return r;
    };
    StatsTable t;
    t.rows.push_back(row_for(Label::Real, "real"));
    t.rows.push_back(row_for(Label::Fake, "fake"));
    StatsRow unknown = row_for(Label::Unknown, "unknown");
    if (unknown.sites) t.rows.push_back(unknown);

    StatsRow total;
    total.label = "total";
    for (const auto& r : t.rows) {
        total.sites += r.sites;
        total.pages += r.pages;
        total.images += r.images;
    }
    if (total.sites) {
        total.pages_per_site = static_cast<double>(total.pages) / static_cast<double>(total.sites);
        total.images_per_site =
            static_cast<double>(total.images) / static_cast<double>(total.sites);
    }
    t.rows.push_back(total);
    return t;
}

} // namespace escrowscan
