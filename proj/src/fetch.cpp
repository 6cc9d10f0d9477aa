#include "escrowscan/fetch.hpp"

#include "escrowscan/html.hpp"
#include "escrowscan/image.hpp"
#include "escrowscan/url.hpp"

#ifdef ESCROWSCAN_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace escrowscan {

namespace {

struct UrlParts {
    std::string origin; // scheme://host[:port]
    std::string path;   // path?query, '/' when empty
};

UrlParts split_origin(const std::string& url) {
    ParsedUrl p = parse_url(url);
    if (!p.absolute() || p.host.empty())
        throw std::runtime_error("fetch needs an absolute http(s) URL, got '" + url + "'");
    if (p.scheme != "http" && p.scheme != "https")
        throw std::runtime_error("unsupported scheme '" + p.scheme + "' in '" + url + "'");
    UrlParts out;
    out.origin = p.scheme + "://" + p.host;
    out.path = p.path.empty() ? "/" : p.path;
    return out;
}

std::string http_error(const httplib::Result& res) {
    if (!res) return "transport error (" + httplib::to_string(res.error()) + ")";
    return "HTTP status " + std::to_string(res->status);
}

std::string counter_id(char prefix, std::size_t n) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%04zu", prefix, n);
    return buf;
}

std::string extension_of(const std::string& url) {
    ParsedUrl p = parse_url(url);
    std::string path = p.path;
    auto q = path.find_first_of("?#");
    if (q != std::string::npos) path.resize(q);
    auto slash = path.find_last_of('/');
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = name.find_last_of('.');
    if (dot == std::string::npos || dot + 1 >= name.size()) return "bin";
    std::string ext = name.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (char c : ext)
        if (!std::isalnum(static_cast<unsigned char>(c))) return "bin";
    return ext.empty() ? "bin" : ext;
}

bool looks_like_html(const std::string& body) {
    return body.find('<') != std::string::npos &&
           (body.find("href") != std::string::npos || body.find("<a") != std::string::npos);
}

std::string trim_copy(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

Website fetch_site(const std::string& root_url, const FetchOptions& opt,
                   std::vector<std::string>& warnings) {
    if (opt.max_depth < 0 || opt.max_pages < 1)
        throw std::invalid_argument("fetch limits must satisfy max_depth >= 0, max_pages >= 1");
    UrlParts root = split_origin(root_url);
#ifndef ESCROWSCAN_HAVE_OPENSSL
    if (root.origin.rfind("https", 0) == 0)
        throw std::runtime_error("built without TLS support; cannot fetch " + root_url);
#endif

    httplib::Client cli(root.origin);
    cli.set_follow_location(true);
    cli.set_connection_timeout(opt.timeout_s, 0);
    cli.set_read_timeout(opt.timeout_s, 0);

    Website site;
    site.site_id = opt.site_id.empty() ? parse_url(root_url).host : opt.site_id;
    site.label = opt.label;
    site.root_url = root.origin + root.path;
    site.source = "fetch";
    site.fetched_at = static_cast<std::int64_t>(std::time(nullptr));

    auto polite = [&opt, first = true]() mutable {
        if (first) {
            first = false;
            return;
        }
        if (opt.politeness_ms > 0)
            std::this_thread::sleep_for(std::chrono::milliseconds(opt.politeness_ms));
    };

    struct Pending {
        std::string url; // absolute, fragment-free
        int depth;
    };
    std::map<std::string, PageId> page_of_url;
    std::map<std::string, ImageId> image_of_url;
    std::vector<std::pair<PageId, std::string>> raw_edges; // from page -> target url
    std::map<PageId, std::vector<std::string>> raw_imgrefs;
    std::deque<Pending> queue;
    std::size_t off_host_images = 0;

    queue.push_back({site.root_url, 0});
    page_of_url[site.root_url] = counter_id('p', 1);

    while (!queue.empty()) {
        Pending cur = queue.front();
        queue.pop_front();
        PageId pid = page_of_url[cur.url];

        polite();
        UrlParts parts = split_origin(cur.url);
        auto res = cli.Get(parts.path);
        if (!res || res->status != 200) {
            if (pid == "p0001")
                throw std::runtime_error("fetch failed for " + cur.url + ": " +
                                         http_error(res));
            warnings.push_back("page fetch failed for " + cur.url + ": " + http_error(res) +
                               "; skipped");
            continue;
        }

        WebPage page;
        page.page_id = pid;
        page.site_id = site.site_id;
        page.url = cur.url;
        page.html_source = res->body;
        page.fetched_at = static_cast<std::int64_t>(std::time(nullptr));

        HtmlScan scan = scan_html(page.html_source);
        for (const std::string& href : scan.anchor_hrefs) {
            if (is_unfetchable_ref(href)) continue;
            std::string target = resolve_url(cur.url, href);
            if (!same_host(site.root_url, target)) continue;
            raw_edges.emplace_back(pid, target);
            if (cur.depth < opt.max_depth && page_of_url.find(target) == page_of_url.end() &&
                page_of_url.size() < static_cast<std::size_t>(opt.max_pages)) {
                page_of_url[target] = counter_id('p', page_of_url.size() + 1);
                queue.push_back({target, cur.depth + 1});
            }
        }
        for (const std::string& src : scan.img_srcs) {
            if (is_unfetchable_ref(src)) continue;
            std::string target = resolve_url(cur.url, src);
            if (!same_host(site.root_url, target)) {
                ++off_host_images;
                continue;
            }
            raw_imgrefs[pid].push_back(target);
            if (image_of_url.find(target) == image_of_url.end() &&
                image_of_url.size() < static_cast<std::size_t>(opt.max_images))
                image_of_url[target] = counter_id('i', image_of_url.size() + 1);
        }
        site.pages.push_back(std::move(page));
    }

    if (site.pages.empty())
        throw std::runtime_error("fetch failed for " + root_url + ": no pages retrieved");
    if (off_host_images > 0)
        warnings.push_back(std::to_string(off_host_images) +
                           " off-host image references skipped");

    // Image downloads, in id order.
    std::vector<std::pair<ImageId, std::string>> by_id;
    for (const auto& [url, id] : image_of_url) by_id.emplace_back(id, url);
    std::sort(by_id.begin(), by_id.end());
    for (const auto& [id, url] : by_id) {
        polite();
        UrlParts parts = split_origin(url);
        auto res = cli.Get(parts.path);
        if (!res || res->status != 200) {
            warnings.push_back("image fetch failed for " + url + ": " + http_error(res) +
                               "; skipped");
            image_of_url.erase(url);
            continue;
        }
        ImageAsset img;
        img.image_id = id;
        img.extension = extension_of(url);
        img.raw_bytes.assign(res->body.begin(), res->body.end());
        img.file_size_bytes = img.raw_bytes.size();
        if (auto dec = decode_image(img.raw_bytes)) {
            img.width_px = dec->width;
            img.height_px = dec->height;
            img.pixels = std::move(dec->rgb);
        } else {
            warnings.push_back("image " + id + " (" + url + ") is undecodable; pixels absent");
        }
        site.images.push_back(std::move(img));
    }

    // Anchor edges whose targets were fetched; image refs that downloaded.
    for (const auto& [from, target] : raw_edges) {
        auto it = page_of_url.find(target);
        if (it == page_of_url.end()) continue;
        bool target_fetched = false;
        for (const auto& p : site.pages) target_fetched |= p.page_id == it->second;
        if (target_fetched) site.link_edges.emplace_back(from, it->second);
    }
    for (auto& page : site.pages) {
        auto it = raw_imgrefs.find(page.page_id);
        if (it == raw_imgrefs.end()) continue;
        for (const auto& url : it->second) {
            auto img = image_of_url.find(url);
            if (img != image_of_url.end()) page.image_refs.push_back(img->second);
        }
    }

    site.root_page_id = "p0001";
    establish_invariants(site, warnings);
    return site;
}

SeenStore::SeenStore(std::filesystem::path file) : file_(std::move(file)) {
    std::ifstream is(file_);
    if (!is) return;
    std::string line;
    while (std::getline(is, line)) {
        line = trim_copy(line);
        if (!line.empty()) seen_.insert(line);
    }
}

void SeenStore::save() const {
    std::ofstream os(file_);
    if (!os) throw std::runtime_error("cannot write seen store " + file_.string());
    for (const auto& url : seen_) os << url << '\n';
}

std::vector<std::string> poll_blacklist(const std::vector<std::string>& feed_urls,
                                        SeenStore& store,
                                        std::vector<std::string>& warnings) {
    std::vector<std::string> fresh;
    std::set<std::string> in_batch;
    for (const auto& feed : feed_urls) {
        std::string body;
        try {
            UrlParts parts = split_origin(feed);
            httplib::Client cli(parts.origin);
            cli.set_follow_location(true);
            auto res = cli.Get(parts.path);
            if (!res || res->status != 200) {
                warnings.push_back("feed " + feed + " unreachable: " + http_error(res));
                continue;
            }
            body = res->body;
        } catch (const std::exception& e) {
            warnings.push_back("feed " + feed + " unreachable: " + e.what());
            continue;
        }

        std::vector<std::string> urls;
        if (looks_like_html(body)) {
            for (const std::string& href : scan_html(body).anchor_hrefs) {
                ParsedUrl p = parse_url(href);
                if (p.absolute() && (p.scheme == "http" || p.scheme == "https"))
                    urls.push_back(trim_copy(href));
            }
        } else {
            std::istringstream is(body);
            std::string line;
            while (std::getline(is, line)) {
                line = trim_copy(line);
                if (line.empty() || line[0] == '#') continue;
                ParsedUrl p = parse_url(line);
                if (p.absolute() && (p.scheme == "http" || p.scheme == "https"))
                    urls.push_back(line);
            }
        }
        for (const auto& url : urls) {
            if (!in_batch.insert(url).second) continue; // duplicate across/within feeds
            if (store.contains(url)) continue;
            fresh.push_back(url);
        }
    }
    for (const auto& url : fresh) store.add(url);
    store.save();
    return fresh;
}

} // namespace escrowscan
