#pragma once

#include "escrowscan/corpus.hpp"
#include "escrowscan/types.hpp"

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace escrowscan {

struct FetchOptions {
    int max_depth = 2;     // link hops from the root
    int max_pages = 50;
    int max_images = 200;
    int politeness_ms = 250; // delay between requests
    int timeout_s = 10;
    std::string site_id;   // empty: derived from the host
    Label label = Label::Unknown;
};

// Same-host BFS crawl: stores raw HTML, downloads same-host images, records
// every intra-site anchor as a link edge. The root must fetch; per-page
// failures become warnings and the crawl continues.
Website fetch_site(const std::string& root_url, const FetchOptions& opt,
                   std::vector<std::string>& warnings);

// Persistent line-oriented set of already-seen URLs backing poll_blacklist.
class SeenStore {
public:
    explicit SeenStore(std::filesystem::path file); // loads the file if present
    bool contains(const std::string& url) const { return seen_.count(url) > 0; }
    bool add(const std::string& url) { return seen_.insert(url).second; }
    void save() const;
    std::size_t size() const { return seen_.size(); }

private:
    std::filesystem::path file_;
    std::set<std::string> seen_;
};

// Downloads each feed (line-delimited URLs, or HTML whose anchors are taken),
// returns the URLs not yet in the store (feed order, duplicates collapsed to
// the first occurrence) and records them. Unreachable feeds warn and are
// skipped.
std::vector<std::string> poll_blacklist(const std::vector<std::string>& feed_urls,
                                        SeenStore& store,
                                        std::vector<std::string>& warnings);

} // namespace escrowscan
