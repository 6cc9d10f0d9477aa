#include "escrowscan/fetch.hpp"

#include "escrowscan/image.hpp"

#ifdef ESCROWSCAN_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

using namespace escrowscan;
namespace fs = std::filesystem;

namespace {

std::string png_bytes() {
    DecodedImage img;
    img.width = 2;
    img.height = 2;
    img.rgb = {255, 0, 0, 255, 0, 0, 0, 0, 255, 0, 0, 255};
    auto bytes = encode_png(img);
    return std::string(bytes.begin(), bytes.end());
}

// An in-process site: /, /a.html, /b.html, /c.html plus one broken link,
// one off-host anchor, one decodable and one undecodable image.
class LoopbackSite {
public:
    LoopbackSite() {
        svr_.Get("/", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(
                "<html><head><title>Loop</title></head><body>"
                "<p>Funds held in escrow until you approve delivery.</p>"
                "<a href=\"/a.html\">a</a> <a href=\"/a.html\">a again</a> "
                "<a href=\"/b.html\">b</a> "
                "<a href=\"/missing.html\">ghost</a> "
                "<a href=\"http://other.test/x\">away</a>"
                "<img src=\"/img/logo.png\">"
                "<img src=\"http://cdn.other.test/pic.png\">"
                "</body></html>",
                "text/html");
        });
        svr_.Get("/a.html", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("<html><body><p>Page a.</p><a href=\"/\">home</a> "
                            "<a href=\"/c.html\">deeper</a></body></html>",
                            "text/html");
        });
        svr_.Get("/b.html", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("<html><body><p>Page b.</p><a href=\"/a.html\">a</a>"
                            "<img src=\"/img/broken.gif\"></body></html>",
                            "text/html");
        });
        svr_.Get("/c.html", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("<html><body><p>Deep page c.</p></body></html>", "text/html");
        });
        svr_.Get("/img/logo.png", [](const httplib::Request&, httplib::Response& res) {
            res.set_content(png_bytes(), "image/png");
        });
        svr_.Get("/img/broken.gif", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("definitely not image data", "image/gif");
        });
        svr_.Get("/feed.txt", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("# escrow blacklist\n"
                            "http://scam-one.test/\n"
                            "http://scam-two.test/path\n"
                            "\n"
                            "http://scam-one.test/\n"
                            "not-a-url\n",
                            "text/plain");
        });
        svr_.Get("/feed.html", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("<html><body>"
                            "<a href=\"http://scam-three.test/\">three</a>"
                            "<a href=\"http://scam-two.test/path\">two again</a>"
                            "<a href=\"/local.html\">relative</a>"
                            "<a href=\"mailto:a@b.test\">mail</a>"
                            "</body></html>",
                            "text/html");
        });
        port_ = svr_.bind_to_any_port("127.0.0.1");
        REQUIRE(port_ > 0);
        thread_ = std::thread([this] { svr_.listen_after_bind(); });
        svr_.wait_until_ready();
    }

    ~LoopbackSite() {
        svr_.stop();
        thread_.join();
    }

    std::string url(const std::string& path) const {
        return "http://127.0.0.1:" + std::to_string(port_) + path;
    }

private:
    httplib::Server svr_;
    int port_ = -1;
    std::thread thread_;
};

FetchOptions quick_options() {
    FetchOptions opt;
    opt.politeness_ms = 0;
    opt.timeout_s = 5;
    opt.site_id = "loop01";
    opt.label = Label::Fake;
    return opt;
}

} // namespace

TEST_CASE("same-host BFS crawl: pages, edges, images, failure warnings") {
    LoopbackSite server;
    FetchOptions opt = quick_options();
    std::vector<std::string> warnings;
    Website site = fetch_site(server.url("/"), opt, warnings);

    CHECK(site.site_id == "loop01");
    CHECK(site.label == Label::Fake);
    CHECK(site.source == "fetch");
    CHECK(site.root_page_id == "p0001");
    CHECK(site.fetched_at > 0);

    // /, /a.html, /b.html, /c.html fetched; /missing.html 404s into a warning
    REQUIRE(site.pages.size() == 4);
    bool warned_missing = false;
    for (const auto& w : warnings)
        warned_missing |= w.find("missing.html") != std::string::npos &&
                          w.find("page fetch failed") != std::string::npos;
    CHECK(warned_missing);

    const WebPage* root = site.find_page("p0001");
    const WebPage* a = site.find_page("p0002");
    const WebPage* b = site.find_page("p0003");
    const WebPage* c = site.find_page("p0005"); // p0004 was the 404 slot
    REQUIRE(root != nullptr);
    REQUIRE(a != nullptr);
    REQUIRE(b != nullptr);
    REQUIRE(c != nullptr);

    CHECK(root->page_level == 0);
    CHECK(a->page_level == 1);
    CHECK(b->page_level == 1);
    CHECK(c->page_level == 2);
    CHECK(a->url == server.url("/a.html"));
    CHECK(c->url == server.url("/c.html"));
    CHECK(root->body_text.find("escrow until you approve") != std::string::npos);

    // anchors: a, a, b, missing, external; the duplicate edge keeps multiplicity
    CHECK(root->anchor_count == 5);
    CHECK(root->ext_out_link_count == 1);
    CHECK(root->out_link_count == 3); // a.html twice + b.html; dead link dropped
    CHECK(root->in_link_count == 1);  // from a
    CHECK(a->in_link_count == 3);     // root twice + b
    CHECK(a->out_link_count == 2);    // home + c

    REQUIRE(site.images.size() == 2);
    const ImageAsset* logo = site.find_image("i0001");
    const ImageAsset* broken = site.find_image("i0002");
    REQUIRE(logo != nullptr);
    REQUIRE(broken != nullptr);
    CHECK(logo->extension == "png");
    CHECK(logo->width_px == 2);
    CHECK(logo->height_px == 2);
    CHECK(logo->has_pixels());
    CHECK(broken->extension == "gif");
    CHECK(!broken->has_pixels());
    CHECK(broken->file_size_bytes > 0);

    bool warned_undecodable = false, warned_offhost = false;
    for (const auto& w : warnings) {
        warned_undecodable |= w.find("undecodable") != std::string::npos;
        warned_offhost |= w.find("off-host image") != std::string::npos;
    }
    CHECK(warned_undecodable);
    CHECK(warned_offhost);

    CHECK(root->image_refs == std::vector<ImageId>{"i0001"});
    CHECK(b->image_refs == std::vector<ImageId>{"i0002"});
}

TEST_CASE("depth and page caps truncate the frontier") {
    LoopbackSite server;
    std::vector<std::string> warnings;

    FetchOptions shallow = quick_options();
    shallow.max_depth = 1;
    Website s1 = fetch_site(server.url("/"), shallow, warnings);
    CHECK(s1.pages.size() == 3); // c.html is two hops away
    for (const auto& p : s1.pages) CHECK(p.url.find("c.html") == std::string::npos);

    FetchOptions capped = quick_options();
    capped.max_pages = 2;
    Website s2 = fetch_site(server.url("/"), capped, warnings);
    CHECK(s2.pages.size() == 2);
}

TEST_CASE("a failing root is an error, not a warning") {
    LoopbackSite server;
    FetchOptions opt = quick_options();
    std::vector<std::string> warnings;
    CHECK_THROWS_WITH_AS(
        static_cast<void>(fetch_site(server.url("/missing.html"), opt, warnings)),
        doctest::Contains("fetch failed for"), std::runtime_error);
    CHECK_THROWS_AS(static_cast<void>(fetch_site("ftp://example.test/", opt, warnings)),
                    std::runtime_error);
    CHECK_THROWS_AS(static_cast<void>(fetch_site("/relative", opt, warnings)),
                    std::runtime_error);
}

TEST_CASE("blacklist polling dedupes, persists, and survives dead feeds") {
    LoopbackSite server;
    fs::path store_file =
        fs::temp_directory_path() / "escrowscan_seen_test" / "seen.txt";
    fs::remove_all(store_file.parent_path());
    fs::create_directories(store_file.parent_path());

    {
        SeenStore store(store_file);
        CHECK(store.size() == 0);
        store.add("http://scam-two.test/path"); // pretend we saw it last poll
        store.save();
    }

    SeenStore store(store_file);
    CHECK(store.size() == 1);
    CHECK(store.contains("http://scam-two.test/path"));

    std::vector<std::string> warnings;
    std::vector<std::string> fresh = poll_blacklist(
        {server.url("/feed.txt"), server.url("/feed.html"),
         server.url("/missing-feed")},
        store, warnings);

    // feed order, duplicates and already-seen URLs dropped, non-URLs ignored
    CHECK(fresh == std::vector<std::string>{"http://scam-one.test/",
                                            "http://scam-three.test/"});
    bool warned_dead = false;
    for (const auto& w : warnings)
        warned_dead |= w.find("missing-feed") != std::string::npos &&
                       w.find("unreachable") != std::string::npos;
    CHECK(warned_dead);

    // persisted: a fresh poll over the same feeds yields nothing new
    SeenStore reloaded(store_file);
    CHECK(reloaded.size() == 3);
    std::vector<std::string> again =
        poll_blacklist({server.url("/feed.txt"), server.url("/feed.html")}, reloaded,
                       warnings);
    CHECK(again.empty());
}
