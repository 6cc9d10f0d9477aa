#include "escrowscan/corpus.hpp"
#include "escrowscan/synth.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace escrowscan;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("establish_invariants recomputes levels and link counts") {
    Website s = testhelpers::tiny_site();

    const WebPage* root = s.find_page("p0001");
    const WebPage* a = s.find_page("p0002");
    const WebPage* b = s.find_page("p0003");
    REQUIRE(root != nullptr);
    REQUIRE(a != nullptr);
    REQUIRE(b != nullptr);

    CHECK(root->page_level == 0);
    CHECK(a->page_level == 1);
    CHECK(b->page_level == 1);

    // edges: root->a twice, root->b, a->root (multiplicity kept)
    CHECK(root->out_link_count == 3);
    CHECK(root->in_link_count == 1);
    CHECK(a->in_link_count == 2);
    CHECK(a->out_link_count == 1);
    CHECK(b->in_link_count == 1);
    CHECK(b->out_link_count == 0);

    // anchor stats come from the HTML: 5 hrefs on the root, 1 external
    CHECK(root->anchor_count == 5);
    CHECK(root->ext_out_link_count == 1);

    // body text extracted from html_source
    CHECK(root->body_text.find("hold funds until delivery") != std::string::npos);
    CHECK(root->body_text.find("<") == std::string::npos);
}

TEST_CASE("establish_invariants is idempotent") {
    Website s = testhelpers::tiny_site();
    Website twice = s;
    std::vector<std::string> warnings;
    establish_invariants(twice, warnings);
    CHECK(warnings.empty());
    CHECK(twice.pages.size() == s.pages.size());
    for (std::size_t i = 0; i < s.pages.size(); ++i) {
        CHECK(twice.pages[i].page_level == s.pages[i].page_level);
        CHECK(twice.pages[i].in_link_count == s.pages[i].in_link_count);
        CHECK(twice.pages[i].out_link_count == s.pages[i].out_link_count);
        CHECK(twice.pages[i].body_text == s.pages[i].body_text);
    }
}

TEST_CASE("unreachable pages get max reachable level + 1") {
    Website s = testhelpers::tiny_site();
    WebPage orphan;
    orphan.page_id = "p0004";
    orphan.site_id = s.site_id;
    orphan.url = "http://example.test/orphan.html";
    orphan.html_source = "<html><body>orphan</body></html>";
    s.pages.push_back(orphan);

    std::vector<std::string> warnings;
    establish_invariants(s, warnings);
    const WebPage* o = s.find_page("p0004");
    REQUIRE(o != nullptr);
    CHECK(o->page_level == 2); // max reachable is 1
}

TEST_CASE("dangling edges are dropped with a warning") {
    Website s = testhelpers::tiny_site();
    s.link_edges.push_back({"p0001", "p9999"});
    std::vector<std::string> warnings;
    establish_invariants(s, warnings);
    CHECK(!warnings.empty());
    for (const auto& e : s.link_edges) CHECK(e.second != "p9999");
    CHECK(s.find_page("p0001")->out_link_count == 3);
}

TEST_CASE("site save/load round trip preserves everything") {
    fs::path dir = fresh_dir("escrowscan_test_site");
    Website s = testhelpers::tiny_site("t77", Label::Fake);
    s.fetched_at = 1700000000;
    for (auto& p : s.pages) p.fetched_at = 1700000001;
    save_site(s, dir / "t77");

    std::vector<std::string> warnings;
    Website r = load_site(dir / "t77", Label::Fake, warnings);

    CHECK(r.site_id == s.site_id);
    CHECK(r.label == Label::Fake);
    CHECK(r.root_url == s.root_url);
    CHECK(r.root_page_id == s.root_page_id);
    CHECK(r.fetched_at == s.fetched_at);
    REQUIRE(r.pages.size() == s.pages.size());
    for (std::size_t i = 0; i < s.pages.size(); ++i) {
        CHECK(r.pages[i].page_id == s.pages[i].page_id);
        CHECK(r.pages[i].url == s.pages[i].url);
        CHECK(r.pages[i].html_source == s.pages[i].html_source);
        CHECK(r.pages[i].body_text == s.pages[i].body_text);
        CHECK(r.pages[i].page_level == s.pages[i].page_level);
        CHECK(r.pages[i].in_link_count == s.pages[i].in_link_count);
        CHECK(r.pages[i].out_link_count == s.pages[i].out_link_count);
        CHECK(r.pages[i].image_refs == s.pages[i].image_refs);
        CHECK(r.pages[i].fetched_at == s.pages[i].fetched_at);
    }
    REQUIRE(r.images.size() == 1);
    CHECK(r.images[0].raw_bytes == s.images[0].raw_bytes);
    CHECK(r.images[0].width_px == 2);
    CHECK(r.images[0].height_px == 2);
    CHECK(r.images[0].pixels == s.images[0].pixels);
    CHECK(r.link_edges == s.link_edges);
    fs::remove_all(dir);
}

TEST_CASE("corpus save/load round trip and layout") {
    fs::path dir = fresh_dir("escrowscan_test_corpus");
    Corpus c;
    c.sites.push_back(testhelpers::tiny_site("aaa", Label::Real));
    c.sites.push_back(testhelpers::tiny_site("bbb", Label::Fake));
    save_corpus(c, dir);

    CHECK(fs::exists(dir / "real" / "aaa" / "manifest"));
    CHECK(fs::exists(dir / "fake" / "bbb" / "manifest"));
    CHECK(fs::exists(dir / "real" / "aaa" / "pages" / "p0001.html"));
    CHECK(fs::exists(dir / "real" / "aaa" / "images" / "i0001.png"));

    Corpus r = load_corpus(dir);
    REQUIRE(r.sites.size() == 2);
    CHECK(r.sites[0].site_id == "aaa"); // sorted by site id
    CHECK(r.sites[0].label == Label::Real);
    CHECK(r.sites[1].site_id == "bbb");
    CHECK(r.sites[1].label == Label::Fake);
    CHECK(r.sites[0].pages.size() == 3);
    CHECK(r.find_site("bbb") != nullptr);
    CHECK(r.find_site("zzz") == nullptr);
    fs::remove_all(dir);
}

TEST_CASE("synthetic corpus save/load is byte stable") {
    SynthConfig cfg;
    cfg.fake_sites = 2;
    cfg.real_sites = 2;
    cfg.templates = 1;
    cfg.pages_min = 3;
    cfg.pages_max = 4;
    cfg.seed = 5;
    ExtractionContext ctx = ExtractionContext::load_default();
    Corpus c = generate_benchmark_corpus(cfg, ctx);

    fs::path d1 = fresh_dir("escrowscan_bytes_1");
    fs::path d2 = fresh_dir("escrowscan_bytes_2");
    save_corpus(c, d1);
    save_corpus(load_corpus(d1), d2);

    // second-generation save must equal the first byte for byte
    for (auto it = fs::recursive_directory_iterator(d1);
         it != fs::recursive_directory_iterator(); ++it) {
        if (!it->is_regular_file()) continue;
        fs::path rel = fs::relative(it->path(), d1);
        std::ifstream f1(it->path(), std::ios::binary);
        std::ifstream f2(d2 / rel, std::ios::binary);
        REQUIRE(f2.good());
        std::string s1((std::istreambuf_iterator<char>(f1)), {});
        std::string s2((std::istreambuf_iterator<char>(f2)), {});
        CHECK(s1 == s2);
    }
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("corpus_stats aggregates per label") {
    Corpus c;
    c.sites.push_back(testhelpers::tiny_site("r1", Label::Real));
    c.sites.push_back(testhelpers::tiny_site("r2", Label::Real));
    c.sites.push_back(testhelpers::tiny_site("f1", Label::Fake));

    StatsTable t = corpus_stats(c);
    REQUIRE(t.rows.size() >= 3);
    const StatsRow& real = t.rows[0];
    CHECK(real.label == "real");
    CHECK(real.sites == 2);
    CHECK(real.pages == 6);
    CHECK(real.images == 2);
    CHECK(real.pages_per_site == doctest::Approx(3.0));
    const StatsRow& fake = t.rows[1];
    CHECK(fake.label == "fake");
    CHECK(fake.sites == 1);
    const StatsRow& total = t.rows.back();
    CHECK(total.label == "total");
    CHECK(total.sites == 3);
    CHECK(total.pages == 9);
    CHECK(total.images_per_site == doctest::Approx(1.0));
}

TEST_CASE("benchmark generator is deterministic and shaped to spec") {
    SynthConfig cfg;
    cfg.fake_sites = 4;
    cfg.real_sites = 4;
    cfg.templates = 2;
    cfg.pages_min = 4;
    cfg.pages_max = 5;
    cfg.seed = 99;
    ExtractionContext ctx = ExtractionContext::load_default();
    Corpus a = generate_benchmark_corpus(cfg, ctx);
    Corpus b = generate_benchmark_corpus(cfg, ctx);

    REQUIRE(a.sites.size() == 8);
    std::size_t fake = 0, real = 0;
    for (const auto& s : a.sites) {
        if (s.label == Label::Fake) ++fake;
        if (s.label == Label::Real) ++real;
        CHECK(s.pages.size() >= cfg.pages_min);
        CHECK(s.pages.size() <= cfg.pages_max);
        CHECK(!s.images.empty());
        CHECK(s.find_page(s.root_page_id) != nullptr);
    }
    CHECK(fake == 4);
    CHECK(real == 4);

    REQUIRE(b.sites.size() == a.sites.size());
    for (std::size_t i = 0; i < a.sites.size(); ++i) {
        CHECK(a.sites[i].site_id == b.sites[i].site_id);
        REQUIRE(a.sites[i].pages.size() == b.sites[i].pages.size());
        for (std::size_t j = 0; j < a.sites[i].pages.size(); ++j)
            CHECK(a.sites[i].pages[j].html_source == b.sites[i].pages[j].html_source);
        REQUIRE(a.sites[i].images.size() == b.sites[i].images.size());
        for (std::size_t j = 0; j < a.sites[i].images.size(); ++j)
            CHECK(a.sites[i].images[j].raw_bytes == b.sites[i].images[j].raw_bytes);
    }
}

TEST_CASE("template duplication shows up across fake sites") {
    SynthConfig cfg;
    cfg.fake_sites = 2;
    cfg.real_sites = 2;
    cfg.templates = 1;
    cfg.pages_min = 3;
    cfg.pages_max = 3;
    cfg.seed = 3;
    ExtractionContext ctx = ExtractionContext::load_default();
    Corpus c = generate_benchmark_corpus(cfg, ctx);

    const Website* f1 = nullptr;
    const Website* f2 = nullptr;
    for (const auto& s : c.sites) {
        if (s.label != Label::Fake) continue;
        (f1 ? f2 : f1) = &s;
    }
    REQUIRE(f1 != nullptr);
    REQUIRE(f2 != nullptr);
    // same template: identical images, heavily shared body sentences
    REQUIRE(f1->images.size() == f2->images.size());
    for (std::size_t i = 0; i < f1->images.size(); ++i)
        CHECK(f1->images[i].raw_bytes == f2->images[i].raw_bytes);
    CHECK(f1->pages.size() == f2->pages.size());
}
