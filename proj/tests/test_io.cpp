#include "escrowscan/io.hpp"

#include "escrowscan/model.hpp"
#include "escrowscan/rng.hpp"
#include "escrowscan/synth.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace escrowscan;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("escrowscan_io_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    os << text;
}

FeatureDictionary link_dictionary(const Website& site, const ExtractionContext& ctx) {
    std::vector<const WebPage*> pages;
    for (const auto& p : site.pages) pages.push_back(&p);
    return build_dictionary(pages, Category::Link, NgramConfig{}, ctx);
}

} // namespace

TEST_CASE("dictionary round trip, provenance header, tamper refusal") {
    fs::path dir = fresh_dir("dict");
    ExtractionContext ctx = ExtractionContext::load_default();
    Website site = testhelpers::tiny_site();
    FeatureDictionary dict = link_dictionary(site, ctx);

    Provenance prov;
    prov.seed = 42;
    prov.input_hashes = {{"corpus", site_content_hash(site)}};
    fs::path path = dir / "dict.tsv";
    save_dictionary(dict, path, prov);

    std::string text = slurp(path);
    CHECK(text.rfind("# escrowscan 0.1.0 dictionary", 0) == 0);
    CHECK(text.find("# seed: 42") != std::string::npos);
    CHECK(text.find("# input corpus: ") != std::string::npos);

    FeatureDictionary back = load_dictionary(path);
    CHECK(back.category() == dict.category());
    CHECK(back.entries() == dict.entries());
    CHECK(back.content_hash() == dict.content_hash());
    CHECK(back.config().min_df == dict.config().min_df);
    CHECK(back.config().utok_max == dict.config().utok_max);

    // flip one entry name; the stored hash must catch it
    auto pos = text.rfind("link:page_rel_in");
    REQUIRE(pos != std::string::npos);
    text[pos + 5] = 'q';
    spit(path, text);
    CHECK_THROWS_WITH_AS(static_cast<void>(load_dictionary(path)),
                         doctest::Contains("content hash mismatch"), std::runtime_error);
}

TEST_CASE("feature matrix round trip is bit exact") {
    fs::path dir = fresh_dir("matrix");
    ExtractionContext ctx = ExtractionContext::load_default();
    Website site = testhelpers::tiny_site();
    FeatureDictionary dict = link_dictionary(site, ctx);

    std::vector<FeatureVector> rows;
    std::vector<SiteId> row_sites;
    for (const auto& p : site.pages) {
        rows.push_back(extract_link(p, site, dict));
        row_sites.push_back(site.site_id);
    }
    // an awkward value that needs all 17 digits
    REQUIRE(!rows[0].items.empty());
    rows[0].items[0].second = 0.1 + 0.2;

    fs::path path = dir / "features.tsv";
    save_feature_matrix(path, dict, rows, row_sites, Provenance{});
    LoadedMatrix back = load_feature_matrix(path);

    CHECK(back.dict.entries() == dict.entries());
    CHECK(back.row_sites == row_sites);
    REQUIRE(back.rows.size() == rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        CHECK(back.rows[r].page_id == rows[r].page_id);
        CHECK(back.rows[r].dim == rows[r].dim);
        REQUIRE(back.rows[r].items.size() == rows[r].items.size());
        for (std::size_t i = 0; i < rows[r].items.size(); ++i) {
            CHECK(back.rows[r].items[i].first == rows[r].items[i].first);
            CHECK(back.rows[r].items[i].second == rows[r].items[i].second); // exact
        }
    }

    // tampering with the header feature names trips the dictionary hash
    std::string text = slurp(path);
    auto pos = text.find("link:page_rel_out");
    REQUIRE(pos != std::string::npos);
    text[pos + 5] = 'q';
    spit(path, text);
    CHECK_THROWS_WITH_AS(static_cast<void>(load_feature_matrix(path)),
                         doctest::Contains("content hash mismatch"), std::runtime_error);
}

TEST_CASE("labels round trip") {
    fs::path dir = fresh_dir("labels");
    std::map<SiteId, Label> labels = {
        {"aaa", Label::Real}, {"bbb", Label::Fake}, {"ccc", Label::Unknown}};
    fs::path path = dir / "labels.tsv";
    save_labels(labels, path);
    CHECK(load_labels(path) == labels);

    spit(path, "aaa\treal\tleftover\n");
    CHECK_THROWS_AS(static_cast<void>(load_labels(path)), std::runtime_error);
}

TEST_CASE("gram matrix round trip is bit exact") {
    fs::path dir = fresh_dir("gram");
    Rng rng(0x10a0);
    std::vector<SiteSimilarityVector> xs;
    for (int i = 0; i < 7; ++i) {
        SiteSimilarityVector x;
        x.page_id = "p" + std::to_string(i);
        for (int k = 0; k < 12; ++k) x.entries.push_back(rng.uniform());
        xs.push_back(std::move(x));
    }
    GramMatrix g = gram_composite(xs);

    fs::path path = dir / "gram.tsv";
    save_gram(g, "composite", path, Provenance{});
    GramMatrix back = load_gram(path);
    CHECK(back.n == g.n);
    CHECK(back.ids == g.ids);
    REQUIRE(back.data.size() == g.data.size());
    for (std::size_t i = 0; i < g.data.size(); ++i) CHECK(back.data[i] == g.data[i]);

    // truncated payload is rejected
    std::string text = slurp(path);
    spit(path, text.substr(0, text.rfind('\n', text.size() - 2)));
    CHECK_THROWS_AS(static_cast<void>(load_gram(path)), std::runtime_error);
}

TEST_CASE("selection report file carries policy and rankings") {
    fs::path dir = fresh_dir("selreport");
    SelectionReport rep;
    rep.category = Category::Url;
    rep.cutoff = "top_k=500 per group";
    rep.fixed_slots = 0;
    rep.kept_ngrams = 2;
    rep.ranked = {{"utok:escrow", 0.91, 12}, {"uchar:ww", 0.0, 30}};
    fs::path path = dir / "selection.tsv";
    save_selection_report(rep, path, Provenance{});

    std::string text = slurp(path);
    CHECK(text.find("# escrowscan 0.1.0 selection-report") != std::string::npos);
    CHECK(text.find("# policy: top_k=500 per group") != std::string::npos);
    CHECK(text.find("feature\tinformation_gain\tdocument_frequency") != std::string::npos);
    CHECK(text.find("utok:escrow\t0.91\t12") != std::string::npos);
}

TEST_CASE("model save/load round trip reproduces classifications") {
    fs::path dir = fresh_dir("model");
    ExtractionContext ctx = ExtractionContext::load_default();
    SynthConfig scfg;
    scfg.fake_sites = 3;
    scfg.real_sites = 3;
    scfg.templates = 1;
    scfg.pages_min = 3;
    scfg.pages_max = 4;
    scfg.seed = 23;
    Corpus corpus = generate_benchmark_corpus(scfg, ctx);

    TrainOptions opt;
    opt.technique = "svm";
    opt.kernel = "composite";
    opt.feature_set = "link";
    TrainedModel model = train_model(corpus, opt, ctx);

    fs::path path = dir / "model.json";
    save_model(model, path);
    TrainedModel back = load_model(path);

    CHECK(back.kernel == model.kernel);
    CHECK(back.categories == model.categories);
    CHECK(back.train_page_ids == model.train_page_ids);
    REQUIRE(back.dicts.size() == model.dicts.size());
    for (std::size_t i = 0; i < model.dicts.size(); ++i)
        CHECK(back.dicts[i].content_hash() == model.dicts[i].content_hash());

    for (const auto& site : corpus.sites) {
        SiteVerdict a = classify_site(model, site, ctx);
        SiteVerdict b = classify_site(back, site, ctx);
        CHECK(a.verdict == b.verdict);
        REQUIRE(a.pages.size() == b.pages.size());
        for (std::size_t i = 0; i < a.pages.size(); ++i) {
            CHECK(a.pages[i].label == b.pages[i].label);
            CHECK(b.pages[i].score == doctest::Approx(a.pages[i].score).epsilon(1e-12));
        }
    }

    // altering a stored dictionary entry must make the load refuse
    std::string text = slurp(path);
    auto pos = text.find("link:page_rel_in");
    REQUIRE(pos != std::string::npos);
    text[pos + 5] = 'q';
    spit(path, text);
    CHECK_THROWS_WITH_AS(static_cast<void>(load_model(path)),
                         doctest::Contains("content hash mismatch"), std::runtime_error);

    // non-JSON and wrong-kind files are rejected up front
    spit(path, "not a model\n");
    CHECK_THROWS_AS(static_cast<void>(load_model(path)), std::runtime_error);
    spit(path, "{\"kind\": \"dictionary\"}\n");
    CHECK_THROWS_AS(static_cast<void>(load_model(path)), std::runtime_error);
}

TEST_CASE("result rows and significance report are deterministic text") {
    MatrixResult mr;
    mr.config.techniques = {"svm"};
    mr.config.kernels = {"linear"};
    mr.config.feature_sets = {"link"};
    mr.config.runs = 2;
    CellResult cell;
    cell.spec = {"svm", "linear", "link"};
    cell.run_accuracies = {0.875, 1.0};
    cell.mean = 0.9375;
    mr.cells.push_back(cell);
    SignificanceEntry se;
    se.hypothesis = "H2";
    se.cell_a = "svm+linear/link";
    se.cell_b = "pca+linear/link";
    se.mean_a = 0.9375;
    se.mean_b = 0.875;
    se.t = 2.0;
    se.p = 0.0639;
    se.threshold = 0.0004;
    mr.comparisons.push_back(se);

    Provenance prov;
    prov.seed = 1;
    std::ostringstream a, b;
    write_result_rows(a, mr, prov);
    write_result_rows(b, mr, prov);
    CHECK(a.str() == b.str());
    CHECK(a.str().find("technique\tkernel\tfeature_set\trun\tsite_accuracy") !=
          std::string::npos);
    CHECK(a.str().find("svm\tlinear\tlink\t0\t0.875") != std::string::npos);
    CHECK(a.str().find("svm\tlinear\tlink\t1\t1") != std::string::npos);

    std::ostringstream s1, s2;
    write_significance_report(s1, mr, prov);
    write_significance_report(s2, mr, prov);
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().find("H2") != std::string::npos);
    CHECK(s1.str().find("svm+linear/link") != std::string::npos);

    std::ostringstream sum;
    write_matrix_summary(sum, mr);
    CHECK(sum.str().find("svm+linear") != std::string::npos);
    CHECK(sum.str().find("93.75") != std::string::npos); // percent
}

TEST_CASE("stats writers") {
    Corpus c;
    c.sites.push_back(testhelpers::tiny_site("aaa", Label::Real));
    c.sites.push_back(testhelpers::tiny_site("bbb", Label::Fake));
    StatsTable t = corpus_stats(c);

    std::ostringstream tsv;
    write_stats_rows(tsv, t);
    CHECK(tsv.str().find("real\t1\t3\t3.00\t1\t1.00") != std::string::npos);
    CHECK(tsv.str().find("total\t2\t6\t3.00\t2\t1.00") != std::string::npos);

    std::ostringstream txt;
    write_stats_table(txt, t);
    CHECK(txt.str().find("real") != std::string::npos);
    CHECK(txt.str().find("total") != std::string::npos);
}
