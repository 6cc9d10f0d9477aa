#include "escrowscan/io.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace escrowscan;
namespace fs = std::filesystem;

namespace {

int run(const std::string& cmd) {
    int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return 128;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

const fs::path& workspace() {
    static fs::path ws = [] {
        fs::path dir = fs::temp_directory_path() / "escrowscan_pipeline";
        fs::remove_all(dir);
        fs::create_directories(dir);
        return dir;
    }();
    return ws;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

const std::string kTool = ESCROWSCAN_BIN;
const std::string kSynth = SYNTHGEN_BIN;

// The full corpus -> stats -> extract -> select -> train -> classify ->
// evaluate -> simmap chain shares one workspace; the cases below run in
// declaration order.
const fs::path& corpus_dir() {
    static fs::path dir = [] {
        fs::path d = workspace() / "corpus";
        REQUIRE(run(kSynth + " --out " + q(d) +
                    " --seed 5 --fake-sites 3 --real-sites 3 --templates 1"
                    " --pages-min 3 --pages-max 4") == 0);
        return d;
    }();
    return dir;
}

} // namespace

TEST_CASE("synthgen writes a loadable corpus layout") {
    CHECK(fs::exists(corpus_dir() / "fake" / "fake01" / "manifest"));
    CHECK(fs::exists(corpus_dir() / "real" / "real03" / "manifest"));
    Corpus c = load_corpus(corpus_dir());
    CHECK(c.sites.size() == 6);

    // same config, same bytes: a second generation matches file for file
    fs::path again = workspace() / "corpus2";
    REQUIRE(run(kSynth + " --out " + q(again) +
                " --seed 5 --fake-sites 3 --real-sites 3 --templates 1"
                " --pages-min 3 --pages-max 4") == 0);
    for (auto it = fs::recursive_directory_iterator(corpus_dir());
         it != fs::recursive_directory_iterator(); ++it) {
        if (!it->is_regular_file()) continue;
        fs::path rel = fs::relative(it->path(), corpus_dir());
        CHECK(slurp(it->path()) == slurp(again / rel));
    }
}

TEST_CASE("stats renders both table and tsv") {
    fs::path table = workspace() / "stats.txt";
    fs::path tsv = workspace() / "stats.tsv";
    REQUIRE(run(kTool + " stats --corpus " + q(corpus_dir()) + " --out " + q(table)) == 0);
    REQUIRE(run(kTool + " stats --corpus " + q(corpus_dir()) + " --tsv --out " + q(tsv)) ==
            0);
    std::string t = slurp(table);
    CHECK(t.find("label") != std::string::npos);
    CHECK(t.find("total") != std::string::npos);
    std::string m = slurp(tsv);
    CHECK(m.find("label\tsites\tpages") != std::string::npos);
    CHECK(m.find("fake\t3\t") != std::string::npos);
}

TEST_CASE("extract then select freezes a reloadable dictionary") {
    fs::path feats = workspace() / "features";
    REQUIRE(run(kTool + " extract --corpus " + q(corpus_dir()) + " --out " + q(feats) +
                " --features link") == 0);
    REQUIRE(fs::exists(feats / "link.dict"));
    REQUIRE(fs::exists(feats / "link.matrix"));
    REQUIRE(fs::exists(feats / "labels.tsv"));

    FeatureDictionary candidates = load_dictionary(feats / "link.dict");
    CHECK(candidates.category() == Category::Link);

    fs::path sel = workspace() / "selected";
    REQUIRE(run(kTool + " select --matrix " + q(feats / "link.matrix") + " --labels " +
                q(feats / "labels.tsv") + " --out " + q(sel) + " --top-k 25") == 0);
    FeatureDictionary frozen = load_dictionary(sel / "link.selected.dict");
    CHECK(frozen.size() <= candidates.size());
    CHECK(frozen.size() > 0);
    CHECK(fs::exists(sel / "link.selection.tsv"));
}

TEST_CASE("train and classify round trip through files") {
    fs::path model = workspace() / "model.json";
    REQUIRE(run(kTool + " train --corpus " + q(corpus_dir()) + " --out " + q(model) +
                " --technique svm --kernel composite --features link") == 0);
    TrainedModel m = load_model(model);
    CHECK(m.kernel == "composite");
    CHECK(m.columns.size() == 6);

    fs::path verdict = workspace() / "verdict.txt";
    REQUIRE(run(kTool + " classify --model " + q(model) + " --site " +
                q(corpus_dir() / "fake" / "fake01") + " --out " + q(verdict)) == 0);
    std::string v = slurp(verdict);
    CHECK(v.find("site\tfake01") != std::string::npos);
    CHECK(v.find("verdict\t") != std::string::npos);
    CHECK(v.find("page\tp0001\t") != std::string::npos);
}

TEST_CASE("evaluate produces the result files and respects config precedence") {
    const std::string common = " evaluate --corpus " + q(corpus_dir()) +
                               " --techniques svm --kernels linear --features link"
                               " --runs 2 --folds 2 --n-real 3 --n-fake 3";

    fs::path out_a = workspace() / "eval_a";
    REQUIRE(run(kTool + common + " --out " + q(out_a) + " --seed 9") == 0);
    REQUIRE(fs::exists(out_a / "results.tsv"));
    REQUIRE(fs::exists(out_a / "summary.txt"));
    REQUIRE(fs::exists(out_a / "significance.tsv"));
    std::string results_a = slurp(out_a / "results.tsv");
    CHECK(results_a.find("technique\tkernel\tfeature_set\trun\tsite_accuracy") !=
          std::string::npos);
    CHECK(results_a.find("svm\tlinear\tlink\t0\t") != std::string::npos);
    CHECK(results_a.find("svm\tlinear\tlink\t1\t") != std::string::npos);

    // a config file supplies the seed when the flag is absent...
    fs::path cfg = workspace() / "escrow.cfg";
    std::ofstream(cfg) << "seed=5\n";
    fs::path out_c = workspace() / "eval_c";
    REQUIRE(run(kTool + common + " --out " + q(out_c) + " --config " + q(cfg)) == 0);
    CHECK(slurp(out_c / "results.tsv").find("# seed: 5") != std::string::npos);

    // ...and an explicit flag beats the config: identical bytes to the plain
    // --seed 9 run
    fs::path out_b = workspace() / "eval_b";
    REQUIRE(run(kTool + common + " --out " + q(out_b) + " --config " + q(cfg) +
                " --seed 9") == 0);
    CHECK(slurp(out_b / "results.tsv") == results_a);
    CHECK(slurp(out_b / "significance.tsv") == slurp(out_a / "significance.tsv"));
}

TEST_CASE("simmap renders a dot graph against a target site") {
    fs::path dot = workspace() / "map.dot";
    REQUIRE(run(kTool + " simmap --corpus " + q(corpus_dir()) +
                " --site fake01 --probe-site fake02 --probe-page p0001"
                " --features link --out " + q(dot)) == 0);
    std::string d = slurp(dot);
    CHECK(d.find("digraph simmap") != std::string::npos);
    CHECK(d.find("probe p0001 vs site fake01") != std::string::npos);
    CHECK(d.find("fillcolor=\"gray") != std::string::npos);
}

TEST_CASE("bad invocations fail loudly") {
    CHECK(run(kTool + " transmogrify 2>/dev/null") != 0);
    CHECK(run(kTool + " classify --model " + q(workspace() / "nope.json") + " --site " +
              q(corpus_dir() / "fake" / "fake01") + " 2>/dev/null") != 0);
    CHECK(run(kTool + " train --corpus " + q(corpus_dir()) + " 2>/dev/null") != 0);
}
