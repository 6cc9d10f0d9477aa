#include "escrowscan/selection.hpp"

#include "escrowscan/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <string>
#include <vector>

using namespace escrowscan;

namespace {

// Brute-force contingency-table information gain, written against the
// definition rather than the library's incremental form.
double ig_oracle(const std::vector<bool>& present, const std::vector<Label>& labels) {
    auto entropy = [](double fake, double real) {
        double n = fake + real;
        if (n == 0) return 0.0;
        double h = 0;
        for (double c : {fake, real}) {
            if (c == 0) continue;
            double p = c / n;
            h -= p * std::log2(p);
        }
        return h;
    };
    double f = 0, r = 0, pf = 0, pr = 0, af = 0, ar = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        bool fake = labels[i] == Label::Fake;
        (fake ? f : r) += 1;
        if (present[i])
            (fake ? pf : pr) += 1;
        else
            (fake ? af : ar) += 1;
    }
    double n = f + r;
    double h = entropy(f, r);
    double hp = entropy(pf, pr), ha = entropy(af, ar);
    return h - ((pf + pr) / n) * hp - ((af + ar) / n) * ha;
}

FeatureDictionary toy_dictionary(const std::vector<std::string>& ngrams) {
    // link fixed slots are tiny, which keeps the toy dictionaries readable
    std::vector<std::string> entries = {"link:page_rel_in", "link:page_rel_out"};
    entries.insert(entries.end(), ngrams.begin(), ngrams.end());
    return FeatureDictionary(Category::Link, entries, NgramConfig{});
}

} // namespace

TEST_CASE("information gain hand case") {
    // presence [1,1,1,0], labels [F,F,R,R] -> 1 - (3/4)*0.9183 = 0.3113
    std::vector<bool> presence = {true, true, true, false};
    std::vector<Label> labels = {Label::Fake, Label::Fake, Label::Real, Label::Real};
    double ig = information_gain(presence, labels);
    CHECK(ig == doctest::Approx(0.3113).epsilon(1e-4));
    CHECK(ig == doctest::Approx(1.0 - 0.75 * (-(2.0 / 3) * std::log2(2.0 / 3) -
                                              (1.0 / 3) * std::log2(1.0 / 3)))
                    .epsilon(1e-12));
}

TEST_CASE("information gain extremes") {
    std::vector<Label> labels = {Label::Fake, Label::Fake, Label::Real, Label::Real};
    // perfect split carries one full bit
    CHECK(information_gain({true, true, false, false}, labels) == doctest::Approx(1.0));
    // constant presence carries nothing
    CHECK(information_gain({true, true, true, true}, labels) == doctest::Approx(0.0));
    // single-class labels define IG as 0
    CHECK(information_gain({true, false, true, false},
                           {Label::Fake, Label::Fake, Label::Fake, Label::Fake}) == 0.0);
}

TEST_CASE("information gain matches the contingency oracle on random instances") {
    Rng rng(0x5e1ec7);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = 30;
        std::vector<bool> present(n);
        std::vector<Label> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            present[i] = rng.bounded(2) == 1;
            labels[i] = rng.bounded(2) == 1 ? Label::Fake : Label::Real;
        }
        double got = information_gain(present, labels);
        double want = ig_oracle(present, labels);
        CHECK(std::fabs(got - want) < 1e-9);
    }
}

TEST_CASE("select_features ranks by IG with lexicographic ties") {
    FeatureDictionary cand =
        toy_dictionary({"deg:beta", "deg:alpha", "deg:gamma", "deg:zeta"});
    // 4 pages: 2 fake then 2 real
    std::vector<Label> labels = {Label::Fake, Label::Fake, Label::Real, Label::Real};

    auto row = [&](std::vector<std::pair<std::string, double>> vals) {
        FeatureVector f;
        f.dim = cand.size();
        f.category = Category::Link;
        std::map<int, double> m;
        for (auto& [name, v] : vals) m[cand.index_of(name)] = v;
        for (auto& [i, v] : m) f.items.emplace_back(i, v);
        return f;
    };
    // alpha and beta: perfect splits (IG 1); gamma: the 0.3113 split; zeta: useless
    std::vector<FeatureVector> rows = {
        row({{"deg:alpha", 1}, {"deg:beta", 2}, {"deg:gamma", 1}, {"deg:zeta", 1}}),
        row({{"deg:alpha", 3}, {"deg:beta", 1}, {"deg:gamma", 1}, {"deg:zeta", 1}}),
        row({{"deg:gamma", 2}, {"deg:zeta", 1}}),
        row({{"deg:zeta", 5}}),
    };

    auto [dict, report] = select_features(cand, rows, labels, SelectionPolicy{});
    REQUIRE(report.ranked.size() == 4);
    // ties between alpha and beta break lexicographically
    CHECK(report.ranked[0].name == "deg:alpha");
    CHECK(report.ranked[1].name == "deg:beta");
    CHECK(report.ranked[2].name == "deg:gamma");
    CHECK(report.ranked[3].name == "deg:zeta");
    CHECK(report.ranked[0].ig == doctest::Approx(1.0));
    CHECK(report.ranked[2].ig == doctest::Approx(0.3113).epsilon(1e-4));
    CHECK(report.ranked[3].ig == doctest::Approx(0.0));
    CHECK(report.ranked[0].document_frequency == 2);
    CHECK(report.ranked[3].document_frequency == 4);

    // default policy keeps everything (top_k=500), fixed slots always first
    CHECK(dict.size() == cand.size());
    CHECK(dict.entries()[0] == "link:page_rel_in");
}

TEST_CASE("top_k truncates per group") {
    FeatureDictionary cand =
        toy_dictionary({"deg:alpha", "deg:beta", "deg:gamma", "deg:zeta"});
    std::vector<Label> labels = {Label::Fake, Label::Fake, Label::Real, Label::Real};
    std::vector<FeatureVector> rows(4);
    for (std::size_t i = 0; i < 4; ++i) {
        rows[i].dim = cand.size();
        rows[i].category = Category::Link;
    }
    // alpha perfect, beta 0.3113, gamma/zeta 0
    rows[0].items = {{cand.index_of("deg:alpha"), 1.0},
                     {cand.index_of("deg:beta"), 1.0},
                     {cand.index_of("deg:gamma"), 1.0}};
    rows[1].items = {{cand.index_of("deg:alpha"), 1.0},
                     {cand.index_of("deg:beta"), 1.0},
                     {cand.index_of("deg:zeta"), 1.0}};
    rows[2].items = {{cand.index_of("deg:beta"), 1.0},
                     {cand.index_of("deg:gamma"), 1.0},
                     {cand.index_of("deg:zeta"), 1.0}};
    rows[3].items = {};

    SelectionPolicy policy;
    policy.top_k = 2;
    auto [dict, report] = select_features(cand, rows, labels, policy);

    CHECK(dict.index_of("deg:alpha") >= 0);
    CHECK(dict.index_of("deg:beta") >= 0);
    CHECK(dict.index_of("deg:gamma") == -1);
    CHECK(dict.index_of("deg:zeta") == -1);
    // fixed slots survive the cut
    CHECK(dict.index_of("link:page_rel_in") >= 0);
    CHECK(report.kept_ngrams == 2);
    CHECK(report.fixed_slots == 2);
}

TEST_CASE("min_ig floor drops uninformative features") {
    FeatureDictionary cand = toy_dictionary({"deg:good", "deg:noise"});
    std::vector<Label> labels = {Label::Fake, Label::Fake, Label::Real, Label::Real};
    std::vector<FeatureVector> rows(4);
    for (auto& r : rows) {
        r.dim = cand.size();
        r.category = Category::Link;
    }
    rows[0].items = {{cand.index_of("deg:good"), 1.0}, {cand.index_of("deg:noise"), 1.0}};
    rows[1].items = {{cand.index_of("deg:good"), 1.0}};
    rows[2].items = {{cand.index_of("deg:noise"), 1.0}};
    rows[3].items = {{cand.index_of("deg:noise"), 1.0}};

    SelectionPolicy policy;
    policy.min_ig = 0.5;
    auto [dict, report] = select_features(cand, rows, labels, policy);
    CHECK(dict.index_of("deg:good") >= 0); // IG = 1 bit
    CHECK(dict.index_of("deg:noise") == -1);
    (void)report;
}

TEST_CASE("selection is deterministic") {
    FeatureDictionary cand = toy_dictionary({"deg:a", "deg:b", "deg:c"});
    std::vector<Label> labels = {Label::Fake, Label::Real, Label::Fake, Label::Real};
    Rng rng(77);
    std::vector<FeatureVector> rows(4);
    for (auto& r : rows) {
        r.dim = cand.size();
        r.category = Category::Link;
        for (int i = 2; i < 5; ++i)
            if (rng.bounded(2)) r.items.emplace_back(i, 1.0 + rng.uniform());
    }
    auto [d1, r1] = select_features(cand, rows, labels, SelectionPolicy{});
    auto [d2, r2] = select_features(cand, rows, labels, SelectionPolicy{});
    CHECK(d1.entries() == d2.entries());
    CHECK(d1.content_hash() == d2.content_hash());
    REQUIRE(r1.ranked.size() == r2.ranked.size());
    for (std::size_t i = 0; i < r1.ranked.size(); ++i)
        CHECK(r1.ranked[i].name == r2.ranked[i].name);
}
