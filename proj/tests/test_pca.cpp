#include "escrowscan/pca.hpp"

#include "escrowscan/rng.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace escrowscan;

namespace {

// Column standardization with the sample (n-1) standard deviation, written
// independently of the library.
struct Standardized {
    std::vector<std::vector<double>> z; // n x p
    std::vector<double> mean, sd;
};

Standardized standardize(const std::vector<std::vector<double>>& x) {
    std::size_t n = x.size(), p = x[0].size();
    Standardized s;
    s.mean.assign(p, 0.0);
    s.sd.assign(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i) s.mean[j] += x[i][j];
        s.mean[j] /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            double d = x[i][j] - s.mean[j];
            s.sd[j] += d * d;
        }
        s.sd[j] = std::sqrt(s.sd[j] / static_cast<double>(n - 1));
    }
    s.z.assign(n, std::vector<double>(p, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) s.z[i][j] = (x[i][j] - s.mean[j]) / s.sd[j];
    return s;
}

std::vector<double> correlation_matrix(const Standardized& s) {
    std::size_t n = s.z.size(), p = s.z[0].size();
    std::vector<double> c(p * p, 0.0);
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < p; ++b) {
            double dot = 0;
            for (std::size_t i = 0; i < n; ++i) dot += s.z[i][a] * s.z[i][b];
            c[a * p + b] = dot / static_cast<double>(n - 1);
        }
    return c;
}

std::vector<FeatureVector> to_features(const std::vector<std::vector<double>>& x) {
    std::vector<FeatureVector> out;
    for (std::size_t i = 0; i < x.size(); ++i)
        out.push_back(
            FeatureVector::from_dense("p" + std::to_string(i), Category::BodyText, x[i]));
    return out;
}

std::vector<const FeatureVector*> row_ptrs(const std::vector<FeatureVector>& v) {
    std::vector<const FeatureVector*> out;
    for (const auto& f : v) out.push_back(&f);
    return out;
}

std::vector<std::vector<double>> random_matrix(Rng& rng, std::size_t n, std::size_t p) {
    std::vector<std::vector<double>> x(n, std::vector<double>(p));
    for (auto& row : x)
        for (auto& v : row) v = 2.0 * rng.uniform() - 1.0;
    return x;
}

} // namespace

TEST_CASE("kaiser-guttman retains strictly greater than 1") {
    CHECK(kaiser_guttman_retain({2.5, 1.1, 0.9}) == 2);
    CHECK(kaiser_guttman_retain({2.5, 1.0, 0.9}) == 1); // exact 1.0 excluded
    CHECK(kaiser_guttman_retain({2.5, 1.0 + 1e-12, 0.2}) == 2);
    CHECK(kaiser_guttman_retain({0.8, 0.1}) == 0);
    CHECK(kaiser_guttman_retain({}) == 0);
}

TEST_CASE("linear PCA matches an independent Jacobi eigen-oracle") {
    Rng rng(0xACA);
    for (int trial = 0; trial < 30; ++trial) {
        auto x = random_matrix(rng, 10, 6);
        auto feats = to_features(x);
        std::vector<int> labels = {1, -1, 1, -1, 1, -1, 1, -1, 1, -1};
        PcaModel m = train_pca(row_ptrs(feats), labels);

        Standardized s = standardize(x);
        auto corr = correlation_matrix(s);
        testhelpers::JacobiEigen eig = testhelpers::jacobi_eigen(corr, 6);

        std::size_t want_retained = 0;
        for (double v : eig.values)
            if (v > 1.0) ++want_retained;
        if (want_retained == 0) want_retained = 1; // library's fallback
        REQUIRE(m.retained() == want_retained);

        for (std::size_t k = 0; k < m.retained(); ++k) {
            CHECK(std::fabs(m.eigenvalues[k] - eig.values[k]) < 1e-6);
            // projections match up to per-component sign
            double flip = 0;
            for (std::size_t i = 0; i < 10; ++i) {
                double want = 0;
                for (std::size_t j = 0; j < 6; ++j) want += s.z[i][j] * eig.vectors[k][j];
                if (flip == 0 && std::fabs(want) > 1e-9)
                    flip = (want > 0) == (m.train_proj(i, k) > 0) ? 1.0 : -1.0;
                CHECK(std::fabs(m.train_proj(i, k) - flip * want) < 1e-6);
            }
        }
    }
}

TEST_CASE("constant columns are dropped and recorded") {
    Rng rng(7);
    auto x = random_matrix(rng, 8, 4);
    for (auto& row : x) row[2] = 3.14; // constant column
    auto feats = to_features(x);
    std::vector<int> labels = {1, -1, 1, -1, 1, -1, 1, -1};
    PcaModel m = train_pca(row_ptrs(feats), labels);
    REQUIRE(m.dropped_columns.size() == 1);
    CHECK(m.dropped_columns[0] == 2);
    CHECK(m.kept_columns == std::vector<int>{0, 1, 3});
}

TEST_CASE("retention fallback keeps the top component") {
    // orthogonal columns: the correlation matrix is the identity, so the
    // spectrum {1, 1} retains nothing under the strict rule
    std::vector<std::vector<double>> x = {{1, 1}, {-1, 1}, {1, -1}, {-1, -1}};
    auto feats = to_features(x);
    std::vector<int> labels = {1, -1, 1, -1};
    std::vector<std::string> warnings;
    PcaModel m = train_pca(row_ptrs(feats), labels, &warnings);
    CHECK(m.retention_fallback);
    CHECK(m.retained() == 1);
    CHECK(!warnings.empty());
}

TEST_CASE("classification assigns the nearer class mean distance") {
    Eigen::MatrixXd proj(4, 1);
    proj << -2, -1, 1, 2;
    std::vector<int> labels = {-1, -1, 1, 1};

    Eigen::VectorXd left(1), right(1), middle(1);
    left << -1.4;
    right << 1.6;
    middle << 0.0;
    CHECK(nearest_class_mean_distance(proj, labels, left).label == Label::Real);
    CHECK(nearest_class_mean_distance(proj, labels, right).label == Label::Fake);
    // exact tie goes to Fake
    CHECK(nearest_class_mean_distance(proj, labels, middle).label == Label::Fake);

    PcaDecision d = nearest_class_mean_distance(proj, labels, left);
    CHECK(d.mean_dist_real == doctest::Approx((0.6 + 0.4) / 2));
    CHECK(d.mean_dist_fake == doctest::Approx((2.4 + 3.4) / 2));
}

TEST_CASE("kernel PCA with a linear kernel reproduces linear PCA") {
    Rng rng(0xEEE);
    auto x = random_matrix(rng, 12, 5);
    // stretch columns so several correlation eigenvalues clear 1 comfortably
    for (auto& row : x) {
        row[1] = row[0] * 0.9 + row[1] * 0.1;
        row[3] = row[2] * 0.8 + row[3] * 0.2;
    }
    std::vector<int> labels;
    for (int i = 0; i < 12; ++i) labels.push_back(i % 2 ? 1 : -1);

    auto feats = to_features(x);
    PcaModel linear = train_pca(row_ptrs(feats), labels);

    // gram over the standardized rows
    Standardized s = standardize(x);
    auto zfeats = to_features(s.z);
    GramMatrix g = gram_linear(row_ptrs(zfeats));
    PcaModel kern = train_kernel_pca(g, labels);
    REQUIRE(kern.kernel_mode);

    std::size_t k = std::min(linear.retained(), kern.retained());
    REQUIRE(k >= 1);
    for (std::size_t c = 0; c < k; ++c) {
        double flip = 0;
        for (int i = 0; i < 12; ++i) {
            double a = linear.train_proj(i, c);
            double b = kern.train_proj(i, c);
            if (flip == 0 && std::fabs(a) > 1e-9) flip = (a > 0) == (b > 0) ? 1.0 : -1.0;
            CHECK(std::fabs(b * flip - a) < 1e-6);
        }
    }

    // classify_kernel_pca on a training row reproduces the stored projection
    std::vector<double> row0(12);
    for (int j = 0; j < 12; ++j) row0[j] = g.at(0, j);
    PcaDecision dec = classify_kernel_pca(kern, row0);
    PcaDecision want = nearest_class_mean_distance(
        kern.train_proj, labels, kern.train_proj.row(0).transpose());
    CHECK(dec.label == want.label);
    CHECK(dec.mean_dist_fake == doctest::Approx(want.mean_dist_fake).epsilon(1e-9));
    CHECK(dec.mean_dist_real == doctest::Approx(want.mean_dist_real).epsilon(1e-9));
}

TEST_CASE("classify_pca projects raw instances consistently") {
    Rng rng(0xAB);
    auto x = random_matrix(rng, 10, 4);
    auto feats = to_features(x);
    std::vector<int> labels = {1, 1, 1, 1, 1, -1, -1, -1, -1, -1};
    PcaModel m = train_pca(row_ptrs(feats), labels);

    // a training instance classifies like its stored projection
    PcaDecision d = classify_pca(m, feats[0]);
    PcaDecision want = nearest_class_mean_distance(m.train_proj, labels,
                                                   m.train_proj.row(0).transpose());
    CHECK(d.label == want.label);
    CHECK(d.mean_dist_fake == doctest::Approx(want.mean_dist_fake).epsilon(1e-9));
}
