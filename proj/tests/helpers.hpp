#pragma once

// Shared fixtures and independent oracles. Everything here is deliberately
// naive: the point is to disagree with the library when the library is wrong.

#include "escrowscan/corpus.hpp"
#include "escrowscan/features.hpp"
#include "escrowscan/image.hpp"
#include "escrowscan/kernel.hpp"
#include "escrowscan/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace testhelpers {

// Cyclic Jacobi eigensolver for small symmetric matrices (row-major n*n).
// Returns eigenvalues descending with matching unit eigenvector columns.
struct JacobiEigen {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors; // vectors[k] is the k-th eigenvector
};

inline JacobiEigen jacobi_eigen(std::vector<double> a, std::size_t n) {
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
        if (off < 1e-24) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a[p * n + q];
                if (std::fabs(apq) < 1e-300) continue;
                double theta = (a[q * n + q] - a[p * n + p]) / (2 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1));
                double c = 1 / std::sqrt(t * t + 1), s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a[k * n + p], akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a[p * n + k], aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vkp = v[k * n + p], vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a[x * n + x] > a[y * n + y]; });

    JacobiEigen out;
    for (std::size_t k : order) {
        out.values.push_back(a[k * n + k]);
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = v[i * n + k];
        out.vectors.push_back(std::move(col));
    }
    return out;
}

// Random sparse non-negative feature vector of the given dimension.
inline escrowscan::FeatureVector random_features(escrowscan::Rng& rng, std::size_t dim,
                                                 std::size_t max_nnz,
                                                 const std::string& page_id) {
    escrowscan::FeatureVector f;
    f.page_id = page_id;
    f.dim = dim;
    std::size_t nnz = 1 + rng.bounded(max_nnz);
    std::vector<int> idx;
    for (std::size_t k = 0; k < nnz; ++k) idx.push_back(static_cast<int>(rng.bounded(dim)));
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    for (int i : idx) f.items.emplace_back(i, 0.05 + rng.uniform());
    return f;
}

inline escrowscan::SimPage random_sim_page(escrowscan::Rng& rng, std::size_t dim,
                                           const std::string& page_id) {
    escrowscan::SimPage p;
    p.attrs.page_level = static_cast<int>(rng.bounded(6));
    p.attrs.in_link_count = static_cast<int>(rng.bounded(9));
    p.attrs.out_link_count = static_cast<int>(rng.bounded(9));
    p.features = random_features(rng, dim, dim / 2 + 1, page_id);
    return p;
}

// A hand-wired three-page site: root -> a (twice), root -> b, a -> root.
// Root also carries one external link and one mailto anchor.
inline escrowscan::Website tiny_site(const std::string& site_id = "t01",
                                     escrowscan::Label label = escrowscan::Label::Real) {
    using namespace escrowscan;
    Website s;
    s.site_id = site_id;
    s.label = label;
    s.root_url = "http://example.test/";
    s.source = "synthetic";
    s.root_page_id = "p0001";

    WebPage root;
    root.page_id = "p0001";
    root.site_id = site_id;
    root.url = "http://example.test/";
    root.html_source =
        "<!DOCTYPE html><html><head><title>Tiny root</title></head><body>"
        "<h1>Hello escrow world.</h1>"
        "<p>We hold funds until delivery! Really?</p>"
        "<a href=\"a.html\">first</a> <a href=\"a.html\">again</a> "
        "<a href=\"b.html\">second</a> "
        "<a href=\"http://elsewhere.test/x\">out</a> "
        "<a href=\"mailto:root@example.test\">mail</a>"
        "<img src=\"images/i0001.png\"></body></html>";
    root.image_refs = {"i0001"};

    WebPage a;
    a.page_id = "p0002";
    a.site_id = site_id;
    a.url = "http://example.test/a.html";
    a.html_source = "<html><body><p>Page a links back.</p>"
                    "<a href=\"/\">home</a></body></html>";

    WebPage b;
    b.page_id = "p0003";
    b.site_id = site_id;
    b.url = "http://example.test/b.html";
    b.html_source = "<html><body><p>Page b is a leaf, nothing more.</p></body></html>";

    s.pages = {root, a, b};
    s.link_edges = {{"p0001", "p0002"}, {"p0001", "p0002"}, {"p0001", "p0003"},
                    {"p0002", "p0001"}};

    DecodedImage raster;
    raster.width = 2;
    raster.height = 2;
    raster.rgb = {255, 0, 0, 255, 0, 0, 0, 0, 255, 0, 0, 255};

    ImageAsset img;
    img.image_id = "i0001";
    img.extension = "png";
    img.width_px = 2;
    img.height_px = 2;
    img.pixels = raster.rgb;
    img.raw_bytes = encode_png(raster);
    img.file_size_bytes = img.raw_bytes.size();
    s.images = {img};

    std::vector<std::string> warnings;
    establish_invariants(s, warnings);
    return s;
}

} // namespace testhelpers
