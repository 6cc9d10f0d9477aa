#include "escrowscan/pca.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace escrowscan {

std::size_t kaiser_guttman_retain(const std::vector<double>& eigenvalues_desc) {
    std::size_t n = 0;
    for (double l : eigenvalues_desc) {
        if (l > 1.0)
            ++n;
        else
            break;
    }
    return n;
}

namespace {

// Deterministic eigenvector orientation: the entry with the largest absolute
// value (lowest index on ties) is made positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index best = 0;
    double best_abs = -1;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double a = std::abs(v[i]);
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }
    if (v[best] < 0) v = -v;
}

struct ColumnStats {
    std::vector<int> kept, dropped;
    std::vector<double> mean, scale; // over kept columns, sample sd
};

ColumnStats column_stats(const std::vector<const FeatureVector*>& rows, std::size_t dim) {
    const double r = static_cast<double>(rows.size());
    std::vector<double> sum(dim, 0.0), sumsq(dim, 0.0);
    for (const auto* row : rows)
        for (const auto& [i, x] : row->items) {
            sum[static_cast<std::size_t>(i)] += x;
            sumsq[static_cast<std::size_t>(i)] += x * x;
        }
    ColumnStats cs;
    for (std::size_t j = 0; j < dim; ++j) {
        double mu = sum[j] / r;
        double var = (sumsq[j] - r * mu * mu) / (r - 1);
        if (var <= 1e-24) {
            cs.dropped.push_back(static_cast<int>(j));
        } else {
            cs.kept.push_back(static_cast<int>(j));
            cs.mean.push_back(mu);
            cs.scale.push_back(std::sqrt(var));
        }
    }
    return cs;
}

void apply_retention(PcaModel& model, std::vector<double>& eig_desc, std::size_t scale_kg,
                     std::vector<std::string>* warnings, const char* who) {
    // scale_kg: divisor applied to eigenvalues before the >1 test (1 for
    // correlation PCA, n for kernel PCA).
    std::vector<double> scaled = eig_desc;
    if (scale_kg > 1)
        for (double& l : scaled) l /= static_cast<double>(scale_kg);
    std::size_t keep = kaiser_guttman_retain(scaled);
    if (keep == 0) {
        keep = 1;
        model.retention_fallback = true;
        if (warnings)
            warnings->push_back(std::string(who) +
                                ": Kaiser-Guttman retained no components, keeping top 1");
    }
    eig_desc.resize(keep);
}

} // namespace

PcaModel train_pca(const std::vector<const FeatureVector*>& rows,
                   const std::vector<int>& labels, std::vector<std::string>* warnings) {
    const std::size_t r = rows.size();
    if (r < 2) throw std::invalid_argument("train_pca: need at least 2 rows");
    if (labels.size() != r) throw std::invalid_argument("train_pca: labels size mismatch");
    const std::size_t dim = rows[0]->dim;
    for (const auto* row : rows)
        if (row->dim != dim) throw std::invalid_argument("train_pca: ragged rows");

    PcaModel model;
    model.train_labels = labels;
    ColumnStats cs = column_stats(rows, dim);
    model.kept_columns = cs.kept;
    model.dropped_columns = cs.dropped;
    model.mean = cs.mean;
    model.scale = cs.scale;
    const std::size_t p = cs.kept.size();
    if (p == 0) throw std::invalid_argument("train_pca: all columns constant");

    // kept-column position lookup
    std::vector<int> pos(dim, -1);
    for (std::size_t k = 0; k < p; ++k) pos[static_cast<std::size_t>(cs.kept[k])] = static_cast<int>(k);

    std::vector<double> all_eigs; // descending
    if (p <= r) {
        // Primal: p x p correlation matrix.
        Eigen::MatrixXd Z(r, p);
        Z.setZero();
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t k = 0; k < p; ++k)
                Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                    -cs.mean[k] / cs.scale[k];
            for (const auto& [j, x] : rows[i]->items) {
                int k = pos[static_cast<std::size_t>(j)];
                if (k >= 0)
                    Z(static_cast<Eigen::Index>(i), k) =
                        (x - cs.mean[static_cast<std::size_t>(k)]) /
                        cs.scale[static_cast<std::size_t>(k)];
            }
        }
        Eigen::MatrixXd corr = (Z.transpose() * Z) / static_cast<double>(r - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("train_pca: eigendecomposition failed");
        // ascending -> descending
        Eigen::VectorXd ev = es.eigenvalues().reverse();
        Eigen::MatrixXd V = es.eigenvectors().rowwise().reverse();
        all_eigs.assign(ev.data(), ev.data() + ev.size());
        model.eigenvalues = all_eigs;
        apply_retention(model, model.eigenvalues, 1, warnings, "train_pca");
        const auto keep = static_cast<Eigen::Index>(model.eigenvalues.size());
        model.components = V.leftCols(keep);
        for (Eigen::Index c = 0; c < keep; ++c) fix_sign(model.components.col(c));
        model.train_proj = Z * model.components;
    } else {
        // Dual: r x r Gram of standardized rows, built sparsely.
        // G_ab = sum_j x_aj x_bj w_j - s_a - s_b + t, w_j = 1/sd_j^2,
        // s_a = sum_j x_aj mu_j w_j, t = sum_j mu_j^2 w_j.
        std::vector<double> w(p), s(r, 0.0);
        double t = 0;
        for (std::size_t k = 0; k < p; ++k) {
            w[k] = 1.0 / (cs.scale[k] * cs.scale[k]);
            t += cs.mean[k] * cs.mean[k] * w[k];
        }
        auto kept_items = [&](const FeatureVector& f) {
            std::vector<std::pair<int, double>> out;
            out.reserve(f.items.size());
            for (const auto& [j, x] : f.items) {
                int k = pos[static_cast<std::size_t>(j)];
                if (k >= 0) out.emplace_back(k, x);
            }
            return out;
        };
        std::vector<std::vector<std::pair<int, double>>> kr(r);
        for (std::size_t i = 0; i < r; ++i) {
            kr[i] = kept_items(*rows[i]);
            for (const auto& [k, x] : kr[i]) s[i] += x * cs.mean[static_cast<std::size_t>(k)] *
                                                     w[static_cast<std::size_t>(k)];
        }
        Eigen::MatrixXd G(r, r);
#pragma omp parallel for schedule(dynamic)
        for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(r); ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            for (std::size_t j2 = i; j2 < r; ++j2) {
                double dot = 0;
                std::size_t a = 0, b = 0;
                while (a < kr[i].size() && b < kr[j2].size()) {
                    if (kr[i][a].first == kr[j2][b].first) {
                        dot += kr[i][a].second * kr[j2][b].second *
                               w[static_cast<std::size_t>(kr[i][a].first)];
                        ++a;
                        ++b;
                    } else if (kr[i][a].first < kr[j2][b].first) {
                        ++a;
                    } else {
                        ++b;
                    }
                }
                double g = dot - s[i] - s[j2] + t;
                G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j2)) = g;
                G(static_cast<Eigen::Index>(j2), static_cast<Eigen::Index>(i)) = g;
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("train_pca: eigendecomposition failed");
        Eigen::VectorXd evG = es.eigenvalues().reverse(); // lambda_G = (r-1) lambda_corr
        Eigen::MatrixXd U = es.eigenvectors().rowwise().reverse();
        for (Eigen::Index i = 0; i < evG.size(); ++i)
            all_eigs.push_back(std::max(0.0, evG[i]) / static_cast<double>(r - 1));
        model.eigenvalues = all_eigs;
        apply_retention(model, model.eigenvalues, 1, warnings, "train_pca");
        const auto keep = static_cast<Eigen::Index>(model.eigenvalues.size());

        // Primal components v_c = Z^T u_c / sqrt(lambda_G): accumulate sparse rows.
        model.components = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), keep);
        for (Eigen::Index c = 0; c < keep; ++c) {
            double lg = model.eigenvalues[static_cast<std::size_t>(c)] *
                        static_cast<double>(r - 1);
            double inv = lg > 1e-18 ? 1.0 / std::sqrt(lg) : 0.0;
            // standardized row = sparse x/sd part plus a dense -mu/sd part; the
            // dense part contributes coef_sum * (-mu/sd) in one pass
            double coef_sum = 0;
            for (std::size_t i = 0; i < r; ++i) {
                double coef = U(static_cast<Eigen::Index>(i), c) * inv;
                coef_sum += coef;
                if (coef == 0) continue;
                for (const auto& [k, x] : kr[i])
                    model.components(k, c) +=
                        coef * x / cs.scale[static_cast<std::size_t>(k)];
            }
            for (std::size_t k = 0; k < p; ++k)
                model.components(static_cast<Eigen::Index>(k), c) -=
                    coef_sum * cs.mean[k] / cs.scale[k];
            fix_sign(model.components.col(c));
        }
        // Train projections recomputed against the oriented components so signs
        // stay consistent: proj_i = z_i . v_c, done sparsely below via zero_proj.
        model.train_proj = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(r), keep);
        std::vector<double> base(static_cast<std::size_t>(keep), 0.0);
        for (Eigen::Index c = 0; c < keep; ++c)
            for (std::size_t k = 0; k < p; ++k)
                base[static_cast<std::size_t>(c)] -=
                    cs.mean[k] / cs.scale[k] * model.components(static_cast<Eigen::Index>(k), c);
        for (std::size_t i = 0; i < r; ++i)
            for (Eigen::Index c = 0; c < keep; ++c) {
                double v = base[static_cast<std::size_t>(c)];
                for (const auto& [k, x] : kr[i])
                    v += x / cs.scale[static_cast<std::size_t>(k)] * model.components(k, c);
                model.train_proj(static_cast<Eigen::Index>(i), c) = v;
            }
    }

    // Projection of the all-zero raw instance, reused by classify_pca.
    model.zero_proj.assign(model.eigenvalues.size(), 0.0);
    for (std::size_t c = 0; c < model.eigenvalues.size(); ++c) {
        double v = 0;
        for (std::size_t k = 0; k < p; ++k)
            v -= model.mean[k] / model.scale[k] *
                 model.components(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c));
        model.zero_proj[c] = v;
    }
    return model;
}

PcaDecision nearest_class_mean_distance(const Eigen::MatrixXd& train_proj,
                                        const std::vector<int>& labels,
                                        const Eigen::VectorXd& point) {
    double sum_f = 0, sum_r = 0;
    std::size_t n_f = 0, n_r = 0;
    for (Eigen::Index i = 0; i < train_proj.rows(); ++i) {
        double d = (train_proj.row(i).transpose() - point).norm();
        if (labels[static_cast<std::size_t>(i)] > 0) {
            sum_f += d;
            ++n_f;
        } else {
            sum_r += d;
            ++n_r;
        }
    }
    PcaDecision dec;
    dec.mean_dist_fake = n_f ? sum_f / static_cast<double>(n_f) : 0;
    dec.mean_dist_real = n_r ? sum_r / static_cast<double>(n_r) : 0;
    if (n_f == 0) {
        dec.label = Label::Real;
    } else if (n_r == 0) {
        dec.label = Label::Fake;
    } else {
        // tie -> Fake (documented conservative rule)
        dec.label = dec.mean_dist_real < dec.mean_dist_fake ? Label::Real : Label::Fake;
    }
    return dec;
}

PcaDecision classify_pca(const PcaModel& model, const FeatureVector& instance) {
    if (model.kernel_mode)
        throw std::invalid_argument("classify_pca: model was trained as kernel PCA");
    const std::size_t keep = model.retained();
    Eigen::VectorXd point(static_cast<Eigen::Index>(keep));
    // sparse projection: zero_proj + contributions of nonzero kept columns
    std::vector<int> pos;
    pos.assign(instance.dim, -1);
    for (std::size_t k = 0; k < model.kept_columns.size(); ++k) {
        auto col = static_cast<std::size_t>(model.kept_columns[k]);
        if (col < instance.dim) pos[col] = static_cast<int>(k);
    }
    for (std::size_t c = 0; c < keep; ++c) {
        double v = model.zero_proj[c];
        for (const auto& [j, x] : instance.items) {
            int k = pos[static_cast<std::size_t>(j)];
            if (k >= 0)
                v += x / model.scale[static_cast<std::size_t>(k)] *
                     model.components(k, static_cast<Eigen::Index>(c));
        }
        point[static_cast<Eigen::Index>(c)] = v;
    }
    return nearest_class_mean_distance(model.train_proj, model.train_labels, point);
}

PcaModel train_kernel_pca(const GramMatrix& gram, const std::vector<int>& labels,
                          std::vector<std::string>* warnings) {
    const std::size_t n = gram.n;
    if (n < 2) throw std::invalid_argument("train_kernel_pca: need at least 2 rows");
    if (labels.size() != n)
        throw std::invalid_argument("train_kernel_pca: labels size mismatch");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(gram.at(i, j) - gram.at(j, i)) > 1e-10)
                throw std::invalid_argument("train_kernel_pca: gram not symmetric");

    PcaModel model;
    model.kernel_mode = true;
    model.train_labels = labels;

    Eigen::Map<const Eigen::MatrixXd> K(gram.data.data(), static_cast<Eigen::Index>(n),
                                        static_cast<Eigen::Index>(n));
    Eigen::VectorXd row_mean = K.rowwise().mean();
    double grand = K.mean();
    model.row_means.assign(row_mean.data(), row_mean.data() + row_mean.size());
    model.grand_mean = grand;

    Eigen::MatrixXd Kc = K;
    Kc.colwise() -= row_mean;
    Kc.rowwise() -= row_mean.transpose();
    Kc.array() += grand;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kc);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("train_kernel_pca: eigendecomposition failed");
    Eigen::VectorXd ev = es.eigenvalues().reverse();
    Eigen::MatrixXd V = es.eigenvectors().rowwise().reverse();

    model.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    for (double& l : model.eigenvalues) l = std::max(l, 0.0);
    apply_retention(model, model.eigenvalues, n, warnings, "train_kernel_pca");
    const auto keep = static_cast<Eigen::Index>(model.eigenvalues.size());

    model.alphas = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), keep);
    model.train_proj = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), keep);
    for (Eigen::Index c = 0; c < keep; ++c) {
        Eigen::VectorXd v = V.col(c);
        fix_sign(v);
        double l = model.eigenvalues[static_cast<std::size_t>(c)];
        double root = l > 1e-18 ? std::sqrt(l) : 0.0;
        model.alphas.col(c) = root > 0 ? (v / root).eval() : Eigen::VectorXd::Zero(v.size());
        model.train_proj.col(c) = v * root; // scores = sqrt(lambda) * v
    }
    return model;
}

PcaDecision classify_kernel_pca(const PcaModel& model,
                                const std::vector<double>& kernel_row) {
    if (!model.kernel_mode)
        throw std::invalid_argument("classify_kernel_pca: model was trained as linear PCA");
    const std::size_t n = model.row_means.size();
    if (kernel_row.size() != n)
        throw std::invalid_argument("classify_kernel_pca: kernel row size mismatch");
    double k_mean = 0;
    for (double v : kernel_row) k_mean += v;
    k_mean /= static_cast<double>(n);

    Eigen::VectorXd kc(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j)
        kc[static_cast<Eigen::Index>(j)] =
            kernel_row[j] - k_mean - model.row_means[j] + model.grand_mean;
    Eigen::VectorXd point = model.alphas.transpose() * kc;
    return nearest_class_mean_distance(model.train_proj, model.train_labels, point);
}

} // namespace escrowscan
