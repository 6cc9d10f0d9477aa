#include "escrowscan/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace escrowscan {

namespace {
constexpr double kAlphaZero = 1e-12;
}

std::vector<std::size_t> SvmModel::support_indices() const {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        if (alpha[i] > kAlphaZero) idx.push_back(i);
    return idx;
}

SvmModel train_svm(const GramMatrix& gram, const std::vector<int>& labels, double C,
                   const SmoOptions& opt, std::vector<std::string>* warnings) {
    const std::size_t n = gram.n;
    if (labels.size() != n)
        throw std::invalid_argument("train_svm: labels/gram size mismatch");
    if (n == 0) throw std::invalid_argument("train_svm: empty training set");
    if (C <= 0) throw std::invalid_argument("train_svm: C must be positive");
    for (int y : labels)
        if (y != 1 && y != -1) throw std::invalid_argument("train_svm: labels must be +/-1");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(gram.at(i, j) - gram.at(j, i)) > 1e-12)
                throw std::invalid_argument("train_svm: gram matrix not symmetric");

    SvmModel model;
    model.alpha.assign(n, 0.0);
    model.sign = labels;
    model.C = C;

    bool any_pos = std::any_of(labels.begin(), labels.end(), [](int y) { return y > 0; });
    bool any_neg = std::any_of(labels.begin(), labels.end(), [](int y) { return y < 0; });
    if (!any_pos || !any_neg) {
        model.degenerate = true;
        model.degenerate_sign = any_pos ? +1 : -1;
        model.bias = model.degenerate_sign;
        if (warnings)
            warnings->push_back("train_svm: single-class training set, degenerate model "
                                "always predicts " +
                                std::string(any_pos ? "fake" : "real"));
        return model;
    }

    // G_i = sum_j alpha_j y_j K_ij. Optimality: max_{I_up}(y-G) - min_{I_low}(y-G) < tol.
    std::vector<double> G(n, 0.0);
    const std::size_t max_iter = opt.max_iter ? opt.max_iter : 100000 + 2000 * n;
    std::size_t it = 0;
    double gap = std::numeric_limits<double>::infinity();

    for (; it < max_iter; ++it) {
        int i = -1, j = -1;
        double m_up = -std::numeric_limits<double>::infinity();
        double m_low = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n; ++t) {
            double v = labels[t] - G[t];
            bool in_up = (labels[t] > 0 && model.alpha[t] < C) ||
                         (labels[t] < 0 && model.alpha[t] > 0);
            bool in_low = (labels[t] < 0 && model.alpha[t] < C) ||
                          (labels[t] > 0 && model.alpha[t] > 0);
            if (in_up && v > m_up) {
                m_up = v;
                i = static_cast<int>(t);
            }
            if (in_low && v < m_low) {
                m_low = v;
                j = static_cast<int>(t);
            }
        }
        gap = m_up - m_low;
        if (gap < opt.tol) break;

        const std::size_t a = static_cast<std::size_t>(i), b = static_cast<std::size_t>(j);
        const int yi = labels[a], yj = labels[b];
        const double s = yi * yj;
        double L, H;
        if (s < 0) {
            L = std::max(0.0, model.alpha[b] - model.alpha[a]);
            H = std::min(C, C + model.alpha[b] - model.alpha[a]);
        } else {
            L = std::max(0.0, model.alpha[a] + model.alpha[b] - C);
            H = std::min(C, model.alpha[a] + model.alpha[b]);
        }
        double eta = gram.at(a, a) + gram.at(b, b) - 2 * gram.at(a, b);
        eta = std::max(eta, 1e-12);
        // E_i - E_j with E = G - y
        double delta = ((G[a] - yi) - (G[b] - yj)) / eta;
        double nb = std::clamp(model.alpha[b] + yj * delta, L, H);
        double na = model.alpha[a] + s * (model.alpha[b] - nb);
        na = std::clamp(na, 0.0, C); // numerical safety only

        // Snap to exact box bounds: a multiplier stranded at C - epsilon stays
        // in the working sets with no room to move and wedges the pair
        // selection.
        const double snap = 1e-12 * std::max(1.0, C);
        auto snapped = [&](double v) { return v < snap ? 0.0 : v > C - snap ? C : v; };
        na = snapped(na);
        nb = snapped(nb);

        double da = na - model.alpha[a], db = nb - model.alpha[b];
        if (std::abs(da) < 1e-15 && std::abs(db) < 1e-15) break; // stalled
        model.alpha[a] = na;
        model.alpha[b] = nb;
        for (std::size_t t = 0; t < n; ++t)
            G[t] += da * yi * gram.at(a, t) + db * yj * gram.at(b, t);
    }

    if (gap >= opt.tol) {
        std::ostringstream os;
        os << "train_svm: no convergence " << (it >= max_iter ? "after" : "(stalled at)")
           << " " << it << " iterations (KKT gap " << gap << ", tol " << opt.tol << ", n "
           << n << ", C " << C << ")";
        throw std::runtime_error(os.str());
    }

    // Recompute the pair bounds for the bias from the final state.
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        double v = labels[t] - G[t];
        bool in_up = (labels[t] > 0 && model.alpha[t] < C) ||
                     (labels[t] < 0 && model.alpha[t] > 0);
        bool in_low = (labels[t] < 0 && model.alpha[t] < C) ||
                      (labels[t] > 0 && model.alpha[t] > 0);
        if (in_up) m_up = std::max(m_up, v);
        if (in_low) m_low = std::min(m_low, v);
    }
    model.bias = (m_up + m_low) / 2;
    model.iterations = it;

    double obj = 0;
    for (std::size_t t = 0; t < n; ++t) obj += model.alpha[t] - 0.5 * model.alpha[t] * labels[t] * G[t];
    model.dual_objective = obj;
    return model;
}

std::pair<Label, double> predict_svm(const SvmModel& model,
                                     const std::vector<double>& kernel_row) {
    if (model.degenerate) {
        Label l = model.degenerate_sign > 0 ? Label::Fake : Label::Real;
        return {l, static_cast<double>(model.degenerate_sign)};
    }
    auto support = model.support_indices();
    if (kernel_row.size() != support.size())
        throw std::invalid_argument("predict_svm: kernel row not aligned with support vectors");
    double f = model.bias;
    for (std::size_t k = 0; k < support.size(); ++k)
        f += model.alpha[support[k]] * model.sign[support[k]] * kernel_row[k];
    return {f >= 0 ? Label::Fake : Label::Real, f};
}

double decision_value(const SvmModel& model, const std::vector<double>& full_kernel_row) {
    if (model.degenerate) return static_cast<double>(model.degenerate_sign);
    if (full_kernel_row.size() != model.alpha.size())
        throw std::invalid_argument("decision_value: kernel row not aligned with training set");
    double f = model.bias;
    for (std::size_t i = 0; i < model.alpha.size(); ++i)
        if (model.alpha[i] > kAlphaZero)
            f += model.alpha[i] * model.sign[i] * full_kernel_row[i];
    return f;
}

} // namespace escrowscan
