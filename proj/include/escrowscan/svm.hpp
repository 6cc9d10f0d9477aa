#pragma once

#include "escrowscan/kernel.hpp"
#include "escrowscan/types.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace escrowscan {

struct SmoOptions {
    double tol = 1e-3;          // KKT violation threshold (m(alpha) - M(alpha))
    std::size_t max_iter = 0;   // 0 = auto: 100000 + 2000 * n
};

struct SvmModel {
    std::vector<double> alpha;  // one per training point, 0 <= alpha_i <= C
    std::vector<int> sign;      // y_i in {+1 Fake, -1 Real}
    double bias = 0;
    double C = 1;
    std::string kernel_spec;    // "linear" | "composite" (metadata only)

    bool degenerate = false;    // single-class training set
    int degenerate_sign = 0;    // the class every prediction gets

    double dual_objective = 0;
    std::size_t iterations = 0;

    // Indices with alpha above numerical zero.
    std::vector<std::size_t> support_indices() const;
};

// Soft-margin dual via sequential minimal optimization with maximal
// KKT-violating pair selection (ties -> lowest index, so runs reproduce).
// Throws on non-symmetric gram or non-convergence (with diagnostics).
// A single-class label vector yields a degenerate model with a warning pushed
// to `warnings` when given.
SvmModel train_svm(const GramMatrix& gram, const std::vector<int>& labels, double C,
                   const SmoOptions& opt = {}, std::vector<std::string>* warnings = nullptr);

// kernel_row holds K(support_i, x) aligned with model.support_indices().
// Returns (label, margin).
std::pair<Label, double> predict_svm(const SvmModel& model,
                                     const std::vector<double>& kernel_row);

// Margin from a full kernel row aligned with the whole training set.
double decision_value(const SvmModel& model, const std::vector<double>& full_kernel_row);

} // namespace escrowscan
