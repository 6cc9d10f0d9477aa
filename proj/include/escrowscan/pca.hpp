#pragma once

#include "escrowscan/features.hpp"
#include "escrowscan/kernel.hpp"
#include "escrowscan/types.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace escrowscan {

// Number of leading eigenvalues strictly greater than 1 (Kaiser-Guttman).
// Input must be sorted descending.
std::size_t kaiser_guttman_retain(const std::vector<double>& eigenvalues_desc);

struct PcaModel {
    bool kernel_mode = false;
    bool retention_fallback = false;      // rule kept nothing -> top 1 retained
    std::vector<double> eigenvalues;      // retained, descending (correlation scale
                                          // for linear, centered-Gram scale for kernel)
    Eigen::MatrixXd train_proj;           // rows = training points, cols = components
    std::vector<int> train_labels;        // +/-1 per training row

    // linear mode: standardization + primal components over kept columns
    std::vector<int> kept_columns;        // original column index per kept column
    std::vector<int> dropped_columns;     // constant columns, recorded
    std::vector<double> mean, scale;      // per kept column (sample sd)
    Eigen::MatrixXd components;           // kept_p x n_retained, unit columns
    std::vector<double> zero_proj;        // projection of the all-zero raw instance

    // kernel mode: coefficients over the training kernel rows
    Eigen::MatrixXd alphas;               // n_train x n_retained (v_c / sqrt(lambda_c))
    std::vector<double> row_means;        // Gram row means (centering context)
    double grand_mean = 0;

    std::size_t retained() const { return eigenvalues.size(); }
};

struct PcaDecision {
    Label label = Label::Fake;
    double mean_dist_fake = 0;
    double mean_dist_real = 0;
};

// Correlation PCA: standardizes columns (constant columns dropped and
// recorded), eigendecomposes the correlation matrix, retains eigenvalues > 1
// (at least one, with a warning flag), stores projected training points.
// Uses the dual (Gram) route automatically when columns outnumber rows.
PcaModel train_pca(const std::vector<const FeatureVector*>& rows,
                   const std::vector<int>& labels,
                   std::vector<std::string>* warnings = nullptr);

// Projects the instance and assigns the class with the smaller mean Euclidean
// distance to that class's projected training points; ties go to Fake.
PcaDecision classify_pca(const PcaModel& model, const FeatureVector& instance);

// Kernel PCA: double-centers the Gram matrix, eigendecomposes, retains by
// Kaiser-Guttman applied to eigenvalues/n, projects training points.
PcaModel train_kernel_pca(const GramMatrix& gram, const std::vector<int>& labels,
                          std::vector<std::string>* warnings = nullptr);

// kernel_row = kernel values of the instance against all training points, in
// training order.
PcaDecision classify_kernel_pca(const PcaModel& model,
                                const std::vector<double>& kernel_row);

// Distance rule shared by both modes (exposed for oracle tests).
PcaDecision nearest_class_mean_distance(const Eigen::MatrixXd& train_proj,
                                        const std::vector<int>& labels,
                                        const Eigen::VectorXd& point);

} // namespace escrowscan
