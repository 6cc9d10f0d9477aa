#pragma once

#include "escrowscan/pca.hpp"
#include "escrowscan/svm.hpp"
#include "escrowscan/types.hpp"

#include <vector>

namespace escrowscan {

// Five per-category members of one technique, combined by majority vote.
struct EnsembleModel {
    std::string technique;            // "svm" | "pca"
    std::vector<SvmModel> svm_members; // Category order when technique == svm
    std::vector<PcaModel> pca_members; // Category order when technique == pca
    bool score_mean = false;           // alternative combination rule
};

// Majority vote; Unknown entries abstain and count as Fake votes (documented),
// exact ties also resolve to Fake.
Label majority_vote(const std::vector<Label>& votes);

// Score-mean rule: non-negative combined score -> Fake (ties flag, matching
// the vote). Scores are SVM margins or (mean_dist_real - mean_dist_fake) for
// PCA members.
Label score_mean_vote(const std::vector<double>& scores);

} // namespace escrowscan
