#pragma once

#include "escrowscan/features.hpp"
#include "escrowscan/types.hpp"

#include <string>
#include <vector>

namespace escrowscan {

// IG of a boolean presence split against binary labels, in bits.
// IG = H(class) - sum_v (n_v/n) H(class|v). Single-class labels give 0.
double information_gain(const std::vector<bool>& presence, const std::vector<Label>& labels);

struct RankedFeature {
    std::string name;
    double ig = 0;
    std::size_t document_frequency = 0;
};

struct SelectionPolicy {
    // Applied per selectable n-gram group; fixed slots always survive.
    std::size_t top_k = 500;   // 0 = unlimited
    double min_ig = 0.0;       // keep features with IG >= min_ig only when > 0
};

struct SelectionReport {
    Category category = Category::BodyText;
    std::vector<RankedFeature> ranked; // IG non-increasing, ties lexicographic
    std::string cutoff;                // human-readable policy description
    std::size_t kept_ngrams = 0;
    std::size_t fixed_slots = 0;
};

// Scores every selectable candidate of `candidates` on the given feature rows
// (raw counts) and freezes the final dictionary: all fixed slots, plus the
// n-grams passing the policy in each group. Ties on IG break lexicographically
// by name so selection is deterministic.
std::pair<FeatureDictionary, SelectionReport>
select_features(const FeatureDictionary& candidates, const std::vector<FeatureVector>& rows,
                const std::vector<Label>& labels, const SelectionPolicy& policy);

} // namespace escrowscan
