#include "escrowscan/selection.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace escrowscan {

namespace {

double entropy_bits(double pos, double neg) {
    double n = pos + neg;
    if (n <= 0) return 0.0;
    double h = 0;
    for (double c : {pos, neg}) {
        if (c <= 0) continue;
        double p = c / n;
        h -= p * std::log2(p);
    }
    return h;
}

} // namespace

double information_gain(const std::vector<bool>& presence, const std::vector<Label>& labels) {
    if (presence.size() != labels.size() || presence.empty())
        throw std::invalid_argument("information_gain: size mismatch or empty input");

    double pos = 0, neg = 0;             // class counts (Fake / Real)
    double p_pos = 0, p_neg = 0;         // present partition
    double a_pos = 0, a_neg = 0;         // absent partition
    for (std::size_t i = 0; i < labels.size(); ++i) {
        bool fake = label_sign(labels[i]) > 0;
        (fake ? pos : neg) += 1.0;
        if (presence[i])
            (fake ? p_pos : p_neg) += 1.0;
        else
            (fake ? a_pos : a_neg) += 1.0;
    }
    double n = pos + neg;
    double h = entropy_bits(pos, neg);
    double hp = entropy_bits(p_pos, p_neg);
    double ha = entropy_bits(a_pos, a_neg);
    double np = p_pos + p_neg, na = a_pos + a_neg;
    double ig = h - (np / n) * hp - (na / n) * ha;
    return ig < 0 ? 0.0 : ig; // clamp -0 / rounding residue
}

std::pair<FeatureDictionary, SelectionReport>
select_features(const FeatureDictionary& candidates, const std::vector<FeatureVector>& rows,
                const std::vector<Label>& labels, const SelectionPolicy& policy) {
    if (rows.size() != labels.size())
        throw std::invalid_argument("select_features: rows/labels size mismatch");
    if (rows.empty()) throw std::invalid_argument("select_features: no rows");

    const auto& names = candidates.entries();
    const std::size_t dim = names.size();

    // Presence and document frequency per feature column.
    std::vector<std::vector<bool>> presence(dim, std::vector<bool>(rows.size(), false));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].dim != dim)
            throw std::invalid_argument("select_features: row not aligned to candidates");
        for (const auto& [i, x] : rows[r].items)
            if (x > 0) presence[static_cast<std::size_t>(i)][r] = true;
    }

    std::vector<std::size_t> selectable;
    for (std::size_t i = 0; i < dim; ++i)
        if (!FeatureDictionary::is_fixed_group(FeatureDictionary::group_of(names[i])))
            selectable.push_back(i);

    std::vector<double> ig(dim, 0.0);
    // Independent per-column scores; one writer per element.
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(selectable.size()); ++k) {
        std::size_t i = selectable[static_cast<std::size_t>(k)];
        ig[i] = information_gain(presence[i], labels);
    }

    SelectionReport report;
    report.category = candidates.category();
    for (std::size_t i : selectable) {
        RankedFeature rf;
        rf.name = names[i];
        rf.ig = ig[i];
        rf.document_frequency = static_cast<std::size_t>(
            std::count(presence[i].begin(), presence[i].end(), true));
        report.ranked.push_back(std::move(rf));
    }
    std::sort(report.ranked.begin(), report.ranked.end(),
              [](const RankedFeature& a, const RankedFeature& b) {
                  if (a.ig != b.ig) return a.ig > b.ig;
                  return a.name < b.name;
              });

    // Policy applies within each selectable group.
    std::map<std::string, std::size_t> taken;
    std::vector<std::string> kept;
    bool exhausted_note = false;
    for (const auto& rf : report.ranked) {
        if (policy.min_ig > 0 && rf.ig < policy.min_ig) continue;
        std::string g = FeatureDictionary::group_of(rf.name);
        if (policy.top_k > 0 && taken[g] >= policy.top_k) continue;
        ++taken[g];
        kept.push_back(rf.name);
    }
    std::ostringstream cutoff;
    if (policy.top_k > 0)
        cutoff << "top_k=" << policy.top_k << " per group";
    else
        cutoff << "top_k=unlimited";
    if (policy.min_ig > 0) cutoff << ", min_ig=" << policy.min_ig;
    for (const auto& [g, cnt] : taken) {
        std::size_t available = 0;
        for (const auto& rf : report.ranked)
            if (FeatureDictionary::group_of(rf.name) == g) ++available;
        if (policy.top_k > 0 && available < policy.top_k && !exhausted_note) {
            cutoff << " (some groups smaller than k: kept all)";
            exhausted_note = true;
        }
    }
    report.cutoff = cutoff.str();
    report.kept_ngrams = kept.size();

    std::vector<std::string> entries;
    for (std::size_t i = 0; i < dim; ++i)
        if (FeatureDictionary::is_fixed_group(FeatureDictionary::group_of(names[i])))
            entries.push_back(names[i]);
    report.fixed_slots = entries.size();
    std::sort(kept.begin(), kept.end());
    entries.insert(entries.end(), kept.begin(), kept.end());

    return {FeatureDictionary(candidates.category(), std::move(entries), candidates.config()),
            report};
}

} // namespace escrowscan
