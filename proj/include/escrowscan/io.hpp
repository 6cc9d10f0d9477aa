#pragma once

#include "escrowscan/corpus.hpp"
#include "escrowscan/eval.hpp"
#include "escrowscan/features.hpp"
#include "escrowscan/kernel.hpp"
#include "escrowscan/model.hpp"
#include "escrowscan/selection.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace escrowscan {

inline constexpr const char* kToolVersion = "0.1.0";

// Header block stamped on every text artifact: tool version, the seed the
// artifact was produced under, and content hashes of its inputs.
struct Provenance {
    std::string kind;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::uint64_t>> input_hashes;
};

void write_provenance(std::ostream& os, const Provenance& prov);

std::uint64_t site_content_hash(const Website& site);
std::uint64_t corpus_content_hash(const Corpus& corpus);
std::uint64_t file_content_hash(const std::filesystem::path& path);

// --- dictionaries ----------------------------------------------------------
void save_dictionary(const FeatureDictionary& dict, const std::filesystem::path& path,
                     const Provenance& prov);
// Verifies the stored content hash against the reloaded entries.
FeatureDictionary load_dictionary(const std::filesystem::path& path);

// --- feature matrices (tabular text) ----------------------------------------
void save_feature_matrix(const std::filesystem::path& path, const FeatureDictionary& dict,
                         const std::vector<FeatureVector>& rows,
                         const std::vector<SiteId>& row_sites, const Provenance& prov);

struct LoadedMatrix {
    FeatureDictionary dict;
    std::vector<FeatureVector> rows;
    std::vector<SiteId> row_sites;
};
LoadedMatrix load_feature_matrix(const std::filesystem::path& path);

// --- site labels ("<site-id>\t<real|fake|unknown>") -------------------------
void save_labels(const std::map<SiteId, Label>& labels, const std::filesystem::path& path);
std::map<SiteId, Label> load_labels(const std::filesystem::path& path);

// --- selection reports -------------------------------------------------------
void save_selection_report(const SelectionReport& report, const std::filesystem::path& path,
                           const Provenance& prov);

// --- gram matrices and similarity vectors (replayable tabular text) ---------
void save_gram(const GramMatrix& gram, const std::string& kernel_spec,
               const std::filesystem::path& path, const Provenance& prov);
GramMatrix load_gram(const std::filesystem::path& path);

void save_similarity_vectors(const std::vector<SiteSimilarityVector>& xs,
                             const std::vector<SiteColumn>& columns,
                             const std::vector<Category>& categories,
                             const std::filesystem::path& path, const Provenance& prov);

// --- model container (JSON) --------------------------------------------------
// load_model recomputes every embedded dictionary's content hash and refuses
// mismatches, so a model never predicts with altered dictionaries.
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

// --- evaluation outputs ------------------------------------------------------
void write_result_rows(std::ostream& os, const MatrixResult& result, const Provenance& prov);
void write_matrix_summary(std::ostream& os, const MatrixResult& result);
void write_significance_report(std::ostream& os, const MatrixResult& result,
                               const Provenance& prov);

// --- corpus statistics -------------------------------------------------------
void write_stats_table(std::ostream& os, const StatsTable& table);  // aligned text
void write_stats_rows(std::ostream& os, const StatsTable& table);   // TSV

} // namespace escrowscan
