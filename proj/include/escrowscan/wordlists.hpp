#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace escrowscan {

// Resolution order for the bundled data directory:
//   1. explicit set_data_dir() (the --data-dir flag)
//   2. ESCROWSCAN_DATA environment variable
//   3. compile-time default (install/source data dir)
void set_data_dir(const std::filesystem::path& dir);
std::filesystem::path data_dir();

// One entry per non-empty, non-comment line. Order is the file order and is
// load-bearing: it defines feature slot positions.
std::vector<std::string> load_list_file(const std::filesystem::path& file);

std::vector<std::string> load_function_words();     // exactly 300
std::vector<std::string> load_punctuation_chars();  // exactly 29, single chars
std::vector<std::string> load_structure_names();    // exactly 64
std::vector<std::string> load_english_words();      // spell-check dictionary

// "word<TAB>TAG" lines.
std::vector<std::pair<std::string, std::string>> load_pos_lexicon();

} // namespace escrowscan
