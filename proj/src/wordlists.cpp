#include "escrowscan/wordlists.hpp"

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <stdexcept>

#ifndef ESCROWSCAN_DATA_DIR
#define ESCROWSCAN_DATA_DIR "data"
#endif

namespace escrowscan {

namespace {
std::filesystem::path g_data_dir;
std::mutex g_data_dir_mutex;
} // namespace

void set_data_dir(const std::filesystem::path& dir) {
    std::lock_guard lock(g_data_dir_mutex);
    g_data_dir = dir;
}

std::filesystem::path data_dir() {
    {
        std::lock_guard lock(g_data_dir_mutex);
        if (!g_data_dir.empty()) return g_data_dir;
    }
    if (const char* env = std::getenv("ESCROWSCAN_DATA"); env && *env)
        return std::filesystem::path(env);
    return std::filesystem::path(ESCROWSCAN_DATA_DIR);
}

std::vector<std::string> load_list_file(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open data file: " + file.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // Comments are "# ..." with a space so the bare '#' punctuation
        // entry stays loadable.
        if (line.empty() || (line[0] == '#' && line.size() > 1 && line[1] == ' ')) continue;
        out.push_back(line);
    }
    return out;
}

namespace {
std::vector<std::string> load_checked(const char* name, std::size_t expect) {
    auto v = load_list_file(data_dir() / name);
    if (expect != 0 && v.size() != expect)
        throw std::runtime_error(std::string(name) + ": expected " +
                                 std::to_string(expect) + " entries, got " +
                                 std::to_string(v.size()));
    return v;
}
} // namespace

std::vector<std::string> load_function_words() {
    return load_checked("function_words.txt", 300);
}

std::vector<std::string> load_punctuation_chars() {
    auto v = load_checked("punctuation_chars.txt", 29);
    for (const auto& s : v)
        if (s.size() != 1)
            throw std::runtime_error("punctuation_chars.txt: entry not a single char: " + s);
    return v;
}

std::vector<std::string> load_structure_names() {
    return load_checked("document_structure.txt", 64);
}

std::vector<std::string> load_english_words() {
    return load_checked("english_words.txt", 0);
}

std::vector<std::pair<std::string, std::string>> load_pos_lexicon() {
    auto lines = load_list_file(data_dir() / "pos_lexicon.txt");
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(lines.size());
    for (const auto& line : lines) {
        auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("pos_lexicon.txt: missing tab: " + line);
        out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
    }
    return out;
}

} // namespace escrowscan
