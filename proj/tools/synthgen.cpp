#include "escrowscan/corpus.hpp"
#include "escrowscan/features.hpp"
#include "escrowscan/synth.hpp"
#include "escrowscan/wordlists.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace escrowscan;

int main(int argc, char** argv) {
    CLI::App app{"deterministic benchmark corpus generator"};
    SynthConfig cfg;
    std::string out, data_dir_flag;
    bool no_confusers = false;
    app.add_option("--out", out, "corpus root directory")->required();
    app.add_option("--seed", cfg.seed)->capture_default_str();
    app.add_option("--fake-sites", cfg.fake_sites)->capture_default_str();
    app.add_option("--real-sites", cfg.real_sites)->capture_default_str();
    app.add_option("--templates", cfg.templates)->capture_default_str();
    app.add_option("--pages-min", cfg.pages_min)->capture_default_str();
    app.add_option("--pages-max", cfg.pages_max)->capture_default_str();
    app.add_flag("--no-confusers", no_confusers,
                 "skip the real sites that borrow one template category");
    app.add_option("--data-dir", data_dir_flag, "directory of the bundled word lists");
    CLI11_PARSE(app, argc, argv);

    try {
        if (!data_dir_flag.empty()) set_data_dir(data_dir_flag);
        cfg.confusers = !no_confusers;
        ExtractionContext ctx = ExtractionContext::load_default();
        Corpus corpus = generate_benchmark_corpus(cfg, ctx);
        for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << "\n";
        save_corpus(corpus, out);
        std::size_t pages = 0;
        for (const auto& s : corpus.sites) pages += s.pages.size();
        std::cout << corpus.sites.size() << " sites, " << pages << " pages -> " << out
                  << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
