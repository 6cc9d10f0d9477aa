#include "escrowscan/corpus.hpp"
#include "escrowscan/eval.hpp"
#include "escrowscan/features.hpp"
#include "escrowscan/fetch.hpp"
#include "escrowscan/io.hpp"
#include "escrowscan/model.hpp"
#include "escrowscan/selection.hpp"
#include "escrowscan/simmap.hpp"
#include "escrowscan/wordlists.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace escrowscan;

namespace {

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

// Flags shared by every dictionary-building subcommand.
void add_ngram_flags(CLI::App* sub, NgramConfig& ng) {
    sub->add_option("--char-min", ng.char_min, "character n-gram minimum order");
    sub->add_option("--char-max", ng.char_max, "character n-gram maximum order");
    sub->add_option("--word-min", ng.word_min, "word n-gram minimum order");
    sub->add_option("--word-max", ng.word_max, "word n-gram maximum order");
    sub->add_option("--pos-min", ng.pos_min, "part-of-speech n-gram minimum order");
    sub->add_option("--pos-max", ng.pos_max, "part-of-speech n-gram maximum order");
    sub->add_option("--tag-min", ng.tag_min, "HTML tag n-gram minimum order");
    sub->add_option("--tag-max", ng.tag_max, "HTML tag n-gram maximum order");
    sub->add_option("--uchar-min", ng.uchar_min, "URL character n-gram minimum order");
    sub->add_option("--uchar-max", ng.uchar_max, "URL character n-gram maximum order");
    sub->add_option("--utok-min", ng.utok_min, "URL token n-gram minimum order");
    sub->add_option("--utok-max", ng.utok_max, "URL token n-gram maximum order");
    sub->add_option("--min-df", ng.min_df, "minimum pages containing an n-gram candidate");
}

void add_selection_flags(CLI::App* sub, SelectionPolicy& pol) {
    sub->add_option("--top-k", pol.top_k,
                    "n-grams kept per group by information gain (0 = unlimited)");
    sub->add_option("--min-ig", pol.min_ig, "information-gain floor (active when > 0)");
}

std::vector<Category> parse_feature_set(const std::string& fs_name) {
    if (fs_name == "all")
        return {Category::BodyText, Category::Html, Category::Url, Category::Image,
                Category::Link};
    return {category_from_string(fs_name)};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fake online-escrow website classifier"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand
    app.set_config("--config", "", "key-value config file mirroring the flags");

    std::uint64_t seed = 1;
    std::string data_dir_flag;
    app.add_option("--seed", seed, "seed for every stochastic step")
        ->capture_default_str();
    app.add_option("--data-dir", data_dir_flag, "directory of the bundled word lists");

    // ---- fetch -------------------------------------------------------------
    auto* c_fetch = app.add_subcommand("fetch", "crawl one site into a corpus directory");
    std::string f_url, f_out, f_site_id, f_label = "unknown";
    FetchOptions fopt;
    c_fetch->add_option("--url", f_url, "root URL")->required();
    c_fetch->add_option("--out", f_out, "corpus root directory")->required();
    c_fetch->add_option("--site-id", f_site_id, "site id (default: host)");
    c_fetch->add_option("--label", f_label, "real|fake|unknown")->capture_default_str();
    c_fetch->add_option("--max-depth", fopt.max_depth)->capture_default_str();
    c_fetch->add_option("--max-pages", fopt.max_pages)->capture_default_str();
    c_fetch->add_option("--max-images", fopt.max_images)->capture_default_str();
    c_fetch->add_option("--politeness-ms", fopt.politeness_ms)->capture_default_str();
    c_fetch->add_option("--timeout", fopt.timeout_s)->capture_default_str();

    // ---- poll --------------------------------------------------------------
    auto* c_poll = app.add_subcommand("poll", "poll blacklist feeds for unseen URLs");
    std::vector<std::string> p_feeds;
    std::string p_seen, p_out;
    c_poll->add_option("--feed", p_feeds, "feed URL (repeatable)")->required();
    c_poll->add_option("--seen", p_seen, "persistent seen-URL store")->required();
    c_poll->add_option("--out", p_out, "write new URLs here (default stdout)");

    // ---- stats -------------------------------------------------------------
    auto* c_stats = app.add_subcommand("stats", "corpus size statistics");
    std::string st_corpus, st_out;
    bool st_tsv = false;
    c_stats->add_option("--corpus", st_corpus, "corpus root")->required();
    c_stats->add_option("--out", st_out, "output file (default stdout)");
    c_stats->add_flag("--tsv", st_tsv, "machine-readable TSV instead of the aligned table");

    // ---- extract -----------------------------------------------------------
    auto* c_extract = app.add_subcommand(
        "extract", "build candidate dictionaries and feature matrices");
    std::string e_corpus, e_out, e_features = "all";
    NgramConfig e_ngram;
    c_extract->add_option("--corpus", e_corpus, "corpus root")->required();
    c_extract->add_option("--out", e_out, "output directory")->required();
    c_extract->add_option("--features", e_features, "body|html|url|image|link|all")
        ->capture_default_str();
    add_ngram_flags(c_extract, e_ngram);

    // ---- select ------------------------------------------------------------
    auto* c_select = app.add_subcommand(
        "select", "rank an extracted matrix by information gain and freeze a dictionary");
    std::string s_matrix, s_labels, s_out;
    SelectionPolicy s_policy;
    c_select->add_option("--matrix", s_matrix, "feature matrix from extract")->required();
    c_select->add_option("--labels", s_labels, "site labels file from extract")->required();
    c_select->add_option("--out", s_out, "output directory")->required();
    add_selection_flags(c_select, s_policy);

    // ---- train -------------------------------------------------------------
    auto* c_train = app.add_subcommand("train", "train a classifier on a labeled corpus");
    std::string t_corpus, t_out;
    TrainOptions topt;
    c_train->add_option("--corpus", t_corpus, "corpus root")->required();
    c_train->add_option("--out", t_out, "model file (JSON)")->required();
    c_train->add_option("--technique", topt.technique, "svm|pca")->capture_default_str();
    c_train->add_option("--kernel", topt.kernel, "linear|composite")->capture_default_str();
    c_train->add_option("--features", topt.feature_set, "body|html|url|image|link|all")
        ->capture_default_str();
    c_train->add_option("--all-mode", topt.all_mode, "per-category|concat")
        ->capture_default_str();
    c_train->add_option("--C", topt.C, "SVM box constraint")->capture_default_str();
    c_train->add_option("--smooth", topt.smooth_eps,
                        "similarity product smoothing epsilon (0 = faithful)");
    c_train->add_flag("--include-self", topt.include_self,
                      "keep a training page when scored against its own site");
    c_train->add_flag("--score-mean-vote", topt.ensemble_score_mean,
                      "ensemble combines mean scores instead of majority votes");
    add_ngram_flags(c_train, topt.ngram);
    add_selection_flags(c_train, topt.selection);

    // ---- classify ----------------------------------------------------------
    auto* c_classify = app.add_subcommand("classify", "apply a model to a site snapshot");
    std::string cl_model, cl_site, cl_out;
    c_classify->add_option("--model", cl_model, "model file from train")->required();
    c_classify->add_option("--site", cl_site, "site directory (manifest + pages)")
        ->required();
    c_classify->add_option("--out", cl_out, "report file (default stdout)");

    // ---- evaluate ----------------------------------------------------------
    auto* c_eval = app.add_subcommand(
        "evaluate", "bootstrap cross-validation over the experiment matrix");
    std::string ev_corpus, ev_out;
    MatrixConfig mcfg;
    std::vector<std::string> ev_techniques, ev_kernels, ev_features;
    c_eval->add_option("--corpus", ev_corpus, "corpus root")->required();
    c_eval->add_option("--out", ev_out, "output directory")->required();
    c_eval->add_option("--techniques", ev_techniques, "subset of: svm pca");
    c_eval->add_option("--kernels", ev_kernels, "subset of: linear composite");
    c_eval->add_option("--features", ev_features,
                       "subset of: body html url image link all");
    c_eval->add_option("--runs", mcfg.runs)->capture_default_str();
    c_eval->add_option("--folds", mcfg.folds)->capture_default_str();
    c_eval->add_option("--n-real", mcfg.n_real, "real sites sampled per run")
        ->capture_default_str();
    c_eval->add_option("--n-fake", mcfg.n_fake, "fake sites sampled per run")
        ->capture_default_str();
    c_eval->add_option("--C", mcfg.C)->capture_default_str();
    c_eval->add_option("--alpha", mcfg.alpha)->capture_default_str();
    c_eval->add_option("--bonferroni-m", mcfg.bonferroni_m)->capture_default_str();
    c_eval->add_option("--all-mode", mcfg.all_mode)->capture_default_str();
    c_eval->add_option("--smooth", mcfg.smooth_eps);
    c_eval->add_flag("--leakage-safe", mcfg.leakage_safe,
                     "rebuild dictionaries and selection inside each training fold");
    c_eval->add_flag("--fold-by-site", mcfg.fold_by_site,
                     "assign folds to whole sites instead of pages");
    c_eval->add_flag("--include-self", mcfg.include_self);
    c_eval->add_flag("--score-mean-vote", mcfg.ensemble_score_mean);
    add_ngram_flags(c_eval, mcfg.ngram);
    add_selection_flags(c_eval, mcfg.selection);

    // ---- simmap ------------------------------------------------------------
    auto* c_simmap = app.add_subcommand(
        "simmap", "render a probe page's similarity against one site as a dot graph");
    std::string sm_corpus, sm_site, sm_probe_site, sm_probe_page, sm_out,
        sm_features = "all";
    NgramConfig sm_ngram;
    c_simmap->add_option("--corpus", sm_corpus, "corpus root")->required();
    c_simmap->add_option("--site", sm_site, "target site id")->required();
    c_simmap->add_option("--probe-site", sm_probe_site, "site the probe page belongs to")
        ->required();
    c_simmap->add_option("--probe-page", sm_probe_page, "probe page id")->required();
    c_simmap->add_option("--features", sm_features, "body|html|url|image|link|all")
        ->capture_default_str();
    c_simmap->add_option("--out", sm_out, "dot file (default stdout)");
    add_ngram_flags(c_simmap, sm_ngram);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (!data_dir_flag.empty()) set_data_dir(data_dir_flag);
        std::vector<std::string> warnings;

        if (*c_fetch) {
            fopt.site_id = f_site_id;
            fopt.label = label_from_string(f_label);
            Website site = fetch_site(f_url, fopt, warnings);
            fs::path dir = fs::path(f_out) / to_string(site.label) / site.site_id;
            save_site(site, dir);
            print_warnings(warnings);
            std::cout << "fetched " << site.site_id << ": " << site.pages.size()
                      << " pages, " << site.images.size() << " images -> " << dir.string()
                      << "\n";
        } else if (*c_poll) {
            SeenStore store(p_seen);
            std::vector<std::string> fresh = poll_blacklist(p_feeds, store, warnings);
            print_warnings(warnings);
            if (p_out.empty()) {
                for (const auto& u : fresh) std::cout << u << "\n";
            } else {
                auto os = open_output(p_out);
                for (const auto& u : fresh) os << u << "\n";
                std::cout << fresh.size() << " new URLs -> " << p_out << "\n";
            }
        } else if (*c_stats) {
            Corpus corpus = load_corpus(st_corpus);
            print_warnings(corpus.warnings);
            StatsTable table = corpus_stats(corpus);
            if (st_out.empty()) {
                if (st_tsv)
                    write_stats_rows(std::cout, table);
                else
                    write_stats_table(std::cout, table);
            } else {
                auto os = open_output(st_out);
                write_provenance(os, {"stats", seed,
                                      {{"corpus", corpus_content_hash(corpus)}}});
                if (st_tsv)
                    write_stats_rows(os, table);
                else
                    write_stats_table(os, table);
            }
        } else if (*c_extract) {
            Corpus corpus = load_corpus(e_corpus);
            print_warnings(corpus.warnings);
            ExtractionContext ctx = ExtractionContext::load_default();
            Provenance prov{"extract", seed, {{"corpus", corpus_content_hash(corpus)}}};
            std::map<SiteId, Label> labels;
            for (const auto& site : corpus.sites) labels[site.site_id] = site.label;
            fs::create_directories(e_out);
            save_labels(labels, fs::path(e_out) / "labels.tsv");
            for (Category cat : parse_feature_set(e_features)) {
                FeatureDictionary dict = build_dictionary(corpus, cat, e_ngram, ctx);
                std::vector<FeatureVector> rows = extract_matrix(corpus, dict, ctx);
                std::vector<SiteId> row_sites;
                for (const auto& site : corpus.sites)
                    row_sites.insert(row_sites.end(), site.pages.size(), site.site_id);
                std::string stem = to_string(cat);
                save_dictionary(dict, fs::path(e_out) / (stem + ".dict"), prov);
                save_feature_matrix(fs::path(e_out) / (stem + ".matrix"), dict, rows,
                                    row_sites, prov);
                std::cout << stem << ": " << dict.size() << " features x " << rows.size()
                          << " pages\n";
            }
        } else if (*c_select) {
            LoadedMatrix m = load_feature_matrix(s_matrix);
            std::map<SiteId, Label> site_labels = load_labels(s_labels);
            std::vector<Label> row_labels;
            for (const auto& sid : m.row_sites) {
                auto it = site_labels.find(sid);
                if (it == site_labels.end())
                    throw std::runtime_error("site " + sid + " missing from " + s_labels);
                row_labels.push_back(it->second);
            }
            auto [dict, report] = select_features(m.dict, m.rows, row_labels, s_policy);
            Provenance prov{"select", seed,
                            {{"matrix", file_content_hash(s_matrix)},
                             {"labels", file_content_hash(s_labels)}}};
            fs::create_directories(s_out);
            std::string stem = to_string(m.dict.category());
            save_dictionary(dict, fs::path(s_out) / (stem + ".selected.dict"), prov);
            save_selection_report(report, fs::path(s_out) / (stem + ".selection.tsv"),
                                  prov);
            std::cout << stem << ": kept " << dict.size() << " of " << m.dict.size()
                      << " features\n";
        } else if (*c_train) {
            Corpus corpus = load_corpus(t_corpus);
            print_warnings(corpus.warnings);
            ExtractionContext ctx = ExtractionContext::load_default();
            topt.seed = seed;
            TrainedModel model = train_model(corpus, topt, ctx, &warnings);
            print_warnings(warnings);
            save_model(model, t_out);
            std::cout << "trained " << topt.technique << "+" << topt.kernel << "/"
                      << topt.feature_set << " on " << model.columns.size()
                      << " sites -> " << t_out << "\n";
        } else if (*c_classify) {
            TrainedModel model = load_model(cl_model);
            ExtractionContext ctx = ExtractionContext::load_default();
            Website site = load_site(cl_site, Label::Unknown, warnings);
            print_warnings(warnings);
            SiteVerdict v = classify_site(model, site, ctx);
            auto report = [&](std::ostream& os) {
                os << "site\t" << v.site << "\n";
                os << "verdict\t" << to_string(v.verdict) << "\n";
                os << "fake_pages\t" << v.fake_pages << "/" << v.total_pages << "\n";
                for (const auto& p : v.pages)
                    os << "page\t" << p.page << "\t" << to_string(p.label) << "\t"
                       << p.score << "\n";
            };
            if (cl_out.empty()) {
                report(std::cout);
            } else {
                auto os = open_output(cl_out);
                write_provenance(os, {"classify", seed,
                                      {{"model", file_content_hash(cl_model)},
                                       {"site", site_content_hash(site)}}});
                report(os);
                std::cout << v.site << ": " << to_string(v.verdict) << " ("
                          << v.fake_pages << "/" << v.total_pages << " pages fake)\n";
            }
        } else if (*c_eval) {
            Corpus corpus = load_corpus(ev_corpus);
            print_warnings(corpus.warnings);
            if (!ev_techniques.empty()) mcfg.techniques = ev_techniques;
            if (!ev_kernels.empty()) mcfg.kernels = ev_kernels;
            if (!ev_features.empty()) mcfg.feature_sets = ev_features;
            mcfg.seed = seed;
            MatrixResult result = run_experiment_matrix(corpus, mcfg);
            print_warnings(result.warnings);
            Provenance prov{"evaluate", seed, {{"corpus", corpus_content_hash(corpus)}}};
            fs::create_directories(ev_out);
            {
                auto os = open_output(fs::path(ev_out) / "results.tsv");
                write_result_rows(os, result, prov);
            }
            {
                auto os = open_output(fs::path(ev_out) / "summary.txt");
                write_matrix_summary(os, result);
            }
            {
                auto os = open_output(fs::path(ev_out) / "significance.tsv");
                write_significance_report(os, result, prov);
            }
            write_matrix_summary(std::cout, result);
        } else if (*c_simmap) {
            Corpus corpus = load_corpus(sm_corpus);
            print_warnings(corpus.warnings);
            ExtractionContext ctx = ExtractionContext::load_default();
            const Website* target = corpus.find_site(sm_site);
            if (!target) throw std::runtime_error("site " + sm_site + " not in corpus");
            const Website* probe_site = corpus.find_site(sm_probe_site);
            if (!probe_site)
                throw std::runtime_error("site " + sm_probe_site + " not in corpus");
            const WebPage* probe = probe_site->find_page(sm_probe_page);
            if (!probe)
                throw std::runtime_error("page " + sm_probe_page + " not in site " +
                                         sm_probe_site);
            std::vector<FeatureDictionary> dicts;
            for (Category cat : parse_feature_set(sm_features))
                dicts.push_back(build_dictionary(corpus, cat, sm_ngram, ctx));
            SimilarityMap map = build_similarity_map(*probe, *probe_site, *target, dicts, ctx);
            std::string dot = render_dot(map);
            if (sm_out.empty()) {
                std::cout << dot;
            } else {
                auto os = open_output(sm_out);
                os << "// escrowscan " << kToolVersion << " simmap seed=" << seed << "\n";
                os << dot;
                std::cout << "similarity map -> " << sm_out << "\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
