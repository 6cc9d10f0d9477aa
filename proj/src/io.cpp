#include "escrowscan/io.hpp"

#include "escrowscan/hash.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace escrowscan {

namespace {

using nlohmann::json;

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Shortest exact decimal representation; reloading reproduces the bits.
std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    double back = std::strtod(buf, nullptr);
    if (back != v) std::snprintf(buf, sizeof buf, "%.20g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    return is;
}

// Reads "# key: value" header lines (after the provenance block) into a map
// and leaves the stream at the first non-comment line.
std::map<std::string, std::string> read_header(std::istream& is) {
    std::map<std::string, std::string> kv;
    while (is.peek() == '#') {
        std::string line;
        std::getline(is, line);
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string key = line.substr(1, colon - 1);
        std::string val = line.substr(colon + 1);
        auto trim = [](std::string& s) {
            s.erase(0, s.find_first_not_of(" \t"));
            auto e = s.find_last_not_of(" \t\r");
            s.erase(e == std::string::npos ? 0 : e + 1);
        };
        trim(key);
        trim(val);
        kv[key] = val;
    }
    return kv;
}

const std::string& require(const std::map<std::string, std::string>& kv,
                           const std::string& key, const std::filesystem::path& path) {
    auto it = kv.find(key);
    if (it == kv.end())
        throw std::runtime_error(path.string() + ": missing header field '" + key + "'");
    return it->second;
}

NgramConfig ngram_from_header(const std::map<std::string, std::string>& kv,
                              const std::filesystem::path& path) {
    NgramConfig c;
    auto range = [&](const std::string& key, int& lo, int& hi) {
        std::istringstream is(require(kv, key, path));
        if (!(is >> lo >> hi))
            throw std::runtime_error(path.string() + ": bad range in '" + key + "'");
    };
    range("ngram char", c.char_min, c.char_max);
    range("ngram word", c.word_min, c.word_max);
    range("ngram pos", c.pos_min, c.pos_max);
    range("ngram tag", c.tag_min, c.tag_max);
    range("ngram uchar", c.uchar_min, c.uchar_max);
    range("ngram utok", c.utok_min, c.utok_max);
    c.min_df = std::stoul(require(kv, "min-df", path));
    return c;
}

void write_ngram_header(std::ostream& os, const NgramConfig& c) {
    os << "# ngram char: " << c.char_min << ' ' << c.char_max << '\n'
       << "# ngram word: " << c.word_min << ' ' << c.word_max << '\n'
       << "# ngram pos: " << c.pos_min << ' ' << c.pos_max << '\n'
       << "# ngram tag: " << c.tag_min << ' ' << c.tag_max << '\n'
       << "# ngram uchar: " << c.uchar_min << ' ' << c.uchar_max << '\n'
       << "# ngram utok: " << c.utok_min << ' ' << c.utok_max << '\n'
       << "# min-df: " << c.min_df << '\n';
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r')
        out.back().pop_back();
    return out;
}

// ---- JSON helpers for model members ----------------------------------------

json to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    Eigen::MatrixXd m(j.size(), j.empty() ? 0 : j[0].size());
    for (std::size_t r = 0; r < j.size(); ++r) {
        if (j[r].size() != static_cast<std::size_t>(m.cols()))
            throw std::runtime_error("ragged matrix in model file");
        for (std::size_t c = 0; c < j[r].size(); ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

json to_json(const FeatureVector& v) {
    json items = json::array();
    for (const auto& [idx, val] : v.items) items.push_back(json::array({idx, val}));
    return json{{"page", v.page_id},
                {"category", to_string(v.category)},
                {"dim", v.dim},
                {"items", std::move(items)}};
}

FeatureVector feature_vector_from_json(const json& j) {
    FeatureVector v;
    v.page_id = j.at("page").get<std::string>();
    v.category = category_from_string(j.at("category").get<std::string>());
    v.dim = j.at("dim").get<std::size_t>();
    for (const auto& it : j.at("items"))
        v.items.emplace_back(it.at(0).get<int>(), it.at(1).get<double>());
    return v;
}

json to_json(const SvmModel& m) {
    return json{{"alpha", m.alpha},
                {"sign", m.sign},
                {"bias", m.bias},
                {"C", m.C},
                {"kernel_spec", m.kernel_spec},
                {"degenerate", m.degenerate},
                {"degenerate_sign", m.degenerate_sign},
                {"dual_objective", m.dual_objective},
                {"iterations", m.iterations}};
}

SvmModel svm_from_json(const json& j) {
    SvmModel m;
    m.alpha = j.at("alpha").get<std::vector<double>>();
    m.sign = j.at("sign").get<std::vector<int>>();
    m.bias = j.at("bias").get<double>();
    m.C = j.at("C").get<double>();
    m.kernel_spec = j.at("kernel_spec").get<std::string>();
    m.degenerate = j.at("degenerate").get<bool>();
    m.degenerate_sign = j.at("degenerate_sign").get<int>();
    m.dual_objective = j.at("dual_objective").get<double>();
    m.iterations = j.at("iterations").get<std::size_t>();
    return m;
}

json to_json(const PcaModel& m) {
    return json{{"kernel_mode", m.kernel_mode},
                {"retention_fallback", m.retention_fallback},
                {"eigenvalues", m.eigenvalues},
                {"train_proj", to_json(m.train_proj)},
                {"train_labels", m.train_labels},
                {"kept_columns", m.kept_columns},
                {"dropped_columns", m.dropped_columns},
                {"mean", m.mean},
                {"scale", m.scale},
                {"components", to_json(m.components)},
                {"zero_proj", m.zero_proj},
                {"alphas", to_json(m.alphas)},
                {"row_means", m.row_means},
                {"grand_mean", m.grand_mean}};
}

PcaModel pca_from_json(const json& j) {
    PcaModel m;
    m.kernel_mode = j.at("kernel_mode").get<bool>();
    m.retention_fallback = j.at("retention_fallback").get<bool>();
    m.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    m.train_proj = matrix_from_json(j.at("train_proj"));
    m.train_labels = j.at("train_labels").get<std::vector<int>>();
    m.kept_columns = j.at("kept_columns").get<std::vector<int>>();
    m.dropped_columns = j.at("dropped_columns").get<std::vector<int>>();
    m.mean = j.at("mean").get<std::vector<double>>();
    m.scale = j.at("scale").get<std::vector<double>>();
    m.components = matrix_from_json(j.at("components"));
    m.zero_proj = j.at("zero_proj").get<std::vector<double>>();
    m.alphas = matrix_from_json(j.at("alphas"));
    m.row_means = j.at("row_means").get<std::vector<double>>();
    m.grand_mean = j.at("grand_mean").get<double>();
    return m;
}

json dict_to_json(const FeatureDictionary& d) {
    const NgramConfig& c = d.config();
    return json{{"category", to_string(d.category())},
                {"config",
                 {{"char", {c.char_min, c.char_max}},
                  {"word", {c.word_min, c.word_max}},
                  {"pos", {c.pos_min, c.pos_max}},
                  {"tag", {c.tag_min, c.tag_max}},
                  {"uchar", {c.uchar_min, c.uchar_max}},
                  {"utok", {c.utok_min, c.utok_max}},
                  {"min_df", c.min_df}}},
                {"hash", hex64(d.content_hash())},
                {"entries", d.entries()}};
}

FeatureDictionary dict_from_json(const json& j, const std::filesystem::path& path) {
    NgramConfig c;
    const json& cfg = j.at("config");
    auto range = [&cfg](const char* key, int& lo, int& hi) {
        lo = cfg.at(key).at(0).get<int>();
        hi = cfg.at(key).at(1).get<int>();
    };
    range("char", c.char_min, c.char_max);
    range("word", c.word_min, c.word_max);
    range("pos", c.pos_min, c.pos_max);
    range("tag", c.tag_min, c.tag_max);
    range("uchar", c.uchar_min, c.uchar_max);
    range("utok", c.utok_min, c.utok_max);
    c.min_df = cfg.at("min_df").get<std::size_t>();
    FeatureDictionary d(category_from_string(j.at("category").get<std::string>()),
                        j.at("entries").get<std::vector<std::string>>(), c);
    if (hex64(d.content_hash()) != j.at("hash").get<std::string>())
        throw std::runtime_error(path.string() +
                                 ": dictionary content hash mismatch; refusing to load");
    return d;
}

} // namespace

void write_provenance(std::ostream& os, const Provenance& prov) {
    os << "# escrowscan " << kToolVersion << ' ' << prov.kind << '\n';
    os << "# seed: " << prov.seed << '\n';
    for (const auto& [name, hash] : prov.input_hashes)
        os << "# input " << name << ": " << hex64(hash) << '\n';
}

std::uint64_t site_content_hash(const Website& site) {
    std::uint64_t h = fnv1a(site.site_id);
    h = fnv1a(to_string(site.label), h);
    h = fnv1a(site.root_url, h);
    h = fnv1a(site.root_page_id, h);
    for (const WebPage& p : site.pages) {
        h = fnv1a(p.page_id, h);
        h = fnv1a(p.url, h);
        h = fnv1a(p.html_source, h);
    }
    for (const ImageAsset& img : site.images) {
        h = fnv1a(img.image_id, h);
        h = fnv1a(std::string_view(reinterpret_cast<const char*>(img.raw_bytes.data()),
                                   img.raw_bytes.size()),
                  h);
    }
    for (const auto& [from, to] : site.link_edges) {
        h = fnv1a(from, h);
        h = fnv1a(to, h);
    }
    return h;
}

std::uint64_t corpus_content_hash(const Corpus& corpus) {
    std::uint64_t h = fnv1a("corpus");
    for (const Website& s : corpus.sites) h = fnv1a(hex64(site_content_hash(s)), h);
    return h;
}

std::uint64_t file_content_hash(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[1 << 16];
    while (is.read(buf, sizeof buf) || is.gcount() > 0)
        h = fnv1a(std::string_view(buf, static_cast<std::size_t>(is.gcount())), h);
    return h;
}

void save_dictionary(const FeatureDictionary& dict, const std::filesystem::path& path,
                     const Provenance& prov) {
    auto os = open_out(path);
    Provenance p = prov;
    p.kind = "dictionary";
    write_provenance(os, p);
    os << "# category: " << to_string(dict.category()) << '\n';
    write_ngram_header(os, dict.config());
    os << "# entries: " << dict.size() << '\n';
    os << "# content-hash: " << hex64(dict.content_hash()) << '\n';
    for (const auto& e : dict.entries()) os << e << '\n';
}

FeatureDictionary load_dictionary(const std::filesystem::path& path) {
    auto is = open_in(path);
    auto kv = read_header(is);
    Category cat = category_from_string(require(kv, "category", path));
    NgramConfig cfg = ngram_from_header(kv, path);
    std::size_t count = std::stoul(require(kv, "entries", path));
    std::vector<std::string> entries;
    entries.reserve(count);
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        entries.push_back(line);
    }
    if (entries.size() != count)
        throw std::runtime_error(path.string() + ": expected " + std::to_string(count) +
                                 " entries, found " + std::to_string(entries.size()));
    FeatureDictionary dict(cat, std::move(entries), cfg);
    if (hex64(dict.content_hash()) != require(kv, "content-hash", path))
        throw std::runtime_error(path.string() +
                                 ": dictionary content hash mismatch; refusing to load");
    return dict;
}

void save_feature_matrix(const std::filesystem::path& path, const FeatureDictionary& dict,
                         const std::vector<FeatureVector>& rows,
                         const std::vector<SiteId>& row_sites, const Provenance& prov) {
    if (rows.size() != row_sites.size())
        throw std::invalid_argument("save_feature_matrix: rows/sites length mismatch");
    auto os = open_out(path);
    Provenance p = prov;
    p.kind = "feature-matrix";
    write_provenance(os, p);
    os << "# category: " << to_string(dict.category()) << '\n';
    write_ngram_header(os, dict.config());
    os << "# dict-hash: " << hex64(dict.content_hash()) << '\n';
    os << "site_id\tpage_id";
    for (const auto& e : dict.entries()) os << '\t' << e;
    os << '\n';
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].dim != dict.size())
            throw std::invalid_argument("save_feature_matrix: row dimension mismatch");
        os << row_sites[r] << '\t' << rows[r].page_id;
        std::vector<double> dense = rows[r].to_dense();
        for (double v : dense) os << '\t' << fmt_double(v);
        os << '\n';
    }
}

LoadedMatrix load_feature_matrix(const std::filesystem::path& path) {
    auto is = open_in(path);
    auto kv = read_header(is);
    Category cat = category_from_string(require(kv, "category", path));
    NgramConfig cfg = ngram_from_header(kv, path);

    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error(path.string() + ": missing feature-name header row");
    std::vector<std::string> head = split_tabs(line);
    if (head.size() < 2 || head[0] != "site_id" || head[1] != "page_id")
        throw std::runtime_error(path.string() + ": malformed feature-name header row");
    std::vector<std::string> names(head.begin() + 2, head.end());

    LoadedMatrix out;
    out.dict = FeatureDictionary(cat, names, cfg);
    if (auto it = kv.find("dict-hash");
        it != kv.end() && it->second != hex64(out.dict.content_hash()))
        throw std::runtime_error(path.string() +
                                 ": dictionary content hash mismatch; refusing to load");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells = split_tabs(line);
        if (cells.size() != names.size() + 2)
            throw std::runtime_error(path.string() + ": row with " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(names.size() + 2));
        out.row_sites.push_back(cells[0]);
        std::vector<double> dense(names.size());
        for (std::size_t i = 0; i < names.size(); ++i)
            dense[i] = std::strtod(cells[i + 2].c_str(), nullptr);
        out.rows.push_back(FeatureVector::from_dense(cells[1], cat, dense));
    }
    return out;
}

void save_labels(const std::map<SiteId, Label>& labels, const std::filesystem::path& path) {
    auto os = open_out(path);
    for (const auto& [id, label] : labels) os << id << '\t' << to_string(label) << '\n';
}

std::map<SiteId, Label> load_labels(const std::filesystem::path& path) {
    auto is = open_in(path);
    std::map<SiteId, Label> out;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        auto cells = split_tabs(line);
        if (cells.size() != 2)
            throw std::runtime_error(path.string() + ": labels rows are '<site>\\t<label>'");
        out[cells[0]] = label_from_string(cells[1]);
    }
    return out;
}

void save_selection_report(const SelectionReport& report, const std::filesystem::path& path,
                           const Provenance& prov) {
    auto os = open_out(path);
    Provenance p = prov;
    p.kind = "selection-report";
    write_provenance(os, p);
    os << "# category: " << to_string(report.category) << '\n';
    os << "# policy: " << report.cutoff << '\n';
    os << "# fixed-slots: " << report.fixed_slots << '\n';
    os << "# kept-ngrams: " << report.kept_ngrams << '\n';
    os << "feature\tinformation_gain\tdocument_frequency\n";
    for (const auto& r : report.ranked)
        os << r.name << '\t' << fmt_double(r.ig) << '\t' << r.document_frequency << '\n';
}

void save_gram(const GramMatrix& gram, const std::string& kernel_spec,
               const std::filesystem::path& path, const Provenance& prov) {
    auto os = open_out(path);
    Provenance p = prov;
    p.kind = "gram-matrix";
    write_provenance(os, p);
    os << "# kernel: " << kernel_spec << '\n';
    os << "# n: " << gram.n << '\n';
    os << "ids";
    for (const auto& id : gram.ids) os << '\t' << id;
    os << '\n';
    for (std::size_t i = 0; i < gram.n; ++i) {
        for (std::size_t j = 0; j < gram.n; ++j)
            os << (j ? "\t" : "") << fmt_double(gram.at(i, j));
        os << '\n';
    }
}

GramMatrix load_gram(const std::filesystem::path& path) {
    auto is = open_in(path);
    auto kv = read_header(is);
    GramMatrix g;
    g.n = std::stoul(require(kv, "n", path));
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error(path.string() + ": missing id row");
    auto head = split_tabs(line);
    if (head.empty() || head[0] != "ids" || head.size() != g.n + 1)
        throw std::runtime_error(path.string() + ": malformed id row");
    g.ids.assign(head.begin() + 1, head.end());
    g.data.reserve(g.n * g.n);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        for (const auto& cell : split_tabs(line))
            g.data.push_back(std::strtod(cell.c_str(), nullptr));
    }
    if (g.data.size() != g.n * g.n)
        throw std::runtime_error(path.string() + ": expected " +
                                 std::to_string(g.n * g.n) + " cells, found " +
                                 std::to_string(g.data.size()));
    return g;
}

void save_similarity_vectors(const std::vector<SiteSimilarityVector>& xs,
                             const std::vector<SiteColumn>& columns,
                             const std::vector<Category>& categories,
                             const std::filesystem::path& path, const Provenance& prov) {
    auto os = open_out(path);
    Provenance p = prov;
    p.kind = "similarity-vectors";
    write_provenance(os, p);
    os << "# sites:";
    for (const auto& c : columns) os << ' ' << c.site_id;
    os << '\n' << "# categories:";
    for (Category c : categories) os << ' ' << to_string(c);
    os << '\n';
    os << "page_id";
    for (const auto& col : columns)
        for (Category c : categories)
            os << '\t' << col.site_id << ':' << to_string(c) << ":ave"
               << '\t' << col.site_id << ':' << to_string(c) << ":max";
    os << '\n';
    for (const auto& x : xs) {
        os << x.page_id;
        for (double v : x.entries) os << '\t' << fmt_double(v);
        os << '\n';
    }
}

void save_model(const TrainedModel& m, const std::filesystem::path& path) {
    json j;
    j["tool"] = "escrowscan";
    j["version"] = kToolVersion;
    j["kind"] = "model";
    j["technique"] = m.technique;
    j["kernel"] = m.kernel;
    j["feature_set"] = m.feature_set;
    j["all_mode"] = m.all_mode;
    j["C"] = m.C;
    j["smooth_eps"] = m.smooth_eps;
    j["include_self"] = m.include_self;
    j["ensemble_score_mean"] = m.ensemble_score_mean;
    j["seed"] = m.seed;

    json cats = json::array();
    for (Category c : m.categories) cats.push_back(to_string(c));
    j["categories"] = std::move(cats);

    json dicts = json::array();
    for (const auto& d : m.dicts) dicts.push_back(dict_to_json(d));
    j["dicts"] = std::move(dicts);

    j["train_page_ids"] = m.train_page_ids;
    json attrs = json::array();
    for (const auto& a : m.train_attrs)
        attrs.push_back(json::array({a.page_level, a.in_link_count, a.out_link_count}));
    j["train_attrs"] = std::move(attrs);

    json feats = json::array();
    for (const auto& cat_rows : m.train_features) {
        json rows = json::array();
        for (const auto& r : cat_rows) rows.push_back(to_json(r));
        feats.push_back(std::move(rows));
    }
    j["train_features"] = std::move(feats);

    json cols = json::array();
    for (const auto& c : m.columns)
        cols.push_back(json{{"site", c.site_id}, {"pages", c.page_indices}});
    j["columns"] = std::move(cols);

    j["train_labels"] = m.train_labels;

    json xs = json::array();
    for (const auto& x : m.train_xs)
        xs.push_back(json{{"page", x.page_id}, {"entries", x.entries}});
    j["train_xs"] = std::move(xs);

    json svms = json::array();
    for (const auto& s : m.svm_members) svms.push_back(to_json(s));
    j["svm_members"] = std::move(svms);
    json pcas = json::array();
    for (const auto& p : m.pca_members) pcas.push_back(to_json(p));
    j["pca_members"] = std::move(pcas);

    auto os = open_out(path);
    os << j.dump(1, '\t') << '\n';
}

TrainedModel load_model(const std::filesystem::path& path) {
    auto is = open_in(path);
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(path.string() + ": not a valid model file: " + e.what());
    }
    if (j.value("kind", "") != "model")
        throw std::runtime_error(path.string() + ": not an escrowscan model file");

    TrainedModel m;
    m.technique = j.at("technique").get<std::string>();
    m.kernel = j.at("kernel").get<std::string>();
    m.feature_set = j.at("feature_set").get<std::string>();
    m.all_mode = j.at("all_mode").get<std::string>();
    m.C = j.at("C").get<double>();
    m.smooth_eps = j.at("smooth_eps").get<double>();
    m.include_self = j.at("include_self").get<bool>();
    m.ensemble_score_mean = j.at("ensemble_score_mean").get<bool>();
    m.seed = j.at("seed").get<std::uint64_t>();

    for (const auto& c : j.at("categories"))
        m.categories.push_back(category_from_string(c.get<std::string>()));
    for (const auto& d : j.at("dicts")) m.dicts.push_back(dict_from_json(d, path));
    if (m.dicts.size() != m.categories.size())
        throw std::runtime_error(path.string() + ": dictionary/category count mismatch");

    m.train_page_ids = j.at("train_page_ids").get<std::vector<PageId>>();
    for (const auto& a : j.at("train_attrs")) {
        PageAttributes pa;
        pa.page_level = a.at(0).get<int>();
        pa.in_link_count = a.at(1).get<int>();
        pa.out_link_count = a.at(2).get<int>();
        m.train_attrs.push_back(pa);
    }
    for (const auto& cat_rows : j.at("train_features")) {
        std::vector<FeatureVector> rows;
        for (const auto& r : cat_rows) rows.push_back(feature_vector_from_json(r));
        m.train_features.push_back(std::move(rows));
    }
    for (const auto& c : j.at("columns")) {
        SiteColumn col;
        col.site_id = c.at("site").get<std::string>();
        col.page_indices = c.at("pages").get<std::vector<std::size_t>>();
        m.columns.push_back(std::move(col));
    }
    m.train_labels = j.at("train_labels").get<std::vector<int>>();
    for (const auto& x : j.at("train_xs")) {
        SiteSimilarityVector sv;
        sv.page_id = x.at("page").get<std::string>();
        sv.entries = x.at("entries").get<std::vector<double>>();
        m.train_xs.push_back(std::move(sv));
    }
    for (const auto& s : j.at("svm_members")) m.svm_members.push_back(svm_from_json(s));
    for (const auto& p : j.at("pca_members")) m.pca_members.push_back(pca_from_json(p));
    return m;
}

void write_result_rows(std::ostream& os, const MatrixResult& result, const Provenance& prov) {
    Provenance p = prov;
    p.kind = "result-table";
    write_provenance(os, p);
    os << "technique\tkernel\tfeature_set\trun\tsite_accuracy\n";
    for (const auto& cell : result.cells)
        for (std::size_t r = 0; r < cell.run_accuracies.size(); ++r)
            os << cell.spec.technique << '\t' << cell.spec.kernel << '\t'
               << cell.spec.feature_set << '\t' << r << '\t'
               << fmt_double(cell.run_accuracies[r]) << '\n';
}

void write_matrix_summary(std::ostream& os, const MatrixResult& result) {
    const MatrixConfig& cfg = result.config;
    os << "Average site-level accuracy (%) across " << cfg.runs << " bootstrap runs\n";
    os << std::left << std::setw(18) << "condition";
    for (const auto& f : cfg.feature_sets) os << std::right << std::setw(9) << f;
    os << '\n';
    for (const auto& t : cfg.techniques)
        for (const auto& k : cfg.kernels) {
            os << std::left << std::setw(18) << (t + "+" + k);
            for (const auto& f : cfg.feature_sets) {
                const CellResult* cell = nullptr;
                for (const auto& c : result.cells)
                    if (c.spec.technique == t && c.spec.kernel == k && c.spec.feature_set == f)
                        cell = &c;
                if (!cell || std::isnan(cell->mean)) {
                    os << std::right << std::setw(9) << "n/a";
                } else {
                    char buf[16];
                    std::snprintf(buf, sizeof buf, "%.2f", cell->mean * 100.0);
                    os << std::right << std::setw(9) << buf;
                }
            }
            os << '\n';
        }
    bool any_errors = false;
    for (const auto& c : result.cells) any_errors |= !c.errors.empty();
    if (any_errors) {
        os << "\nerrors:\n";
        for (const auto& c : result.cells)
            for (const auto& e : c.errors) os << "  " << c.spec.name() << ": " << e << '\n';
    }
    if (!result.warnings.empty()) {
        os << "\nwarnings:\n";
        for (const auto& w : result.warnings) os << "  " << w << '\n';
    }
}

void write_significance_report(std::ostream& os, const MatrixResult& result,
                               const Provenance& prov) {
    Provenance p = prov;
    p.kind = "significance-report";
    write_provenance(os, p);
    os << "# alpha: " << fmt_double(result.config.alpha) << '\n';
    os << "# comparisons m: " << result.config.bonferroni_m << '\n';
    os << "hypothesis\tcell_a\tcell_b\tmean_a\tmean_b\tt\tp\tthreshold\tsignificant\n";
    for (const auto& c : result.comparisons)
        os << c.hypothesis << '\t' << c.cell_a << '\t' << c.cell_b << '\t'
           << fmt_double(c.mean_a) << '\t' << fmt_double(c.mean_b) << '\t'
           << fmt_double(c.t) << '\t' << fmt_double(c.p) << '\t'
           << fmt_double(c.threshold) << '\t' << (c.significant ? "yes" : "no") << '\n';
}

void write_stats_table(std::ostream& os, const StatsTable& table) {
    os << std::left << std::setw(10) << "label" << std::right << std::setw(8) << "sites"
       << std::setw(10) << "pages" << std::setw(12) << "pages/site" << std::setw(10)
       << "images" << std::setw(13) << "images/site" << '\n';
    for (const auto& r : table.rows) {
        char ps[16], is_[16];
        std::snprintf(ps, sizeof ps, "%.2f", r.pages_per_site);
        std::snprintf(is_, sizeof is_, "%.2f", r.images_per_site);
        os << std::left << std::setw(10) << r.label << std::right << std::setw(8) << r.sites
           << std::setw(10) << r.pages << std::setw(12) << ps << std::setw(10) << r.images
           << std::setw(13) << is_ << '\n';
    }
}

void write_stats_rows(std::ostream& os, const StatsTable& table) {
    os << "label\tsites\tpages\tpages_per_site\timages\timages_per_site\n";
    for (const auto& r : table.rows) {
        char ps[16], is_[16];
        std::snprintf(ps, sizeof ps, "%.2f", r.pages_per_site);
        std::snprintf(is_, sizeof is_, "%.2f", r.images_per_site);
        os << r.label << '\t' << r.sites << '\t' << r.pages << '\t' << ps << '\t'
           << r.images << '\t' << is_ << '\n';
    }
}

} // namespace escrowscan
