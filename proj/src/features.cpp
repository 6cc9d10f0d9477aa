#include "escrowscan/features.hpp"

#include "escrowscan/hash.hpp"
#include "escrowscan/html.hpp"
#include "escrowscan/url.hpp"
#include "escrowscan/wordlists.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace escrowscan {

namespace {

std::string lower_copy(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool printable_ascii(char c) {
    return static_cast<unsigned char>(c) > 0x20 && static_cast<unsigned char>(c) < 0x7f;
}

} // namespace

std::string NgramConfig::describe() const {
    std::ostringstream os;
    os << "char=" << char_min << "-" << char_max << " word=" << word_min << "-" << word_max
       << " pos=" << pos_min << "-" << pos_max << " tag=" << tag_min << "-" << tag_max
       << " uchar=" << uchar_min << "-" << uchar_max << " utok=" << utok_min << "-"
       << utok_max << " min_df=" << min_df;
    return os.str();
}

FeatureDictionary::FeatureDictionary(Category cat, std::vector<std::string> entries,
                                     NgramConfig config)
    : category_(cat), entries_(std::move(entries)), config_(config) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!index_.emplace(entries_[i], static_cast<int>(i)).second)
            throw std::invalid_argument("duplicate dictionary entry: " + entries_[i]);
    }
}

int FeatureDictionary::index_of(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

std::uint64_t FeatureDictionary::content_hash() const {
    std::uint64_t h = fnv1a(to_string(category_));
    h = fnv1a("\n", h);
    h = fnv1a(config_.describe(), h);
    for (const auto& e : entries_) {
        h = fnv1a("\n", h);
        h = fnv1a(e, h);
    }
    return h;
}

std::string FeatureDictionary::group_of(const std::string& entry) {
    auto colon = entry.find(':');
    return colon == std::string::npos ? entry : entry.substr(0, colon);
}

bool FeatureDictionary::is_fixed_group(const std::string& group) {
    static const std::set<std::string> kFixed = {
        "lex", "wlen", "rich", "punct", "fw", "struct",          // body text
        "pix", "imgext", "imgw", "imgh", "imgsz", "agg",         // image
        "link", "lstruct"};                                      // link
    return kFixed.count(group) != 0;
}

double FeatureVector::at(int index) const {
    auto it = std::lower_bound(items.begin(), items.end(), index,
                               [](const auto& p, int k) { return p.first < k; });
    return (it != items.end() && it->first == index) ? it->second : 0.0;
}

std::vector<double> FeatureVector::to_dense() const {
    std::vector<double> v(dim, 0.0);
    for (const auto& [i, x] : items) v[static_cast<std::size_t>(i)] = x;
    return v;
}

FeatureVector FeatureVector::from_dense(PageId id, Category cat,
                                        const std::vector<double>& v) {
    FeatureVector f;
    f.page_id = std::move(id);
    f.category = cat;
    f.dim = v.size();
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] != 0.0) f.items.emplace_back(static_cast<int>(i), v[i]);
    return f;
}

bool ExtractionContext::is_english_word(const std::string& w) const {
    return std::binary_search(english_words.begin(), english_words.end(), w);
}

ExtractionContext ExtractionContext::load_default() {
    ExtractionContext ctx;
    ctx.function_words = load_function_words();
    ctx.punct_chars = load_punctuation_chars();
    ctx.structure_names = load_structure_names();
    ctx.english_words = load_english_words();
    std::sort(ctx.english_words.begin(), ctx.english_words.end());
    ctx.tagger = std::make_shared<LexiconSuffixTagger>();
    return ctx;
}

// ---------------------------------------------------------------------------
// n-gram collectors. Sequence n-grams join elements with '>' so multi-token
// grams stay unambiguous in dictionary files.

namespace {

constexpr char kGramSep = '>';

template <typename Fn>
void for_each_char_ngram(std::string_view text, int nmin, int nmax, Fn&& fn) {
    std::string low = lower_copy(text);
    auto ok = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    };
    for (int n = nmin; n <= nmax; ++n) {
        if (n < 1 || low.size() < static_cast<std::size_t>(n)) continue;
        for (std::size_t i = 0; i + n <= low.size(); ++i) {
            bool valid = true;
            for (int k = 0; k < n; ++k)
                if (!ok(low[i + k])) { valid = false; break; }
            if (valid) fn(std::string_view(low).substr(i, n));
        }
    }
}

template <typename Fn>
void for_each_seq_ngram(const std::vector<std::string>& seq, int nmin, int nmax, Fn&& fn) {
    for (int n = nmin; n <= nmax; ++n) {
        if (n < 1 || seq.size() < static_cast<std::size_t>(n)) continue;
        for (std::size_t i = 0; i + n <= seq.size(); ++i) {
            std::string gram = seq[i];
            for (int k = 1; k < n; ++k) {
                gram.push_back(kGramSep);
                gram.append(seq[i + k]);
            }
            fn(gram);
        }
    }
}

template <typename Fn>
void for_each_url_char_ngram(std::string_view url, int nmin, int nmax, Fn&& fn) {
    std::string low = lower_copy(url);
    for (int n = nmin; n <= nmax; ++n) {
        if (n < 1 || low.size() < static_cast<std::size_t>(n)) continue;
        for (std::size_t i = 0; i + n <= low.size(); ++i) {
            bool valid = true;
            for (int k = 0; k < n; ++k)
                if (!printable_ascii(low[i + k])) { valid = false; break; }
            if (valid) fn(std::string_view(low).substr(i, n));
        }
    }
}

std::vector<std::string> url_tokens(std::string_view url) {
    std::string low = lower_copy(url);
    const std::string_view seps = "/.-_?=&";
    std::vector<std::string> toks;
    std::string cur;
    for (char c : low) {
        if (seps.find(c) != std::string_view::npos) {
            if (!cur.empty()) toks.push_back(std::move(cur)), cur.clear();
        } else if (printable_ascii(c)) {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) toks.push_back(std::move(cur));
    return toks;
}

bool valid_tag_name(const std::string& t) {
    if (t.empty() || !(t[0] >= 'a' && t[0] <= 'z')) return false;
    for (char c : t)
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return false;
    return true;
}

std::vector<std::string> misspelled_tokens(const std::vector<std::string>& tokens,
                                           const ExtractionContext& ctx) {
    std::vector<std::string> out;
    for (const auto& t : tokens)
        if (t.size() >= 4 && !ctx.is_english_word(t)) out.push_back(t);
    return out;
}

// ---------------------------------------------------------------------------
// Fixed slot enumerations.

std::vector<std::string> body_fixed_slots(const ExtractionContext& ctx) {
    std::vector<std::string> s;
    for (const char* n :
         {"total_words", "total_chars", "chars_per_word", "digit_ratio", "upper_ratio",
          "space_ratio", "alpha_ratio", "avg_sentence_words", "avg_sentence_chars",
          "short_word_ratio"})
        s.push_back(std::string("lex:") + n);
    for (int i = 1; i <= 20; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "wlen:%02d", i);
        s.push_back(buf);
    }
    for (const char* n : {"n", "v", "hapax", "dis", "ttr", "yules_k", "honores_h", "sichels_s"})
        s.push_back(std::string("rich:") + n);
    for (const auto& c : ctx.punct_chars) s.push_back("punct:" + c);
    for (const auto& w : ctx.function_words) s.push_back("fw:" + w);
    for (const auto& n : ctx.structure_names) s.push_back("struct:" + n);
    return s;
}

const std::array<const char*, 8> kExtClasses = {"gif", "jpg", "png", "bmp",
                                                "ico", "svg", "webp", "other"};

std::vector<std::string> image_fixed_slots() {
    std::vector<std::string> s;
    s.reserve(10040);
    for (int i = 0; i < 10000; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "pix:%04d", i);
        s.push_back(buf);
    }
    for (const char* e : kExtClasses) s.push_back(std::string("imgext:") + e);
    for (int i = 0; i < 8; ++i) s.push_back("imgw:" + std::to_string(i));
    for (int i = 0; i < 8; ++i) s.push_back("imgh:" + std::to_string(i));
    for (int i = 0; i < 8; ++i) s.push_back("imgsz:" + std::to_string(i));
    for (const char* n : {"count", "total_bytes", "mean_bytes", "max_bytes", "mean_width",
                          "max_width", "mean_height", "max_height"})
        s.push_back(std::string("agg:") + n);
    return s;
}

std::vector<std::string> link_fixed_slots() {
    std::vector<std::string> s;
    for (const char* n :
         {"page_rel_in", "page_rel_out", "page_abs_out", "page_anchors", "site_rel_total",
          "site_abs_out_total", "site_anchor_total", "site_mean_in", "site_mean_out",
          "site_page_count"})
        s.push_back(std::string("link:") + n);
    s.push_back("lstruct:page_level");
    for (int i = 0; i < 10; ++i) s.push_back("lstruct:in_lv:" + std::to_string(i));
    for (int i = 0; i < 10; ++i) s.push_back("lstruct:out_lv:" + std::to_string(i));
    for (int i = 0; i < 5; ++i) s.push_back("lstruct:in_deg_bin:" + std::to_string(i));
    for (int i = 0; i < 5; ++i) s.push_back("lstruct:out_deg_bin:" + std::to_string(i));
    return s;
}

std::vector<std::string> fixed_slots(Category cat, const ExtractionContext& ctx) {
    switch (cat) {
    case Category::BodyText: return body_fixed_slots(ctx);
    case Category::Image: return image_fixed_slots();
    case Category::Link: return link_fixed_slots();
    default: return {}; // HTML and URL are pure n-gram categories
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Document structure.

std::vector<double> document_structure_values(const WebPage& page,
                                              const std::vector<std::string>& names) {
    HtmlScan scan = scan_html(page.html_source);
    std::string text_low = lower_copy(scan.text);

    std::map<std::string, double> v;
    auto tag_count = [&](std::initializer_list<const char*> tags) {
        double n = 0;
        for (const auto& ev : scan.open_tags)
            for (const char* t : tags)
                if (ev.name == t) { ++n; break; }
        return n;
    };
    auto contains = [&](std::string_view what) {
        return text_low.find(what) != std::string::npos;
    };

    v["has_greeting"] = contains("welcome") || contains("dear ") || contains("hello") ||
                        contains("greetings");
    v["has_url_in_text"] =
        contains("http://") || contains("https://") || contains("www.");
    bool email = false;
    for (std::size_t i = 1; i + 1 < text_low.size() && !email; ++i) {
        if (text_low[i] != '@') continue;
        if (!std::isalnum(static_cast<unsigned char>(text_low[i - 1]))) continue;
        auto dot = text_low.find('.', i + 2);
        email = dot != std::string::npos && dot + 1 < text_low.size() &&
                std::isalnum(static_cast<unsigned char>(text_low[i + 1])) &&
                std::isalnum(static_cast<unsigned char>(text_low[dot + 1]));
    }
    v["has_email_in_text"] = email;
    v["has_copyright"] = contains("copyright") || contains("\xc2\xa9") || contains("(c)");
    bool phone = false;
    {
        int digits = 0;
        for (char c : text_low) {
            if (std::isdigit(static_cast<unsigned char>(c))) {
                if (++digits >= 7) { phone = true; break; }
            } else if (c == ' ' || c == '-' || c == '(' || c == ')' || c == '+' || c == '.') {
                // separators keep the run alive
            } else {
                digits = 0;
            }
        }
    }
    v["has_phone_pattern"] = phone;
    v["has_currency_symbol"] = contains("$") || contains("\xc2\xa3") || contains("\xe2\x82\xac");

    v["paragraph_count"] = tag_count({"p"});
    v["line_break_count"] = tag_count({"br"});
    v["horizontal_rule_count"] = tag_count({"hr"});
    for (int h = 1; h <= 6; ++h) {
        std::string t = "h" + std::to_string(h);
        v["heading_" + t + "_count"] = tag_count({t.c_str()});
    }
    v["unordered_list_count"] = tag_count({"ul"});
    v["ordered_list_count"] = tag_count({"ol"});
    v["list_item_count"] = tag_count({"li"});
    v["table_count"] = tag_count({"table"});
    v["table_row_count"] = tag_count({"tr"});
    v["table_cell_count"] = tag_count({"td", "th"});
    v["form_count"] = tag_count({"form"});
    v["input_count"] = tag_count({"input"});

    double pw = 0, hid = 0, ext_script = 0, alt_missing = 0, styled = 0, color_attr = 0,
           bgcolor_attr = 0, handlers = 0, seals = 0;
    for (const auto& ev : scan.open_tags) {
        if (ev.name == "input") {
            if (const auto* t = ev.attr("type")) {
                std::string tl = lower_copy(*t);
                if (tl == "password") ++pw;
                if (tl == "hidden") ++hid;
            }
        }
        if (ev.name == "script" && ev.attr("src")) ++ext_script;
        if (ev.name == "img") {
            const auto* alt = ev.attr("alt");
            if (!alt || alt->empty()) ++alt_missing;
            if (const auto* src = ev.attr("src")) {
                std::string s = lower_copy(*src);
                for (const char* cue : {"seal", "trust", "secure", "verisign", "certif"})
                    if (s.find(cue) != std::string::npos) { ++seals; break; }
            }
        }
        for (const auto& [key, val] : ev.attrs) {
            if (key == "style") ++styled;
            if (key == "color") ++color_attr;
            if (key == "bgcolor") ++bgcolor_attr;
            if (key.size() > 2 && key[0] == 'o' && key[1] == 'n') ++handlers;
        }
    }
    v["password_input_count"] = pw;
    v["hidden_input_count"] = hid;
    v["select_count"] = tag_count({"select"});
    v["textarea_count"] = tag_count({"textarea"});
    v["button_count"] = tag_count({"button"});
    v["image_tag_count"] = tag_count({"img"});
    v["img_alt_missing_count"] = alt_missing;

    v["anchor_count"] = tag_count({"a"});
    double ext_a = 0, rel_a = 0, mailto_a = 0;
    std::string page_host = parse_url(page.url).host;
    for (const auto& href : scan.anchor_hrefs) {
        std::string h = lower_copy(href);
        if (h.starts_with("mailto:")) { ++mailto_a; continue; }
        if (is_unfetchable_ref(h)) continue;
        ParsedUrl pu = parse_url(h);
        if (!pu.absolute()) ++rel_a;
        else if (pu.host != page_host) ++ext_a;
    }
    v["external_anchor_count"] = ext_a;
    v["relative_anchor_count"] = rel_a;
    v["mailto_anchor_count"] = mailto_a;

    v["script_count"] = tag_count({"script"});
    v["external_script_count"] = ext_script;
    v["style_tag_count"] = tag_count({"style"});
    v["inline_style_attr_count"] = styled;
    v["link_tag_count"] = tag_count({"link"});
    v["meta_tag_count"] = tag_count({"meta"});
    v["iframe_count"] = tag_count({"iframe"});
    v["frame_count"] = tag_count({"frame", "frameset"});
    v["embed_object_count"] = tag_count({"embed", "object"});
    v["font_tag_count"] = tag_count({"font"});
    v["color_attr_count"] = color_attr;
    v["bgcolor_attr_count"] = bgcolor_attr;
    v["bold_tag_count"] = tag_count({"b", "strong"});
    v["italic_tag_count"] = tag_count({"i", "em"});
    v["underline_tag_count"] = tag_count({"u"});
    v["center_tag_count"] = tag_count({"center"});
    v["marquee_blink_count"] = tag_count({"marquee", "blink"});
    v["div_count"] = tag_count({"div"});
    v["span_count"] = tag_count({"span"});
    v["title_present"] = scan.title.empty() ? 0.0 : 1.0;
    v["title_length_chars"] = static_cast<double>(scan.title.size());
    v["doctype_present"] = scan.has_doctype ? 1.0 : 0.0;
    v["comment_count"] = static_cast<double>(scan.comment_count);
    v["base_tag_present"] = tag_count({"base"}) > 0 ? 1.0 : 0.0;
    v["event_handler_attr_count"] = handlers;
    v["trust_seal_image_count"] = seals;
    v["total_tag_count"] = static_cast<double>(scan.open_tags.size());
    std::set<std::string> distinct;
    for (const auto& ev : scan.open_tags) distinct.insert(ev.name);
    v["distinct_tag_count"] = static_cast<double>(distinct.size());
    v["max_nesting_depth"] = static_cast<double>(scan.max_nesting_depth);
    v["text_to_html_ratio"] =
        page.html_source.empty()
            ? 0.0
            : static_cast<double>(scan.text.size()) / static_cast<double>(page.html_source.size());

    std::vector<double> out;
    out.reserve(names.size());
    for (const auto& n : names) {
        auto it = v.find(n);
        if (it == v.end())
            throw std::runtime_error("document_structure list names unknown feature: " + n);
        out.push_back(it->second);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Extractors.

namespace {

// Accumulates named n-gram counts into dictionary slots.
class SlotAccumulator {
public:
    SlotAccumulator(const FeatureDictionary& dict, std::map<int, double>& acc)
        : dict_(dict), acc_(acc) {}

    void add(const std::string& group, std::string_view gram, double amount = 1.0) {
        name_.assign(group);
        name_.push_back(':');
        name_.append(gram);
        int idx = dict_.index_of(name_);
        if (idx >= 0) acc_[idx] += amount;
    }

private:
    const FeatureDictionary& dict_;
    std::map<int, double>& acc_;
    std::string name_;
};

FeatureVector finish(const WebPage& page, const FeatureDictionary& dict,
                     const std::map<int, double>& acc) {
    FeatureVector f;
    f.page_id = page.page_id;
    f.category = dict.category();
    f.dim = dict.size();
    for (const auto& [i, x] : acc) {
        if (x < 0)
            throw std::logic_error("negative feature value for " + dict.entries()[i]);
        if (x != 0.0) f.items.emplace_back(i, x);
    }
    return f;
}

} // namespace

FeatureVector extract_body_text(const WebPage& page, const FeatureDictionary& dict,
                                const ExtractionContext& ctx) {
    if (dict.category() != Category::BodyText)
        throw std::invalid_argument("extract_body_text: wrong dictionary category");

    const std::string& text = page.body_text;
    std::vector<std::string> tokens = tokenize_words(text);
    std::map<int, double> acc;
    SlotAccumulator slots(dict, acc);

    // lex: 10 word/char measures
    double words = static_cast<double>(tokens.size());
    double chars = static_cast<double>(text.size());
    double token_chars = 0, short_words = 0;
    for (const auto& t : tokens) {
        token_chars += static_cast<double>(t.size());
        if (t.size() < 4) ++short_words;
    }
    double digits = 0, uppers = 0, spaces = 0, alphas = 0;
    for (char c : text) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isdigit(u)) ++digits;
        if (std::isupper(u)) ++uppers;
        if (std::isspace(u)) ++spaces;
        if (std::isalpha(u)) ++alphas;
    }
    double sentences = static_cast<double>(count_sentences(text));
    auto ratio = [](double a, double b) { return b > 0 ? a / b : 0.0; };
    slots.add("lex", "total_words", words);
    slots.add("lex", "total_chars", chars);
    slots.add("lex", "chars_per_word", ratio(token_chars, words));
    slots.add("lex", "digit_ratio", ratio(digits, chars));
    slots.add("lex", "upper_ratio", ratio(uppers, chars));
    slots.add("lex", "space_ratio", ratio(spaces, chars));
    slots.add("lex", "alpha_ratio", ratio(alphas, chars));
    slots.add("lex", "avg_sentence_words", ratio(words, sentences));
    slots.add("lex", "avg_sentence_chars", ratio(chars, sentences));
    slots.add("lex", "short_word_ratio", ratio(short_words, words));

    // wlen: relative frequency of 1..20-letter words (>=20 folds into bin 20)
    if (!tokens.empty()) {
        std::array<double, 21> bins{};
        for (const auto& t : tokens) bins[std::min<std::size_t>(t.size(), 20)] += 1.0;
        for (int i = 1; i <= 20; ++i) {
            char buf[8];
            std::snprintf(buf, sizeof buf, "%02d", i);
            slots.add("wlen", buf, bins[i] / words);
        }
    }

    // rich: vocabulary richness
    RichnessStats rs = vocabulary_richness(tokens);
    auto ra = rs.as_array();
    const char* rich_names[] = {"n", "v", "hapax", "dis", "ttr", "yules_k", "honores_h",
                                "sichels_s"};
    for (int i = 0; i < 8; ++i) slots.add("rich", rich_names[i], ra[i]);

    // punct: per-char frequency relative to total chars
    if (chars > 0) {
        for (const auto& pc : ctx.punct_chars) {
            double n = static_cast<double>(std::count(text.begin(), text.end(), pc[0]));
            if (n > 0) slots.add("punct", pc, n / chars);
        }
    }

    // fw: function-word frequency relative to total words
    if (!tokens.empty()) {
        std::map<std::string_view, double> tok_counts;
        for (const auto& t : tokens) tok_counts[t] += 1.0;
        for (const auto& w : ctx.function_words) {
            auto it = tok_counts.find(w);
            if (it != tok_counts.end()) slots.add("fw", w, it->second / words);
        }
    }

    // struct: 64 document-structure values
    std::vector<double> sv = document_structure_values(page, ctx.structure_names);
    for (std::size_t i = 0; i < sv.size(); ++i)
        if (sv[i] != 0.0) slots.add("struct", ctx.structure_names[i], sv[i]);

    // selectable n-gram groups: raw counts
    const NgramConfig& cfg = dict.config();
    for_each_char_ngram(text, cfg.char_min, cfg.char_max,
                        [&](std::string_view g) { slots.add("char", g); });
    for_each_seq_ngram(tokens, cfg.word_min, cfg.word_max,
                       [&](const std::string& g) { slots.add("word", g); });
    std::vector<std::string> tags = ctx.tagger->tag(tokens);
    for_each_seq_ngram(tags, cfg.pos_min, cfg.pos_max,
                       [&](const std::string& g) { slots.add("pos", g); });
    for (const auto& m : misspelled_tokens(tokens, ctx)) slots.add("misp", m);

    return finish(page, dict, acc);
}

FeatureVector extract_html(const WebPage& page, const FeatureDictionary& dict) {
    if (dict.category() != Category::Html)
        throw std::invalid_argument("extract_html: wrong dictionary category");
    std::map<int, double> acc;
    SlotAccumulator slots(dict, acc);
    std::vector<std::string> tags = tag_sequence(page.html_source);
    std::erase_if(tags, [](const std::string& t) { return !valid_tag_name(t); });
    const NgramConfig& cfg = dict.config();
    for_each_seq_ngram(tags, cfg.tag_min, cfg.tag_max,
                       [&](const std::string& g) { slots.add("tag", g); });
    return finish(page, dict, acc);
}

FeatureVector extract_url(const WebPage& page, const FeatureDictionary& dict) {
    if (dict.category() != Category::Url)
        throw std::invalid_argument("extract_url: wrong dictionary category");
    std::map<int, double> acc;
    SlotAccumulator slots(dict, acc);
    const NgramConfig& cfg = dict.config();
    for_each_url_char_ngram(page.url, cfg.uchar_min, cfg.uchar_max,
                            [&](std::string_view g) { slots.add("uchar", g); });
    for_each_seq_ngram(url_tokens(page.url), cfg.utok_min, cfg.utok_max,
                       [&](const std::string& g) { slots.add("utok", g); });
    return finish(page, dict, acc);
}

namespace {

int ext_class_index(const std::string& ext) {
    std::string e = ext == "jpeg" ? "jpg" : ext;
    for (std::size_t i = 0; i + 1 < kExtClasses.size(); ++i)
        if (e == kExtClasses[i]) return static_cast<int>(i);
    return static_cast<int>(kExtClasses.size()) - 1; // other
}

// Log-spaced histogram bin: values below edges[0] -> 0, >= edges.back() -> last.
int hist_bin(double v, const std::vector<double>& edges) {
    int b = 0;
    for (double e : edges) {
        if (v < e) return b;
        ++b;
    }
    return b;
}

const std::vector<double> kDimEdges = {16, 32, 64, 128, 256, 512, 1024};
const std::vector<double> kSizeEdges = {1024,    4096,    16384,  65536,
                                        262144, 1048576, 4194304};

} // namespace

FeatureVector extract_image(const WebPage& page, const Website& site,
                            const FeatureDictionary& dict) {
    if (dict.category() != Category::Image)
        throw std::invalid_argument("extract_image: wrong dictionary category");
    std::map<int, double> acc;
    SlotAccumulator slots(dict, acc);

    std::vector<const ImageAsset*> assets;
    for (const auto& id : page.image_refs)
        if (const auto* a = site.find_image(id)) assets.push_back(a);

    // pix: 25x20x20 quantized color histogram over all decoded pixels,
    // normalized by total pixel count.
    std::vector<double> bins(10000, 0.0);
    double total_px = 0;
    for (const auto* a : assets) {
        if (!a->has_pixels()) continue;
        const auto& px = a->pixels;
        for (std::size_t i = 0; i + 2 < px.size(); i += 3) {
            int qr = px[i] * 25 / 256;
            int qg = px[i + 1] * 20 / 256;
            int qb = px[i + 2] * 20 / 256;
            bins[static_cast<std::size_t>(qr * 400 + qg * 20 + qb)] += 1.0;
            total_px += 1.0;
        }
    }
    if (total_px > 0) {
        char buf[8];
        for (int i = 0; i < 10000; ++i) {
            if (bins[i] == 0.0) continue;
            std::snprintf(buf, sizeof buf, "%04d", i);
            slots.add("pix", buf, bins[i] / total_px);
        }
    }

    // image-structure features from metadata (decodability not required)
    double total_bytes = 0, max_bytes = 0, sum_w = 0, max_w = 0, sum_h = 0, max_h = 0;
    for (const auto* a : assets) {
        slots.add("imgext", kExtClasses[ext_class_index(a->extension)]);
        slots.add("imgw", std::to_string(hist_bin(a->width_px, kDimEdges)));
        slots.add("imgh", std::to_string(hist_bin(a->height_px, kDimEdges)));
        slots.add("imgsz", std::to_string(hist_bin(static_cast<double>(a->file_size_bytes),
                                                   kSizeEdges)));
        double fb = static_cast<double>(a->file_size_bytes);
        total_bytes += fb;
        max_bytes = std::max(max_bytes, fb);
        sum_w += a->width_px;
        max_w = std::max(max_w, static_cast<double>(a->width_px));
        sum_h += a->height_px;
        max_h = std::max(max_h, static_cast<double>(a->height_px));
    }
    double n_img = static_cast<double>(assets.size());
    slots.add("agg", "count", n_img);
    slots.add("agg", "total_bytes", total_bytes);
    slots.add("agg", "mean_bytes", n_img > 0 ? total_bytes / n_img : 0.0);
    slots.add("agg", "max_bytes", max_bytes);
    slots.add("agg", "mean_width", n_img > 0 ? sum_w / n_img : 0.0);
    slots.add("agg", "max_width", max_w);
    slots.add("agg", "mean_height", n_img > 0 ? sum_h / n_img : 0.0);
    slots.add("agg", "max_height", max_h);

    return finish(page, dict, acc);
}

FeatureVector extract_link(const WebPage& page, const Website& site,
                           const FeatureDictionary& dict) {
    if (dict.category() != Category::Link)
        throw std::invalid_argument("extract_link: wrong dictionary category");
    std::map<int, double> acc;
    SlotAccumulator slots(dict, acc);

    double site_rel_total = static_cast<double>(site.link_edges.size());
    double site_abs_out = 0, site_anchors = 0;
    int max_in = 0, max_out = 0;
    for (const auto& p : site.pages) {
        site_abs_out += p.ext_out_link_count;
        site_anchors += p.anchor_count;
        max_in = std::max(max_in, p.in_link_count);
        max_out = std::max(max_out, p.out_link_count);
    }
    double n_pages = static_cast<double>(site.pages.size());

    slots.add("link", "page_rel_in", page.in_link_count);
    slots.add("link", "page_rel_out", page.out_link_count);
    slots.add("link", "page_abs_out", page.ext_out_link_count);
    slots.add("link", "page_anchors", page.anchor_count);
    slots.add("link", "site_rel_total", site_rel_total);
    slots.add("link", "site_abs_out_total", site_abs_out);
    slots.add("link", "site_anchor_total", site_anchors);
    slots.add("link", "site_mean_in", n_pages > 0 ? site_rel_total / n_pages : 0.0);
    slots.add("link", "site_mean_out", n_pages > 0 ? site_rel_total / n_pages : 0.0);
    slots.add("link", "site_page_count", n_pages);

    slots.add("lstruct", "page_level", page.page_level);

    // level distributions of in/out neighbors (bins: levels 0-8 and 9+),
    // multiplicity counted
    auto lv_bin = [](int lv) { return std::min(lv, 9); };
    for (const auto& [from, to] : site.link_edges) {
        if (to == page.page_id) {
            if (const auto* q = site.find_page(from))
                slots.add("lstruct", "in_lv:" + std::to_string(lv_bin(q->page_level)));
        }
        if (from == page.page_id) {
            if (const auto* q = site.find_page(to))
                slots.add("lstruct", "out_lv:" + std::to_string(lv_bin(q->page_level)));
        }
    }

    // degree relative to the site max, one-hot over 5 equal bins
    auto deg_bin = [](int deg, int site_max) {
        if (site_max <= 0) return 0;
        double r = static_cast<double>(deg) / static_cast<double>(site_max);
        return std::min(4, static_cast<int>(r * 5.0));
    };
    slots.add("lstruct", "in_deg_bin:" + std::to_string(deg_bin(page.in_link_count, max_in)));
    slots.add("lstruct", "out_deg_bin:" + std::to_string(deg_bin(page.out_link_count, max_out)));

    return finish(page, dict, acc);
}

FeatureVector extract(const WebPage& page, const Website& site,
                      const FeatureDictionary& dict, const ExtractionContext& ctx) {
    switch (dict.category()) {
    case Category::BodyText: return extract_body_text(page, dict, ctx);
    case Category::Html: return extract_html(page, dict);
    case Category::Url: return extract_url(page, dict);
    case Category::Image: return extract_image(page, site, dict);
    case Category::Link: return extract_link(page, site, dict);
    }
    throw std::logic_error("extract: bad category");
}

// ---------------------------------------------------------------------------
// Dictionary construction.

FeatureDictionary build_dictionary(const std::vector<const WebPage*>& pages,
                                   Category category, const NgramConfig& config,
                                   const ExtractionContext& ctx) {
    if (pages.empty()) throw std::invalid_argument("build_dictionary: no pages");

    std::map<std::string, std::size_t> df; // candidate name -> document frequency
    auto note_page = [&](const std::set<std::string>& grams) {
        for (const auto& g : grams) ++df[g];
    };

    for (const WebPage* p : pages) {
        std::set<std::string> grams;
        switch (category) {
        case Category::BodyText: {
            std::vector<std::string> tokens = tokenize_words(p->body_text);
            for_each_char_ngram(p->body_text, config.char_min, config.char_max,
                                [&](std::string_view g) {
                                    grams.insert("char:" + std::string(g));
                                });
            for_each_seq_ngram(tokens, config.word_min, config.word_max,
                               [&](const std::string& g) { grams.insert("word:" + g); });
            std::vector<std::string> tags = ctx.tagger->tag(tokens);
            for_each_seq_ngram(tags, config.pos_min, config.pos_max,
                               [&](const std::string& g) { grams.insert("pos:" + g); });
            for (const auto& m : misspelled_tokens(tokens, ctx)) grams.insert("misp:" + m);
            break;
        }
        case Category::Html: {
            std::vector<std::string> tags = tag_sequence(p->html_source);
            std::erase_if(tags, [](const std::string& t) { return !valid_tag_name(t); });
            for_each_seq_ngram(tags, config.tag_min, config.tag_max,
                               [&](const std::string& g) { grams.insert("tag:" + g); });
            break;
        }
        case Category::Url: {
            for_each_url_char_ngram(p->url, config.uchar_min, config.uchar_max,
                                    [&](std::string_view g) {
                                        grams.insert("uchar:" + std::string(g));
                                    });
            for_each_seq_ngram(url_tokens(p->url), config.utok_min, config.utok_max,
                               [&](const std::string& g) { grams.insert("utok:" + g); });
            break;
        }
        case Category::Image:
        case Category::Link:
            break; // fixed slots only
        }
        note_page(grams);
    }

    std::vector<std::string> entries = fixed_slots(category, ctx);
    std::vector<std::string> ngrams;
    for (const auto& [name, count] : df)
        if (count >= config.min_df) ngrams.push_back(name);
    std::sort(ngrams.begin(), ngrams.end());
    entries.insert(entries.end(), ngrams.begin(), ngrams.end());
    return FeatureDictionary(category, std::move(entries), config);
}

FeatureDictionary build_dictionary(const Corpus& corpus, Category category,
                                   const NgramConfig& config, const ExtractionContext& ctx) {
    std::vector<const WebPage*> pages;
    for (const auto& s : corpus.sites)
        for (const auto& p : s.pages) pages.push_back(&p);
    return build_dictionary(pages, category, config, ctx);
}

std::vector<FeatureVector> extract_matrix(const Corpus& corpus,
                                          const FeatureDictionary& dict,
                                          const ExtractionContext& ctx) {
    struct Job { const WebPage* page; const Website* site; };
    std::vector<Job> jobs;
    for (const auto& s : corpus.sites)
        for (const auto& p : s.pages) jobs.push_back({&p, &s});

    std::vector<FeatureVector> out(jobs.size());
    // Each iteration writes exactly one slot — deterministic at any thread count.
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(jobs.size()); ++i)
        out[static_cast<std::size_t>(i)] =
            extract(*jobs[static_cast<std::size_t>(i)].page,
                    *jobs[static_cast<std::size_t>(i)].site, dict, ctx);
    return out;
}

void l1_normalize_ngram_groups(FeatureVector& vec, const FeatureDictionary& dict) {
    // Group boundaries are contiguous runs of equal prefix in the dictionary.
    std::map<std::string, double> sums;
    for (const auto& [i, x] : vec.items) {
        std::string g = FeatureDictionary::group_of(dict.entries()[static_cast<std::size_t>(i)]);
        if (!FeatureDictionary::is_fixed_group(g)) sums[g] += x;
    }
    for (auto& [i, x] : vec.items) {
        std::string g = FeatureDictionary::group_of(dict.entries()[static_cast<std::size_t>(i)]);
        auto it = sums.find(g);
        if (it != sums.end() && it->second > 0) x /= it->second;
    }
}

} // namespace escrowscan
