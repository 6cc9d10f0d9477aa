#include "escrowscan/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace escrowscan {

namespace {

bool is_void_element(const std::string& name) {
    static const std::array<const char*, 14> kVoid = {
        "area", "base", "br", "col", "embed", "hr", "img", "input",
        "link", "meta", "param", "source", "track", "wbr"};
    return std::find(kVoid.begin(), kVoid.end(), name) != kVoid.end();
}

char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool iequal_at(std::string_view s, std::size_t pos, std::string_view what) {
    if (pos + what.size() > s.size()) return false;
    for (std::size_t i = 0; i < what.size(); ++i)
        if (lower(s[pos + i]) != lower(what[i])) return false;
    return true;
}

void append_utf8(std::string& out, unsigned long cp) {
    if (cp == 0 || cp > 0x10ffff) return;
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
        out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
}

// Parses attributes between the tag name and '>'. Returns position just past '>'.
// self_closing set when the tag ends with '/>'.
std::size_t parse_attrs(std::string_view s, std::size_t i, TagEvent& ev, bool& self_closing) {
    self_closing = false;
    while (i < s.size() && s[i] != '>') {
        while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == '/')) {
            if (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '>') self_closing = true;
            ++i;
        }
        if (i >= s.size() || s[i] == '>') break;
        std::string key;
        while (i < s.size() && s[i] != '=' && s[i] != '>' && s[i] != '/' &&
               !std::isspace(static_cast<unsigned char>(s[i])))
            key.push_back(lower(s[i++]));
        std::string value;
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i < s.size() && s[i] == '=') {
            ++i;
            while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
            if (i < s.size() && (s[i] == '"' || s[i] == '\'')) {
                char q = s[i++];
                while (i < s.size() && s[i] != q) value.push_back(s[i++]);
                if (i < s.size()) ++i;
            } else {
                while (i < s.size() && s[i] != '>' &&
                       !std::isspace(static_cast<unsigned char>(s[i])))
                    value.push_back(s[i++]);
            }
        }
        if (!key.empty()) ev.attrs.emplace_back(std::move(key), decode_entities(value));
    }
    if (i < s.size()) ++i; // consume '>'
    return i;
}

void append_collapsed(std::string& out, std::string_view chunk) {
    for (char c : chunk) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!out.empty() && out.back() != ' ') out.push_back(' ');
        } else {
            out.push_back(c);
        }
    }
}

} // namespace

const std::string* TagEvent::attr(std::string_view key) const {
    for (const auto& [k, v] : attrs)
        if (k == key) return &v;
    return nullptr;
}

std::string decode_entities(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out.push_back(s[i++]);
            continue;
        }
        std::size_t semi = s.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 10) {
            out.push_back(s[i++]);
            continue;
        }
        std::string_view name = s.substr(i + 1, semi - i - 1);
        if (name == "amp") out.push_back('&');
        else if (name == "lt") out.push_back('<');
        else if (name == "gt") out.push_back('>');
        else if (name == "quot") out.push_back('"');
        else if (name == "apos") out.push_back('\'');
        else if (name == "nbsp") out.push_back(' ');
        else if (!name.empty() && name[0] == '#') {
            unsigned long cp = 0;
            bool ok = name.size() > 1;
            if (name.size() > 2 && (name[1] == 'x' || name[1] == 'X')) {
                for (std::size_t k = 2; k < name.size() && ok; ++k) {
                    char c = lower(name[k]);
                    if (c >= '0' && c <= '9') cp = cp * 16 + static_cast<unsigned long>(c - '0');
                    else if (c >= 'a' && c <= 'f') cp = cp * 16 + static_cast<unsigned long>(c - 'a' + 10);
                    else ok = false;
                }
            } else {
                for (std::size_t k = 1; k < name.size() && ok; ++k) {
                    if (name[k] >= '0' && name[k] <= '9') cp = cp * 10 + static_cast<unsigned long>(name[k] - '0');
                    else ok = false;
                }
            }
            if (ok) append_utf8(out, cp);
            else { out.push_back(s[i++]); continue; }
        } else {
            out.push_back(s[i++]);
            continue;
        }
        i = semi + 1;
    }
    return out;
}

HtmlScan scan_html(std::string_view html) {
    HtmlScan scan;
    std::string raw_text;
    int depth = 0;
    std::size_t i = 0;
    bool in_title = false;
    std::string title_raw;

    while (i < html.size()) {
        if (html[i] != '<') {
            std::size_t next = html.find('<', i);
            if (next == std::string_view::npos) next = html.size();
            std::string_view chunk = html.substr(i, next - i);
            if (in_title) title_raw.append(chunk);
            else raw_text.append(chunk);
            i = next;
            continue;
        }
        if (iequal_at(html, i, "<!--")) {
            std::size_t end = html.find("-->", i + 4);
            ++scan.comment_count;
            i = (end == std::string_view::npos) ? html.size() : end + 3;
            continue;
        }
        if (i + 1 < html.size() && html[i + 1] == '!') {
            if (iequal_at(html, i, "<!doctype")) scan.has_doctype = true;
            std::size_t end = html.find('>', i);
            i = (end == std::string_view::npos) ? html.size() : end + 1;
            continue;
        }
        if (i + 1 < html.size() && html[i + 1] == '/') {
            std::size_t j = i + 2;
            std::string name;
            while (j < html.size() && std::isalnum(static_cast<unsigned char>(html[j])))
                name.push_back(lower(html[j++]));
            std::size_t end = html.find('>', j);
            i = (end == std::string_view::npos) ? html.size() : end + 1;
            if (name == "title") in_title = false;
            if (depth > 0) --depth;
            continue;
        }
        if (i + 1 >= html.size() || !std::isalpha(static_cast<unsigned char>(html[i + 1]))) {
            // stray '<' is literal text
            raw_text.push_back('<');
            ++i;
            continue;
        }

        std::size_t j = i + 1;
        TagEvent ev;
        while (j < html.size() && std::isalnum(static_cast<unsigned char>(html[j])))
            ev.name.push_back(lower(html[j++]));
        bool self_closing = false;
        j = parse_attrs(html, j, ev, self_closing);

        if (ev.name == "a") {
            if (const std::string* href = ev.attr("href")) scan.anchor_hrefs.push_back(*href);
        } else if (ev.name == "img") {
            if (const std::string* src = ev.attr("src")) scan.img_srcs.push_back(*src);
        } else if (ev.name == "title") {
            in_title = true;
        }

        bool raw_content = (ev.name == "script" || ev.name == "style");
        if (!self_closing && !is_void_element(ev.name) && !raw_content) {
            ++depth;
            scan.max_nesting_depth = std::max(scan.max_nesting_depth, depth);
        }
        scan.open_tags.push_back(std::move(ev));

        if (raw_content && !self_closing) {
            const std::string closer = "</" + scan.open_tags.back().name;
            std::size_t end = j;
            while (end < html.size() && !iequal_at(html, end, closer)) ++end;
            if (end < html.size()) {
                std::size_t gt = html.find('>', end);
                end = (gt == std::string_view::npos) ? html.size() : gt + 1;
            }
            j = end;
        }
        i = j;
        if (raw_text.empty() || raw_text.back() != ' ') raw_text.push_back(' ');
    }

    append_collapsed(scan.text, decode_entities(raw_text));
    while (!scan.text.empty() && scan.text.back() == ' ') scan.text.pop_back();
    while (!scan.text.empty() && scan.text.front() == ' ') scan.text.erase(scan.text.begin());

    append_collapsed(scan.title, decode_entities(title_raw));
    while (!scan.title.empty() && scan.title.back() == ' ') scan.title.pop_back();
    while (!scan.title.empty() && scan.title.front() == ' ') scan.title.erase(scan.title.begin());
    return scan;
}

std::string extract_text(std::string_view html) { return scan_html(html).text; }

std::vector<std::string> tag_sequence(std::string_view html) {
    HtmlScan scan = scan_html(html);
    std::vector<std::string> seq;
    seq.reserve(scan.open_tags.size());
    for (auto& ev : scan.open_tags) seq.push_back(std::move(ev.name));
    return seq;
}

} // namespace escrowscan
