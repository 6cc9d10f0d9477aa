#include "escrowscan/url.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

namespace escrowscan {

namespace {

std::string lower_copy(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view strip_fragment(std::string_view url) {
    auto hash = url.find('#');
    return hash == std::string_view::npos ? url : url.substr(0, hash);
}

// Collapses "." and ".." segments of an absolute path.
std::string normalize_path(std::string_view path) {
    std::vector<std::string_view> segs;
    std::size_t i = 0;
    while (i <= path.size()) {
        auto slash = path.find('/', i);
        if (slash == std::string_view::npos) slash = path.size();
        std::string_view seg = path.substr(i, slash - i);
        if (seg == "..") {
            if (!segs.empty()) segs.pop_back();
        } else if (seg != "." && !(seg.empty() && i != 0 && slash != path.size())) {
            segs.push_back(seg);
        }
        if (slash == path.size()) break;
        i = slash + 1;
    }
    std::string out;
    for (std::size_t k = 0; k < segs.size(); ++k) {
        if (k) out.push_back('/');
        out.append(segs[k]);
    }
    if (out.empty() || out[0] != '/') out.insert(out.begin(), '/');
    return out;
}

} // namespace

ParsedUrl parse_url(std::string_view url) {
    url = strip_fragment(url);
    ParsedUrl p;
    auto colon = url.find(':');
    if (colon != std::string_view::npos && colon + 2 < url.size() &&
        url[colon + 1] == '/' && url[colon + 2] == '/') {
        p.scheme = lower_copy(url.substr(0, colon));
        url.remove_prefix(colon + 3);
        auto slash = url.find('/');
        if (slash == std::string_view::npos) {
            p.host = lower_copy(url);
            p.path = "/";
        } else {
            p.host = lower_copy(url.substr(0, slash));
            p.path = std::string(url.substr(slash));
        }
    } else {
        p.path = std::string(url);
    }
    return p;
}

bool is_unfetchable_ref(std::string_view ref) {
    auto colon = ref.find(':');
    if (colon == std::string_view::npos) return false;
    std::string scheme = lower_copy(ref.substr(0, colon));
    if (scheme == "http" || scheme == "https") return false;
    // "foo/bar:baz" has no scheme; a scheme must precede any slash.
    auto slash = ref.find('/');
    if (slash != std::string_view::npos && slash < colon) return false;
    return true;
}

std::string resolve_url(std::string_view base, std::string_view ref) {
    ref = strip_fragment(ref);
    ParsedUrl b = parse_url(base);
    if (ref.empty()) return b.scheme + "://" + b.host + normalize_path(b.path);

    ParsedUrl r = parse_url(ref);
    if (r.absolute()) return r.scheme + "://" + r.host + normalize_path(r.path);

    if (ref.size() >= 2 && ref[0] == '/' && ref[1] == '/') {
        // scheme-relative
        ParsedUrl sr = parse_url(std::string(b.scheme) + ":" + std::string(ref));
        return b.scheme + "://" + sr.host + normalize_path(sr.path);
    }
    std::string path;
    if (!ref.empty() && ref[0] == '/') {
        path = std::string(ref);
    } else if (!ref.empty() && ref[0] == '?') {
        auto q = b.path.find('?');
        path = b.path.substr(0, q) + std::string(ref);
    } else {
        // strip query then last segment of base path
        std::string dir = b.path.substr(0, b.path.find('?'));
        auto slash = dir.rfind('/');
        dir = slash == std::string::npos ? "/" : dir.substr(0, slash + 1);
        path = dir + std::string(ref);
    }
    return b.scheme + "://" + b.host + normalize_path(path);
}

bool same_host(std::string_view base, std::string_view ref) {
    if (is_unfetchable_ref(ref)) return false;
    ParsedUrl r = parse_url(ref);
    if (!r.absolute()) return true;
    return parse_url(base).host == r.host;
}

} // namespace escrowscan
