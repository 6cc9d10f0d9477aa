#pragma once

#include <string>
#include <string_view>

namespace escrowscan {

// Minimal absolute-URL split; enough for same-host crawling and link
// classification. No percent-decoding, no IDN.
struct ParsedUrl {
    std::string scheme; // lowercase, empty if relative
    std::string host;   // lowercase, may include :port
    std::string path;   // begins with '/' when host present; may carry ?query
    bool absolute() const { return !scheme.empty(); }
};

ParsedUrl parse_url(std::string_view url);

// RFC-3986-lite reference resolution: absolute refs pass through,
// scheme-relative (//host/..), root-relative (/..), and relative paths resolve
// against base. Fragments are stripped. "." and ".." segments are collapsed.
std::string resolve_url(std::string_view base, std::string_view ref);

// True when the reference stays on base's host (relative refs always do).
bool same_host(std::string_view base, std::string_view ref);

// True for schemes a crawler cannot follow (mailto:, javascript:, tel:, data:).
bool is_unfetchable_ref(std::string_view ref);

} // namespace escrowscan
