#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace escrowscan {

// One opening tag in document order. Names and attribute keys are lowercased,
// attribute values are entity-decoded.
struct TagEvent {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;

    const std::string* attr(std::string_view key) const;
};

// Result of the tolerant HTML scan. The scanner never fails: malformed input
// degrades to text or gets skipped, it does not throw.
struct HtmlScan {
    std::vector<TagEvent> open_tags; // document order, closing tags excluded
    std::string text;                // visible text: tags/script/style stripped,
                                     // entities decoded, whitespace collapsed
    std::string title;
    std::vector<std::string> anchor_hrefs; // href values of <a>, document order
    std::vector<std::string> img_srcs;     // src values of <img>
    std::size_t comment_count = 0;
    bool has_doctype = false;
    int max_nesting_depth = 0;
};

HtmlScan scan_html(std::string_view html);

// Visible-text extraction only (same rules as scan_html).
std::string extract_text(std::string_view html);

// Decodes named (amp, lt, gt, quot, apos, nbsp) and numeric character references.
std::string decode_entities(std::string_view s);

// Tag names carried only by a sequence, for tag n-gram features.
std::vector<std::string> tag_sequence(std::string_view html);

} // namespace escrowscan
