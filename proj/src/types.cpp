#include "escrowscan/types.hpp"

namespace escrowscan {

Category category_from_string(const std::string& s) {
    if (s == "body" || s == "body_text" || s == "text") return Category::BodyText;
    if (s == "html") return Category::Html;
    if (s == "url") return Category::Url;
    if (s == "image") return Category::Image;
    if (s == "link") return Category::Link;
    throw std::invalid_argument("unknown feature category: " + s);
}

} // namespace escrowscan
