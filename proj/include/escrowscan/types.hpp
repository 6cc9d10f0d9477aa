#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace escrowscan {

using PageId = std::string;
using SiteId = std::string;
using ImageId = std::string;

enum class Label { Real, Fake, Unknown };

// Class sign convention used by every learner: Fake = +1, Real = -1.
inline int label_sign(Label l) {
    switch (l) {
    case Label::Fake: return +1;
    case Label::Real: return -1;
    default: throw std::invalid_argument("label_sign: Unknown label has no class sign");
    }
}

inline std::string to_string(Label l) {
    switch (l) {
    case Label::Real: return "real";
    case Label::Fake: return "fake";
    default: return "unknown";
    }
}

inline Label label_from_string(const std::string& s) {
    if (s == "real" || s == "Real") return Label::Real;
    if (s == "fake" || s == "Fake") return Label::Fake;
    return Label::Unknown;
}

enum class Category { BodyText, Html, Url, Image, Link };

inline constexpr int kCategoryCount = 5;

inline const char* to_string(Category c) {
    switch (c) {
    case Category::BodyText: return "body";
    case Category::Html: return "html";
    case Category::Url: return "url";
    case Category::Image: return "image";
    default: return "link";
    }
}

Category category_from_string(const std::string& s);

} // namespace escrowscan
