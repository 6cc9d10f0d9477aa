// The only translation unit that touches OpenCV; keeps its headers out of the
// rest of the build.
#include "escrowscan/image.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace escrowscan {

std::optional<DecodedImage> decode_image(const std::vector<std::uint8_t>& bytes) {
    if (bytes.empty()) return std::nullopt;
    cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1,
                const_cast<std::uint8_t*>(bytes.data()));
    cv::Mat img = cv::imdecode(raw, cv::IMREAD_COLOR); // BGR, drops alpha
    if (img.empty()) return std::nullopt;

    DecodedImage out;
    out.width = img.cols;
    out.height = img.rows;
    out.rgb.resize(3 * std::size_t(img.cols) * img.rows);
    for (int y = 0; y < img.rows; ++y) {
        const cv::Vec3b* row = img.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.cols; ++x) {
            std::size_t i = 3 * (std::size_t(y) * img.cols + x);
            out.rgb[i] = row[x][2];     // R
            out.rgb[i + 1] = row[x][1]; // G
            out.rgb[i + 2] = row[x][0]; // B
        }
    }
    return out;
}

std::vector<std::uint8_t> encode_png(const DecodedImage& img) {
    cv::Mat bgr(img.height, img.width, CV_8UC3);
    for (int y = 0; y < img.height; ++y) {
        cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width; ++x) {
            std::size_t i = 3 * (std::size_t(y) * img.width + x);
            row[x] = cv::Vec3b(img.rgb[i + 2], img.rgb[i + 1], img.rgb[i]);
        }
    }
    std::vector<std::uint8_t> out;
    cv::imencode(".png", bgr, out);
    return out;
}

} // namespace escrowscan
