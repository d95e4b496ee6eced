#include "avact/image.hpp"

#include <cmath>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace avact {

namespace {

cv::Mat to_mat(const Image& img) {
    // planar [c,h,w] in [0,1] -> interleaved BGR 32F
    std::vector<cv::Mat> planes;
    planes.reserve(img.channels);
    for (int c = img.channels - 1; c >= 0; --c) {  // RGB -> BGR
        cv::Mat plane(img.height, img.width, CV_32F);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) plane.at<float>(y, x) = img.at(c, y, x);
        planes.push_back(plane);
    }
    cv::Mat out;
    if (img.channels == 1)
        out = planes[0];
    else
        cv::merge(planes, out);
    return out;
}

Image from_mat(const cv::Mat& m) {
    cv::Mat f;
    m.convertTo(f, CV_32F);
    std::vector<cv::Mat> planes;
    cv::split(f, planes);
    Image img(static_cast<int>(planes.size()), f.rows, f.cols);
    for (int c = 0; c < img.channels; ++c) {
        int src = img.channels - 1 - c;  // BGR -> RGB
        if (img.channels == 1) src = 0;
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) img.at(c, y, x) = planes[src].at<float>(y, x);
    }
    return img;
}

}  // namespace

Image resize_frame(const Image& img, int target_long_side) {
    if (img.empty()) throw EmptyImage("resize_frame on empty image");
    int longer = std::max(img.height, img.width);
    if (longer == target_long_side) return img;
    double scale = static_cast<double>(target_long_side) / longer;
    int nh = img.height >= img.width ? target_long_side
                                     : static_cast<int>(std::lround(img.height * scale));
    int nw = img.width > img.height ? target_long_side
                                    : static_cast<int>(std::lround(img.width * scale));
    cv::Mat src = to_mat(img), dst;
    cv::resize(src, dst, cv::Size(nw, nh), 0, 0, scale < 1.0 ? cv::INTER_AREA : cv::INTER_LINEAR);
    return from_mat(dst);
}

Image to_grayscale(const Image& img) {
    if (img.empty()) throw EmptyImage("to_grayscale on empty image");
    if (img.channels == 1) return img;
    if (img.channels != 3) throw ChannelMismatch("grayscale conversion expects 1 or 3 channels");
    Image out(1, img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.at(0, y, x) = 0.299f * img.at(0, y, x) + 0.587f * img.at(1, y, x) + 0.114f * img.at(2, y, x);
    return out;
}

void save_image(const Image& img, const std::string& path) {
    if (img.empty()) throw EmptyImage("save_image on empty image");
    cv::Mat f = to_mat(img), u8;
    f.convertTo(u8, img.channels == 1 ? CV_8U : CV_8UC3, 255.0);
    if (!cv::imwrite(path, u8)) throw FormatError("cannot write image " + path);
}

Image load_image(const std::string& path) {
    cv::Mat m = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (m.empty()) throw FormatError("cannot read image " + path);
    cv::Mat f;
    m.convertTo(f, CV_32F, 1.0 / 255.0);
    return from_mat(f);
}

}  // namespace avact
