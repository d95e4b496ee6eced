#pragma once

#include <cstddef>
#include <vector>

#include "avact/errors.hpp"

namespace avact {

// Planar image, channels x rows x cols, values in [0,1].
struct Image {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<float> data;

    Image() = default;
    Image(int c, int h, int w, float fill = 0.f)
        : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w, fill) {}

    bool empty() const { return data.empty(); }
    float& at(int c, int y, int x) { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
    float at(int c, int y, int x) const { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
};

// Resize so the longer side has 256 pixels, preserving aspect ratio
// (no-op if already conformant). Throws EmptyImage.
Image resize_frame(const Image& img, int target_long_side = 256);

// ITU-R 601 luma conversion; passes single-channel input through.
Image to_grayscale(const Image& img);

// PNG (or any OpenCV-supported format) I/O for frame directories.
void save_image(const Image& img, const std::string& path);
Image load_image(const std::string& path);

}  // namespace avact
