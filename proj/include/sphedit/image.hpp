#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sphedit/errors.hpp"

namespace sphedit {

/// Equirectangular pixel grid. Samples are kept as 16-bit channel values
/// regardless of the file depth; `source_depth` remembers what the file had
/// so round trips and default saves stay faithful.
struct SphericalImage {
    int width = 0;
    int height = 0;
    int channels = 3; // 3 or 4
    int source_depth = 16;
    std::vector<uint16_t> px;

    static SphericalImage create(int w, int h, int ch = 3, int depth = 16) {
        SphericalImage img;
        img.width = w;
        img.height = h;
        img.channels = ch;
        img.source_depth = depth;
        img.px.assign(size_t(w) * h * ch, 0);
        return img;
    }

    bool empty() const { return px.empty(); }
    bool is_equirect() const { return width == 2 * height && height > 0; }

    uint16_t& at(int x, int y, int c) {
        return px[(size_t(y) * width + x) * channels + c];
    }
    uint16_t at(int x, int y, int c) const {
        return px[(size_t(y) * width + x) * channels + c];
    }

    void set_rgb(int x, int y, uint16_t r, uint16_t g, uint16_t b) {
        at(x, y, 0) = r;
        at(x, y, 1) = g;
        at(x, y, 2) = b;
        if (channels == 4)
            at(x, y, 3) = 0xffff;
    }
};

// PNG (8/16-bit) or JPEG (8-bit), detected from the file signature.
SphericalImage load_image(const std::string& path);

// depth 0 writes the image's source depth; otherwise 8 or 16.
void save_png(const std::string& path, const SphericalImage& img, int depth = 0);

// Pads a non-2:1 image with black on the right/bottom to reach the 2:1
// aspect (the --allow-nonstandard path).
SphericalImage pad_to_equirect(const SphericalImage& img);

} // namespace sphedit
