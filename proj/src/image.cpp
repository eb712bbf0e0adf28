#include "sphedit/image.hpp"

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <memory>

#include <jpeglib.h>
#include <png.h>

namespace sphedit {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f)
            std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

SphericalImage load_png_file(std::FILE* fp, const std::string& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failed");
    }
    std::vector<png_bytep> rows;
    std::vector<uint8_t> raw;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("failed to decode PNG: " + path);
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE)
        png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS))
        png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    bit_depth = png_get_bit_depth(png, info);
    int ch = int(png_get_channels(png, info));
    size_t stride = png_get_rowbytes(png, info);
    raw.resize(stride * h);
    rows.resize(h);
    for (png_uint_32 y = 0; y < h; ++y)
        rows[y] = raw.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    SphericalImage img = SphericalImage::create(int(w), int(h), ch, bit_depth);
    size_t n = size_t(w) * h * ch;
    if (bit_depth == 16) {
        for (size_t i = 0; i < n; ++i)
            img.px[i] = uint16_t((raw[2 * i] << 8) | raw[2 * i + 1]); // network order
    } else {
        for (size_t i = 0; i < n; ++i)
            img.px[i] = uint16_t(raw[i] * 257);
    }
    return img;
}

struct JpegErrorTrap {
    jpeg_error_mgr mgr;
    jmp_buf jb;
    char msg[JMSG_LENGTH_MAX];
};

void jpeg_error_trap(j_common_ptr ci) {
    auto* trap = reinterpret_cast<JpegErrorTrap*>(ci->err);
    (*ci->err->format_message)(ci, trap->msg);
    longjmp(trap->jb, 1);
}

SphericalImage load_jpeg_file(std::FILE* fp, const std::string& path) {
    jpeg_decompress_struct cinfo;
    JpegErrorTrap trap;
    cinfo.err = jpeg_std_error(&trap.mgr);
    trap.mgr.error_exit = jpeg_error_trap;
    if (setjmp(trap.jb)) {
        jpeg_destroy_decompress(&cinfo);
        throw IoError("failed to decode JPEG " + path + ": " + trap.msg);
    }
    jpeg_create_decompress(&cinfo);
    jpeg_stdio_src(&cinfo, fp);
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);
    SphericalImage img =
        SphericalImage::create(int(cinfo.output_width), int(cinfo.output_height), 3, 8);
    std::vector<uint8_t> row(size_t(cinfo.output_width) * 3);
    JSAMPROW rp = row.data();
    int y = 0;
    while (cinfo.output_scanline < cinfo.output_height) {
        jpeg_read_scanlines(&cinfo, &rp, 1);
        for (size_t i = 0; i < row.size(); ++i)
            img.px[size_t(y) * row.size() + i] = uint16_t(row[i] * 257);
        ++y;
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return img;
}

} // namespace

SphericalImage load_image(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp)
        throw IoError("cannot open " + path);
    unsigned char sig[8] = {0};
    size_t got = std::fread(sig, 1, 8, fp.get());
    std::rewind(fp.get());
    if (got >= 8 && png_sig_cmp(sig, 0, 8) == 0)
        return load_png_file(fp.get(), path);
    if (got >= 2 && sig[0] == 0xff && sig[1] == 0xd8)
        return load_jpeg_file(fp.get(), path);
    throw IoError("unsupported image format: " + path);
}

void save_png(const std::string& path, const SphericalImage& img, int depth_opt) {
    if (img.empty())
        throw IoError("refusing to write an empty image");
    const int depth = depth_opt == 0 ? img.source_depth : depth_opt;
    if (depth != 8 && depth != 16)
        throw IoError("PNG depth must be 8 or 16");

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp)
        throw IoError("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png)
        throw IoError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed to encode PNG: " + path);
    }
    png_init_io(png, fp.get());
    int color = img.channels == 4 ? PNG_COLOR_TYPE_RGB_ALPHA : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, img.width, img.height, depth, color, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    size_t rowlen = size_t(img.width) * img.channels;
    std::vector<uint8_t> row(rowlen * (depth == 16 ? 2 : 1));
    for (int y = 0; y < img.height; ++y) {
        const uint16_t* src = img.px.data() + size_t(y) * rowlen;
        if (depth == 16) {
            for (size_t i = 0; i < rowlen; ++i) {
                row[2 * i] = uint8_t(src[i] >> 8);
                row[2 * i + 1] = uint8_t(src[i] & 0xff);
            }
        } else {
            for (size_t i = 0; i < rowlen; ++i)
                row[i] = uint8_t((src[i] + 128) / 257);
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

SphericalImage pad_to_equirect(const SphericalImage& img) {
    if (img.is_equirect())
        return img;
    int h = img.height;
    int w = img.width;
    if (w < 2 * h)
        w = 2 * h;
    else
        h = (w + 1) / 2;
    w = 2 * h;
    SphericalImage out = SphericalImage::create(w, h, img.channels, img.source_depth);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c)
                out.at(x, y, c) = img.at(x, y, c);
    return out;
}

} // namespace sphedit
