#pragma once

// PGM/PPM (binary P5/P6) and PNG codecs for GrayImage. PNG goes through
// libpng's simplified API; link PNG::PNG.

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "image.hpp"

namespace gradpres {

enum class ImageFormat { PGM, PNG };

using WarningSink = std::function<void(const std::string&)>;

inline void warn_stderr(const std::string& msg) { std::cerr << "warning: " << msg << '\n'; }

/// Format from the extension: .png is PNG, .pgm/.pnm/.ppm is PGM.
inline ImageFormat format_for_path(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    if (ext == ".png") return ImageFormat::PNG;
    if (ext == ".pgm" || ext == ".pnm" || ext == ".ppm") return ImageFormat::PGM;
    throw IoError(path.string(), "unsupported image extension '" + ext + "'");
}

inline std::uint8_t to_byte(double v) {
    return std::uint8_t(std::clamp(std::lround(v * 255.0), 0L, 255L));
}

inline double luma(double r, double g, double b) { return 0.299 * r + 0.587 * g + 0.114 * b; }

/// Writes through a sibling temporary and renames over the target, so readers
/// never see a partial file.
template <class Writer>
void write_atomically(const std::filesystem::path& path, Writer&& write) {
    namespace fs = std::filesystem;
    const fs::path parent = path.has_parent_path() ? path.parent_path() : fs::path(".");
    if (!fs::is_directory(parent)) throw IoError(path.string(), "parent directory does not exist");
    std::random_device rd;
    const fs::path tmp = parent / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
    try {
        write(tmp);
        fs::rename(tmp, path);
    } catch (const IoError&) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw;
    } catch (const std::exception& e) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw IoError(path.string(), e.what());
    }
}

namespace detail {

inline std::vector<char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path.string(), "cannot open for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Header token reader for netpbm: skips whitespace and '#' comments.
class PnmHeader {
public:
    PnmHeader(const std::vector<char>& bytes, const std::string& path)
        : bytes_(bytes), path_(path) {}

    std::string token() {
        for (;;) {
            while (pos_ < bytes_.size() && std::isspace(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
            if (pos_ < bytes_.size() && bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
                continue;
            }
            break;
        }
        std::string tok;
        while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
            tok += bytes_[pos_++];
        }
        if (tok.empty()) throw IoError(path_, "truncated netpbm header");
        return tok;
    }

    unsigned long number() {
        const std::string tok = token();
        if (!std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
            tok.size() > 9) {
            throw IoError(path_, "bad netpbm header field '" + tok + "'");
        }
        return std::stoul(tok);
    }

    // Exactly one whitespace byte separates the header from the raster.
    std::size_t raster_offset() const { return pos_ + 1; }

private:
    const std::vector<char>& bytes_;
    std::string path_;
    std::size_t pos_ = 0;
};

inline GrayImage decode_pnm(const std::filesystem::path& path, const WarningSink& warn) {
    const auto bytes = read_file(path);
    PnmHeader hdr(bytes, path.string());
    const std::string magic = hdr.token();
    if (magic != "P5" && magic != "P6") {
        throw IoError(path.string(), "unsupported netpbm type '" + magic + "' (need P5 or P6)");
    }
    const unsigned long width = hdr.number(), height = hdr.number(), maxval = hdr.number();
    if (maxval == 0 || maxval > 65535) throw IoError(path.string(), "bad maxval");
    if (width < kMinImageSide || height < kMinImageSide) {
        throw IoError(path.string(), "image smaller than 3x3");
    }
    const std::size_t channels = magic == "P6" ? 3 : 1;
    const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
    const std::size_t need = width * height * channels * sample_bytes;
    const std::size_t off = hdr.raster_offset();
    if (off > bytes.size() || bytes.size() - off < need) {
        throw IoError(path.string(), "truncated raster");
    }
    const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + off);
    const auto sample = [&](std::size_t i) -> double {
        const unsigned v = sample_bytes == 2 ? (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1] : raw[i];
        if (v > maxval) throw IoError(path.string(), "sample exceeds maxval");
        return double(v) / double(maxval);
    };
    if (channels == 3) warn(path.string() + ": color image converted to luma");
    RealGrid g(height, width);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = channels == 1 ? sample(i)
                             : std::clamp(luma(sample(3 * i), sample(3 * i + 1), sample(3 * i + 2)),
                                          0.0, 1.0);
    }
    return GrayImage(std::move(g));
}

inline GrayImage decode_png(const std::filesystem::path& path, const WarningSink& warn) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.string().c_str())) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw IoError(path.string(), "png: " + msg);
    }
    const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
    img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const std::size_t width = img.width, height = img.height;
    std::vector<png_byte> buf(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw IoError(path.string(), "png: " + msg);
    }
    if (width < kMinImageSide || height < kMinImageSide) {
        throw IoError(path.string(), "image smaller than 3x3");
    }
    if (color) warn(path.string() + ": color image converted to luma");
    RealGrid g(height, width);
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] = color ? std::clamp(luma(buf[3 * i] / 255.0, buf[3 * i + 1] / 255.0,
                                       buf[3 * i + 2] / 255.0),
                                  0.0, 1.0)
                     : buf[i] / 255.0;
    }
    return GrayImage(std::move(g));
}

inline std::vector<std::uint8_t> to_bytes(const RealGrid& g) {
    std::vector<std::uint8_t> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = to_byte(g[i]);
    return out;
}

inline void write_pgm(const std::filesystem::path& path, std::size_t height, std::size_t width,
                      const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path.string(), "cannot open for writing");
    out << "P5\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw IoError(path.string(), "write failed");
}

inline void write_png(const std::filesystem::path& path, std::size_t height, std::size_t width,
                      const std::vector<std::uint8_t>& bytes) {
    png_image img{};
    img.version = PNG_IMAGE_VERSION;
    img.width = png_uint_32(width);
    img.height = png_uint_32(height);
    img.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&img, path.string().c_str(), 0, bytes.data(), 0, nullptr)) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw IoError(path.string(), "png: " + msg);
    }
}

} // namespace detail

/// Loads an 8- or 16-bit grayscale image (PGM P5 or PNG) into [0,1]. Color
/// input (P6, RGB PNG) is reduced to 0.299R + 0.587G + 0.114B and reported
/// through `warn`.
inline GrayImage load_image(const std::filesystem::path& path,
                            const WarningSink& warn = warn_stderr) {
    if (!std::filesystem::is_regular_file(path)) throw IoError(path.string(), "no such file");
    return format_for_path(path) == ImageFormat::PNG ? detail::decode_png(path, warn)
                                                     : detail::decode_pnm(path, warn);
}

/// Writes 8-bit grayscale, each pixel round(v * 255). Format follows the
/// extension.
inline void save_bytes(const std::filesystem::path& path, std::size_t height, std::size_t width,
                       const std::vector<std::uint8_t>& bytes) {
    const ImageFormat fmt = format_for_path(path);
    write_atomically(path, [&](const std::filesystem::path& tmp) {
        if (fmt == ImageFormat::PNG) {
            detail::write_png(tmp, height, width, bytes);
        } else {
            detail::write_pgm(tmp, height, width, bytes);
        }
    });
}

inline void save_image(const GrayImage& img, const std::filesystem::path& path) {
    save_bytes(path, img.height(), img.width(), detail::to_bytes(img.pixels()));
}

} // namespace gradpres
