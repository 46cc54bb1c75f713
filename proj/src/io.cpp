#include "deblur/io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

#include "deblur/errors.hpp"

namespace deblur {

namespace {

std::string lower_extension(const std::string& path) {
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const { if (f) std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::uint16_t quantize16(double v) {
  return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * 65535.0));
}

std::uint8_t quantize8(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

ColorImage load_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng initialization failed");
  }
  std::vector<png_byte> buffer;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode PNG " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_uint_32 width = png_get_image_width(png, info);
  png_uint_32 height = png_get_image_height(png, info);
  int color_type = png_get_color_type(png, info);
  int bit_depth = png_get_bit_depth(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS))
    png_set_strip_alpha(png);
  png_read_update_info(png, info);

  color_type = png_get_color_type(png, info);
  bit_depth = png_get_bit_depth(png, info);
  int channels = png_get_channels(png, info);
  if ((channels != 1 && channels != 3) || (bit_depth != 8 && bit_depth != 16)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("unsupported PNG layout in " + path);
  }

  std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = buffer.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  ColorImage out;
  out.planes.assign(channels, Image(static_cast<int>(width), static_cast<int>(height)));
  const double scale = bit_depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
  for (png_uint_32 y = 0; y < height; ++y) {
    const png_byte* row = buffer.data() + y * rowbytes;
    for (png_uint_32 x = 0; x < width; ++x)
      for (int c = 0; c < channels; ++c) {
        double v;
        if (bit_depth == 16) {
          std::size_t idx = (static_cast<std::size_t>(x) * channels + c) * 2;
          v = ((row[idx] << 8) | row[idx + 1]) * scale;  // PNG 16-bit is big-endian
        } else {
          v = row[static_cast<std::size_t>(x) * channels + c] * scale;
        }
        out.planes[c](static_cast<int>(x), static_cast<int>(y)) = v;
      }
  }
  return out;
}

void save_png(const ColorImage& img, const std::string& path, int bit_depth) {
  if (img.channels() != 1 && img.channels() != 3)
    throw InvalidArgumentError("PNG output supports 1 or 3 channels");
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot open " + path + " for writing");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode PNG " + path);
  }
  png_init_io(png, fp.get());

  const int w = img.width(), h = img.height(), ch = img.channels();
  png_set_IHDR(png, info, w, h, bit_depth,
               ch == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const std::size_t bytes_per_sample = bit_depth == 16 ? 2 : 1;
  std::vector<png_byte> row(static_cast<std::size_t>(w) * ch * bytes_per_sample);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < ch; ++c) {
        std::size_t idx = (static_cast<std::size_t>(x) * ch + c) * bytes_per_sample;
        if (bit_depth == 16) {
          std::uint16_t q = quantize16(img.planes[c](x, y));
          row[idx] = static_cast<png_byte>(q >> 8);
          row[idx + 1] = static_cast<png_byte>(q & 0xFF);
        } else {
          row[idx] = quantize8(img.planes[c](x, y));
        }
      }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

ColorImage load_pgm(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::string magic;
  f >> magic;
  if (magic != "P5") throw IoError(path + " is not a binary PGM (P5)");

  auto next_int = [&]() {
    // Skips whitespace and '#' comment lines.
    for (;;) {
      int c = f.peek();
      if (c == '#') { std::string line; std::getline(f, line); continue; }
      if (std::isspace(c)) { f.get(); continue; }
      break;
    }
    long v = -1;
    f >> v;
    if (!f || v < 0) throw IoError("malformed PGM header in " + path);
    return v;
  };
  long w = next_int(), h = next_int(), maxval = next_int();
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
    throw IoError("malformed PGM header in " + path);
  f.get();  // single whitespace after maxval

  const bool wide = maxval > 255;
  std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h * (wide ? 2 : 1));
  f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!f) throw IoError("truncated PGM data in " + path);

  ColorImage out;
  out.planes.assign(1, Image(static_cast<int>(w), static_cast<int>(h)));
  const double scale = 1.0 / maxval;
  for (long y = 0; y < h; ++y)
    for (long x = 0; x < w; ++x) {
      std::size_t i = static_cast<std::size_t>(y) * w + x;
      long v = wide ? ((raw[2 * i] << 8) | raw[2 * i + 1]) : raw[i];  // big-endian
      out.planes[0](static_cast<int>(x), static_cast<int>(y)) = v * scale;
    }
  return out;
}

void save_pgm(const ColorImage& img, const std::string& path) {
  if (img.channels() != 1)
    throw InvalidArgumentError("PGM supports single-channel images only");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << "P5\n" << img.width() << " " << img.height() << "\n65535\n";
  const Image& p = img.planes[0];
  std::vector<unsigned char> raw(p.size() * 2);
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::uint16_t q = quantize16(p.data()[i]);
    raw[2 * i] = static_cast<unsigned char>(q >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(q & 0xFF);
  }
  f.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!f) throw IoError("failed writing " + path);
}

}  // namespace

Image ColorImage::luma() const {
  if (planes.empty()) throw InvalidArgumentError("empty image");
  if (planes.size() == 1) return planes[0];
  if (planes.size() != 3) throw InvalidArgumentError("luma expects 1 or 3 channels");
  Image out(width(), height());
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data()[i] = 0.299 * planes[0].data()[i] + 0.587 * planes[1].data()[i] +
                    0.114 * planes[2].data()[i];
  return out;
}

ColorImage load_image(const std::string& path) {
  std::string ext = lower_extension(path);
  if (ext == ".png") return load_png(path);
  if (ext == ".pgm") return load_pgm(path);
  throw IoError("unsupported image format '" + ext + "' (expected .png or .pgm)");
}

Image load_image_gray(const std::string& path) { return load_image(path).luma(); }

void save_image(const ColorImage& img, const std::string& path) {
  if (img.channels() == 0) throw InvalidArgumentError("empty image");
  std::string ext = lower_extension(path);
  if (ext == ".png") { save_png(img, path, 16); return; }
  if (ext == ".pgm") { save_pgm(img, path); return; }
  throw IoError("unsupported image format '" + ext + "' (expected .png or .pgm)");
}

void save_image_gray(const Image& img, const std::string& path) {
  ColorImage c;
  c.planes.push_back(img);
  save_image(c, path);
}

void save_kernel_png(const Kernel& ker, const std::string& path, int upscale) {
  if (upscale < 1) throw InvalidArgumentError("kernel PNG upscale factor must be >= 1");
  double peak = 0.0;
  for (double v : ker.values()) peak = std::max(peak, v);
  Image raster(ker.size(), ker.size());
  if (peak > 0.0)
    for (int y = 0; y < ker.size(); ++y)
      for (int x = 0; x < ker.size(); ++x)
        raster(x, y) = ker(x, y) / peak;
  Image scaled = upscale == 1 ? raster
                              : resize_bilinear(raster, ker.size() * upscale,
                                                ker.size() * upscale);
  ColorImage c;
  c.planes.push_back(std::move(scaled));
  save_png(c, path, 8);
}

}  // namespace deblur
