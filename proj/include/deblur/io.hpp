#pragma once

#include <string>
#include <vector>

#include "deblur/image.hpp"
#include "deblur/kernel.hpp"

namespace deblur {

/// Planar multi-channel container used only at the I/O boundary; the
/// solvers work on single-channel images.
struct ColorImage {
  std::vector<Image> planes;  // 1 (gray) or 3 (RGB)

  int width() const { return planes.empty() ? 0 : planes[0].width(); }
  int height() const { return planes.empty() ? 0 : planes[0].height(); }
  int channels() const { return static_cast<int>(planes.size()); }

  /// Rec.601 luma for 3-channel images, the single plane otherwise.
  Image luma() const;
};

/// Reads an 8- or 16-bit PNG or PGM (chosen by extension); samples are
/// normalized to [0,1]. Alpha channels are stripped.
ColorImage load_image(const std::string& path);
Image load_image_gray(const std::string& path);

/// Writes a 16-bit PNG or PGM; samples are clamped to [0,1] and
/// re-quantized. PGM accepts only single-channel images.
void save_image(const ColorImage& img, const std::string& path);
void save_image_gray(const Image& img, const std::string& path);

/// Kernel visualization: max-normalized, upscaled by `upscale`
/// (bilinear), written as an 8-bit grayscale PNG.
void save_kernel_png(const Kernel& ker, const std::string& path, int upscale);

}  // namespace deblur
