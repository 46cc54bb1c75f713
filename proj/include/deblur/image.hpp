#pragma once

#include <cstddef>
#include <vector>

namespace deblur {

/// Single-channel raster of doubles, row-major. Observed images live in
/// [0,1]; solver intermediates are unbounded.
class Image {
 public:
  Image() = default;
  Image(int width, int height, double value = 0.0);
  Image(int width, int height, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  double operator()(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& pixels() { return data_; }
  const std::vector<double>& pixels() const { return data_; }

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }
  bool all_finite() const;

  double min_value() const;
  double max_value() const;
  double sum() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

enum class Direction { Horizontal, Vertical };

/// Forward first-order difference with circular wrap:
/// horizontal d(x,y) = img(x+1,y) - img(x,y), vertical analogous.
Image gradient(const Image& img, Direction dir);

/// Adjoint of `gradient` (negated backward difference with wrap).
Image gradient_adjoint(const Image& img, Direction dir);

/// Bilinear resize with align-centers mapping and edge clamping.
Image resize_bilinear(const Image& img, int new_width, int new_height);

/// Bilinear downsampling by `factor` (> 1). Output dimensions are
/// round(input/factor); throws PyramidTooDeepError if either drops
/// below 16 px.
Image downsample(const Image& img, double factor);

// Elementwise helpers used all over the solvers.
Image operator+(const Image& a, const Image& b);
Image operator-(const Image& a, const Image& b);
Image operator*(double s, const Image& a);
double dot(const Image& a, const Image& b);
double squared_norm(const Image& a);

void throw_if_not_finite(const Image& img, const char* where);

}  // namespace deblur
