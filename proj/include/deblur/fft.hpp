#pragma once

#include <complex>
#include <vector>

#include "deblur/image.hpp"
#include "deblur/kernel.hpp"

namespace deblur {

/// Frequency-domain transfer function on a W x H spatial grid. Only the
/// non-redundant half spectrum of the real transform is stored
/// (grid_width/2 + 1 columns, grid_height rows).
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(int grid_width, int grid_height);

  int grid_width() const { return grid_width_; }
  int grid_height() const { return grid_height_; }
  int spec_width() const { return grid_width_ / 2 + 1; }

  std::complex<double>& at(int u, int v) { return coef_[static_cast<std::size_t>(v) * spec_width() + u]; }
  std::complex<double> at(int u, int v) const { return coef_[static_cast<std::size_t>(v) * spec_width() + u]; }

  std::complex<double>* data() { return coef_.data(); }
  const std::complex<double>* data() const { return coef_.data(); }
  std::size_t coef_count() const { return coef_.size(); }

  bool same_grid(const Spectrum& other) const {
    return grid_width_ == other.grid_width_ && grid_height_ == other.grid_height_;
  }

 private:
  int grid_width_ = 0;
  int grid_height_ = 0;
  std::vector<std::complex<double>> coef_;
};

/// Forward/inverse transform pair for one grid size. Owns its working
/// buffers, so a single instance must not be used from two threads at
/// once; distinct instances are independent.
class Fft2D {
 public:
  Fft2D(int width, int height);
  ~Fft2D();
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;

  int width() const { return width_; }
  int height() const { return height_; }

  Spectrum forward(const Image& img) const;
  Image inverse(const Spectrum& spec) const;

 private:
  int width_ = 0;
  int height_ = 0;
  void* plan_fwd_ = nullptr;
  void* plan_inv_ = nullptr;
  double* real_buf_ = nullptr;
  void* cplx_buf_ = nullptr;
};

/// Kernel embedded on a W x H grid with its center at the origin
/// (wrap-around), so that pointwise spectral multiplication performs
/// centered circular convolution.
Image pad_kernel_to_grid(const Kernel& ker, int width, int height);

/// Central size x size window of a full-grid raster, inverse of
/// pad_kernel_to_grid.
Kernel crop_grid_to_kernel(const Image& grid, int size);

/// Transfer function of a kernel on the given grid.
Spectrum kernel_transfer(const Kernel& ker, int width, int height);

/// Transfer function of the forward-difference operator.
Spectrum gradient_transfer(Direction dir, int width, int height);

/// Pointwise application of a transfer function to an image.
Image apply_spectrum(const Spectrum& tf, const Image& img);

/// Centered circular convolution via the FFT.
Image convolve_circular(const Image& img, const Kernel& ker);

/// Squared L2 norm of the spatial signal a spectrum represents
/// (Parseval, accounting for the stored half spectrum).
double spatial_squared_norm(const Spectrum& spec);

/// Blends the boundary band (width = kernel radius) of `img` toward its
/// kernel-blurred version with a cosine window, attenuating wrap-around
/// seams; interior pixels are returned bit-identical.
Image edge_taper(const Image& img, const Kernel& ker);

}  // namespace deblur
