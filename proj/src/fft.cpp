#include "deblur/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <string>

#include "deblur/errors.hpp"

namespace deblur {

namespace {

// FFTW plan creation/destruction is not thread-safe; execution is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

Spectrum::Spectrum(int grid_width, int grid_height)
    : grid_width_(grid_width), grid_height_(grid_height),
      coef_(static_cast<std::size_t>(grid_width / 2 + 1) * grid_height) {}

Fft2D::Fft2D(int width, int height) : width_(width), height_(height) {
  if (width < 1 || height < 1)
    throw InvalidArgumentError("FFT grid must be at least 1x1");
  const std::size_t n_real = static_cast<std::size_t>(width) * height;
  const std::size_t n_cplx = static_cast<std::size_t>(width / 2 + 1) * height;
  real_buf_ = fftw_alloc_real(n_real);
  fftw_complex* cbuf = fftw_alloc_complex(n_cplx);
  cplx_buf_ = cbuf;
  std::lock_guard<std::mutex> lock(plan_mutex());
  plan_fwd_ = fftw_plan_dft_r2c_2d(height, width, real_buf_, cbuf, FFTW_ESTIMATE);
  plan_inv_ = fftw_plan_dft_c2r_2d(height, width, cbuf, real_buf_, FFTW_ESTIMATE);
}

Fft2D::~Fft2D() {
  std::lock_guard<std::mutex> lock(plan_mutex());
  if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  if (plan_inv_) fftw_destroy_plan(static_cast<fftw_plan>(plan_inv_));
  fftw_free(real_buf_);
  fftw_free(cplx_buf_);
}

Spectrum Fft2D::forward(const Image& img) const {
  if (img.width() != width_ || img.height() != height_)
    throw InvalidArgumentError("image does not match FFT grid");
  std::memcpy(real_buf_, img.data(), img.size() * sizeof(double));
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  Spectrum out(width_, height_);
  std::memcpy(out.data(), cplx_buf_, out.coef_count() * sizeof(std::complex<double>));
  return out;
}

Image Fft2D::inverse(const Spectrum& spec) const {
  if (spec.grid_width() != width_ || spec.grid_height() != height_)
    throw InvalidArgumentError("spectrum does not match FFT grid");
  std::memcpy(cplx_buf_, spec.data(), spec.coef_count() * sizeof(std::complex<double>));
  fftw_execute(static_cast<fftw_plan>(plan_inv_));
  Image out(width_, height_);
  const double scale = 1.0 / (static_cast<double>(width_) * height_);
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = real_buf_[i] * scale;
  return out;
}

Image pad_kernel_to_grid(const Kernel& ker, int width, int height) {
  if (ker.size() > width || ker.size() > height)
    throw InvalidArgumentError("kernel larger than target grid");
  Image grid(width, height);
  const int r = ker.radius();
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      int gx = ((dx % width) + width) % width;
      int gy = ((dy % height) + height) % height;
      grid(gx, gy) += ker(dx + r, dy + r);
    }
  return grid;
}

Kernel crop_grid_to_kernel(const Image& grid, int size) {
  if (size > grid.width() || size > grid.height())
    throw InvalidArgumentError("crop window larger than grid");
  Kernel out(size);
  const int r = size / 2;
  const int w = grid.width(), h = grid.height();
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      int gx = ((dx % w) + w) % w;
      int gy = ((dy % h) + h) % h;
      out(dx + r, dy + r) = grid(gx, gy);
    }
  return out;
}

Spectrum kernel_transfer(const Kernel& ker, int width, int height) {
  Fft2D fft(width, height);
  return fft.forward(pad_kernel_to_grid(ker, width, height));
}

Spectrum gradient_transfer(Direction dir, int width, int height) {
  Spectrum out(width, height);
  const double two_pi = 2.0 * std::numbers::pi;
  for (int v = 0; v < height; ++v)
    for (int u = 0; u < out.spec_width(); ++u) {
      double phase = (dir == Direction::Horizontal) ? two_pi * u / width : two_pi * v / height;
      out.at(u, v) = std::polar(1.0, phase) - 1.0;
    }
  return out;
}

Image apply_spectrum(const Spectrum& tf, const Image& img) {
  if (tf.grid_width() != img.width() || tf.grid_height() != img.height())
    throw InvalidArgumentError("spectrum grid does not match image");
  Fft2D fft(img.width(), img.height());
  Spectrum s = fft.forward(img);
  for (std::size_t i = 0; i < s.coef_count(); ++i) s.data()[i] *= tf.data()[i];
  return fft.inverse(s);
}

Image convolve_circular(const Image& img, const Kernel& ker) {
  if (ker.size() > img.width() || ker.size() > img.height())
    throw InvalidArgumentError("kernel (" + std::to_string(ker.size()) +
                               ") exceeds image dimensions");
  return apply_spectrum(kernel_transfer(ker, img.width(), img.height()), img);
}

double spatial_squared_norm(const Spectrum& spec) {
  const int w = spec.grid_width(), h = spec.grid_height();
  const int sw = spec.spec_width();
  double acc = 0.0;
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < sw; ++u) {
      // Columns 0 and W/2 (even W) are their own conjugates; the rest
      // stand for two coefficients of the full spectrum.
      double weight = (u == 0 || (w % 2 == 0 && u == w / 2)) ? 1.0 : 2.0;
      acc += weight * std::norm(spec.at(u, v));
    }
  return acc / (static_cast<double>(w) * h);
}

Image edge_taper(const Image& img, const Kernel& ker) {
  const int band = ker.radius();
  if (band == 0) return img;
  Image blurred = convolve_circular(img, ker);
  const int w = img.width(), h = img.height();
  Image out = img;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int d = std::min(std::min(x, w - 1 - x), std::min(y, h - 1 - y));
      if (d >= band) continue;
      double alpha = 0.5 - 0.5 * std::cos(std::numbers::pi * d / band);
      out(x, y) = alpha * img(x, y) + (1.0 - alpha) * blurred(x, y);
    }
  return out;
}

}  // namespace deblur
