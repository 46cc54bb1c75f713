#include "deblur/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "deblur/errors.hpp"

namespace deblur {

Image::Image(int width, int height, double value)
    : width_(width), height_(height),
      data_(static_cast<std::size_t>(width) * height, value) {
  if (width < 0 || height < 0)
    throw InvalidArgumentError("image dimensions must be non-negative");
}

Image::Image(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (data_.size() != static_cast<std::size_t>(width) * height)
    throw InvalidArgumentError("image data length does not match width*height");
}

bool Image::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

double Image::min_value() const {
  return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
}

double Image::max_value() const {
  return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end());
}

double Image::sum() const {
  return std::accumulate(data_.begin(), data_.end(), 0.0);
}

Image gradient(const Image& img, Direction dir) {
  const int w = img.width(), h = img.height();
  Image out(w, h);
  if (dir == Direction::Horizontal) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        out(x, y) = img((x + 1) % w, y) - img(x, y);
  } else {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        out(x, y) = img(x, (y + 1) % h) - img(x, y);
  }
  return out;
}

Image gradient_adjoint(const Image& img, Direction dir) {
  const int w = img.width(), h = img.height();
  Image out(w, h);
  if (dir == Direction::Horizontal) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        out(x, y) = img((x - 1 + w) % w, y) - img(x, y);
  } else {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        out(x, y) = img(x, (y - 1 + h) % h) - img(x, y);
  }
  return out;
}

Image resize_bilinear(const Image& img, int new_width, int new_height) {
  if (new_width < 1 || new_height < 1)
    throw InvalidArgumentError("resize target must be at least 1x1");
  const int w = img.width(), h = img.height();
  const double sx = static_cast<double>(w) / new_width;
  const double sy = static_cast<double>(h) / new_height;
  Image out(new_width, new_height);
  for (int oy = 0; oy < new_height; ++oy) {
    double fy = (oy + 0.5) * sy - 0.5;
    int y0 = static_cast<int>(std::floor(fy));
    double ty = fy - y0;
    int y0c = std::clamp(y0, 0, h - 1);
    int y1c = std::clamp(y0 + 1, 0, h - 1);
    for (int ox = 0; ox < new_width; ++ox) {
      double fx = (ox + 0.5) * sx - 0.5;
      int x0 = static_cast<int>(std::floor(fx));
      double tx = fx - x0;
      int x0c = std::clamp(x0, 0, w - 1);
      int x1c = std::clamp(x0 + 1, 0, w - 1);
      double top = (1.0 - tx) * img(x0c, y0c) + tx * img(x1c, y0c);
      double bot = (1.0 - tx) * img(x0c, y1c) + tx * img(x1c, y1c);
      out(ox, oy) = (1.0 - ty) * top + ty * bot;
    }
  }
  return out;
}

Image downsample(const Image& img, double factor) {
  if (!(factor > 1.0))
    throw InvalidArgumentError("downsample factor must be > 1");
  int nw = static_cast<int>(std::lround(img.width() / factor));
  int nh = static_cast<int>(std::lround(img.height() / factor));
  if (nw < 16 || nh < 16)
    throw PyramidTooDeepError("downsampled image would be smaller than 16 px (" +
                              std::to_string(nw) + "x" + std::to_string(nh) + ")");
  return resize_bilinear(img, nw, nh);
}

Image operator+(const Image& a, const Image& b) {
  Image out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] + b.data()[i];
  return out;
}

Image operator-(const Image& a, const Image& b) {
  Image out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] - b.data()[i];
  return out;
}

Image operator*(double s, const Image& a) {
  Image out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = s * a.data()[i];
  return out;
}

double dot(const Image& a, const Image& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a.data()[i] * b.data()[i];
  return acc;
}

double squared_norm(const Image& a) { return dot(a, a); }

void throw_if_not_finite(const Image& img, const char* where) {
  if (!img.all_finite())
    throw DivergenceError(std::string("non-finite values in ") + where, -1, -1, -1);
}

}  // namespace deblur
