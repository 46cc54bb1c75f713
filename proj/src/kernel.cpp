#include "deblur/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "deblur/errors.hpp"
#include "deblur/image.hpp"

namespace deblur {

Kernel::Kernel(int size, double value)
    : size_(size), data_(static_cast<std::size_t>(size) * size, value) {
  if (size < 1 || size % 2 == 0)
    throw InvalidArgumentError("kernel size must be odd and >= 1, got " + std::to_string(size));
}

Kernel::Kernel(int size, std::vector<double> data) : size_(size), data_(std::move(data)) {
  if (size < 1 || size % 2 == 0)
    throw InvalidArgumentError("kernel size must be odd and >= 1, got " + std::to_string(size));
  if (data_.size() != static_cast<std::size_t>(size) * size)
    throw InvalidArgumentError("kernel data length does not match size*size");
}

Kernel Kernel::dirac(int size) {
  Kernel k(size);
  k(size / 2, size / 2) = 1.0;
  return k;
}

Kernel Kernel::box(int size) {
  return Kernel(size, 1.0 / (static_cast<double>(size) * size));
}

double Kernel::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

double Kernel::min_value() const {
  return data_.empty() ? 0.0 : *std::min_element(data_.begin(), data_.end());
}

bool Kernel::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

bool Kernel::in_constraint_set(double tol) const {
  return min_value() >= 0.0 && std::abs(sum() - 1.0) <= tol;
}

Kernel project_simplex(const Kernel& raw) {
  Kernel out = raw;
  double total = 0.0;
  double* p = out.data();
  const std::size_t n = raw.values().size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(p[i]))
      throw DegenerateKernelError("kernel raster contains non-finite values");
    if (p[i] < 0.0) p[i] = 0.0;
    total += p[i];
  }
  if (total <= 0.0)
    throw DegenerateKernelError("kernel has no positive mass to normalize");
  for (std::size_t i = 0; i < n; ++i) p[i] /= total;
  return out;
}

Kernel upsample_kernel(const Kernel& ker, int new_size) {
  if (new_size % 2 == 0)
    throw InvalidArgumentError("kernel size must be odd, got " + std::to_string(new_size));
  if (new_size < ker.size())
    throw InvalidArgumentError("upsample target smaller than kernel");
  Image raster(ker.size(), ker.size(),
               std::vector<double>(ker.data(), ker.data() + ker.values().size()));
  Image resized = resize_bilinear(raster, new_size, new_size);
  Kernel out(new_size, resized.pixels());
  return project_simplex(out);
}

Kernel embed_kernel(const Kernel& ker, int new_size) {
  if (new_size % 2 == 0 || new_size < ker.size())
    throw InvalidArgumentError("embed target must be odd and >= kernel size");
  Kernel out(new_size);
  int off = (new_size - ker.size()) / 2;
  for (int y = 0; y < ker.size(); ++y)
    for (int x = 0; x < ker.size(); ++x)
      out(x + off, y + off) = ker(x, y);
  return out;
}

std::string kernel_to_text(const Kernel& ker) {
  std::ostringstream os;
  os << "size " << ker.size() << "\n";
  char buf[64];
  for (int y = 0; y < ker.size(); ++y) {
    for (int x = 0; x < ker.size(); ++x) {
      std::snprintf(buf, sizeof(buf), "%.17g", ker(x, y));
      os << buf << (x + 1 == ker.size() ? "" : " ");
    }
    os << "\n";
  }
  return os.str();
}

Kernel kernel_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string word;
  int size = 0;
  if (!(is >> word) || word != "size" || !(is >> size))
    throw IoError("kernel text must start with 'size N'");
  if (size < 1 || size % 2 == 0)
    throw IoError("kernel text declares invalid size " + std::to_string(size));
  std::vector<double> data(static_cast<std::size_t>(size) * size);
  for (double& v : data)
    if (!(is >> v)) throw IoError("kernel text truncated");
  return Kernel(size, std::move(data));
}

void save_kernel_text(const Kernel& ker, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << kernel_to_text(ker);
  if (!f) throw IoError("failed writing " + path);
}

Kernel load_kernel_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return kernel_from_text(ss.str());
}

}  // namespace deblur
