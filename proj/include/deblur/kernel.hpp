#pragma once

#include <string>
#include <vector>

namespace deblur {

/// Square, odd-sized blur kernel raster. A kernel is "in C" when every
/// sample is >= 0 and the samples sum to 1 (the feasible set of the
/// estimation problem). Raw rasters (splits, multipliers) use the same
/// type without the constraint.
class Kernel {
 public:
  Kernel() = default;
  explicit Kernel(int size, double value = 0.0);
  Kernel(int size, std::vector<double> data);

  static Kernel dirac(int size);
  /// Uniform box kernel of the given size, already in C.
  static Kernel box(int size);

  int size() const { return size_; }
  int radius() const { return size_ / 2; }

  double& operator()(int x, int y) { return data_[static_cast<std::size_t>(y) * size_ + x]; }
  double operator()(int x, int y) const { return data_[static_cast<std::size_t>(y) * size_ + x]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  const std::vector<double>& values() const { return data_; }

  double sum() const;
  double min_value() const;
  bool all_finite() const;
  /// True when nonnegative and sum within `tol` of 1.
  bool in_constraint_set(double tol = 1e-9) const;

 private:
  int size_ = 0;
  std::vector<double> data_;
};

/// Projection onto C: clip negatives to zero, divide by the remaining
/// sum. Throws DegenerateKernelError when nothing positive remains.
Kernel project_simplex(const Kernel& raw);

/// Bilinear upsampling to `new_size` (odd, >= current) followed by
/// projection onto C.
Kernel upsample_kernel(const Kernel& ker, int new_size);

/// Exact zero-padding to a larger odd size, centered. Preserves C.
Kernel embed_kernel(const Kernel& ker, int new_size);

/// Plain-text serialization: first line "size N", then N rows of N
/// values. Round-trips doubles exactly.
std::string kernel_to_text(const Kernel& ker);
Kernel kernel_from_text(const std::string& text);
void save_kernel_text(const Kernel& ker, const std::string& path);
Kernel load_kernel_text(const std::string& path);

}  // namespace deblur
