#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "deblur/image.hpp"
#include "deblur/kernel.hpp"
#include "deblur/nonblind.hpp"
#include "deblur/pipeline.hpp"

namespace deblur {

/// One benchmark trial: the SSD error ratio compares restorations with
/// the estimated and the ground-truth kernel through the same non-blind
/// stage.
struct TrialRecord {
  std::string image_id;
  std::string kernel_id;
  std::string setting;  // kernel-size setting: "true", "medium", "large"
  double ssd_with_estimated = 0.0;
  double ssd_with_truth = 0.0;
  double error_ratio = 0.0;
  double psnr_db = 0.0;
  double elapsed_seconds = 0.0;
};

/// Cumulative histogram over integer bins r = 1..R; entry r-1 holds the
/// fraction of trials with error ratio below r.
struct Histogram {
  std::vector<double> fraction;
};

/// Forward model: circular convolution plus i.i.d. Gaussian noise of
/// standard deviation `noise_sigma` (in [0,1] units), deterministic for
/// a given seed.
Image synth_blur(const Image& x, const Kernel& ker, double noise_sigma, std::uint64_t seed);

/// Rasterizes a smooth random-walk motion trajectory with anti-aliased
/// (bilinear) deposition and projects it onto C. `length` must be
/// smaller than `size`; zero length gives a Dirac.
Kernel make_trajectory_kernel(int size, double length, double curvature, std::uint64_t seed);

/// Sum of squared differences over the central region left after
/// cropping `border_crop` pixels on each side.
double ssd(const Image& a, const Image& b, int border_crop);

/// 10*log10(1/MSE) for [0,1]-ranged images; +infinity when identical.
double psnr(const Image& a, const Image& b);

/// Circularly shifts `k_est` to the integer offset maximizing the
/// cross-correlation with `k_true` (removes the translation ambiguity
/// of blind estimation). Pure shift: the multiset of values is kept.
Kernel align_kernels(const Kernel& k_est, const Kernel& k_true);

/// Runs both deconvolution arms with identical settings and records the
/// SSD error ratio. Kernels of different sizes are zero-embedded to a
/// common grid; the estimated kernel is shift-aligned to the truth.
TrialRecord error_ratio_trial(const Image& x_true, const Image& y, const Kernel& k_est,
                              const Kernel& k_true, const NonBlindParams& nb);

Histogram cumulative_histogram(const std::vector<TrialRecord>& records, int max_bin);

// ---- Built-in synthetic corpus (4 textured images x 8 kernels) ----

constexpr int kCorpusImageCount = 4;
constexpr int kCorpusKernelCount = 8;
constexpr int kCorpusImageSize = 128;

Image corpus_image(int index);
Kernel corpus_kernel(int index);

struct EvalCase {
  std::string image_id;
  std::string kernel_id;
  Image sharp;
  Kernel kernel;
};

std::vector<EvalCase> builtin_corpus();

/// Loads (sharp image, kernel) pairs from a directory: images are
/// *.png / *.pgm, kernels *.txt; trials are the cross product.
std::vector<EvalCase> load_corpus(const std::string& dir);

enum class SizeSetting { True, Medium, Large };  // true, +8, +16 px

std::string to_string(SizeSetting s);
SizeSetting size_setting_from_string(const std::string& name);
int setting_size(SizeSetting s, int true_size);

struct EvalOptions {
  SizeSetting size_setting = SizeSetting::True;
  double noise_sigma = 0.005;
  std::uint64_t seed = 7;
  int jobs = 0;      // <= 0: hardware concurrency
  int max_bin = 6;
  bool oracle_truth = false;  // skip estimation, score the true kernel
  SolverParams solver;        // kernel_size is derived per trial
  NonBlindParams nonblind;
};

/// Runs every corpus trial (in parallel when jobs > 1) and returns the
/// records sorted by (image, kernel, setting).
std::vector<TrialRecord> run_eval(const std::vector<EvalCase>& cases,
                                  const EvalOptions& options);

/// Blurred observation and solver parameters of a single trial, exposed
/// so callers can reproduce one run exactly.
Image trial_observation(const EvalCase& c, const EvalOptions& options, int case_index);

void write_trials_csv(const std::vector<TrialRecord>& records, const std::string& path);
void write_histogram_csv(const Histogram& hist, const std::string& path);

}  // namespace deblur
