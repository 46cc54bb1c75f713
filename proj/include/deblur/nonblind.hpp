#pragma once

#include <vector>

#include "deblur/image.hpp"
#include "deblur/kernel.hpp"

namespace deblur {

/// Settings of the final restoration stage: half-quadratic splitting on
/// the image gradients with an |.|^p prior (analytic prox for p = 1/2
/// and 2/3, linear shrinkage for p = 2).
struct NonBlindParams {
  double fidelity_weight = 2000.0;   // on [0,1]-scaled images
  double prior_exponent = 2.0 / 3.0; // one of 1/2, 2/3, 2
  int hq_iters = 4;
  double penalty_init = 1.0;
  double penalty_step = 4.0;         // ratio of the geometric penalty schedule
};

void validate(const NonBlindParams& params);

/// argmin_w (gamma/2)(w - v)^2 + alpha*|w|^p for p in {1/2, 2/3, 2}.
double prox_lp(double v, double alpha, double gamma, double p);

/// Per-iteration diagnostics of the half-quadratic loop.
struct NonBlindTrace {
  std::vector<double> constraint_violation;  // ||w - grad x||_2 after each x-update
};

/// Non-blind deconvolution of a single channel; output clamped to [0,1].
Image deconvolve(const Image& y, const Kernel& ker, const NonBlindParams& params,
                 NonBlindTrace* trace = nullptr);

/// Per-channel deconvolution with a shared kernel.
std::vector<Image> deconvolve_channels(const std::vector<Image>& channels,
                                       const Kernel& ker, const NonBlindParams& params);

}  // namespace deblur
