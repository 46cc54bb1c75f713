#pragma once

#include <vector>

#include "deblur/fft.hpp"
#include "deblur/image.hpp"
#include "deblur/kernel.hpp"

namespace deblur {

/// Effective weights for one inner solve. `continuation` is the c^i
/// factor of the current outer iteration; the solver folds it into the
/// data-fidelity weight (lambda / c^i), which scales the whole
/// objective so the printed threshold formula applies unchanged.
struct InnerParams {
  double alpha = 0.0;         // l0 weight (0 switches the split off)
  double beta = 0.0;          // l2 weight
  double lambda = 1.0;        // data fidelity weight
  double gamma = 1.0;         // augmented-Lagrangian penalty
  double continuation = 1.0;  // c^i, in (0, 1]
  int iters = 1;              // inner iteration count (L or J)
};

/// Decomposed objective value recorded after an iteration. `total` is
/// the plain alternating-minimization energy under this outer
/// iteration's weights; the components allow re-weighting afterwards.
struct EnergySample {
  double fidelity = 0.0;  // squared data residual
  double l0 = 0.0;        // nonzero count of the regularized field
  double l2 = 0.0;        // squared norm of the regularized field
  double total = 0.0;     // lambda*fidelity + c^i*(alpha*l0 + beta*l2)
};

double energy_reweighted(const EnergySample& e, double lambda, double alpha_scaled,
                         double beta_scaled);

/// The kernel subproblem takes its gradient-domain data terms in 8-bit
/// intensity units: observed images live in [0,1], but the fixed split
/// penalty (gamma_k = 1e6) is calibrated against intensity-level
/// magnitudes, so x_d and y_d are scaled by 255 when the data terms are
/// formed.
constexpr double kKernelDataScale = 255.0;

/// Proximal map of the scaled counting norm: returns `value` when
/// |value| >= threshold (ties kept), else 0.
double hard_threshold(double value, double threshold);

/// Threshold at which the l0 prox switches: (2*alpha/gamma)^(1/2).
double l0_threshold(double alpha, double gamma);

/// Auxiliary split variables and multipliers of the image subproblem,
/// all dimensioned like the image. Zero-initialized per outer iteration.
struct ImageSplitState {
  Image w_h, w_v;    // split targets for the two gradient fields
  Image mu_h, mu_v;  // Lagrange multipliers

  static ImageSplitState zeros(int width, int height);
};

/// Split variable and multiplier of the kernel subproblem (kernel-shaped).
struct KernelSplitState {
  Kernel g;
  Kernel mu;

  static KernelSplitState zeros(int size);
};

struct ImageSolveResult {
  Image x;
  std::vector<EnergySample> trace;  // one sample per inner iteration
};

struct KernelSolveResult {
  Kernel kernel;
  std::vector<EnergySample> trace;
};

/// Sharp-image estimation: L rounds of hard-threshold w-update,
/// frequency-domain quadratic x-update and multiplier update. With
/// alpha = 0 the split is inactive and the problem collapses to a
/// single quadratic solve.
ImageSolveResult solve_image(const Image& y, const Kernel& ker, const InnerParams& params,
                             const Image& init_x);

/// Kernel estimation in the gradient domain: data terms are the h/v
/// derivatives of x and y; the quadratic step runs on the full image
/// grid and is cropped to the central size x size window each round.
/// The returned kernel is projected onto C.
KernelSolveResult solve_kernel(const Image& x, const Image& y, int size,
                               const InnerParams& params, const Kernel& init_k);

/// Single frequency-domain x-update with fixed splits/multipliers;
/// exposed so the solve can be checked against a dense solve of the
/// same normal equations.
Image image_quadratic_step(const Image& y, const Kernel& ker, const ImageSplitState& s,
                           double lambda_eff, double beta_eff, double gamma);

/// Single frequency-domain k-update, cropped but not projected.
Kernel kernel_quadratic_step(const Image& x, const Image& y, int size,
                             const KernelSplitState& s, double lambda_eff, double beta_eff,
                             double gamma);

}  // namespace deblur
