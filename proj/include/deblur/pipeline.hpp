#pragma once

#include <string>
#include <vector>

#include "deblur/image.hpp"
#include "deblur/kernel.hpp"
#include "deblur/nonblind.hpp"
#include "deblur/osal.hpp"

namespace deblur {

/// Regularizer variants: R1 is the full bi-l0-l2 form; R2 drops the
/// image l2 term; R3 additionally drops the kernel l0 term.
enum class Variant { R1, R2, R3 };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);

struct SolverParams {
  double lambda = 100.0;
  double alpha_x = 0.25;
  double beta_x = 5.0;
  double alpha_k = 0.25;
  double beta_k = 5.0;
  double gamma_x = 100.0;
  double gamma_k = 1e6;
  double c_x = 2.0 / 3.0;
  double c_k = 4.0 / 5.0;
  int outer_iters = 10;        // I
  int inner_iters_image = 10;  // L
  int inner_iters_kernel = 10; // J
  int scales = 4;              // S
  int kernel_size = 27;
  double pyramid_factor = 2.0;
  Variant variant = Variant::R1;
};

void validate(const SolverParams& params);

/// Energies recorded after one outer iteration (image then kernel solve).
struct OuterTrace {
  EnergySample image;
  EnergySample kernel;
};

struct ScaleTrace {
  int level = 0;  // 0 = coarsest
  int width = 0, height = 0;
  int kernel_size = 0;
  std::vector<OuterTrace> outer;
};

struct ScaleResult {
  Image x;
  Kernel kernel;
  ScaleTrace trace;
};

struct DeblurResult {
  Kernel kernel;                  // finest-scale estimate, in C
  Image intermediate;             // final x of the finest scale
  std::vector<Image> restored;    // non-blind output, one plane per channel
  std::vector<ScaleTrace> traces; // coarsest to finest
  double elapsed_seconds = 0.0;
};

/// Effective inner-solver weights for outer iteration `i` under the
/// given variant (continuation factors c^i, variant zeroing applied).
InnerParams image_inner_params(const SolverParams& p, int outer_index);
InnerParams kernel_inner_params(const SolverParams& p, int outer_index);

/// Kernel size used at pyramid level `level` (0 = coarsest) of an
/// S-level pyramid: nearest odd to kernel_size / 2^(S-1-level), at
/// least 3.
int kernel_size_at_level(int kernel_size, int scales, int level);

/// One scale of the alternating loop: I outer iterations of image
/// solve / kernel solve / projection, with continuation. `y_s` is
/// expected to be edge-tapered.
ScaleResult estimate_scale(const Image& y_s, const Kernel& k0, const Image& x0,
                           const SolverParams& params, int level);

/// Multi-scale kernel estimation (no restoration stage).
struct KernelEstimate {
  Kernel kernel;
  Image intermediate;
  std::vector<ScaleTrace> traces;
};
KernelEstimate estimate_kernel_multiscale(const Image& y, const SolverParams& params);

/// Full blind pipeline on a single channel: multi-scale estimation
/// followed by non-blind restoration.
DeblurResult deblur_blind(const Image& y, const SolverParams& params,
                          const NonBlindParams& nb_params);

/// Color front end: the kernel is estimated on the luma plane and the
/// restoration runs per channel with the shared kernel.
DeblurResult deblur_blind_color(const std::vector<Image>& channels,
                                const SolverParams& params,
                                const NonBlindParams& nb_params);

}  // namespace deblur
