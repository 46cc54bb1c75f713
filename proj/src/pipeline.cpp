#include "deblur/pipeline.hpp"

#include <chrono>
#include <cmath>

#include "deblur/errors.hpp"
#include "deblur/fft.hpp"

namespace deblur {

namespace {

double luma_weight(int channel, int channel_count) {
  if (channel_count != 3) return 1.0 / channel_count;
  constexpr double w[3] = {0.299, 0.587, 0.114};
  return w[channel];
}

Image luma(const std::vector<Image>& channels) {
  Image out(channels[0].width(), channels[0].height());
  for (std::size_t c = 0; c < channels.size(); ++c) {
    double w = luma_weight(static_cast<int>(c), static_cast<int>(channels.size()));
    for (std::size_t i = 0; i < out.size(); ++i)
      out.data()[i] += w * channels[c].data()[i];
  }
  return out;
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::R1: return "R1";
    case Variant::R2: return "R2";
    case Variant::R3: return "R3";
  }
  return "R1";
}

Variant variant_from_string(const std::string& name) {
  if (name == "R1") return Variant::R1;
  if (name == "R2") return Variant::R2;
  if (name == "R3") return Variant::R3;
  throw InvalidArgumentError("unknown variant '" + name + "' (expected R1, R2 or R3)");
}

void validate(const SolverParams& p) {
  if (!(p.lambda > 0.0) || !(p.gamma_x > 0.0) || !(p.gamma_k > 0.0))
    throw InvalidArgumentError("lambda and penalty parameters must be > 0");
  if (p.alpha_x < 0.0 || p.beta_x < 0.0 || p.alpha_k < 0.0 || p.beta_k < 0.0)
    throw InvalidArgumentError("regularizer weights must be >= 0");
  if (!(p.c_x > 0.0) || p.c_x >= 1.0 || !(p.c_k > 0.0) || p.c_k >= 1.0)
    throw InvalidArgumentError("continuation factors must lie in (0, 1)");
  if (p.outer_iters < 1 || p.inner_iters_image < 1 || p.inner_iters_kernel < 1)
    throw InvalidArgumentError("iteration counts must be >= 1");
  if (p.scales < 1) throw InvalidArgumentError("scale count must be >= 1");
  if (p.kernel_size < 3 || p.kernel_size % 2 == 0)
    throw InvalidArgumentError("kernel_size must be odd and >= 3");
  if (!(p.pyramid_factor > 1.0))
    throw InvalidArgumentError("pyramid_factor must be > 1");
}

InnerParams image_inner_params(const SolverParams& p, int outer_index) {
  InnerParams ip;
  ip.alpha = p.alpha_x;
  ip.beta = (p.variant == Variant::R1) ? p.beta_x : 0.0;
  ip.lambda = p.lambda;
  ip.gamma = p.gamma_x;
  ip.continuation = std::pow(p.c_x, outer_index);
  ip.iters = p.inner_iters_image;
  return ip;
}

InnerParams kernel_inner_params(const SolverParams& p, int outer_index) {
  InnerParams ip;
  ip.alpha = (p.variant == Variant::R3) ? 0.0 : p.alpha_k;
  ip.beta = p.beta_k;
  ip.lambda = p.lambda;
  ip.gamma = p.gamma_k;
  ip.continuation = std::pow(p.c_k, outer_index);
  ip.iters = p.inner_iters_kernel;
  return ip;
}

int kernel_size_at_level(int kernel_size, int scales, int level) {
  double v = kernel_size / std::pow(2.0, scales - 1 - level);
  int odd = 2 * static_cast<int>(std::floor(v / 2.0)) + 1;
  return std::max(3, odd);
}

ScaleResult estimate_scale(const Image& y_s, const Kernel& k0, const Image& x0,
                           const SolverParams& params, int level) {
  validate(params);
  if (!k0.in_constraint_set())
    throw InvalidArgumentError("initial kernel must be in C");

  ScaleResult res;
  res.x = x0;
  res.kernel = k0;
  res.trace.level = level;
  res.trace.width = y_s.width();
  res.trace.height = y_s.height();
  res.trace.kernel_size = k0.size();
  res.trace.outer.reserve(params.outer_iters);

  for (int i = 0; i < params.outer_iters; ++i) {
    try {
      ImageSolveResult xs = solve_image(y_s, res.kernel, image_inner_params(params, i), res.x);
      res.x = std::move(xs.x);
      KernelSolveResult ks =
          solve_kernel(res.x, y_s, k0.size(), kernel_inner_params(params, i), res.kernel);
      res.kernel = std::move(ks.kernel);
      res.trace.outer.push_back({xs.trace.back(), ks.trace.back()});
    } catch (const DivergenceError& e) {
      throw e.with_context(level, i);
    }
  }
  return res;
}

KernelEstimate estimate_kernel_multiscale(const Image& y, const SolverParams& params) {
  validate(params);
  throw_if_not_finite(y, "input image");

  // Pyramid, finest first while building: each level is a downsample of
  // the previous one.
  std::vector<Image> pyramid;
  pyramid.push_back(y);
  for (int s = 1; s < params.scales; ++s)
    pyramid.push_back(downsample(pyramid.back(), params.pyramid_factor));
  if (pyramid.back().width() < 16 || pyramid.back().height() < 16)
    throw PyramidTooDeepError("image too small for the requested scale count");

  KernelEstimate out;
  Kernel k;
  Image x;
  for (int level = 0; level < params.scales; ++level) {
    const Image& y_s = pyramid[params.scales - 1 - level];
    int ksize = kernel_size_at_level(params.kernel_size, params.scales, level);
    int taper_size = std::min({ksize, y_s.width(), y_s.height()});
    if (taper_size % 2 == 0) --taper_size;
    Image tapered = edge_taper(y_s, Kernel::box(taper_size));
    if (level == 0) {
      k = Kernel::dirac(ksize);
      x = Image(y_s.width(), y_s.height());  // zero image at the coarsest scale
    } else {
      k = upsample_kernel(k, ksize);
      x = tapered;
    }
    ScaleResult sr = estimate_scale(tapered, k, x, params, level);
    k = std::move(sr.kernel);
    x = std::move(sr.x);
    out.traces.push_back(std::move(sr.trace));
  }
  out.kernel = std::move(k);
  out.intermediate = std::move(x);
  return out;
}

DeblurResult deblur_blind(const Image& y, const SolverParams& params,
                          const NonBlindParams& nb_params) {
  return deblur_blind_color({y}, params, nb_params);
}

DeblurResult deblur_blind_color(const std::vector<Image>& channels,
                                const SolverParams& params,
                                const NonBlindParams& nb_params) {
  if (channels.empty()) throw InvalidArgumentError("no image channels given");
  for (const Image& c : channels)
    if (!c.same_shape(channels[0]))
      throw InvalidArgumentError("channel dimensions differ");
  validate(nb_params);

  auto t0 = std::chrono::steady_clock::now();
  Image gray = channels.size() == 1 ? channels[0] : luma(channels);

  KernelEstimate est = estimate_kernel_multiscale(gray, params);

  DeblurResult res;
  res.kernel = std::move(est.kernel);
  res.intermediate = std::move(est.intermediate);
  res.traces = std::move(est.traces);
  res.restored.reserve(channels.size());
  for (const Image& c : channels)
    res.restored.push_back(deconvolve(edge_taper(c, res.kernel), res.kernel, nb_params));

  res.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace deblur
