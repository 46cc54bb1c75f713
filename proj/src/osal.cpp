#include "deblur/osal.hpp"

#include <cmath>
#include <string>

#include "deblur/errors.hpp"

namespace deblur {

namespace {

constexpr double kZeroTol = 1e-12;  // numerical zero for l0 counting

void validate(const InnerParams& p) {
  if (!(p.lambda > 0.0)) throw InvalidArgumentError("lambda must be > 0");
  if (!(p.gamma > 0.0)) throw InvalidArgumentError("gamma must be > 0");
  if (p.alpha < 0.0 || p.beta < 0.0)
    throw InvalidArgumentError("alpha and beta must be >= 0");
  if (p.alpha == 0.0 && p.beta == 0.0)
    throw InvalidArgumentError("alpha and beta cannot both be zero");
  if (!(p.continuation > 0.0) || p.continuation > 1.0)
    throw InvalidArgumentError("continuation factor must lie in (0, 1]");
  if (p.iters < 1) throw InvalidArgumentError("inner iteration count must be >= 1");
}

double count_nonzero(const Image& a) {
  double n = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a.data()[i]) > kZeroTol) n += 1.0;
  return n;
}

double count_nonzero(const Kernel& k) {
  double n = 0.0;
  for (double v : k.values())
    if (std::abs(v) > kZeroTol) n += 1.0;
  return n;
}

double kernel_squared_norm(const Kernel& k) {
  double acc = 0.0;
  for (double v : k.values()) acc += v * v;
  return acc;
}

// Shared frequency-domain machinery of the image subproblem.
struct ImageCtx {
  Fft2D fft;
  Spectrum ker_tf, grad_h, grad_v, y_spec;
  Spectrum rhs_fid;           // lambda_eff * conj(K) * y
  std::vector<double> denom;  // lambda_eff*|K|^2 + (beta + gamma/2)*|G|^2
  double lambda_eff, beta_eff, gamma;

  ImageCtx(const Image& y, const Kernel& ker, double lambda_eff_, double beta_eff_,
           double gamma_)
      : fft(y.width(), y.height()),
        ker_tf(kernel_transfer(ker, y.width(), y.height())),
        grad_h(gradient_transfer(Direction::Horizontal, y.width(), y.height())),
        grad_v(gradient_transfer(Direction::Vertical, y.width(), y.height())),
        y_spec(fft.forward(y)),
        rhs_fid(y.width(), y.height()),
        denom(ker_tf.coef_count()),
        lambda_eff(lambda_eff_), beta_eff(beta_eff_), gamma(gamma_) {
    for (std::size_t i = 0; i < ker_tf.coef_count(); ++i) {
      rhs_fid.data()[i] = lambda_eff * std::conj(ker_tf.data()[i]) * y_spec.data()[i];
      double grad2 = std::norm(grad_h.data()[i]) + std::norm(grad_v.data()[i]);
      denom[i] = lambda_eff * std::norm(ker_tf.data()[i]) + (beta_eff + 0.5 * gamma) * grad2;
    }
  }

  // x-update of one inner round. w/mu enter through the spatial rasters
  // t_d = w_d - mu_d/gamma.
  Spectrum solve(const Image& t_h, const Image& t_v) const {
    Spectrum th = fft.forward(t_h);
    Spectrum tv = fft.forward(t_v);
    Spectrum x_spec(y_spec.grid_width(), y_spec.grid_height());
    for (std::size_t i = 0; i < x_spec.coef_count(); ++i) {
      auto rhs = rhs_fid.data()[i] +
                 0.5 * gamma * (std::conj(grad_h.data()[i]) * th.data()[i] +
                                std::conj(grad_v.data()[i]) * tv.data()[i]);
      x_spec.data()[i] = rhs / denom[i];
    }
    return x_spec;
  }

  double fidelity(const Spectrum& x_spec) const {
    Spectrum resid(x_spec.grid_width(), x_spec.grid_height());
    for (std::size_t i = 0; i < resid.coef_count(); ++i)
      resid.data()[i] = ker_tf.data()[i] * x_spec.data()[i] - y_spec.data()[i];
    return spatial_squared_norm(resid);
  }
};

// Shared machinery of the kernel subproblem (gradient-domain data terms
// on the full image grid).
struct KernelCtx {
  Fft2D fft;
  int size;
  std::vector<double> data_quad;           // sum_d |X_d|^2
  std::vector<std::complex<double>> data_lin;  // sum_d conj(X_d) Y_d
  Spectrum xg_h, xg_v, yg_h, yg_v;         // gradient spectra of x and y
  double lambda_eff, beta_eff, gamma;

  KernelCtx(const Image& x, const Image& y, int size_, double lambda_eff_,
            double beta_eff_, double gamma_)
      : fft(x.width(), x.height()), size(size_),
        lambda_eff(lambda_eff_), beta_eff(beta_eff_), gamma(gamma_) {
    Spectrum gh = gradient_transfer(Direction::Horizontal, x.width(), x.height());
    Spectrum gv = gradient_transfer(Direction::Vertical, x.width(), x.height());
    Spectrum xs = fft.forward(x);
    Spectrum ys = fft.forward(y);
    xg_h = xs; xg_v = xs; yg_h = ys; yg_v = ys;
    for (std::size_t i = 0; i < xs.coef_count(); ++i) {
      xg_h.data()[i] *= kKernelDataScale * gh.data()[i];
      xg_v.data()[i] *= kKernelDataScale * gv.data()[i];
      yg_h.data()[i] *= kKernelDataScale * gh.data()[i];
      yg_v.data()[i] *= kKernelDataScale * gv.data()[i];
    }
    data_quad.resize(xs.coef_count());
    data_lin.resize(xs.coef_count());
    for (std::size_t i = 0; i < xs.coef_count(); ++i) {
      data_quad[i] = std::norm(xg_h.data()[i]) + std::norm(xg_v.data()[i]);
      data_lin[i] = std::conj(xg_h.data()[i]) * yg_h.data()[i] +
                    std::conj(xg_v.data()[i]) * yg_v.data()[i];
    }
  }

  // k-update: full-grid frequency solve, cropped to the kernel window.
  // `t` is the kernel-shaped raster g - mu/gamma; with_split toggles the
  // gamma terms (off for the pure-ridge degenerate case).
  Kernel solve(const Kernel& t, bool with_split) const {
    Spectrum rhs(fft.width(), fft.height());
    if (with_split) {
      Spectrum ts = fft.forward(pad_kernel_to_grid(t, fft.width(), fft.height()));
      for (std::size_t i = 0; i < rhs.coef_count(); ++i)
        rhs.data()[i] = lambda_eff * data_lin[i] + 0.5 * gamma * ts.data()[i];
    } else {
      for (std::size_t i = 0; i < rhs.coef_count(); ++i)
        rhs.data()[i] = lambda_eff * data_lin[i];
    }
    const double ridge = beta_eff + (with_split ? 0.5 * gamma : 0.0);
    for (std::size_t i = 0; i < rhs.coef_count(); ++i)
      rhs.data()[i] /= lambda_eff * data_quad[i] + ridge;
    return crop_grid_to_kernel(fft.inverse(rhs), size);
  }

  double fidelity(const Kernel& k) const {
    Spectrum ks = fft.forward(pad_kernel_to_grid(k, fft.width(), fft.height()));
    Spectrum resid(fft.width(), fft.height());
    double acc = 0.0;
    for (std::size_t i = 0; i < ks.coef_count(); ++i)
      resid.data()[i] = xg_h.data()[i] * ks.data()[i] - yg_h.data()[i];
    acc += spatial_squared_norm(resid);
    for (std::size_t i = 0; i < ks.coef_count(); ++i)
      resid.data()[i] = xg_v.data()[i] * ks.data()[i] - yg_v.data()[i];
    acc += spatial_squared_norm(resid);
    return acc;
  }
};

}  // namespace

double energy_reweighted(const EnergySample& e, double lambda, double alpha_scaled,
                         double beta_scaled) {
  return lambda * e.fidelity + alpha_scaled * e.l0 + beta_scaled * e.l2;
}

double hard_threshold(double value, double threshold) {
  return std::abs(value) >= threshold ? value : 0.0;
}

double l0_threshold(double alpha, double gamma) { return std::sqrt(2.0 * alpha / gamma); }

ImageSplitState ImageSplitState::zeros(int width, int height) {
  return {Image(width, height), Image(width, height), Image(width, height),
          Image(width, height)};
}

KernelSplitState KernelSplitState::zeros(int size) {
  return {Kernel(size), Kernel(size)};
}

ImageSolveResult solve_image(const Image& y, const Kernel& ker, const InnerParams& params,
                             const Image& init_x) {
  validate(params);
  if (!ker.in_constraint_set())
    throw InvalidArgumentError("image solve requires a kernel in C");
  if (!init_x.same_shape(y))
    throw InvalidArgumentError("init_x must match the observed image");

  const double lambda_eff = params.lambda / params.continuation;
  ImageCtx ctx(y, ker, lambda_eff, params.beta, params.gamma);

  auto record = [&](const Spectrum& x_spec, const Image& gx_h, const Image& gx_v) {
    EnergySample e;
    e.fidelity = ctx.fidelity(x_spec);
    e.l0 = count_nonzero(gx_h) + count_nonzero(gx_v);
    e.l2 = squared_norm(gx_h) + squared_norm(gx_v);
    e.total = params.lambda * e.fidelity +
              params.continuation * (params.alpha * e.l0 + params.beta * e.l2);
    return e;
  };

  ImageSolveResult out;
  out.trace.reserve(params.iters);

  if (params.alpha == 0.0) {
    // Threshold 0 keeps w consistent with the gradient field, so the
    // split drops out and the problem is one quadratic solve.
    ImageCtx quad(y, ker, lambda_eff, params.beta, 0.0);
    Image zero(y.width(), y.height());
    Spectrum x_spec = quad.solve(zero, zero);
    out.x = quad.fft.inverse(x_spec);
    if (!out.x.all_finite())
      throw DivergenceError("image solve diverged", -1, -1, 0);
    Image gx_h = gradient(out.x, Direction::Horizontal);
    Image gx_v = gradient(out.x, Direction::Vertical);
    EnergySample e = record(x_spec, gx_h, gx_v);
    out.trace.assign(params.iters, e);
    return out;
  }

  const double thr = l0_threshold(params.alpha, params.gamma);
  Image x = init_x;
  Image gx_h = gradient(x, Direction::Horizontal);
  Image gx_v = gradient(x, Direction::Vertical);
  ImageSplitState s = ImageSplitState::zeros(y.width(), y.height());

  for (int l = 0; l < params.iters; ++l) {
    for (std::size_t i = 0; i < s.w_h.size(); ++i) {
      s.w_h.data()[i] =
          hard_threshold(gx_h.data()[i] + s.mu_h.data()[i] / params.gamma, thr);
      s.w_v.data()[i] =
          hard_threshold(gx_v.data()[i] + s.mu_v.data()[i] / params.gamma, thr);
    }
    Image t_h(y.width(), y.height()), t_v(y.width(), y.height());
    for (std::size_t i = 0; i < t_h.size(); ++i) {
      t_h.data()[i] = s.w_h.data()[i] - s.mu_h.data()[i] / params.gamma;
      t_v.data()[i] = s.w_v.data()[i] - s.mu_v.data()[i] / params.gamma;
    }
    Spectrum x_spec = ctx.solve(t_h, t_v);
    x = ctx.fft.inverse(x_spec);
    if (!x.all_finite())
      throw DivergenceError("image solve diverged at inner iteration " + std::to_string(l),
                            -1, -1, l);
    Spectrum gs = x_spec;
    for (std::size_t i = 0; i < gs.coef_count(); ++i)
      gs.data()[i] = ctx.grad_h.data()[i] * x_spec.data()[i];
    gx_h = ctx.fft.inverse(gs);
    for (std::size_t i = 0; i < gs.coef_count(); ++i)
      gs.data()[i] = ctx.grad_v.data()[i] * x_spec.data()[i];
    gx_v = ctx.fft.inverse(gs);
    for (std::size_t i = 0; i < s.mu_h.size(); ++i) {
      s.mu_h.data()[i] += params.gamma * (gx_h.data()[i] - s.w_h.data()[i]);
      s.mu_v.data()[i] += params.gamma * (gx_v.data()[i] - s.w_v.data()[i]);
    }
    out.trace.push_back(record(x_spec, gx_h, gx_v));
  }
  out.x = std::move(x);
  return out;
}

KernelSolveResult solve_kernel(const Image& x, const Image& y, int size,
                               const InnerParams& params, const Kernel& init_k) {
  validate(params);
  if (size < 1 || size % 2 == 0)
    throw InvalidArgumentError("kernel size must be odd, got " + std::to_string(size));
  if (!x.same_shape(y))
    throw InvalidArgumentError("x and y must have identical dimensions");
  if (size > x.width() || size > x.height())
    throw InvalidArgumentError("kernel size exceeds image grid");
  if (init_k.size() != size)
    throw InvalidArgumentError("init kernel size mismatch");

  const double lambda_eff = params.lambda / params.continuation;
  KernelCtx ctx(x, y, size, lambda_eff, params.beta, params.gamma);

  auto record = [&](const Kernel& k) {
    EnergySample e;
    e.fidelity = ctx.fidelity(k);
    e.l0 = count_nonzero(k);
    e.l2 = kernel_squared_norm(k);
    e.total = params.lambda * e.fidelity +
              params.continuation * (params.alpha * e.l0 + params.beta * e.l2);
    return e;
  };

  KernelSolveResult out;
  out.trace.reserve(params.iters);

  if (params.alpha == 0.0) {
    Kernel k = ctx.solve(Kernel(size), /*with_split=*/false);
    if (!k.all_finite())
      throw DivergenceError("kernel solve diverged", -1, -1, 0);
    EnergySample e = record(k);
    out.trace.assign(params.iters, e);
    out.kernel = project_simplex(k);
    return out;
  }

  const double thr = l0_threshold(params.alpha, params.gamma);
  Kernel k = init_k;
  KernelSplitState s = KernelSplitState::zeros(size);

  for (int j = 0; j < params.iters; ++j) {
    for (std::size_t i = 0; i < s.g.values().size(); ++i)
      s.g.data()[i] = hard_threshold(k.data()[i] + s.mu.data()[i] / params.gamma, thr);
    Kernel t(size);
    for (std::size_t i = 0; i < t.values().size(); ++i)
      t.data()[i] = s.g.data()[i] - s.mu.data()[i] / params.gamma;
    k = ctx.solve(t, /*with_split=*/true);
    if (!k.all_finite())
      throw DivergenceError("kernel solve diverged at inner iteration " + std::to_string(j),
                            -1, -1, j);
    for (std::size_t i = 0; i < s.mu.values().size(); ++i)
      s.mu.data()[i] += params.gamma * (k.data()[i] - s.g.data()[i]);
    out.trace.push_back(record(k));
  }
  out.kernel = project_simplex(k);
  return out;
}

Image image_quadratic_step(const Image& y, const Kernel& ker, const ImageSplitState& s,
                           double lambda_eff, double beta_eff, double gamma) {
  ImageCtx ctx(y, ker, lambda_eff, beta_eff, gamma);
  Image t_h(y.width(), y.height()), t_v(y.width(), y.height());
  for (std::size_t i = 0; i < t_h.size(); ++i) {
    t_h.data()[i] = s.w_h.data()[i] - s.mu_h.data()[i] / gamma;
    t_v.data()[i] = s.w_v.data()[i] - s.mu_v.data()[i] / gamma;
  }
  return ctx.fft.inverse(ctx.solve(t_h, t_v));
}

Kernel kernel_quadratic_step(const Image& x, const Image& y, int size,
                             const KernelSplitState& s, double lambda_eff, double beta_eff,
                             double gamma) {
  KernelCtx ctx(x, y, size, lambda_eff, beta_eff, gamma);
  Kernel t(size);
  for (std::size_t i = 0; i < t.values().size(); ++i)
    t.data()[i] = s.g.data()[i] - s.mu.data()[i] / gamma;
  return ctx.solve(t, /*with_split=*/true);
}

}  // namespace deblur
