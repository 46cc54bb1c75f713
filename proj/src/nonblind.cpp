#include "deblur/nonblind.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "deblur/errors.hpp"
#include "deblur/fft.hpp"

namespace deblur {

namespace {

// Real roots of u^3 + p*u + q = 0.
int depressed_cubic_roots(double p, double q, double roots[3]) {
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  if (disc > 0.0) {
    double s = std::sqrt(disc);
    roots[0] = std::cbrt(-0.5 * q + s) + std::cbrt(-0.5 * q - s);
    return 1;
  }
  // Three real roots (trigonometric form); p <= 0 here.
  double m = 2.0 * std::sqrt(-p / 3.0);
  double arg = 3.0 * q / (p * m);
  arg = std::clamp(arg, -1.0, 1.0);
  double theta = std::acos(arg) / 3.0;
  for (int k = 0; k < 3; ++k)
    roots[k] = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
  return 3;
}

// Real roots of t^4 + q*t + r = 0 (Ferrari with a resolvent cubic).
int depressed_quartic_roots(double q, double r, double roots[4]) {
  if (q == 0.0) {
    // t^4 = -r
    if (r > 0.0) return 0;
    double t = std::pow(-r, 0.25);
    roots[0] = t;
    roots[1] = -t;
    return (r == 0.0) ? 1 : 2;
  }
  double res[3];
  int nres = depressed_cubic_roots(-r, -q * q / 8.0, res);
  double m = res[0];
  for (int i = 1; i < nres; ++i) m = std::max(m, res[i]);
  if (m <= 0.0) return 0;
  double s = std::sqrt(2.0 * m);
  double c1 = m + q / (4.0 * m) * s;  // t^2 - s*t + c1
  double c2 = m - q / (4.0 * m) * s;  // t^2 + s*t + c2
  int n = 0;
  double d1 = s * s - 4.0 * c1;
  if (d1 >= 0.0) {
    roots[n++] = 0.5 * (s + std::sqrt(d1));
    roots[n++] = 0.5 * (s - std::sqrt(d1));
  }
  double d2 = s * s - 4.0 * c2;
  if (d2 >= 0.0) {
    roots[n++] = 0.5 * (-s + std::sqrt(d2));
    roots[n++] = 0.5 * (-s - std::sqrt(d2));
  }
  return n;
}

bool is_close(double a, double b) { return std::abs(a - b) < 1e-9; }

}  // namespace

void validate(const NonBlindParams& params) {
  if (!(params.fidelity_weight > 0.0))
    throw InvalidArgumentError("fidelity_weight must be > 0");
  double p = params.prior_exponent;
  if (!is_close(p, 0.5) && !is_close(p, 2.0 / 3.0) && !is_close(p, 2.0))
    throw InvalidArgumentError("prior_exponent must be one of 1/2, 2/3, 2");
  if (params.hq_iters < 1) throw InvalidArgumentError("hq_iters must be >= 1");
  if (!(params.penalty_init > 0.0))
    throw InvalidArgumentError("penalty_init must be > 0");
  if (!(params.penalty_step > 1.0))
    throw InvalidArgumentError("penalty_step must be > 1 (strictly increasing schedule)");
}

double prox_lp(double v, double alpha, double gamma, double p) {
  if (alpha == 0.0) return v;
  if (is_close(p, 2.0)) return gamma * v / (gamma + 2.0 * alpha);
  if (v == 0.0) return 0.0;

  const double a = std::abs(v);
  const double sign = v < 0.0 ? -1.0 : 1.0;
  auto objective = [&](double w) {
    return 0.5 * gamma * (w - a) * (w - a) + alpha * std::pow(std::abs(w), p);
  };
  double best_w = 0.0;
  double best_f = 0.5 * gamma * a * a;  // w = 0

  if (is_close(p, 0.5)) {
    // w = u^2: stationary points solve u^3 - a*u + alpha/(2*gamma) = 0.
    double roots[3];
    int n = depressed_cubic_roots(-a, 0.5 * alpha / gamma, roots);
    for (int i = 0; i < n; ++i) {
      if (roots[i] <= 0.0) continue;
      double w = roots[i] * roots[i];
      double f = objective(w);
      if (f < best_f) { best_f = f; best_w = w; }
    }
  } else {
    // p = 2/3, w = t^3: stationary points solve t^4 - a*t + 2*alpha/(3*gamma) = 0.
    double roots[4];
    int n = depressed_quartic_roots(-a, 2.0 * alpha / (3.0 * gamma), roots);
    for (int i = 0; i < n; ++i) {
      if (roots[i] <= 0.0) continue;
      double w = roots[i] * roots[i] * roots[i];
      double f = objective(w);
      if (f < best_f) { best_f = f; best_w = w; }
    }
  }
  return sign * best_w;
}

Image deconvolve(const Image& y, const Kernel& ker, const NonBlindParams& params,
                 NonBlindTrace* trace) {
  validate(params);
  if (!ker.in_constraint_set())
    throw DegenerateKernelError("deconvolution requires a kernel in C");
  if (ker.size() > y.width() || ker.size() > y.height())
    throw InvalidArgumentError("kernel exceeds image dimensions");

  const int w = y.width(), h = y.height();
  Fft2D fft(w, h);
  Spectrum ker_tf = kernel_transfer(ker, w, h);
  Spectrum grad_h = gradient_transfer(Direction::Horizontal, w, h);
  Spectrum grad_v = gradient_transfer(Direction::Vertical, w, h);
  Spectrum y_spec = fft.forward(y);
  const double fw = params.fidelity_weight;

  Spectrum rhs_fid(w, h);
  for (std::size_t i = 0; i < rhs_fid.coef_count(); ++i)
    rhs_fid.data()[i] = fw * std::conj(ker_tf.data()[i]) * y_spec.data()[i];

  Spectrum x_spec = y_spec;
  double penalty = params.penalty_init;
  for (int it = 0; it < params.hq_iters; ++it, penalty *= params.penalty_step) {
    Spectrum gs = x_spec;
    for (std::size_t i = 0; i < gs.coef_count(); ++i)
      gs.data()[i] = grad_h.data()[i] * x_spec.data()[i];
    Image gx_h = fft.inverse(gs);
    for (std::size_t i = 0; i < gs.coef_count(); ++i)
      gs.data()[i] = grad_v.data()[i] * x_spec.data()[i];
    Image gx_v = fft.inverse(gs);

    for (std::size_t i = 0; i < gx_h.size(); ++i) {
      gx_h.data()[i] = prox_lp(gx_h.data()[i], 1.0, penalty, params.prior_exponent);
      gx_v.data()[i] = prox_lp(gx_v.data()[i], 1.0, penalty, params.prior_exponent);
    }
    Spectrum wh = fft.forward(gx_h);
    Spectrum wv = fft.forward(gx_v);
    for (std::size_t i = 0; i < x_spec.coef_count(); ++i) {
      auto rhs = rhs_fid.data()[i] +
                 0.5 * penalty * (std::conj(grad_h.data()[i]) * wh.data()[i] +
                                  std::conj(grad_v.data()[i]) * wv.data()[i]);
      double grad2 = std::norm(grad_h.data()[i]) + std::norm(grad_v.data()[i]);
      double denom = fw * std::norm(ker_tf.data()[i]) + 0.5 * penalty * grad2;
      x_spec.data()[i] = rhs / denom;
    }
    if (trace) {
      Spectrum resid = x_spec;
      double acc = 0.0;
      for (std::size_t i = 0; i < resid.coef_count(); ++i)
        resid.data()[i] = grad_h.data()[i] * x_spec.data()[i] - wh.data()[i];
      acc += spatial_squared_norm(resid);
      for (std::size_t i = 0; i < resid.coef_count(); ++i)
        resid.data()[i] = grad_v.data()[i] * x_spec.data()[i] - wv.data()[i];
      acc += spatial_squared_norm(resid);
      trace->constraint_violation.push_back(std::sqrt(acc));
    }
  }

  Image x = fft.inverse(x_spec);
  if (!x.all_finite())
    throw DivergenceError("non-blind deconvolution diverged", -1, -1, -1);
  for (std::size_t i = 0; i < x.size(); ++i)
    x.data()[i] = std::clamp(x.data()[i], 0.0, 1.0);
  return x;
}

std::vector<Image> deconvolve_channels(const std::vector<Image>& channels,
                                       const Kernel& ker, const NonBlindParams& params) {
  std::vector<Image> out;
  out.reserve(channels.size());
  for (const Image& c : channels) out.push_back(deconvolve(c, ker, params));
  return out;
}

}  // namespace deblur
