#include <doctest.h>

#include <cmath>
#include <random>

#include "deblur/errors.hpp"
#include "deblur/osal.hpp"
#include "oracles.hpp"

using namespace deblur;

namespace {

double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

InnerParams default_image_params() {
  InnerParams p;
  p.alpha = 0.25;
  p.beta = 5.0;
  p.lambda = 100.0;
  p.gamma = 100.0;
  p.continuation = 1.0;
  p.iters = 10;
  return p;
}

InnerParams default_kernel_params() {
  InnerParams p;
  p.alpha = 0.25;
  p.beta = 5.0;
  p.lambda = 100.0;
  p.gamma = 1e6;
  p.continuation = 1.0;
  p.iters = 10;
  return p;
}

// Dense solve of the image-step normal equations
//   (lam K*K + (beta + gamma/2) G*G) x = lam K*y + (gamma/2) G*(w - mu/gamma)
// built from spatial operators only.
Image dense_image_step(const Image& y, const Kernel& ker, const ImageSplitState& s,
                       double lam, double beta, double gamma) {
  const int w = y.width(), h = y.height();
  auto mat = oracles::dense_operator(w, h, [&](const Image& e) {
    Image a = oracles::direct_correlate(oracles::direct_convolve(e, ker), ker);
    Image gh = gradient_adjoint(gradient(e, Direction::Horizontal), Direction::Horizontal);
    Image gv = gradient_adjoint(gradient(e, Direction::Vertical), Direction::Vertical);
    return lam * a + (beta + 0.5 * gamma) * (gh + gv);
  });
  Image th(w, h), tv(w, h);
  for (std::size_t i = 0; i < th.size(); ++i) {
    th.data()[i] = s.w_h.data()[i] - s.mu_h.data()[i] / gamma;
    tv.data()[i] = s.w_v.data()[i] - s.mu_v.data()[i] / gamma;
  }
  Image rhs = lam * oracles::direct_correlate(y, ker) +
              0.5 * gamma * (gradient_adjoint(th, Direction::Horizontal) +
                             gradient_adjoint(tv, Direction::Vertical));
  std::vector<double> x = oracles::dense_solve(mat, rhs.pixels());
  return Image(w, h, std::move(x));
}

// Full-grid circular convolution of two equally sized rasters.
Image convolve_full(const Image& a, const Image& b) {
  const int w = a.width(), h = a.height();
  Image out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int ty = 0; ty < h; ++ty)
        for (int tx = 0; tx < w; ++tx)
          acc += a(((x - tx) % w + w) % w, ((y - ty) % h + h) % h) * b(tx, ty);
      out(x, y) = acc;
    }
  return out;
}

Image correlate_full(const Image& a, const Image& b) {
  const int w = a.width(), h = a.height();
  Image out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int ty = 0; ty < h; ++ty)
        for (int tx = 0; tx < w; ++tx)
          acc += a((x + tx) % w, (y + ty) % h) * b(tx, ty);
      out(x, y) = acc;
    }
  return out;
}

}  // namespace

TEST_SUITE("osal") {

TEST_CASE("hard threshold basics") {
  CHECK(hard_threshold(0.5, 1.0) == 0.0);
  CHECK(hard_threshold(2.0, 1.0) == 2.0);
  CHECK(hard_threshold(-1.0, 1.0) == -1.0);  // tie |a| = b is retained
}

TEST_CASE("hard threshold is the exact minimizer of the l0 prox objective") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> uv(-2.0, 2.0), ua(0.01, 2.0), ug(0.5, 200.0);
  for (int trial = 0; trial < 1000; ++trial) {
    double v = uv(gen), alpha = ua(gen), gamma = ug(gen);
    double thr = l0_threshold(alpha, gamma);
    double got = hard_threshold(v, thr);
    auto f = [&](double w) {
      return 0.5 * gamma * (w - v) * (w - v) + (w != 0.0 ? alpha : 0.0);
    };
    // Brute force over [-3|v|, 3|v|] with step 1e-4.
    double lo = -3.0 * std::abs(v) - 1e-4, hi = 3.0 * std::abs(v) + 1e-4;
    double best = 0.0, best_f = f(0.0);
    for (double w = lo; w <= hi; w += 1e-4)
      if (f(w) < best_f) { best_f = f(w); best = w; }
    CHECK(f(got) <= best_f + 1e-12);
    if (std::abs(v) > thr + 1e-9) CHECK(got == v);
    if (std::abs(v) < thr - 1e-9) CHECK(got == 0.0);
    (void)best;
  }
}

TEST_CASE("the w-update is idempotent") {
  std::mt19937_64 gen(22);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    double v = dist(gen);
    double once = hard_threshold(v, 0.7);
    CHECK(hard_threshold(once, 0.7) == once);
  }
}

TEST_CASE("simplex projection clips negatives then renormalizes") {
  Kernel k(3);
  k(0, 0) = -0.2;
  k(1, 0) = 0.4;
  k(2, 0) = 0.4;
  k(0, 1) = 0.4;
  Kernel p = project_simplex(k);
  CHECK(p(0, 0) == 0.0);
  CHECK(p(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(p(2, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(p(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("simplex projection properties") {
  std::mt19937_64 gen(23);
  Kernel dirac = Kernel::dirac(5);
  Kernel pd = project_simplex(dirac);
  for (std::size_t i = 0; i < pd.values().size(); ++i)
    CHECK(pd.data()[i] == dirac.data()[i]);

  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Kernel r(7);
  for (std::size_t i = 0; i < r.values().size(); ++i) r.data()[i] = dist(gen);
  Kernel p = project_simplex(r);
  CHECK(p.min_value() >= 0.0);
  CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
  Kernel pp = project_simplex(p);
  for (std::size_t i = 0; i < p.values().size(); ++i)
    CHECK(pp.data()[i] == doctest::Approx(p.data()[i]).epsilon(1e-14));

  Kernel bad(3, -1.0);
  CHECK_THROWS_AS(project_simplex(bad), DegenerateKernelError);
}

TEST_CASE("constant observations with a Dirac kernel are solved exactly") {
  Image y(12, 12, 0.55);
  ImageSolveResult r = solve_image(y, Kernel::dirac(3), default_image_params(), Image(12, 12));
  CHECK(max_abs_diff(r.x, y) < 1e-10);
  CHECK(r.trace.size() == 10);
}

TEST_CASE("the frequency-domain x-update matches a dense solve") {
  std::mt19937_64 gen(24);
  Image y = oracles::random_image(8, 8, gen);
  Kernel ker = oracles::random_kernel_in_c(3, gen);
  ImageSplitState s = ImageSplitState::zeros(8, 8);
  s.w_h = oracles::random_image(8, 8, gen, -0.5, 0.5);
  s.w_v = oracles::random_image(8, 8, gen, -0.5, 0.5);
  s.mu_h = oracles::random_image(8, 8, gen, -1.0, 1.0);
  s.mu_v = oracles::random_image(8, 8, gen, -1.0, 1.0);
  const double lam = 150.0, beta = 5.0, gamma = 100.0;

  Image fast = image_quadratic_step(y, ker, s, lam, beta, gamma);
  Image dense = dense_image_step(y, ker, s, lam, beta, gamma);
  double scale = std::max(1.0, dense.max_value());
  CHECK(max_abs_diff(fast, dense) / scale < 1e-8);
}

TEST_CASE("x-update satisfies its normal equations applied spatially") {
  std::mt19937_64 gen(25);
  Image y = oracles::random_image(8, 8, gen);
  Kernel ker = oracles::random_kernel_in_c(3, gen);
  ImageSplitState s = ImageSplitState::zeros(8, 8);
  s.w_h = oracles::random_image(8, 8, gen, -0.5, 0.5);
  s.w_v = oracles::random_image(8, 8, gen, -0.5, 0.5);
  const double lam = 100.0, beta = 5.0, gamma = 100.0;
  Image x = image_quadratic_step(y, ker, s, lam, beta, gamma);

  Image ax = lam * oracles::direct_correlate(oracles::direct_convolve(x, ker), ker) +
             (beta + 0.5 * gamma) *
                 (gradient_adjoint(gradient(x, Direction::Horizontal), Direction::Horizontal) +
                  gradient_adjoint(gradient(x, Direction::Vertical), Direction::Vertical));
  Image b = lam * oracles::direct_correlate(y, ker) +
            0.5 * gamma * (gradient_adjoint(s.w_h, Direction::Horizontal) +
                           gradient_adjoint(s.w_v, Direction::Vertical));
  CHECK(std::sqrt(squared_norm(ax - b)) / std::sqrt(squared_norm(b)) < 1e-8);
}

TEST_CASE("threshold shrinks as the square root of the continuation factor") {
  const double alpha = 0.25, gamma = 100.0, c = 2.0 / 3.0;
  double ratio = l0_threshold(c * alpha, gamma) / l0_threshold(alpha, gamma);
  CHECK(ratio == doctest::Approx(std::sqrt(c)).epsilon(1e-12));
  // Across outer iterations i the continuation-scaled weight is c^i * alpha.
  double t3 = l0_threshold(std::pow(c, 3) * alpha, gamma);
  double t4 = l0_threshold(std::pow(c, 4) * alpha, gamma);
  CHECK(t4 / t3 == doctest::Approx(std::sqrt(c)).epsilon(1e-12));
}

TEST_CASE("with alpha = 0 the image solve is one quadratic solve, independent of L") {
  std::mt19937_64 gen(26);
  Image y = oracles::random_image(16, 16, gen);
  Kernel ker = oracles::random_kernel_in_c(5, gen);
  InnerParams p = default_image_params();
  p.alpha = 0.0;
  p.iters = 1;
  Image x1 = solve_image(y, ker, p, Image(16, 16)).x;
  p.iters = 7;
  Image x7 = solve_image(y, ker, p, Image(16, 16)).x;
  CHECK(max_abs_diff(x1, x7) == 0.0);
}

TEST_CASE("non-finite observations raise a divergence error") {
  Image y(8, 8, 1e308);
  y(3, 3) = -1e308;
  CHECK_THROWS_AS(solve_image(y, Kernel::box(3), default_image_params(), Image(8, 8)),
                  DivergenceError);
}

TEST_CASE("sharp inputs drive the kernel estimate toward a centered Dirac") {
  std::mt19937_64 gen(27);
  for (int rep = 0; rep < 3; ++rep) {
    Image x = oracles::random_image(24, 24, gen);
    KernelSolveResult r = solve_kernel(x, x, 5, default_kernel_params(), Kernel::dirac(5));
    CHECK(r.kernel.in_constraint_set(1e-12));
    int argmax = 0;
    for (int i = 1; i < 25; ++i)
      if (r.kernel.data()[i] > r.kernel.data()[argmax]) argmax = i;
    CHECK(argmax == 12);
  }
}

TEST_CASE("the frequency-domain k-update matches a dense solve") {
  std::mt19937_64 gen(28);
  const int n = 8, ksize = 3;
  Image x = oracles::random_image(n, n, gen);
  Image y = oracles::random_image(n, n, gen);
  KernelSplitState s = KernelSplitState::zeros(ksize);
  std::uniform_real_distribution<double> dist(-0.2, 0.8);
  for (std::size_t i = 0; i < s.g.values().size(); ++i) {
    s.g.data()[i] = dist(gen);
    s.mu.data()[i] = dist(gen);
  }
  const double lam = 120.0, beta = 5.0, gamma = 1e4;

  Kernel fast = kernel_quadratic_step(x, y, ksize, s, lam, beta, gamma);

  // Dense solve on the full grid, then central crop. Data terms are in
  // intensity units, matching the production solve.
  Image xh = kKernelDataScale * gradient(x, Direction::Horizontal);
  Image xv = kKernelDataScale * gradient(x, Direction::Vertical);
  Image yh = kKernelDataScale * gradient(y, Direction::Horizontal);
  Image yv = kKernelDataScale * gradient(y, Direction::Vertical);
  auto mat = oracles::dense_operator(n, n, [&](const Image& e) {
    Image a = correlate_full(convolve_full(e, xh), xh) + correlate_full(convolve_full(e, xv), xv);
    return lam * a + (beta + 0.5 * gamma) * e;
  });
  Kernel t(ksize);
  for (std::size_t i = 0; i < t.values().size(); ++i)
    t.data()[i] = s.g.data()[i] - s.mu.data()[i] / gamma;
  Image rhs = lam * (correlate_full(yh, xh) + correlate_full(yv, xv)) +
              0.5 * gamma * pad_kernel_to_grid(t, n, n);
  Image dense_full(n, n, oracles::dense_solve(mat, rhs.pixels()));
  Kernel dense = crop_grid_to_kernel(dense_full, ksize);

  double scale = 0.0;
  for (double v : dense.values()) scale = std::max(scale, std::abs(v));
  scale = std::max(scale, 1e-9);
  for (std::size_t i = 0; i < dense.values().size(); ++i)
    CHECK(std::abs(fast.data()[i] - dense.data()[i]) / scale < 1e-8);
}

TEST_CASE("kernel solves always land in the constraint set") {
  std::mt19937_64 gen(29);
  Image x = oracles::random_image(20, 20, gen);
  Image y = convolve_circular(x, oracles::random_kernel_in_c(5, gen));
  for (double cont : {1.0, 0.5, 0.2}) {
    InnerParams p = default_kernel_params();
    p.continuation = cont;
    KernelSolveResult r = solve_kernel(x, y, 5, p, Kernel::dirac(5));
    CHECK(r.kernel.in_constraint_set(1e-12));
    CHECK(r.kernel.all_finite());
    for (const EnergySample& e : r.trace) {
      CHECK(std::isfinite(e.total));
      CHECK(std::isfinite(e.fidelity));
    }
  }
}

TEST_CASE("with alpha = 0 the kernel solve is a single ridge solve") {
  std::mt19937_64 gen(30);
  Image x = oracles::random_image(16, 16, gen);
  Image y = convolve_circular(x, oracles::random_kernel_in_c(3, gen));
  InnerParams p = default_kernel_params();
  p.alpha = 0.0;
  p.iters = 1;
  Kernel k1 = solve_kernel(x, y, 3, p, Kernel::dirac(3)).kernel;
  p.iters = 6;
  Kernel k6 = solve_kernel(x, y, 3, p, Kernel::dirac(3)).kernel;
  for (std::size_t i = 0; i < k1.values().size(); ++i)
    CHECK(k1.data()[i] == k6.data()[i]);
}

}  // TEST_SUITE
