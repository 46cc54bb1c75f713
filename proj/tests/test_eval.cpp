#include <doctest.h>

#include <cmath>
#include <random>

#include "deblur/errors.hpp"
#include "deblur/eval.hpp"
#include "deblur/fft.hpp"
#include "oracles.hpp"

using namespace deblur;

namespace {

Kernel circular_shift(const Kernel& k, int dx, int dy) {
  const int n = k.size();
  Kernel out(n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      out(((x + dx) % n + n) % n, ((y + dy) % n + n) % n) = k(x, y);
  return out;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("noiseless Dirac synthesis is the identity") {
  std::mt19937_64 gen(61);
  Image x = oracles::random_image(24, 24, gen);
  Image y = synth_blur(x, Kernel::dirac(5), 0.0, 3);
  for (std::size_t i = 0; i < x.size(); ++i)
    CHECK(y.data()[i] == doctest::Approx(x.data()[i]).epsilon(1e-12));
}

TEST_CASE("synthetic noise has the requested standard deviation") {
  std::mt19937_64 gen(62);
  Image x = oracles::random_image(128, 128, gen);
  Kernel ker = oracles::random_kernel_in_c(5, gen);
  Image y = synth_blur(x, ker, 0.01, 4242);
  Image clean = convolve_circular(x, ker);
  double mean = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) mean += y.data()[i] - clean.data()[i];
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double d = y.data()[i] - clean.data()[i] - mean;
    var += d * d;
  }
  var /= static_cast<double>(y.size() - 1);
  CHECK(std::sqrt(var) == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("synthesis is deterministic in the seed") {
  std::mt19937_64 gen(63);
  Image x = oracles::random_image(32, 32, gen);
  Kernel ker = oracles::random_kernel_in_c(3, gen);
  Image a = synth_blur(x, ker, 0.02, 777);
  Image b = synth_blur(x, ker, 0.02, 777);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.data()[i] == b.data()[i]);
}

TEST_CASE("zero-length trajectories are Dirac kernels") {
  Kernel k = make_trajectory_kernel(9, 0.0, 1.0, 5);
  Kernel d = Kernel::dirac(9);
  for (std::size_t i = 0; i < k.values().size(); ++i) CHECK(k.data()[i] == d.data()[i]);
}

TEST_CASE("straight trajectories have support width of at most 2 px") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    Kernel k = make_trajectory_kernel(13, 8.0, 0.0, seed);
    // Weighted centroid and principal direction.
    double cx = 0, cy = 0;
    for (int y = 0; y < 13; ++y)
      for (int x = 0; x < 13; ++x) { cx += x * k(x, y); cy += y * k(x, y); }
    double sxx = 0, sxy = 0, syy = 0;
    for (int y = 0; y < 13; ++y)
      for (int x = 0; x < 13; ++x) {
        double w = k(x, y);
        sxx += w * (x - cx) * (x - cx);
        sxy += w * (x - cx) * (y - cy);
        syy += w * (y - cy) * (y - cy);
      }
    double tr = sxx + syy, det = sxx * syy - sxy * sxy;
    double minor = 0.5 * tr - std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
    CHECK(std::sqrt(std::max(0.0, minor)) <= 0.6);  // perpendicular spread

    double angle = 0.5 * std::atan2(2 * sxy, sxx - syy);
    double nx = -std::sin(angle), ny = std::cos(angle);
    for (int y = 0; y < 13; ++y)
      for (int x = 0; x < 13; ++x)
        if (k(x, y) > 1e-9)
          CHECK(std::abs((x - cx) * nx + (y - cy) * ny) <= 1.0);
  }
}

TEST_CASE("trajectory kernels always land in C") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Kernel k = make_trajectory_kernel(11, 6.5, 1.3, seed);
    CHECK(k.in_constraint_set(1e-12));
  }
}

TEST_CASE("ssd basics and oracle") {
  std::mt19937_64 gen(64);
  Image a = oracles::random_image(16, 16, gen);
  CHECK(ssd(a, a, 2) == 0.0);

  Image b = a;
  b(8, 8) += 0.125;
  CHECK(ssd(a, b, 2) == doctest::Approx(0.125 * 0.125).epsilon(1e-12));

  Image c = oracles::random_image(16, 16, gen);
  double direct = 0.0;
  for (int y = 3; y < 13; ++y)
    for (int x = 3; x < 13; ++x) {
      double d = a(x, y) - c(x, y);
      direct += d * d;
    }
  CHECK(ssd(a, c, 3) == doctest::Approx(direct).epsilon(1e-10));

  CHECK_THROWS_AS(ssd(a, Image(8, 8, 0.0), 1), InvalidArgumentError);
}

TEST_CASE("ssd detects translations of non-constant images") {
  std::mt19937_64 gen(65);
  Image a = oracles::random_image(12, 12, gen);
  Image shifted(12, 12);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 12; ++x) shifted((x + 1) % 12, y) = a(x, y);
  CHECK(ssd(a, shifted, 0) > 0.0);
}

TEST_CASE("psnr basics and oracle") {
  Image a(10, 10, 0.3), b(10, 10, 0.4);
  CHECK(std::isinf(psnr(a, a)));
  CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-12));

  std::mt19937_64 gen(66);
  Image u = oracles::random_image(9, 9, gen), v = oracles::random_image(9, 9, gen);
  double mse = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    double d = u.data()[i] - v.data()[i];
    mse += d * d;
  }
  mse /= static_cast<double>(u.size());
  CHECK(psnr(u, v) == doctest::Approx(10.0 * std::log10(1.0 / mse)).epsilon(1e-10));
}

TEST_CASE("kernel alignment recovers constructed shifts exactly") {
  std::mt19937_64 gen(67);
  Kernel k_true = make_trajectory_kernel(9, 5.0, 0.7, 17);

  Kernel already = align_kernels(k_true, k_true);
  for (std::size_t i = 0; i < already.values().size(); ++i)
    CHECK(already.data()[i] == k_true.data()[i]);

  Kernel shifted = circular_shift(k_true, 2, -1);
  Kernel aligned = align_kernels(shifted, k_true);
  for (std::size_t i = 0; i < aligned.values().size(); ++i)
    CHECK(aligned.data()[i] == k_true.data()[i]);
}

TEST_CASE("alignment attains the exhaustive correlation maximum") {
  std::mt19937_64 gen(68);
  Kernel a = oracles::random_kernel_in_c(7, gen);
  Kernel b = oracles::random_kernel_in_c(7, gen);
  Kernel aligned = align_kernels(a, b);

  double aligned_corr = 0.0;
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 7; ++x) aligned_corr += aligned(x, y) * b(x, y);

  double best = -1.0;
  for (int dy = 0; dy < 7; ++dy)
    for (int dx = 0; dx < 7; ++dx) {
      Kernel s = circular_shift(a, dx, dy);
      double corr = 0.0;
      for (int y = 0; y < 7; ++y)
        for (int x = 0; x < 7; ++x) corr += s(x, y) * b(x, y);
      best = std::max(best, corr);
    }
  CHECK(aligned_corr == doctest::Approx(best).epsilon(1e-12));

  // Pure shift: the multiset of values is preserved.
  std::vector<double> va(a.values()), vb(aligned.values());
  std::sort(va.begin(), va.end());
  std::sort(vb.begin(), vb.end());
  for (std::size_t i = 0; i < va.size(); ++i) CHECK(va[i] == vb[i]);
}

TEST_CASE("identical kernels give an error ratio of exactly 1") {
  Image sharp = corpus_image(1);
  Kernel ker = corpus_kernel(2);
  Image y = synth_blur(sharp, ker, 0.005, 11);
  TrialRecord rec = error_ratio_trial(sharp, y, ker, ker, NonBlindParams{});
  CHECK(rec.error_ratio == 1.0);
  CHECK(rec.ssd_with_estimated == rec.ssd_with_truth);
}

TEST_CASE("a Dirac guess against strong blur scores worse than the truth") {
  Image sharp = corpus_image(0);
  Kernel ker = corpus_kernel(3);
  Image y = synth_blur(sharp, ker, 0.005, 12);
  TrialRecord rec =
      error_ratio_trial(sharp, y, Kernel::dirac(ker.size()), ker, NonBlindParams{});
  CHECK(rec.error_ratio > 1.0);
}

TEST_CASE("cumulative histograms count ratios below each bin") {
  auto with_ratios = [](std::initializer_list<double> ratios) {
    std::vector<TrialRecord> recs;
    for (double r : ratios) {
      TrialRecord t;
      t.error_ratio = r;
      recs.push_back(t);
    }
    return recs;
  };

  Histogram ones = cumulative_histogram(with_ratios({1.0, 1.0, 1.0}), 4);
  CHECK(ones.fraction[0] == 0.0);  // strictly below 1
  CHECK(ones.fraction[1] == 1.0);
  CHECK(ones.fraction[2] == 1.0);
  CHECK(ones.fraction[3] == 1.0);

  Histogram h = cumulative_histogram(with_ratios({1.5, 2.5, 3.5}), 4);
  CHECK(h.fraction[0] == 0.0);
  CHECK(h.fraction[1] == doctest::Approx(1.0 / 3.0));
  CHECK(h.fraction[2] == doctest::Approx(2.0 / 3.0));
  CHECK(h.fraction[3] == 1.0);

  std::mt19937_64 gen(69);
  std::uniform_real_distribution<double> dist(0.5, 6.0);
  std::vector<TrialRecord> recs;
  for (int i = 0; i < 32; ++i) {
    TrialRecord t;
    t.error_ratio = dist(gen);
    recs.push_back(t);
  }
  Histogram rand_h = cumulative_histogram(recs, 6);
  for (int r = 1; r <= 6; ++r) {
    int count = 0;
    for (const auto& t : recs)
      if (t.error_ratio < r) ++count;
    CHECK(rand_h.fraction[r - 1] == doctest::Approx(count / 32.0).epsilon(1e-12));
  }
  for (std::size_t i = 1; i < rand_h.fraction.size(); ++i)
    CHECK(rand_h.fraction[i] >= rand_h.fraction[i - 1]);

  CHECK_THROWS_AS(cumulative_histogram({}, 4), InvalidArgumentError);
}

TEST_CASE("built-in corpus has the advertised shape") {
  std::vector<EvalCase> cases = builtin_corpus();
  CHECK(cases.size() == 32);
  for (int i = 0; i < kCorpusImageCount; ++i) {
    Image img = corpus_image(i);
    CHECK(img.width() == kCorpusImageSize);
    CHECK(img.height() == kCorpusImageSize);
    CHECK(img.min_value() >= 0.0);
    CHECK(img.max_value() <= 1.0);
  }
  int prev = 0;
  for (int j = 0; j < kCorpusKernelCount; ++j) {
    Kernel k = corpus_kernel(j);
    CHECK(k.in_constraint_set(1e-12));
    CHECK(k.size() >= std::max(9, prev));
    CHECK(k.size() <= 19);
    prev = k.size();
  }
}

TEST_CASE("setting sizes derive from the true kernel size") {
  CHECK(setting_size(SizeSetting::True, 13) == 13);
  CHECK(setting_size(SizeSetting::Medium, 13) == 21);
  CHECK(setting_size(SizeSetting::Large, 13) == 29);
}

}  // TEST_SUITE
