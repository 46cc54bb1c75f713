#include "deblur/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "deblur/errors.hpp"
#include "deblur/fft.hpp"
#include "deblur/io.hpp"

namespace deblur {

namespace {

// mt19937_64 output is specified by the standard; the normal transform
// below is hand-rolled so synthetic data stays bit-stable across
// library versions.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return (gen_() >> 11) * 0x1.0p-53; }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do { u1 = uniform(); } while (u1 <= 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

void splat_bilinear(Kernel& k, double x, double y, double mass) {
  const int n = k.size();
  x = std::clamp(x, 0.0, n - 1.0);
  y = std::clamp(y, 0.0, n - 1.0);
  int x0 = std::min(static_cast<int>(x), n - 2 < 0 ? 0 : n - 2);
  int y0 = std::min(static_cast<int>(y), n - 2 < 0 ? 0 : n - 2);
  double fx = x - x0, fy = y - y0;
  if (n == 1) { k(0, 0) += mass; return; }
  k(x0, y0) += mass * (1 - fx) * (1 - fy);
  k(x0 + 1, y0) += mass * fx * (1 - fy);
  k(x0, y0 + 1) += mass * (1 - fx) * fy;
  k(x0 + 1, y0 + 1) += mass * fx * fy;
}

}  // namespace

Image synth_blur(const Image& x, const Kernel& ker, double noise_sigma, std::uint64_t seed) {
  if (noise_sigma < 0.0)
    throw InvalidArgumentError("noise sigma must be >= 0");
  if (!ker.in_constraint_set())
    throw InvalidArgumentError("synthesis kernel must be in C");
  Image y = convolve_circular(x, ker);
  if (noise_sigma > 0.0) {
    GaussianRng rng(seed);
    for (std::size_t i = 0; i < y.size(); ++i)
      y.data()[i] += noise_sigma * rng.gaussian();
  }
  return y;
}

Kernel make_trajectory_kernel(int size, double length, double curvature,
                              std::uint64_t seed) {
  if (size < 1 || size % 2 == 0)
    throw InvalidArgumentError("kernel size must be odd");
  if (length < 0.0 || length >= size)
    throw InvalidArgumentError("trajectory length must satisfy 0 <= length < size");
  if (length == 0.0) return Kernel::dirac(size);

  const double step = 0.25;
  const int n = std::max(1, static_cast<int>(std::ceil(length / step)));
  GaussianRng rng(seed);
  double theta = 2.0 * std::numbers::pi * rng.uniform();

  std::vector<double> xs(n + 1), ys(n + 1);
  xs[0] = 0.0; ys[0] = 0.0;
  for (int i = 0; i < n; ++i) {
    theta += curvature * rng.gaussian() * std::sqrt(step);
    xs[i + 1] = xs[i] + step * std::cos(theta);
    ys[i + 1] = ys[i] + step * std::sin(theta);
  }

  double cx = 0.0, cy = 0.0;
  for (int i = 0; i <= n; ++i) { cx += xs[i]; cy += ys[i]; }
  cx /= n + 1; cy /= n + 1;

  const double center = (size - 1) / 2.0;
  Kernel k(size);
  const double mass = 1.0 / (n + 1);
  for (int i = 0; i <= n; ++i)
    splat_bilinear(k, xs[i] - cx + center, ys[i] - cy + center, mass);
  return project_simplex(k);
}

double ssd(const Image& a, const Image& b, int border_crop) {
  if (!a.same_shape(b)) throw InvalidArgumentError("ssd: image dimensions differ");
  if (border_crop < 0 || 2 * border_crop >= std::min(a.width(), a.height()))
    throw InvalidArgumentError("ssd: border crop leaves no pixels");
  double acc = 0.0;
  for (int y = border_crop; y < a.height() - border_crop; ++y)
    for (int x = border_crop; x < a.width() - border_crop; ++x) {
      double d = a(x, y) - b(x, y);
      acc += d * d;
    }
  return acc;
}

double psnr(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw InvalidArgumentError("psnr: image dimensions differ");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a.data()[i] - b.data()[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

Kernel align_kernels(const Kernel& k_est, const Kernel& k_true) {
  if (k_est.size() != k_true.size())
    throw InvalidArgumentError("align_kernels: sizes differ");
  const int n = k_est.size();
  int best_dx = 0, best_dy = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int dy = 0; dy < n; ++dy)
    for (int dx = 0; dx < n; ++dx) {
      double corr = 0.0;
      for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x)
          corr += k_est((x - dx + n) % n, (y - dy + n) % n) * k_true(x, y);
      if (corr > best) { best = corr; best_dx = dx; best_dy = dy; }
    }
  Kernel out(n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      out(x, y) = k_est((x - best_dx + n) % n, (y - best_dy + n) % n);
  return out;
}

TrialRecord error_ratio_trial(const Image& x_true, const Image& y, const Kernel& k_est,
                              const Kernel& k_true, const NonBlindParams& nb) {
  if (!k_est.in_constraint_set() || !k_true.in_constraint_set())
    throw DegenerateKernelError("error_ratio_trial requires kernels in C");

  const int common = std::max(k_est.size(), k_true.size());
  Kernel est = k_est.size() == common ? k_est : embed_kernel(k_est, common);
  Kernel truth = k_true.size() == common ? k_true : embed_kernel(k_true, common);
  est = align_kernels(est, truth);

  Image with_est = deconvolve(y, est, nb);
  Image with_truth = deconvolve(y, truth, nb);

  const int crop = truth.size() / 2;
  TrialRecord rec;
  rec.ssd_with_estimated = ssd(with_est, x_true, crop);
  rec.ssd_with_truth = ssd(with_truth, x_true, crop);
  if (rec.ssd_with_truth == 0.0)
    rec.error_ratio = rec.ssd_with_estimated == 0.0
                          ? 1.0
                          : std::numeric_limits<double>::infinity();
  else
    rec.error_ratio = rec.ssd_with_estimated / rec.ssd_with_truth;
  rec.psnr_db = psnr(with_est, x_true);
  return rec;
}

Histogram cumulative_histogram(const std::vector<TrialRecord>& records, int max_bin) {
  if (records.empty()) throw InvalidArgumentError("histogram of an empty record set");
  if (max_bin < 1) throw InvalidArgumentError("max_bin must be >= 1");
  Histogram h;
  h.fraction.resize(max_bin);
  for (int r = 1; r <= max_bin; ++r) {
    int count = 0;
    for (const TrialRecord& rec : records)
      if (rec.error_ratio < r) ++count;
    h.fraction[r - 1] = static_cast<double>(count) / records.size();
  }
  return h;
}

// ---- Built-in corpus ----

namespace {

void fill_rect(Image& img, int x0, int y0, int w, int h, double value) {
  for (int y = std::max(0, y0); y < std::min(img.height(), y0 + h); ++y)
    for (int x = std::max(0, x0); x < std::min(img.width(), x0 + w); ++x)
      img(x, y) = value;
}

void fill_disc(Image& img, double cx, double cy, double radius, double value) {
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= radius * radius)
        img(x, y) = value;
}

// Multi-octave bilinear lattice noise in [0,1].
Image value_noise(int size, int base_cell, int octaves, GaussianRng& rng) {
  Image out(size, size);
  double amp = 1.0;
  for (int o = 0; o < octaves; ++o) {
    int cells = std::max(2, base_cell >> o);
    int lattice = cells + 2;
    std::vector<double> node(static_cast<std::size_t>(lattice) * lattice);
    for (double& v : node) v = rng.uniform();
    double cell_px = static_cast<double>(size) / cells;
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        double gx = x / cell_px, gy = y / cell_px;
        int ix = static_cast<int>(gx), iy = static_cast<int>(gy);
        double fx = gx - ix, fy = gy - iy;
        auto at = [&](int i, int j) { return node[static_cast<std::size_t>(j) * lattice + i]; };
        double top = (1 - fx) * at(ix, iy) + fx * at(ix + 1, iy);
        double bot = (1 - fx) * at(ix, iy + 1) + fx * at(ix + 1, iy + 1);
        out(x, y) += amp * ((1 - fy) * top + fy * bot);
      }
    amp *= 0.5;
  }
  double lo = out.min_value(), hi = out.max_value();
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data()[i] = (out.data()[i] - lo) / (hi - lo);
  return out;
}

Image corpus_boxes(int size) {
  GaussianRng rng(411);
  Image img(size, size, 0.5);
  for (int i = 0; i < 16; ++i) {
    int w = 10 + static_cast<int>(rng.uniform() * 50);
    int h = 10 + static_cast<int>(rng.uniform() * 50);
    int x0 = static_cast<int>(rng.uniform() * (size - w));
    int y0 = static_cast<int>(rng.uniform() * (size - h));
    fill_rect(img, x0, y0, w, h, 0.08 + 0.84 * rng.uniform());
  }
  return img;
}

Image corpus_discs(int size) {
  GaussianRng rng(422);
  Image img(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      img(x, y) = 0.30 + 0.40 * y / (size - 1.0);  // smooth vertical ramp
  for (int i = 0; i < 12; ++i) {
    double r = 6.0 + rng.uniform() * 22.0;
    double cx = r + rng.uniform() * (size - 2 * r);
    double cy = r + rng.uniform() * (size - 2 * r);
    fill_disc(img, cx, cy, r, 0.08 + 0.84 * rng.uniform());
  }
  return img;
}

Image corpus_plaid(int size) {
  GaussianRng rng(433);
  auto profile = [&](int n) {
    std::vector<double> p(n);
    double level = 0.3 + 0.4 * rng.uniform();
    for (int i = 0; i < n; ++i) {
      if (rng.uniform() < 0.06) level = 0.08 + 0.84 * rng.uniform();
      p[i] = level;
    }
    return p;
  };
  std::vector<double> u = profile(size), v = profile(size);
  Image img(size, size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      double s = 0.03 * std::sin(0.31 * x) * std::sin(0.27 * y);
      img(x, y) = std::clamp(0.5 * (u[x] + v[y]) + s, 0.0, 1.0);
    }
  return img;
}

Image corpus_terrain(int size) {
  GaussianRng rng(444);
  Image img = value_noise(size, 8, 3, rng);
  for (std::size_t i = 0; i < img.size(); ++i)
    img.data()[i] = 0.15 + 0.70 * img.data()[i];
  for (int i = 0; i < 7; ++i) {
    int w = 8 + static_cast<int>(rng.uniform() * 34);
    int h = 8 + static_cast<int>(rng.uniform() * 34);
    int x0 = static_cast<int>(rng.uniform() * (size - w));
    int y0 = static_cast<int>(rng.uniform() * (size - h));
    fill_rect(img, x0, y0, w, h, 0.08 + 0.84 * rng.uniform());
  }
  return img;
}

}  // namespace

Image corpus_image(int index) {
  switch (index) {
    case 0: return corpus_boxes(kCorpusImageSize);
    case 1: return corpus_discs(kCorpusImageSize);
    case 2: return corpus_plaid(kCorpusImageSize);
    case 3: return corpus_terrain(kCorpusImageSize);
    default: throw InvalidArgumentError("corpus image index out of range");
  }
}

Kernel corpus_kernel(int index) {
  static const struct { int size; double length, curvature; std::uint64_t seed; } spec[] = {
      {9, 5.0, 0.0, 201},  {11, 6.0, 0.4, 202}, {11, 7.0, 0.8, 203},
      {13, 8.0, 1.2, 204}, {13, 9.0, 0.6, 205}, {15, 10.0, 1.0, 206},
      {17, 12.0, 0.9, 207}, {19, 14.0, 1.4, 208},
  };
  if (index < 0 || index >= kCorpusKernelCount)
    throw InvalidArgumentError("corpus kernel index out of range");
  const auto& s = spec[index];
  return make_trajectory_kernel(s.size, s.length, s.curvature, s.seed);
}

std::vector<EvalCase> builtin_corpus() {
  std::vector<EvalCase> cases;
  for (int i = 0; i < kCorpusImageCount; ++i)
    for (int j = 0; j < kCorpusKernelCount; ++j) {
      char img_id[16], ker_id[16];
      std::snprintf(img_id, sizeof(img_id), "img%02d", i);
      std::snprintf(ker_id, sizeof(ker_id), "ker%02d", j);
      cases.push_back({img_id, ker_id, corpus_image(i), corpus_kernel(j)});
    }
  return cases;
}

std::vector<EvalCase> load_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IoError("corpus directory not found: " + dir);
  std::vector<fs::path> image_paths, kernel_paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    if (ext == ".png" || ext == ".pgm") image_paths.push_back(entry.path());
    else if (ext == ".txt") kernel_paths.push_back(entry.path());
  }
  std::sort(image_paths.begin(), image_paths.end());
  std::sort(kernel_paths.begin(), kernel_paths.end());
  if (image_paths.empty() || kernel_paths.empty())
    throw InvalidArgumentError("corpus directory needs at least one image (*.png/*.pgm) "
                               "and one kernel (*.txt)");
  std::vector<EvalCase> cases;
  for (const auto& ip : image_paths)
    for (const auto& kp : kernel_paths) {
      ColorImage img = load_image(ip.string());
      cases.push_back({ip.stem().string(), kp.stem().string(), img.luma(),
                       load_kernel_text(kp.string())});
    }
  return cases;
}

std::string to_string(SizeSetting s) {
  switch (s) {
    case SizeSetting::True: return "true";
    case SizeSetting::Medium: return "medium";
    case SizeSetting::Large: return "large";
  }
  return "true";
}

SizeSetting size_setting_from_string(const std::string& name) {
  if (name == "true") return SizeSetting::True;
  if (name == "medium") return SizeSetting::Medium;
  if (name == "large") return SizeSetting::Large;
  throw InvalidArgumentError("unknown kernel-size setting '" + name +
                             "' (expected true, medium or large)");
}

int setting_size(SizeSetting s, int true_size) {
  switch (s) {
    case SizeSetting::True: return true_size;
    case SizeSetting::Medium: return true_size + 8;
    case SizeSetting::Large: return true_size + 16;
  }
  return true_size;
}

Image trial_observation(const EvalCase& c, const EvalOptions& options, int case_index) {
  return synth_blur(c.sharp, c.kernel, options.noise_sigma,
                    mix_seed(options.seed, static_cast<std::uint64_t>(case_index)));
}

namespace {

TrialRecord run_single_trial(const EvalCase& c, const EvalOptions& opts, int case_index) {
  auto t0 = std::chrono::steady_clock::now();
  Image y = trial_observation(c, opts, case_index);

  Kernel k_est = c.kernel;
  if (!opts.oracle_truth) {
    SolverParams sp = opts.solver;
    sp.kernel_size = setting_size(opts.size_setting, c.kernel.size());
    k_est = estimate_kernel_multiscale(y, sp).kernel;
  }

  TrialRecord rec = error_ratio_trial(c.sharp, y, k_est, c.kernel, opts.nonblind);
  rec.image_id = c.image_id;
  rec.kernel_id = c.kernel_id;
  rec.setting = to_string(opts.size_setting);
  rec.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace

std::vector<TrialRecord> run_eval(const std::vector<EvalCase>& cases,
                                  const EvalOptions& options) {
  if (cases.empty()) throw InvalidArgumentError("empty trial set");
  int jobs = options.jobs > 0 ? options.jobs
                              : static_cast<int>(std::thread::hardware_concurrency());
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(cases.size())));

  std::vector<TrialRecord> records(cases.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;

  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= cases.size()) return;
      try {
        records[i] = run_single_trial(cases[i], options, static_cast<int>(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::sort(records.begin(), records.end(), [](const TrialRecord& a, const TrialRecord& b) {
    if (a.image_id != b.image_id) return a.image_id < b.image_id;
    if (a.kernel_id != b.kernel_id) return a.kernel_id < b.kernel_id;
    return a.setting < b.setting;
  });
  return records;
}

void write_trials_csv(const std::vector<TrialRecord>& records, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << "image,kernel,setting,ssd_est,ssd_true,ratio,psnr_db,seconds\n";
  char buf[256];
  for (const TrialRecord& r : records) {
    std::snprintf(buf, sizeof(buf), "%s,%s,%s,%.9g,%.9g,%.9g,%.9g,%.3f\n",
                  r.image_id.c_str(), r.kernel_id.c_str(), r.setting.c_str(),
                  r.ssd_with_estimated, r.ssd_with_truth, r.error_ratio, r.psnr_db,
                  r.elapsed_seconds);
    f << buf;
  }
  if (!f) throw IoError("failed writing " + path);
}

void write_histogram_csv(const Histogram& hist, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << "bin,fraction\n";
  char buf[64];
  for (std::size_t i = 0; i < hist.fraction.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", i + 1, hist.fraction[i]);
    f << buf;
  }
  if (!f) throw IoError("failed writing " + path);
}

}  // namespace deblur
