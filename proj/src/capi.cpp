#include "deblur.h"

#include <cstring>
#include <string>
#include <vector>

#include "deblur/config.hpp"
#include "deblur/errors.hpp"
#include "deblur/eval.hpp"
#include "deblur/fft.hpp"
#include "deblur/io.hpp"
#include "deblur/kernel.hpp"
#include "deblur/nonblind.hpp"
#include "deblur/pipeline.hpp"

struct deblur_image {
  deblur::ColorImage img;
};

struct deblur_kernel {
  deblur::Kernel ker;
};

struct deblur_result {
  deblur_kernel kernel;
  deblur_image intermediate;
  deblur_image restored;
  std::string trace_json;
  double elapsed_seconds = 0.0;
};

namespace {

thread_local std::string g_last_error;

// Runs `fn`, translating exceptions into status codes.
template <typename Fn>
deblur_status wrap(Fn&& fn) {
  try {
    fn();
    return DEBLUR_OK;
  } catch (const deblur::IoError& e) {
    g_last_error = e.what();
    return DEBLUR_ERR_IO;
  } catch (const deblur::DivergenceError& e) {
    g_last_error = e.what();
    return DEBLUR_ERR_DIVERGENCE;
  } catch (const deblur::DegenerateKernelError& e) {
    g_last_error = e.what();
    return DEBLUR_ERR_DEGENERATE;
  } catch (const deblur::InvalidArgumentError& e) {
    g_last_error = e.what();
    return DEBLUR_ERR_INVALID;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DEBLUR_ERR_INVALID;
  }
}

deblur::SolverParams to_core(const deblur_params& p) {
  deblur::SolverParams sp;
  sp.lambda = p.lambda;
  sp.alpha_x = p.alpha_x;
  sp.beta_x = p.beta_x;
  sp.alpha_k = p.alpha_k;
  sp.beta_k = p.beta_k;
  sp.gamma_x = p.gamma_x;
  sp.gamma_k = p.gamma_k;
  sp.c_x = p.c_x;
  sp.c_k = p.c_k;
  sp.outer_iters = p.outer_iters;
  sp.inner_iters_image = p.inner_iters_image;
  sp.inner_iters_kernel = p.inner_iters_kernel;
  sp.scales = p.scales;
  sp.kernel_size = p.kernel_size;
  sp.pyramid_factor = p.pyramid_factor;
  switch (p.variant) {
    case DEBLUR_VARIANT_R1: sp.variant = deblur::Variant::R1; break;
    case DEBLUR_VARIANT_R2: sp.variant = deblur::Variant::R2; break;
    case DEBLUR_VARIANT_R3: sp.variant = deblur::Variant::R3; break;
    default:
      throw deblur::InvalidArgumentError("variant must be 0 (R1), 1 (R2) or 2 (R3)");
  }
  return sp;
}

void from_core(const deblur::SolverParams& sp, deblur_params& p) {
  p.lambda = sp.lambda;
  p.alpha_x = sp.alpha_x;
  p.beta_x = sp.beta_x;
  p.alpha_k = sp.alpha_k;
  p.beta_k = sp.beta_k;
  p.gamma_x = sp.gamma_x;
  p.gamma_k = sp.gamma_k;
  p.c_x = sp.c_x;
  p.c_k = sp.c_k;
  p.outer_iters = sp.outer_iters;
  p.inner_iters_image = sp.inner_iters_image;
  p.inner_iters_kernel = sp.inner_iters_kernel;
  p.scales = sp.scales;
  p.kernel_size = sp.kernel_size;
  p.pyramid_factor = sp.pyramid_factor;
  switch (sp.variant) {
    case deblur::Variant::R1: p.variant = DEBLUR_VARIANT_R1; break;
    case deblur::Variant::R2: p.variant = DEBLUR_VARIANT_R2; break;
    case deblur::Variant::R3: p.variant = DEBLUR_VARIANT_R3; break;
  }
}

deblur::NonBlindParams to_core(const deblur_nonblind_params& p) {
  deblur::NonBlindParams nb;
  nb.fidelity_weight = p.fidelity_weight;
  nb.prior_exponent = p.prior_exponent;
  nb.hq_iters = p.hq_iters;
  nb.penalty_init = p.penalty_init;
  nb.penalty_step = p.penalty_step;
  return nb;
}

void from_core(const deblur::NonBlindParams& nb, deblur_nonblind_params& p) {
  p.fidelity_weight = nb.fidelity_weight;
  p.prior_exponent = nb.prior_exponent;
  p.hq_iters = nb.hq_iters;
  p.penalty_init = nb.penalty_init;
  p.penalty_step = nb.penalty_step;
}

void require(bool cond, const char* what) {
  if (!cond) throw deblur::InvalidArgumentError(what);
}

}  // namespace

extern "C" {

const char* deblur_last_error(void) { return g_last_error.c_str(); }

deblur_status deblur_image_load(const char* path, deblur_image** out) {
  return wrap([&] {
    require(path && out, "null argument");
    *out = new deblur_image{deblur::load_image(path)};
  });
}

deblur_status deblur_image_save(const deblur_image* img, const char* path) {
  return wrap([&] {
    require(img && path, "null argument");
    deblur::save_image(img->img, path);
  });
}

deblur_status deblur_image_create(int width, int height, int channels,
                                  const double* data, deblur_image** out) {
  return wrap([&] {
    require(out != nullptr, "null argument");
    require(width > 0 && height > 0, "image dimensions must be positive");
    require(channels == 1 || channels == 3, "channels must be 1 or 3");
    deblur::ColorImage img;
    const std::size_t plane_len = static_cast<std::size_t>(width) * height;
    for (int c = 0; c < channels; ++c) {
      deblur::Image plane(width, height);
      if (data) std::memcpy(plane.data(), data + c * plane_len, plane_len * sizeof(double));
      img.planes.push_back(std::move(plane));
    }
    *out = new deblur_image{std::move(img)};
  });
}

int deblur_image_width(const deblur_image* img) { return img ? img->img.width() : 0; }
int deblur_image_height(const deblur_image* img) { return img ? img->img.height() : 0; }
int deblur_image_channels(const deblur_image* img) { return img ? img->img.channels() : 0; }

const double* deblur_image_plane(const deblur_image* img, int channel) {
  if (!img || channel < 0 || channel >= img->img.channels()) return nullptr;
  return img->img.planes[channel].data();
}

void deblur_image_free(deblur_image* img) { delete img; }

deblur_status deblur_kernel_load(const char* path, deblur_kernel** out) {
  return wrap([&] {
    require(path && out, "null argument");
    *out = new deblur_kernel{deblur::load_kernel_text(path)};
  });
}

deblur_status deblur_kernel_save(const deblur_kernel* ker, const char* path) {
  return wrap([&] {
    require(ker && path, "null argument");
    deblur::save_kernel_text(ker->ker, path);
  });
}

deblur_status deblur_kernel_save_png(const deblur_kernel* ker, const char* path,
                                     int upscale) {
  return wrap([&] {
    require(ker && path, "null argument");
    deblur::save_kernel_png(ker->ker, path, upscale);
  });
}

deblur_status deblur_kernel_create(int size, const double* data, deblur_kernel** out) {
  return wrap([&] {
    require(data && out, "null argument");
    std::vector<double> values(data, data + static_cast<std::size_t>(size) * size);
    *out = new deblur_kernel{deblur::project_simplex(deblur::Kernel(size, std::move(values)))};
  });
}

deblur_status deblur_kernel_dirac(int size, deblur_kernel** out) {
  return wrap([&] {
    require(out != nullptr, "null argument");
    *out = new deblur_kernel{deblur::Kernel::dirac(size)};
  });
}

deblur_status deblur_kernel_trajectory(int size, double length, double curvature,
                                       uint64_t seed, deblur_kernel** out) {
  return wrap([&] {
    require(out != nullptr, "null argument");
    *out = new deblur_kernel{deblur::make_trajectory_kernel(size, length, curvature, seed)};
  });
}

int deblur_kernel_size(const deblur_kernel* ker) { return ker ? ker->ker.size() : 0; }

const double* deblur_kernel_data(const deblur_kernel* ker) {
  return ker ? ker->ker.data() : nullptr;
}

void deblur_kernel_free(deblur_kernel* ker) { delete ker; }

void deblur_params_init(deblur_params* params) {
  if (!params) return;
  from_core(deblur::SolverParams{}, *params);
}

void deblur_nonblind_params_init(deblur_nonblind_params* params) {
  if (!params) return;
  from_core(deblur::NonBlindParams{}, *params);
}

deblur_status deblur_config_apply_json(const char* json_text, deblur_params* params,
                                       deblur_nonblind_params* nb_params) {
  return wrap([&] {
    require(json_text && params && nb_params, "null argument");
    deblur::SolverParams sp = to_core(*params);
    deblur::NonBlindParams nb = to_core(*nb_params);
    deblur::apply_config_json(json_text, sp, nb);
    from_core(sp, *params);
    from_core(nb, *nb_params);
  });
}

deblur_status deblur_run(const deblur_image* blurred, const deblur_params* params,
                         const deblur_nonblind_params* nb_params, deblur_result** out) {
  return wrap([&] {
    require(blurred && params && nb_params && out, "null argument");
    deblur::DeblurResult res =
        deblur::deblur_blind_color(blurred->img.planes, to_core(*params), to_core(*nb_params));
    auto* r = new deblur_result;
    r->kernel.ker = std::move(res.kernel);
    r->intermediate.img.planes.push_back(std::move(res.intermediate));
    r->restored.img.planes = std::move(res.restored);
    r->elapsed_seconds = res.elapsed_seconds;
    r->trace_json = deblur::trace_to_json(res);
    *out = r;
  });
}

const deblur_kernel* deblur_result_kernel(const deblur_result* res) {
  return res ? &res->kernel : nullptr;
}

const deblur_image* deblur_result_intermediate(const deblur_result* res) {
  return res ? &res->intermediate : nullptr;
}

const deblur_image* deblur_result_restored(const deblur_result* res) {
  return res ? &res->restored : nullptr;
}

const char* deblur_result_trace_json(const deblur_result* res) {
  return res ? res->trace_json.c_str() : "";
}

double deblur_result_elapsed_seconds(const deblur_result* res) {
  return res ? res->elapsed_seconds : 0.0;
}

void deblur_result_free(deblur_result* res) { delete res; }

deblur_status deblur_deconvolve(const deblur_image* blurred, const deblur_kernel* ker,
                                const deblur_nonblind_params* nb_params,
                                deblur_image** out) {
  return wrap([&] {
    require(blurred && ker && nb_params && out, "null argument");
    deblur_image* r = new deblur_image;
    try {
      r->img.planes =
          deblur::deconvolve_channels(blurred->img.planes, ker->ker, to_core(*nb_params));
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

deblur_status deblur_synthesize(const deblur_image* sharp, const deblur_kernel* ker,
                                double noise_sigma, uint64_t seed, deblur_image** out) {
  return wrap([&] {
    require(sharp && ker && out, "null argument");
    deblur::ColorImage res;
    for (std::size_t c = 0; c < sharp->img.planes.size(); ++c)
      res.planes.push_back(deblur::synth_blur(sharp->img.planes[c], ker->ker, noise_sigma,
                                              seed + c));
    *out = new deblur_image{std::move(res)};
  });
}

deblur_status deblur_metric_psnr(const deblur_image* a, const deblur_image* b,
                                 double* out) {
  return wrap([&] {
    require(a && b && out, "null argument");
    *out = deblur::psnr(a->img.luma(), b->img.luma());
  });
}

deblur_status deblur_metric_ssd(const deblur_image* a, const deblur_image* b,
                                int border_crop, double* out) {
  return wrap([&] {
    require(a && b && out, "null argument");
    *out = deblur::ssd(a->img.luma(), b->img.luma(), border_crop);
  });
}

void deblur_eval_options_init(deblur_eval_options* options) {
  if (!options) return;
  deblur::EvalOptions o;
  options->size_setting = DEBLUR_SIZE_TRUE;
  options->noise_sigma = o.noise_sigma;
  options->seed = o.seed;
  options->jobs = o.jobs;
  options->max_bin = o.max_bin;
  options->oracle_truth = 0;
  deblur_params_init(&options->solver);
  deblur_nonblind_params_init(&options->nonblind);
}

deblur_status deblur_eval_run(const char* corpus_dir, const deblur_eval_options* options,
                              const char* trials_csv_path, const char* histogram_csv_path) {
  return wrap([&] {
    require(options && trials_csv_path && histogram_csv_path, "null argument");
    deblur::EvalOptions o;
    switch (options->size_setting) {
      case DEBLUR_SIZE_TRUE: o.size_setting = deblur::SizeSetting::True; break;
      case DEBLUR_SIZE_MEDIUM: o.size_setting = deblur::SizeSetting::Medium; break;
      case DEBLUR_SIZE_LARGE: o.size_setting = deblur::SizeSetting::Large; break;
      default:
        throw deblur::InvalidArgumentError("size_setting must be 0, 1 or 2");
    }
    o.noise_sigma = options->noise_sigma;
    o.seed = options->seed;
    o.jobs = options->jobs;
    o.max_bin = options->max_bin;
    o.oracle_truth = options->oracle_truth != 0;
    o.solver = to_core(options->solver);
    o.nonblind = to_core(options->nonblind);

    std::vector<deblur::EvalCase> cases =
        corpus_dir ? deblur::load_corpus(corpus_dir) : deblur::builtin_corpus();
    std::vector<deblur::TrialRecord> records = deblur::run_eval(cases, o);
    deblur::write_trials_csv(records, trials_csv_path);
    deblur::write_histogram_csv(deblur::cumulative_histogram(records, o.max_bin),
                                histogram_csv_path);
  });
}

}  // extern "C"
