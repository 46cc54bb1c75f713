// Command-line front end for blind motion deblurring: estimation,
// synthetic blur generation, benchmark sweeps and regularizer
// ablations. Built entirely on the libdeblur C API.
//
// Exit codes: 0 ok, 1 I/O, 2 invalid config, 3 numerical divergence,
// 4 degenerate kernel.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deblur.h"

namespace fs = std::filesystem;

namespace {

int fail(deblur_status status) {
  std::cerr << "error: " << deblur_last_error() << "\n";
  return static_cast<int>(status);
}

int fail_io(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 1;
}

int fail_config(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 2;
}

// Solver/non-blind parameter flags shared by the subcommands. Flags
// beat the config file, which beats the defaults.
struct ParamFlags {
  std::string params_file;
  double lambda = 0, alpha_x = 0, beta_x = 0, alpha_k = 0, beta_k = 0;
  double gamma_x = 0, gamma_k = 0, c_x = 0, c_k = 0, pyramid_factor = 0;
  int outer_iters = 0, inner_l = 0, inner_j = 0, scales = 0, kernel_size = 0;
  std::string variant;
  double nb_fidelity = 0, nb_exponent = 0, nb_penalty_init = 0, nb_penalty_step = 0;
  int nb_iters = 0;

  CLI::Option *o_lambda, *o_alpha_x, *o_beta_x, *o_alpha_k, *o_beta_k;
  CLI::Option *o_gamma_x, *o_gamma_k, *o_c_x, *o_c_k, *o_pyramid;
  CLI::Option *o_outer, *o_inner_l, *o_inner_j, *o_scales, *o_kernel_size, *o_variant;
  CLI::Option *o_nb_fidelity, *o_nb_exponent, *o_nb_iters, *o_nb_pinit, *o_nb_pstep;

  void add(CLI::App* app, bool with_kernel_size) {
    app->add_option("--params", params_file, "JSON file with parameter overrides");
    o_lambda = app->add_option("--lambda", lambda, "data fidelity weight");
    o_alpha_x = app->add_option("--alpha-x", alpha_x, "image l0 weight");
    o_beta_x = app->add_option("--beta-x", beta_x, "image l2 weight");
    o_alpha_k = app->add_option("--alpha-k", alpha_k, "kernel l0 weight");
    o_beta_k = app->add_option("--beta-k", beta_k, "kernel l2 weight");
    o_gamma_x = app->add_option("--gamma-x", gamma_x, "image split penalty");
    o_gamma_k = app->add_option("--gamma-k", gamma_k, "kernel split penalty");
    o_c_x = app->add_option("--c-x", c_x, "image continuation factor");
    o_c_k = app->add_option("--c-k", c_k, "kernel continuation factor");
    o_outer = app->add_option("--outer-iters", outer_iters, "outer iterations I");
    o_inner_l = app->add_option("--inner-iters-image", inner_l, "inner iterations L");
    o_inner_j = app->add_option("--inner-iters-kernel", inner_j, "inner iterations J");
    o_scales = app->add_option("--scales", scales, "pyramid scale count S");
    o_pyramid = app->add_option("--pyramid-factor", pyramid_factor, "pyramid factor");
    o_variant = app->add_option("--variant", variant, "regularizer variant R1|R2|R3");
    o_kernel_size = with_kernel_size
        ? app->add_option("--kernel-size", kernel_size, "kernel size (odd)")
        : nullptr;
    o_nb_fidelity = app->add_option("--nb-fidelity", nb_fidelity,
                                    "non-blind fidelity weight");
    o_nb_exponent = app->add_option("--nb-exponent", nb_exponent,
                                    "non-blind prior exponent (0.5, 2/3, 2)");
    o_nb_iters = app->add_option("--nb-iters", nb_iters, "half-quadratic iterations");
    o_nb_pinit = app->add_option("--nb-penalty-init", nb_penalty_init,
                                 "initial half-quadratic penalty");
    o_nb_pstep = app->add_option("--nb-penalty-step", nb_penalty_step,
                                 "half-quadratic penalty ratio");
  }

  // Returns 0 or an exit code.
  int apply(deblur_params* p, deblur_nonblind_params* nb) const {
    if (!params_file.empty()) {
      std::ifstream f(params_file);
      if (!f) return fail_io("cannot read params file " + params_file);
      std::ostringstream ss;
      ss << f.rdbuf();
      deblur_status st = deblur_config_apply_json(ss.str().c_str(), p, nb);
      if (st != DEBLUR_OK) return fail(st);
    }
    if (*o_lambda) p->lambda = lambda;
    if (*o_alpha_x) p->alpha_x = alpha_x;
    if (*o_beta_x) p->beta_x = beta_x;
    if (*o_alpha_k) p->alpha_k = alpha_k;
    if (*o_beta_k) p->beta_k = beta_k;
    if (*o_gamma_x) p->gamma_x = gamma_x;
    if (*o_gamma_k) p->gamma_k = gamma_k;
    if (*o_c_x) p->c_x = c_x;
    if (*o_c_k) p->c_k = c_k;
    if (*o_outer) p->outer_iters = outer_iters;
    if (*o_inner_l) p->inner_iters_image = inner_l;
    if (*o_inner_j) p->inner_iters_kernel = inner_j;
    if (*o_scales) p->scales = scales;
    if (*o_pyramid) p->pyramid_factor = pyramid_factor;
    if (*o_variant) {
      if (variant == "R1") p->variant = DEBLUR_VARIANT_R1;
      else if (variant == "R2") p->variant = DEBLUR_VARIANT_R2;
      else if (variant == "R3") p->variant = DEBLUR_VARIANT_R3;
      else return fail_config("--variant must be R1, R2 or R3");
    }
    if (o_kernel_size && *o_kernel_size) {
      if (kernel_size < 3 || kernel_size % 2 == 0)
        return fail_config("--kernel-size must be odd and >= 3");
      p->kernel_size = kernel_size;
    }
    if (*o_nb_fidelity) nb->fidelity_weight = nb_fidelity;
    if (*o_nb_exponent) nb->prior_exponent = nb_exponent;
    if (*o_nb_iters) nb->hq_iters = nb_iters;
    if (*o_nb_pinit) nb->penalty_init = nb_penalty_init;
    if (*o_nb_pstep) nb->penalty_step = nb_penalty_step;
    return 0;
  }
};

int ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) return fail_io("cannot create output directory " + dir + ": " + ec.message());
  return 0;
}

// ---- deblur ----

struct DeblurArgs {
  std::string input, out_dir;
  int kernel_interp = 5;
  ParamFlags flags;
};

int run_deblur(const DeblurArgs& args) {
  if (!fs::exists(args.input)) return fail_io("input image not found: " + args.input);
  if (int rc = ensure_dir(args.out_dir)) return rc;

  deblur_params params;
  deblur_nonblind_params nb;
  deblur_params_init(&params);
  deblur_nonblind_params_init(&nb);
  if (int rc = args.flags.apply(&params, &nb)) return rc;
  if (args.kernel_interp < 1) return fail_config("--kernel-interp must be >= 1");

  deblur_image* input = nullptr;
  deblur_status st = deblur_image_load(args.input.c_str(), &input);
  if (st != DEBLUR_OK) return fail(st);

  std::printf("deblur: %s (%dx%d, %d channel%s), kernel size %d, variant R%d\n",
              args.input.c_str(), deblur_image_width(input), deblur_image_height(input),
              deblur_image_channels(input), deblur_image_channels(input) == 1 ? "" : "s",
              params.kernel_size, params.variant + 1);

  deblur_result* result = nullptr;
  st = deblur_run(input, &params, &nb, &result);
  deblur_image_free(input);
  if (st != DEBLUR_OK) return fail(st);

  const fs::path out(args.out_dir);
  st = deblur_kernel_save(deblur_result_kernel(result), (out / "kernel.txt").c_str());
  if (st == DEBLUR_OK)
    st = deblur_kernel_save_png(deblur_result_kernel(result), (out / "kernel.png").c_str(),
                                args.kernel_interp);
  if (st == DEBLUR_OK)
    st = deblur_image_save(deblur_result_intermediate(result),
                           (out / "intermediate.png").c_str());
  if (st == DEBLUR_OK)
    st = deblur_image_save(deblur_result_restored(result), (out / "restored.png").c_str());
  if (st == DEBLUR_OK) {
    std::ofstream f(out / "trace.json");
    if (f) f << deblur_result_trace_json(result) << "\n";
    if (!f) {
      deblur_result_free(result);
      return fail_io("cannot write trace.json");
    }
  }
  double elapsed = deblur_result_elapsed_seconds(result);
  deblur_result_free(result);
  if (st != DEBLUR_OK) return fail(st);
  std::printf("done in %.2f s -> %s/{kernel.txt,kernel.png,intermediate.png,restored.png,trace.json}\n",
              elapsed, args.out_dir.c_str());
  return 0;
}

// ---- synth ----

struct SynthArgs {
  std::string input, output, kernel_file, kernel_out;
  int traj_size = 13;
  double traj_length = 7.0;
  double traj_curvature = 0.8;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
};

int run_synth(const SynthArgs& args) {
  if (!fs::exists(args.input)) return fail_io("input image not found: " + args.input);

  deblur_kernel* kernel = nullptr;
  deblur_status st;
  if (!args.kernel_file.empty()) {
    st = deblur_kernel_load(args.kernel_file.c_str(), &kernel);
  } else {
    st = deblur_kernel_trajectory(args.traj_size, args.traj_length, args.traj_curvature,
                                  args.seed, &kernel);
  }
  if (st != DEBLUR_OK) return fail(st);

  deblur_image* sharp = nullptr;
  st = deblur_image_load(args.input.c_str(), &sharp);
  if (st != DEBLUR_OK) {
    deblur_kernel_free(kernel);
    return fail(st);
  }

  deblur_image* blurred = nullptr;
  st = deblur_synthesize(sharp, kernel, args.noise_sigma, args.seed, &blurred);
  deblur_image_free(sharp);
  if (st != DEBLUR_OK) {
    deblur_kernel_free(kernel);
    return fail(st);
  }

  st = deblur_image_save(blurred, args.output.c_str());
  deblur_image_free(blurred);

  std::string kernel_out = args.kernel_out;
  if (kernel_out.empty())
    kernel_out = (fs::path(args.output).parent_path() /
                  (fs::path(args.output).stem().string() + "_kernel.txt")).string();
  if (st == DEBLUR_OK) st = deblur_kernel_save(kernel, kernel_out.c_str());
  deblur_kernel_free(kernel);
  if (st != DEBLUR_OK) return fail(st);

  std::ofstream meta(args.output + ".meta.json");
  meta << "{\n  \"seed\": " << args.seed << ",\n  \"noise_sigma\": " << args.noise_sigma
       << ",\n  \"kernel\": \"" << kernel_out << "\"\n}\n";
  if (!meta) return fail_io("cannot write " + args.output + ".meta.json");

  std::printf("synthesized %s (kernel %s, sigma %g, seed %llu)\n", args.output.c_str(),
              kernel_out.c_str(), args.noise_sigma,
              static_cast<unsigned long long>(args.seed));
  return 0;
}

// ---- eval / ablate ----

struct EvalArgs {
  std::string corpus, out_dir;
  std::string size_setting = "true";
  double noise_sigma = 0.005;
  std::uint64_t seed = 7;
  int jobs = 0;
  int max_bin = 6;
  bool oracle_truth = false;
  ParamFlags flags;
};

int run_eval_variants(const EvalArgs& args, const std::vector<int>& variants) {
  if (!args.corpus.empty() && !fs::is_directory(args.corpus))
    return fail_io("corpus directory not found: " + args.corpus);
  if (int rc = ensure_dir(args.out_dir)) return rc;

  deblur_eval_options opts;
  deblur_eval_options_init(&opts);
  if (int rc = args.flags.apply(&opts.solver, &opts.nonblind)) return rc;
  if (args.size_setting == "true") opts.size_setting = DEBLUR_SIZE_TRUE;
  else if (args.size_setting == "medium") opts.size_setting = DEBLUR_SIZE_MEDIUM;
  else if (args.size_setting == "large") opts.size_setting = DEBLUR_SIZE_LARGE;
  else return fail_config("--size-setting must be true, medium or large");
  opts.noise_sigma = args.noise_sigma;
  opts.seed = args.seed;
  opts.jobs = args.jobs;
  opts.max_bin = args.max_bin;
  opts.oracle_truth = args.oracle_truth ? 1 : 0;

  for (int v : variants) {
    opts.solver.variant = v;
    std::string tag = "R" + std::to_string(v + 1) + "_" + args.size_setting;
    fs::path trials = fs::path(args.out_dir) / ("trials_" + tag + ".csv");
    fs::path hist = fs::path(args.out_dir) / ("histogram_" + tag + ".csv");
    std::printf("eval: variant R%d, setting %s -> %s\n", v + 1,
                args.size_setting.c_str(), trials.c_str());
    deblur_status st = deblur_eval_run(args.corpus.empty() ? nullptr : args.corpus.c_str(),
                                       &opts, trials.c_str(), hist.c_str());
    if (st != DEBLUR_OK) return fail(st);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blind motion deblurring via bi-l0-l2 regularized kernel estimation"};
  app.require_subcommand(1);

  DeblurArgs deblur_args;
  CLI::App* cmd_deblur = app.add_subcommand("deblur", "Estimate a blur kernel and restore an image");
  cmd_deblur->add_option("--input", deblur_args.input, "blurred input image (PNG/PGM)")
      ->required();
  cmd_deblur->add_option("--out-dir", deblur_args.out_dir, "output directory")->required();
  cmd_deblur->add_option("--kernel-interp", deblur_args.kernel_interp,
                         "kernel PNG upscale factor");
  deblur_args.flags.add(cmd_deblur, /*with_kernel_size=*/true);

  SynthArgs synth_args;
  CLI::App* cmd_synth = app.add_subcommand("synth", "Blur a sharp image with a known kernel");
  cmd_synth->add_option("--input", synth_args.input, "sharp input image")->required();
  cmd_synth->add_option("--output", synth_args.output, "blurred output image")->required();
  cmd_synth->add_option("--kernel", synth_args.kernel_file, "kernel text file to apply");
  cmd_synth->add_option("--kernel-out", synth_args.kernel_out, "where to write the kernel");
  cmd_synth->add_option("--traj-size", synth_args.traj_size, "generated kernel size (odd)");
  cmd_synth->add_option("--traj-length", synth_args.traj_length, "trajectory length (px)");
  cmd_synth->add_option("--traj-curvature", synth_args.traj_curvature, "trajectory curvature");
  cmd_synth->add_option("--noise-sigma", synth_args.noise_sigma, "Gaussian noise sigma");
  cmd_synth->add_option("--seed", synth_args.seed, "random seed");

  EvalArgs eval_args;
  CLI::App* cmd_eval = app.add_subcommand("eval", "Run SSD error-ratio trials over a corpus");
  std::string eval_variant = "R1";
  cmd_eval->add_option("--corpus", eval_args.corpus,
                       "corpus directory (default: built-in synthetic corpus)");
  cmd_eval->add_option("--out-dir", eval_args.out_dir, "output directory")->required();
  cmd_eval->add_option("--variant", eval_variant, "regularizer variant R1|R2|R3");
  cmd_eval->add_option("--size-setting", eval_args.size_setting,
                       "kernel-size setting true|medium|large");
  cmd_eval->add_option("--noise-sigma", eval_args.noise_sigma, "synthetic noise sigma");
  cmd_eval->add_option("--seed", eval_args.seed, "base random seed");
  cmd_eval->add_option("--jobs", eval_args.jobs, "parallel trial workers");
  cmd_eval->add_option("--max-bin", eval_args.max_bin, "histogram bin count");
  cmd_eval->add_flag("--oracle-truth", eval_args.oracle_truth,
                     "score the true kernel instead of estimating");
  eval_args.flags.add(cmd_eval, /*with_kernel_size=*/false);

  EvalArgs ablate_args;
  CLI::App* cmd_ablate = app.add_subcommand(
      "ablate", "Run the eval corpus under all regularizer variants (R1, R2, R3)");
  cmd_ablate->add_option("--corpus", ablate_args.corpus,
                         "corpus directory (default: built-in synthetic corpus)");
  cmd_ablate->add_option("--out-dir", ablate_args.out_dir, "output directory")->required();
  cmd_ablate->add_option("--size-setting", ablate_args.size_setting,
                         "kernel-size setting true|medium|large");
  cmd_ablate->add_option("--noise-sigma", ablate_args.noise_sigma, "synthetic noise sigma");
  cmd_ablate->add_option("--seed", ablate_args.seed, "base random seed");
  cmd_ablate->add_option("--jobs", ablate_args.jobs, "parallel trial workers");
  cmd_ablate->add_option("--max-bin", ablate_args.max_bin, "histogram bin count");
  cmd_ablate->add_flag("--oracle-truth", ablate_args.oracle_truth,
                       "score the true kernel instead of estimating");
  ablate_args.flags.add(cmd_ablate, /*with_kernel_size=*/false);

  CLI11_PARSE(app, argc, argv);

  if (cmd_deblur->parsed()) return run_deblur(deblur_args);
  if (cmd_synth->parsed()) return run_synth(synth_args);
  if (cmd_eval->parsed()) {
    if (eval_variant == "R1") return run_eval_variants(eval_args, {DEBLUR_VARIANT_R1});
    if (eval_variant == "R2") return run_eval_variants(eval_args, {DEBLUR_VARIANT_R2});
    if (eval_variant == "R3") return run_eval_variants(eval_args, {DEBLUR_VARIANT_R3});
    return fail_config("--variant must be R1, R2 or R3");
  }
  if (cmd_ablate->parsed())
    return run_eval_variants(ablate_args,
                             {DEBLUR_VARIANT_R1, DEBLUR_VARIANT_R2, DEBLUR_VARIANT_R3});
  return 2;
}
