/*
 * Blind motion deblurring via bi-l0-l2 regularized kernel estimation.
 *
 * C API of libdeblur: opaque handles, integer status codes, and a
 * thread-local error message. All functions returning deblur_status
 * yield DEBLUR_OK (0) on success; on failure the out-parameters are
 * untouched and deblur_last_error() describes the problem.
 */
#ifndef DEBLUR_H
#define DEBLUR_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct deblur_image deblur_image;   /* 1- or 3-channel raster, samples in [0,1] */
typedef struct deblur_kernel deblur_kernel; /* odd-sized blur kernel */
typedef struct deblur_result deblur_result; /* output of a blind run */

typedef enum deblur_status {
  DEBLUR_OK = 0,
  DEBLUR_ERR_IO = 1,         /* unreadable/unwritable files, bad formats */
  DEBLUR_ERR_INVALID = 2,    /* invalid arguments or configuration */
  DEBLUR_ERR_DIVERGENCE = 3, /* non-finite values inside a solver */
  DEBLUR_ERR_DEGENERATE = 4  /* kernel with no positive mass */
} deblur_status;

/* Message for the most recent failure on the calling thread. */
const char* deblur_last_error(void);

/* ---- images ---- */

deblur_status deblur_image_load(const char* path, deblur_image** out);
deblur_status deblur_image_save(const deblur_image* img, const char* path);
/* data may be NULL (zeros); layout is channel-planar, row-major. */
deblur_status deblur_image_create(int width, int height, int channels,
                                  const double* data, deblur_image** out);
int deblur_image_width(const deblur_image* img);
int deblur_image_height(const deblur_image* img);
int deblur_image_channels(const deblur_image* img);
/* Plane base pointer (row-major, width*height doubles). */
const double* deblur_image_plane(const deblur_image* img, int channel);
void deblur_image_free(deblur_image* img);

/* ---- kernels ---- */

deblur_status deblur_kernel_load(const char* path, deblur_kernel** out);
deblur_status deblur_kernel_save(const deblur_kernel* ker, const char* path);
/* Max-normalized grayscale PNG visualization, upscaled by `upscale`. */
deblur_status deblur_kernel_save_png(const deblur_kernel* ker, const char* path,
                                     int upscale);
/* Projects the raw raster onto {k >= 0, sum k = 1}. */
deblur_status deblur_kernel_create(int size, const double* data, deblur_kernel** out);
deblur_status deblur_kernel_dirac(int size, deblur_kernel** out);
/* Random smooth motion trajectory, rasterized and normalized. */
deblur_status deblur_kernel_trajectory(int size, double length, double curvature,
                                       uint64_t seed, deblur_kernel** out);
int deblur_kernel_size(const deblur_kernel* ker);
const double* deblur_kernel_data(const deblur_kernel* ker);
void deblur_kernel_free(deblur_kernel* ker);

/* ---- parameters ---- */

typedef enum deblur_variant {
  DEBLUR_VARIANT_R1 = 0, /* full bi-l0-l2 regularization */
  DEBLUR_VARIANT_R2 = 1, /* image l2 term off */
  DEBLUR_VARIANT_R3 = 2  /* image l2 and kernel l0 terms off */
} deblur_variant;

typedef struct deblur_params {
  double lambda;
  double alpha_x, beta_x;
  double alpha_k, beta_k;
  double gamma_x, gamma_k;
  double c_x, c_k;          /* continuation factors, in (0,1) */
  int outer_iters;          /* I */
  int inner_iters_image;    /* L */
  int inner_iters_kernel;   /* J */
  int scales;               /* S */
  int kernel_size;          /* odd, >= 3 */
  double pyramid_factor;
  int variant;              /* deblur_variant */
} deblur_params;

void deblur_params_init(deblur_params* params);

typedef struct deblur_nonblind_params {
  double fidelity_weight;
  double prior_exponent; /* 0.5, 2/3 or 2 */
  int hq_iters;
  double penalty_init;
  double penalty_step;
} deblur_nonblind_params;

void deblur_nonblind_params_init(deblur_nonblind_params* params);

/* Applies a JSON object over the given parameter structs (solver keys
 * top-level, non-blind keys under "nonblind"); unknown keys fail. */
deblur_status deblur_config_apply_json(const char* json_text, deblur_params* params,
                                       deblur_nonblind_params* nb_params);

/* ---- pipeline ---- */

deblur_status deblur_run(const deblur_image* blurred, const deblur_params* params,
                         const deblur_nonblind_params* nb_params, deblur_result** out);
const deblur_kernel* deblur_result_kernel(const deblur_result* res);
const deblur_image* deblur_result_intermediate(const deblur_result* res);
const deblur_image* deblur_result_restored(const deblur_result* res);
/* Energy traces and timing as a JSON document (owned by the result). */
const char* deblur_result_trace_json(const deblur_result* res);
double deblur_result_elapsed_seconds(const deblur_result* res);
void deblur_result_free(deblur_result* res);

/* Non-blind restoration only (per channel for color inputs). */
deblur_status deblur_deconvolve(const deblur_image* blurred, const deblur_kernel* ker,
                                const deblur_nonblind_params* nb_params,
                                deblur_image** out);

/* Forward model: circular convolution plus Gaussian noise. */
deblur_status deblur_synthesize(const deblur_image* sharp, const deblur_kernel* ker,
                                double noise_sigma, uint64_t seed, deblur_image** out);

/* ---- metrics ---- */

deblur_status deblur_metric_psnr(const deblur_image* a, const deblur_image* b,
                                 double* out);
deblur_status deblur_metric_ssd(const deblur_image* a, const deblur_image* b,
                                int border_crop, double* out);

/* ---- evaluation sweeps ---- */

typedef enum deblur_size_setting {
  DEBLUR_SIZE_TRUE = 0,
  DEBLUR_SIZE_MEDIUM = 1, /* true size + 8 */
  DEBLUR_SIZE_LARGE = 2   /* true size + 16 */
} deblur_size_setting;

typedef struct deblur_eval_options {
  int size_setting;   /* deblur_size_setting */
  double noise_sigma;
  uint64_t seed;
  int jobs;           /* <= 0: hardware concurrency */
  int max_bin;        /* histogram bins 1..max_bin */
  int oracle_truth;   /* nonzero: score the true kernel instead of estimating */
  deblur_params solver;
  deblur_nonblind_params nonblind;
} deblur_eval_options;

void deblur_eval_options_init(deblur_eval_options* options);

/* Runs the (sharp, kernel) cross product of `corpus_dir` (NULL for the
 * built-in synthetic corpus) and writes the trial table and cumulative
 * histogram CSVs. */
deblur_status deblur_eval_run(const char* corpus_dir, const deblur_eval_options* options,
                              const char* trials_csv_path, const char* histogram_csv_path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* DEBLUR_H */
