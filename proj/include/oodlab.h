/* Copyright 2026 The OODLab Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C API of the OOD generalization laboratory. All entry points are
 * thread-compatible: handles must not be shared across threads without
 * external synchronization, but independent handles are independent.
 *
 * Every fallible call returns an oodlab_status; on failure,
 * oodlab_last_error() returns a thread-local message describing it.
 */

#ifndef OODLAB_H_
#define OODLAB_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#ifndef OODLAB_API
#if defined(_WIN32)
#define OODLAB_API __declspec(dllexport)
#else
#define OODLAB_API __attribute__((visibility("default")))
#endif
#endif

typedef int32_t oodlab_status;

/* Status values double as CLI exit codes where applicable. */
enum {
  OODLAB_OK = 0,
  OODLAB_ERR_ARGUMENT = 1, /* invalid call-site input */
  OODLAB_ERR_CONFIG = 2,   /* invalid configuration */
  OODLAB_ERR_RUN = 3,      /* a training/evaluation run aborted */
  OODLAB_ERR_PARTIAL = 4,  /* scenario finished with failed sub-runs */
  OODLAB_ERR_IO = 5,       /* filesystem or format failure */
  OODLAB_ERR_INTERNAL = 6  /* broken internal invariant */
};

/* Opaque handles. */
typedef struct oodlab_dataset oodlab_dataset;
typedef struct oodlab_bundle oodlab_bundle;

OODLAB_API const char* oodlab_version(void);

/* Thread-local message for the most recent failure on this thread. */
OODLAB_API const char* oodlab_last_error(void);

/* Frees any buffer returned through a char** out-parameter. */
OODLAB_API void oodlab_free(char* p);

/* ---- datasets ---- */

/* Generates a class-balanced dataset of n samples from the distribution
 * D(i_mal, i_ben) with the default calibrated geometry. `role` is one of
 * "train", "val", "test". */
OODLAB_API oodlab_status oodlab_dataset_generate(int i_mal, int i_ben,
                                                 uint32_t n, uint64_t seed,
                                                 const char* role,
                                                 oodlab_dataset** out);

/* Writes manifest.json + samples.bin (and per-sample PGMs when write_pgm
 * is nonzero) into `dir`. */
OODLAB_API oodlab_status oodlab_dataset_export(const oodlab_dataset* ds,
                                               const char* dir, int write_pgm);

OODLAB_API oodlab_status oodlab_dataset_open(const char* dir,
                                             oodlab_dataset** out);

OODLAB_API uint32_t oodlab_dataset_count(const oodlab_dataset* ds);
OODLAB_API uint32_t oodlab_dataset_image_size(const oodlab_dataset* ds);

/* Copies one sample. Either output may be NULL; `pixels_out` needs room for
 * image_size*image_size floats. Labels: 0 = benign, 1 = malignant. */
OODLAB_API oodlab_status oodlab_dataset_sample(const oodlab_dataset* ds,
                                               uint32_t index,
                                               float* pixels_out,
                                               uint8_t* label_out);

OODLAB_API void oodlab_dataset_free(oodlab_dataset* ds);

/* ---- scenarios ---- */

/* Runs a scenario end to end and persists the bundle under out_dir.
 * `scenario` is "1", "2", "3" or a path to a scenario config JSON.
 * `n_seeds` truncates/extends the seed list to 1..n_seeds (0 keeps the
 * configured seeds). On success *out (if non-NULL) owns the bundle.
 * Returns OODLAB_ERR_PARTIAL when some sub-runs failed; the bundle is
 * still written and returned. */
OODLAB_API oodlab_status oodlab_run_scenario(const char* scenario,
                                             uint32_t n_seeds,
                                             const char* out_dir,
                                             oodlab_bundle** out);

OODLAB_API oodlab_status oodlab_bundle_open(const char* bundle_dir,
                                            oodlab_bundle** out);

/* Table-1-style aggregated report (mean +- sd over seeds). */
OODLAB_API oodlab_status oodlab_bundle_report(const oodlab_bundle* b,
                                              char** text_out);

OODLAB_API int oodlab_bundle_is_partial(const oodlab_bundle* b);

/* Absolute path of the bundle directory. */
OODLAB_API oodlab_status oodlab_bundle_dir(const oodlab_bundle* b,
                                           char** path_out);

OODLAB_API void oodlab_bundle_free(oodlab_bundle* b);

/* Re-renders figures/*.svg from the persisted artifacts of a bundle. */
OODLAB_API oodlab_status oodlab_render_figures(const char* bundle_dir);

/* Calibration summary: canonical area fractions, background, predicted
 * whole-image means and the equalizing intensity pair. */
OODLAB_API oodlab_status oodlab_calibration_report(char** text_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* OODLAB_H_ */
