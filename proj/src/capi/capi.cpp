// Copyright 2026 The OODLab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "oodlab.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "core/dataset_io.hpp"
#include "core/error.hpp"
#include "core/scenario.hpp"
#include "core/synthgen.hpp"
#include "core/version.hpp"

namespace {

thread_local std::string t_last_error;

oodlab_status status_of(oodlab::ErrorKind kind) {
  using oodlab::ErrorKind;
  switch (kind) {
    case ErrorKind::kArgument: return OODLAB_ERR_ARGUMENT;
    case ErrorKind::kConfig: return OODLAB_ERR_CONFIG;
    case ErrorKind::kRun: return OODLAB_ERR_RUN;
    case ErrorKind::kIo: return OODLAB_ERR_IO;
    case ErrorKind::kInternal: return OODLAB_ERR_INTERNAL;
  }
  return OODLAB_ERR_INTERNAL;
}

// Runs `fn`, translating exceptions into status codes + last-error text.
template <typename Fn>
oodlab_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const oodlab::Error& e) {
    t_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return OODLAB_ERR_INTERNAL;
  } catch (...) {
    t_last_error = "unknown error";
    return OODLAB_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

oodlab::DatasetRole parse_role(const char* role) {
  const std::string r = role ? role : "train";
  if (r == "train") return oodlab::DatasetRole::kTrain;
  if (r == "val") return oodlab::DatasetRole::kVal;
  if (r == "test") return oodlab::DatasetRole::kTest;
  oodlab::fail(oodlab::ErrorKind::kArgument,
               "role must be train, val or test, got '" + r + "'");
}

}  // namespace

struct oodlab_dataset {
  oodlab::Dataset data;
};

struct oodlab_bundle {
  oodlab::ReportBundle data;
};

extern "C" {

const char* oodlab_version(void) { return oodlab::kVersion; }

const char* oodlab_last_error(void) { return t_last_error.c_str(); }

void oodlab_free(char* p) { std::free(p); }

oodlab_status oodlab_dataset_generate(int i_mal, int i_ben, uint32_t n,
                                      uint64_t seed, const char* role,
                                      oodlab_dataset** out) {
  return guarded([&]() -> oodlab_status {
    oodlab::require(out != nullptr, oodlab::ErrorKind::kArgument,
                    "null output handle");
    oodlab::DistributionSpec spec;
    spec.i_mal = i_mal;
    spec.i_ben = i_ben;
    auto ds = std::make_unique<oodlab_dataset>();
    ds->data = oodlab::generate_dataset(spec, static_cast<int64_t>(n), seed,
                                        parse_role(role));
    *out = ds.release();
    return OODLAB_OK;
  });
}

oodlab_status oodlab_dataset_export(const oodlab_dataset* ds, const char* dir,
                                    int write_pgm) {
  return guarded([&]() -> oodlab_status {
    oodlab::require(ds != nullptr && dir != nullptr,
                    oodlab::ErrorKind::kArgument, "null argument");
    oodlab::write_dataset(dir, ds->data, write_pgm != 0);
    return OODLAB_OK;
  });
}

oodlab_status oodlab_dataset_open(const char* dir, oodlab_dataset** out) {
  return guarded([&]() -> oodlab_status {
    oodlab::require(dir != nullptr && out != nullptr,
                    oodlab::ErrorKind::kArgument, "null argument");
    auto ds = std::make_unique<oodlab_dataset>();
    ds->data = oodlab::read_dataset(dir);
    *out = ds.release();
    return OODLAB_OK;
  });
}

uint32_t oodlab_dataset_count(const oodlab_dataset* ds) {
  return ds ? static_cast<uint32_t>(ds->data.samples.size()) : 0;
}

uint32_t oodlab_dataset_image_size(const oodlab_dataset* ds) {
  return ds ? static_cast<uint32_t>(ds->data.spec.image_size) : 0;
}

oodlab_status oodlab_dataset_sample(const oodlab_dataset* ds, uint32_t index,
                                    float* pixels_out, uint8_t* label_out) {
  return guarded([&]() -> oodlab_status {
    oodlab::require(ds != nullptr, oodlab::ErrorKind::kArgument,
                    "null dataset");
    oodlab::require(index < ds->data.samples.size(),
                    oodlab::ErrorKind::kArgument, "sample index out of range");
    const oodlab::LabeledImage& s = ds->data.samples[index];
    if (pixels_out) {
      std::memcpy(pixels_out, s.pixels.data(),
                  s.pixels.size() * sizeof(float));
    }
    if (label_out) *label_out = static_cast<uint8_t>(s.label);
    return OODLAB_OK;
  });
}

void oodlab_dataset_free(oodlab_dataset* ds) { delete ds; }

oodlab_status oodlab_run_scenario(const char* scenario, uint32_t n_seeds,
                                  const char* out_dir, oodlab_bundle** out) {
  return guarded([&]() -> oodlab_status {
    oodlab::require(scenario != nullptr && out_dir != nullptr,
                    oodlab::ErrorKind::kArgument, "null argument");
    const std::string sel = scenario;
    oodlab::ScenarioConfig cfg;
    if (sel == "1" || sel == "2" || sel == "3") {
      cfg = oodlab::builtin_scenario(sel[0] - '0');
    } else {
      cfg = oodlab::load_scenario_file(sel);
    }
    if (n_seeds > 0) {
      cfg.seeds.clear();
      for (uint32_t s = 1; s <= n_seeds; ++s) cfg.seeds.push_back(s);
    }
    auto bundle = std::make_unique<oodlab_bundle>();
    bundle->data = oodlab::run_scenario(cfg, out_dir);
    const bool partial = bundle->data.partial;
    if (partial) t_last_error = "bundle is partial: some sub-runs failed";
    if (out) *out = bundle.release();
    return partial ? OODLAB_ERR_PARTIAL : OODLAB_OK;
  });
}

oodlab_status oodlab_bundle_open(const char* bundle_dir, oodlab_bundle** out) {
  return guarded([&]() -> oodlab_status {
    oodlab::require(bundle_dir != nullptr && out != nullptr,
                    oodlab::ErrorKind::kArgument, "null argument");
    auto bundle = std::make_unique<oodlab_bundle>();
    bundle->data = oodlab::load_bundle(bundle_dir);
    *out = bundle.release();
    return OODLAB_OK;
  });
}

oodlab_status oodlab_bundle_report(const oodlab_bundle* b, char** text_out) {
  return guarded([&]() -> oodlab_status {
    oodlab::require(b != nullptr && text_out != nullptr,
                    oodlab::ErrorKind::kArgument, "null argument");
    *text_out = dup_string(oodlab::report_text(b->data));
    oodlab::require(*text_out != nullptr, oodlab::ErrorKind::kInternal,
                    "allocation failed");
    return OODLAB_OK;
  });
}

int oodlab_bundle_is_partial(const oodlab_bundle* b) {
  return b && b->data.partial ? 1 : 0;
}

oodlab_status oodlab_bundle_dir(const oodlab_bundle* b, char** path_out) {
  return guarded([&]() -> oodlab_status {
    oodlab::require(b != nullptr && path_out != nullptr,
                    oodlab::ErrorKind::kArgument, "null argument");
    *path_out = dup_string(std::filesystem::absolute(b->data.dir).string());
    oodlab::require(*path_out != nullptr, oodlab::ErrorKind::kInternal,
                    "allocation failed");
    return OODLAB_OK;
  });
}

void oodlab_bundle_free(oodlab_bundle* b) { delete b; }

oodlab_status oodlab_render_figures(const char* bundle_dir) {
  return guarded([&]() -> oodlab_status {
    oodlab::require(bundle_dir != nullptr, oodlab::ErrorKind::kArgument,
                    "null argument");
    oodlab::emit_figures(bundle_dir);
    return OODLAB_OK;
  });
}

oodlab_status oodlab_calibration_report(char** text_out) {
  return guarded([&]() -> oodlab_status {
    oodlab::require(text_out != nullptr, oodlab::ErrorKind::kArgument,
                    "null argument");
    const oodlab::CalibrationInfo info =
        oodlab::calibrate(oodlab::GeometryConfig{}, 64, 97.8);
    *text_out = dup_string(oodlab::calibration_text(info));
    oodlab::require(*text_out != nullptr, oodlab::ErrorKind::kInternal,
                    "allocation failed");
    return OODLAB_OK;
  });
}

}  // extern "C"
