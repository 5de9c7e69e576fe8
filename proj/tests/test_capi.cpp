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

// Exercises the shared-library surface the way an FFI consumer would:
// through oodlab.h only, no core headers.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "oodlab.h"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
  const fs::path dir = fs::temp_directory_path() /
                       (std::string("oodlab-capi-") + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("version string is set") {
  CHECK(oodlab_version() != nullptr);
  CHECK(std::strlen(oodlab_version()) > 0);
}

TEST_CASE("dataset generation, access and export through the C API") {
  oodlab_dataset* ds = nullptr;
  REQUIRE(oodlab_dataset_generate(150, 150, 6, 42, "train", &ds) == OODLAB_OK);
  REQUIRE(ds != nullptr);
  CHECK(oodlab_dataset_count(ds) == 6);
  CHECK(oodlab_dataset_image_size(ds) == 64);

  std::vector<float> pixels(64 * 64);
  uint8_t label = 9;
  REQUIRE(oodlab_dataset_sample(ds, 0, pixels.data(), &label) == OODLAB_OK);
  CHECK(label == 0);  // even indices are benign
  REQUIRE(oodlab_dataset_sample(ds, 1, nullptr, &label) == OODLAB_OK);
  CHECK(label == 1);
  for (float p : pixels) {
    CHECK(p >= 0.0f);
    CHECK(p <= 1.0f);
  }
  CHECK(oodlab_dataset_sample(ds, 6, pixels.data(), &label) ==
        OODLAB_ERR_ARGUMENT);
  CHECK(std::string(oodlab_last_error()).find("out of range") !=
        std::string::npos);

  const fs::path dir = temp_dir("export");
  REQUIRE(oodlab_dataset_export(ds, dir.c_str(), 0) == OODLAB_OK);
  oodlab_dataset* back = nullptr;
  REQUIRE(oodlab_dataset_open(dir.c_str(), &back) == OODLAB_OK);
  CHECK(oodlab_dataset_count(back) == 6);
  std::vector<float> pixels2(64 * 64);
  REQUIRE(oodlab_dataset_sample(back, 0, pixels2.data(), nullptr) == OODLAB_OK);
  CHECK(pixels == pixels2);
  oodlab_dataset_free(back);
  oodlab_dataset_free(ds);
}

TEST_CASE("argument and config errors map to their status codes") {
  oodlab_dataset* ds = nullptr;
  CHECK(oodlab_dataset_generate(150, 150, 7, 1, "train", &ds) ==
        OODLAB_ERR_ARGUMENT);  // odd n
  CHECK(oodlab_dataset_generate(155, 150, 6, 1, "train", &ds) ==
        OODLAB_ERR_ARGUMENT);  // off-grid intensity
  CHECK(oodlab_dataset_generate(150, 150, 6, 1, "nonsense", &ds) ==
        OODLAB_ERR_ARGUMENT);
  CHECK(oodlab_dataset_generate(150, 150, 6, 1, "train", nullptr) ==
        OODLAB_ERR_ARGUMENT);
  oodlab_bundle* bundle = nullptr;
  CHECK(oodlab_run_scenario("9", 1, "/tmp/unused", &bundle) ==
        OODLAB_ERR_CONFIG);
  CHECK(oodlab_bundle_open("/nonexistent/path", &bundle) == OODLAB_ERR_IO);
  CHECK(std::strlen(oodlab_last_error()) > 0);
}

TEST_CASE("calibration report names the equalizing pair") {
  char* text = nullptr;
  REQUIRE(oodlab_calibration_report(&text) == OODLAB_OK);
  REQUIRE(text != nullptr);
  const std::string s(text);
  oodlab_free(text);
  CHECK(s.find("i_mal = 180") != std::string::npos);
  CHECK(s.find("i_ben = 160") != std::string::npos);
  CHECK(s.find("97.8") != std::string::npos);
}

TEST_CASE("a scenario config file runs end to end through the C API") {
  const fs::path dir = temp_dir("scenario");
  const fs::path cfg_path = dir / "tiny.json";
  {
    std::ofstream out(cfg_path);
    out << R"({
      "kind": "oodlab-scenario",
      "schema_version": 1,
      "name": "capi-tiny",
      "train_spec": [150, 150],
      "test_specs": [[130, 170]],
      "losses": ["ce"],
      "seeds": [1],
      "train": {"epochs": 3, "batch_size": 8, "lr": 0.002,
                "n_train_pool": 16, "n_test": 8},
      "saliency_samples": 1
    })";
  }
  oodlab_bundle* bundle = nullptr;
  const oodlab_status st =
      oodlab_run_scenario(cfg_path.c_str(), 0, (dir / "out").c_str(), &bundle);
  REQUIRE(st == OODLAB_OK);
  REQUIRE(bundle != nullptr);
  CHECK(oodlab_bundle_is_partial(bundle) == 0);

  char* report = nullptr;
  REQUIRE(oodlab_bundle_report(bundle, &report) == OODLAB_OK);
  const std::string rep(report);
  oodlab_free(report);
  CHECK(rep.find("capi-tiny") != std::string::npos);
  CHECK(rep.find("150,150") != std::string::npos);

  char* path = nullptr;
  REQUIRE(oodlab_bundle_dir(bundle, &path) == OODLAB_OK);
  const fs::path bundle_dir(path);
  oodlab_free(path);
  CHECK(fs::exists(bundle_dir / "metrics.csv"));
  oodlab_bundle_free(bundle);

  // reopen from disk and re-render figures
  oodlab_bundle* back = nullptr;
  REQUIRE(oodlab_bundle_open(bundle_dir.c_str(), &back) == OODLAB_OK);
  CHECK(oodlab_bundle_is_partial(back) == 0);
  oodlab_bundle_free(back);
  CHECK(oodlab_render_figures(bundle_dir.c_str()) == OODLAB_OK);
  CHECK(fs::exists(bundle_dir / "figures"));
}
