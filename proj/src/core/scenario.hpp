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

#ifndef OODLAB_CORE_SCENARIO_HPP_
#define OODLAB_CORE_SCENARIO_HPP_

// Experiment orchestration: the three built-in scenarios, the full
// generate -> split -> train -> evaluate -> analyze pipeline, persistence
// under a content-addressed bundle directory, and the Table-1-style report.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/analysis.hpp"
#include "core/synthgen.hpp"
#include "core/trainer.hpp"

namespace oodlab {

struct ScenarioConfig {
  int schema_version = 1;
  std::string name = "custom";
  // Either an explicit training spec or a global-mean target that
  // equalizing_pair resolves against the calibrated geometry at runtime.
  std::optional<std::array<int, 2>> train_spec;  // {i_mal, i_ben}
  std::optional<double> equalize_target;
  // When set, the resolved equalized spec must match (config error if not).
  std::optional<std::array<int, 2>> expected_equalized;
  std::vector<std::array<int, 2>> test_specs;
  std::vector<LossKind> losses{LossKind::kCe};
  std::vector<uint64_t> seeds{1, 2, 3, 4, 5};
  TrainConfig train;
  double noise_sigma = 5.0;
  double background = 97.8;
  int image_size = 64;
  GeometryConfig geometry;
  TransformConfig transform;
  std::string pca_fit_on = "train";  // "train" | "union"
  int saliency_samples = 4;

  void validate() const;
  DistributionSpec make_spec(int i_mal, int i_ben) const;
  // Resolves train_spec / equalize_target into a concrete distribution.
  DistributionSpec resolve_train_spec() const;
};

ScenarioConfig builtin_scenario(int which);  // 1, 2 or 3

nlohmann::json scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig scenario_from_json(const nlohmann::json& j);
ScenarioConfig load_scenario_file(const std::filesystem::path& path);

// FNV-1a of the canonical JSON dump; first 12 hex digits name the bundle.
std::string config_hash(const ScenarioConfig& cfg);

struct MetricsRow {
  std::string run_id;
  std::string d_tr;
  std::string d_te;  // "i_mal,i_ben" or "train"
  LossKind loss = LossKind::kCe;
  uint64_t seed = 0;
  MetricsReport metrics;
};

struct AggregateRow {
  std::string d_tr;
  std::string d_te;
  LossKind loss = LossKind::kCe;
  int n_seeds = 0;
  double acc_mean = 0, acc_sd = 0;
  double se_mean = 0, se_sd = 0;
  double sp_mean = 0, sp_sd = 0;
};

struct ReportBundle {
  ScenarioConfig config;
  std::string hash;
  std::string d_tr;
  std::vector<MetricsRow> rows;
  std::vector<AggregateRow> aggregates;
  bool partial = false;
  std::vector<std::string> failures;
  std::filesystem::path dir;
};

// Runs every (loss, seed) sub-run, persists all artifacts under
// <out_root>/<name>-<hash12>/ and returns the in-memory bundle.
ReportBundle run_scenario(const ScenarioConfig& cfg,
                          const std::filesystem::path& out_root);

std::vector<AggregateRow> aggregate_rows(const std::vector<MetricsRow>& rows);

std::string report_text(const ReportBundle& bundle);
std::string report_csv(const ReportBundle& bundle);
std::string metrics_csv(const ReportBundle& bundle);

// Re-reads a persisted bundle (config.json + metrics.csv).
ReportBundle load_bundle(const std::filesystem::path& bundle_dir);

// Re-renders figures/*.svg from the persisted pca/ and saliency/ artifacts.
void emit_figures(const std::filesystem::path& bundle_dir);

struct CalibrationInfo {
  double fraction_benign = 0;      // canonical pixel-counted
  double fraction_malignant = 0;
  double polygon_benign = 0;       // continuous shoelace area
  double polygon_malignant = 0;
  double background = 0;
  EqualizingPair equalized_117;
  // predicted whole-image means for the scenario anchors
  double mean_mal_150 = 0, mean_ben_150 = 0;
  double mean_mal_180 = 0, mean_ben_160 = 0;
};

CalibrationInfo calibrate(const GeometryConfig& geom, int image_size,
                          double background);
std::string calibration_text(const CalibrationInfo& info);

}  // namespace oodlab

#endif  // OODLAB_CORE_SCENARIO_HPP_
