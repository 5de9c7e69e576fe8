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

#include "core/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "core/checkpoint_io.hpp"
#include "core/error.hpp"
#include "core/figures.hpp"
#include "core/io_util.hpp"
#include "core/jsoncfg.hpp"
#include "core/version.hpp"

namespace oodlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string loss_pretty(LossKind k) {
  return k == LossKind::kContrastive ? "Contrast" : "CE";
}

std::string spec_label(const std::array<int, 2>& s) {
  return std::to_string(s[0]) + "," + std::to_string(s[1]);
}

std::string csv_quote(const std::string& field) {
  if (field.find(',') == std::string::npos) return field;
  return "\"" + field + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (quoted) {
      if (c == '"') quoted = false;
      else cur.push_back(c);
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_metric(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  return std::stod(s);
}

struct DatasetRef {
  std::string id;  // "train" or "test-<i_mal>,<i_ben>"
  const Dataset* data;
};

// Fixed palette: reds/x for malignant, blues/o for benign; darker = train.
const char* group_color(size_t dataset_index, ShapeClass c) {
  static const char* kMal[3] = {"#8b0000", "#e06060", "#f0a8a8"};
  static const char* kBen[3] = {"#00008b", "#6060e0", "#a8a8f0"};
  const size_t i = std::min<size_t>(dataset_index, 2);
  return c == ShapeClass::kMalignant ? kMal[i] : kBen[i];
}

std::string history_csv(const std::vector<EpochStats>& history,
                        const std::string& hash) {
  std::ostringstream os;
  os << "# config_hash=" << hash << "\n";
  os << "epoch,train_loss,val_loss,val_acc\n";
  for (size_t e = 0; e < history.size(); ++e) {
    os << e << "," << fmt_double(history[e].train_loss, 9) << ","
       << fmt_double(history[e].val_loss, 9) << ","
       << fmt_double(history[e].val_acc, 6) << "\n";
  }
  return os.str();
}

Tensor vstack(const std::vector<const Tensor*>& mats) {
  int64_t rows = 0;
  const int64_t cols = mats.front()->dim(1);
  for (const Tensor* m : mats) rows += m->dim(0);
  Tensor out({rows, cols});
  int64_t at = 0;
  for (const Tensor* m : mats) {
    std::copy(m->data(), m->data() + m->numel(), out.data() + at * cols);
    at += m->dim(0);
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

void ScenarioConfig::validate() const {
  require(schema_version == 1, ErrorKind::kConfig,
          "unsupported scenario schema version");
  require(train_spec.has_value() != equalize_target.has_value(),
          ErrorKind::kConfig,
          "exactly one of train_spec / equalize_target must be set");
  require(!test_specs.empty(), ErrorKind::kConfig, "no test distributions");
  require(!losses.empty(), ErrorKind::kConfig, "no losses configured");
  require(!seeds.empty(), ErrorKind::kConfig, "no seeds configured");
  require(saliency_samples >= 1, ErrorKind::kConfig,
          "saliency_samples must be >= 1");
  require(pca_fit_on == "train" || pca_fit_on == "union", ErrorKind::kConfig,
          "pca_fit_on must be 'train' or 'union'");
  train.validate();
  for (const auto& s : test_specs) make_spec(s[0], s[1]).validate();
}

DistributionSpec ScenarioConfig::make_spec(int i_mal, int i_ben) const {
  DistributionSpec s;
  s.i_mal = i_mal;
  s.i_ben = i_ben;
  s.noise_sigma = noise_sigma;
  s.background = background;
  s.image_size = image_size;
  return s;
}

DistributionSpec ScenarioConfig::resolve_train_spec() const {
  if (train_spec) return make_spec((*train_spec)[0], (*train_spec)[1]);
  const double fm = canonical_area_fraction(ShapeClass::kMalignant, geometry,
                                            image_size);
  const double fb = canonical_area_fraction(ShapeClass::kBenign, geometry,
                                            image_size);
  const EqualizingPair pair =
      equalizing_pair(fm, fb, background, *equalize_target);
  if (expected_equalized) {
    require(pair.i_mal == (*expected_equalized)[0] &&
                pair.i_ben == (*expected_equalized)[1],
            ErrorKind::kConfig,
            "equalized training spec (" + std::to_string(pair.i_mal) + "," +
                std::to_string(pair.i_ben) +
                ") does not match the expected calibration (" +
                spec_label(*expected_equalized) + ")");
  }
  return make_spec(pair.i_mal, pair.i_ben);
}

ScenarioConfig builtin_scenario(int which) {
  ScenarioConfig cfg;
  switch (which) {
    case 1:
      cfg.name = "scenario-1";
      cfg.train_spec = {{150, 150}};
      cfg.test_specs = {{{130, 170}}, {{170, 130}}};
      cfg.losses = {LossKind::kCe, LossKind::kContrastive};
      break;
    case 2:
      cfg.name = "scenario-2";
      cfg.equalize_target = 117.0;
      cfg.expected_equalized = {{180, 160}};
      cfg.test_specs = {{{150, 190}}, {{190, 150}}};
      cfg.losses = {LossKind::kCe, LossKind::kContrastive};
      break;
    case 3:
      cfg.name = "scenario-3";
      cfg.train_spec = {{180, 150}};
      cfg.test_specs = {{{150, 190}}};
      cfg.losses = {LossKind::kCe};
      break;
    default:
      fail(ErrorKind::kConfig,
           "unknown scenario " + std::to_string(which) + ", expected 1..3");
  }
  return cfg;
}

json scenario_to_json(const ScenarioConfig& cfg) {
  json j{{"schema_version", cfg.schema_version},
         {"kind", "oodlab-scenario"},
         {"name", cfg.name},
         {"test_specs", cfg.test_specs},
         {"seeds", cfg.seeds},
         {"train", cfg.train},
         {"noise_sigma", cfg.noise_sigma},
         {"background", cfg.background},
         {"image_size", cfg.image_size},
         {"geometry", cfg.geometry},
         {"transform", cfg.transform},
         {"pca_fit_on", cfg.pca_fit_on},
         {"saliency_samples", cfg.saliency_samples}};
  if (cfg.train_spec) j["train_spec"] = *cfg.train_spec;
  if (cfg.equalize_target) j["equalize_target"] = *cfg.equalize_target;
  if (cfg.expected_equalized) j["expected_equalized"] = *cfg.expected_equalized;
  json losses = json::array();
  for (LossKind k : cfg.losses) losses.push_back(to_string(k));
  j["losses"] = losses;
  return j;
}

ScenarioConfig scenario_from_json(const json& j) {
  ScenarioConfig cfg;
  require(j.value("kind", "oodlab-scenario") == "oodlab-scenario",
          ErrorKind::kConfig, "not a scenario config");
  cfg.schema_version = j.value("schema_version", 1);
  cfg.name = j.value("name", cfg.name);
  if (j.contains("train_spec")) {
    cfg.train_spec = j.at("train_spec").get<std::array<int, 2>>();
  }
  if (j.contains("equalize_target")) {
    cfg.equalize_target = j.at("equalize_target").get<double>();
  }
  if (j.contains("expected_equalized")) {
    cfg.expected_equalized =
        j.at("expected_equalized").get<std::array<int, 2>>();
  }
  cfg.test_specs = j.at("test_specs").get<std::vector<std::array<int, 2>>>();
  if (j.contains("losses")) {
    cfg.losses.clear();
    for (const auto& l : j.at("losses")) {
      cfg.losses.push_back(loss_from_string(l.get<std::string>()));
    }
  }
  cfg.seeds = j.value("seeds", cfg.seeds);
  if (j.contains("train")) cfg.train = j.at("train").get<TrainConfig>();
  cfg.noise_sigma = j.value("noise_sigma", cfg.noise_sigma);
  cfg.background = j.value("background", cfg.background);
  cfg.image_size = j.value("image_size", cfg.image_size);
  cfg.geometry = j.value("geometry", cfg.geometry);
  cfg.transform = j.value("transform", cfg.transform);
  cfg.pca_fit_on = j.value("pca_fit_on", cfg.pca_fit_on);
  cfg.saliency_samples = j.value("saliency_samples", cfg.saliency_samples);
  cfg.validate();
  return cfg;
}

ScenarioConfig load_scenario_file(const fs::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kConfig,
         "cannot parse scenario config " + path.string() + ": " + e.what());
  } catch (const Error& e) {
    fail(ErrorKind::kConfig,
         "cannot read scenario config: " + std::string(e.what()));
  }
  return scenario_from_json(j);
}

std::string config_hash(const ScenarioConfig& cfg) {
  return fnv1a_hex(scenario_to_json(cfg).dump()).substr(0, 12);
}

std::vector<AggregateRow> aggregate_rows(const std::vector<MetricsRow>& rows) {
  std::vector<AggregateRow> out;
  for (const MetricsRow& row : rows) {
    AggregateRow* agg = nullptr;
    for (AggregateRow& a : out) {
      if (a.d_tr == row.d_tr && a.d_te == row.d_te && a.loss == row.loss) {
        agg = &a;
        break;
      }
    }
    if (!agg) {
      out.push_back(AggregateRow{row.d_tr, row.d_te, row.loss, 0,
                                 0, 0, 0, 0, 0, 0});
      agg = &out.back();
    }
    ++agg->n_seeds;
  }
  for (AggregateRow& a : out) {
    std::vector<double> acc, se, sp;
    for (const MetricsRow& row : rows) {
      if (a.d_tr == row.d_tr && a.d_te == row.d_te && a.loss == row.loss) {
        acc.push_back(row.metrics.acc);
        se.push_back(row.metrics.se);
        sp.push_back(row.metrics.sp);
      }
    }
    a.acc_mean = mean_of(acc);
    a.acc_sd = sd_of(acc, a.acc_mean);
    a.se_mean = mean_of(se);
    a.se_sd = sd_of(se, a.se_mean);
    a.sp_mean = mean_of(sp);
    a.sp_sd = sd_of(sp, a.sp_mean);
  }
  return out;
}

std::string metrics_csv(const ReportBundle& bundle) {
  std::ostringstream os;
  os << "# config_hash=" << bundle.hash << "\n";
  os << "run_id,d_tr,d_te,loss,acc,se,sp\n";
  for (const MetricsRow& row : bundle.rows) {
    os << row.run_id << "," << csv_quote(row.d_tr) << ","
       << csv_quote(row.d_te) << "," << to_string(row.loss) << ","
       << fmt_double(row.metrics.acc, 6) << "," << fmt_double(row.metrics.se, 6)
       << "," << fmt_double(row.metrics.sp, 6) << "\n";
  }
  return os.str();
}

std::string report_csv(const ReportBundle& bundle) {
  std::ostringstream os;
  os << "# config_hash=" << bundle.hash << "\n";
  os << "d_tr,d_te,loss,acc_mean,acc_sd,se_mean,se_sd,sp_mean,sp_sd,n_seeds\n";
  for (const AggregateRow& a : bundle.aggregates) {
    os << csv_quote(a.d_tr) << "," << csv_quote(a.d_te) << ","
       << to_string(a.loss) << "," << fmt_double(a.acc_mean, 6) << ","
       << fmt_double(a.acc_sd, 6) << "," << fmt_double(a.se_mean, 6) << ","
       << fmt_double(a.se_sd, 6) << "," << fmt_double(a.sp_mean, 6) << ","
       << fmt_double(a.sp_sd, 6) << "," << a.n_seeds << "\n";
  }
  return os.str();
}

std::string report_text(const ReportBundle& bundle) {
  std::ostringstream os;
  os << "Scenario: " << bundle.config.name << "   (config " << bundle.hash
     << ", " << bundle.config.seeds.size() << " seeds)\n";
  if (bundle.partial) {
    os << "PARTIAL BUNDLE - failed sub-runs:\n";
    for (const std::string& f : bundle.failures) os << "  " << f << "\n";
  }
  os << "\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %-10s %-9s %-13s %-13s %-13s\n",
                "D_tr", "D_te", "Loss", "Acc", "SE", "SP");
  os << line;
  os << std::string(70, '-') << "\n";
  auto cell = [](double m, double s) {
    if (std::isnan(m)) return std::string("nan");
    return fmt_double(m, 2) + "+-" + fmt_double(s, 2);
  };
  // Table-1 ordering: losses in config order, train row first, then the
  // test distributions in config order.
  std::vector<std::string> dte_order = {"train"};
  for (const auto& t : bundle.config.test_specs) dte_order.push_back(spec_label(t));
  for (LossKind loss : bundle.config.losses) {
    for (const std::string& dte : dte_order) {
      const AggregateRow* found = nullptr;
      for (const AggregateRow& a : bundle.aggregates) {
        if (a.loss == loss && a.d_te == dte) {
          found = &a;
          break;
        }
      }
      if (!found) {
        std::snprintf(line, sizeof(line), "%-10s %-10s %-9s %s\n",
                      bundle.d_tr.c_str(), dte.c_str(),
                      loss_pretty(loss).c_str(), "missing");
        os << line;
        continue;
      }
      std::snprintf(line, sizeof(line), "%-10s %-10s %-9s %-13s %-13s %-13s\n",
                    found->d_tr.c_str(), found->d_te.c_str(),
                    loss_pretty(loss).c_str(),
                    cell(found->acc_mean, found->acc_sd).c_str(),
                    cell(found->se_mean, found->se_sd).c_str(),
                    cell(found->sp_mean, found->sp_sd).c_str());
      os << line;
    }
  }
  return os.str();
}

namespace {

struct RunArtifacts {
  std::string run_id;
  TrainedModel model;
};

void persist_run(const fs::path& bundle_dir, const ScenarioConfig& cfg,
                 const std::string& hash, const std::string& run_id,
                 LossKind loss, uint64_t seed, const DistributionSpec& d_tr,
                 const TrainedModel& model) {
  const fs::path run_dir = bundle_dir / "runs" / run_id;
  fs::create_directories(run_dir);
  json run_cfg{{"config_hash", hash},
               {"scenario", cfg.name},
               {"run_id", run_id},
               {"loss", to_string(loss)},
               {"seed", seed},
               {"pipeline", model.pipeline},
               {"d_tr", d_tr},
               {"train", cfg.train},
               {"code_version", kVersion}};
  run_cfg["train"]["seed"] = seed;
  run_cfg["train"]["loss"] = to_string(loss);
  write_text_file(run_dir / "config.json", run_cfg.dump(2) + "\n");
  write_text_file(run_dir / "history.csv", history_csv(model.history, hash));
  if (!model.stage1_history.empty()) {
    write_text_file(run_dir / "stage1-history.csv",
                    history_csv(model.stage1_history, hash));
  }
  const json base_meta{{"config_hash", hash},
                       {"pipeline", model.pipeline},
                       {"seed", seed},
                       {"run_id", run_id},
                       {"code_version", kVersion}};
  json best_meta = base_meta;
  best_meta["epoch"] = model.best_epoch;
  best_meta["selection"] = "best-val";
  write_checkpoint(run_dir / "checkpoint-best", model.best, best_meta);
  json final_meta = base_meta;
  final_meta["epoch"] =
      static_cast<int>(model.history.size()) - 1;
  final_meta["selection"] = "final";
  write_checkpoint(run_dir / "checkpoint-final", model.final_params,
                   final_meta);
}

void persist_projection(const fs::path& bundle_dir, const ScenarioConfig& cfg,
                        const std::string& hash, const std::string& run_id,
                        LossKind loss, uint64_t seed, const std::string& d_tr,
                        const std::vector<DatasetRef>& datasets,
                        const TrainedModel& model) {
  const fs::path dir = bundle_dir / "pca" / run_id;
  fs::create_directories(dir);

  std::vector<Tensor> features;
  features.reserve(datasets.size());
  for (const DatasetRef& ref : datasets) {
    features.push_back(extract_features(model.best.encoder, *ref.data));
  }
  Pca pca;
  if (cfg.pca_fit_on == "union") {
    std::vector<const Tensor*> all;
    for (const Tensor& f : features) all.push_back(&f);
    pca = pca_fit(vstack(all));
  } else {
    pca = pca_fit(features.front());
  }

  std::ostringstream csv;
  csv << "# config_hash=" << hash << "\n";
  csv << "sample_id,dataset_id,class,pc1,pc2\n";
  json ellipses = json::array();
  for (size_t di = 0; di < datasets.size(); ++di) {
    const std::vector<Point2> pts = pca_project(pca, features[di]);
    const Dataset& ds = *datasets[di].data;
    for (size_t i = 0; i < pts.size(); ++i) {
      csv << i << "," << csv_quote(datasets[di].id) << ","
          << to_string(ds.samples[i].label) << "," << fmt_double(pts[i].x, 6)
          << "," << fmt_double(pts[i].y, 6) << "\n";
    }
    for (ShapeClass c : {ShapeClass::kBenign, ShapeClass::kMalignant}) {
      std::vector<Point2> group;
      for (size_t i = 0; i < pts.size(); ++i) {
        if (ds.samples[i].label == c) group.push_back(pts[i]);
      }
      const std::optional<Ellipse2Std> e = ellipse_2std(group);
      if (!e) {
        std::cerr << "[oodlab] warning: ellipse omitted for " << datasets[di].id
                  << "/" << to_string(c) << " (fewer than 3 points)\n";
        continue;
      }
      ellipses.push_back(json{{"dataset_id", datasets[di].id},
                              {"class", to_string(c)},
                              {"cx", e->cx},
                              {"cy", e->cy},
                              {"rx", e->rx},
                              {"ry", e->ry},
                              {"angle_rad", e->angle_rad},
                              {"n", group.size()}});
    }
  }
  write_text_file(dir / "pca.csv", csv.str());

  json meta{{"config_hash", hash},
            {"run_id", run_id},
            {"loss", to_string(loss)},
            {"seed", seed},
            {"d_tr", d_tr},
            {"fit_on", cfg.pca_fit_on},
            {"mean", pca.mean},
            {"basis", json::array({pca.basis[0], pca.basis[1]})},
            {"explained_variance", pca.explained_variance},
            {"total_variance", pca.total_variance},
            {"ellipses", ellipses}};
  write_text_file(dir / "ellipses.json", meta.dump(2) + "\n");
}

void persist_saliency(const fs::path& bundle_dir, const ScenarioConfig& cfg,
                      const std::string& hash, const std::string& run_id,
                      LossKind loss, uint64_t seed, const std::string& d_tr,
                      const std::vector<DatasetRef>& datasets,
                      const TrainedModel& model) {
  const fs::path dir = bundle_dir / "saliency" / run_id;
  fs::create_directories(dir);
  json entries = json::array();
  for (const DatasetRef& ref : datasets) {
    const int k = std::min<int>(cfg.saliency_samples,
                                static_cast<int>(ref.data->samples.size()));
    for (int i = 0; i < k; ++i) {
      const LabeledImage& sample = ref.data->samples[static_cast<size_t>(i)];
      std::vector<const float*> one{sample.pixels.data()};
      const SaliencyMap map =
          saliency(model.best,
                   batch_to_tensor(one, ref.data->spec.image_size));
      if (map.all_zero) {
        std::cerr << "[oodlab] warning: all-zero saliency map for "
                  << ref.id << " sample " << i << "\n";
      }
      char img_name[96], map_name[96];
      std::snprintf(img_name, sizeof(img_name), "%s-%02d-image.pgm",
                    ref.id.c_str(), i);
      std::snprintf(map_name, sizeof(map_name), "%s-%02d-map.pgm",
                    ref.id.c_str(), i);
      write_pgm(dir / img_name, sample.pixels, ref.data->spec.image_size, hash);
      write_pgm(dir / map_name, map.values, map.image_size, hash);
      entries.push_back(json{{"dataset_id", ref.id},
                             {"sample_index", i},
                             {"label", to_string(sample.label)},
                             {"image", img_name},
                             {"map", map_name},
                             {"all_zero", map.all_zero}});
    }
  }
  json index{{"config_hash", hash}, {"run_id", run_id},
             {"loss", to_string(loss)}, {"seed", seed},
             {"d_tr", d_tr},
             {"image_size", cfg.image_size},
             {"entries", entries}};
  write_text_file(dir / "index.json", index.dump(2) + "\n");
}

}  // namespace

ReportBundle run_scenario(const ScenarioConfig& cfg, const fs::path& out_root) {
  cfg.validate();
  ReportBundle bundle;
  bundle.config = cfg;
  bundle.hash = config_hash(cfg);

  const DistributionSpec train_spec = cfg.resolve_train_spec();
  bundle.d_tr = train_spec.label();

  const fs::path bundle_dir = out_root / (cfg.name + "-" + bundle.hash);
  bundle.dir = bundle_dir;
  fs::create_directories(bundle_dir);
  json cfg_json = scenario_to_json(cfg);
  cfg_json["config_hash"] = bundle.hash;
  cfg_json["code_version"] = kVersion;
  cfg_json["resolved_train_spec"] = train_spec;
  write_text_file(bundle_dir / "config.json", cfg_json.dump(2) + "\n");

  for (uint64_t seed : cfg.seeds) {
    // One data draw per seed, shared by both losses.
    Dataset pool = generate_dataset(
        train_spec, cfg.train.n_train_pool,
        mix64(seed, hash64("train-pool")), DatasetRole::kTrain, cfg.geometry,
        cfg.transform);
    auto [train_ds, val_ds] =
        split(pool, cfg.train.split_fraction, mix64(seed, hash64("split")));
    std::vector<Dataset> tests;
    for (size_t k = 0; k < cfg.test_specs.size(); ++k) {
      tests.push_back(generate_dataset(
          cfg.make_spec(cfg.test_specs[k][0], cfg.test_specs[k][1]),
          cfg.train.n_test, mix64(seed, mix64(hash64("test"), k)),
          DatasetRole::kTest, cfg.geometry, cfg.transform));
    }
    std::vector<DatasetRef> refs{{"train", &train_ds}};
    for (size_t k = 0; k < tests.size(); ++k) {
      refs.push_back({"test-" + tests[k].spec.label(), &tests[k]});
    }

    for (LossKind loss : cfg.losses) {
      const std::string run_id =
          "run-" + fnv1a_hex(bundle.hash + ":" + to_string(loss) + ":" +
                             std::to_string(seed))
                       .substr(0, 12);
      try {
        TrainConfig tc = cfg.train;
        tc.loss = loss;
        tc.seed = seed;
        const TrainedModel model = train_pipeline(train_ds, val_ds, tc);

        // convergence sanity: training must have reduced the loss
        if (!model.history.empty()) {
          require(model.history.back().train_loss <
                      model.history.front().train_loss,
                  ErrorKind::kRun, "final train loss did not improve");
        }

        for (const DatasetRef& ref : refs) {
          const std::vector<double> probs =
              predict_dataset(model.best, *ref.data);
          MetricsReport m =
              confusion_metrics(probs, dataset_labels(*ref.data));
          m.dataset_id = ref.id;
          m.model_id = run_id;
          bundle.rows.push_back(MetricsRow{
              run_id, bundle.d_tr,
              ref.id == "train" ? "train" : ref.data->spec.label(), loss,
              seed, m});
        }
        persist_run(bundle_dir, cfg, bundle.hash, run_id, loss, seed,
                    train_spec, model);
        persist_projection(bundle_dir, cfg, bundle.hash, run_id, loss, seed,
                           bundle.d_tr, refs, model);
        persist_saliency(bundle_dir, cfg, bundle.hash, run_id, loss, seed,
                         bundle.d_tr, refs, model);
      } catch (const std::exception& e) {
        bundle.partial = true;
        bundle.failures.push_back(run_id + " (" + to_string(loss) + ", seed " +
                                  std::to_string(seed) + "): " + e.what());
      }
    }
  }

  // deterministic row order: loss (config order), d_te (train, then config
  // order), seed (config order)
  auto loss_index = [&](LossKind k) {
    for (size_t i = 0; i < cfg.losses.size(); ++i) {
      if (cfg.losses[i] == k) return i;
    }
    return cfg.losses.size();
  };
  auto dte_index = [&](const std::string& dte) -> size_t {
    if (dte == "train") return 0;
    for (size_t i = 0; i < cfg.test_specs.size(); ++i) {
      if (spec_label(cfg.test_specs[i]) == dte) return i + 1;
    }
    return cfg.test_specs.size() + 1;
  };
  auto seed_index = [&](uint64_t s) {
    for (size_t i = 0; i < cfg.seeds.size(); ++i) {
      if (cfg.seeds[i] == s) return i;
    }
    return cfg.seeds.size();
  };
  std::stable_sort(bundle.rows.begin(), bundle.rows.end(),
                   [&](const MetricsRow& a, const MetricsRow& b) {
                     const auto ka = std::make_tuple(
                         loss_index(a.loss), dte_index(a.d_te), seed_index(a.seed));
                     const auto kb = std::make_tuple(
                         loss_index(b.loss), dte_index(b.d_te), seed_index(b.seed));
                     return ka < kb;
                   });

  bundle.aggregates = aggregate_rows(bundle.rows);
  write_text_file(bundle_dir / "metrics.csv", metrics_csv(bundle));
  write_text_file(bundle_dir / "report.csv", report_csv(bundle));
  write_text_file(bundle_dir / "report.txt", report_text(bundle));
  emit_figures(bundle_dir);
  return bundle;
}

ReportBundle load_bundle(const fs::path& bundle_dir) {
  const json cfg_json =
      json::parse(read_text_file(bundle_dir / "config.json"));
  ReportBundle bundle;
  bundle.config = scenario_from_json(cfg_json);
  bundle.hash = cfg_json.at("config_hash").get<std::string>();
  require(bundle.hash == config_hash(bundle.config), ErrorKind::kIo,
          "bundle config hash does not match its config");
  bundle.dir = bundle_dir;

  const std::string csv = read_text_file(bundle_dir / "metrics.csv");
  std::istringstream is(csv);
  std::string line;
  bool first = true;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      require(!first || line == "# config_hash=" + bundle.hash,
              ErrorKind::kIo, "metrics.csv hash mismatch");
      first = false;
      continue;
    }
    first = false;
    if (!header_seen) {
      header_seen = true;  // column header
      continue;
    }
    const std::vector<std::string> f = csv_split(line);
    require(f.size() == 7, ErrorKind::kIo, "bad metrics.csv row: " + line);
    MetricsRow row;
    row.run_id = f[0];
    row.d_tr = f[1];
    row.d_te = f[2];
    row.loss = loss_from_string(f[3]);
    row.metrics.acc = parse_metric(f[4]);
    row.metrics.se = parse_metric(f[5]);
    row.metrics.sp = parse_metric(f[6]);
    bundle.rows.push_back(row);
    bundle.d_tr = row.d_tr;
  }
  bundle.aggregates = aggregate_rows(bundle.rows);
  return bundle;
}

void emit_figures(const fs::path& bundle_dir) {
  const json cfg_json =
      json::parse(read_text_file(bundle_dir / "config.json"));
  const std::string hash = cfg_json.at("config_hash").get<std::string>();
  fs::create_directories(bundle_dir / "figures");

  std::vector<std::string> run_ids;
  if (fs::exists(bundle_dir / "pca")) {
    for (const auto& entry : fs::directory_iterator(bundle_dir / "pca")) {
      if (entry.is_directory()) run_ids.push_back(entry.path().filename());
    }
  }
  std::sort(run_ids.begin(), run_ids.end());

  for (const std::string& run_id : run_ids) {
    // ---- PCA scatter ----
    const fs::path pca_dir = bundle_dir / "pca" / run_id;
    const json meta = json::parse(read_text_file(pca_dir / "ellipses.json"));
    require(meta.at("config_hash").get<std::string>() == hash, ErrorKind::kIo,
            "ellipses.json hash mismatch in " + run_id);

    // dataset order and point groups from pca.csv
    std::vector<std::string> dataset_order;
    struct GroupKey {
      std::string dataset;
      std::string cls;
    };
    std::vector<GroupKey> keys;
    std::vector<std::vector<Point2>> pts;
    std::istringstream is(read_text_file(pca_dir / "pca.csv"));
    std::string line;
    bool header_seen = false;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!header_seen) {
        header_seen = true;
        continue;
      }
      const std::vector<std::string> f = csv_split(line);
      require(f.size() == 5, ErrorKind::kIo, "bad pca.csv row: " + line);
      if (std::find(dataset_order.begin(), dataset_order.end(), f[1]) ==
          dataset_order.end()) {
        dataset_order.push_back(f[1]);
      }
      size_t gi = 0;
      for (; gi < keys.size(); ++gi) {
        if (keys[gi].dataset == f[1] && keys[gi].cls == f[2]) break;
      }
      if (gi == keys.size()) {
        keys.push_back({f[1], f[2]});
        pts.emplace_back();
      }
      pts[gi].push_back({std::stod(f[3]), std::stod(f[4])});
    }

    std::vector<ScatterGroup> groups;
    for (size_t gi = 0; gi < keys.size(); ++gi) {
      ScatterGroup g;
      g.name = keys[gi].dataset + " " + keys[gi].cls;
      const size_t di = static_cast<size_t>(
          std::find(dataset_order.begin(), dataset_order.end(),
                    keys[gi].dataset) -
          dataset_order.begin());
      const ShapeClass cls = keys[gi].cls == "malignant"
                                 ? ShapeClass::kMalignant
                                 : ShapeClass::kBenign;
      g.color = group_color(di, cls);
      g.marker = cls == ShapeClass::kMalignant ? 'x' : 'o';
      g.points = pts[gi];
      for (const auto& e : meta.at("ellipses")) {
        if (e.at("dataset_id") == keys[gi].dataset &&
            e.at("class") == keys[gi].cls) {
          g.ellipse = Ellipse2Std{e.at("cx"), e.at("cy"), e.at("rx"),
                                  e.at("ry"), e.at("angle_rad")};
        }
      }
      groups.push_back(std::move(g));
    }
    const std::string title =
        cfg_json.at("name").get<std::string>() + " " +
        meta.at("loss").get<std::string>() + " seed " +
        std::to_string(meta.at("seed").get<uint64_t>()) +
        ": embedding PCA (D_tr " + meta.at("d_tr").get<std::string>() + ")";
    write_text_file(bundle_dir / "figures" / ("pca-" + run_id + ".svg"),
                    svg_scatter(title, groups, hash));

    // ---- saliency grid ----
    const fs::path sal_dir = bundle_dir / "saliency" / run_id;
    if (!fs::exists(sal_dir / "index.json")) continue;
    const json index = json::parse(read_text_file(sal_dir / "index.json"));
    require(index.at("config_hash").get<std::string>() == hash, ErrorKind::kIo,
            "saliency index hash mismatch in " + run_id);
    const int tile = index.at("image_size").get<int>();
    std::vector<SaliencyRow> rows;
    for (const auto& entry : index.at("entries")) {
      const std::string ds = entry.at("dataset_id").get<std::string>();
      if (rows.empty() || rows.back().label != ds) {
        rows.push_back(SaliencyRow{ds, {}});
      }
      const PgmImage img =
          read_pgm(sal_dir / entry.at("image").get<std::string>());
      const PgmImage map =
          read_pgm(sal_dir / entry.at("map").get<std::string>());
      rows.back().tiles.emplace_back(img.gray, map.gray);
    }
    const std::string sal_title =
        cfg_json.at("name").get<std::string>() + " " +
        index.at("loss").get<std::string>() + " seed " +
        std::to_string(index.at("seed").get<uint64_t>()) +
        ": images and saliency maps";
    write_text_file(bundle_dir / "figures" / ("saliency-" + run_id + ".svg"),
                    svg_saliency_grid(sal_title, tile, rows, hash));
  }
}

CalibrationInfo calibrate(const GeometryConfig& geom, int image_size,
                          double background) {
  CalibrationInfo info;
  info.fraction_benign =
      canonical_area_fraction(ShapeClass::kBenign, geom, image_size);
  info.fraction_malignant =
      canonical_area_fraction(ShapeClass::kMalignant, geom, image_size);
  info.polygon_benign = polygon_area(base_outline(ShapeClass::kBenign, geom));
  info.polygon_malignant =
      polygon_area(base_outline(ShapeClass::kMalignant, geom));
  info.background = background;
  info.equalized_117 = equalizing_pair(info.fraction_malignant,
                                       info.fraction_benign, background, 117.0);
  auto predicted = [background](double frac, int intensity) {
    return frac * intensity + (1.0 - frac) * background;
  };
  info.mean_mal_150 = predicted(info.fraction_malignant, 150);
  info.mean_ben_150 = predicted(info.fraction_benign, 150);
  info.mean_mal_180 = predicted(info.fraction_malignant, 180);
  info.mean_ben_160 = predicted(info.fraction_benign, 160);
  return info;
}

std::string calibration_text(const CalibrationInfo& info) {
  std::ostringstream os;
  os << "calibration (canonical pose, pixel-counted)\n";
  os << "  area fraction benign:    " << fmt_double(info.fraction_benign, 4)
     << "  (polygon " << fmt_double(info.polygon_benign, 4) << ")\n";
  os << "  area fraction malignant: " << fmt_double(info.fraction_malignant, 4)
     << "  (polygon " << fmt_double(info.polygon_malignant, 4) << ")\n";
  os << "  background intensity:    " << fmt_double(info.background, 1) << "\n";
  os << "predicted whole-image means\n";
  os << "  D(150,150): malignant " << fmt_double(info.mean_mal_150, 1)
     << ", benign " << fmt_double(info.mean_ben_150, 1) << "\n";
  os << "  D(180,160): malignant " << fmt_double(info.mean_mal_180, 1)
     << ", benign " << fmt_double(info.mean_ben_160, 1) << "\n";
  os << "equalizing pair for whole-image mean 117\n";
  os << "  i_mal = " << info.equalized_117.i_mal << " (exact "
     << fmt_double(info.equalized_117.exact_mal, 2) << ")\n";
  os << "  i_ben = " << info.equalized_117.i_ben << " (exact "
     << fmt_double(info.equalized_117.exact_ben, 2) << ")\n";
  return os.str();
}

}  // namespace oodlab
