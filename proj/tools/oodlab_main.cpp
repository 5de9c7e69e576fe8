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

// Command-line front end. Talks to the lab exclusively through the
// shared-library C API. Exit codes: 0 ok, 2 config error, 3 run failure,
// 4 partial bundle.

#include <cstdint>
#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "oodlab.h"

namespace {

int exit_code(oodlab_status status) {
  switch (status) {
    case OODLAB_OK: return 0;
    case OODLAB_ERR_ARGUMENT: return 2;
    case OODLAB_ERR_CONFIG: return 2;
    case OODLAB_ERR_PARTIAL: return 4;
    default: return 3;
  }
}

int report_failure(const char* what, oodlab_status status) {
  std::fprintf(stderr, "oodlab: %s failed: %s\n", what, oodlab_last_error());
  return exit_code(status);
}

bool parse_spec(const std::string& spec, int* i_mal, int* i_ben) {
  const size_t comma = spec.find(',');
  if (comma == std::string::npos) return false;
  try {
    *i_mal = std::stoi(spec.substr(0, comma));
    *i_ben = std::stoi(spec.substr(comma + 1));
  } catch (...) {
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oodlab - a controlled study of loss choice and "
               "out-of-distribution generalization on synthetic shapes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(oodlab_version()));

  // generate
  auto* gen = app.add_subcommand(
      "generate", "Generate a dataset directory from D(i_mal,i_ben)");
  std::string gen_spec;
  uint32_t gen_n = 200;
  uint64_t gen_seed = 1;
  std::string gen_out;
  std::string gen_role = "train";
  bool gen_pgm = false;
  gen->add_option("--spec", gen_spec,
                  "foreground intensities as i_mal,i_ben (grid 110..200)")
      ->required();
  gen->add_option("--n", gen_n, "number of samples (even)")
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "dataset seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--role", gen_role, "train|val|test")
      ->capture_default_str();
  gen->add_flag("--pgm", gen_pgm, "also write per-sample PGM images");

  // run
  auto* run = app.add_subcommand(
      "run", "Run an experimental scenario end to end");
  std::string run_scenario_sel;
  uint32_t run_seeds = 0;
  std::string run_out;
  run->add_option("--scenario", run_scenario_sel,
                  "1|2|3 or path to a scenario config JSON")
      ->required();
  run->add_option("--seeds", run_seeds,
                  "use seeds 1..K instead of the configured list");
  run->add_option("--out", run_out, "output root directory")->required();

  // report
  auto* rep = app.add_subcommand("report", "Print the report of a bundle");
  std::string rep_dir;
  rep->add_option("dir", rep_dir, "bundle directory")->required();

  // figures
  auto* fig = app.add_subcommand(
      "figures", "Re-render SVG figures from a bundle's artifacts");
  std::string fig_dir;
  fig->add_option("dir", fig_dir, "bundle directory")->required();

  // calibrate
  app.add_subcommand("calibrate",
                     "Print area fractions, background and equalizing pairs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  if (gen->parsed()) {
    int i_mal = 0, i_ben = 0;
    if (!parse_spec(gen_spec, &i_mal, &i_ben)) {
      std::fprintf(stderr, "oodlab: --spec must look like 150,150\n");
      return 2;
    }
    oodlab_dataset* ds = nullptr;
    oodlab_status st = oodlab_dataset_generate(i_mal, i_ben, gen_n, gen_seed,
                                               gen_role.c_str(), &ds);
    if (st != OODLAB_OK) return report_failure("generate", st);
    st = oodlab_dataset_export(ds, gen_out.c_str(), gen_pgm ? 1 : 0);
    oodlab_dataset_free(ds);
    if (st != OODLAB_OK) return report_failure("export", st);
    std::printf("wrote %u samples to %s\n", gen_n, gen_out.c_str());
    return 0;
  }

  if (run->parsed()) {
    oodlab_bundle* bundle = nullptr;
    const oodlab_status st = oodlab_run_scenario(
        run_scenario_sel.c_str(), run_seeds, run_out.c_str(), &bundle);
    if (st != OODLAB_OK && st != OODLAB_ERR_PARTIAL) {
      return report_failure("run", st);
    }
    char* text = nullptr;
    if (oodlab_bundle_report(bundle, &text) == OODLAB_OK) {
      std::printf("%s", text);
      oodlab_free(text);
    }
    char* dir = nullptr;
    if (oodlab_bundle_dir(bundle, &dir) == OODLAB_OK) {
      std::printf("\nbundle: %s\n", dir);
      oodlab_free(dir);
    }
    if (st == OODLAB_ERR_PARTIAL) {
      std::fprintf(stderr, "oodlab: bundle is partial\n");
    }
    oodlab_bundle_free(bundle);
    return exit_code(st);
  }

  if (rep->parsed()) {
    oodlab_bundle* bundle = nullptr;
    oodlab_status st = oodlab_bundle_open(rep_dir.c_str(), &bundle);
    if (st != OODLAB_OK) return report_failure("report", st);
    char* text = nullptr;
    st = oodlab_bundle_report(bundle, &text);
    if (st == OODLAB_OK) {
      std::printf("%s", text);
      oodlab_free(text);
    }
    const int partial = oodlab_bundle_is_partial(bundle);
    oodlab_bundle_free(bundle);
    if (st != OODLAB_OK) return report_failure("report", st);
    return partial ? 4 : 0;
  }

  if (fig->parsed()) {
    const oodlab_status st = oodlab_render_figures(fig_dir.c_str());
    if (st != OODLAB_OK) return report_failure("figures", st);
    std::printf("figures rendered under %s/figures\n", fig_dir.c_str());
    return 0;
  }

  // calibrate
  char* text = nullptr;
  const oodlab_status st = oodlab_calibration_report(&text);
  if (st != OODLAB_OK) return report_failure("calibrate", st);
  std::printf("%s", text);
  oodlab_free(text);
  return 0;
}
