// Experiment harness: catalog, configs, the five experiment kinds, and
// machine-readable outputs (CSV rows, JSONL traces, run manifest).
#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "affsurf/body.hpp"
#include "affsurf/generators.hpp"
#include "affsurf/steiner.hpp"
#include "affsurf/surface.hpp"

namespace affsurf {

std::string library_version();

struct ExperimentConfig {
  std::string kind;  // monotonicity | isoperimetric | convergence | detlemma | crosscheck
  int dim = 2;
  std::vector<std::string> body_ids;           // catalog ids; empty = experiment default
  std::vector<std::string> generator_specs;    // "conc:0.5" shorthand or generator JSON
  int directions = 8;
  int steps = 30;
  int samples = 10000;
  std::vector<int> matrix_sizes{1, 2, 3};
  std::uint64_t seed = 7;
  QuadratureSpec quad;
  std::string out_dir;

  static ExperimentConfig defaults_for(const std::string& kind, int dim = 2);
  // JSON (leading '{') or key=value lines
  static ExperimentConfig from_file(const std::string& path);
  void apply_kv(const std::string& key, const std::string& value);
  nlohmann::json to_json() const;
  std::string resolved_out_dir() const;  // out_dir, else $AFFSURF_OUT_DIR, else ./affsurf_out
};

struct CatalogEntry {
  std::string id;
  ConvexBody body;
  bool centered_symmetric = false;  // centered ellipsoid/ball: equality rows
  bool offcenter_ball = false;      // strict-inequality rows
};

const std::vector<CatalogEntry>& catalog(int dim);
const CatalogEntry& catalog_entry(const std::string& id, int dim);

Generator parse_generator(const std::string& spec, int dim);

struct ExperimentReport {
  std::string kind;
  int n_rows = 0;
  int n_fail = 0;
  int n_skip = 0;
  std::vector<std::string> output_files;
};

ExperimentReport run_monotonicity(const ExperimentConfig& cfg, ExecMode mode = ExecMode::Parallel);
ExperimentReport run_isoperimetric(const ExperimentConfig& cfg, ExecMode mode = ExecMode::Parallel);
ExperimentReport run_convergence(const ExperimentConfig& cfg, ExecMode mode = ExecMode::Parallel);
ExperimentReport run_detlemma(const ExperimentConfig& cfg, ExecMode mode = ExecMode::Parallel);
ExperimentReport run_crosscheck(const ExperimentConfig& cfg, ExecMode mode = ExecMode::Parallel);
ExperimentReport run_experiment(const ExperimentConfig& cfg, ExecMode mode = ExecMode::Parallel);

}  // namespace affsurf
