#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "affsurf/explab.hpp"

using namespace affsurf;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("affsurf_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("catalog bodies construct and carry metadata") {
  for (int dim : {2, 3}) {
    const auto& cat = catalog(dim);
    CHECK(cat.size() >= 8);
    for (const auto& e : cat) CHECK(e.body.dim() == dim);
  }
  CHECK(catalog_entry("ball_offcenter", 2).offcenter_ball);
  CHECK(catalog_entry("ellipse_2_05", 2).centered_symmetric);
  CHECK(!catalog_entry("pnorm_q4", 2).centered_symmetric);
  CHECK_THROWS_AS(catalog_entry("nope", 2), ConfigError);
}

TEST_CASE("generator spec parsing") {
  CHECK(parse_generator("conc:0.5", 2).name() == "conc:0.5");
  CHECK(parse_generator("conv:-1", 2).name() == "conv:-1");
  CHECK(parse_generator("const:2", 2).name() == "const:2");
  CHECK(parse_generator(R"({"family":"PowerConc","p":0.3,"n":2})", 2).power() ==
        doctest::Approx(0.3));
  CHECK_THROWS(parse_generator("conv:0.5", 2));
}

TEST_CASE("config files: json and key=value") {
  const fs::path dir = temp_dir("cfg");
  {
    std::ofstream out(dir / "c.json");
    out << R"({"experiment":"monotonicity","dim":2,"bodies":["ball_unit"],
               "generators":["conc:0.5"],"directions":3,"seed":9,
               "quadrature":{"grid_resolution":64,"boundary_margin":0.01}})";
  }
  const auto cfg = ExperimentConfig::from_file((dir / "c.json").string());
  CHECK(cfg.kind == "monotonicity");
  CHECK(cfg.body_ids == std::vector<std::string>{"ball_unit"});
  CHECK(cfg.directions == 3);
  CHECK(cfg.seed == 9);
  CHECK(cfg.quad.grid_resolution == 64);
  {
    std::ofstream out(dir / "c.txt");
    out << "experiment = detlemma\n# comment\nseed = 5\nsamples = 100\nmatrix_sizes = 1,2\n";
  }
  const auto cfg2 = ExperimentConfig::from_file((dir / "c.txt").string());
  CHECK(cfg2.kind == "detlemma");
  CHECK(cfg2.seed == 5);
  CHECK(cfg2.samples == 100);
  CHECK(cfg2.matrix_sizes == std::vector<int>{1, 2});
  CHECK_THROWS_AS(ExperimentConfig::defaults_for("bogus"), ConfigError);
}

TEST_CASE("detlemma experiment passes and is byte-deterministic") {
  ExperimentConfig cfg = ExperimentConfig::defaults_for("detlemma");
  cfg.samples = 2000;
  cfg.seed = 123;
  const fs::path a = temp_dir("det_a"), b = temp_dir("det_b");
  cfg.out_dir = a.string();
  const auto rep1 = run_detlemma(cfg);
  CHECK(rep1.n_fail == 0);
  CHECK(rep1.n_rows == 3);
  cfg.out_dir = b.string();
  run_detlemma(cfg);
  CHECK(slurp(a / "detlemma.csv") == slurp(b / "detlemma.csv"));
  CHECK(!slurp(a / "run_manifest.json").empty());
}

TEST_CASE("monotonicity runner: verdicts, skips, and csv shape") {
  ExperimentConfig cfg = ExperimentConfig::defaults_for("monotonicity");
  cfg.body_ids = {"ball_offcenter", "ellipse_2_1"};
  cfg.generator_specs = {"conc:1", "conc:1.5"};  // the second fails class validation
  cfg.directions = 2;
  cfg.quad.grid_resolution = 128;
  cfg.out_dir = temp_dir("mono").string();
  const auto rep = run_monotonicity(cfg, ExecMode::Serial);
  CHECK(rep.n_rows == 8);
  CHECK(rep.n_fail == 0);
  CHECK(rep.n_skip == 4);  // conc:1.5 rows are skipped with a reason
  const std::string csv = slurp(fs::path(cfg.out_dir) / "monotonicity.csv");
  CHECK(csv.find("class validation failure") != std::string::npos);
  CHECK(csv.find("PASS") != std::string::npos);
}

TEST_CASE("isoperimetric runner on a reduced catalog") {
  ExperimentConfig cfg = ExperimentConfig::defaults_for("isoperimetric");
  cfg.body_ids = {"ball_unit", "ball_offcenter", "ellipse_2_05"};
  cfg.generator_specs = {"conc:0.5"};
  cfg.quad.grid_resolution = 256;
  cfg.out_dir = temp_dir("iso").string();
  const auto rep = run_isoperimetric(cfg, ExecMode::Serial);
  CHECK(rep.n_rows == 3);
  CHECK(rep.n_fail == 0);
  const std::string csv = slurp(fs::path(cfg.out_dir) / "isoperimetric.csv");
  CHECK(csv.find("equality") != std::string::npos);
  CHECK(csv.find("strict") != std::string::npos);
}

TEST_CASE("crosscheck runner on a reduced catalog") {
  ExperimentConfig cfg = ExperimentConfig::defaults_for("crosscheck");
  cfg.body_ids = {"ball_unit", "ball_r2", "ellipse_2_1"};
  cfg.quad.grid_resolution = 256;
  cfg.out_dir = temp_dir("cross").string();
  const auto rep = run_crosscheck(cfg, ExecMode::Serial);
  CHECK(rep.n_fail == 0);
  const std::string csv = slurp(fs::path(cfg.out_dir) / "crosscheck.csv");
  CHECK(csv.find("as_inf_polar") != std::string::npos);
  CHECK(csv.find("const_identity") != std::string::npos);
  CHECK(csv.find("fd_jets_max_diff") != std::string::npos);
}

TEST_CASE("convergence runner writes traces (short run)") {
  ExperimentConfig cfg = ExperimentConfig::defaults_for("convergence");
  cfg.body_ids = {"ellipse_2_05"};
  cfg.generator_specs = {"conc:0.5"};
  cfg.steps = 6;
  cfg.quad.grid_resolution = 96;
  cfg.quad.sphere_samples = 256;
  cfg.out_dir = temp_dir("conv").string();
  const auto rep = run_convergence(cfg, ExecMode::Serial);
  CHECK(rep.n_rows == 1);
  const std::string jsonl = slurp(fs::path(cfg.out_dir) / "trace_ellipse_2_05.jsonl");
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 6);
  const std::string csv = slurp(fs::path(cfg.out_dir) / "trace_ellipse_2_05.csv");
  CHECK(csv.find("volume") != std::string::npos);
  // each jsonl line parses back
  std::stringstream ss(jsonl);
  std::string line;
  while (std::getline(ss, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("surface"));
    CHECK(j.at("volume").get<double>() > 0.0);
  }
}
