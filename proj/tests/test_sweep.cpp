#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include <qdpi/errors.hpp>
#include <qdpi/io.hpp>
#include <qdpi/rng.hpp>
#include <qdpi/states.hpp>
#include <qdpi/sweep.hpp>

#include "helpers.hpp"

using namespace qdpi;
using namespace qdpi::testing;

namespace {

SweepConfig small_config() {
  SweepConfig cfg;
  cfg.dim = 3;
  cfg.samples = 8;
  cfg.seed = 20240817;
  cfg.t_grid = {0.1, 1.0, 10.0};
  return cfg;  // empty spec = diagonal algebra
}

}  // namespace

TEST_CASE("default t grid is logarithmic with pinned endpoints") {
  const std::vector<double> grid = default_t_grid({});
  REQUIRE(grid.size() == 25);
  CHECK(grid.front() == doctest::Approx(1e-3).epsilon(1e-14));
  CHECK(grid.back() == doctest::Approx(1e3).epsilon(1e-14));
  CHECK(grid[12] == doctest::Approx(1.0).epsilon(1e-12));  // geometric midpoint
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] > grid[i - 1]);
    if (i >= 2) {
      CHECK(grid[i] / grid[i - 1] == doctest::Approx(grid[i - 1] / grid[i - 2]).epsilon(1e-10));
    }
  }
}

TEST_CASE("instance sampling is a pure function of seed and index") {
  const SweepConfig cfg = small_config();

  const InstanceInputs a = make_instance(cfg, 5);
  const InstanceInputs b = make_instance(cfg, 5);
  CHECK(a.substream == b.substream);
  CHECK((a.rho.matrix() - b.rho.matrix()).norm() == 0.0);
  CHECK((a.sigma.matrix() - b.sigma.matrix()).norm() == 0.0);

  // The per-instance stream and the draw order are part of the format: the
  // substream combines seed and index, and for a fixed algebra the state
  // seeds are the first two 64-bit draws.
  const std::uint64_t sub = CounterRng::substream(cfg.seed, 5);
  CHECK(a.substream == sub);
  CounterRng rng(sub);
  const std::uint64_t rho_seed = rng.next_u64();
  const std::uint64_t sigma_seed = rng.next_u64();
  const DensityMatrix rho_ref = random_density(cfg.dim, cfg.dim, rho_seed, cfg.tol);
  const DensityMatrix sigma_ref = random_density(cfg.dim, cfg.dim, sigma_seed, cfg.tol);
  CHECK((a.rho.matrix() - rho_ref.matrix()).norm() == 0.0);
  CHECK((a.sigma.matrix() - sigma_ref.matrix()).norm() == 0.0);

  // Different index, different draw.
  const InstanceInputs c = make_instance(cfg, 6);
  CHECK((a.rho.matrix() - c.rho.matrix()).norm() > 1e-8);
}

TEST_CASE("sweep output is assembled from the frozen CSV pieces") {
  const SweepConfig cfg = small_config();
  const SweepResult result = run_sweep(cfg);

  REQUIRE(static_cast<int>(result.reports.size()) == cfg.samples);
  CHECK(result.summary.instances == cfg.samples);
  CHECK(result.summary.support_violations == 0);
  CHECK(result.summary.violations == 0);
  CHECK(result.summary.min_gap >= -1e-10);
  CHECK(result.summary.min_slack_overall >= -Tolerances{}.bound_slack);
  CHECK(result.summary.max_gap_identity_residual < 1e-9);

  std::string expected = instance_csv_version();
  expected += instance_csv_header();
  for (int i = 0; i < cfg.samples; ++i) {
    expected += instance_csv_row(run_instance(cfg, i));
  }
  expected += "# summary " + summary_json(result.summary) + "\n";
  CHECK(result.csv == expected);

  // The summary footer is valid JSON with the documented keys.
  const std::string footer = result.csv.substr(result.csv.rfind("# summary ") + 10);
  const nlohmann::json doc = nlohmann::json::parse(footer);
  CHECK(doc["instances"].get<int>() == cfg.samples);
  CHECK(doc["min_slack"].size() == static_cast<std::size_t>(kBoundCount));
}

TEST_CASE("thread count never changes a byte of the CSV") {
  SweepConfig cfg = small_config();
  cfg.samples = 10;

  cfg.threads = 1;
  const std::string csv1 = run_sweep(cfg).csv;
  cfg.threads = 3;
  const std::string csv3 = run_sweep(cfg).csv;
  CHECK(csv1 == csv3);

  // Same determinism for per-instance random algebras, whose generation
  // consumes a variable number of draws before the states are sampled.
  SweepConfig rnd;
  rnd.dim = 4;
  rnd.samples = 6;
  rnd.seed = 99;
  rnd.algebra_spec = R"({"kind":"random_generated","dim":4,"generators":2,"max_block":3})";
  rnd.t_grid = {1.0};
  rnd.threads = 1;
  const std::string r1 = run_sweep(rnd).csv;
  rnd.threads = 4;
  const std::string r4 = run_sweep(rnd).csv;
  CHECK(r1 == r4);
}

TEST_CASE("rank-deficient comparison states are tagged, not crashed") {
  SweepConfig cfg = small_config();
  cfg.samples = 5;
  cfg.sigma_rank = 1;

  const SweepResult result = run_sweep(cfg);
  CHECK(result.summary.support_violations == cfg.samples);
  CHECK(result.summary.violations == 0);
  CHECK(std::isinf(result.summary.min_gap));

  // Tagged gaps serialize as "inf" in the CSV and quoted in the summary.
  CHECK(result.csv.find(",inf,") != std::string::npos);
  const std::string footer = result.csv.substr(result.csv.rfind("# summary ") + 10);
  const nlohmann::json doc = nlohmann::json::parse(footer);
  CHECK(doc["min_gap"].get<std::string>() == "inf");
  for (const InstanceReport& r : result.reports) {
    CHECK(r.report.gap_infinite);
    for (const BoundEntry& b : r.report.bounds) {
      CHECK(std::isfinite(b.value));
    }
  }
}

TEST_CASE("output path receives exactly the in-memory CSV") {
  SweepConfig cfg = small_config();
  cfg.samples = 3;
  cfg.output_path = "qdpi_sweep_test_out.csv";
  const SweepResult result = run_sweep(cfg);
  CHECK(read_file(cfg.output_path) == result.csv);
  std::remove(cfg.output_path.c_str());
}

TEST_CASE("config validation rejects impossible requests") {
  SweepConfig cfg = small_config();
  cfg.samples = 0;
  CHECK_THROWS_AS(run_sweep(cfg), ValidationError);

  cfg = small_config();
  cfg.sigma_rank = cfg.dim + 1;
  CHECK_THROWS_AS(run_sweep(cfg), BadRankError);

  cfg = small_config();
  cfg.algebra_spec = R"({"kind":"diagonal","dim":2})";  // ambient 2 vs dim 3
  CHECK_THROWS_AS(run_sweep(cfg), DimensionMismatchError);

  cfg = small_config();
  CHECK_THROWS_AS(make_instance(cfg, cfg.samples), ValidationError);
}
