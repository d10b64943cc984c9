#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qdpi/stability.hpp"
#include "qdpi/types.hpp"

namespace qdpi {

/// Configuration of a randomized ensemble sweep.
///
/// algebra_spec holds the algebra JSON used for every instance; the extra
/// kind {"kind": "random_generated", "dim": n, "generators": g,
/// "max_block": m} instead draws a fresh algebra per instance: a random
/// partition of n into blocks of size <= m, a Haar random change of basis,
/// and g generic Hermitian elements of the conjugated block algebra closed
/// into a basis. An empty spec defaults to the diagonal algebra.
struct SweepConfig {
  int dim = 2;
  std::string algebra_spec;
  int samples = 1;
  std::uint64_t seed = 0;
  /// Rank of the comparison-state draw; 0 means full rank. Rank-deficient
  /// draws exercise the support-violation path: the gap is tagged infinite
  /// and serialized as "inf".
  int sigma_rank = 0;
  /// Diagnostic grid for the resolvent-difference identity; empty uses the
  /// logarithmic default from the tolerances.
  std::vector<double> t_grid;
  /// CSV destination; empty keeps the report in memory only.
  std::string output_path;
  int threads = 1;
  Tolerances tol;
};

/// Everything one instance evaluates. Numeric fields are reproduced
/// bit-for-bit by re-running with the same config and index.
struct InstanceReport {
  int instance = 0;
  std::uint64_t substream = 0;  ///< per-instance seed: seed xor splitmix(index)
  int dim = 0;
  BoundReport report;
  /// max_t |(S_(t)(rho||sigma) - S_(t)(rho_N||sigma_N)) - <w_t,(t+Delta)w_t>|
  double gap_identity_residual = 0.0;
  bool equality_flag = false;
  double timing_ms = 0.0;  ///< excluded from CSV so output stays byte-deterministic
};

struct SweepSummary {
  int instances = 0;
  int support_violations = 0;  ///< tagged infinite gaps (not theorem violations)
  int violations = 0;          ///< finite instances with slack < -tol.bound_slack
  double min_gap = 0.0;        ///< over finite instances; +inf when none
  std::array<double, kBoundCount> min_slack{};  ///< per bound, finite instances
  double min_slack_overall = 0.0;
  double max_gap_identity_residual = 0.0;
};

struct SweepResult {
  std::vector<InstanceReport> reports;
  SweepSummary summary;
  std::string csv;  ///< version header, column header, rows, summary footer
};

/// The sampled inputs of one instance, exposed so a single instance can be
/// dumped to files and re-checked through the file interface.
struct InstanceInputs {
  std::uint64_t substream = 0;
  DensityMatrix rho;
  DensityMatrix sigma;
  Subalgebra algebra;
};

/// Logarithmic grid tol.t_grid_min .. tol.t_grid_max with tol.t_grid_points
/// points.
std::vector<double> default_t_grid(const Tolerances& tol);

InstanceInputs make_instance(const SweepConfig& config, int index);

/// Evaluates one instance exactly as the sweep would.
InstanceReport run_instance(const SweepConfig& config, int index);

/// Runs the ensemble on config.threads workers. Reports come back in
/// instance order regardless of scheduling, and the CSV text is
/// byte-deterministic for a fixed config. When output_path is set the CSV
/// is written via a temp file and atomic rename, so no partial file
/// survives a failure.
SweepResult run_sweep(const SweepConfig& config);

/// Frozen CSV pieces (format version 1).
std::string instance_csv_version();
std::string instance_csv_header();
std::string instance_csv_row(const InstanceReport& r);
std::string summary_json(const SweepSummary& s);

}  // namespace qdpi
