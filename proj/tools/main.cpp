// qdpi: checks, sweeps, and structure reports for coarse-graining stability.
//
// Exit codes: 0 success, 2 validation failures (bad files, bad flags),
// 3 numerical failures or bound violations. Errors print a one-line JSON
// object {"error": {"kind", "message"}} to stdout.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qdpi/classical.hpp"
#include "qdpi/errors.hpp"
#include "qdpi/gns.hpp"
#include "qdpi/io.hpp"
#include "qdpi/rng.hpp"
#include "qdpi/structure.hpp"
#include "qdpi/sweep.hpp"

namespace {

using nlohmann::ordered_json;
using namespace qdpi;

constexpr double kGramConditionWarning = 1e12;

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string tol_file;
  int threads = 1;
  std::string out;
};

Tolerances load_tolerances(const GlobalOpts& g) {
  if (g.tol_file.empty()) {
    return Tolerances{};
  }
  return parse_tolerance_overrides(read_file(g.tol_file));
}

void emit(const GlobalOpts& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') {
      std::cout << "\n";
    }
    return;
  }
  write_file_atomic(g.out, text);
}

DensityMatrix load_density(const std::string& path, const Tolerances& tol) {
  return DensityMatrix::from_matrix(parse_matrix_json(read_file(path)), tol);
}

Subalgebra load_algebra(const std::string& path, const Tolerances& tol) {
  return parse_algebra_json(read_file(path), tol);
}

ordered_json matrix_doc(const Matrix& m) { return ordered_json::parse(matrix_to_json(m)); }

ordered_json entropy_doc(const RelEntropy& s) {
  ordered_json doc;
  doc["infinite"] = s.infinite;
  if (s.infinite) {
    doc["nats"] = "inf";
  } else {
    doc["nats"] = s.nats;
  }
  doc["support_leak"] = s.support_leak;
  return doc;
}

/// Tagged double: JSON cannot carry IEEE infinities, so they become "inf".
ordered_json tagged(double v) {
  if (std::isinf(v)) {
    return ordered_json(v > 0 ? "inf" : "-inf");
  }
  if (std::isnan(v)) {
    return ordered_json("nan");
  }
  return ordered_json(v);
}

ordered_json bound_report_doc(const BoundReport& rep) {
  ordered_json doc;
  doc["gap"] = rep.gap_infinite ? tagged(std::numeric_limits<double>::infinity())
                                : ordered_json(rep.gap);
  doc["gap_infinite"] = rep.gap_infinite;
  doc["full_entropy"] = entropy_doc(rep.full_entropy);
  doc["reduced_entropy"] = entropy_doc(rep.reduced_entropy);
  const BoundInputs& in = rep.inputs;
  ordered_json inputs;
  inputs["delta_norm"] = in.delta_norm;
  inputs["rho_inv_norm"] = in.rho_inv_norm;
  inputs["rho_reduced_norm"] = in.rho_reduced_norm;
  inputs["sigma_reduced_inv_norm"] = in.sigma_reduced_inv_norm;
  inputs["petz_trace_residual"] = in.residuals.petz_trace_residual;
  inputs["symm_trace_residual"] = in.residuals.symm_trace_residual;
  inputs["eqcase_hs_residual"] = in.residuals.eqcase_hs_residual;
  inputs["eqcase_symm_hs_residual"] = in.residuals.eqcase_symm_hs_residual;
  inputs["recovered_fidelity"] = in.recovered_fidelity;
  doc["inputs"] = std::move(inputs);
  ordered_json bounds = ordered_json::array();
  for (const BoundEntry& b : rep.bounds) {
    ordered_json entry;
    entry["id"] = std::string(b.id);
    entry["value"] = b.value;
    entry["slack"] = rep.gap_infinite ? tagged(std::numeric_limits<double>::infinity())
                                      : ordered_json(b.slack);
    bounds.push_back(std::move(entry));
  }
  doc["bounds"] = std::move(bounds);
  doc["min_slack"] = tagged(rep.min_slack());
  return doc;
}

std::vector<double> parse_t_grid_flag(const std::string& flag, const Tolerances& tol) {
  if (flag.empty()) {
    return default_t_grid(tol);
  }
  std::vector<double> grid;
  std::size_t pos = 0;
  while (pos < flag.size()) {
    std::size_t comma = flag.find(',', pos);
    if (comma == std::string::npos) {
      comma = flag.size();
    }
    try {
      grid.push_back(std::stod(flag.substr(pos, comma - pos)));
    } catch (const std::exception&) {
      throw ParseError("t-grid: expected comma-separated numbers");
    }
    if (grid.back() <= 0.0) {
      throw ParseError("t-grid: every t must be positive");
    }
    pos = comma + 1;
  }
  if (grid.empty()) {
    throw ParseError("t-grid: empty grid");
  }
  return grid;
}

int cmd_check(const GlobalOpts& g, const std::string& rho_file, const std::string& sigma_file,
              const std::string& algebra_file, const std::string& t_grid_flag) {
  const auto started = std::chrono::steady_clock::now();
  const Tolerances tol = load_tolerances(g);
  DensityMatrix rho = load_density(rho_file, tol);
  DensityMatrix sigma = load_density(sigma_file, tol);
  Subalgebra alg = load_algebra(algebra_file, tol);

  RecoveryContext rho_ctx(rho, alg, tol);
  BoundReport rep = evaluate_bounds(rho_ctx, sigma, tol);

  ordered_json doc;
  doc["command"] = "check";
  doc["dim"] = rho.dim();
  doc.update(bound_report_doc(rep));

  // Resolvent-difference identity across the diagnostic grid.
  const std::vector<double> grid = parse_t_grid_flag(t_grid_flag, tol);
  const ModularPair pair = make_modular_pair(rho_ctx, sigma, tol);
  const StatePairSpectrum full_pair = make_state_pair(rho, sigma);
  DensityMatrix sigma_reduced = DensityMatrix::from_matrix(
      hermitize(conditional_expectation_tau(alg, sigma.matrix())), tol);
  const StatePairSpectrum reduced_pair = make_state_pair(rho_ctx.rho_reduced(), sigma_reduced);
  ordered_json grid_doc = ordered_json::array();
  double max_identity_residual = 0.0;
  for (double t : grid) {
    const double lhs = quasi_entropy_t(full_pair, t) - quasi_entropy_t(reduced_pair, t);
    const Matrix w = w_vector(rho_ctx, pair, t);
    const double rhs = hs_inner(w, t * w + pair.full.apply(w)).real();
    const double lower = t * w.squaredNorm();
    ordered_json row;
    row["t"] = t;
    row["identity_residual"] = std::abs(lhs - rhs);
    row["positivity_slack"] = rhs - lower;
    grid_doc.push_back(std::move(row));
    max_identity_residual = std::max(max_identity_residual, std::abs(lhs - rhs));
  }
  doc["t_grid"] = std::move(grid_doc);
  doc["max_gap_identity_residual"] = max_identity_residual;

  if (sigma.faithful(tol)) {
    EqualityDiagnostics eq = equality_diagnostics(rho, sigma, alg, tol);
    ordered_json eq_doc;
    eq_doc["gap"] = eq.gap;
    eq_doc["gap_reversed"] = eq.gap_reversed;
    eq_doc["is_equality_case"] = eq.is_equality_case;
    eq_doc["is_equality_case_reversed"] = eq.is_equality_case_reversed;
    doc["equality"] = std::move(eq_doc);
  } else {
    doc["equality"] = nullptr;
  }

  const auto finished = std::chrono::steady_clock::now();
  doc["timing_ms"] = std::chrono::duration<double, std::milli>(finished - started).count();
  emit(g, doc.dump(2));
  const bool violated = !rep.gap_infinite && rep.min_slack() < -tol.bound_slack;
  return violated ? 3 : 0;
}

int cmd_sweep(const GlobalOpts& g, int dim, int samples, const std::string& algebra_file,
              const std::string& algebra_inline, int sigma_rank, const std::string& t_grid_flag,
              const std::string& dump_dir) {
  const Tolerances tol = load_tolerances(g);
  SweepConfig config;
  config.dim = dim;
  config.samples = samples;
  config.seed = g.seed;
  config.sigma_rank = sigma_rank;
  config.threads = g.threads;
  config.tol = tol;
  if (!algebra_file.empty() && !algebra_inline.empty()) {
    throw ValidationError("bad_config", "pass --algebra or --algebra-json, not both");
  }
  if (!algebra_file.empty()) {
    config.algebra_spec = read_file(algebra_file);
  } else {
    config.algebra_spec = algebra_inline;
  }
  if (!t_grid_flag.empty()) {
    config.t_grid = parse_t_grid_flag(t_grid_flag, tol);
  }
  config.output_path = g.out;

  if (!dump_dir.empty()) {
    InstanceInputs inst = make_instance(config, 0);
    write_file_atomic(dump_dir + "/rho.json", matrix_to_json(inst.rho.matrix()));
    write_file_atomic(dump_dir + "/sigma.json", matrix_to_json(inst.sigma.matrix()));
    ordered_json alg_doc;
    alg_doc["kind"] = "generators";
    alg_doc["dim"] = config.dim;
    ordered_json gens = ordered_json::array();
    for (const Matrix& b : inst.algebra.basis()) {
      gens.push_back(matrix_doc(b));
    }
    alg_doc["generators"] = std::move(gens);
    write_file_atomic(dump_dir + "/algebra.json", alg_doc.dump());
  }

  SweepResult result = run_sweep(config);
  if (g.out.empty()) {
    std::cout << result.csv;
  } else {
    std::cout << summary_json(result.summary) << "\n";
  }
  return result.summary.violations > 0 ? 3 : 0;
}

int cmd_structure(const GlobalOpts& g, const std::string& rho_file,
                  const std::string& algebra_file) {
  const Tolerances tol = load_tolerances(g);
  DensityMatrix rho = load_density(rho_file, tol);
  Subalgebra alg = load_algebra(algebra_file, tol);
  RecoveryContext ctx(rho, alg, tol);
  FixedPointStructure fps = build_structure(ctx, g.seed, tol);

  ordered_json doc;
  doc["command"] = "structure";
  doc["dim"] = rho.dim();
  doc["fixed_dim"] = fps.fixed.dim();
  doc["block_count"] = static_cast<int>(fps.decomp.blocks.size());
  ordered_json blocks = ordered_json::array();
  for (std::size_t j = 0; j < fps.decomp.blocks.size(); ++j) {
    const FactorBlock& b = fps.decomp.blocks[j];
    ordered_json entry;
    entry["d_left"] = b.d_left;
    entry["d_right"] = b.d_right;
    entry["weight"] = fps.weights[j];
    entry["gamma"] = matrix_doc(fps.gammas[j].matrix());
    blocks.push_back(std::move(entry));
  }
  doc["blocks"] = std::move(blocks);
  doc["reconstruction_residual"] = fps.reconstruction_residual;
  doc["reduced_reconstruction_residual"] = fps.reduced_reconstruction_residual;
  doc["expectation_compat_residual"] = fps.expectation_compat_residual;

  // Sample one state from the equality family and verify it really closes
  // the gap.
  CounterRng rng(CounterRng::substream(g.seed, 0x657175616cULL));
  std::vector<DensityMatrix> block_states;
  std::vector<double> weights;
  double total = 0.0;
  for (const FactorBlock& b : fps.decomp.blocks) {
    block_states.push_back(random_density(b.d_right, b.d_right, rng.next_u64(), tol));
    const double w = -std::log(rng.next_uniform());
    weights.push_back(w);
    total += w;
  }
  for (double& w : weights) {
    w /= total;
  }
  DensityMatrix sigma = build_equality_state(fps, block_states, weights, tol);
  const double gap = dpi_gap(rho, sigma, alg, tol);
  const double petz_residual = petz_residuals(ctx, sigma, tol).petz_trace_residual;
  if (std::abs(gap) > tol.equality_gap) {
    throw StructureInconsistencyError(
        "structure: sampled equality state fails to close the gap (" + std::to_string(gap) +
        " nats)");
  }
  ordered_json sample;
  sample["weights"] = weights;
  sample["gap"] = gap;
  sample["petz_trace_residual"] = petz_residual;
  sample["is_equality_case"] = true;
  doc["equality_sample"] = std::move(sample);
  if (fps.fixed.dim() == 1) {
    doc["message"] = "equality forces sigma = rho";
  }
  emit(g, doc.dump(2));
  return 0;
}

int cmd_takesaki(const GlobalOpts& g, const std::string& rho_file,
                 const std::string& algebra_file) {
  const Tolerances tol = load_tolerances(g);
  DensityMatrix rho = load_density(rho_file, tol);
  Subalgebra alg = load_algebra(algebra_file, tol);
  GnsProjection gp(rho, alg, tol);

  FlagResidual real = is_real(gp, tol);
  FlagResidual invariant = delta_invariance(rho, alg, tol);
  ConditionalExpectationDiagnostics ce = is_conditional_expectation(gp, tol);

  ordered_json doc;
  doc["command"] = "takesaki";
  doc["dim"] = rho.dim();
  doc["gram_condition"] = gp.gram_condition();
  doc["gram_warning"] = gp.gram_condition() > kGramConditionWarning;
  ordered_json real_doc;
  real_doc["flag"] = real.flag;
  real_doc["max_residual"] = real.max_residual;
  doc["is_real"] = std::move(real_doc);
  ordered_json inv_doc;
  inv_doc["flag"] = invariant.flag;
  inv_doc["max_residual"] = invariant.max_residual;
  doc["delta_invariance"] = std::move(inv_doc);
  ordered_json ce_doc;
  ce_doc["flag"] = ce.flag;
  ce_doc["module_residual"] = ce.module_residual;
  ce_doc["schwarz_violation"] = ce.schwarz_violation;
  ce_doc["choi_violation"] = ce.choi_violation;
  doc["is_conditional_expectation"] = std::move(ce_doc);
  doc["flags_agree"] = (real.flag == invariant.flag) && (invariant.flag == ce.flag);
  if (invariant.flag) {
    ModularAgreement ma = modular_agreement(rho, alg, tol);
    ordered_json ma_doc;
    ma_doc["modular_residual"] = ma.modular_residual;
    ma_doc["fixed_residual"] = ma.fixed_residual;
    doc["modular_agreement"] = std::move(ma_doc);
  } else {
    doc["modular_agreement"] = nullptr;
  }
  emit(g, doc.dump(2));
  return 0;
}

int cmd_ssa(const GlobalOpts& g, const std::string& dims_flag, int samples,
            const std::string& csv_path) {
  const Tolerances tol = load_tolerances(g);
  int d1 = 0, d2 = 0, d3 = 0;
  if (std::sscanf(dims_flag.c_str(), "%d,%d,%d", &d1, &d2, &d3) != 3 || d1 < 1 || d2 < 1 ||
      d3 < 1) {
    throw ParseError("ssa: --dims expects \"d1,d2,d3\" with positive integers");
  }
  if (samples < 1) {
    throw ValidationError("bad_config", "ssa: samples must be >= 1");
  }
  const int d = d1 * d2 * d3;
  std::string csv = "# qdpi ssa csv v1\n";
  csv += "instance,seed,d1,d2,d3,ssa_gap,mono_form_gap,identity_residual,improved_rhs,"
         "improved_slack\n";
  int violations = 0;
  double min_ssa_gap = std::numeric_limits<double>::infinity();
  double max_identity_residual = 0.0;
  double min_improved_slack = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const std::uint64_t sub = CounterRng::substream(g.seed, static_cast<std::uint64_t>(i));
    CounterRng rng(sub);
    DensityMatrix rho = random_density(d, d, rng.next_u64(), tol);
    TripartiteState ts = make_tripartite(rho, d1, d2, d3, tol);
    SsaReport rep = ssa_suite(ts, tol);
    const double identity_residual = std::abs(rep.ssa_gap - rep.mono_form_gap);
    const double improved_slack = rep.ssa_gap - rep.improved_rhs;
    min_ssa_gap = std::min(min_ssa_gap, rep.ssa_gap);
    max_identity_residual = std::max(max_identity_residual, identity_residual);
    min_improved_slack = std::min(min_improved_slack, improved_slack);
    if (rep.ssa_gap < -tol.equality_gap || identity_residual > tol.equality_gap ||
        improved_slack < -tol.bound_slack) {
      ++violations;
    }
    csv += std::to_string(i);
    csv += ",";
    csv += std::to_string(sub);
    for (int v : {d1, d2, d3}) {
      csv += ",";
      csv += std::to_string(v);
    }
    for (double v : {rep.ssa_gap, rep.mono_form_gap, identity_residual, rep.improved_rhs,
                     improved_slack}) {
      csv += ",";
      csv += format_double(v);
    }
    csv += "\n";
  }
  std::string summary = "{\"instances\":" + std::to_string(samples) +
                        ",\"violations\":" + std::to_string(violations) +
                        ",\"min_ssa_gap\":" + format_double(min_ssa_gap) +
                        ",\"max_identity_residual\":" + format_double(max_identity_residual) +
                        ",\"min_improved_slack\":" + format_double(min_improved_slack) + "}";
  csv += "# summary " + summary + "\n";
  if (!csv_path.empty()) {
    write_file_atomic(csv_path, csv);
    std::cout << summary << "\n";
  } else if (!g.out.empty()) {
    write_file_atomic(g.out, csv);
    std::cout << summary << "\n";
  } else {
    std::cout << csv;
  }
  return violations > 0 ? 3 : 0;
}

int cmd_oracle(const GlobalOpts& g, int omega, int cells, int samples,
               const std::string& csv_path) {
  const Tolerances tol = load_tolerances(g);
  if (omega < 1 || cells < 1 || cells > omega) {
    throw ValidationError("bad_config", "oracle: need 1 <= cells <= omega");
  }
  if (samples < 1) {
    throw ValidationError("bad_config", "oracle: samples must be >= 1");
  }
  std::string csv = "# qdpi oracle csv v1\n";
  csv += "instance,seed,omega,cells,s_full,s_coarse,conditional_term,chain_residual,gap,"
         "pinsker_rhs,pinsker_slack,recovery_l1,oracle_discrepancy\n";
  int violations = 0;
  double max_chain_residual = 0.0;
  double min_pinsker_slack = std::numeric_limits<double>::infinity();
  double max_oracle_discrepancy = 0.0;
  for (int i = 0; i < samples; ++i) {
    const std::uint64_t sub = CounterRng::substream(g.seed, static_cast<std::uint64_t>(i));
    CounterRng rng(sub);
    // Random partition: cell sizes first (each at least one point), then a
    // random permutation of the outcomes carved into consecutive chunks.
    std::vector<int> sizes;
    int rem = omega;
    for (int c = 0; c < cells; ++c) {
      const int cap = rem - (cells - 1 - c);
      const int s =
          (c == cells - 1) ? rem
                           : 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(cap));
      sizes.push_back(s);
      rem -= s;
    }
    std::vector<int> points(static_cast<std::size_t>(omega));
    for (int w = 0; w < omega; ++w) {
      points[static_cast<std::size_t>(w)] = w;
    }
    for (int w = omega - 1; w > 0; --w) {
      const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(w + 1));
      std::swap(points[static_cast<std::size_t>(w)], points[static_cast<std::size_t>(j)]);
    }
    std::vector<std::vector<int>> partition;
    int off = 0;
    for (int s : sizes) {
      partition.emplace_back(points.begin() + off, points.begin() + off + s);
      off += s;
    }
    RealVector rho(omega);
    RealVector sigma(omega);
    for (int w = 0; w < omega; ++w) {
      rho(w) = -std::log(rng.next_uniform());
    }
    for (int w = 0; w < omega; ++w) {
      sigma(w) = -std::log(rng.next_uniform());
    }
    rho /= rho.sum();
    sigma /= sigma.sum();
    ClassicalModel model = ClassicalModel::create(partition, rho, sigma, tol);

    ClassicalChain chain = classical_chain(model);
    const double chain_residual =
        std::abs(chain.conditional_term - chain.conditional_term_direct);
    ClassicalPinskerGap pinsker = classical_pinsker_gap(model);
    const double pinsker_slack = pinsker.gap - pinsker.pinsker_rhs;
    const double discrepancy = diagonal_oracle_check(model, tol);

    max_chain_residual = std::max(max_chain_residual, chain_residual);
    min_pinsker_slack = std::min(min_pinsker_slack, pinsker_slack);
    max_oracle_discrepancy = std::max(max_oracle_discrepancy, discrepancy);
    if (chain_residual > 1e-12 || pinsker_slack < -1e-10 || discrepancy > 1e-9) {
      ++violations;
    }
    csv += std::to_string(i);
    csv += ",";
    csv += std::to_string(sub);
    csv += ",";
    csv += std::to_string(omega);
    csv += ",";
    csv += std::to_string(cells);
    for (double v : {chain.s_full, chain.s_coarse, chain.conditional_term, chain_residual,
                     pinsker.gap, pinsker.pinsker_rhs, pinsker_slack, pinsker.recovery_l1,
                     discrepancy}) {
      csv += ",";
      csv += format_double(v);
    }
    csv += "\n";
  }
  std::string summary =
      "{\"instances\":" + std::to_string(samples) +
      ",\"violations\":" + std::to_string(violations) +
      ",\"max_chain_residual\":" + format_double(max_chain_residual) +
      ",\"min_pinsker_slack\":" + format_double(min_pinsker_slack) +
      ",\"max_oracle_discrepancy\":" + format_double(max_oracle_discrepancy) + "}";
  csv += "# summary " + summary + "\n";
  if (!csv_path.empty()) {
    write_file_atomic(csv_path, csv);
    std::cout << summary << "\n";
  } else if (!g.out.empty()) {
    write_file_atomic(g.out, csv);
    std::cout << summary << "\n";
  } else {
    std::cout << csv;
  }
  return violations > 0 ? 3 : 0;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Stability diagnostics for coarse-graining channels"};
  app.require_subcommand(1);
  // Global flags may appear after the subcommand name as well as before it.
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--seed", g.seed, "Base seed for every randomized command");
  app.add_option("--tol-overrides", g.tol_file, "JSON file with tolerance overrides");
  app.add_option("--threads", g.threads, "Worker threads for sweeps")
      ->check(CLI::Range(1, 256));
  app.add_option("--out", g.out, "Output file (default: stdout)");

  std::string rho_file, sigma_file, algebra_file, t_grid_flag;
  CLI::App* check = app.add_subcommand("check", "Evaluate every bound on one state pair");
  check->add_option("--rho", rho_file, "Density matrix JSON file")->required();
  check->add_option("--sigma", sigma_file, "Density matrix JSON file")->required();
  check->add_option("--algebra", algebra_file, "Subalgebra JSON file")->required();
  check->add_option("--t-grid", t_grid_flag, "Comma-separated resolvent grid override");

  int dim = 2, samples = 1, sigma_rank = 0;
  std::string algebra_inline, dump_dir;
  CLI::App* sweep = app.add_subcommand("sweep", "Randomized ensemble sweep to CSV");
  sweep->add_option("--dim", dim, "Ambient dimension")->required()->check(CLI::Range(1, 64));
  sweep->add_option("--samples", samples, "Number of instances")->required();
  sweep->add_option("--algebra", algebra_file, "Subalgebra JSON file");
  sweep->add_option("--algebra-json", algebra_inline, "Inline subalgebra JSON");
  sweep->add_option("--sigma-rank", sigma_rank, "Rank of the comparison draw (0 = full)");
  sweep->add_option("--t-grid", t_grid_flag, "Comma-separated resolvent grid override");
  sweep->add_option("--dump-instance", dump_dir,
                    "Write instance 0 inputs (rho/sigma/algebra JSON) into this directory");

  CLI::App* structure = app.add_subcommand("structure", "Equality-case structure report");
  structure->add_option("--rho", rho_file, "Density matrix JSON file")->required();
  structure->add_option("--algebra", algebra_file, "Subalgebra JSON file")->required();

  CLI::App* takesaki =
      app.add_subcommand("takesaki", "State-dependent expectation existence flags");
  takesaki->add_option("--rho", rho_file, "Density matrix JSON file")->required();
  takesaki->add_option("--algebra", algebra_file, "Subalgebra JSON file")->required();

  std::string dims_flag = "2,2,2", csv_path;
  int ssa_samples = 500;
  CLI::App* ssa = app.add_subcommand("ssa", "Strong subadditivity ensemble");
  ssa->add_option("--dims", dims_flag, "Factor dimensions d1,d2,d3");
  ssa->add_option("--samples", ssa_samples, "Number of instances");
  ssa->add_option("--csv", csv_path, "CSV output file");

  int omega = 8, cells = 3, oracle_samples = 200;
  CLI::App* oracle =
      app.add_subcommand("oracle", "Classical models against the quantum pipeline");
  oracle->add_option("--omega", omega, "Outcome count")->check(CLI::Range(1, 64));
  oracle->add_option("--cells", cells, "Partition cell count");
  oracle->add_option("--samples", oracle_samples, "Number of instances");
  oracle->add_option("--csv", csv_path, "CSV output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help and friends print through CLI11
    }
    nlohmann::ordered_json err;
    err["error"] = {{"kind", "cli"}, {"message", e.what()}};
    std::cout << err.dump() << "\n";
    return 2;
  }

  if (check->parsed()) {
    return cmd_check(g, rho_file, sigma_file, algebra_file, t_grid_flag);
  }
  if (sweep->parsed()) {
    return cmd_sweep(g, dim, samples, algebra_file, algebra_inline, sigma_rank, t_grid_flag,
                     dump_dir);
  }
  if (structure->parsed()) {
    return cmd_structure(g, rho_file, algebra_file);
  }
  if (takesaki->parsed()) {
    return cmd_takesaki(g, rho_file, algebra_file);
  }
  if (ssa->parsed()) {
    return cmd_ssa(g, dims_flag, ssa_samples, csv_path);
  }
  return cmd_oracle(g, omega, cells, oracle_samples, csv_path);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const qdpi::ValidationError& e) {
    nlohmann::ordered_json err;
    err["error"] = {{"kind", e.kind()}, {"message", e.what()}};
    std::cout << err.dump() << "\n";
    return 2;
  } catch (const qdpi::NumericalError& e) {
    nlohmann::ordered_json err;
    err["error"] = {{"kind", e.kind()}, {"message", e.what()}};
    std::cout << err.dump() << "\n";
    return 3;
  } catch (const std::exception& e) {
    nlohmann::ordered_json err;
    err["error"] = {{"kind", "internal"}, {"message", e.what()}};
    std::cout << err.dump() << "\n";
    return 3;
  }
}
