#include "qdpi/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <string_view>
#include <thread>
#include <utility>

#include <json.hpp>

#include "qdpi/errors.hpp"
#include "qdpi/io.hpp"
#include "qdpi/rng.hpp"
#include "qdpi/states.hpp"

namespace qdpi {
namespace {

using nlohmann::json;

struct AlgebraPlan {
  bool random_generated = false;
  int generators = 2;
  int max_block = 3;
  Subalgebra fixed;  // used when !random_generated

  static AlgebraPlan parse(const SweepConfig& config);
};

AlgebraPlan AlgebraPlan::parse(const SweepConfig& config) {
  if (config.dim < 1) {
    throw DimensionMismatchError("sweep: dimension must be positive");
  }
  if (config.samples < 1) {
    throw ValidationError("bad_config", "sweep: samples must be >= 1");
  }
  if (config.sigma_rank < 0 || config.sigma_rank > config.dim) {
    throw BadRankError("sweep: sigma rank outside [0, dim]");
  }
  std::string spec = config.algebra_spec;
  if (spec.empty()) {
    spec = std::string("{\"kind\":\"diagonal\",\"dim\":") + std::to_string(config.dim) + "}";
  }
  AlgebraPlan plan{false, 2, 3, Subalgebra::full(1)};
  json doc = json::parse(spec, nullptr, false);
  if (doc.is_object() && doc.contains("kind") && doc["kind"].is_string() &&
      doc["kind"].get<std::string>() == "random_generated") {
    plan.random_generated = true;
    if (doc.contains("dim") &&
        (!doc["dim"].is_number_integer() || doc["dim"].get<int>() != config.dim)) {
      throw DimensionMismatchError("sweep: random_generated dim disagrees with config.dim");
    }
    if (doc.contains("generators")) {
      if (!doc["generators"].is_number_integer() || doc["generators"].get<int>() < 1) {
        throw ParseError("sweep: \"generators\" must be a positive integer");
      }
      plan.generators = doc["generators"].get<int>();
    }
    if (doc.contains("max_block")) {
      if (!doc["max_block"].is_number_integer() || doc["max_block"].get<int>() < 1) {
        throw ParseError("sweep: \"max_block\" must be a positive integer");
      }
      plan.max_block = doc["max_block"].get<int>();
    }
    return plan;
  }
  plan.fixed = parse_algebra_json(spec, config.tol);
  if (plan.fixed.ambient_dim() != config.dim) {
    throw DimensionMismatchError("sweep: algebra ambient dimension " +
                                 std::to_string(plan.fixed.ambient_dim()) +
                                 " disagrees with config.dim " + std::to_string(config.dim));
  }
  return plan;
}

Matrix haar_unitary(int n, CounterRng& rng) {
  Matrix g(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      g(i, j) = rng.next_complex_gaussian();
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the phase ambiguity so the distribution is Haar, not QR-dependent.
  for (int j = 0; j < n; ++j) {
    const Cplx d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0.0) ? d / a : Cplx(1.0, 0.0);
  }
  return q;
}

Subalgebra random_generated_algebra(int n, const AlgebraPlan& plan, CounterRng& rng,
                                    const Tolerances& tol) {
  std::vector<int> sizes;
  int rem = n;
  while (rem > 0) {
    const int cap = std::min(rem, plan.max_block);
    const int s = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(cap));
    sizes.push_back(s);
    rem -= s;
  }
  const Matrix u = haar_unitary(n, rng);
  std::vector<Matrix> gens;
  gens.reserve(plan.generators);
  for (int g = 0; g < plan.generators; ++g) {
    Matrix d = Matrix::Zero(n, n);
    int off = 0;
    for (int s : sizes) {
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
          d(off + i, off + j) = rng.next_complex_gaussian();
        }
      }
      off += s;
    }
    gens.push_back(u * hermitize(d) * u.adjoint());
  }
  return close_generators(n, gens, tol);
}

InstanceInputs make_instance_impl(const SweepConfig& config, const AlgebraPlan& plan,
                                  int index) {
  if (index < 0 || index >= config.samples) {
    throw ValidationError("bad_config", "sweep: instance index outside [0, samples)");
  }
  const std::uint64_t sub = CounterRng::substream(config.seed, static_cast<std::uint64_t>(index));
  CounterRng rng(sub);
  Subalgebra alg =
      plan.random_generated ? random_generated_algebra(config.dim, plan, rng, config.tol)
                            : plan.fixed;
  const std::uint64_t rho_seed = rng.next_u64();
  const std::uint64_t sigma_seed = rng.next_u64();
  const int rank = config.sigma_rank == 0 ? config.dim : config.sigma_rank;
  DensityMatrix rho = random_density(config.dim, config.dim, rho_seed, config.tol);
  DensityMatrix sigma = random_density(config.dim, rank, sigma_seed, config.tol);
  return InstanceInputs{sub, std::move(rho), std::move(sigma), std::move(alg)};
}

InstanceReport run_instance_impl(const SweepConfig& config, const AlgebraPlan& plan,
                                 int index) {
  const auto started = std::chrono::steady_clock::now();
  InstanceInputs in = make_instance_impl(config, plan, index);

  InstanceReport out;
  out.instance = index;
  out.substream = in.substream;
  out.dim = config.dim;

  RecoveryContext rho_ctx(in.rho, in.algebra, config.tol);
  out.report = evaluate_bounds(rho_ctx, in.sigma, config.tol);
  out.equality_flag = !out.report.gap_infinite && std::abs(out.report.gap) < config.tol.equality_gap;

  // Resolvent-difference identity on the diagnostic grid: the quasi-entropy
  // drop at parameter t must equal <w_t, (t + Delta) w_t> exactly.
  const std::vector<double> grid =
      config.t_grid.empty() ? default_t_grid(config.tol) : config.t_grid;
  if (!grid.empty()) {
    const ModularPair pair = make_modular_pair(rho_ctx, in.sigma, config.tol);
    const StatePairSpectrum full_pair = make_state_pair(in.rho, in.sigma);
    DensityMatrix sigma_reduced = DensityMatrix::from_matrix(
        hermitize(conditional_expectation_tau(in.algebra, in.sigma.matrix())), config.tol);
    const StatePairSpectrum reduced_pair =
        make_state_pair(rho_ctx.rho_reduced(), sigma_reduced);
    for (double t : grid) {
      const double lhs = quasi_entropy_t(full_pair, t) - quasi_entropy_t(reduced_pair, t);
      const Matrix w = w_vector(rho_ctx, pair, t);
      const double rhs = hs_inner(w, t * w + pair.full.apply(w)).real();
      out.gap_identity_residual = std::max(out.gap_identity_residual, std::abs(lhs - rhs));
    }
  }

  const auto finished = std::chrono::steady_clock::now();
  out.timing_ms = std::chrono::duration<double, std::milli>(finished - started).count();
  return out;
}

}  // namespace

std::vector<double> default_t_grid(const Tolerances& tol) {
  std::vector<double> grid;
  const int pts = tol.t_grid_points;
  if (pts < 1 || tol.t_grid_min <= 0.0 || tol.t_grid_max < tol.t_grid_min) {
    throw ValidationError("bad_config", "t-grid needs 0 < min <= max and >= 1 point");
  }
  grid.reserve(pts);
  if (pts == 1) {
    grid.push_back(tol.t_grid_min);
    return grid;
  }
  const double lo = std::log(tol.t_grid_min);
  const double hi = std::log(tol.t_grid_max);
  for (int i = 0; i < pts; ++i) {
    grid.push_back(std::exp(lo + (hi - lo) * static_cast<double>(i) /
                                     static_cast<double>(pts - 1)));
  }
  return grid;
}

InstanceInputs make_instance(const SweepConfig& config, int index) {
  return make_instance_impl(config, AlgebraPlan::parse(config), index);
}

InstanceReport run_instance(const SweepConfig& config, int index) {
  return run_instance_impl(config, AlgebraPlan::parse(config), index);
}

SweepResult run_sweep(const SweepConfig& config) {
  const AlgebraPlan plan = AlgebraPlan::parse(config);
  const int workers = std::max(1, config.threads);

  SweepResult result;
  result.reports.resize(static_cast<std::size_t>(config.samples));

  std::atomic<int> next{0};
  std::mutex failure_mutex;
  int failed_index = -1;
  std::exception_ptr failure;

  const auto work = [&]() {
    for (;;) {
      const int index = next.fetch_add(1);
      if (index >= config.samples) {
        return;
      }
      try {
        result.reports[static_cast<std::size_t>(index)] = run_instance_impl(config, plan, index);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        // Keep the lowest failing index so error reporting is deterministic
        // regardless of worker scheduling.
        if (failed_index < 0 || index < failed_index) {
          failed_index = index;
          failure = std::current_exception();
        }
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(work);
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  SweepSummary& s = result.summary;
  s.instances = config.samples;
  const double inf = std::numeric_limits<double>::infinity();
  s.min_gap = inf;
  s.min_slack.fill(inf);
  s.min_slack_overall = inf;
  for (const InstanceReport& r : result.reports) {
    s.max_gap_identity_residual =
        std::max(s.max_gap_identity_residual, r.gap_identity_residual);
    if (r.report.gap_infinite) {
      ++s.support_violations;
      continue;
    }
    s.min_gap = std::min(s.min_gap, r.report.gap);
    bool violated = false;
    for (int k = 0; k < kBoundCount; ++k) {
      const double slack = r.report.bounds[static_cast<std::size_t>(k)].slack;
      s.min_slack[static_cast<std::size_t>(k)] =
          std::min(s.min_slack[static_cast<std::size_t>(k)], slack);
      s.min_slack_overall = std::min(s.min_slack_overall, slack);
      violated = violated || slack < -config.tol.bound_slack;
    }
    if (violated) {
      ++s.violations;
    }
  }

  std::string csv = instance_csv_version();
  csv += instance_csv_header();
  for (const InstanceReport& r : result.reports) {
    csv += instance_csv_row(r);
  }
  csv += "# summary ";
  csv += summary_json(s);
  csv += "\n";
  result.csv = std::move(csv);

  if (!config.output_path.empty()) {
    write_file_atomic(config.output_path, result.csv);
  }
  return result;
}

std::string instance_csv_version() { return "# qdpi sweep csv v1\n"; }

std::string instance_csv_header() {
  std::string h = "instance,seed,dim,gap";
  h += ",delta_norm,rho_inv_norm,rho_reduced_norm,sigma_reduced_inv_norm";
  h += ",petz_trace_residual,symm_trace_residual,eqcase_hs_residual,eqcase_symm_hs_residual";
  h += ",recovered_fidelity";
  for (std::string_view id : kBoundIds) {
    h += ",";
    h += id;
    h += "_value,";
    h += id;
    h += "_slack";
  }
  h += ",min_slack,gap_identity_residual,equality\n";
  return h;
}

std::string instance_csv_row(const InstanceReport& r) {
  const double inf = std::numeric_limits<double>::infinity();
  const bool tagged = r.report.gap_infinite;
  std::string row = std::to_string(r.instance);
  row += ",";
  row += std::to_string(r.substream);
  row += ",";
  row += std::to_string(r.dim);
  row += ",";
  row += format_double(tagged ? inf : r.report.gap);
  const BoundInputs& in = r.report.inputs;
  for (double v : {in.delta_norm, in.rho_inv_norm, in.rho_reduced_norm,
                   in.sigma_reduced_inv_norm, in.residuals.petz_trace_residual,
                   in.residuals.symm_trace_residual, in.residuals.eqcase_hs_residual,
                   in.residuals.eqcase_symm_hs_residual, in.recovered_fidelity}) {
    row += ",";
    row += format_double(v);
  }
  for (const BoundEntry& b : r.report.bounds) {
    row += ",";
    row += format_double(b.value);
    row += ",";
    row += format_double(tagged ? inf : b.slack);
  }
  row += ",";
  row += format_double(r.report.min_slack());
  row += ",";
  row += format_double(r.gap_identity_residual);
  row += ",";
  row += r.equality_flag ? "1" : "0";
  row += "\n";
  return row;
}

namespace {

/// JSON numbers cannot carry IEEE infinities; quote them so the summary
/// footer stays parseable when every instance hit a support violation.
std::string json_double(double v) {
  const std::string s = format_double(v);
  if (std::isfinite(v)) {
    return s;
  }
  return "\"" + s + "\"";
}

}  // namespace

std::string summary_json(const SweepSummary& s) {
  std::string out = "{\"instances\":";
  out += std::to_string(s.instances);
  out += ",\"support_violations\":";
  out += std::to_string(s.support_violations);
  out += ",\"violations\":";
  out += std::to_string(s.violations);
  out += ",\"min_gap\":";
  out += json_double(s.min_gap);
  out += ",\"min_slack\":{";
  for (int k = 0; k < kBoundCount; ++k) {
    if (k > 0) {
      out += ",";
    }
    out += "\"";
    out += std::string(kBoundIds[static_cast<std::size_t>(k)]);
    out += "\":";
    out += json_double(s.min_slack[static_cast<std::size_t>(k)]);
  }
  out += "},\"min_slack_overall\":";
  out += json_double(s.min_slack_overall);
  out += ",\"max_gap_identity_residual\":";
  out += json_double(s.max_gap_identity_residual);
  out += "}";
  return out;
}

}  // namespace qdpi
