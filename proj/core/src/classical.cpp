#include "qdpi/classical.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "qdpi/errors.hpp"
#include "qdpi/recovery.hpp"
#include "qdpi/stability.hpp"

namespace qdpi {

namespace {

/// Finite-difference steps of the directional-derivative check; two sizes
/// feed one Richardson extrapolation.
constexpr double kDerivStepCoarse = 1e-4;
constexpr double kDerivStepFine = 1e-5;

Matrix diagonal_embedding(const RealVector& values) {
  return values.cast<Cplx>().asDiagonal();
}

/// -sum w log w over the positive part of a spectrum (0 log 0 = 0).
double entropy_of_spectrum(const RealVector& eigenvalues, const Tolerances& tol,
                           const char* where) {
  double max_abs = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    max_abs = std::max(max_abs, std::abs(eigenvalues(i)));
  }
  double cut = tol.pinv_rel * max_abs;
  double out = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    double w = eigenvalues(i);
    if (w <= cut) {
      if (w < -tol.faithfulness) {
        throw SingularInputError(std::string(where) +
                                 ": operator is not positive (eigenvalue " + std::to_string(w) +
                                 ")");
      }
      continue;
    }
    out -= w * std::log(w);
  }
  return out;
}

DensityMatrix reduce(const Matrix& m, const Tolerances& tol) {
  return DensityMatrix::from_matrix(hermitize(m), tol);
}

}  // namespace

ClassicalModel ClassicalModel::create(std::vector<std::vector<int>> partition, RealVector rho,
                                      RealVector sigma, const Tolerances& tol) {
  const int n = static_cast<int>(rho.size());
  if (n == 0 || sigma.size() != n) {
    throw DimensionMismatchError("classical model: densities must be nonempty and equal-sized");
  }
  std::vector<int> cell_of(static_cast<std::size_t>(n), -1);
  for (std::size_t x = 0; x < partition.size(); ++x) {
    if (partition[x].empty()) {
      throw ValidationError("bad_partition", "classical model: cell " + std::to_string(x) +
                                                 " is empty");
    }
    for (int omega : partition[x]) {
      if (omega < 0 || omega >= n) {
        throw ValidationError("bad_partition", "classical model: index " +
                                                   std::to_string(omega) + " out of range");
      }
      if (cell_of[static_cast<std::size_t>(omega)] != -1) {
        throw ValidationError("bad_partition", "classical model: index " +
                                                   std::to_string(omega) +
                                                   " appears in two cells");
      }
      cell_of[static_cast<std::size_t>(omega)] = static_cast<int>(x);
    }
  }
  for (int omega = 0; omega < n; ++omega) {
    if (cell_of[static_cast<std::size_t>(omega)] == -1) {
      throw ValidationError("bad_partition", "classical model: index " + std::to_string(omega) +
                                                 " is not covered");
    }
  }
  for (const RealVector* density : {&rho, &sigma}) {
    if (density->minCoeff() <= 0.0) {
      throw NotDensityError("classical model: densities must be strictly positive");
    }
    if (std::abs(density->sum() - 1.0) > tol.density_trace) {
      throw NotDensityError("classical model: density sums to " +
                            std::to_string(density->sum()));
    }
  }
  return ClassicalModel(std::move(partition), std::move(rho), std::move(sigma),
                        std::move(cell_of));
}

RealVector ClassicalModel::cell_masses(const RealVector& density) const {
  RealVector out = RealVector::Zero(cell_count());
  for (int omega = 0; omega < omega_size(); ++omega) {
    out(cell_of(omega)) += density(omega);
  }
  return out;
}

double classical_kl(const RealVector& p, const RealVector& q) {
  if (p.size() != q.size()) {
    throw DimensionMismatchError("classical_kl: size mismatch");
  }
  double out = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    out += p(i) * std::log(p(i) / q(i));
  }
  return out;
}

ClassicalChain classical_chain(const ClassicalModel& model) {
  ClassicalChain out;
  out.s_full = classical_kl(model.rho(), model.sigma());
  RealVector rho_cells = model.cell_masses(model.rho());
  RealVector sigma_cells = model.cell_masses(model.sigma());
  out.s_coarse = classical_kl(rho_cells, sigma_cells);
  out.conditional_term = out.s_full - out.s_coarse;
  for (int x = 0; x < model.cell_count(); ++x) {
    double inner = 0.0;
    for (int omega : model.partition()[static_cast<std::size_t>(x)]) {
      double f = model.rho()(omega) / rho_cells(x);
      double g = model.sigma()(omega) / sigma_cells(x);
      inner += f * std::log(f / g);
    }
    out.conditional_term_direct += rho_cells(x) * inner;
  }
  return out;
}

RealVector classical_recovery(const ClassicalModel& model, const RealVector& cell_distribution,
                              ModelDensity conditioning, const Tolerances& tol) {
  if (cell_distribution.size() != model.cell_count()) {
    throw BadCellDistributionError("classical_recovery: expected " +
                                   std::to_string(model.cell_count()) + " cell masses, got " +
                                   std::to_string(cell_distribution.size()));
  }
  if (cell_distribution.minCoeff() < 0.0) {
    throw BadCellDistributionError("classical_recovery: negative cell mass");
  }
  if (std::abs(cell_distribution.sum() - 1.0) > tol.unit_norm) {
    throw BadCellDistributionError("classical_recovery: cell masses sum to " +
                                   std::to_string(cell_distribution.sum()));
  }
  const RealVector& reference =
      conditioning == ModelDensity::Rho ? model.rho() : model.sigma();
  RealVector reference_cells = model.cell_masses(reference);
  RealVector out(model.omega_size());
  for (int omega = 0; omega < model.omega_size(); ++omega) {
    int x = model.cell_of(omega);
    out(omega) = cell_distribution(x) * reference(omega) / reference_cells(x);
  }
  return out;
}

ClassicalPinskerGap classical_pinsker_gap(const ClassicalModel& model) {
  ClassicalChain chain = classical_chain(model);
  ClassicalPinskerGap out;
  out.gap = chain.conditional_term;
  RealVector recovered =
      classical_recovery(model, model.cell_masses(model.rho()), ModelDensity::Sigma);
  out.recovery_l1 = (model.rho() - recovered).lpNorm<1>();
  out.pinsker_rhs = 0.5 * out.recovery_l1 * out.recovery_l1;
  return out;
}

double diagonal_oracle_check(const ClassicalModel& model, const Tolerances& tol) {
  const int n = model.omega_size();
  DensityMatrix rho = DensityMatrix::from_matrix(diagonal_embedding(model.rho()), tol);
  DensityMatrix sigma = DensityMatrix::from_matrix(diagonal_embedding(model.sigma()), tol);
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(model.cell_count()));
  for (const auto& cell : model.partition()) {
    Matrix p = Matrix::Zero(n, n);
    for (int omega : cell) {
      p(omega, omega) = 1.0;
    }
    basis.push_back(p / std::sqrt(static_cast<double>(cell.size())));
  }
  Subalgebra alg = Subalgebra::from_basis(std::move(basis), tol);
  RecoveryContext rho_ctx(rho, alg, tol);
  RecoveryContext sigma_ctx(sigma, alg, tol);
  double disc = 0.0;

  // Coarse-graining spreads each cell mass uniformly within its cell.
  RealVector rho_cells = model.cell_masses(model.rho());
  RealVector sigma_cells = model.cell_masses(model.sigma());
  RealVector uniformized(n);
  for (int omega = 0; omega < n; ++omega) {
    int x = model.cell_of(omega);
    uniformized(omega) =
        rho_cells(x) / static_cast<double>(model.partition()[static_cast<std::size_t>(x)].size());
  }
  disc = std::max(disc,
                  hs_norm(rho_ctx.rho_reduced().matrix() - diagonal_embedding(uniformized)));

  // Entropy gap.
  ClassicalChain chain = classical_chain(model);
  double quantum_gap = dpi_gap(rho, sigma, alg, tol);
  disc = std::max(disc, std::abs(quantum_gap - chain.conditional_term));

  // Observable-level coarse-graining on a deterministic ramp observable:
  // classically, the conditional expectation of y given the cell.
  RealVector ramp(n);
  for (int omega = 0; omega < n; ++omega) {
    ramp(omega) = static_cast<double>(omega + 1) / static_cast<double>(n);
  }
  RealVector conditional(n);
  for (int x = 0; x < model.cell_count(); ++x) {
    double avg = 0.0;
    for (int omega : model.partition()[static_cast<std::size_t>(x)]) {
      avg += model.rho()(omega) * ramp(omega);
    }
    avg /= rho_cells(x);
    for (int omega : model.partition()[static_cast<std::size_t>(x)]) {
      conditional(omega) = avg;
    }
  }
  Matrix quantum_conditional = accardi_cecchini(rho_ctx, diagonal_embedding(ramp));
  disc = std::max(disc, hs_norm(quantum_conditional - diagonal_embedding(conditional)));

  // State-level recovery of sigma's cell masses with rho's conditionals.
  RealVector recovered_sigma = classical_recovery(model, sigma_cells, ModelDensity::Rho, tol);
  Matrix quantum_recovered =
      hermitize(petz_recovery_matrix(rho_ctx, sigma_ctx.rho_reduced().matrix()));
  disc = std::max(disc, hs_norm(quantum_recovered - diagonal_embedding(recovered_sigma)));

  // Both trace residuals against their classical l1 counterparts.
  PetzResiduals residuals = petz_residuals(rho_ctx, sigma_ctx);
  ClassicalPinskerGap pinsker = classical_pinsker_gap(model);
  disc = std::max(disc, std::abs(residuals.symm_trace_residual - pinsker.recovery_l1));
  double petz_l1 = (model.sigma() - recovered_sigma).lpNorm<1>();
  disc = std::max(disc, std::abs(residuals.petz_trace_residual - petz_l1));
  return disc;
}

TripartiteState make_tripartite(const DensityMatrix& rho123, int d1, int d2, int d3,
                                const Tolerances& tol) {
  if (d1 < 1 || d2 < 1 || d3 < 1 || rho123.dim() != d1 * d2 * d3) {
    throw DimensionMismatchError("make_tripartite: dims " + std::to_string(d1) + "x" +
                                 std::to_string(d2) + "x" + std::to_string(d3) +
                                 " do not match state dimension " +
                                 std::to_string(rho123.dim()));
  }
  const Matrix& m = rho123.matrix();
  Matrix m12 = partial_trace(m, d1 * d2, d3, Factor::Second);
  Matrix m23 = partial_trace(m, d1, d2 * d3, Factor::First);
  Matrix m13 = partial_trace_middle(m, d1, d2, d3);
  return TripartiteState{d1,
                         d2,
                         d3,
                         rho123,
                         reduce(m12, tol),
                         reduce(m23, tol),
                         reduce(m13, tol),
                         reduce(partial_trace(m12, d1, d2, Factor::Second), tol),
                         reduce(partial_trace(m12, d1, d2, Factor::First), tol),
                         reduce(partial_trace(m23, d2, d3, Factor::First), tol)};
}

SsaReport ssa_suite(const TripartiteState& ts, const Tolerances& tol) {
  SsaReport out;
  double s123 = von_neumann_entropy(ts.rho123, tol);
  double s12 = von_neumann_entropy(ts.rho12, tol);
  double s23 = von_neumann_entropy(ts.rho23, tol);
  double s13 = von_neumann_entropy(ts.rho13, tol);
  double s1 = von_neumann_entropy(ts.rho1, tol);
  double s2 = von_neumann_entropy(ts.rho2, tol);
  double s3 = von_neumann_entropy(ts.rho3, tol);
  out.ssa_gap = s12 + s23 - s123 - s2;
  out.improved_rhs = 2.0 * std::max(s1 - s13, s3 - s13);

  DensityMatrix rho1_23 = DensityMatrix::from_matrix(
      tensor_product(ts.rho1.matrix(), ts.rho23.matrix()), tol);
  DensityMatrix rho1_2 =
      DensityMatrix::from_matrix(tensor_product(ts.rho1.matrix(), ts.rho2.matrix()), tol);
  RelEntropy upper = relative_entropy(ts.rho123, rho1_23, tol);
  RelEntropy lower = relative_entropy(ts.rho12, rho1_2, tol);
  if (upper.infinite || lower.infinite) {
    throw SupportViolationError("ssa_suite: a monotonicity term is infinite");
  }
  out.mono_form_gap = upper.nats - lower.nats;
  return out;
}

double conditional_entropy(const DensityMatrix& rho12, int d1, int d2, const Tolerances& tol) {
  if (rho12.dim() != d1 * d2) {
    throw DimensionMismatchError("conditional_entropy: dims do not match the state");
  }
  DensityMatrix rho2 =
      reduce(partial_trace(rho12.matrix(), d1, d2, Factor::First), tol);
  return von_neumann_entropy(rho12, tol) - von_neumann_entropy(rho2, tol);
}

double conditional_entropy_functional(const Matrix& a, int d1, int d2, const Tolerances& tol) {
  if (a.rows() != d1 * d2 || a.cols() != d1 * d2) {
    throw DimensionMismatchError("conditional_entropy_functional: dims do not match");
  }
  EigenSystem full = hermitian_eig(hermitize(a), tol);
  EigenSystem reduced =
      hermitian_eig(hermitize(partial_trace(a, d1, d2, Factor::First)), tol);
  return entropy_of_spectrum(full.eigenvalues, tol, "conditional_entropy_functional") -
         entropy_of_spectrum(reduced.eigenvalues, tol, "conditional_entropy_functional");
}

DerivativeCheck homogeneity_derivative_check(const Matrix& a, const Matrix& b, int d1, int d2,
                                             const Tolerances& tol) {
  auto difference_quotient = [&](double h) {
    return (conditional_entropy_functional(a + h * b, d1, d2, tol) -
            conditional_entropy_functional(a - h * b, d1, d2, tol)) /
           (2.0 * h);
  };
  double coarse = difference_quotient(kDerivStepCoarse);
  double fine = difference_quotient(kDerivStepFine);
  const double h1_sq = kDerivStepCoarse * kDerivStepCoarse;
  const double h2_sq = kDerivStepFine * kDerivStepFine;
  DerivativeCheck out;
  out.lhs = (h1_sq * fine - h2_sq * coarse) / (h1_sq - h2_sq);
  out.rhs = conditional_entropy_functional(b, d1, d2, tol);
  return out;
}

}  // namespace qdpi
