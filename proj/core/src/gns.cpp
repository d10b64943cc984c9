#include "qdpi/gns.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qdpi/errors.hpp"
#include "qdpi/recovery.hpp"
#include "qdpi/rng.hpp"

namespace qdpi {

namespace {

/// Seed of the deterministic draws used by the conditional-expectation probe.
constexpr std::uint64_t kProbeSeed = 0x676e732d70726f62ULL;
constexpr int kProbeTrials = 8;

Matrix random_algebra_element(const Subalgebra& alg, CounterRng& rng) {
  Matrix out = Matrix::Zero(alg.ambient_dim(), alg.ambient_dim());
  for (const Matrix& b : alg.basis()) {
    out += Cplx(rng.next_complex_gaussian()) * b;
  }
  double norm = hs_norm(out);
  if (norm == 0.0) {
    return alg.basis().front();
  }
  return out / norm;
}

Matrix random_ambient_element(int n, CounterRng& rng) {
  Matrix out(n, n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) {
      out(r, c) = rng.next_complex_gaussian();
    }
  }
  return out / hs_norm(out);
}

}  // namespace

GnsProjection::GnsProjection(DensityMatrix rho, Subalgebra alg, const Tolerances& tol)
    : rho_(std::move(rho)), alg_(std::move(alg)) {
  if (rho_.dim() != alg_.ambient_dim()) {
    throw DimensionMismatchError("gns projection: state dimension " + std::to_string(rho_.dim()) +
                                 " != algebra ambient dimension " +
                                 std::to_string(alg_.ambient_dim()));
  }
  if (!rho_.faithful(tol)) {
    throw NonFaithfulError("gns projection requires a faithful state; smallest eigenvalue " +
                           std::to_string(rho_.min_eigenvalue()));
  }
  const int m = alg_.dim();
  Matrix gram(m, m);
  for (int k = 0; k < m; ++k) {
    for (int l = 0; l < m; ++l) {
      gram(k, l) = (rho_.matrix() * alg_.basis()[k].adjoint() * alg_.basis()[l]).trace();
    }
  }
  EigenSystem es = hermitian_eig(hermitize(gram), tol);
  double min_eig = es.eigenvalues(0);
  double max_eig = es.eigenvalues(m - 1);
  if (min_eig <= 0.0) {
    throw NonFaithfulError("gns projection: basis Gram matrix is not positive definite "
                           "(smallest eigenvalue " +
                           std::to_string(min_eig) + ")");
  }
  condition_ = max_eig / min_eig;
  gram_inverse_ = es.eigenvectors * es.eigenvalues.cwiseInverse().asDiagonal() *
                  es.eigenvectors.adjoint();
}

Matrix gns_project(const GnsProjection& gp, const Matrix& x) {
  if (x.rows() != gp.dim() || x.cols() != gp.dim()) {
    throw DimensionMismatchError("gns_project: operand dimension mismatch");
  }
  const auto& basis = gp.algebra().basis();
  const int m = gp.algebra().dim();
  CplxVector moments(m);
  for (int l = 0; l < m; ++l) {
    moments(l) = (gp.rho().matrix() * basis[l].adjoint() * x).trace();
  }
  CplxVector coeffs = gp.gram_inverse() * moments;
  Matrix out = Matrix::Zero(gp.dim(), gp.dim());
  for (int k = 0; k < m; ++k) {
    out += coeffs(k) * basis[k];
  }
  return out;
}

FlagResidual is_real(const GnsProjection& gp, const Tolerances& tol) {
  const int n = gp.dim();
  FlagResidual out;
  Matrix unit = Matrix::Zero(n, n);
  for (int b = 0; b < n; ++b) {
    for (int a = 0; a < n; ++a) {
      unit(a, b) = 1.0;
      Matrix of_adjoint = gns_project(gp, unit.adjoint());
      Matrix adjoint_of = gns_project(gp, unit).adjoint();
      out.max_residual = std::max(out.max_residual, hs_norm(of_adjoint - adjoint_of));
      unit(a, b) = 0.0;
    }
  }
  out.flag = out.max_residual < tol.gns_flag;
  return out;
}

FlagResidual delta_invariance(const DensityMatrix& rho, const Subalgebra& alg,
                              const Tolerances& tol) {
  if (rho.dim() != alg.ambient_dim()) {
    throw DimensionMismatchError("delta_invariance: dimension mismatch");
  }
  if (!rho.faithful(tol)) {
    throw NonFaithfulError("delta_invariance requires a faithful state");
  }
  Matrix rho_inv = rho.power(-1.0, tol);
  FlagResidual out;
  for (const Matrix& b : alg.basis()) {
    double residual = span_relative_residual(alg.basis(), rho.matrix() * b * rho_inv);
    out.max_residual = std::max(out.max_residual, residual);
  }
  out.flag = out.max_residual < tol.gns_flag;
  return out;
}

ConditionalExpectationDiagnostics is_conditional_expectation(const GnsProjection& gp,
                                                             const Tolerances& tol) {
  ConditionalExpectationDiagnostics out;
  CounterRng rng(kProbeSeed);
  for (int trial = 0; trial < kProbeTrials; ++trial) {
    Matrix a = random_algebra_element(gp.algebra(), rng);
    Matrix b = random_algebra_element(gp.algebra(), rng);
    Matrix x = random_ambient_element(gp.dim(), rng);
    Matrix px = gns_project(gp, x);
    out.module_residual = std::max(out.module_residual,
                                   hs_norm(gns_project(gp, a * x * b) - a * px * b));
    Matrix schwarz = gns_project(gp, x.adjoint() * x) - px.adjoint() * px;
    Matrix schwarz_herm = hermitize(schwarz);
    EigenSystem es = hermitian_eig(HermitianMatrix::average(schwarz_herm), tol);
    double violation = std::max(0.0, -es.eigenvalues(0)) + hs_norm(schwarz - schwarz_herm);
    out.schwarz_violation = std::max(out.schwarz_violation, violation);
  }
  Superoperator projector =
      Superoperator::from_map(gp.dim(), [&gp](const Matrix& x) { return gns_project(gp, x); });
  Matrix choi = projector.choi();
  Matrix choi_herm = hermitize(choi);
  EigenSystem es = hermitian_eig(HermitianMatrix::average(choi_herm), tol);
  out.choi_violation = std::max(0.0, -es.eigenvalues(0)) + hs_norm(choi - choi_herm);
  out.flag = out.module_residual < tol.gns_flag && out.schwarz_violation < tol.gns_flag &&
             out.choi_violation < tol.gns_flag;
  return out;
}

ModularAgreement modular_agreement(const DensityMatrix& rho, const Subalgebra& alg,
                                   const Tolerances& tol) {
  FlagResidual invariance = delta_invariance(rho, alg, tol);
  if (!invariance.flag) {
    throw NotInvariantError("modular_agreement: the algebra is not modular-invariant "
                            "(residual " +
                            std::to_string(invariance.max_residual) + ")");
  }
  RecoveryContext ctx(rho, alg, tol);
  Matrix rho_inv = rho.power(-1.0, tol);
  Matrix red_inv = ctx.rho_reduced().power(-1.0, tol);
  const Matrix& red = ctx.rho_reduced().matrix();
  ModularAgreement out;
  for (const Matrix& b : alg.basis()) {
    out.modular_residual = std::max(
        out.modular_residual, hs_norm(rho.matrix() * b * rho_inv - red * b * red_inv));
    out.fixed_residual = std::max(out.fixed_residual, hs_norm(accardi_cecchini(ctx, b) - b));
  }
  return out;
}

}  // namespace qdpi
