#include "qdpi/recovery.hpp"

#include <cmath>
#include <string>

#include "qdpi/errors.hpp"

namespace qdpi {

namespace {

void check_dim(const RecoveryContext& ctx, const Matrix& x, const char* where) {
  if (x.rows() != ctx.dim() || x.cols() != ctx.dim()) {
    throw DimensionMismatchError(std::string(where) + ": operand is " +
                                 std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                                 ", context dimension is " + std::to_string(ctx.dim()));
  }
}

void check_same_algebra(const RecoveryContext& a, const RecoveryContext& b, const char* where) {
  if (a.dim() != b.dim() || a.algebra().dim() != b.algebra().dim()) {
    throw DimensionMismatchError(std::string(where) +
                                 ": contexts were built over different algebras");
  }
}

DensityMatrix project_state(const DensityMatrix& rho, const Subalgebra& alg,
                            const Tolerances& tol) {
  if (rho.dim() != alg.ambient_dim()) {
    throw DimensionMismatchError("recovery context: state dimension " +
                                 std::to_string(rho.dim()) + " != algebra ambient dimension " +
                                 std::to_string(alg.ambient_dim()));
  }
  if (!rho.faithful(tol)) {
    throw NonFaithfulError("recovery context requires a faithful state; smallest eigenvalue " +
                           std::to_string(rho.min_eigenvalue()));
  }
  return DensityMatrix::from_matrix(hermitize(conditional_expectation_tau(alg, rho.matrix())),
                                    tol);
}

/// Spectral data of a comparison state that enters only through nonnegative
/// powers of itself and through its (faithful) projection.
struct SigmaCaches {
  DensityMatrix reduced;
  Matrix sqrt;
  Matrix reduced_sqrt;
  Matrix reduced_inv_sqrt;
};

SigmaCaches sigma_caches(const RecoveryContext& rho_ctx, const DensityMatrix& sigma,
                         const Tolerances& tol) {
  if (sigma.dim() != rho_ctx.dim()) {
    throw DimensionMismatchError("comparison state dimension " + std::to_string(sigma.dim()) +
                                 " != context dimension " + std::to_string(rho_ctx.dim()));
  }
  DensityMatrix reduced = DensityMatrix::from_matrix(
      hermitize(conditional_expectation_tau(rho_ctx.algebra(), sigma.matrix())), tol);
  if (!reduced.faithful(tol)) {
    throw SupportViolationError(
        "the comparison state may be rank deficient, but its projection onto the algebra "
        "must stay faithful; smallest eigenvalue " +
        std::to_string(reduced.min_eigenvalue()));
  }
  SigmaCaches out{std::move(reduced), sigma.power(0.5, tol), Matrix(), Matrix()};
  out.reduced_sqrt = out.reduced.power(0.5, tol);
  out.reduced_inv_sqrt = out.reduced.power(-0.5, tol);
  return out;
}

}  // namespace

RecoveryContext::RecoveryContext(DensityMatrix rho, Subalgebra alg, const Tolerances& tol)
    : rho_(std::move(rho)), alg_(std::move(alg)), reduced_(project_state(rho_, alg_, tol)) {
  // The projection averages the spectrum, so faithfulness is inherited; a
  // failure here means the expectation itself broke down.
  if (!reduced_.faithful(tol)) {
    throw NonFaithfulError("projected state lost faithfulness; smallest eigenvalue " +
                           std::to_string(reduced_.min_eigenvalue()));
  }
  rho_sqrt_ = rho_.power(0.5, tol);
  rho_inv_sqrt_ = rho_.power(-0.5, tol);
  reduced_sqrt_ = reduced_.power(0.5, tol);
  reduced_inv_sqrt_ = reduced_.power(-0.5, tol);
}

Matrix accardi_cecchini(const RecoveryContext& ctx, const Matrix& x) {
  check_dim(ctx, x, "accardi_cecchini");
  Matrix mid = conditional_expectation_tau(ctx.algebra(), ctx.rho_sqrt() * x * ctx.rho_sqrt());
  return ctx.rho_reduced_inv_sqrt() * mid * ctx.rho_reduced_inv_sqrt();
}

Matrix petz_recovery_matrix(const RecoveryContext& ctx, const Matrix& gamma) {
  check_dim(ctx, gamma, "petz_recovery");
  Matrix half = ctx.rho_sqrt() * ctx.rho_reduced_inv_sqrt();
  return half * gamma * half.adjoint();
}

DensityMatrix petz_recovery(const RecoveryContext& ctx, const DensityMatrix& gamma,
                            const Tolerances& tol, double* trace_drift) {
  double membership = ctx.algebra().span_residual(gamma.matrix());
  if (membership > tol.recovery_membership) {
    throw NotInAlgebraError("petz_recovery: input state lies outside the algebra span "
                            "(relative residual " +
                            std::to_string(membership) + ")");
  }
  Matrix out = hermitize(petz_recovery_matrix(ctx, gamma.matrix()));
  double trace = out.trace().real();
  double drift = std::abs(trace - 1.0);
  if (trace_drift != nullptr) {
    *trace_drift = drift;
  }
  if (drift > tol.trace_renorm) {
    throw ConvergenceError("petz_recovery: output trace drifted by " + std::to_string(drift) +
                           ", beyond the renormalization budget");
  }
  return DensityMatrix::from_matrix(out / trace, tol);
}

Matrix embedding_u(const RecoveryContext& ctx, const Matrix& x) {
  check_dim(ctx, x, "embedding_u");
  return conditional_expectation_tau(ctx.algebra(), x) * ctx.rho_reduced_inv_sqrt() *
         ctx.rho_sqrt();
}

Matrix embedding_u_adjoint(const RecoveryContext& ctx, const Matrix& y) {
  check_dim(ctx, y, "embedding_u_adjoint");
  return conditional_expectation_tau(ctx.algebra(), y * ctx.rho_sqrt()) *
         ctx.rho_reduced_inv_sqrt();
}

ModularPair make_modular_pair(const RecoveryContext& rho_ctx, const RecoveryContext& sigma_ctx,
                              const Tolerances& tol) {
  check_same_algebra(rho_ctx, sigma_ctx, "make_modular_pair");
  return ModularPair{RelativeModular(sigma_ctx.rho(), rho_ctx.rho(), tol),
                     RelativeModular(sigma_ctx.rho_reduced(), rho_ctx.rho_reduced(), tol)};
}

Matrix w_vector(const RecoveryContext& rho_ctx, const ModularPair& pair, double t) {
  Matrix coarse = pair.reduced.resolvent(rho_ctx.rho_reduced_sqrt(), t);
  return embedding_u(rho_ctx, coarse) - pair.full.resolvent(rho_ctx.rho_sqrt(), t);
}

ModularPair make_modular_pair(const RecoveryContext& rho_ctx, const DensityMatrix& sigma,
                              const Tolerances& tol) {
  SigmaCaches s = sigma_caches(rho_ctx, sigma, tol);
  return ModularPair{RelativeModular(sigma, rho_ctx.rho(), tol),
                     RelativeModular(s.reduced, rho_ctx.rho_reduced(), tol)};
}

Matrix w_vector(const RecoveryContext& rho_ctx, const DensityMatrix& sigma, double t,
                const Tolerances& tol) {
  return w_vector(rho_ctx, make_modular_pair(rho_ctx, sigma, tol), t);
}

PetzResiduals petz_residuals(const RecoveryContext& rho_ctx, const RecoveryContext& sigma_ctx) {
  check_same_algebra(rho_ctx, sigma_ctx, "petz_residuals");
  PetzResiduals out;
  Matrix recovered_sigma =
      hermitize(petz_recovery_matrix(rho_ctx, sigma_ctx.rho_reduced().matrix()));
  out.petz_trace_residual = trace_norm(recovered_sigma - sigma_ctx.rho().matrix());
  Matrix recovered_rho =
      hermitize(petz_recovery_matrix(sigma_ctx, rho_ctx.rho_reduced().matrix()));
  out.symm_trace_residual = trace_norm(recovered_rho - rho_ctx.rho().matrix());
  out.eqcase_hs_residual = hs_norm(sigma_ctx.rho_reduced_sqrt() * rho_ctx.rho_reduced_inv_sqrt() *
                                       rho_ctx.rho_sqrt() -
                                   sigma_ctx.rho_sqrt());
  out.eqcase_symm_hs_residual =
      hs_norm(rho_ctx.rho_reduced_sqrt() * sigma_ctx.rho_reduced_inv_sqrt() *
                  sigma_ctx.rho_sqrt() -
              rho_ctx.rho_sqrt());
  return out;
}

PetzResiduals petz_residuals(const RecoveryContext& rho_ctx, const DensityMatrix& sigma,
                             const Tolerances& tol) {
  SigmaCaches s = sigma_caches(rho_ctx, sigma, tol);
  PetzResiduals out;
  Matrix recovered_sigma = hermitize(petz_recovery_matrix(rho_ctx, s.reduced.matrix()));
  out.petz_trace_residual = trace_norm(recovered_sigma - sigma.matrix());
  Matrix half = s.sqrt * s.reduced_inv_sqrt;
  Matrix recovered_rho = hermitize(half * rho_ctx.rho_reduced().matrix() * half.adjoint());
  out.symm_trace_residual = trace_norm(recovered_rho - rho_ctx.rho().matrix());
  out.eqcase_hs_residual = hs_norm(s.reduced_sqrt * rho_ctx.rho_reduced_inv_sqrt() *
                                       rho_ctx.rho_sqrt() -
                                   s.sqrt);
  out.eqcase_symm_hs_residual =
      hs_norm(rho_ctx.rho_reduced_sqrt() * s.reduced_inv_sqrt * s.sqrt - rho_ctx.rho_sqrt());
  return out;
}

Superoperator phi_map(const RecoveryContext& ctx) {
  return Superoperator::from_map(ctx.dim(), [&ctx](const Matrix& x) {
    return petz_recovery_matrix(ctx, conditional_expectation_tau(ctx.algebra(), x));
  });
}

Superoperator psi_map(const RecoveryContext& ctx) {
  return Superoperator::from_map(ctx.dim(),
                                 [&ctx](const Matrix& x) { return accardi_cecchini(ctx, x); });
}

}  // namespace qdpi
