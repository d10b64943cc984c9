#pragma once

#include "qdpi/algebra.hpp"
#include "qdpi/states.hpp"
#include "qdpi/types.hpp"

namespace qdpi {

/// Orthogonal projection onto a subalgebra for the state inner product
/// <X, Y> = Tr[rho X* Y].  Unlike the trace-compatible expectation, this
/// projection is a genuine conditional expectation only when the algebra is
/// invariant under X -> rho X rho^{-1}; the checks below probe exactly that
/// dichotomy.
class GnsProjection {
 public:
  GnsProjection(DensityMatrix rho, Subalgebra alg, const Tolerances& tol = {});

  const DensityMatrix& rho() const { return rho_; }
  const Subalgebra& algebra() const { return alg_; }
  const Matrix& gram_inverse() const { return gram_inverse_; }
  /// Condition number of the basis Gram matrix; above ~1e12 results carry a
  /// warning (reported by the CLI), not an error.
  double gram_condition() const { return condition_; }
  int dim() const { return rho_.dim(); }

 private:
  DensityMatrix rho_;
  Subalgebra alg_;
  Matrix gram_inverse_;
  double condition_ = 0.0;
};

/// P(X) = sum_kl B_k (G^{-1})_{kl} Tr[rho B_l* X]; fixes the algebra, is
/// idempotent, and preserves the rho-expectation.
Matrix gns_project(const GnsProjection& gp, const Matrix& x);

struct FlagResidual {
  bool flag = false;
  double max_residual = 0.0;
};

/// Does the projection preserve self-adjointness?  Max violation of
/// P(X*) = P(X)* over the matrix-unit basis; flag at tol.gns_flag.
FlagResidual is_real(const GnsProjection& gp, const Tolerances& tol = {});

/// Is the algebra invariant under X -> rho X rho^{-1}?  Span residual per
/// basis element; flag at tol.gns_flag.  Equivalent to is_real by the
/// realness theorem, which the tests assert.
FlagResidual delta_invariance(const DensityMatrix& rho, const Subalgebra& alg,
                              const Tolerances& tol = {});

/// Probes the conditional-expectation property directly: the module
/// identity P(A X B) = A P(X) B on seeded random draws, the Schwarz
/// inequality P(X*X) >= P(X)*P(X), and complete positivity through the Choi
/// matrix (anti-Hermitian Choi mass counts as violation).  The overall flag
/// must agree with is_real and delta_invariance on every instance.
struct ConditionalExpectationDiagnostics {
  double module_residual = 0.0;
  double schwarz_violation = 0.0;
  double choi_violation = 0.0;
  bool flag = false;
};

ConditionalExpectationDiagnostics is_conditional_expectation(const GnsProjection& gp,
                                                             const Tolerances& tol = {});

/// When the algebra is modular-invariant (checked precondition), the modular
/// conjugations of the state and of its projection agree on the algebra, and
/// the observable-level recovery map fixes the algebra pointwise.
struct ModularAgreement {
  /// max_A || rho A rho^{-1} - rho_N A rho_N^{-1} ||_HS over the basis
  double modular_residual = 0.0;
  /// max_A || A_rho(A) - A ||_HS over the basis
  double fixed_residual = 0.0;
};

ModularAgreement modular_agreement(const DensityMatrix& rho, const Subalgebra& alg,
                                   const Tolerances& tol = {});

}  // namespace qdpi
