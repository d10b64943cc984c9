#pragma once

#include "qdpi/algebra.hpp"
#include "qdpi/states.hpp"
#include "qdpi/types.hpp"

namespace qdpi {

/// Coarse-graining context: a faithful state together with a subalgebra and
/// the spectral caches every recovery operation needs (half powers of the
/// state and of its projection onto the algebra).  Immutable after
/// construction; operations taking a context are pure and thread-safe.
class RecoveryContext {
 public:
  RecoveryContext(DensityMatrix rho, Subalgebra alg, const Tolerances& tol = {});

  const DensityMatrix& rho() const { return rho_; }
  const Subalgebra& algebra() const { return alg_; }
  /// Projection of the state onto the algebra (its coarse-graining).
  const DensityMatrix& rho_reduced() const { return reduced_; }
  const Matrix& rho_sqrt() const { return rho_sqrt_; }
  const Matrix& rho_inv_sqrt() const { return rho_inv_sqrt_; }
  const Matrix& rho_reduced_sqrt() const { return reduced_sqrt_; }
  const Matrix& rho_reduced_inv_sqrt() const { return reduced_inv_sqrt_; }
  int dim() const { return rho_.dim(); }

 private:
  DensityMatrix rho_;
  Subalgebra alg_;
  DensityMatrix reduced_;
  Matrix rho_sqrt_;
  Matrix rho_inv_sqrt_;
  Matrix reduced_sqrt_;
  Matrix reduced_inv_sqrt_;
};

/// Observable-level coarse-graining dual to the state recovery map:
/// X -> rho_N^{-1/2} E_tau(rho^{1/2} X rho^{1/2}) rho_N^{-1/2}.
/// Unital, completely positive, lands in the algebra, and preserves the
/// expectation against rho.
Matrix accardi_cecchini(const RecoveryContext& ctx, const Matrix& x);

/// Raw recovery product rho^{1/2} rho_N^{-1/2} gamma rho_N^{-1/2} rho^{1/2}
/// without hermitization or membership checks; building block for residuals
/// and superoperators.
Matrix petz_recovery_matrix(const RecoveryContext& ctx, const Matrix& gamma);

/// State-level recovery map applied to a density matrix in the algebra.
/// The output is hermitized; a trace drift at most tol.trace_renorm is
/// renormalized away (reported through `trace_drift` when given), anything
/// larger throws.  Recovers rho exactly from its own coarse-graining.
DensityMatrix petz_recovery(const RecoveryContext& ctx, const DensityMatrix& gamma,
                            const Tolerances& tol = {}, double* trace_drift = nullptr);

/// Isometric embedding U(X) = E_tau(X) rho_N^{-1/2} rho^{1/2} and its
/// Hilbert-Schmidt adjoint U*(Y) = E_tau(Y rho^{1/2}) rho_N^{-1/2}.
/// U is isometric on the algebra, U*U = E_tau, and U maps rho_N^{1/2} to
/// rho^{1/2}.
Matrix embedding_u(const RecoveryContext& ctx, const Matrix& x);
Matrix embedding_u_adjoint(const RecoveryContext& ctx, const Matrix& y);

/// Relative modular operators of a state pair at full and coarse-grained
/// resolution, built once so resolvent sweeps reuse the eigendecompositions.
struct ModularPair {
  RelativeModular full;     ///< Delta_{sigma, rho}
  RelativeModular reduced;  ///< Delta_{sigma_N, rho_N}
};

ModularPair make_modular_pair(const RecoveryContext& rho_ctx, const RecoveryContext& sigma_ctx,
                              const Tolerances& tol = {});
/// sigma may be rank deficient; only its projection onto the algebra has to
/// be faithful.
ModularPair make_modular_pair(const RecoveryContext& rho_ctx, const DensityMatrix& sigma,
                              const Tolerances& tol = {});

/// Resolvent-difference vector
///   w_t = U (t + Delta_{sigma_N, rho_N})^{-1} (rho_N^{1/2})
///         - (t + Delta_{sigma, rho})^{-1} (rho^{1/2}),
/// the quantity whose squared norms integrate to the entropy gap.
Matrix w_vector(const RecoveryContext& rho_ctx, const ModularPair& pair, double t);
Matrix w_vector(const RecoveryContext& rho_ctx, const DensityMatrix& sigma, double t,
                const Tolerances& tol = {});

/// Residuals of the recovery equations for a state pair, all zero exactly
/// when the coarse-graining loses no relative entropy.
struct PetzResiduals {
  /// || R_rho(sigma_N) - sigma ||_1
  double petz_trace_residual = 0.0;
  /// || R_sigma(rho_N) - rho ||_1
  double symm_trace_residual = 0.0;
  /// || sigma_N^{1/2} rho_N^{-1/2} rho^{1/2} - sigma^{1/2} ||_2
  double eqcase_hs_residual = 0.0;
  /// || rho_N^{1/2} sigma_N^{-1/2} sigma^{1/2} - rho^{1/2} ||_2
  double eqcase_symm_hs_residual = 0.0;
};

/// Both contexts must be built over the same algebra.
PetzResiduals petz_residuals(const RecoveryContext& rho_ctx, const RecoveryContext& sigma_ctx);
/// As above with sigma given as a bare state: sigma may be rank deficient
/// (none of the residuals invert it), but its projection must be faithful.
PetzResiduals petz_residuals(const RecoveryContext& rho_ctx, const DensityMatrix& sigma,
                             const Tolerances& tol = {});

/// State-level channel Phi = R_rho . E_tau (trace preserving, fixes rho) and
/// its observable-level Hilbert-Schmidt adjoint Psi (unital), as explicit
/// matrices on the vectorized space.
Superoperator phi_map(const RecoveryContext& ctx);
Superoperator psi_map(const RecoveryContext& ctx);

}  // namespace qdpi
