#pragma once

#include <vector>

#include "qdpi/recovery.hpp"

namespace qdpi {

/// Fixed-point algebra of the observable-level channel Psi attached to a
/// recovery context: the largest subalgebra of `alg` on which no information
/// is lost.  Extracted as the eigenvalue-1 eigenspace of the vectorized map
/// (an n^2 x n^2 dense problem, the memory high-water mark of the library),
/// intersected with the algebra span, verified to close as an algebra, and
/// cross-checked against the ergodic (Cesaro) average of the channel.
/// Throws StructureInconsistency when the two routes disagree.
Subalgebra fixed_point_algebra(const RecoveryContext& ctx, const Tolerances& tol = {});

/// Block decomposition of the state induced by the fixed-point algebra: on
/// each minimal central block the state factors as gamma_j (x) rho_block_j,
/// and the same gamma_j appear in every state the recovery channel fixes.
struct FixedPointStructure {
  Subalgebra fixed;           ///< the fixed-point algebra
  FactorDecomposition decomp; ///< its block decomposition
  /// Left-factor states gamma_j (trace over the right factor, normalized).
  std::vector<DensityMatrix> gammas;
  /// Same construction from the projected state; agrees with `gammas`
  /// through the conditional expectation.
  std::vector<DensityMatrix> gammas_reduced;
  /// Unnormalized right-factor compressions (trace over the left factor);
  /// trace of each equals the block weight.
  std::vector<Matrix> rho_blocks;
  std::vector<double> weights;  ///< Tr[P_j rho]
  /// Trace-norm defects of the factored reconstructions of rho and its
  /// projection, and of the expectation compatibility of the two gamma
  /// families.
  double reconstruction_residual = 0.0;
  double reduced_reconstruction_residual = 0.0;
  double expectation_compat_residual = 0.0;
};

FixedPointStructure build_structure(const RecoveryContext& ctx, std::uint64_t seed,
                                    const Tolerances& tol = {});

/// Conditional expectation onto the fixed-point algebra:
/// Y -> sum_j 1 (x) Tr_left[(gamma_j (x) 1) P_j Y P_j].  Idempotent, fixes
/// the algebra, self-adjoint for the GNS inner product of rho, and preserves
/// the rho-expectation.
Matrix conditional_expectation_fixed(const FixedPointStructure& fps, const Matrix& y);

/// Its state-level (Hilbert-Schmidt) adjoint tau -> sum_j gamma_j (x)
/// Tr_left(P_j tau P_j); fixes exactly the states the recovery channel
/// fixes.
DensityMatrix dual_expectation_state(const FixedPointStructure& fps, const DensityMatrix& tau,
                                     const Tolerances& tol = {});

/// Complete parametrization of the states sigma with zero coarse-graining
/// gap against rho: sigma = sum_j weight_j gamma_j (x) block_state_j.
DensityMatrix build_equality_state(const FixedPointStructure& fps,
                                   const std::vector<DensityMatrix>& block_states,
                                   const std::vector<double>& weights,
                                   const Tolerances& tol = {});

/// Checks that a subalgebra of `alg` that is invariant under the modular
/// conjugation X -> rho X rho^{-1} (a checked precondition) is contained in
/// the fixed-point algebra; the containment always holds, so a false return
/// signals a numerical breakdown worth investigating.
bool largest_invariant_check(const RecoveryContext& ctx, const Subalgebra& candidate,
                             const Subalgebra& fixed, const Tolerances& tol = {});
bool largest_invariant_check(const RecoveryContext& ctx, const Subalgebra& candidate,
                             const Tolerances& tol = {});

}  // namespace qdpi
