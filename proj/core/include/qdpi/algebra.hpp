#pragma once

#include <cstdint>
#include <vector>

#include "qdpi/linalg.hpp"
#include "qdpi/types.hpp"

namespace qdpi {

/// Residuals of the structural checks a subalgebra basis must satisfy.
struct AlgebraVerification {
  double orthonormality = 0.0;   ///< max |<B_k, B_l> - delta_kl|
  double unit_membership = 0.0;  ///< span residual of the normalized identity
  double adjoint_closure = 0.0;  ///< max relative span residual of B_k*
  double product_closure = 0.0;  ///< max relative span residual of B_k B_l
  bool ok = false;
};

/// Unital *-subalgebra of the n x n matrices, carried as an HS-orthonormal
/// basis of its span.  Construction verifies the algebra invariants.
class Subalgebra {
 public:
  static Subalgebra from_basis(std::vector<Matrix> basis, const Tolerances& tol = {});
  static Subalgebra full(int n);
  static Subalgebra diagonal(int n);
  /// M_{d1} (x) 1 (Factor::First) or 1 (x) M_{d2} (Factor::Second), acting on
  /// C^{d1 d2} with index convention (i1, i2) -> i1 * d2 + i2.
  static Subalgebra tensor_factor(int d1, int d2, Factor which);

  const std::vector<Matrix>& basis() const { return basis_; }
  int ambient_dim() const { return ambient_; }
  int dim() const { return static_cast<int>(basis_.size()); }

  /// Relative distance of x from the span.
  double span_residual(const Matrix& x) const { return span_relative_residual(basis_, x); }
  bool contains(const Matrix& x, const Tolerances& tol = {}) const {
    return span_residual(x) <= tol.span_membership;
  }

 private:
  Subalgebra(std::vector<Matrix> basis, int ambient) : basis_(std::move(basis)), ambient_(ambient) {}
  std::vector<Matrix> basis_;
  int ambient_ = 0;
};

AlgebraVerification verify_algebra(const std::vector<Matrix>& basis, const Tolerances& tol = {});

/// Smallest unital *-subalgebra containing the generators: alternates adjoint
/// and pairwise-product closure with HS re-orthonormalization until the
/// dimension stabilizes.
Subalgebra close_generators(int n, const std::vector<Matrix>& generators,
                            const Tolerances& tol = {});

/// Trace-compatible conditional expectation: HS-orthogonal projection onto
/// the algebra.  Preserves trace, hermiticity, and positivity.
Matrix conditional_expectation_tau(const Subalgebra& alg, const Matrix& x);

/// Commutant {Z : ZB = BZ for all B in the algebra}.
Subalgebra commutant(const Subalgebra& alg, const Tolerances& tol = {});

/// Center = algebra intersected with its commutant.
Subalgebra center_of(const Subalgebra& alg, const Tolerances& tol = {});

/// One central block of a factor decomposition: P is the minimal central
/// projection, V : C^{d_left} (x) C^{d_right} -> range(P) an isometry under
/// which every algebra element becomes 1_{d_left} (x) A.
struct FactorBlock {
  Matrix projection;
  Matrix isometry;
  int d_left = 0;
  int d_right = 0;
};

struct FactorDecomposition {
  std::vector<FactorBlock> blocks;
  /// Largest residual among the structural checks performed at build time.
  double max_structure_residual = 0.0;
};

/// Decomposes the ambient space along the minimal central projections of the
/// algebra.  Randomized (seeded) choice of generic elements; retries on
/// degenerate draws and throws DegenerateRandomElementError when exhausted.
FactorDecomposition factor_decomposition(const Subalgebra& alg, std::uint64_t seed,
                                         const Tolerances& tol = {});

/// Compression V* X V of an ambient operator into block coordinates.
Matrix compress_to_block(const FactorBlock& block, const Matrix& x);

}  // namespace qdpi
