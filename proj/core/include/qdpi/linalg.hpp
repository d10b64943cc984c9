#pragma once

#include <optional>
#include <vector>

#include "qdpi/errors.hpp"
#include "qdpi/types.hpp"

namespace qdpi {

/// (X + X*)/2.
Matrix hermitize(const Matrix& x);

/// Validated Hermitian carrier.  Construction checks ||M - M*|| against
/// tol.hermiticity * ||M|| and throws NotHermitianError on failure.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(Matrix m, const Tolerances& tol = {});
  /// Symmetrizes instead of validating; for cleaning known roundoff only.
  static HermitianMatrix average(const Matrix& m);

  const Matrix& matrix() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

 private:
  struct Unchecked {};
  HermitianMatrix(Matrix m, Unchecked) : mat_(std::move(m)) {}
  Matrix mat_;
};

/// Spectral decomposition of a Hermitian matrix.  Eigenvalues ascend and the
/// eigenvector columns are orthonormal; H = V diag(w) V*.
struct EigenSystem {
  RealVector eigenvalues;
  Matrix eigenvectors;
};

/// Throws NotHermitianError on bad input and ConvergenceError when the
/// reconstruction residual exceeds tol.eig_residual * ||H||.
EigenSystem hermitian_eig(const Matrix& h, const Tolerances& tol = {});
EigenSystem hermitian_eig(const HermitianMatrix& h, const Tolerances& tol = {});

/// Scalar function applied through the spectral theorem.
class SpectralFunction {
 public:
  static SpectralFunction log();
  static SpectralFunction sqrt();
  static SpectralFunction inverse();
  static SpectralFunction power(double exponent);

  double operator()(double x) const;
  /// True when the function diverges at 0 (log, inverse, negative powers);
  /// such functions follow the pseudo-inverse rule on truncated eigenvalues.
  bool singular_at_zero() const { return singular_; }

 private:
  enum class Kind { Log, Sqrt, Inverse, Power };
  SpectralFunction(Kind k, double e, bool s) : kind_(k), exponent_(e), singular_(s) {}
  Kind kind_;
  double exponent_;
  bool singular_;
};

struct MatrixFunctionResult {
  Matrix value;
  /// Number of eigenvalues zeroed by the pseudo-inverse rule.
  int truncated = 0;
};

/// f(H) by functional calculus.  Eigenvalues with |w| <= threshold are mapped
/// to 0; `threshold` defaults to tol.pinv_rel * max|w|.  For functions that
/// are singular at 0, a zero threshold combined with a non-positive spectrum
/// raises SingularInputError.
MatrixFunctionResult matrix_function(const EigenSystem& es, const SpectralFunction& f,
                                     std::optional<double> threshold = std::nullopt,
                                     const Tolerances& tol = {});
MatrixFunctionResult matrix_function(const HermitianMatrix& h, const SpectralFunction& f,
                                     std::optional<double> threshold = std::nullopt,
                                     const Tolerances& tol = {});

struct Norms {
  double op = 0.0;  ///< largest singular value
  double hs = 0.0;  ///< Frobenius
  double tr = 0.0;  ///< sum of singular values
};

/// All three norms from one singular value decomposition.
Norms norms(const Matrix& x);
double operator_norm(const Matrix& x);
double trace_norm(const Matrix& x);
/// Frobenius norm (no decomposition needed).
inline double hs_norm(const Matrix& x) { return x.norm(); }

/// Hilbert-Schmidt inner product <A, B> = Tr[A* B].
inline Cplx hs_inner(const Matrix& a, const Matrix& b) {
  return (a.adjoint() * b).trace();
}

/// Kronecker product with index convention (i1, i2) -> i1 * d2 + i2.
Matrix tensor_product(const Matrix& a, const Matrix& b);

enum class Factor { First, Second };

/// Partial trace of an operator on C^{d1} (x) C^{d2} over the named factor.
Matrix partial_trace(const Matrix& x, int d1, int d2, Factor which);

/// Partial trace over the middle factor of C^{d1} (x) C^{d2} (x) C^{d3}.
Matrix partial_trace_middle(const Matrix& x, int d1, int d2, int d3);

/// Column-major vectorization and its inverse.
CplxVector vec(const Matrix& x);
Matrix unvec(const CplxVector& v, int rows, int cols);

/// Linear map on matrices, stored as its dim^2 x dim^2 matrix acting on
/// column-major vectorizations.  The Hilbert-Schmidt adjoint is the conjugate
/// transpose of that matrix.
class Superoperator {
 public:
  Superoperator(Matrix mat, int dim);
  /// Samples `f` on all matrix units.
  template <typename F>
  static Superoperator from_map(int dim, F&& f) {
    Matrix m(dim * dim, dim * dim);
    Matrix unit = Matrix::Zero(dim, dim);
    for (int b = 0; b < dim; ++b) {
      for (int a = 0; a < dim; ++a) {
        unit(a, b) = 1.0;
        m.col(b * dim + a) = vec(f(std::as_const(unit)));
        unit(a, b) = 0.0;
      }
    }
    return Superoperator(std::move(m), dim);
  }
  static Superoperator identity(int dim);

  Matrix apply(const Matrix& x) const;
  Superoperator adjoint() const;
  Superoperator compose(const Superoperator& rhs) const;  // this after rhs
  /// Choi matrix sum_{ab} E_ab (x) Phi(E_ab).
  Matrix choi() const;
  double operator_norm() const;

  const Matrix& matrix() const { return mat_; }
  int dim() const { return dim_; }

 private:
  Matrix mat_;
  int dim_;
};

/// HS-orthonormal basis of the span of `mats`, by a rank-revealing
/// decomposition of the stacked vectorizations.  Singular values below
/// rel_tol * (largest singular value) are truncated.
std::vector<Matrix> orthonormalize_span(const std::vector<Matrix>& mats, double rel_tol);

/// Relative residual of x after projection onto an HS-orthonormal basis:
/// ||x - P(x)|| / ||x||.  Returns 0 for x = 0.
double span_relative_residual(const std::vector<Matrix>& basis, const Matrix& x);

/// Orthonormal columns spanning the column space of a (rank-revealing).
Matrix orthonormal_columns(const Matrix& a, double rel_tol);
/// Orthonormal columns spanning the orthogonal complement of span(v) inside
/// the ambient space of v's rows; v must have orthonormal columns.
Matrix orthogonal_complement(const Matrix& v);
/// Intersection of two spans given by orthonormal columns, computed through
/// the orthogonal complement of the union of their complements.
Matrix span_intersection(const Matrix& u, const Matrix& v, double rel_tol);

}  // namespace qdpi
