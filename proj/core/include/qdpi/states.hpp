#pragma once

#include <cstdint>

#include "qdpi/linalg.hpp"
#include "qdpi/quadrature.hpp"
#include "qdpi/types.hpp"

namespace qdpi {

/// Density matrix: Hermitian, positive semidefinite within tolerance, unit
/// trace.  The spectral decomposition is computed at construction and shared
/// by the entropy routines.
class DensityMatrix {
 public:
  static DensityMatrix from_matrix(const Matrix& m, const Tolerances& tol = {});

  const Matrix& matrix() const { return mat_; }
  const EigenSystem& eig() const { return eig_; }
  int dim() const { return static_cast<int>(mat_.rows()); }
  double min_eigenvalue() const { return eig_.eigenvalues(0); }
  double max_eigenvalue() const { return eig_.eigenvalues(eig_.eigenvalues.size() - 1); }
  bool faithful(const Tolerances& tol = {}) const { return min_eigenvalue() > tol.faithfulness; }

  /// Spectral powers with the pseudo-inverse rule for negative exponents.
  Matrix power(double exponent, const Tolerances& tol = {}) const;
  Matrix sqrt_matrix(const Tolerances& tol = {}) const { return power(0.5, tol); }

 private:
  DensityMatrix(Matrix m, EigenSystem es) : mat_(std::move(m)), eig_(std::move(es)) {}
  Matrix mat_;
  EigenSystem eig_;
};

/// Ginibre-induced random density: G G* / Tr[G G*] with G an n x rank matrix
/// of independent complex standard normal entries drawn column-major from the
/// counter stream of `seed`.  rank = n gives an almost surely faithful state.
DensityMatrix random_density(int n, int rank, std::uint64_t seed, const Tolerances& tol = {});

/// Von Neumann entropy in nats; eigenvalues under the pseudo-inverse cut
/// contribute zero.
double von_neumann_entropy(const DensityMatrix& rho, const Tolerances& tol = {});

/// Relative entropy in nats.  `infinite` is the support sentinel: set when
/// rho has mass outside the support of sigma, in which case `nats` is
/// meaningless and `support_leak` carries the offending mass.
struct RelEntropy {
  double nats = 0.0;
  bool infinite = false;
  double support_leak = 0.0;
};

RelEntropy relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                            const Tolerances& tol = {});

/// Joint spectral data of a state pair: eigenvalues of both states plus the
/// squared eigenvector overlaps, computed once and reused by the
/// quasi-entropy and resolvent routines.
struct StatePairSpectrum {
  RealVector rho_eigs;
  RealVector sigma_eigs;
  Matrix rho_vecs;
  Matrix sigma_vecs;
  /// overlap(i, j) = |<sigma eigenvector i | rho eigenvector j>|^2
  Eigen::MatrixXd overlap;
};

StatePairSpectrum make_state_pair(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Quasi-entropy for f(x) = 1/(t + x) against the relative modular operator
/// of (sigma, rho): sum_ij overlap(i,j) r_j^2 / (t r_j + s_i).
double quasi_entropy_t(const StatePairSpectrum& pair, double t);
double quasi_entropy_t(const DensityMatrix& rho, const DensityMatrix& sigma, double t);

/// General spectral-function quasi-entropy sum_ij overlap(i,j) f(s_i/r_j) r_j;
/// requires a faithful rho.
double quasi_entropy_f(const StatePairSpectrum& pair, const SpectralFunction& f);

/// Integral representation of the relative entropy: integrates the
/// quasi-entropy gap over t in (0, inf) through the substitution
/// t = u / (1 - u) with composite Gauss-Legendre panels on (0, 1).
QuadratureResult integral_log_check(const DensityMatrix& rho, const DensityMatrix& sigma,
                                    const Tolerances& tol = {});

/// Uhlmann fidelity F = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma, const Tolerances& tol = {});

/// Trace distance ||rho - sigma||_1.
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma,
                      const Tolerances& tol = {});

/// GNS inner product <X, Y>_rho = Tr[rho X* Y].
Cplx gns_inner(const Matrix& rho, const Matrix& x, const Matrix& y);

/// KMS inner product <X, Y>_rho = Tr[rho^{1/2} X* rho^{1/2} Y].
Cplx kms_inner(const DensityMatrix& rho, const Matrix& x, const Matrix& y,
               const Tolerances& tol = {});

/// Relative modular operator X -> sigma X rho^{-1} of a faithful pair,
/// together with its fractional powers and resolvents, all through the joint
/// eigenbasis expansion.
class RelativeModular {
 public:
  RelativeModular(const DensityMatrix& sigma, const DensityMatrix& rho,
                  const Tolerances& tol = {});

  Matrix apply(const Matrix& x) const;
  /// sigma^p X rho^{-p}
  Matrix apply_power(const Matrix& x, double p) const;
  /// (t + Delta)^{-1} X for t > 0
  Matrix resolvent(const Matrix& x, double t) const;
  /// Operator norm lambda_max(sigma) / lambda_min(rho).
  double norm() const { return norm_; }

 private:
  EigenSystem sigma_eig_;
  EigenSystem rho_eig_;
  double norm_ = 0.0;
};

}  // namespace qdpi
