#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace qdpi {

using Cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using CplxVector = Eigen::VectorXcd;

/// Every threshold used by the library, collected in one record so numeric
/// policy lives in a single place.  Functions take this by const reference
/// and default to the values below; the CLI can override fields from a JSON
/// file.  All entropic quantities are in nats.
struct Tolerances {
  /// Hermiticity acceptance, relative to the operator norm.
  double hermiticity = 1e-12;
  /// Eigendecomposition reconstruction residual, relative to the norm.
  double eig_residual = 1e-12;
  /// Pseudo-inverse rule: eigenvalues at or below pinv_rel * lambda_max are
  /// treated as exact zeros by spectral functions that are singular at 0.
  double pinv_rel = 1e-12;
  /// A density matrix is faithful when its smallest eigenvalue exceeds this.
  double faithfulness = 1e-10;
  /// Relative entropy reports +infinity when the mass of rho outside the
  /// support of sigma exceeds this.
  double support_leak = 1e-10;
  /// Density matrix admission: trace drift and negative eigenvalue floor.
  double density_trace = 1e-12;
  double density_min_eig = -1e-12;
  /// Span membership: relative residual after projecting onto a basis.
  double span_membership = 1e-10;
  /// Looser membership gate for states fed to the recovery map, which may
  /// themselves be outputs of earlier projections.
  double recovery_membership = 1e-9;
  /// Rank decision when orthonormalizing a set of vectors (relative).
  double rank_truncation = 1e-10;
  /// Algebra invariant checks (orthonormality, closure, unit membership).
  double algebra_closure = 1e-10;
  /// Eigenvalue grouping threshold, relative to the spectral diameter.
  double eigenvalue_grouping = 1e-8;
  /// Factor decomposition structural residuals.
  double factor_structure = 1e-8;
  /// Retries for the randomized factor decomposition before giving up.
  int factor_retries = 8;
  /// Fixed-point extraction: singular values of (Psi - id) below
  /// fixed_point_rel * ||Psi|| select the eigenvalue-1 eigenspace.
  double fixed_point_rel = 1e-9;
  /// Span containment and modular-invariance acceptance in the fixed-point
  /// structure analysis.
  double invariant_span = 1e-8;
  /// Single cliff shared by the realness / invariance / conditional-
  /// expectation dichotomy: the underlying theorems are exact, so one
  /// threshold separates the two regimes.
  double gns_flag = 1e-9;
  /// Agreement between the fixed-point space and its ergodic-average check.
  double cesaro_agreement = 1e-6;
  /// Cesaro mean length used by that check.
  int cesaro_terms = 1024;
  /// Recovered states may be trace-renormalized when the drift is below this.
  double trace_renorm = 1e-8;
  /// Hilbert-Schmidt normalization acceptance where unit norm is required.
  double unit_norm = 1e-10;
  /// An instance counts as an equality case when the entropy gap (nats) is
  /// below this.
  double equality_gap = 1e-9;
  /// Lower bounds are reported as violated when slack drops below -this.
  double bound_slack = 1e-8;
  /// Quadrature: panels x nodes composite Gauss-Legendre on (0,1).
  int quadrature_panels = 64;
  int quadrature_nodes = 16;
  /// Diagnostic grid in t for resolvent identities: logarithmic from
  /// t_grid_min to t_grid_max with t_grid_points points.
  double t_grid_min = 1e-3;
  double t_grid_max = 1e3;
  int t_grid_points = 25;
};

}  // namespace qdpi
