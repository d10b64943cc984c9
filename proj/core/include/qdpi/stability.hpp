#pragma once

#include <array>
#include <numbers>
#include <string_view>

#include "qdpi/recovery.hpp"
#include "qdpi/types.hpp"

namespace qdpi {

/// Constants of the quartic stability bounds.
inline constexpr double kQuarterPiFourth =
    (std::numbers::pi / 4.0) * (std::numbers::pi / 4.0) * (std::numbers::pi / 4.0) *
    (std::numbers::pi / 4.0);
inline constexpr double kEighthPiFourth =
    (std::numbers::pi / 8.0) * (std::numbers::pi / 8.0) * (std::numbers::pi / 8.0) *
    (std::numbers::pi / 8.0);

/// Entropy lost by coarse-graining: S(rho||sigma) - S(rho_N||sigma_N).
/// Nonnegative by the data processing inequality; throws SupportViolation
/// when either relative entropy is infinite.
double dpi_gap(const DensityMatrix& rho, const DensityMatrix& sigma, const Subalgebra& alg,
               const Tolerances& tol = {});

/// Every intermediate quantity the bounds are assembled from, kept in the
/// report so consumers can recompute each bound offline.
struct BoundInputs {
  double delta_norm = 0.0;              ///< ||Delta_{sigma,rho}|| = max(sigma)/min(rho)
  double rho_inv_norm = 0.0;            ///< 1/min(rho)
  double rho_reduced_norm = 0.0;        ///< max eigenvalue of rho_N
  double sigma_reduced_inv_norm = 0.0;  ///< 1/min eigenvalue of sigma_N
  PetzResiduals residuals;
  double recovered_fidelity = 0.0;  ///< F(sigma, R_rho(sigma_N))
};

struct BoundEntry {
  std::string_view id;
  double value = 0.0;  ///< lower bound on the gap
  double slack = 0.0;  ///< gap - value; nonnegative when the bound holds
};

inline constexpr int kBoundCount = 7;
/// Stable report and CSV order.
inline constexpr std::array<std::string_view, kBoundCount> kBoundIds = {
    "rem5a", "rem5b", "rem5c", "rem5a2", "rem5b2", "rem5c2", "fidelity"};

/// Bound evaluation for one (rho, sigma, algebra) instance.
///
/// The support-violation sentinel: when supp(rho) leaks outside supp(sigma)
/// the full relative entropy is infinite, every lower bound holds vacuously,
/// and `gap_infinite` is set. The tag is the source of truth; `gap` and the
/// slack fields then hold 0 placeholders and serializers must emit "inf".
/// The reduced entropy is always finite here because evaluation requires a
/// faithful sigma_N.
struct BoundReport {
  RelEntropy full_entropy;     ///< S(rho||sigma), tagged
  RelEntropy reduced_entropy;  ///< S(rho_N||sigma_N), finite
  bool gap_infinite = false;
  double gap = 0.0;  ///< nats; meaningful only when !gap_infinite
  BoundInputs inputs;
  std::array<BoundEntry, kBoundCount> bounds;

  const BoundEntry& find(std::string_view id) const;
  /// Minimum slack over all bounds; +infinity when the gap is infinite.
  double min_slack() const;
};

/// Evaluates the full family of quartic lower bounds on the gap:
///   rem5a    = c4 |Delta|^-2 (eqcase_hs)^4
///   rem5b    = c8 |Delta|^-2 (petz_trace)^4
///   rem5c    = c8 |rho^-1|^-2 (petz_trace)^4
///   rem5a2   = c4 |Delta|^-2 |rho_N|^-2 |sigma_N^-1|^-2 (eqcase_symm_hs)^4
///   rem5b2   = c8 |Delta|^-2 |rho_N|^-2 |sigma_N^-1|^-2 (symm_trace)^4
///   rem5c2   = c8 |rho^-1|^-2 |sigma_N^-1|^-2 (symm_trace)^4
///   fidelity = c4 |Delta|^-2 (1 - sqrt F(sigma, R_rho(sigma_N)))^4
/// with c4 = (pi/4)^4 and c8 = (pi/8)^4, all from one shared residual
/// evaluation. rho must be faithful (the recovery map needs rho^-1/2) and
/// sigma_N must be faithful; sigma itself may be rank deficient, which
/// raises the support-violation tag instead of failing.
BoundReport evaluate_bounds(const RecoveryContext& rho_ctx, const DensityMatrix& sigma,
                            const Tolerances& tol = {});
BoundReport evaluate_bounds(const RecoveryContext& rho_ctx, const RecoveryContext& sigma_ctx,
                            const Tolerances& tol = {});
BoundReport evaluate_bounds(const DensityMatrix& rho, const DensityMatrix& sigma,
                            const Subalgebra& alg, const Tolerances& tol = {});

/// Comparison ||X*X - Y*Y||_1 <= 2 ||X - Y||_2, valid whenever both sides
/// are Hilbert-Schmidt normalized (checked, NotNormalized otherwise).
struct HsTraceCheck {
  double lhs = 0.0;
  double rhs = 0.0;
};

HsTraceCheck hs_to_trace_check(const Matrix& x, const Matrix& y, const Tolerances& tol = {});

/// Gap and recovery residuals of a pair in both role orders, with the
/// equality-case classification at tol.equality_gap nats. Both states must
/// be faithful since each serves as the recovery anchor once.
struct EqualityDiagnostics {
  double gap = 0.0;           ///< S(rho||sigma) - S(rho_N||sigma_N)
  double gap_reversed = 0.0;  ///< S(sigma||rho) - S(sigma_N||rho_N)
  PetzResiduals residuals;
  bool is_equality_case = false;
  bool is_equality_case_reversed = false;
};

EqualityDiagnostics equality_diagnostics(const DensityMatrix& rho, const DensityMatrix& sigma,
                                         const Subalgebra& alg, const Tolerances& tol = {});

}  // namespace qdpi
