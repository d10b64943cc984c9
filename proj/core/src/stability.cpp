#include "qdpi/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qdpi/errors.hpp"

namespace qdpi {

namespace {

double pow4(double x) {
  double sq = x * x;
  return sq * sq;
}

double finite_relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                               const Tolerances& tol, const char* where) {
  RelEntropy s = relative_entropy(rho, sigma, tol);
  if (s.infinite) {
    throw SupportViolationError(std::string(where) + ": relative entropy is infinite (mass " +
                                std::to_string(s.support_leak) +
                                " outside the reference support)");
  }
  return s.nats;
}

DensityMatrix project_onto(const Subalgebra& alg, const DensityMatrix& rho,
                           const Tolerances& tol) {
  return DensityMatrix::from_matrix(hermitize(conditional_expectation_tau(alg, rho.matrix())),
                                    tol);
}

}  // namespace

double dpi_gap(const DensityMatrix& rho, const DensityMatrix& sigma, const Subalgebra& alg,
               const Tolerances& tol) {
  if (rho.dim() != sigma.dim() || rho.dim() != alg.ambient_dim()) {
    throw DimensionMismatchError("dpi_gap: states and algebra must share one dimension");
  }
  double upper = finite_relative_entropy(rho, sigma, tol, "dpi_gap");
  double lower = finite_relative_entropy(project_onto(alg, rho, tol),
                                         project_onto(alg, sigma, tol), tol, "dpi_gap");
  return upper - lower;
}

const BoundEntry& BoundReport::find(std::string_view id) const {
  for (const BoundEntry& entry : bounds) {
    if (entry.id == id) {
      return entry;
    }
  }
  throw std::out_of_range("unknown bound id: " + std::string(id));
}

double BoundReport::min_slack() const {
  if (gap_infinite) {
    return std::numeric_limits<double>::infinity();
  }
  double out = bounds[0].slack;
  for (const BoundEntry& entry : bounds) {
    out = std::min(out, entry.slack);
  }
  return out;
}

BoundReport evaluate_bounds(const RecoveryContext& rho_ctx, const DensityMatrix& sigma,
                            const Tolerances& tol) {
  if (sigma.dim() != rho_ctx.dim()) {
    throw DimensionMismatchError("evaluate_bounds: sigma dimension does not match context");
  }
  DensityMatrix sigma_reduced = project_onto(rho_ctx.algebra(), sigma, tol);
  if (!sigma_reduced.faithful(tol)) {
    // With a singular projection both entropies are infinite, so the gap is an
    // undefined difference rather than a tagged +inf; report it as a support
    // failure instead of a bound record.
    throw SupportViolationError(
        "evaluate_bounds: the projection of sigma onto the algebra is singular, so the "
        "gap and the symmetrized bounds are undefined");
  }

  BoundReport report;
  report.full_entropy = relative_entropy(rho_ctx.rho(), sigma, tol);
  report.reduced_entropy = relative_entropy(rho_ctx.rho_reduced(), sigma_reduced, tol);
  if (report.reduced_entropy.infinite) {
    throw SupportViolationError(
        "evaluate_bounds: reduced relative entropy infinite despite faithful sigma_N");
  }
  report.gap_infinite = report.full_entropy.infinite;
  report.gap =
      report.gap_infinite ? 0.0 : report.full_entropy.nats - report.reduced_entropy.nats;

  BoundInputs& in = report.inputs;
  in.delta_norm = sigma.max_eigenvalue() / rho_ctx.rho().min_eigenvalue();
  in.rho_inv_norm = 1.0 / rho_ctx.rho().min_eigenvalue();
  in.rho_reduced_norm = rho_ctx.rho_reduced().max_eigenvalue();
  in.sigma_reduced_inv_norm = 1.0 / sigma_reduced.min_eigenvalue();
  in.residuals = petz_residuals(rho_ctx, sigma, tol);
  in.recovered_fidelity = fidelity(sigma, petz_recovery(rho_ctx, sigma_reduced, tol), tol);

  const double c4 = kQuarterPiFourth;
  const double c8 = kEighthPiFourth;
  const double delta_sq = in.delta_norm * in.delta_norm;
  const double rho_inv_sq = in.rho_inv_norm * in.rho_inv_norm;
  const double symm_scale_sq = delta_sq * in.rho_reduced_norm * in.rho_reduced_norm *
                               in.sigma_reduced_inv_norm * in.sigma_reduced_inv_norm;
  // Roundoff can push the fidelity of a perfect recovery a hair above 1.
  const double fid_defect = std::max(0.0, 1.0 - std::sqrt(in.recovered_fidelity));

  const std::array<double, kBoundCount> values = {
      c4 / delta_sq * pow4(in.residuals.eqcase_hs_residual),
      c8 / delta_sq * pow4(in.residuals.petz_trace_residual),
      c8 / rho_inv_sq * pow4(in.residuals.petz_trace_residual),
      c4 / symm_scale_sq * pow4(in.residuals.eqcase_symm_hs_residual),
      c8 / symm_scale_sq * pow4(in.residuals.symm_trace_residual),
      c8 / (rho_inv_sq * in.sigma_reduced_inv_norm * in.sigma_reduced_inv_norm) *
          pow4(in.residuals.symm_trace_residual),
      c4 / delta_sq * pow4(fid_defect),
  };
  for (int k = 0; k < kBoundCount; ++k) {
    double slack = report.gap_infinite ? 0.0 : report.gap - values[k];
    report.bounds[k] = BoundEntry{kBoundIds[k], values[k], slack};
  }
  return report;
}

BoundReport evaluate_bounds(const RecoveryContext& rho_ctx, const RecoveryContext& sigma_ctx,
                            const Tolerances& tol) {
  return evaluate_bounds(rho_ctx, sigma_ctx.rho(), tol);
}

BoundReport evaluate_bounds(const DensityMatrix& rho, const DensityMatrix& sigma,
                            const Subalgebra& alg, const Tolerances& tol) {
  RecoveryContext rho_ctx(rho, alg, tol);
  return evaluate_bounds(rho_ctx, sigma, tol);
}

HsTraceCheck hs_to_trace_check(const Matrix& x, const Matrix& y, const Tolerances& tol) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw DimensionMismatchError("hs_to_trace_check: operands must share a shape");
  }
  double xn = x.squaredNorm();
  double yn = y.squaredNorm();
  if (std::abs(xn - 1.0) > tol.unit_norm || std::abs(yn - 1.0) > tol.unit_norm) {
    throw NotNormalizedError("hs_to_trace_check: operands must be Hilbert-Schmidt normalized "
                             "(squared norms " +
                             std::to_string(xn) + ", " + std::to_string(yn) + ")");
  }
  HsTraceCheck out;
  out.lhs = trace_norm(x.adjoint() * x - y.adjoint() * y);
  out.rhs = 2.0 * hs_norm(x - y);
  return out;
}

EqualityDiagnostics equality_diagnostics(const DensityMatrix& rho, const DensityMatrix& sigma,
                                         const Subalgebra& alg, const Tolerances& tol) {
  RecoveryContext rho_ctx(rho, alg, tol);
  RecoveryContext sigma_ctx(sigma, alg, tol);
  EqualityDiagnostics out;
  out.gap = finite_relative_entropy(rho, sigma, tol, "equality_diagnostics") -
            finite_relative_entropy(rho_ctx.rho_reduced(), sigma_ctx.rho_reduced(), tol,
                                    "equality_diagnostics");
  out.gap_reversed = finite_relative_entropy(sigma, rho, tol, "equality_diagnostics") -
                     finite_relative_entropy(sigma_ctx.rho_reduced(), rho_ctx.rho_reduced(),
                                             tol, "equality_diagnostics");
  out.residuals = petz_residuals(rho_ctx, sigma_ctx);
  out.is_equality_case = std::abs(out.gap) < tol.equality_gap;
  out.is_equality_case_reversed = std::abs(out.gap_reversed) < tol.equality_gap;
  return out;
}

}  // namespace qdpi
