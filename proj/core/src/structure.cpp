#include "qdpi/structure.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "qdpi/errors.hpp"

namespace qdpi {

namespace {

/// Blocks carrying less state weight than this cannot arise from a faithful
/// state; hitting the threshold means the decomposition itself broke down.
constexpr double kMinBlockWeight = 1e-12;

Matrix stack_vectorized(const std::vector<Matrix>& mats) {
  Matrix out(mats.front().size(), static_cast<Eigen::Index>(mats.size()));
  for (std::size_t k = 0; k < mats.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = vec(mats[k]);
  }
  return out;
}

double largest_singular_value(const Matrix& a) {
  if (a.cols() == 0) {
    return 0.0;
  }
  return Eigen::JacobiSVD<Matrix>(a).singularValues()(0);
}

double smallest_singular_value(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1);
}

int ambient_of(const FixedPointStructure& fps) {
  return static_cast<int>(fps.decomp.blocks.front().isometry.rows());
}

}  // namespace

Subalgebra fixed_point_algebra(const RecoveryContext& ctx, const Tolerances& tol) {
  const int n = ctx.dim();
  const int nn = n * n;
  Superoperator psi = psi_map(ctx);
  const double psi_norm = psi.operator_norm();
  const double cut = tol.fixed_point_rel * std::max(psi_norm, 1.0);

  Matrix shifted = psi.matrix() - Matrix::Identity(nn, nn);
  Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int null_dim = 0;
  while (null_dim < nn && sv(nn - 1 - null_dim) <= cut) {
    ++null_dim;
  }
  if (null_dim == 0) {
    throw StructureInconsistencyError(
        "fixed_point_algebra: the channel has no fixed directions, yet it must fix the unit");
  }
  Matrix fixed_dirs = svd.matrixV().rightCols(null_dim);

  Matrix alg_stack = stack_vectorized(ctx.algebra().basis());
  Matrix inter = span_intersection(fixed_dirs, alg_stack, tol.rank_truncation);
  if (inter.cols() == 0) {
    throw StructureInconsistencyError(
        "fixed_point_algebra: fixed directions do not meet the algebra span");
  }
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(inter.cols()));
  for (Eigen::Index k = 0; k < inter.cols(); ++k) {
    basis.push_back(unvec(inter.col(k), n, n));
  }
  Subalgebra fixed = [&]() {
    try {
      return Subalgebra::from_basis(std::move(basis), tol);
    } catch (const ValidationError& e) {
      throw StructureInconsistencyError(
          std::string("fixed_point_algebra: the fixed-point space does not close as an "
                      "algebra: ") +
          e.what());
    }
  }();

  // Ergodic cross-check: the long-run average of the channel must act as the
  // identity exactly on the extracted space.  Powers are accumulated by
  // doubling, S_{2N} = S_N + P_N S_N.
  Matrix avg = psi.matrix();
  Matrix power = psi.matrix();
  int terms = 1;
  while (terms < tol.cesaro_terms) {
    avg = avg + power * avg;
    power = power * power;
    terms *= 2;
  }
  avg /= static_cast<double>(terms);
  Matrix drift = avg - Matrix::Identity(nn, nn);

  Matrix fixed_stack = stack_vectorized(fixed.basis());
  double fixed_drift = largest_singular_value(drift * fixed_stack);
  if (fixed_drift > tol.cesaro_agreement) {
    throw StructureInconsistencyError(
        "fixed_point_algebra: ergodic average moves a fixed direction by " +
        std::to_string(fixed_drift));
  }
  Matrix residual = alg_stack - fixed_stack * (fixed_stack.adjoint() * alg_stack);
  Matrix complement = orthonormal_columns(residual, tol.rank_truncation);
  if (complement.cols() > 0) {
    double complement_drift = smallest_singular_value(drift * complement);
    if (complement_drift < tol.cesaro_agreement) {
      throw StructureInconsistencyError(
          "fixed_point_algebra: ergodic average nearly fixes a direction outside the "
          "extracted space (drift " +
          std::to_string(complement_drift) + ")");
    }
  }
  return fixed;
}

FixedPointStructure build_structure(const RecoveryContext& ctx, std::uint64_t seed,
                                    const Tolerances& tol) {
  Subalgebra fixed = fixed_point_algebra(ctx, tol);
  FactorDecomposition decomp = factor_decomposition(fixed, seed, tol);
  FixedPointStructure out{std::move(fixed), std::move(decomp), {}, {}, {}, {}, 0.0, 0.0, 0.0};

  const int n = ctx.dim();
  const Matrix& rho = ctx.rho().matrix();
  const Matrix& rho_red = ctx.rho_reduced().matrix();
  Matrix recon = Matrix::Zero(n, n);
  Matrix recon_red = Matrix::Zero(n, n);
  for (const FactorBlock& blk : out.decomp.blocks) {
    Matrix comp = compress_to_block(blk, rho);
    double weight = comp.trace().real();
    if (weight < kMinBlockWeight) {
      throw StructureInconsistencyError("build_structure: block weight " +
                                        std::to_string(weight) +
                                        " vanished for a faithful state");
    }
    Matrix gamma = hermitize(partial_trace(comp, blk.d_left, blk.d_right, Factor::Second)) / weight;
    Matrix right = partial_trace(comp, blk.d_left, blk.d_right, Factor::First);
    recon += blk.isometry * tensor_product(gamma, right) * blk.isometry.adjoint();

    Matrix comp_red = compress_to_block(blk, rho_red);
    double weight_red = comp_red.trace().real();
    if (weight_red < kMinBlockWeight) {
      throw StructureInconsistencyError("build_structure: projected block weight vanished");
    }
    Matrix gamma_red =
        hermitize(partial_trace(comp_red, blk.d_left, blk.d_right, Factor::Second)) / weight_red;
    Matrix right_red = partial_trace(comp_red, blk.d_left, blk.d_right, Factor::First);
    recon_red += blk.isometry * tensor_product(gamma_red, right_red) * blk.isometry.adjoint();

    Matrix unit_r = Matrix::Identity(blk.d_right, blk.d_right);
    Matrix compat_lhs = conditional_expectation_tau(
        ctx.algebra(), blk.isometry * tensor_product(gamma, unit_r) * blk.isometry.adjoint());
    Matrix compat_rhs = blk.isometry * tensor_product(gamma_red, unit_r) * blk.isometry.adjoint();
    out.expectation_compat_residual =
        std::max(out.expectation_compat_residual, hs_norm(compat_lhs - compat_rhs));

    out.gammas.push_back(DensityMatrix::from_matrix(gamma, tol));
    out.gammas_reduced.push_back(DensityMatrix::from_matrix(gamma_red, tol));
    out.rho_blocks.push_back(std::move(right));
    out.weights.push_back(weight);
  }
  out.reconstruction_residual = trace_norm(recon - rho);
  out.reduced_reconstruction_residual = trace_norm(recon_red - rho_red);
  if (out.reconstruction_residual > tol.factor_structure ||
      out.reduced_reconstruction_residual > tol.factor_structure ||
      out.expectation_compat_residual > tol.factor_structure) {
    throw StructureInconsistencyError(
        "build_structure: factored reconstruction missed the state (residuals " +
        std::to_string(out.reconstruction_residual) + ", " +
        std::to_string(out.reduced_reconstruction_residual) + ", " +
        std::to_string(out.expectation_compat_residual) + ")");
  }
  return out;
}

Matrix conditional_expectation_fixed(const FixedPointStructure& fps, const Matrix& y) {
  const int n = ambient_of(fps);
  if (y.rows() != n || y.cols() != n) {
    throw DimensionMismatchError("conditional_expectation_fixed: operand dimension mismatch");
  }
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < fps.decomp.blocks.size(); ++j) {
    const FactorBlock& blk = fps.decomp.blocks[j];
    Matrix comp = compress_to_block(blk, y);
    Matrix weighted =
        tensor_product(fps.gammas[j].matrix(), Matrix::Identity(blk.d_right, blk.d_right)) *
        comp;
    Matrix trace_left = partial_trace(weighted, blk.d_left, blk.d_right, Factor::First);
    out += blk.isometry *
           tensor_product(Matrix::Identity(blk.d_left, blk.d_left), trace_left) *
           blk.isometry.adjoint();
  }
  return out;
}

DensityMatrix dual_expectation_state(const FixedPointStructure& fps, const DensityMatrix& tau,
                                     const Tolerances& tol) {
  const int n = ambient_of(fps);
  if (tau.dim() != n) {
    throw DimensionMismatchError("dual_expectation_state: state dimension mismatch");
  }
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < fps.decomp.blocks.size(); ++j) {
    const FactorBlock& blk = fps.decomp.blocks[j];
    Matrix comp = compress_to_block(blk, tau.matrix());
    Matrix trace_left = partial_trace(comp, blk.d_left, blk.d_right, Factor::First);
    out += blk.isometry * tensor_product(fps.gammas[j].matrix(), trace_left) *
           blk.isometry.adjoint();
  }
  return DensityMatrix::from_matrix(hermitize(out), tol);
}

DensityMatrix build_equality_state(const FixedPointStructure& fps,
                                   const std::vector<DensityMatrix>& block_states,
                                   const std::vector<double>& weights, const Tolerances& tol) {
  const std::size_t blocks = fps.decomp.blocks.size();
  if (block_states.size() != blocks || weights.size() != blocks) {
    throw DimensionMismatchError("build_equality_state: expected one state and one weight per "
                                 "block (" +
                                 std::to_string(blocks) + " blocks)");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) {
      throw BadWeightsError("build_equality_state: negative weight " + std::to_string(w));
    }
    total += w;
  }
  if (std::abs(total - 1.0) > tol.unit_norm) {
    throw BadWeightsError("build_equality_state: weights sum to " + std::to_string(total));
  }
  const int n = ambient_of(fps);
  Matrix out = Matrix::Zero(n, n);
  for (std::size_t j = 0; j < blocks; ++j) {
    const FactorBlock& blk = fps.decomp.blocks[j];
    if (block_states[j].dim() != blk.d_right) {
      throw DimensionMismatchError("build_equality_state: block " + std::to_string(j) +
                                   " expects dimension " + std::to_string(blk.d_right) +
                                   ", got " + std::to_string(block_states[j].dim()));
    }
    out += weights[j] * blk.isometry *
           tensor_product(fps.gammas[j].matrix(), block_states[j].matrix()) *
           blk.isometry.adjoint();
  }
  return DensityMatrix::from_matrix(hermitize(out), tol);
}

bool largest_invariant_check(const RecoveryContext& ctx, const Subalgebra& candidate,
                             const Subalgebra& fixed, const Tolerances& tol) {
  if (candidate.ambient_dim() != ctx.dim()) {
    throw DimensionMismatchError("largest_invariant_check: ambient dimension mismatch");
  }
  Matrix rho_inv = ctx.rho().power(-1.0, tol);
  const Matrix& rho = ctx.rho().matrix();
  for (const Matrix& b : candidate.basis()) {
    if (ctx.algebra().span_residual(b) > tol.span_membership) {
      throw NotInAlgebraError(
          "largest_invariant_check: candidate is not contained in the context algebra");
    }
    double invariance = span_relative_residual(candidate.basis(), rho * b * rho_inv);
    if (invariance > tol.invariant_span) {
      throw NotInvariantError(
          "largest_invariant_check: candidate is not modular-invariant (residual " +
          std::to_string(invariance) + ")");
    }
  }
  for (const Matrix& b : candidate.basis()) {
    if (fixed.span_residual(b) > tol.invariant_span) {
      return false;
    }
  }
  return true;
}

bool largest_invariant_check(const RecoveryContext& ctx, const Subalgebra& candidate,
                             const Tolerances& tol) {
  return largest_invariant_check(ctx, candidate, fixed_point_algebra(ctx, tol), tol);
}

}  // namespace qdpi
