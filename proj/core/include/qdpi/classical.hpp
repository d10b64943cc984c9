#pragma once

#include <vector>

#include "qdpi/states.hpp"
#include "qdpi/types.hpp"

namespace qdpi {

/// Finite probability space with a partition of the outcomes and a strictly
/// positive density pair; the exact classical counterpart of a state pair
/// with a commutative coarse-graining.  All logarithms are natural.
class ClassicalModel {
 public:
  /// `partition` must consist of disjoint cells covering {0..size-1}; both
  /// densities must be strictly positive and sum to one.
  static ClassicalModel create(std::vector<std::vector<int>> partition, RealVector rho,
                               RealVector sigma, const Tolerances& tol = {});

  int omega_size() const { return static_cast<int>(rho_.size()); }
  int cell_count() const { return static_cast<int>(partition_.size()); }
  const std::vector<std::vector<int>>& partition() const { return partition_; }
  const RealVector& rho() const { return rho_; }
  const RealVector& sigma() const { return sigma_; }
  int cell_of(int omega) const { return cell_of_[static_cast<std::size_t>(omega)]; }
  /// Cell marginals of a pointwise density.
  RealVector cell_masses(const RealVector& density) const;

 private:
  ClassicalModel(std::vector<std::vector<int>> partition, RealVector rho, RealVector sigma,
                 std::vector<int> cell_of)
      : partition_(std::move(partition)),
        rho_(std::move(rho)),
        sigma_(std::move(sigma)),
        cell_of_(std::move(cell_of)) {}
  std::vector<std::vector<int>> partition_;
  RealVector rho_;
  RealVector sigma_;
  std::vector<int> cell_of_;
};

/// Kullback-Leibler divergence of strictly positive vectors of equal size.
double classical_kl(const RealVector& p, const RealVector& q);

/// Decomposition of the divergence along the partition:
///   S(rho||sigma) = S(cells) + sum_x rho(x) KL(f(.|x) || g(.|x))
/// with f, g the conditional densities within each cell.  The identity is
/// exact; `conditional_term` is the difference of the first two fields and
/// `conditional_term_direct` the independent conditional-KL sum.
struct ClassicalChain {
  double s_full = 0.0;
  double s_coarse = 0.0;
  double conditional_term = 0.0;
  double conditional_term_direct = 0.0;
};

ClassicalChain classical_chain(const ClassicalModel& model);

/// Which of the model's densities supplies the conditional weights of a
/// recovery.
enum class ModelDensity { Rho, Sigma };

/// Recovery of a pointwise density from a cell distribution: cell mass is
/// spread over the cell with the conditional weights of the chosen model
/// density.  Dual to the cell-averaging expectation; recovers the chosen
/// density from its own cell masses exactly.
RealVector classical_recovery(const ClassicalModel& model, const RealVector& cell_distribution,
                              ModelDensity conditioning = ModelDensity::Rho,
                              const Tolerances& tol = {});

/// Coarse-graining gap and its classical Pinsker lower bound:
///   gap = S(rho||sigma) - S(cells) = S(rho || recovered)
///   pinsker_rhs = (1/2) (sum |rho - recovered|)^2
/// where `recovered` spreads rho's cell masses with sigma's conditionals.
struct ClassicalPinskerGap {
  double gap = 0.0;
  double pinsker_rhs = 0.0;
  double recovery_l1 = 0.0;
};

ClassicalPinskerGap classical_pinsker_gap(const ClassicalModel& model);

/// Embeds the model diagonally (densities as diagonal states, the partition
/// as the commutative block algebra), runs the quantum pipeline on it, and
/// returns the largest discrepancy against the exact classical formulas.
double diagonal_oracle_check(const ClassicalModel& model, const Tolerances& tol = {});

/// State on a triple tensor product with every reduction precomputed.
/// One flattening rule, nested left to right:
/// (i1, i2, i3) -> (i1 d2 + i2) d3 + i3.
struct TripartiteState {
  int d1 = 0;
  int d2 = 0;
  int d3 = 0;
  DensityMatrix rho123;
  DensityMatrix rho12;
  DensityMatrix rho23;
  DensityMatrix rho13;
  DensityMatrix rho1;
  DensityMatrix rho2;
  DensityMatrix rho3;
};

TripartiteState make_tripartite(const DensityMatrix& rho123, int d1, int d2, int d3,
                                const Tolerances& tol = {});

/// Strong subadditivity diagnostics:
///   ssa_gap      = S(rho12) + S(rho23) - S(rho123) - S(rho2)  (>= 0)
///   mono_form_gap = S(rho123 || rho1 x rho23) - S(rho12 || rho1 x rho2),
///                   the same quantity as a monotonicity gap (identity)
///   improved_rhs = 2 max{S(rho1) - S(rho13), S(rho3) - S(rho13)}, a valid
///                  lower bound for ssa_gap.
struct SsaReport {
  double ssa_gap = 0.0;
  double mono_form_gap = 0.0;
  double improved_rhs = 0.0;
};

SsaReport ssa_suite(const TripartiteState& ts, const Tolerances& tol = {});

/// Conditional entropy S(rho12) - S(rho2) of a bipartite state.
double conditional_entropy(const DensityMatrix& rho12, int d1, int d2,
                           const Tolerances& tol = {});

/// The same functional extended 1-homogeneously to unnormalized positive
/// operators: -Tr[A log A] + Tr[A_2 log A_2].
double conditional_entropy_functional(const Matrix& a, int d1, int d2,
                                      const Tolerances& tol = {});

/// Concavity and homogeneity make the directional derivative of the
/// conditional entropy functional dominate the functional itself:
///   (d/dt) f(A + tB) at t=0+  >=  f(B).
/// The derivative is computed by central differences at two step sizes with
/// Richardson extrapolation; the scheme validates an inequality, so modest
/// step accuracy suffices.
struct DerivativeCheck {
  double lhs = 0.0;  ///< extrapolated derivative
  double rhs = 0.0;  ///< f(B)
};

DerivativeCheck homogeneity_derivative_check(const Matrix& a, const Matrix& b, int d1, int d2,
                                             const Tolerances& tol = {});

}  // namespace qdpi
