#include <doctest.h>

#include <cmath>

#include <qdpi/errors.hpp>
#include <qdpi/gns.hpp>
#include <qdpi/linalg.hpp>
#include <qdpi/recovery.hpp>
#include <qdpi/rng.hpp>
#include <qdpi/states.hpp>

#include "helpers.hpp"

using namespace qdpi;
using namespace qdpi::testing;

namespace {

DensityMatrix product_state() {
  Matrix r1(2, 2), r2(2, 2);
  r1 << 0.7, 0.1, 0.1, 0.3;
  r2 << 0.6, 0.2, 0.2, 0.4;
  return DensityMatrix::from_matrix(tensor_product(r1, r2));
}

Matrix random_matrix(int n, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      m(i, j) = rng.next_complex_gaussian();
    }
  }
  return m;
}

}  // namespace

TEST_CASE("state-weighted projection fixes the algebra and is idempotent") {
  const DensityMatrix rho = example_rho();
  const Subalgebra alg = Subalgebra::diagonal(2);
  const GnsProjection gp(rho, alg, {});

  CHECK(gp.gram_condition() >= 1.0);
  CHECK(gp.gram_condition() < 1e6);

  for (const Matrix& b : alg.basis()) {
    CHECK(mat_dist(gns_project(gp, b), b) < 1e-12);
  }

  const Matrix x = random_matrix(2, 17);
  const Matrix px = gns_project(gp, x);
  CHECK(alg.span_residual(px) < 1e-10);
  CHECK(mat_dist(gns_project(gp, px), px) < 1e-11);

  // Orthogonality in the rho-GNS sense: <A, X - P(X)>_rho = 0 for A in the
  // algebra, and the projection preserves the rho expectation.
  for (const Matrix& b : alg.basis()) {
    CHECK(std::abs(gns_inner(rho.matrix(), b, x - px)) < 1e-11);
  }
  CHECK(std::abs((rho.matrix() * (x - px)).trace()) < 1e-11);
}

TEST_CASE("realness, invariance, and expectation flags agree on the dichotomy") {
  // Tracial state: everything passes for any algebra.
  {
    const DensityMatrix rho = maximally_mixed(2);
    const Subalgebra alg = Subalgebra::diagonal(2);
    const GnsProjection gp(rho, alg, {});
    const FlagResidual real = is_real(gp, {});
    const FlagResidual inv = delta_invariance(rho, alg, {});
    const ConditionalExpectationDiagnostics ce = is_conditional_expectation(gp, {});
    CHECK(real.flag);
    CHECK(inv.flag);
    CHECK(ce.flag);
    CHECK(real.max_residual < 1e-12);
    CHECK(inv.max_residual < 1e-12);
    CHECK(ce.module_residual < 1e-10);
    CHECK(ce.schwarz_violation < 1e-10);
    CHECK(ce.choi_violation < 1e-10);
  }

  // Generic qubit state against the diagonal algebra: everything fails.
  {
    const DensityMatrix rho = example_rho();
    const Subalgebra alg = Subalgebra::diagonal(2);
    const GnsProjection gp(rho, alg, {});
    const FlagResidual real = is_real(gp, {});
    const FlagResidual inv = delta_invariance(rho, alg, {});
    const ConditionalExpectationDiagnostics ce = is_conditional_expectation(gp, {});
    CHECK_FALSE(real.flag);
    CHECK_FALSE(inv.flag);
    CHECK_FALSE(ce.flag);
    CHECK(real.max_residual > 1e-3);
    CHECK(inv.max_residual > 1e-3);
  }

  // Product state against its tensor factor: everything passes.
  {
    const DensityMatrix rho = product_state();
    const Subalgebra alg = Subalgebra::tensor_factor(2, 2, Factor::Second);
    const GnsProjection gp(rho, alg, {});
    CHECK(is_real(gp, {}).flag);
    CHECK(delta_invariance(rho, alg, {}).flag);
    CHECK(is_conditional_expectation(gp, {}).flag);
  }

  // Random ensemble: the three flags always agree pairwise.
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const int n = 2 + static_cast<int>(seed % 2) * 2;
    const DensityMatrix rho = (seed % 3 == 0)
                                  ? maximally_mixed(n)
                                  : random_faithful(n, 4000 + seed);
    const Subalgebra alg =
        n == 4 ? Subalgebra::tensor_factor(2, 2, Factor::Second) : Subalgebra::diagonal(n);
    const GnsProjection gp(rho, alg, {});
    const bool a = is_real(gp, {}).flag;
    const bool b = delta_invariance(rho, alg, {}).flag;
    const bool c = is_conditional_expectation(gp, {}).flag;
    CHECK(a == b);
    CHECK(b == c);
  }
}

TEST_CASE("block-diagonal states make the diagonal projection a true expectation") {
  // A state commuting with the algebra is the invariant case by inspection.
  Matrix d(3, 3);
  d.setZero();
  d.diagonal() << 0.5, 0.3, 0.2;
  const DensityMatrix rho = DensityMatrix::from_matrix(d);
  const Subalgebra alg = Subalgebra::diagonal(3);
  CHECK(delta_invariance(rho, alg, {}).flag);
  const GnsProjection gp(rho, alg, {});
  CHECK(is_real(gp, {}).flag);
  CHECK(is_conditional_expectation(gp, {}).flag);
}

TEST_CASE("modular agreement holds exactly in the invariant case") {
  const DensityMatrix rho = product_state();
  const Subalgebra alg = Subalgebra::tensor_factor(2, 2, Factor::Second);
  REQUIRE(delta_invariance(rho, alg, {}).flag);

  const ModularAgreement ma = modular_agreement(rho, alg, {});
  CHECK(ma.modular_residual < 1e-10);
  CHECK(ma.fixed_residual < 1e-10);

  // In the invariant case the coarse graining fixes the algebra pointwise.
  const RecoveryContext ctx(rho, alg, {});
  for (const Matrix& b : alg.basis()) {
    CHECK(mat_dist(accardi_cecchini(ctx, b), b) < 1e-10);
  }

  // The non-invariant case is a checked precondition.
  CHECK_THROWS_AS(modular_agreement(example_rho(), Subalgebra::diagonal(2), {}),
                  NotInvariantError);
}
