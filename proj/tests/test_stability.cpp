#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include <qdpi/errors.hpp>
#include <qdpi/rng.hpp>
#include <qdpi/stability.hpp>

#include "helpers.hpp"

using namespace qdpi;
using namespace qdpi::testing;

namespace {

DensityMatrix correlated_qubit() {
  Matrix m(2, 2);
  m << 0.5, 0.25, 0.25, 0.5;
  return DensityMatrix::from_matrix(m);
}

}  // namespace

TEST_CASE("quartic constants are the fourth powers of pi over 4 and 8") {
  const double c4 = std::pow(std::numbers::pi / 4.0, 4.0);
  const double c8 = std::pow(std::numbers::pi / 8.0, 4.0);
  CHECK(std::abs(kQuarterPiFourth - c4) < 1e-16);
  CHECK(std::abs(kEighthPiFourth - c8) < 1e-16);
  CHECK(kQuarterPiFourth == doctest::Approx(0.38050426185157193).epsilon(1e-15));
  CHECK(kEighthPiFourth == doctest::Approx(0.023781516365723246).epsilon(1e-15));
  CHECK(kQuarterPiFourth == doctest::Approx(16.0 * kEighthPiFourth).epsilon(1e-15));
}

TEST_CASE("gap of the running example matches the frozen oracle") {
  const double gap = dpi_gap(example_rho(), maximally_mixed(2), Subalgebra::diagonal(2));
  CHECK(gap == doctest::Approx(kExampleGap).epsilon(1e-11));
  CHECK(gap == doctest::Approx(kExampleRelEntropy - kExampleReducedRel).epsilon(1e-11));

  // Zero gap when nothing is coarse grained away.
  CHECK(std::abs(dpi_gap(example_rho(), maximally_mixed(2), Subalgebra::full(2))) < 1e-12);
  // Zero gap when the pair already lives in the algebra.
  Matrix d1(2, 2), d2(2, 2);
  d1 << 0.7, 0, 0, 0.3;
  d2 << 0.4, 0, 0, 0.6;
  CHECK(std::abs(dpi_gap(DensityMatrix::from_matrix(d1), DensityMatrix::from_matrix(d2),
                         Subalgebra::diagonal(2))) < 1e-12);
}

TEST_CASE("bound report on the running example matches the frozen oracle") {
  const DensityMatrix rho = example_rho();
  const DensityMatrix sigma = maximally_mixed(2);
  const Subalgebra alg = Subalgebra::diagonal(2);
  const BoundReport rep = evaluate_bounds(rho, sigma, alg, {});

  CHECK_FALSE(rep.gap_infinite);
  CHECK(rep.full_entropy.nats == doctest::Approx(kExampleRelEntropy).epsilon(1e-12));
  CHECK(rep.reduced_entropy.nats == doctest::Approx(kExampleReducedRel).epsilon(1e-12));
  CHECK(rep.gap == doctest::Approx(kExampleGap).epsilon(1e-11));

  CHECK(rep.inputs.delta_norm == doctest::Approx(2.21103222500738).epsilon(1e-12));
  CHECK(rep.inputs.rho_inv_norm == doctest::Approx(4.42206445001476).epsilon(1e-12));
  CHECK(rep.inputs.rho_reduced_norm == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(rep.inputs.sigma_reduced_inv_norm == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(rep.inputs.recovered_fidelity == doctest::Approx(0.9830458915396474).epsilon(1e-12));

  CHECK(rep.find("rem5a").value == doctest::Approx(2.593253150343914e-05).epsilon(1e-10));
  CHECK(rep.find("rem5b").value == doctest::Approx(2.162055708920184e-05).epsilon(1e-10));
  CHECK(rep.find("rem5c").value == doctest::Approx(5.40513927230046e-06).epsilon(1e-10));
  CHECK(rep.find("rem5a2").value == doctest::Approx(6.468247341989961e-06).epsilon(1e-10));
  CHECK(rep.find("rem5b2").value == doctest::Approx(5.405139272300467e-06).epsilon(1e-10));
  CHECK(rep.find("rem5c2").value == doctest::Approx(7.60097710167253e-07).epsilon(1e-10));
  CHECK(rep.find("fidelity").value == doctest::Approx(4.088458193873096e-10).epsilon(1e-6));

  // Slack is gap minus value, bound by bound, and every bound holds here.
  for (const BoundEntry& b : rep.bounds) {
    CHECK(b.slack == doctest::Approx(rep.gap - b.value).epsilon(1e-13));
    CHECK(b.slack > 0.0);
  }
  CHECK(rep.min_slack() <= rep.gap);

  // All three evaluate_bounds overloads agree.
  const RecoveryContext rho_ctx(rho, alg, {});
  const BoundReport rep2 = evaluate_bounds(rho_ctx, sigma, {});
  const BoundReport rep3 = evaluate_bounds(rho_ctx, RecoveryContext(sigma, alg, {}), {});
  for (int i = 0; i < kBoundCount; ++i) {
    CHECK(rep.bounds[i].value == doctest::Approx(rep2.bounds[i].value).epsilon(1e-13));
    CHECK(rep.bounds[i].value == doctest::Approx(rep3.bounds[i].value).epsilon(1e-13));
  }
}

TEST_CASE("worked regression: classical correlation against the mixed state") {
  // rho has eigenvalues 3/4 and 1/4; sigma = I/2; diagonal coarse graining.
  // Everything in this chain has a closed form.
  const DensityMatrix rho = correlated_qubit();
  const DensityMatrix sigma = maximally_mixed(2);
  const BoundReport rep = evaluate_bounds(rho, sigma, Subalgebra::diagonal(2), {});

  const double s_rho = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
  CHECK(rep.gap == doctest::Approx(std::numbers::ln2 - s_rho).epsilon(1e-12));
  CHECK(rep.gap == doctest::Approx(0.130812035941137).epsilon(1e-11));

  // rho_N = sigma_N = I/2, so ||Delta|| = (1/2)/(1/4) = 2 and the recovery
  // of sigma_N is exactly rho, making the Petz residual ||rho - sigma||_1.
  CHECK(rep.inputs.delta_norm == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rep.inputs.residuals.petz_trace_residual == doctest::Approx(0.5).epsilon(1e-10));

  // rem5b = (pi/8)^4 2^-2 (1/2)^4 exactly.
  const double closed = kEighthPiFourth * 0.25 * 0.0625;
  CHECK(closed == doctest::Approx(3.715861932144257e-4).epsilon(1e-12));
  CHECK(rep.find("rem5b").value == doctest::Approx(closed).epsilon(1e-10));
}

TEST_CASE("bound family ordering and positivity over a random ensemble") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);
    const DensityMatrix rho = random_faithful(n, 9000 + 2 * seed);
    const DensityMatrix sigma = random_faithful(n, 9001 + 2 * seed);
    const BoundReport rep = evaluate_bounds(rho, sigma, Subalgebra::diagonal(n), {});

    CHECK(rep.gap >= -1e-11);
    for (const BoundEntry& b : rep.bounds) {
      CHECK(b.value >= 0.0);
      CHECK(b.slack >= -1e-8);
    }
    // 1/min(rho) >= max(sigma)/min(rho) since max(sigma) <= 1, hence the
    // rho-conditioned variant never exceeds the modular-norm variant.
    CHECK(rep.find("rem5c").value <= rep.find("rem5b").value + 1e-15);
    CHECK(rep.find("rem5c2").value <= rep.find("rem5b2").value * rep.inputs.rho_reduced_norm *
                                              rep.inputs.rho_reduced_norm / 1.0 +
                                          1e-15);
  }
}

TEST_CASE("singular comparison states raise the support tag or throw") {
  const DensityMatrix rho = example_rho();
  const Subalgebra alg = Subalgebra::diagonal(2);

  // sigma = |+><+| : sigma itself is singular but its diagonal is I/2, so
  // the gap is tagged infinite and every bound holds vacuously.
  Matrix plus(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  const DensityMatrix sigma_plus = DensityMatrix::from_matrix(plus);
  const BoundReport rep = evaluate_bounds(rho, sigma_plus, alg, {});
  CHECK(rep.gap_infinite);
  CHECK(rep.full_entropy.infinite);
  CHECK_FALSE(rep.reduced_entropy.infinite);
  CHECK(rep.gap == 0.0);
  CHECK(rep.min_slack() == std::numeric_limits<double>::infinity());
  for (const BoundEntry& b : rep.bounds) {
    CHECK(std::isfinite(b.value));
  }

  // sigma with a singular projection: the reduced entropy is infinite too,
  // the gap is an undefined difference, and the evaluation refuses.
  Matrix e00 = Matrix::Zero(2, 2);
  e00(0, 0) = 1.0;
  CHECK_THROWS_AS(evaluate_bounds(rho, DensityMatrix::from_matrix(e00), alg, {}),
                  SupportViolationError);

  // Non-faithful rho is a validation failure, not a numerical one.
  CHECK_THROWS_AS(evaluate_bounds(DensityMatrix::from_matrix(e00), maximally_mixed(2), alg, {}),
                  NonFaithfulError);
}

TEST_CASE("squared-difference trace comparison holds for normalized pairs") {
  CounterRng rng(404);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix x(3, 3), y(3, 3);
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) {
        x(i, j) = rng.next_complex_gaussian();
        y(i, j) = rng.next_complex_gaussian();
      }
    }
    x /= hs_norm(x);
    y /= hs_norm(y);
    const HsTraceCheck chk = hs_to_trace_check(x, y, {});
    CHECK(chk.lhs <= chk.rhs + 1e-12);
    CHECK(chk.lhs == doctest::Approx(trace_norm(x.adjoint() * x - y.adjoint() * y)).epsilon(1e-12));
    CHECK(chk.rhs == doctest::Approx(2.0 * hs_norm(x - y)).epsilon(1e-12));
  }
  Matrix big = Matrix::Identity(3, 3);
  CHECK_THROWS_AS(hs_to_trace_check(big, big, {}), NotNormalizedError);
}

TEST_CASE("equality diagnostics classify both directions") {
  // Diagonal pair under the diagonal algebra: equality in both roles.
  Matrix d1(3, 3), d2(3, 3);
  d1.setZero();
  d2.setZero();
  d1.diagonal() << 0.5, 0.3, 0.2;
  d2.diagonal() << 0.2, 0.5, 0.3;
  const EqualityDiagnostics eq =
      equality_diagnostics(DensityMatrix::from_matrix(d1), DensityMatrix::from_matrix(d2),
                           Subalgebra::diagonal(3), {});
  CHECK(eq.is_equality_case);
  CHECK(eq.is_equality_case_reversed);
  CHECK(std::abs(eq.gap) < 1e-11);
  CHECK(std::abs(eq.gap_reversed) < 1e-11);
  CHECK(eq.residuals.petz_trace_residual < 1e-9);
  CHECK(eq.residuals.symm_trace_residual < 1e-9);

  // The running example is not an equality case in either direction.
  const EqualityDiagnostics neq =
      equality_diagnostics(example_rho(), maximally_mixed(2), Subalgebra::diagonal(2), {});
  CHECK_FALSE(neq.is_equality_case);
  CHECK_FALSE(neq.is_equality_case_reversed);
  CHECK(neq.gap == doctest::Approx(kExampleGap).epsilon(1e-11));
  CHECK(neq.gap_reversed > 1e-4);
}
