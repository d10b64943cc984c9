#include <doctest.h>

#include <cmath>
#include <numbers>

#include <qdpi/errors.hpp>
#include <qdpi/rng.hpp>
#include <qdpi/states.hpp>

#include "helpers.hpp"

using namespace qdpi;
using namespace qdpi::testing;

TEST_CASE("density admission rejects non-states") {
  Matrix traceless(2, 2);
  traceless << 0.8, 0, 0, 0.1;
  CHECK_THROWS_AS(DensityMatrix::from_matrix(traceless), NotDensityError);

  Matrix negative(2, 2);
  negative << 1.2, 0, 0, -0.2;
  CHECK_THROWS_AS(DensityMatrix::from_matrix(negative), NotDensityError);

  Matrix skew(2, 2);
  skew << 0.5, 0.3, -0.3, 0.5;
  CHECK_THROWS_AS(DensityMatrix::from_matrix(skew), NotHermitianError);

  const DensityMatrix rho = example_rho();
  CHECK(rho.dim() == 2);
  CHECK(rho.min_eigenvalue() == doctest::Approx(kExampleEigLo).epsilon(1e-13));
  CHECK(rho.max_eigenvalue() == doctest::Approx(kExampleEigHi).epsilon(1e-13));
  CHECK(rho.faithful());
}

TEST_CASE("spectral powers of a state") {
  const DensityMatrix rho = example_rho();
  CHECK(mat_dist(rho.power(1.0), rho.matrix()) < 1e-13);
  const Matrix root = rho.sqrt_matrix();
  CHECK(mat_dist(root * root, rho.matrix()) < 1e-13);
  CHECK(mat_dist(rho.power(-1.0) * rho.matrix(), Matrix::Identity(2, 2)) < 1e-12);
  CHECK(mat_dist(rho.power(0.5) * rho.power(-0.5), Matrix::Identity(2, 2)) < 1e-12);

  // Pseudo-inverse rule on a rank-deficient state.
  Matrix proj = Matrix::Zero(2, 2);
  proj(0, 0) = 1.0;
  const DensityMatrix pure = DensityMatrix::from_matrix(proj);
  CHECK_FALSE(pure.faithful());
  CHECK(mat_dist(pure.power(-0.5), proj) < 1e-13);
}

TEST_CASE("random densities are reproducible and respect the rank request") {
  const DensityMatrix a = random_density(4, 4, 99, {});
  const DensityMatrix b = random_density(4, 4, 99, {});
  CHECK(mat_dist(a.matrix(), b.matrix()) == 0.0);
  CHECK(std::abs(a.matrix().trace().real() - 1.0) < 1e-12);
  CHECK(a.faithful());

  const DensityMatrix lowrank = random_density(5, 2, 7, {});
  int nonzero = 0;
  for (int i = 0; i < 5; ++i) {
    if (lowrank.eig().eigenvalues(i) > 1e-12) ++nonzero;
  }
  CHECK(nonzero == 2);
  CHECK_FALSE(lowrank.faithful());

  CHECK(mat_dist(random_density(3, 3, 5, {}).matrix(), random_density(3, 3, 6, {}).matrix()) >
        1e-3);
}

TEST_CASE("entropy values match the frozen oracle") {
  const DensityMatrix rho = example_rho();
  const DensityMatrix sigma = maximally_mixed(2);

  CHECK(von_neumann_entropy(rho) == doctest::Approx(kExampleEntropy).epsilon(1e-13));
  CHECK(von_neumann_entropy(sigma) == doctest::Approx(std::numbers::ln2).epsilon(1e-14));

  const RelEntropy s = relative_entropy(rho, sigma);
  CHECK_FALSE(s.infinite);
  CHECK(s.nats == doctest::Approx(kExampleRelEntropy).epsilon(1e-12));
  // S(rho || I/n) = log n - S(rho), an exact identity.
  CHECK(s.nats == doctest::Approx(std::numbers::ln2 - kExampleEntropy).epsilon(1e-12));

  const RelEntropy self = relative_entropy(rho, rho);
  CHECK_FALSE(self.infinite);
  CHECK(std::abs(self.nats) < 1e-13);

  // Relative entropy is positive and zero only at equal states.
  const DensityMatrix tau = random_faithful(3, 31);
  const DensityMatrix pi = random_faithful(3, 32);
  CHECK(relative_entropy(tau, pi).nats > 1e-4);
}

TEST_CASE("support sentinel flags mass outside the support") {
  Matrix proj = Matrix::Zero(2, 2);
  proj(0, 0) = 1.0;
  const DensityMatrix pure = DensityMatrix::from_matrix(proj);
  const DensityMatrix rho = example_rho();

  const RelEntropy bad = relative_entropy(rho, pure);
  CHECK(bad.infinite);
  CHECK(bad.support_leak > 0.1);

  // Contained supports stay finite even when sigma is singular.
  const RelEntropy ok = relative_entropy(pure, pure);
  CHECK_FALSE(ok.infinite);
  CHECK(std::abs(ok.nats) < 1e-13);

  Matrix mixed(2, 2);
  mixed << 0.6, 0, 0, 0.4;
  const RelEntropy fin = relative_entropy(pure, DensityMatrix::from_matrix(mixed));
  CHECK_FALSE(fin.infinite);
  CHECK(fin.nats == doctest::Approx(-std::log(0.6)).epsilon(1e-12));
}

TEST_CASE("state pair spectrum carries a doubly stochastic overlap") {
  const DensityMatrix rho = random_faithful(4, 41);
  const DensityMatrix sigma = random_faithful(4, 42);
  const StatePairSpectrum pair = make_state_pair(rho, sigma);
  for (int i = 0; i < 4; ++i) {
    CHECK(pair.overlap.row(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pair.overlap.col(i).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(pair.overlap.minCoeff() >= 0.0);
}

TEST_CASE("quasi-entropy matches the frozen oracle and the direct formula") {
  const DensityMatrix rho = example_rho();
  const DensityMatrix sigma = maximally_mixed(2);
  const StatePairSpectrum pair = make_state_pair(rho, sigma);

  CHECK(quasi_entropy_t(pair, 0.1) == doctest::Approx(1.1350455675227837).epsilon(1e-12));
  CHECK(quasi_entropy_t(pair, 1.0) == doctest::Approx(0.5405405405405405).epsilon(1e-12));
  CHECK(quasi_entropy_t(pair, 10.0) == doctest::Approx(0.09120879120879119).epsilon(1e-12));
  CHECK(quasi_entropy_t(rho, sigma, 1.0) == doctest::Approx(quasi_entropy_t(pair, 1.0)));

  // Against the brute-force sum over the joint spectral data.
  const double t = 0.7;
  double brute = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double r = pair.rho_eigs(j);
      const double s = pair.sigma_eigs(i);
      brute += pair.overlap(i, j) * r * r / (t * r + s);
    }
  }
  CHECK(quasi_entropy_t(pair, t) == doctest::Approx(brute).epsilon(1e-13));

  // The general spectral-function form reproduces the resolvent case through
  // f(x) = 1/(t + x) since sum overlap f(s/r) r = S_t at fixed t... checked
  // instead on the logarithm, where it must reproduce the relative entropy.
  const double via_log = quasi_entropy_f(pair, SpectralFunction::log());
  CHECK(-via_log == doctest::Approx(kExampleRelEntropy).epsilon(1e-11));
}

TEST_CASE("integral representation reproduces the relative entropy") {
  const DensityMatrix rho = example_rho();
  const DensityMatrix sigma = maximally_mixed(2);
  const QuadratureResult q = integral_log_check(rho, sigma);
  CHECK(std::abs(q.value - kExampleRelEntropy) <= std::max(1e-6, q.error_estimate));

  for (std::uint64_t seed : {61ULL, 62ULL, 63ULL}) {
    const DensityMatrix a = random_faithful(3, 2 * seed);
    const DensityMatrix b = random_faithful(3, 2 * seed + 1);
    const QuadratureResult qq = integral_log_check(a, b);
    const double exact = relative_entropy(a, b).nats;
    CHECK(std::abs(qq.value - exact) <= std::max(1e-6, qq.error_estimate));
  }
}

TEST_CASE("fidelity and trace distance match the frozen oracle") {
  const DensityMatrix rho = example_rho();
  const DensityMatrix sigma = maximally_mixed(2);
  CHECK(fidelity(rho, sigma) == doctest::Approx(kExampleFidelity).epsilon(1e-12));
  CHECK(fidelity(sigma, rho) == doctest::Approx(kExampleFidelity).epsilon(1e-12));
  CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(trace_distance(rho, sigma) == doctest::Approx(kExampleTraceDistance).epsilon(1e-12));
  CHECK(trace_distance(sigma, rho) == doctest::Approx(kExampleTraceDistance).epsilon(1e-12));
  CHECK(trace_distance(rho, rho) < 1e-14);

  // Fuchs-van de Graaf sanity: 1 - F <= T <= sqrt(1 - F^2) for states.
  const DensityMatrix a = random_faithful(4, 71);
  const DensityMatrix b = random_faithful(4, 72);
  const double f = fidelity(a, b);
  const double t = trace_distance(a, b) / 2.0;
  CHECK(1.0 - std::sqrt(f) <= t + 1e-10);
  CHECK(t <= std::sqrt(1.0 - f) + 1e-10);
}

TEST_CASE("GNS and KMS inner products implement their defining traces") {
  const DensityMatrix rho = example_rho();
  CounterRng rng(81);
  Matrix x(2, 2), y(2, 2);
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) {
      x(i, j) = rng.next_complex_gaussian();
      y(i, j) = rng.next_complex_gaussian();
    }
  }
  const Cplx gns = gns_inner(rho.matrix(), x, y);
  CHECK(std::abs(gns - (rho.matrix() * x.adjoint() * y).trace()) < 1e-13);

  const Cplx kms = kms_inner(rho, x, y);
  const Matrix half = rho.sqrt_matrix();
  CHECK(std::abs(kms - (half * x.adjoint() * half * y).trace()) < 1e-13);

  // Second defining form of the KMS inner product.
  const Matrix quarter = rho.power(0.25);
  const Cplx alt = ((quarter * x * quarter).adjoint() * (quarter * y * quarter)).trace();
  CHECK(std::abs(kms - alt) < 1e-13);

  // Both are positive definite for a faithful state.
  CHECK(gns_inner(rho.matrix(), x, x).real() > 0.0);
  CHECK(std::abs(gns_inner(rho.matrix(), x, x).imag()) < 1e-13);
  CHECK(kms_inner(rho, x, x).real() > 0.0);
}

TEST_CASE("relative modular operator acts by conjugation sandwich") {
  const DensityMatrix rho = example_rho();
  const DensityMatrix sigma = maximally_mixed(2);
  const RelativeModular delta(sigma, rho);

  CHECK(delta.norm() == doctest::Approx(0.5 / kExampleEigLo).epsilon(1e-12));

  CounterRng rng(91);
  Matrix x(2, 2);
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) {
      x(i, j) = rng.next_complex_gaussian();
    }
  }
  const Matrix expected = sigma.matrix() * x * rho.power(-1.0);
  CHECK(mat_dist(delta.apply(x), expected) < 1e-12);

  const Matrix halfpow = sigma.power(0.5) * x * rho.power(-0.5);
  CHECK(mat_dist(delta.apply_power(x, 0.5), halfpow) < 1e-12);
  CHECK(mat_dist(delta.apply_power(x, 1.0), delta.apply(x)) < 1e-13);

  // (t + Delta) resolvent really inverts.
  for (double t : {0.1, 1.0, 10.0}) {
    const Matrix r = delta.resolvent(x, t);
    CHECK(mat_dist(t * r + delta.apply(r), x) < 1e-11);
  }

  // Positivity in the Hilbert-Schmidt sense.
  const double quad = hs_inner(x, delta.apply(x)).real();
  CHECK(quad > 0.0);
}
