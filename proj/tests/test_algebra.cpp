#include <doctest.h>

#include <cmath>
#include <vector>

#include <qdpi/algebra.hpp>
#include <qdpi/errors.hpp>
#include <qdpi/rng.hpp>

#include "helpers.hpp"

using namespace qdpi;
using qdpi::testing::mat_dist;

namespace {

Matrix random_hermitian(int n, std::uint64_t seed) {
  CounterRng rng(seed);
  Matrix g(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      g(i, j) = rng.next_complex_gaussian();
    }
  }
  return (g + g.adjoint()) / 2.0;
}

Matrix unit(int n, int i, int j) {
  Matrix e = Matrix::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

}  // namespace

TEST_CASE("canonical algebras have the expected dimensions and membership") {
  const Subalgebra diag = Subalgebra::diagonal(3);
  CHECK(diag.dim() == 3);
  CHECK(diag.ambient_dim() == 3);
  Matrix d(3, 3);
  d.setZero();
  d(0, 0) = 1;
  d(1, 1) = Cplx(0, 2);
  d(2, 2) = -3;
  CHECK(diag.contains(d));
  CHECK_FALSE(diag.contains(unit(3, 0, 1)));

  const Subalgebra full = Subalgebra::full(3);
  CHECK(full.dim() == 9);
  CHECK(full.contains(random_hermitian(3, 1)));

  const AlgebraVerification v = verify_algebra(diag.basis());
  CHECK(v.ok);
  CHECK(v.orthonormality < 1e-12);
  CHECK(v.unit_membership < 1e-12);
  CHECK(v.adjoint_closure < 1e-12);
  CHECK(v.product_closure < 1e-12);
}

TEST_CASE("tensor factor algebras follow the index convention") {
  const Subalgebra right = Subalgebra::tensor_factor(2, 3, Factor::Second);
  CHECK(right.ambient_dim() == 6);
  CHECK(right.dim() == 9);
  const Matrix b = random_hermitian(3, 2);
  CHECK(right.contains(tensor_product(Matrix::Identity(2, 2), b)));
  const Matrix a = random_hermitian(2, 3);
  CHECK_FALSE(right.contains(tensor_product(a, Matrix::Identity(3, 3))));

  const Subalgebra left = Subalgebra::tensor_factor(2, 3, Factor::First);
  CHECK(left.dim() == 4);
  CHECK(left.contains(tensor_product(a, Matrix::Identity(3, 3))));
  CHECK_FALSE(left.contains(tensor_product(Matrix::Identity(2, 2), b)));
}

TEST_CASE("from_basis accepts closed spans and rejects open ones") {
  // The span of {I, pauli_x} is closed under products and adjoints.
  std::vector<Matrix> gens;
  Matrix px(2, 2);
  px << 0, 1, 1, 0;
  gens.push_back(Matrix::Identity(2, 2) / std::sqrt(2.0));
  gens.push_back(px / std::sqrt(2.0));
  const Subalgebra alg = Subalgebra::from_basis(gens);
  CHECK(alg.dim() == 2);
  CHECK(alg.contains(px));

  // The span of {I, E01} is not *-closed.
  std::vector<Matrix> open;
  open.push_back(Matrix::Identity(2, 2) / std::sqrt(2.0));
  open.push_back(unit(2, 0, 1));
  CHECK_THROWS_AS(Subalgebra::from_basis(open), ValidationError);
}

TEST_CASE("generator closure reaches the generated algebra") {
  Matrix px(2, 2);
  px << 0, 1, 1, 0;
  const Subalgebra two = close_generators(2, {px});
  CHECK(two.dim() == 2);
  CHECK(two.contains(Matrix::Identity(2, 2)));
  CHECK(two.contains(px));

  const Subalgebra diag = close_generators(3, {unit(3, 0, 0), unit(3, 1, 1)});
  CHECK(diag.dim() == 3);

  // A single nilpotent generator closes to the full matrix algebra.
  const Subalgebra full = close_generators(2, {unit(2, 0, 1)});
  CHECK(full.dim() == 4);

  // No generators: the scalars.
  const Subalgebra scalars = close_generators(3, {});
  CHECK(scalars.dim() == 1);
  CHECK(scalars.contains(Matrix::Identity(3, 3)));

  // Closure of two generic hermitian elements is a verified algebra.
  const Subalgebra generic = close_generators(4, {random_hermitian(4, 5), random_hermitian(4, 6)});
  CHECK(verify_algebra(generic.basis()).ok);
}

TEST_CASE("trace-compatible conditional expectation is a faithful projection") {
  const Subalgebra diag = Subalgebra::diagonal(4);
  const Matrix x = random_hermitian(4, 11);

  const Matrix ex = conditional_expectation_tau(diag, x);
  // Onto the diagonal algebra it keeps exactly the diagonal.
  CHECK(mat_dist(ex, Matrix(x.diagonal().asDiagonal())) < 1e-13);
  // Trace preserving and idempotent.
  CHECK(std::abs((ex - x).trace()) < 1e-13);
  CHECK(mat_dist(conditional_expectation_tau(diag, ex), ex) < 1e-13);

  // Self-adjoint for the HS inner product.
  const Matrix y = random_hermitian(4, 12);
  const Cplx lhs = hs_inner(conditional_expectation_tau(diag, x), y);
  const Cplx rhs = hs_inner(x, conditional_expectation_tau(diag, y));
  CHECK(std::abs(lhs - rhs) < 1e-13);

  // Module property over the algebra: E(A X B) = A E(X) B.
  Matrix a = Matrix::Zero(4, 4), b = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    a(i, i) = Cplx(0.3 * i + 0.2, 0.0);
    b(i, i) = Cplx(1.0 - 0.1 * i, 0.0);
  }
  CHECK(mat_dist(conditional_expectation_tau(diag, a * x * b),
                 a * conditional_expectation_tau(diag, x) * b) < 1e-12);

  // Positivity: the compression of a PSD element stays PSD.
  const Matrix psd = x * x.adjoint();
  const Matrix epsd = conditional_expectation_tau(diag, psd);
  CHECK(hermitian_eig(hermitize(epsd)).eigenvalues(0) > -1e-12);

  // For the tensor algebra it is the normalized partial trace.
  const Subalgebra right = Subalgebra::tensor_factor(2, 3, Factor::Second);
  const Matrix z = random_hermitian(6, 13);
  const Matrix ez = conditional_expectation_tau(right, z);
  const Matrix expected =
      tensor_product(Matrix::Identity(2, 2), partial_trace(z, 2, 3, Factor::First)) / 2.0;
  CHECK(mat_dist(ez, expected) < 1e-12);
}

TEST_CASE("commutant and center identify the standard examples") {
  const Subalgebra diag = Subalgebra::diagonal(3);
  const Subalgebra diagc = commutant(diag);
  CHECK(diagc.dim() == 3);
  CHECK(diagc.contains(unit(3, 1, 1)));

  CHECK(commutant(Subalgebra::full(3)).dim() == 1);

  const Subalgebra right = Subalgebra::tensor_factor(2, 3, Factor::Second);
  const Subalgebra rightc = commutant(right);
  CHECK(rightc.dim() == 4);
  const Matrix a = random_hermitian(2, 21);
  CHECK(rightc.contains(tensor_product(a, Matrix::Identity(3, 3))));

  CHECK(center_of(diag).dim() == 3);
  CHECK(center_of(Subalgebra::full(4)).dim() == 1);
  CHECK(center_of(right).dim() == 1);

  // Commutant of a block-diagonal algebra: C e00 + M2 on e11,e22 block.
  std::vector<Matrix> gens = {unit(3, 1, 2), unit(3, 2, 1)};
  const Subalgebra block = close_generators(3, gens);
  CHECK(block.dim() == 5);  // scalars on e00 plus full M2 on the lower block
  const Subalgebra center = center_of(block);
  CHECK(center.dim() == 2);
}

TEST_CASE("factor decomposition recovers block structure") {
  const Tolerances tol;

  SUBCASE("diagonal algebra splits into scalar blocks") {
    const FactorDecomposition fd = factor_decomposition(Subalgebra::diagonal(4), 3, tol);
    CHECK(fd.blocks.size() == 4);
    for (const FactorBlock& b : fd.blocks) {
      CHECK(b.d_left == 1);
      CHECK(b.d_right == 1);
      CHECK(std::abs(b.projection.trace().real() - 1.0) < 1e-10);
    }
    CHECK(fd.max_structure_residual < 1e-8);
  }

  SUBCASE("tensor factor is a single block with the right multiplicity") {
    const Subalgebra right = Subalgebra::tensor_factor(2, 3, Factor::Second);
    const FactorDecomposition fd = factor_decomposition(right, 3, tol);
    REQUIRE(fd.blocks.size() == 1);
    CHECK(fd.blocks[0].d_left == 2);
    CHECK(fd.blocks[0].d_right == 3);
    const Matrix& v = fd.blocks[0].isometry;
    CHECK(mat_dist(v.adjoint() * v, Matrix::Identity(6, 6)) < 1e-10);

    // Every algebra element becomes 1 (x) A in block coordinates.
    const Matrix elem = tensor_product(Matrix::Identity(2, 2), random_hermitian(3, 31));
    const Matrix compressed = compress_to_block(fd.blocks[0], elem);
    const Matrix a = partial_trace(compressed, 2, 3, Factor::First) / 2.0;
    CHECK(mat_dist(compressed, tensor_product(Matrix::Identity(2, 2), a)) < 1e-9);
    // And lifts back to the projected element.
    CHECK(mat_dist(v * compressed * v.adjoint(), elem) < 1e-9);
  }

  SUBCASE("full algebra is one block with trivial multiplicity") {
    const FactorDecomposition fd = factor_decomposition(Subalgebra::full(3), 5, tol);
    REQUIRE(fd.blocks.size() == 1);
    CHECK(fd.blocks[0].d_left == 1);
    CHECK(fd.blocks[0].d_right == 3);
  }

  SUBCASE("scalar algebra survives the degenerate central spectrum") {
    // Regression: every central eigenvalue coincides here, so the grouping
    // width must come from the magnitude of the values, not their spread.
    const Subalgebra scalars = close_generators(3, {});
    const FactorDecomposition fd = factor_decomposition(scalars, 7, tol);
    REQUIRE(fd.blocks.size() == 1);
    CHECK(fd.blocks[0].d_left == 3);
    CHECK(fd.blocks[0].d_right == 1);
  }

  SUBCASE("mixed block sizes") {
    // C e00 + M2 on the lower block of M3.
    const Subalgebra block = close_generators(3, {unit(3, 1, 2), unit(3, 2, 1)});
    const FactorDecomposition fd = factor_decomposition(block, 11, tol);
    REQUIRE(fd.blocks.size() == 2);
    int total = 0;
    for (const FactorBlock& b : fd.blocks) {
      total += b.d_left * b.d_right;
      CHECK((b.d_right == 1 || b.d_right == 2));
    }
    CHECK(total == 3);
  }

  SUBCASE("decomposition is deterministic in the seed") {
    const Subalgebra right = Subalgebra::tensor_factor(2, 2, Factor::Second);
    const FactorDecomposition a = factor_decomposition(right, 9, tol);
    const FactorDecomposition b = factor_decomposition(right, 9, tol);
    REQUIRE(a.blocks.size() == b.blocks.size());
    for (std::size_t i = 0; i < a.blocks.size(); ++i) {
      CHECK(mat_dist(a.blocks[i].isometry, b.blocks[i].isometry) == 0.0);
    }
  }
}
