#pragma once

#include <doctest.h>

#include <qdpi/algebra.hpp>
#include <qdpi/linalg.hpp>
#include <qdpi/states.hpp>
#include <qdpi/types.hpp>

namespace qdpi::testing {

// Running example used throughout: a faithful qubit state with a genuinely
// complex off-diagonal entry against the maximally mixed state and the
// diagonal algebra. All frozen constants in the tests were produced by an
// independent reimplementation (numpy/mpmath) of the formulas.
inline Matrix example_rho_matrix() {
  Matrix m(2, 2);
  m << Cplx(0.75, 0.0), Cplx(0.10, 0.05), Cplx(0.10, -0.05), Cplx(0.25, 0.0);
  return m;
}

inline Matrix half_identity(int n) { return Matrix::Identity(n, n) / static_cast<double>(n); }

inline DensityMatrix example_rho() { return DensityMatrix::from_matrix(example_rho_matrix()); }

inline DensityMatrix maximally_mixed(int n) {
  return DensityMatrix::from_matrix(half_identity(n));
}

inline DensityMatrix random_faithful(int n, std::uint64_t seed) {
  return random_density(n, n, seed, Tolerances{});
}

inline double mat_dist(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

// Frozen spectral data of the running example.
inline constexpr double kExampleEigLo = 0.22613872124741694;
inline constexpr double kExampleEigHi = 0.773861278752583;
inline constexpr double kExampleEntropy = 0.5345684549613806;
inline constexpr double kExampleRelEntropy = 0.15857872559856478;   // S(rho || I/2)
inline constexpr double kExampleReducedRel = 0.13081203594113697;   // S(rho_N || I/2)
inline constexpr double kExampleGap = 0.027766689657427818;
inline constexpr double kExampleTraceDistance = 0.5477225575051661;
inline constexpr double kExampleFidelity = 0.9183300132670373;

}  // namespace qdpi::testing
