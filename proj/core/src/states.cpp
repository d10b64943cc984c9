#include "qdpi/states.hpp"

#include <cmath>
#include <sstream>

#include "qdpi/rng.hpp"

namespace qdpi {

DensityMatrix DensityMatrix::from_matrix(const Matrix& m, const Tolerances& tol) {
  const HermitianMatrix h(m, tol);
  EigenSystem es = hermitian_eig(h, tol);
  if (es.eigenvalues(0) < tol.density_min_eig) {
    std::ostringstream os;
    os << "density matrix has eigenvalue " << es.eigenvalues(0) << " below "
       << tol.density_min_eig;
    throw NotDensityError(os.str());
  }
  const double tr = es.eigenvalues.sum();
  if (std::abs(tr - 1.0) > tol.density_trace) {
    std::ostringstream os;
    os << "density matrix trace " << tr << " deviates from 1 beyond " << tol.density_trace;
    throw NotDensityError(os.str());
  }
  return DensityMatrix(h.matrix(), std::move(es));
}

Matrix DensityMatrix::power(double exponent, const Tolerances& tol) const {
  return matrix_function(eig_, SpectralFunction::power(exponent), std::nullopt, tol).value;
}

DensityMatrix random_density(int n, int rank, std::uint64_t seed, const Tolerances& tol) {
  if (n < 1) throw DimensionMismatchError("random_density: dimension must be positive");
  if (rank < 1 || rank > n) {
    std::ostringstream os;
    os << "random_density: rank " << rank << " outside [1, " << n << "]";
    throw BadRankError(os.str());
  }
  CounterRng rng(seed);
  Matrix g(n, rank);
  for (int j = 0; j < rank; ++j) {
    for (int i = 0; i < n; ++i) {
      g(i, j) = rng.next_complex_gaussian();
    }
  }
  Matrix rho = g * g.adjoint();
  rho = hermitize(rho) / rho.trace().real();
  return DensityMatrix::from_matrix(rho, tol);
}

double von_neumann_entropy(const DensityMatrix& rho, const Tolerances& tol) {
  const auto& w = rho.eig().eigenvalues;
  const double cut = tol.pinv_rel * w.cwiseAbs().maxCoeff();
  double s = 0.0;
  for (int i = 0; i < w.size(); ++i) {
    if (w(i) > cut) s -= w(i) * std::log(w(i));
  }
  return s;
}

RelEntropy relative_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                            const Tolerances& tol) {
  if (rho.dim() != sigma.dim()) {
    throw DimensionMismatchError("relative_entropy: dimension mismatch");
  }
  const auto& res = rho.eig();
  const auto& ses = sigma.eig();
  const double scut = tol.pinv_rel * ses.eigenvalues.cwiseAbs().maxCoeff();
  const double rcut = tol.pinv_rel * res.eigenvalues.cwiseAbs().maxCoeff();

  RelEntropy out;
  double cross = 0.0;  // Tr[rho log sigma] over the support of sigma
  for (int i = 0; i < ses.eigenvalues.size(); ++i) {
    const double si = ses.eigenvalues(i);
    const double mass =
        (ses.eigenvectors.col(i).adjoint() * rho.matrix() * ses.eigenvectors.col(i))(0, 0).real();
    if (si <= scut) {
      out.support_leak += std::max(mass, 0.0);
    } else {
      cross += mass * std::log(si);
    }
  }
  if (out.support_leak > tol.support_leak) {
    out.infinite = true;
    out.nats = 0.0;
    return out;
  }
  double self = 0.0;  // Tr[rho log rho]
  for (int j = 0; j < res.eigenvalues.size(); ++j) {
    const double rj = res.eigenvalues(j);
    if (rj > rcut) self += rj * std::log(rj);
  }
  out.nats = self - cross;
  return out;
}

StatePairSpectrum make_state_pair(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) {
    throw DimensionMismatchError("state pair dimension mismatch");
  }
  StatePairSpectrum pair;
  pair.rho_eigs = rho.eig().eigenvalues;
  pair.sigma_eigs = sigma.eig().eigenvalues;
  pair.rho_vecs = rho.eig().eigenvectors;
  pair.sigma_vecs = sigma.eig().eigenvectors;
  pair.overlap = (pair.sigma_vecs.adjoint() * pair.rho_vecs).cwiseAbs2();
  return pair;
}

double quasi_entropy_t(const StatePairSpectrum& pair, double t) {
  if (t <= 0.0) throw ValidationError("bad_parameter", "quasi_entropy_t needs t > 0");
  double total = 0.0;
  for (int i = 0; i < pair.sigma_eigs.size(); ++i) {
    for (int j = 0; j < pair.rho_eigs.size(); ++j) {
      const double rj = pair.rho_eigs(j);
      const double si = pair.sigma_eigs(i);
      const double den = t * rj + si;
      if (den > 0.0) total += pair.overlap(i, j) * rj * rj / den;
    }
  }
  return total;
}

double quasi_entropy_t(const DensityMatrix& rho, const DensityMatrix& sigma, double t) {
  return quasi_entropy_t(make_state_pair(rho, sigma), t);
}

double quasi_entropy_f(const StatePairSpectrum& pair, const SpectralFunction& f) {
  double total = 0.0;
  for (int i = 0; i < pair.sigma_eigs.size(); ++i) {
    for (int j = 0; j < pair.rho_eigs.size(); ++j) {
      const double rj = pair.rho_eigs(j);
      if (rj <= 0.0) {
        throw SingularInputError("quasi_entropy_f requires a faithful rho");
      }
      total += pair.overlap(i, j) * f(pair.sigma_eigs(i) / rj) * rj;
    }
  }
  return total;
}

QuadratureResult integral_log_check(const DensityMatrix& rho, const DensityMatrix& sigma,
                                    const Tolerances& tol) {
  const StatePairSpectrum pair = make_state_pair(rho, sigma);
  const auto integrand = [&pair](double u) {
    const double t = u / (1.0 - u);
    const double jac = 1.0 / ((1.0 - u) * (1.0 - u));
    return (quasi_entropy_t(pair, t) - 1.0 / (1.0 + t)) * jac;
  };
  return integrate_unit_interval(integrand, tol.quadrature_panels, tol.quadrature_nodes);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma, const Tolerances& tol) {
  const Matrix sr = rho.sqrt_matrix(tol);
  const Matrix inner = hermitize(sr * sigma.matrix() * sr);
  const EigenSystem es = hermitian_eig(HermitianMatrix::average(inner), tol);
  double sum = 0.0;
  for (int i = 0; i < es.eigenvalues.size(); ++i) {
    if (es.eigenvalues(i) > 0.0) sum += std::sqrt(es.eigenvalues(i));
  }
  return sum * sum;
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma,
                      const Tolerances& tol) {
  const EigenSystem es = hermitian_eig(HermitianMatrix::average(rho.matrix() - sigma.matrix()), tol);
  return es.eigenvalues.cwiseAbs().sum();
}

Cplx gns_inner(const Matrix& rho, const Matrix& x, const Matrix& y) {
  return (rho * x.adjoint() * y).trace();
}

Cplx kms_inner(const DensityMatrix& rho, const Matrix& x, const Matrix& y,
               const Tolerances& tol) {
  const Matrix sr = rho.sqrt_matrix(tol);
  return (sr * x.adjoint() * sr * y).trace();
}

RelativeModular::RelativeModular(const DensityMatrix& sigma, const DensityMatrix& rho,
                                 const Tolerances& tol)
    : sigma_eig_(sigma.eig()), rho_eig_(rho.eig()) {
  if (sigma.dim() != rho.dim()) {
    throw DimensionMismatchError("relative modular operator dimension mismatch");
  }
  if (!rho.faithful(tol)) {
    throw NonFaithfulError("relative modular operator needs a faithful rho");
  }
  norm_ = sigma.max_eigenvalue() / rho.min_eigenvalue();
}

Matrix RelativeModular::apply(const Matrix& x) const { return apply_power(x, 1.0); }

Matrix RelativeModular::apply_power(const Matrix& x, double p) const {
  const int n = static_cast<int>(x.rows());
  // sigma^p X rho^{-p} through the two eigenbases.
  Matrix c = sigma_eig_.eigenvectors.adjoint() * x * rho_eig_.eigenvectors;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      c(i, j) *= std::pow(sigma_eig_.eigenvalues(i), p) * std::pow(rho_eig_.eigenvalues(j), -p);
    }
  }
  return sigma_eig_.eigenvectors * c * rho_eig_.eigenvectors.adjoint();
}

Matrix RelativeModular::resolvent(const Matrix& x, double t) const {
  if (t <= 0.0) throw ValidationError("bad_parameter", "resolvent needs t > 0");
  const int n = static_cast<int>(x.rows());
  Matrix c = sigma_eig_.eigenvectors.adjoint() * x * rho_eig_.eigenvectors;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      c(i, j) /= t + sigma_eig_.eigenvalues(i) / rho_eig_.eigenvalues(j);
    }
  }
  return sigma_eig_.eigenvectors * c * rho_eig_.eigenvectors.adjoint();
}

}  // namespace qdpi
