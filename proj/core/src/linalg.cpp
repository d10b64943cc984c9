#include "qdpi/linalg.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace qdpi {

Matrix hermitize(const Matrix& x) { return 0.5 * (x + x.adjoint()); }

HermitianMatrix::HermitianMatrix(Matrix m, const Tolerances& tol) : mat_(std::move(m)) {
  if (mat_.rows() != mat_.cols()) {
    throw DimensionMismatchError("hermitian matrix must be square");
  }
  const double scale = std::max(1.0, mat_.norm());
  const double asym = (mat_ - mat_.adjoint()).norm();
  if (asym > tol.hermiticity * scale) {
    std::ostringstream os;
    os << "matrix is not hermitian: asymmetry " << asym << " exceeds " << tol.hermiticity * scale;
    throw NotHermitianError(os.str());
  }
  mat_ = 0.5 * (mat_ + mat_.adjoint().eval());
}

HermitianMatrix HermitianMatrix::average(const Matrix& m) {
  return HermitianMatrix(hermitize(m), Unchecked{});
}

EigenSystem hermitian_eig(const Matrix& h, const Tolerances& tol) {
  return hermitian_eig(HermitianMatrix(h, tol), tol);
}

EigenSystem hermitian_eig(const HermitianMatrix& h, const Tolerances& tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("hermitian eigensolver failed to converge");
  }
  EigenSystem es{solver.eigenvalues(), solver.eigenvectors()};
  const Matrix recon =
      es.eigenvectors * es.eigenvalues.asDiagonal().toDenseMatrix().cast<Cplx>() *
      es.eigenvectors.adjoint();
  const double scale = std::max(1.0, h.matrix().norm());
  if ((recon - h.matrix()).norm() > tol.eig_residual * scale) {
    throw ConvergenceError("eigendecomposition reconstruction residual too large");
  }
  return es;
}

SpectralFunction SpectralFunction::log() { return {Kind::Log, 0.0, true}; }
SpectralFunction SpectralFunction::sqrt() { return {Kind::Sqrt, 0.5, false}; }
SpectralFunction SpectralFunction::inverse() { return {Kind::Inverse, -1.0, true}; }
SpectralFunction SpectralFunction::power(double exponent) {
  return {Kind::Power, exponent, exponent < 0.0};
}

double SpectralFunction::operator()(double x) const {
  switch (kind_) {
    case Kind::Log:
      return std::log(x);
    case Kind::Sqrt:
      return std::sqrt(x);
    case Kind::Inverse:
      return 1.0 / x;
    case Kind::Power:
      return std::pow(x, exponent_);
  }
  return 0.0;
}

MatrixFunctionResult matrix_function(const EigenSystem& es, const SpectralFunction& f,
                                     std::optional<double> threshold, const Tolerances& tol) {
  const int n = static_cast<int>(es.eigenvalues.size());
  const double wmax = es.eigenvalues.cwiseAbs().maxCoeff();
  const double cut = threshold.value_or(tol.pinv_rel * wmax);
  if (f.singular_at_zero() && cut <= 0.0 && es.eigenvalues.minCoeff() <= 0.0) {
    throw SingularInputError("function singular at 0 applied to a non-positive spectrum");
  }
  RealVector mapped(n);
  int truncated = 0;
  for (int i = 0; i < n; ++i) {
    const double w = es.eigenvalues(i);
    if (std::abs(w) <= cut) {
      mapped(i) = 0.0;
      ++truncated;
    } else if (w < 0.0 && f.singular_at_zero()) {
      throw SingularInputError("function singular at 0 applied to a negative eigenvalue");
    } else if (w < 0.0) {
      throw SingularInputError("spectral function applied outside its domain");
    } else {
      mapped(i) = f(w);
    }
  }
  MatrixFunctionResult out;
  out.value = es.eigenvectors * mapped.asDiagonal().toDenseMatrix().cast<Cplx>() *
              es.eigenvectors.adjoint();
  out.truncated = truncated;
  return out;
}

MatrixFunctionResult matrix_function(const HermitianMatrix& h, const SpectralFunction& f,
                                     std::optional<double> threshold, const Tolerances& tol) {
  return matrix_function(hermitian_eig(h, tol), f, threshold, tol);
}

Norms norms(const Matrix& x) {
  Eigen::JacobiSVD<Matrix> svd(x);
  const auto& s = svd.singularValues();
  Norms out;
  out.op = s.size() > 0 ? s(0) : 0.0;
  out.hs = x.norm();
  out.tr = s.sum();
  return out;
}

double operator_norm(const Matrix& x) { return norms(x).op; }
double trace_norm(const Matrix& x) { return norms(x).tr; }

Matrix tensor_product(const Matrix& a, const Matrix& b) {
  const int ar = static_cast<int>(a.rows()), ac = static_cast<int>(a.cols());
  const int br = static_cast<int>(b.rows()), bc = static_cast<int>(b.cols());
  Matrix out(ar * br, ac * bc);
  for (int i = 0; i < ar; ++i) {
    for (int j = 0; j < ac; ++j) {
      out.block(i * br, j * bc, br, bc) = a(i, j) * b;
    }
  }
  return out;
}

Matrix partial_trace(const Matrix& x, int d1, int d2, Factor which) {
  if (x.rows() != d1 * d2 || x.cols() != d1 * d2) {
    throw DimensionMismatchError("partial_trace: operator does not match d1*d2");
  }
  if (which == Factor::First) {
    Matrix out = Matrix::Zero(d2, d2);
    for (int k = 0; k < d1; ++k) {
      out += x.block(k * d2, k * d2, d2, d2);
    }
    return out;
  }
  Matrix out = Matrix::Zero(d1, d1);
  for (int i = 0; i < d1; ++i) {
    for (int j = 0; j < d1; ++j) {
      Cplx s = 0.0;
      for (int k = 0; k < d2; ++k) {
        s += x(i * d2 + k, j * d2 + k);
      }
      out(i, j) = s;
    }
  }
  return out;
}

Matrix partial_trace_middle(const Matrix& x, int d1, int d2, int d3) {
  if (x.rows() != d1 * d2 * d3 || x.cols() != d1 * d2 * d3) {
    throw DimensionMismatchError("partial_trace_middle: operator does not match d1*d2*d3");
  }
  Matrix out = Matrix::Zero(d1 * d3, d1 * d3);
  for (int i1 = 0; i1 < d1; ++i1) {
    for (int j1 = 0; j1 < d1; ++j1) {
      for (int i3 = 0; i3 < d3; ++i3) {
        for (int j3 = 0; j3 < d3; ++j3) {
          Cplx s = 0.0;
          for (int k = 0; k < d2; ++k) {
            s += x((i1 * d2 + k) * d3 + i3, (j1 * d2 + k) * d3 + j3);
          }
          out(i1 * d3 + i3, j1 * d3 + j3) = s;
        }
      }
    }
  }
  return out;
}

CplxVector vec(const Matrix& x) {
  return Eigen::Map<const CplxVector>(x.data(), x.size());
}

Matrix unvec(const CplxVector& v, int rows, int cols) {
  if (v.size() != static_cast<Eigen::Index>(rows) * cols) {
    throw DimensionMismatchError("unvec: size mismatch");
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Superoperator::Superoperator(Matrix mat, int dim) : mat_(std::move(mat)), dim_(dim) {
  if (mat_.rows() != dim * dim || mat_.cols() != dim * dim) {
    throw DimensionMismatchError("superoperator matrix must be dim^2 x dim^2");
  }
}

Superoperator Superoperator::identity(int dim) {
  return Superoperator(Matrix::Identity(dim * dim, dim * dim), dim);
}

Matrix Superoperator::apply(const Matrix& x) const {
  if (x.rows() != dim_ || x.cols() != dim_) {
    throw DimensionMismatchError("superoperator applied to wrong dimension");
  }
  return unvec(mat_ * vec(x), dim_, dim_);
}

Superoperator Superoperator::adjoint() const { return Superoperator(mat_.adjoint(), dim_); }

Superoperator Superoperator::compose(const Superoperator& rhs) const {
  if (rhs.dim_ != dim_) {
    throw DimensionMismatchError("superoperator composition dimension mismatch");
  }
  return Superoperator(mat_ * rhs.mat_, dim_);
}

Matrix Superoperator::choi() const {
  Matrix out = Matrix::Zero(dim_ * dim_, dim_ * dim_);
  Matrix unit = Matrix::Zero(dim_, dim_);
  for (int a = 0; a < dim_; ++a) {
    for (int b = 0; b < dim_; ++b) {
      unit(a, b) = 1.0;
      const Matrix image = unvec(mat_ * vec(unit), dim_, dim_);
      unit(a, b) = 0.0;
      out.block(a * dim_, b * dim_, dim_, dim_) += image;
    }
  }
  return out;
}

double Superoperator::operator_norm() const { return qdpi::operator_norm(mat_); }

std::vector<Matrix> orthonormalize_span(const std::vector<Matrix>& mats, double rel_tol) {
  if (mats.empty()) return {};
  const int rows = static_cast<int>(mats.front().rows());
  const int cols = static_cast<int>(mats.front().cols());
  Matrix stacked(rows * cols, static_cast<int>(mats.size()));
  for (size_t k = 0; k < mats.size(); ++k) {
    if (mats[k].rows() != rows || mats[k].cols() != cols) {
      throw DimensionMismatchError("orthonormalize_span: inconsistent shapes");
    }
    stacked.col(static_cast<int>(k)) = vec(mats[k]);
  }
  const Matrix q = orthonormal_columns(stacked, rel_tol);
  std::vector<Matrix> out;
  out.reserve(q.cols());
  for (int k = 0; k < q.cols(); ++k) {
    out.push_back(unvec(q.col(k), rows, cols));
  }
  return out;
}

double span_relative_residual(const std::vector<Matrix>& basis, const Matrix& x) {
  const double nx = x.norm();
  if (nx == 0.0) return 0.0;
  Matrix resid = x;
  for (const Matrix& b : basis) {
    resid -= hs_inner(b, x) * b;
  }
  return resid.norm() / nx;
}

Matrix orthonormal_columns(const Matrix& a, double rel_tol) {
  if (a.cols() == 0) return Matrix(a.rows(), 0);
  // Rank-revealing QR with column pivoting: cheaper than an SVD on the wide
  // candidate stacks produced by algebra closures, and the pivoted R diagonal
  // is a reliable rank witness at the tolerance scales used here.
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  const Matrix& r = qr.matrixQR();
  const Eigen::Index kmax = std::min(a.rows(), a.cols());
  const double lead = std::abs(r(0, 0));
  if (!(lead > 0.0)) return Matrix(a.rows(), 0);
  Eigen::Index rank = 0;
  while (rank < kmax && std::abs(r(rank, rank)) > rel_tol * lead) ++rank;
  // Apply the reflector sequence to a thin identity so only the leading
  // columns of Q are ever materialized.
  return qr.householderQ() * Matrix::Identity(a.rows(), rank);
}

Matrix orthogonal_complement(const Matrix& v) {
  const int n = static_cast<int>(v.rows());
  const int k = static_cast<int>(v.cols());
  if (k == 0) return Matrix::Identity(n, n);
  // Householder QR of v extended to a full unitary; the trailing columns
  // span the complement.
  Eigen::HouseholderQR<Matrix> qr(v);
  Matrix q = qr.householderQ();
  return q.rightCols(n - k);
}

Matrix span_intersection(const Matrix& u, const Matrix& v, double rel_tol) {
  if (u.rows() != v.rows()) {
    throw DimensionMismatchError("span_intersection: ambient dimension mismatch");
  }
  const Matrix cu = orthogonal_complement(u);
  const Matrix cv = orthogonal_complement(v);
  Matrix un(u.rows(), cu.cols() + cv.cols());
  un << cu, cv;
  const Matrix q = orthonormal_columns(un, rel_tol);
  return orthogonal_complement(q);
}

}  // namespace qdpi
