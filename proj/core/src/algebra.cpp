#include "qdpi/algebra.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <sstream>

#include "qdpi/rng.hpp"

namespace qdpi {

namespace {

constexpr double kGeneric = 1e-8;  // smallest acceptable scale for generic draws

std::vector<std::pair<int, int>> group_values(const RealVector& w, double rel_gap) {
  std::vector<std::pair<int, int>> groups;
  const int n = static_cast<int>(w.size());
  if (n == 0) return groups;
  // Floor the scale at the magnitude of the values themselves: when every
  // eigenvalue coincides (central element proportional to the identity) the
  // diameter is pure rounding noise and must not define the cluster width.
  const double diameter = w(n - 1) - w(0);
  const double scale = std::max(std::abs(w(0)), std::abs(w(n - 1)));
  const double gap = rel_gap * std::max({diameter, scale, 1e-300});
  int start = 0;
  for (int i = 1; i < n; ++i) {
    if (w(i) - w(i - 1) > gap) {
      groups.emplace_back(start, i - start);
      start = i;
    }
  }
  groups.emplace_back(start, n - start);
  return groups;
}

/// Real-orthonormal basis of the Hermitian part of a *-closed span.
std::vector<Matrix> hermitian_basis(const std::vector<Matrix>& basis) {
  if (basis.empty()) return {};
  const int n = static_cast<int>(basis.front().rows());
  std::vector<Matrix> cands;
  cands.reserve(2 * basis.size());
  for (const Matrix& b : basis) {
    cands.push_back(0.5 * (b + b.adjoint()));
    cands.push_back(Cplx(0.0, -0.5) * (b - b.adjoint()));
  }
  // Orthonormalize over the reals: vectorize into (Re, Im) stacked real
  // vectors so only real combinations are formed and hermiticity survives.
  Eigen::MatrixXd stacked(2 * n * n, static_cast<int>(cands.size()));
  for (size_t k = 0; k < cands.size(); ++k) {
    const CplxVector v = vec(cands[k]);
    stacked.col(static_cast<int>(k)) << v.real(), v.imag();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  std::vector<Matrix> out;
  if (s.size() == 0 || s(0) == 0.0) return out;
  for (int k = 0; k < s.size() && s(k) > 1e-10 * s(0); ++k) {
    const Eigen::VectorXd col = svd.matrixU().col(k);
    CplxVector v(n * n);
    v.real() = col.head(n * n);
    v.imag() = col.tail(n * n);
    out.push_back(hermitize(unvec(v, n, n)));
  }
  return out;
}

Matrix random_hermitian_combo(const std::vector<Matrix>& herm_basis, CounterRng& rng) {
  Matrix z = Matrix::Zero(herm_basis.front().rows(), herm_basis.front().cols());
  for (const Matrix& h : herm_basis) {
    z += Cplx(rng.next_gaussian(), 0.0) * h;
  }
  return z;
}

Matrix random_complex_combo(const std::vector<Matrix>& basis, CounterRng& rng) {
  Matrix z = Matrix::Zero(basis.front().rows(), basis.front().cols());
  for (const Matrix& b : basis) {
    z += rng.next_complex_gaussian() * b;
  }
  return z;
}

}  // namespace

AlgebraVerification verify_algebra(const std::vector<Matrix>& basis, const Tolerances& tol) {
  AlgebraVerification v;
  if (basis.empty()) return v;
  const int n = static_cast<int>(basis.front().rows());
  for (size_t k = 0; k < basis.size(); ++k) {
    for (size_t l = 0; l < basis.size(); ++l) {
      const double g = std::abs(hs_inner(basis[k], basis[l]) - (k == l ? 1.0 : 0.0));
      v.orthonormality = std::max(v.orthonormality, g);
    }
  }
  const Matrix unit = Matrix::Identity(n, n) / std::sqrt(static_cast<double>(n));
  v.unit_membership = span_relative_residual(basis, unit);
  for (const Matrix& b : basis) {
    v.adjoint_closure = std::max(v.adjoint_closure, span_relative_residual(basis, b.adjoint()));
  }
  for (const Matrix& bk : basis) {
    for (const Matrix& bl : basis) {
      // Products of HS-normalized elements can be numerically zero (e.g.
      // nilpotent matrix units), where a residual relative to the product's
      // own norm is meaningless; scale by the O(1) input norms instead.
      const Matrix p = bk * bl;
      Matrix resid = p;
      for (const Matrix& b : basis) {
        resid -= hs_inner(b, p) * b;
      }
      v.product_closure =
          std::max(v.product_closure, resid.norm() / std::max(1.0, p.norm()));
    }
  }
  v.ok = v.orthonormality <= tol.algebra_closure && v.unit_membership <= tol.algebra_closure &&
         v.adjoint_closure <= tol.algebra_closure && v.product_closure <= tol.algebra_closure;
  return v;
}

Subalgebra Subalgebra::from_basis(std::vector<Matrix> basis, const Tolerances& tol) {
  if (basis.empty()) throw ValidationError("empty_algebra", "subalgebra needs a basis");
  const int n = static_cast<int>(basis.front().rows());
  for (const Matrix& b : basis) {
    if (b.rows() != n || b.cols() != n) {
      throw DimensionMismatchError("subalgebra basis elements must share a square shape");
    }
  }
  const AlgebraVerification v = verify_algebra(basis, tol);
  if (!v.ok) {
    std::ostringstream os;
    os << "basis fails algebra invariants: orthonormality " << v.orthonormality << ", unit "
       << v.unit_membership << ", adjoint " << v.adjoint_closure << ", product "
       << v.product_closure;
    throw ValidationError("not_an_algebra", os.str());
  }
  return Subalgebra(std::move(basis), n);
}

Subalgebra Subalgebra::full(int n) {
  std::vector<Matrix> basis;
  basis.reserve(n * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      Matrix e = Matrix::Zero(n, n);
      e(a, b) = 1.0;
      basis.push_back(std::move(e));
    }
  }
  return Subalgebra(std::move(basis), n);
}

Subalgebra Subalgebra::diagonal(int n) {
  std::vector<Matrix> basis;
  basis.reserve(n);
  for (int a = 0; a < n; ++a) {
    Matrix e = Matrix::Zero(n, n);
    e(a, a) = 1.0;
    basis.push_back(std::move(e));
  }
  return Subalgebra(std::move(basis), n);
}

Subalgebra Subalgebra::tensor_factor(int d1, int d2, Factor which) {
  std::vector<Matrix> basis;
  if (which == Factor::Second) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(d1));
    const Matrix id = Matrix::Identity(d1, d1);
    basis.reserve(d2 * d2);
    for (int a = 0; a < d2; ++a) {
      for (int b = 0; b < d2; ++b) {
        Matrix e = Matrix::Zero(d2, d2);
        e(a, b) = scale;
        basis.push_back(tensor_product(id, e));
      }
    }
  } else {
    const double scale = 1.0 / std::sqrt(static_cast<double>(d2));
    const Matrix id = Matrix::Identity(d2, d2);
    basis.reserve(d1 * d1);
    for (int a = 0; a < d1; ++a) {
      for (int b = 0; b < d1; ++b) {
        Matrix e = Matrix::Zero(d1, d1);
        e(a, b) = scale;
        basis.push_back(tensor_product(e, id));
      }
    }
  }
  return Subalgebra(std::move(basis), d1 * d2);
}

Subalgebra close_generators(int n, const std::vector<Matrix>& generators, const Tolerances& tol) {
  std::vector<Matrix> seed;
  seed.push_back(Matrix::Identity(n, n));
  for (const Matrix& g : generators) {
    if (g.rows() != n || g.cols() != n) {
      throw DimensionMismatchError("generator shape does not match ambient dimension");
    }
    seed.push_back(g);
  }
  std::vector<Matrix> basis = orthonormalize_span(seed, tol.rank_truncation);
  for (int round = 0; round <= n * n + 1; ++round) {
    std::vector<Matrix> cands = basis;
    cands.reserve(basis.size() * (basis.size() + 2));
    for (const Matrix& b : basis) cands.push_back(b.adjoint());
    for (const Matrix& bk : basis) {
      for (const Matrix& bl : basis) {
        cands.push_back(bk * bl);
      }
    }
    std::vector<Matrix> next = orthonormalize_span(cands, tol.rank_truncation);
    const bool stable = next.size() == basis.size();
    basis = std::move(next);
    if (stable) break;
  }
  return Subalgebra::from_basis(std::move(basis), tol);
}

Matrix conditional_expectation_tau(const Subalgebra& alg, const Matrix& x) {
  if (x.rows() != alg.ambient_dim() || x.cols() != alg.ambient_dim()) {
    throw DimensionMismatchError("conditional expectation input dimension mismatch");
  }
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const Matrix& b : alg.basis()) {
    out += hs_inner(b, x) * b;
  }
  return out;
}

Subalgebra commutant(const Subalgebra& alg, const Tolerances& tol) {
  const int n = alg.ambient_dim();
  const int m = alg.dim();
  Matrix stacked(static_cast<Eigen::Index>(m) * n * n, n * n);
  const Matrix id = Matrix::Identity(n, n);
  for (int k = 0; k < m; ++k) {
    const Matrix& b = alg.basis()[k];
    stacked.middleRows(static_cast<Eigen::Index>(k) * n * n, n * n) =
        tensor_product(id, b) - tensor_product(b.transpose(), id);
  }
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  std::vector<Matrix> basis;
  for (int k = 0; k < s.size(); ++k) {
    if (s(k) <= tol.rank_truncation * std::max(smax, 1.0)) {
      basis.push_back(unvec(svd.matrixV().col(k), n, n));
    }
  }
  return Subalgebra::from_basis(std::move(basis), tol);
}

Subalgebra center_of(const Subalgebra& alg, const Tolerances& tol) {
  const Subalgebra comm = commutant(alg, tol);
  const int n = alg.ambient_dim();
  Matrix u(n * n, alg.dim());
  for (int k = 0; k < alg.dim(); ++k) u.col(k) = vec(alg.basis()[k]);
  Matrix v(n * n, comm.dim());
  for (int k = 0; k < comm.dim(); ++k) v.col(k) = vec(comm.basis()[k]);
  const Matrix inter = span_intersection(u, v, tol.rank_truncation);
  std::vector<Matrix> basis;
  basis.reserve(inter.cols());
  for (int k = 0; k < inter.cols(); ++k) {
    basis.push_back(unvec(inter.col(k), n, n));
  }
  return Subalgebra::from_basis(std::move(basis), tol);
}

Matrix compress_to_block(const FactorBlock& block, const Matrix& x) {
  return block.isometry.adjoint() * x * block.isometry;
}

namespace {

struct BlockAttempt {
  std::vector<FactorBlock> blocks;
  double max_residual = 0.0;
  bool ok = false;
  std::string why;
};

BlockAttempt attempt_decomposition(const Subalgebra& alg, const std::vector<Matrix>& center_herm,
                                   CounterRng& rng, const Tolerances& tol) {
  BlockAttempt out;
  const int n = alg.ambient_dim();
  const size_t center_dim = center_herm.size();

  const Matrix z = random_hermitian_combo(center_herm, rng);
  const EigenSystem zes = hermitian_eig(HermitianMatrix::average(z), tol);
  const auto groups = group_values(zes.eigenvalues, tol.eigenvalue_grouping);
  if (groups.size() != center_dim) {
    out.why = "central element eigenvalue collision";
    return out;
  }

  for (const auto& [start, len] : groups) {
    const Matrix q = zes.eigenvectors.middleCols(start, len);  // n x m_j
    // Basis of the algebra compressed to the block.
    std::vector<Matrix> restricted;
    restricted.reserve(alg.basis().size());
    for (const Matrix& b : alg.basis()) {
      restricted.push_back(q.adjoint() * b * q);
    }
    restricted = orthonormalize_span(restricted, tol.rank_truncation);
    const int rdim = static_cast<int>(restricted.size());
    const int d_right = static_cast<int>(std::lround(std::sqrt(static_cast<double>(rdim))));
    if (d_right * d_right != rdim || len % d_right != 0) {
      out.why = "restricted algebra dimension is not consistent with a factor";
      return out;
    }
    const int d_left = len / d_right;

    // Generic Hermitian element of the restricted algebra; its eigenvalues
    // must split into d_right groups of multiplicity d_left.
    const std::vector<Matrix> rherm = hermitian_basis(restricted);
    const Matrix w = random_hermitian_combo(rherm, rng);
    const EigenSystem wes = hermitian_eig(HermitianMatrix::average(w), tol);
    const auto wgroups = group_values(wes.eigenvalues, tol.eigenvalue_grouping);
    if (static_cast<int>(wgroups.size()) != d_right) {
      out.why = "generic block element eigenvalue collision";
      return out;
    }
    for (const auto& [ws, wl] : wgroups) {
      (void)ws;
      if (wl != d_left) {
        out.why = "generic block element multiplicity mismatch";
        return out;
      }
    }

    // Transport the first eigenspace basis through the algebra to label the
    // remaining ones consistently with the tensor structure.
    const Matrix t = random_complex_combo(restricted, rng);
    Matrix ublock(len, len);
    const Matrix u1 = wes.eigenvectors.middleCols(wgroups[0].first, d_left);
    for (int i = 0; i < d_left; ++i) {
      ublock.col(i * d_right + 0) = u1.col(i);
    }
    for (int a = 1; a < d_right; ++a) {
      const Matrix ua = wes.eigenvectors.middleCols(wgroups[a].first, d_left);
      const Matrix link = ua * (ua.adjoint() * t * u1);  // E_a T E_1 columns
      const double nu = link.col(0).norm();
      if (nu < kGeneric * t.norm()) {
        out.why = "degenerate transport element";
        return out;
      }
      for (int i = 0; i < d_left; ++i) {
        const double ni = link.col(i).norm();
        if (std::abs(ni - nu) > 1e-6 * std::max(nu, 1.0)) {
          out.why = "transport element norm inconsistency";
          return out;
        }
        ublock.col(i * d_right + a) = link.col(i) / nu;
      }
    }

    FactorBlock block;
    block.projection = q * q.adjoint();
    block.isometry = q * ublock;
    block.d_left = d_left;
    block.d_right = d_right;
    out.blocks.push_back(std::move(block));
  }

  // Structural verification: isometries, block form, reassembly.
  Matrix psum = Matrix::Zero(n, n);
  for (const FactorBlock& blk : out.blocks) {
    psum += blk.projection;
    const int bd = blk.d_left * blk.d_right;
    out.max_residual = std::max(
        out.max_residual,
        (blk.isometry.adjoint() * blk.isometry - Matrix::Identity(bd, bd)).norm());
    out.max_residual = std::max(
        out.max_residual, (blk.isometry * blk.isometry.adjoint() - blk.projection).norm());
    out.max_residual =
        std::max(out.max_residual, span_relative_residual(alg.basis(), blk.projection));
  }
  out.max_residual = std::max(out.max_residual, (psum - Matrix::Identity(n, n)).norm());
  for (const Matrix& b : alg.basis()) {
    Matrix reassembled = Matrix::Zero(n, n);
    for (const FactorBlock& blk : out.blocks) {
      const Matrix c = compress_to_block(blk, b);
      const Matrix a = partial_trace(c, blk.d_left, blk.d_right, Factor::First) /
                       static_cast<double>(blk.d_left);
      const Matrix lifted = tensor_product(Matrix::Identity(blk.d_left, blk.d_left), a);
      out.max_residual = std::max(out.max_residual, (c - lifted).norm() / std::max(b.norm(), 1.0));
      reassembled += blk.isometry * lifted * blk.isometry.adjoint();
    }
    out.max_residual = std::max(out.max_residual, (reassembled - b).norm() / std::max(b.norm(), 1.0));
  }
  if (out.max_residual > tol.factor_structure) {
    out.why = "structural residual too large";
    return out;
  }
  out.ok = true;
  return out;
}

}  // namespace

FactorDecomposition factor_decomposition(const Subalgebra& alg, std::uint64_t seed,
                                         const Tolerances& tol) {
  const Subalgebra center = center_of(alg, tol);
  const std::vector<Matrix> center_herm = hermitian_basis(center.basis());
  if (center_herm.size() != static_cast<size_t>(center.dim())) {
    throw StructureInconsistencyError("center hermitian basis dimension mismatch");
  }
  std::string last_why;
  for (int attempt = 0; attempt < tol.factor_retries; ++attempt) {
    CounterRng rng(CounterRng::substream(seed, static_cast<std::uint64_t>(attempt)));
    BlockAttempt att = attempt_decomposition(alg, center_herm, rng, tol);
    if (att.ok) {
      FactorDecomposition out;
      out.blocks = std::move(att.blocks);
      out.max_structure_residual = att.max_residual;
      return out;
    }
    last_why = att.why;
  }
  throw DegenerateRandomElementError("factor decomposition failed after retries: " + last_why);
}

}  // namespace qdpi
