#ifndef ISOCALC_HERMITIAN_HPP
#define ISOCALC_HERMITIAN_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include "isocalc/errors.hpp"

namespace isocalc {

using Index = Eigen::Index;

template <typename Real>
using ComplexMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Largest absolute deviation of M from its conjugate transpose.
template <typename Derived>
typename Derived::RealScalar hermitian_asymmetry(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// A d x d complex self-adjoint matrix.
///
/// The stored entries are always exactly Hermitian: construction replaces the
/// input M by (M + M*)/2 and zeroes the imaginary part of the diagonal. Inputs
/// whose asymmetry exceeds the tolerance are rejected; the default tolerance is
/// 1e-10 times the largest entry modulus, which absorbs file I/O rounding.
template <typename Real>
class HermitianMatrix {
 public:
  using Scalar = std::complex<Real>;
  using Matrix = ComplexMatrix<Real>;

  HermitianMatrix() = default;

  /// `tol < 0` selects the default relative tolerance.
  explicit HermitianMatrix(const Matrix& m, Real tol = Real(-1)) { assign(m, tol); }

  explicit HermitianMatrix(const RealMatrix<Real>& m, Real tol = Real(-1)) {
    assign(m.template cast<Scalar>(), tol);
  }

  static Real default_tolerance(const Matrix& m) {
    const Real scale = m.size() == 0 ? Real(0) : m.cwiseAbs().maxCoeff();
    return Real(1e-10) * scale;
  }

  /// Symmetrizes unconditionally. Used for results of floating-point formulas
  /// that are Hermitian in exact arithmetic; the discarded part is kept in
  /// `asymmetry()`.
  static HermitianMatrix symmetrized(const Matrix& m) {
    HermitianMatrix h;
    h.assign(m, std::numeric_limits<Real>::infinity());
    return h;
  }

  static HermitianMatrix zero(Index d) { return HermitianMatrix(Matrix(Matrix::Zero(d, d))); }
  static HermitianMatrix identity(Index d) { return HermitianMatrix(Matrix(Matrix::Identity(d, d))); }
  static HermitianMatrix diagonal(const RealVector<Real>& v) {
    return HermitianMatrix(Matrix(v.template cast<Scalar>().asDiagonal()));
  }

  Index dim() const { return m_.rows(); }
  const Matrix& matrix() const { return m_; }
  Scalar operator()(Index i, Index j) const { return m_(i, j); }

  /// Max-norm asymmetry of the input before symmetrization.
  Real asymmetry() const { return asymmetry_; }

  HermitianMatrix operator+(const HermitianMatrix& o) const { return combine(m_ + o.m_, o); }
  HermitianMatrix operator-(const HermitianMatrix& o) const { return combine(m_ - o.m_, o); }
  HermitianMatrix operator-() const { return symmetrized(-m_); }
  HermitianMatrix operator*(Real c) const { return symmetrized(c * m_); }
  friend HermitianMatrix operator*(Real c, const HermitianMatrix& h) { return h * c; }

  bool operator==(const HermitianMatrix& o) const { return m_ == o.m_; }

 private:
  HermitianMatrix combine(const Matrix& m, const HermitianMatrix& o) const {
    if (o.dim() != dim()) throw DimensionMismatch("hermitian matrices of different dimension");
    return symmetrized(m);
  }

  void assign(const Matrix& m, Real tol) {
    if (m.rows() != m.cols()) {
      std::ostringstream os;
      os << "matrix is " << m.rows() << "x" << m.cols() << ", expected square";
      throw InvalidInput(os.str());
    }
    if (!m.allFinite()) throw InvalidInput("matrix has non-finite entries");
    if (tol < 0) tol = default_tolerance(m);
    asymmetry_ = hermitian_asymmetry(m);
    if (asymmetry_ > tol) {
      std::ostringstream os;
      os << "matrix is not Hermitian: max |M - M*| = " << asymmetry_ << " exceeds " << tol;
      throw InvalidInput(os.str());
    }
    m_ = (m + m.adjoint()) / Real(2);
    for (Index i = 0; i < m_.rows(); ++i) m_(i, i) = Scalar(m_(i, i).real(), 0);
  }

  Matrix m_;
  Real asymmetry_ = 0;
};

/// A = U diag(alpha) U* with alpha non-increasing.
template <typename Real>
struct SpectralDecomposition {
  ComplexMatrix<Real> U;
  RealVector<Real> alpha;

  Index dim() const { return alpha.size(); }

  ComplexMatrix<Real> reconstruct() const {
    return U * alpha.template cast<std::complex<Real>>().asDiagonal() * U.adjoint();
  }
};

/// Dense Hermitian eigendecomposition, eigenvalues sorted non-increasingly.
/// The eigenvector phases and the basis inside repeated eigenspaces are
/// whatever the solver returns.
template <typename Real>
SpectralDecomposition<Real> eig_sorted(const HermitianMatrix<Real>& a) {
  const Index d = a.dim();
  SpectralDecomposition<Real> out;
  if (d == 0) return out;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(a.matrix(), Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    const int budget = static_cast<int>(Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>>::m_maxIterations * d);
    std::ostringstream os;
    os << "Hermitian eigensolver did not converge within " << budget << " QR iterations (d=" << d << ")";
    throw NumericalError(os.str(), budget);
  }
  // Eigen returns ascending order.
  out.alpha = solver.eigenvalues().reverse();
  out.U = solver.eigenvectors().rowwise().reverse();
  return out;
}

/// Operator norm of A: largest eigenvalue modulus.
template <typename Real>
Real operator_norm(const SpectralDecomposition<Real>& dec) {
  return dec.alpha.size() == 0 ? Real(0) : dec.alpha.cwiseAbs().maxCoeff();
}

/// Block tolerance used when none is given: max(1e-8, 1e-12 ||A||).
template <typename Real>
Real default_block_tol(const SpectralDecomposition<Real>& dec) {
  return std::max(Real(1e-8), Real(1e-12) * operator_norm(dec));
}

/// Partition of the sorted index range into runs of (numerically) equal
/// eigenvalues. Blocks are contiguous and listed in order of decreasing value.
template <typename Real>
struct BlockStructure {
  struct Block {
    Index begin;
    Index size;
    Index end() const { return begin + size; }
    bool contains(Index i) const { return i >= begin && i < end(); }
  };

  std::vector<Block> blocks;
  /// Representative value per block (mean of its eigenvalues).
  RealVector<Real> distinct_values;
  Real tol_used = 0;

  Index count() const { return static_cast<Index>(blocks.size()); }
  Index dim() const { return blocks.empty() ? 0 : blocks.back().end(); }

  /// Block index of sorted position i.
  Index block_of(Index i) const {
    for (Index b = 0; b < count(); ++b)
      if (blocks[b].contains(i)) return b;
    throw InvalidInput("index outside block structure");
  }

  std::vector<Index> membership() const {
    std::vector<Index> out(static_cast<std::size_t>(dim()));
    for (Index b = 0; b < count(); ++b)
      for (Index i = blocks[b].begin; i < blocks[b].end(); ++i) out[static_cast<std::size_t>(i)] = b;
    return out;
  }

  bool has_repeated() const {
    return std::any_of(blocks.begin(), blocks.end(), [](const Block& b) { return b.size > 1; });
  }
};

/// Greedy clustering of a non-increasing vector: a new block starts exactly
/// where alpha[m] - alpha[m+1] > tol.
template <typename Derived>
BlockStructure<typename Derived::Scalar> block_partition(const Eigen::MatrixBase<Derived>& alpha,
                                                         typename Derived::Scalar tol) {
  using Real = typename Derived::Scalar;
  if (tol < 0) throw InvalidInput("block tolerance must be non-negative");
  BlockStructure<Real> out;
  out.tol_used = tol;
  const Index d = alpha.size();
  for (Index m = 0; m + 1 < d; ++m)
    if (alpha(m) < alpha(m + 1)) throw InvalidInput("eigenvalue vector is not non-increasing");
  Index start = 0;
  for (Index m = 0; m < d; ++m) {
    if (m + 1 == d || alpha(m) - alpha(m + 1) > tol) {
      out.blocks.push_back({start, m + 1 - start});
      start = m + 1;
    }
  }
  out.distinct_values.resize(out.count());
  for (Index b = 0; b < out.count(); ++b)
    out.distinct_values(b) = alpha.segment(out.blocks[b].begin, out.blocks[b].size).mean();
  return out;
}

/// Ehat = U* M U.
template <typename Real>
HermitianMatrix<Real> conjugate_by(const ComplexMatrix<Real>& u, const HermitianMatrix<Real>& m,
                                   Real unitarity_tol = Real(1e-10)) {
  if (u.rows() != m.dim() || u.cols() != m.dim()) throw DimensionMismatch("conjugate_by: U and M differ in dimension");
  const Index d = m.dim();
  const Real defect = (u.adjoint() * u - ComplexMatrix<Real>::Identity(d, d)).norm();
  if (defect > unitarity_tol * std::max<Real>(1, std::sqrt(Real(d)))) {
    std::ostringstream os;
    os << "conjugate_by: U is not unitary, ||U*U - I||_F = " << defect;
    throw InvalidInput(os.str());
  }
  return HermitianMatrix<Real>::symmetrized(u.adjoint() * m.matrix() * u);
}

template <typename Real>
struct Norms {
  Real frobenius;
  Real operator_norm;
};

template <typename Real>
Norms<Real> norms(const HermitianMatrix<Real>& m) {
  if (m.dim() == 0) return {0, 0};
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<Real>> solver(m.matrix(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericalError("norms: eigenvalue iteration failed");
  return {m.matrix().norm(), solver.eigenvalues().cwiseAbs().maxCoeff()};
}

}  // namespace isocalc

#endif  // ISOCALC_HERMITIAN_HPP
