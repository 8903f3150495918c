#include "dnnrelax/conic_core.hpp"

#include <algorithm>
#include <cmath>

namespace dnnrelax {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

void require_finite(const MatrixXd& m) {
  if (!m.allFinite()) throw NumericError("matrix has non-finite entries");
}

Eigen::VectorXd eigenvalues(const SymMatrix& m) {
  require_finite(m.mat());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m.mat(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("eigenvalue iteration did not converge");
  return es.eigenvalues();
}

}  // namespace

SymMatrix::SymMatrix(int order) {
  if (order < 1) throw DimensionError("SymMatrix order must be >= 1");
  m_ = MatrixXd::Zero(order, order);
}

SymMatrix::SymMatrix(const MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionError("SymMatrix needs a non-empty square matrix");
  }
  m_ = m;
  m_.triangularView<Eigen::StrictlyUpper>() = m.transpose().triangularView<Eigen::StrictlyUpper>();
}

SymMatrix SymMatrix::checked(const MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DimensionError("SymMatrix needs a non-empty square matrix");
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < m.rows(); ++i) {
      if (m(i, j) != m(j, i)) {
        throw DimensionError("matrix is not symmetric at (" + std::to_string(i) + ", " +
                             std::to_string(j) + ")");
      }
    }
  }
  return SymMatrix(m);
}

SymMatrix SymMatrix::identity(int order) {
  if (order < 1) throw DimensionError("SymMatrix order must be >= 1");
  return SymMatrix(MatrixXd::Identity(order, order));
}

int svec_index(int order, int i, int j) {
  if (i < j) std::swap(i, j);
  // column j starts after columns 0..j-1, each of length order - col
  return j * order - j * (j - 1) / 2 + (i - j);
}

SVec svec(const SymMatrix& m) {
  const int d = m.order();
  SVec v{d, VectorXd(svec_length(d))};
  int k = 0;
  for (int j = 0; j < d; ++j) {
    v.data(k++) = m(j, j);
    for (int i = j + 1; i < d; ++i) v.data(k++) = kSqrt2 * m(i, j);
  }
  return v;
}

SymMatrix smat(const SVec& v) {
  if (v.order < 1 || v.data.size() != svec_length(v.order)) {
    throw DimensionError("svec data length " + std::to_string(v.data.size()) +
                         " does not match order " + std::to_string(v.order));
  }
  const int d = v.order;
  MatrixXd m(d, d);
  int k = 0;
  for (int j = 0; j < d; ++j) {
    m(j, j) = v.data(k++);
    for (int i = j + 1; i < d; ++i) {
      const double x = v.data(k++) / kSqrt2;
      m(i, j) = x;
      m(j, i) = x;
    }
  }
  return SymMatrix(m);
}

double trace_inner(const SymMatrix& a, const SymMatrix& b) {
  if (a.order() != b.order()) throw DimensionError("trace_inner order mismatch");
  return a.mat().cwiseProduct(b.mat()).sum();
}

double min_eigenvalue(const SymMatrix& m) { return eigenvalues(m)(0); }

double spectral_radius(const SymMatrix& m) {
  const VectorXd ev = eigenvalues(m);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

double psd_margin(const SymMatrix& m) {
  const VectorXd ev = eigenvalues(m);
  const double rho = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
  return ev(0) / std::max(1.0, rho);
}

bool is_psd(const SymMatrix& m, double tol) {
  if (tol < 0) throw std::invalid_argument("is_psd tolerance must be >= 0");
  return psd_margin(m) >= -tol;
}

SymMatrix schur_complement(const SymMatrix& m, int split) {
  const int d = m.order();
  if (split < 1 || split >= d) {
    throw DimensionError("schur split must lie in [1, order - 1]");
  }
  require_finite(m.mat());
  const MatrixXd a = m.mat().topLeftCorner(split, split);
  const MatrixXd b = m.mat().topRightCorner(split, d - split);
  const MatrixXd c = m.mat().bottomRightCorner(d - split, d - split);

  Eigen::LDLT<MatrixXd> ldlt(a);
  const double rcond = ldlt.rcond();
  if (ldlt.info() != Eigen::Success || !(rcond > 1e-12)) {
    throw SingularBlockError("leading block is singular or ill-conditioned (rcond " +
                             std::to_string(rcond) + ")");
  }
  return SymMatrix(MatrixXd(c - b.transpose() * ldlt.solve(b)));
}

SymMatrix lifted_matrix(double alpha, const VectorXd& x, const SymMatrix& X) {
  if (x.size() != X.order()) throw DimensionError("lifted matrix: dim(x) != order(X)");
  const int n = X.order();
  MatrixXd m(n + 1, n + 1);
  m(0, 0) = alpha;
  m.block(1, 0, n, 1) = x;
  m.block(0, 1, 1, n) = x.transpose();
  m.bottomRightCorner(n, n) = X.mat();
  return SymMatrix(m);
}

bool lifted_psd_check(double alpha, const VectorXd& x, const SymMatrix& X, double tol) {
  if (!(alpha > 0)) throw std::invalid_argument("lifted_psd_check needs alpha > 0");
  return is_psd(lifted_matrix(alpha, x, X), tol);
}

}  // namespace dnnrelax
