#pragma once

// Dense symmetric-matrix primitives: svec/smat vectorization, eigenvalue cone
// checks and Schur complements. Everything here is a pure function.

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dnnrelax {

using Eigen::MatrixXd;
using Eigen::VectorXd;

class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class SingularBlockError : public std::runtime_error {
 public:
  explicit SingularBlockError(const std::string& what) : std::runtime_error(what) {}
};

/// Symmetric matrix of order >= 1. The constructor mirrors the lower triangle
/// into the upper one, so the stored entries are always exactly symmetric.
class SymMatrix {
 public:
  explicit SymMatrix(int order);
  explicit SymMatrix(const MatrixXd& m);

  /// Rejects any asymmetry (exact comparison) instead of mirroring.
  static SymMatrix checked(const MatrixXd& m);
  static SymMatrix identity(int order);

  int order() const { return static_cast<int>(m_.rows()); }
  const MatrixXd& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  /// Writes both (i, j) and (j, i).
  void set(int i, int j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.m_ == b.m_;
  }

 private:
  MatrixXd m_;
};

struct SVec {
  int order = 0;
  VectorXd data;
};

constexpr int svec_length(int order) { return order * (order + 1) / 2; }

/// Lower-triangular column scan; off-diagonal entries are scaled by sqrt(2) so
/// that dot(svec(A), svec(B)) == trace(A B).
SVec svec(const SymMatrix& m);
SymMatrix smat(const SVec& v);

/// Position of entry (i, j) (any order) inside svec data.
int svec_index(int order, int i, int j);

double trace_inner(const SymMatrix& a, const SymMatrix& b);

double min_eigenvalue(const SymMatrix& m);
double spectral_radius(const SymMatrix& m);

/// min_eigenvalue(m) >= -tol * max(1, spectral_radius(m)).
bool is_psd(const SymMatrix& m, double tol);

/// Signed PSD margin min_eigenvalue / max(1, spectral_radius); negative means
/// outside the cone.
double psd_margin(const SymMatrix& m);

/// H = C - B^T A^{-1} B where A is the leading k x k block. Throws
/// SingularBlockError when A is singular or its condition estimate exceeds 1e12.
SymMatrix schur_complement(const SymMatrix& m, int split);

/// Assembles [[alpha, x^T], [x, X]].
SymMatrix lifted_matrix(double alpha, const VectorXd& x, const SymMatrix& X);

/// is_psd of the lifted (1 + n) matrix [[alpha, x^T], [x, X]].
bool lifted_psd_check(double alpha, const VectorXd& x, const SymMatrix& X, double tol);

}  // namespace dnnrelax
