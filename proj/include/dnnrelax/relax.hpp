#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dnnrelax/conic_core.hpp"
#include "dnnrelax/model.hpp"

namespace dnnrelax {

enum class Sense { Minimize, Maximize };

enum class Relaxation { Sdr, Sdr1, Sdr2, Dnnp, MaxCutSdr, MaxCutDnnp };

/// Accepts sdr, sdr1, sdr2, dnnp, mc-sdr, mc-dnnp; throws std::invalid_argument otherwise.
Relaxation parse_relaxation(std::string_view tag);
std::string to_string(Relaxation r);

/// Coefficient of entry Y(row, col), row <= col, in a linear functional on the
/// PSD block. The functional value is sum coef * Y(row, col).
struct PsdTerm {
  int row = 0;
  int col = 0;
  double coef = 0;
};

struct SparseTerm {
  int index = 0;
  double coef = 0;
};

struct EqRow {
  std::vector<PsdTerm> psd;
  std::vector<SparseTerm> nonneg;
  std::vector<SparseTerm> free;
  double rhs = 0;
  std::string tag;  // e.g. "diag[3]"; used in violation reports

  /// Dense svec of the symmetric coefficient matrix of the PSD part, so that
  /// dot(psd_svec, svec(Y)) equals the PSD contribution of this row.
  SVec psd_svec(int order) const;
};

/// A point of the (PSD block x nonneg orthant x free block) space.
struct ConicPoint {
  MatrixXd psd;  // psd_order x psd_order (0 x 0 when there is no PSD block)
  VectorXd nonneg;
  VectorXd free;
};

/// Weights w over rows with sum_i w_i row_i(Y) = v^T Y v, zero rhs and no
/// orthant or free part. Every feasible Y then satisfies Y v = 0.
struct FaceHint {
  VectorXd v;
  std::vector<SparseTerm> rows;
};

/// Standard-form program
///   min|max  C . Y + c_l^T s + c_f^T w + offset
///   s.t.     each row: (psd functional)(Y) + a_l^T s + a_f^T w = rhs
///            Y PSD, s >= 0, w free.
struct ConicProgram {
  Sense sense = Sense::Minimize;
  int psd_order = 0;
  int nonneg_count = 0;
  int free_count = 0;
  MatrixXd objective_psd;  // symmetric C
  VectorXd objective_nonneg;
  VectorXd objective_free;
  double offset = 0;
  std::vector<EqRow> rows;
  std::vector<FaceHint> face;  // optional; the solver verifies and uses it
  std::string label;

  int row_count() const { return static_cast<int>(rows.size()); }

  /// Throws DimensionError when a block or index is out of range.
  void validate() const;
};

/// Value of the row functional (without rhs).
double row_value(const EqRow& row, const ConicPoint& point);

/// Objective including the offset, in the program's own sense.
double objective_value(const ConicProgram& prog, const ConicPoint& point);

/// Where the model-space vector and matrix live inside the conic variables.
struct VariableMap {
  enum class Layout {
    Lifted,     // Y = [[1, v^T], [v, V]] is the whole PSD block
    SplitFree,  // v is the free block, V is the PSD block
    MatrixOnly  // V is the PSD block, no vector
  };
  Layout layout = Layout::Lifted;
  int n = 0;

  std::optional<VectorXd> extract_vector(const ConicPoint& point) const;
  SymMatrix extract_matrix(const ConicPoint& point) const;

  /// Builds the conic point for (v, V). Slacks that are pinned by a row with a
  /// single nonneg term are filled from that row.
  ConicPoint embed(const ConicProgram& prog, const std::optional<VectorXd>& v,
                   const SymMatrix& V) const;
};

struct BuiltProgram {
  ConicProgram program;
  VariableMap map;
};

/// Standard SDR: X PSD of order n, x free; rows a_i^T x = b_i, (a_i a_i^T).X = b_i^2, X_ii = 1.
BuiltProgram build_sdr(const BqpInstance& inst);

/// Lifted SDR: one PSD block [[1, x^T], [x, X]].
BuiltProgram build_sdr1(const BqpInstance& inst);

/// SDR1 plus 1 - x_i - x_j + X_ij - s_ij = 0, s_ij >= 0, for 1 <= i <= j <= n.
BuiltProgram build_sdr2(const BqpInstance& inst);

/// Data of the substitution z = (e - x) / 2.
struct ZSpaceData {
  MatrixXd Qz;    // 4 Q
  VectorXd qz;    // -4 (Q e + c)
  double constz;  // e^T Q e + 2 c^T e
  MatrixXd Az;    // rows 2 a_i^T
  VectorXd bz;    // a_i^T e - b_i
};

ZSpaceData build_zspace(const BqpInstance& inst);

/// z^T Qz z + qz^T z + constz.
double zspace_objective(const ZSpaceData& data, const VectorXd& z);

/// Doubly nonnegative relaxation in z-space: Y = [[1, z^T], [z, Z]] PSD, every
/// upper-triangular entry of Y linked to a nonneg slack.
BuiltProgram build_dnnp(const BqpInstance& inst);

/// max (1/4) L . U  s.t. U_ii = 1, U PSD.
BuiltProgram build_mc_sdr(const MaxCutGraph& g);

/// max L . X - (L e)^T x + (1/4) e^T L e  s.t. Y00 = 1, X_ii = x_i, Y PSD and entrywise >= 0.
BuiltProgram build_mc_dnnp(const MaxCutGraph& g);

BuiltProgram build_relaxation(Relaxation r, const BqpInstance& inst);

}  // namespace dnnrelax
