#include "dnnrelax/relax.hpp"

#include <cmath>
#include <stdexcept>

namespace dnnrelax {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void add_psd(EqRow& row, int i, int j, double coef) {
  if (coef == 0.0) return;
  if (i > j) std::swap(i, j);
  row.psd.push_back({i, j, coef});
}

// (a a^T) . V over the block starting at `shift`, scaled by `scale`.
void add_rank_one(EqRow& row, const VectorXd& a, int shift, double scale) {
  const int n = static_cast<int>(a.size());
  for (int k = 0; k < n; ++k) {
    add_psd(row, shift + k, shift + k, scale * a(k) * a(k));
    for (int l = k + 1; l < n; ++l) add_psd(row, shift + k, shift + l, 2.0 * scale * a(k) * a(l));
  }
}

EqRow tagged(std::string tag, double rhs) {
  EqRow r;
  r.tag = std::move(tag);
  r.rhs = rhs;
  return r;
}

std::string idx(const char* name, int i) { return std::string(name) + "[" + std::to_string(i) + "]"; }

std::string idx(const char* name, int i, int j) {
  return std::string(name) + "[" + std::to_string(i) + "," + std::to_string(j) + "]";
}

ConicProgram empty_program(Sense sense, int d, int p, int f, std::string label) {
  ConicProgram prog;
  prog.sense = sense;
  prog.psd_order = d;
  prog.nonneg_count = p;
  prog.free_count = f;
  prog.objective_psd = MatrixXd::Zero(d, d);
  prog.objective_nonneg = VectorXd::Zero(p);
  prog.objective_free = VectorXd::Zero(f);
  prog.label = std::move(label);
  return prog;
}

// Rows shared by SDR1 and SDR2 on the lifted block [[1, x^T], [x, X]].
// Y00 = 1 on the lifted block [[1, v^T], [v, V]].
int add_corner_row(ConicProgram& prog) {
  EqRow corner = tagged("corner", 1.0);
  add_psd(corner, 0, 0, 1.0);
  prog.rows.push_back(corner);
  return prog.row_count() - 1;
}

// Rows lin[i]: alpha a_i^T v = beta_i and quad[i]: alpha^2 (a_i a_i^T) . V = beta_i^2.
// With the corner row they force Y (-beta_i, alpha a_i) = 0, recorded as a face hint.
void add_lifted_linear_rows(ConicProgram& prog, int corner_row, const MatrixXd& a,
                            const VectorXd& beta, double alpha) {
  const int n = static_cast<int>(a.cols());
  const int m = static_cast<int>(a.rows());
  const int first = prog.row_count();
  for (int i = 0; i < m; ++i) {
    EqRow r = tagged(idx("lin", i), beta(i));
    for (int k = 0; k < n; ++k) add_psd(r, 0, k + 1, alpha * a(i, k));
    prog.rows.push_back(r);
  }
  for (int i = 0; i < m; ++i) {
    EqRow r = tagged(idx("quad", i), beta(i) * beta(i));
    add_rank_one(r, a.row(i).transpose(), 1, alpha * alpha);
    prog.rows.push_back(r);
  }
  for (int i = 0; i < m; ++i) {
    FaceHint h;
    h.v.resize(n + 1);
    h.v(0) = -beta(i);
    h.v.tail(n) = alpha * a.row(i).transpose();
    h.rows = {{corner_row, beta(i) * beta(i)},
              {first + i, -2.0 * beta(i)},
              {first + m + i, 1.0}};
    prog.face.push_back(std::move(h));
  }
}

void add_sdr1_rows(ConicProgram& prog, const BqpInstance& inst) {
  const int n = inst.n();
  const int corner = add_corner_row(prog);
  add_lifted_linear_rows(prog, corner, inst.A, inst.b, 1.0);
  for (int k = 0; k < n; ++k) {
    EqRow r = tagged(idx("diag", k), 1.0);
    add_psd(r, k + 1, k + 1, 1.0);
    prog.rows.push_back(r);
  }
}

MatrixXd lifted_objective(const MatrixXd& quad, const VectorXd& half_linear) {
  // C . Y = quad . V + 2 half_linear^T v
  const int n = static_cast<int>(quad.rows());
  MatrixXd c = MatrixXd::Zero(n + 1, n + 1);
  c.bottomRightCorner(n, n) = quad;
  c.block(1, 0, n, 1) = half_linear;
  c.block(0, 1, 1, n) = half_linear.transpose();
  return c;
}

// Y_kl - s_kl = 0 for every upper-triangular entry of an order-d block.
void add_nonneg_links(ConicProgram& prog, int d) {
  int slack = 0;
  for (int k = 0; k < d; ++k) {
    for (int l = k; l < d; ++l) {
      EqRow r = tagged(idx("nonneg", k, l), 0.0);
      add_psd(r, k, l, 1.0);
      r.nonneg.push_back({slack++, -1.0});
      prog.rows.push_back(r);
    }
  }
}

}  // namespace

Relaxation parse_relaxation(std::string_view tag) {
  if (tag == "sdr") return Relaxation::Sdr;
  if (tag == "sdr1") return Relaxation::Sdr1;
  if (tag == "sdr2") return Relaxation::Sdr2;
  if (tag == "dnnp") return Relaxation::Dnnp;
  if (tag == "mc-sdr") return Relaxation::MaxCutSdr;
  if (tag == "mc-dnnp") return Relaxation::MaxCutDnnp;
  throw std::invalid_argument("unknown relaxation tag '" + std::string(tag) + "'");
}

std::string to_string(Relaxation r) {
  switch (r) {
    case Relaxation::Sdr: return "sdr";
    case Relaxation::Sdr1: return "sdr1";
    case Relaxation::Sdr2: return "sdr2";
    case Relaxation::Dnnp: return "dnnp";
    case Relaxation::MaxCutSdr: return "mc-sdr";
    case Relaxation::MaxCutDnnp: return "mc-dnnp";
  }
  return "?";
}

SVec EqRow::psd_svec(int order) const {
  SVec v{order, VectorXd::Zero(svec_length(order))};
  for (const PsdTerm& t : psd) {
    // coefficient matrix entry is coef (diagonal) or coef / 2 (off-diagonal)
    const double entry = t.row == t.col ? t.coef : t.coef * kInvSqrt2;
    v.data(svec_index(order, t.row, t.col)) += entry;
  }
  return v;
}

void ConicProgram::validate() const {
  if (psd_order < 0 || nonneg_count < 0 || free_count < 0) {
    throw DimensionError("negative block size");
  }
  if (objective_psd.rows() != psd_order || objective_psd.cols() != psd_order ||
      objective_nonneg.size() != nonneg_count || objective_free.size() != free_count) {
    throw DimensionError("objective blocks do not match (d, p, f)");
  }
  if (!std::isfinite(offset)) throw NumericError("objective offset is not finite");
  for (const EqRow& r : rows) {
    for (const PsdTerm& t : r.psd) {
      if (t.row < 0 || t.col < t.row || t.col >= psd_order) {
        throw DimensionError("row '" + r.tag + "' has a PSD term outside the block");
      }
    }
    for (const SparseTerm& t : r.nonneg) {
      if (t.index < 0 || t.index >= nonneg_count) {
        throw DimensionError("row '" + r.tag + "' has a nonneg term outside the block");
      }
    }
    for (const SparseTerm& t : r.free) {
      if (t.index < 0 || t.index >= free_count) {
        throw DimensionError("row '" + r.tag + "' has a free term outside the block");
      }
    }
  }
  for (const FaceHint& h : face) {
    if (h.v.size() != psd_order) throw DimensionError("face hint vector does not match the PSD order");
    for (const SparseTerm& t : h.rows) {
      if (t.index < 0 || t.index >= row_count()) throw DimensionError("face hint names a missing row");
    }
  }
}

double row_value(const EqRow& row, const ConicPoint& point) {
  double v = 0;
  for (const PsdTerm& t : row.psd) v += t.coef * point.psd(t.row, t.col);
  for (const SparseTerm& t : row.nonneg) v += t.coef * point.nonneg(t.index);
  for (const SparseTerm& t : row.free) v += t.coef * point.free(t.index);
  return v;
}

double objective_value(const ConicProgram& prog, const ConicPoint& point) {
  double v = prog.offset;
  if (prog.psd_order > 0) v += prog.objective_psd.cwiseProduct(point.psd).sum();
  if (prog.nonneg_count > 0) v += prog.objective_nonneg.dot(point.nonneg);
  if (prog.free_count > 0) v += prog.objective_free.dot(point.free);
  return v;
}

std::optional<VectorXd> VariableMap::extract_vector(const ConicPoint& point) const {
  switch (layout) {
    case Layout::Lifted: return VectorXd(point.psd.block(1, 0, n, 1));
    case Layout::SplitFree: return VectorXd(point.free.head(n));
    case Layout::MatrixOnly: return std::nullopt;
  }
  return std::nullopt;
}

SymMatrix VariableMap::extract_matrix(const ConicPoint& point) const {
  if (layout == Layout::Lifted) return SymMatrix(MatrixXd(point.psd.bottomRightCorner(n, n)));
  return SymMatrix(MatrixXd(point.psd.topLeftCorner(n, n)));
}

ConicPoint VariableMap::embed(const ConicProgram& prog, const std::optional<VectorXd>& v,
                              const SymMatrix& V) const {
  if (V.order() != n) throw DimensionError("embed: matrix order differs from the map");
  if (layout != Layout::MatrixOnly && (!v || v->size() != n)) {
    throw DimensionError("embed: vector missing or of wrong length");
  }
  ConicPoint p;
  p.nonneg = VectorXd::Zero(prog.nonneg_count);
  p.free = VectorXd::Zero(prog.free_count);
  switch (layout) {
    case Layout::Lifted:
      p.psd = lifted_matrix(1.0, *v, V).mat();
      break;
    case Layout::SplitFree:
      p.psd = V.mat();
      p.free.head(n) = *v;
      break;
    case Layout::MatrixOnly:
      p.psd = V.mat();
      break;
  }
  for (const EqRow& r : prog.rows) {
    if (r.nonneg.size() != 1) continue;
    const SparseTerm t = r.nonneg.front();
    EqRow rest = r;
    rest.nonneg.clear();
    p.nonneg(t.index) = (r.rhs - row_value(rest, p)) / t.coef;
  }
  return p;
}

BuiltProgram build_sdr(const BqpInstance& inst) {
  inst.validate();
  const int n = inst.n();
  ConicProgram prog = empty_program(Sense::Minimize, n, 0, n, "sdr");
  prog.objective_psd = inst.Q.mat();
  prog.objective_free = 2.0 * inst.c;
  for (int i = 0; i < inst.m(); ++i) {
    EqRow r = tagged(idx("lin", i), inst.b(i));
    for (int k = 0; k < n; ++k) {
      if (inst.A(i, k) != 0.0) r.free.push_back({k, inst.A(i, k)});
    }
    prog.rows.push_back(r);
  }
  for (int i = 0; i < inst.m(); ++i) {
    EqRow r = tagged(idx("quad", i), inst.b(i) * inst.b(i));
    add_rank_one(r, inst.A.row(i).transpose(), 0, 1.0);
    prog.rows.push_back(r);
  }
  for (int k = 0; k < n; ++k) {
    EqRow r = tagged(idx("diag", k), 1.0);
    add_psd(r, k, k, 1.0);
    prog.rows.push_back(r);
  }
  return {std::move(prog), {VariableMap::Layout::SplitFree, n}};
}

BuiltProgram build_sdr1(const BqpInstance& inst) {
  inst.validate();
  const int n = inst.n();
  ConicProgram prog = empty_program(Sense::Minimize, n + 1, 0, 0, "sdr1");
  prog.objective_psd = lifted_objective(inst.Q.mat(), inst.c);
  add_sdr1_rows(prog, inst);
  return {std::move(prog), {VariableMap::Layout::Lifted, n}};
}

BuiltProgram build_sdr2(const BqpInstance& inst) {
  inst.validate();
  const int n = inst.n();
  ConicProgram prog = empty_program(Sense::Minimize, n + 1, n * (n + 1) / 2, 0, "sdr2");
  prog.objective_psd = lifted_objective(inst.Q.mat(), inst.c);
  add_sdr1_rows(prog, inst);
  int slack = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      // 1 - x_i - x_j + X_ij - s_ij = 0
      EqRow r = tagged(idx("cut", i, j), -1.0);
      if (i == j) {
        add_psd(r, 0, i + 1, -2.0);
      } else {
        add_psd(r, 0, i + 1, -1.0);
        add_psd(r, 0, j + 1, -1.0);
      }
      add_psd(r, i + 1, j + 1, 1.0);
      r.nonneg.push_back({slack++, -1.0});
      prog.rows.push_back(r);
    }
  }
  return {std::move(prog), {VariableMap::Layout::Lifted, n}};
}

ZSpaceData build_zspace(const BqpInstance& inst) {
  inst.validate();
  const VectorXd e = VectorXd::Ones(inst.n());
  ZSpaceData z;
  z.Qz = 4.0 * inst.Q.mat();
  z.qz = -4.0 * (inst.Q.mat() * e + inst.c);
  z.constz = e.dot(inst.Q.mat() * e) + 2.0 * inst.c.dot(e);
  z.Az = 2.0 * inst.A;
  z.bz = inst.A * e - inst.b;
  return z;
}

double zspace_objective(const ZSpaceData& data, const VectorXd& z) {
  if (z.size() != data.Qz.rows()) throw DimensionError("zspace_objective: dim(z) != n");
  return z.dot(data.Qz * z) + data.qz.dot(z) + data.constz;
}

BuiltProgram build_dnnp(const BqpInstance& inst) {
  const ZSpaceData zs = build_zspace(inst);
  const int n = inst.n();
  const int d = n + 1;
  ConicProgram prog = empty_program(Sense::Minimize, d, d * (d + 1) / 2, 0, "dnnp");
  prog.objective_psd = lifted_objective(zs.Qz, 0.5 * zs.qz);
  prog.offset = zs.constz;

  const int corner = add_corner_row(prog);
  for (int k = 0; k < n; ++k) {
    // Z_kk - z_k = 0
    EqRow r = tagged(idx("diag", k), 0.0);
    add_psd(r, k + 1, k + 1, 1.0);
    add_psd(r, 0, k + 1, -1.0);
    prog.rows.push_back(r);
  }
  add_lifted_linear_rows(prog, corner, inst.A, zs.bz, 2.0);
  add_nonneg_links(prog, d);
  return {std::move(prog), {VariableMap::Layout::Lifted, n}};
}

BuiltProgram build_mc_sdr(const MaxCutGraph& g) {
  const int n = g.n();
  ConicProgram prog = empty_program(Sense::Maximize, n, 0, 0, "mc-sdr");
  prog.objective_psd = 0.25 * laplacian(g).mat();
  for (int k = 0; k < n; ++k) {
    EqRow r = tagged(idx("diag", k), 1.0);
    add_psd(r, k, k, 1.0);
    prog.rows.push_back(r);
  }
  return {std::move(prog), {VariableMap::Layout::MatrixOnly, n}};
}

BuiltProgram build_mc_dnnp(const MaxCutGraph& g) {
  const int n = g.n();
  const int d = n + 1;
  const MatrixXd l = laplacian(g).mat();
  const VectorXd le = l.rowwise().sum();
  ConicProgram prog = empty_program(Sense::Maximize, d, d * (d + 1) / 2, 0, "mc-dnnp");
  // L . X - (L e)^T x
  prog.objective_psd = lifted_objective(l, -0.5 * le);
  prog.offset = 0.25 * le.sum();

  add_corner_row(prog);
  for (int k = 0; k < n; ++k) {
    EqRow r = tagged(idx("diag", k), 0.0);
    add_psd(r, k + 1, k + 1, 1.0);
    add_psd(r, 0, k + 1, -1.0);
    prog.rows.push_back(r);
  }
  add_nonneg_links(prog, d);
  return {std::move(prog), {VariableMap::Layout::Lifted, n}};
}

BuiltProgram build_relaxation(Relaxation r, const BqpInstance& inst) {
  switch (r) {
    case Relaxation::Sdr: return build_sdr(inst);
    case Relaxation::Sdr1: return build_sdr1(inst);
    case Relaxation::Sdr2: return build_sdr2(inst);
    case Relaxation::Dnnp: return build_dnnp(inst);
    case Relaxation::MaxCutSdr:
    case Relaxation::MaxCutDnnp:
      throw std::invalid_argument("max-cut relaxations are built from a graph");
  }
  throw std::invalid_argument("unknown relaxation");
}

}  // namespace dnnrelax
