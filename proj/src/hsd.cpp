#include "hsd.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <utility>
#include <vector>

namespace dnnrelax::detail {

namespace {

// The embedding runs in extended precision: the Newton systems of degenerate
// relaxations lose about eight digits near the optimum.
using Real = long double;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

constexpr Real kInf = std::numeric_limits<Real>::infinity();
constexpr Real kStepFraction = 0.99L;
constexpr Real kRegularization = 1e-18L;
constexpr int kRefineSteps = 8;


// Symmetric coefficient-matrix entry: A(k, l) = A(l, k) = a, k <= l.
struct SymEntry {
  int k = 0;
  int l = 0;
  Real a = 0;
};

Real inner(const Mat& a, const Mat& b) { return a.cwiseProduct(b).sum(); }

Mat symmetrized(const Mat& m) { return 0.5 * (m + m.transpose()); }

// Largest alpha with X + alpha dX PSD (inf if unbounded), X assumed PD.
Real max_step_psd(const Mat& x, const Mat& dx) {
  if (x.rows() == 0) return kInf;
  Eigen::LLT<Mat> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  const auto l = llt.matrixL();
  Mat p = l.solve(dx);
  p = l.solve(p.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetrized(p), Eigen::EigenvaluesOnly);
  const Real lmin = es.eigenvalues()(0);
  return lmin >= 0 ? kInf : -1.0 / lmin;
}

Real max_step_vec(const Vec& v, const Vec& dv) {
  Real alpha = kInf;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0) alpha = std::min<Real>(alpha, -v(i) / dv(i));
  }
  return alpha;
}

Real max_step_scalar(Real v, Real dv) { return dv < 0 ? -v / dv : kInf; }

// Nesterov-Todd scaling X = W S W with W = G G^T and G^{-1} X G^{-T} = G^T S G = diag(lambda).
struct NtScaling {
  Mat G;
  Mat Gi;
  Mat W;
  Vec lambda;
};

bool compute_nt(const Mat& x, const Mat& s, NtScaling& nt) {
  Eigen::LLT<Mat> lx(x);
  Eigen::LLT<Mat> ls(s);
  if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return false;
  const Mat l = lx.matrixL();
  const Mat r = ls.matrixL();
  Eigen::JacobiSVD<Mat> svd(r.transpose() * l, Eigen::ComputeFullU | Eigen::ComputeFullV);
  nt.lambda = svd.singularValues();
  if (!nt.lambda.allFinite() || nt.lambda.minCoeff() <= 0) return false;
  const Mat& v = svd.matrixV();
  const Vec root = nt.lambda.cwiseSqrt();
  nt.G = l * v * root.cwiseInverse().asDiagonal();
  const Mat lt_inv_v = l.transpose().triangularView<Eigen::Upper>().solve(v);
  nt.Gi = root.asDiagonal() * lt_inv_v.transpose();
  nt.W = symmetrized(nt.G * nt.G.transpose());
  return nt.W.allFinite();
}

class HsdSolver {
 public:
  // `prog` is in minimization form; reported objectives are multiplied by `report_sign`
  HsdSolver(const ConicProgram& prog, const SolverSettings& settings, Real report_sign)
      : prog_(prog), settings_(settings), sign_(report_sign) {
    d_ = prog.psd_order;
    p_ = prog.nonneg_count;
    f_ = prog.free_count;
    m_ = prog.row_count();
    setup();
  }

  void run(ConicSolution& out);

 private:
  struct Direction {
    Mat dX, dS;
    Vec ds, dz, dw, dy;
    Real dtau = 0, dkappa = 0;
    bool finite = true;
  };

  void setup();
  Vec apply_a(const Mat& x, const Vec& s, const Vec& w) const;
  void apply_at(const Vec& y, Mat& ax, Vec& al, Vec& af) const;
  void compute_residuals();
  bool factor_kkt(const NtScaling& nt, const Vec& dl);
  // right-hand sides of the linearized embedding equations
  struct Targets {
    Vec p;    // A dx - b dtau
    Mat dx;   // A^* dy + dS - C dtau on the PSD block
    Vec dl;   // same on the orthant
    Vec f;    // A_f^T dy - c_f dtau
    Real g = 0;  // dkappa + c^T dx - b^T dy
    Mat rx;   // dX + W dS W
    Vec rl;   // ds + (s/z) dz
    Real rtau = 0;  // tau dkappa + kappa dtau
  };

  Direction solve_newton(const NtScaling& nt, const Vec& dl, const Targets& t) const;
  Direction direction(const NtScaling& nt, const Vec& dl, Real eta, const Mat& rx,
                      const Vec& rl, Real rtau);
  Real max_step(const Direction& dir) const;
  void fill_iterate(ConicSolution& out) const;
  IterateLog metrics(int iter, Real step) const;
  void write_log(const IterateLog& row) const;

  const ConicProgram& prog_;
  const SolverSettings& settings_;
  Real sign_ = 1;
  int d_ = 0, p_ = 0, f_ = 0, m_ = 0;

  // scaled data: rows divided by row_scale_, rhs additionally by rhs_scale_,
  // objective by obj_scale_
  std::vector<std::vector<SymEntry>> psd_rows_;
  std::vector<Mat> dense_rows_;  // only for rows with many PSD entries
  std::vector<std::vector<std::pair<int, Real>>> nonneg_cols_;
  Mat af_;
  Vec b_;
  Mat c_;
  Vec cl_, cf_;
  Vec row_scale_;
  Real rhs_scale_ = 1, obj_scale_ = 1;
  Real b_norm_ = 0, c_norm_ = 0;  // of the unscaled data

  // iterate
  Mat X_, S_;
  Vec s_, z_, w_, y_;
  Real tau_ = 1, kappa_ = 1;

  // residuals at the current iterate (scaled)
  Vec rp_;
  Mat rdx_;
  Vec rdl_, rdf_;
  Real rg_ = 0, mu_ = 0, cx_ = 0, by_ = 0;

  // reduced Newton system in (dy, dw, dtau)
  Eigen::PartialPivLU<Mat> lu_;
  Vec kkt_scale_;
  Mat kkt_;
  Mat wcw_;
  Vec hcl_, q_;
  Real chc_ = 0;
};

void HsdSolver::setup() {
  psd_rows_.assign(m_, {});
  dense_rows_.assign(m_, Mat());
  nonneg_cols_.assign(p_, {});
  af_ = Mat::Zero(m_, f_);
  row_scale_.resize(m_);
  b_.resize(m_);

  for (int i = 0; i < m_; ++i) {
    const EqRow& r = prog_.rows[i];
    Real sq = 0;
    for (const PsdTerm& t : r.psd) {
      const Real a = t.row == t.col ? t.coef : 0.5 * t.coef;
      psd_rows_[i].push_back({t.row, t.col, a});
    }
    // merge repeated entries before taking the norm
    Mat acc = Mat::Zero(d_, d_);
    for (const SymEntry& e : psd_rows_[i]) {
      acc(e.k, e.l) += e.a;
      if (e.k != e.l) acc(e.l, e.k) += e.a;
    }
    sq += acc.squaredNorm();
    Vec lrow = Vec::Zero(p_);
    for (const SparseTerm& t : r.nonneg) lrow(t.index) += t.coef;
    Vec frow = Vec::Zero(f_);
    for (const SparseTerm& t : r.free) frow(t.index) += t.coef;
    sq += lrow.squaredNorm() + frow.squaredNorm();
    row_scale_(i) = sq > 0 ? std::sqrt(sq) : 1.0;

    const Real inv = 1.0 / row_scale_(i);
    for (SymEntry& e : psd_rows_[i]) e.a *= inv;
    if (static_cast<int>(psd_rows_[i].size()) > d_) dense_rows_[i] = acc * inv;
    for (int k = 0; k < p_; ++k) {
      if (lrow(k) != 0.0) nonneg_cols_[k].push_back({i, lrow(k) * inv});
    }
    af_.row(i) = frow.transpose() * inv;
    b_(i) = r.rhs * inv;
  }

  b_norm_ = 0;
  for (const EqRow& r : prog_.rows) b_norm_ += r.rhs * r.rhs;
  b_norm_ = std::sqrt(b_norm_);
  c_norm_ = std::sqrt(prog_.objective_psd.squaredNorm() + prog_.objective_nonneg.squaredNorm() +
                      prog_.objective_free.squaredNorm());

  rhs_scale_ = std::max<Real>(1.0, m_ > 0 ? b_.lpNorm<Eigen::Infinity>() : 0.0);
  b_ /= rhs_scale_;
  Real cmax = 0;
  if (d_ > 0) cmax = std::max<Real>(cmax, prog_.objective_psd.lpNorm<Eigen::Infinity>());
  if (p_ > 0) cmax = std::max<Real>(cmax, prog_.objective_nonneg.lpNorm<Eigen::Infinity>());
  if (f_ > 0) cmax = std::max<Real>(cmax, prog_.objective_free.lpNorm<Eigen::Infinity>());
  obj_scale_ = std::max<Real>(1.0, cmax);
  c_ = symmetrized(Mat(prog_.objective_psd.cast<Real>())) / obj_scale_;
  cl_ = prog_.objective_nonneg.cast<Real>() / obj_scale_;
  cf_ = prog_.objective_free.cast<Real>() / obj_scale_;

  X_ = Mat::Identity(d_, d_);
  S_ = Mat::Identity(d_, d_);
  s_ = Vec::Ones(p_);
  z_ = Vec::Ones(p_);
  w_ = Vec::Zero(f_);
  y_ = Vec::Zero(m_);
  tau_ = 1;
  kappa_ = 1;
}

Vec HsdSolver::apply_a(const Mat& x, const Vec& s, const Vec& w) const {
  Vec r = Vec::Zero(m_);
  for (int i = 0; i < m_; ++i) {
    Real v = 0;
    for (const SymEntry& e : psd_rows_[i]) v += e.k == e.l ? e.a * x(e.k, e.k) : 2.0 * e.a * x(e.k, e.l);
    r(i) = v;
  }
  for (int k = 0; k < p_; ++k) {
    for (const auto& [row, coef] : nonneg_cols_[k]) r(row) += coef * s(k);
  }
  if (f_ > 0) r += af_ * w;
  return r;
}

void HsdSolver::apply_at(const Vec& y, Mat& ax, Vec& al, Vec& af) const {
  ax = Mat::Zero(d_, d_);
  for (int i = 0; i < m_; ++i) {
    for (const SymEntry& e : psd_rows_[i]) {
      ax(e.k, e.l) += y(i) * e.a;
      if (e.k != e.l) ax(e.l, e.k) += y(i) * e.a;
    }
  }
  al = Vec::Zero(p_);
  for (int k = 0; k < p_; ++k) {
    for (const auto& [row, coef] : nonneg_cols_[k]) al(k) += coef * y(row);
  }
  af = f_ > 0 ? Vec(af_.transpose() * y) : Vec::Zero(0);
}

void HsdSolver::compute_residuals() {
  rp_ = b_ * tau_ - apply_a(X_, s_, w_);
  Mat ax;
  Vec al, af;
  apply_at(y_, ax, al, af);
  rdx_ = c_ * tau_ - ax - S_;
  rdl_ = cl_ * tau_ - al - z_;
  rdf_ = cf_ * tau_ - af;
  cx_ = inner(c_, X_) + cl_.dot(s_) + cf_.dot(w_);
  by_ = b_.dot(y_);
  rg_ = kappa_ + cx_ - by_;
  mu_ = (inner(X_, S_) + s_.dot(z_) + tau_ * kappa_) / static_cast<Real>(d_ + p_ + 1);
}

IterateLog HsdSolver::metrics(int iter, Real step) const {
  IterateLog row;
  row.iter = iter;
  const Real scale = obj_scale_ * rhs_scale_;
  const Real pobj = scale * cx_ / tau_ + prog_.offset;
  const Real dobj = scale * by_ / tau_ + prog_.offset;
  row.primal_obj = sign_ * pobj;
  row.dual_obj = sign_ * dobj;
  row.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
  row.primal_res = rhs_scale_ * rp_.cwiseProduct(row_scale_).norm() / tau_ / (1.0 + b_norm_);
  const Real rd = std::sqrt(rdx_.squaredNorm() + rdl_.squaredNorm() + rdf_.squaredNorm());
  row.dual_res = obj_scale_ * rd / tau_ / (1.0 + c_norm_);
  row.mu = mu_;
  row.tau = tau_;
  row.kappa = kappa_;
  row.step = step;
  return row;
}

void HsdSolver::write_log(const IterateLog& r) const {
  if (settings_.verbosity <= 0) return;
  std::ostream& os = settings_.log != nullptr ? *settings_.log : std::cerr;
  if (r.iter == 0) {
    os << "iter primal_obj dual_obj gap primal_res dual_res mu tau kappa step\n";
  }
  os << std::setw(4) << r.iter << std::scientific << std::setprecision(8) << ' ' << r.primal_obj
     << ' ' << r.dual_obj << std::setprecision(2) << ' ' << r.gap << ' ' << r.primal_res << ' '
     << r.dual_res << ' ' << r.mu << ' ' << r.tau << ' ' << r.kappa << ' ' << r.step << '\n'
     << std::defaultfloat;
}

bool HsdSolver::factor_kkt(const NtScaling& nt, const Vec& dl) {
  const int size = m_ + f_ + 1;
  kkt_ = Mat::Zero(size, size);

  if (d_ > 0) {
    const Mat& w = nt.W;
    Mat bj(d_, d_);
    for (int j = 0; j < m_; ++j) {
      if (psd_rows_[j].empty()) continue;
      if (dense_rows_[j].size() > 0) {
        bj.noalias() = w * dense_rows_[j] * w;
      } else {
        bj.setZero();
        for (const SymEntry& e : psd_rows_[j]) {
          if (e.k == e.l) {
            bj.noalias() += e.a * w.col(e.k) * w.row(e.k);
          } else {
            bj.noalias() += e.a * (w.col(e.k) * w.row(e.l) + w.col(e.l) * w.row(e.k));
          }
        }
      }
      for (int i = j; i < m_; ++i) {
        Real v = 0;
        for (const SymEntry& e : psd_rows_[i]) v += e.k == e.l ? e.a * bj(e.k, e.k) : 2.0 * e.a * bj(e.k, e.l);
        kkt_(i, j) = v;
        kkt_(j, i) = v;
      }
    }
  }
  for (int k = 0; k < p_; ++k) {
    for (const auto& [ri, ci] : nonneg_cols_[k]) {
      for (const auto& [rj, cj] : nonneg_cols_[k]) kkt_(ri, rj) += ci * cj * dl(k);
    }
  }
  if (f_ > 0) {
    kkt_.block(0, m_, m_, f_) = af_;
    kkt_.block(m_, 0, f_, m_) = af_.transpose();
  }

  wcw_ = d_ > 0 ? Mat(nt.W * c_ * nt.W) : Mat(0, 0);
  hcl_ = dl.cwiseProduct(cl_);
  q_ = apply_a(wcw_, hcl_, Vec::Zero(f_));
  chc_ = (d_ > 0 ? inner(c_, wcw_) : 0.0) + cl_.dot(hcl_);

  kkt_.block(0, m_ + f_, m_, 1) = -(b_ + q_);
  kkt_.block(m_ + f_, 0, 1, m_) = (q_ - b_).transpose();
  if (f_ > 0) {
    kkt_.block(m_, m_ + f_, f_, 1) = -cf_;
    kkt_.block(m_ + f_, m_, 1, f_) = cf_.transpose();
  }
  kkt_(m_ + f_, m_ + f_) = -(kappa_ / tau_ + chc_);

  if (!kkt_.allFinite()) return false;
  // symmetric Ruiz equilibration, then a static regularization; refinement
  // runs against the unregularized matrix
  kkt_scale_ = Vec::Ones(size);
  Mat reg = kkt_;
  for (int pass = 0; pass < 4; ++pass) {
    const Vec rmax = reg.cwiseAbs().rowwise().maxCoeff();
    Vec d(size);
    for (int i = 0; i < size; ++i) d(i) = rmax(i) > 0 ? 1.0 / std::sqrt(rmax(i)) : 1.0;
    reg = d.asDiagonal() * reg * d.asDiagonal();
    kkt_scale_ = kkt_scale_.cwiseProduct(d);
  }
  for (int i = 0; i < m_; ++i) reg(i, i) += kRegularization;
  for (int i = m_; i < m_ + f_; ++i) reg(i, i) -= kRegularization;
  lu_.compute(reg);
  return true;
}

HsdSolver::Direction HsdSolver::solve_newton(const NtScaling& nt, const Vec& dl,
                                             const Targets& t) const {
  // tmp = R - H t_d on the conic blocks
  const Mat tmpx = d_ > 0 ? Mat(t.rx - nt.W * t.dx * nt.W) : Mat(0, 0);
  const Vec tmpl = t.rl - dl.cwiseProduct(t.dl);

  Vec rhs(m_ + f_ + 1);
  rhs.head(m_) = t.p - apply_a(tmpx, tmpl, Vec::Zero(f_));
  if (f_ > 0) rhs.segment(m_, f_) = t.f;
  rhs(m_ + f_) = t.g - t.rtau / tau_ - ((d_ > 0 ? inner(c_, tmpx) : 0.0) + cl_.dot(tmpl));

  auto apply_inverse = [&](const Vec& r) -> Vec {
    return kkt_scale_.cwiseProduct(lu_.solve(Vec(kkt_scale_.cwiseProduct(r))));
  };
  Vec sol = apply_inverse(rhs);
  for (int refine = 0; refine < kRefineSteps; ++refine) sol += apply_inverse(rhs - kkt_ * sol);

  Direction dir;
  dir.dy = sol.head(m_);
  dir.dw = sol.segment(m_, f_);
  dir.dtau = sol(m_ + f_);

  Mat aty_x;
  Vec aty_l, aty_f;
  apply_at(dir.dy, aty_x, aty_l, aty_f);
  dir.dS = d_ > 0 ? symmetrized(t.dx - aty_x + c_ * dir.dtau) : Mat(0, 0);
  dir.dz = t.dl - aty_l + cl_ * dir.dtau;
  dir.dX = d_ > 0 ? symmetrized(t.rx - nt.W * dir.dS * nt.W) : Mat(0, 0);
  dir.ds = t.rl - dl.cwiseProduct(dir.dz);
  dir.dkappa = (t.rtau - kappa_ * dir.dtau) / tau_;
  return dir;
}

HsdSolver::Direction HsdSolver::direction(const NtScaling& nt, const Vec& dl, Real eta,
                                          const Mat& rx, const Vec& rl, Real rtau) {
  Targets t;
  t.p = eta * rp_;
  t.dx = eta * rdx_;
  t.dl = eta * rdl_;
  t.f = eta * rdf_;
  t.g = -eta * rg_;
  t.rx = rx;
  t.rl = rl;
  t.rtau = rtau;
  Direction dir = solve_newton(nt, dl, t);

  // refine against the equations the normal-equation elimination squeezes:
  // primal rows, free-block dual rows and the embedding row
  auto defect = [&](const Direction& d, Targets& e) {
    e.p = t.p - (apply_a(d.dX, d.ds, d.dw) - b_ * d.dtau);
    e.f = Vec::Zero(f_);
    if (f_ > 0) e.f = t.f - (af_.transpose() * d.dy - cf_ * d.dtau);
    const Real cdx = (d_ > 0 ? inner(c_, d.dX) : 0.0) + cl_.dot(d.ds) + cf_.dot(d.dw);
    e.g = t.g - (d.dkappa + cdx - b_.dot(d.dy));
    return e.p.norm() + e.f.norm() + std::abs(e.g);
  };
  Targets e;
  e.dx = Mat::Zero(d_, d_);
  e.dl = Vec::Zero(p_);
  e.rx = Mat::Zero(d_, d_);
  e.rl = Vec::Zero(p_);
  Real err = defect(dir, e);
  const Real floor = 1e-15 * (1.0 + t.p.norm() + std::abs(t.g));
  for (int round = 0; round < kRefineSteps && err > floor; ++round) {
    const Direction corr = solve_newton(nt, dl, e);
    Direction next = dir;
    next.dX += corr.dX;
    next.dS += corr.dS;
    next.ds += corr.ds;
    next.dz += corr.dz;
    next.dw += corr.dw;
    next.dy += corr.dy;
    next.dtau += corr.dtau;
    next.dkappa += corr.dkappa;
    Targets e_next = e;
    const Real err_next = defect(next, e_next);
    if (!(err_next < err)) break;
    dir = std::move(next);
    e = std::move(e_next);
    err = err_next;
  }
  dir.finite = dir.dX.allFinite() && dir.dS.allFinite() && dir.ds.allFinite() &&
               dir.dz.allFinite() && dir.dw.allFinite() && dir.dy.allFinite() &&
               std::isfinite(dir.dtau) && std::isfinite(dir.dkappa);
  return dir;
}

Real HsdSolver::max_step(const Direction& dir) const {
  Real a = kInf;
  a = std::min<Real>(a, max_step_psd(X_, dir.dX));
  a = std::min<Real>(a, max_step_psd(S_, dir.dS));
  a = std::min<Real>(a, max_step_vec(s_, dir.ds));
  a = std::min<Real>(a, max_step_vec(z_, dir.dz));
  a = std::min<Real>(a, max_step_scalar(tau_, dir.dtau));
  a = std::min<Real>(a, max_step_scalar(kappa_, dir.dkappa));
  return a;
}

void HsdSolver::fill_iterate(ConicSolution& out) const {
  const Real xs = rhs_scale_ / tau_;
  const Real zs = obj_scale_ / tau_;
  out.primal.psd = (X_ * xs).cast<double>();
  out.primal.nonneg = (s_ * xs).cast<double>();
  out.primal.free = (w_ * xs).cast<double>();
  out.y = (y_.cwiseQuotient(row_scale_) * zs).cast<double>();
  out.dual_psd = (S_ * zs).cast<double>();
  out.dual_nonneg = (z_ * zs).cast<double>();
}

void HsdSolver::run(ConicSolution& out) {
  const Real sign = sign_;
  Real step = 0;
  out.status = SolveStatus::IterationLimit;
  for (int iter = 0;; ++iter) {
    compute_residuals();
    const IterateLog row = metrics(iter, step);
    out.history.push_back(row);
    write_log(row);
    out.iters = iter;
    out.residuals = {row.primal_res, row.dual_res, row.gap};

    if (!std::isfinite(row.primal_obj) || !std::isfinite(row.dual_obj)) {
      out.status = SolveStatus::NumericalTrouble;
      break;
    }
    if (row.primal_res <= settings_.tol_feas && row.dual_res <= settings_.tol_feas &&
        row.gap <= settings_.tol_gap) {
      out.status = SolveStatus::Optimal;
      break;
    }
    // improving ray: A x ~ 0 relative to the objective decrease
    if (cx_ < 0) {
      const Real ax = (b_ * tau_ - rp_).norm();
      if (ax <= settings_.tol_infeas * -cx_) {
        out.status = SolveStatus::Unbounded;
        break;
      }
    }
    if (by_ > 0) {
      // A^T y + z = c tau - r_d
      const Real aty = std::sqrt((c_ * tau_ - rdx_).squaredNorm() +
                                   (cl_ * tau_ - rdl_).squaredNorm() +
                                   (cf_ * tau_ - rdf_).squaredNorm());
      if (aty <= settings_.tol_infeas * by_) {
        out.status = SolveStatus::Infeasible;
        break;
      }
    }
    if (iter >= settings_.max_iters) {
      out.status = SolveStatus::IterationLimit;
      break;
    }

    NtScaling nt;
    if (d_ > 0 && !compute_nt(X_, S_, nt)) {
      out.status = SolveStatus::NumericalTrouble;
      break;
    }
    const Vec dl = s_.cwiseQuotient(z_);
    if (!factor_kkt(nt, dl)) {
      out.status = SolveStatus::NumericalTrouble;
      break;
    }

    // predictor
    const Mat rx_aff = d_ > 0 ? Mat(-X_) : Mat(0, 0);
    const Direction aff = direction(nt, dl, 1.0, rx_aff, -s_, -tau_ * kappa_);
    if (!aff.finite) {
      out.status = SolveStatus::NumericalTrouble;
      break;
    }
    const Real alpha_aff = std::min<Real>(1.0, max_step(aff));
    const Real sigma = std::pow(1.0 - alpha_aff, 3);
    const Real target = sigma * mu_;

    // corrector, in the NT-scaled space for the PSD block
    Mat rx(d_, d_);
    if (d_ > 0) {
      const Mat dxs = nt.Gi * aff.dX * nt.Gi.transpose();
      const Mat dzs = nt.G.transpose() * aff.dS * nt.G;
      Mat rhs = -0.5 * (dxs * dzs + dzs * dxs);
      for (int i = 0; i < d_; ++i) rhs(i, i) += target - nt.lambda(i) * nt.lambda(i);
      for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) rhs(i, j) *= 2.0 / (nt.lambda(i) + nt.lambda(j));
      rx = symmetrized(nt.G * rhs * nt.G.transpose());
    }
    const Vec rl =
        (Vec::Constant(p_, target) - s_.cwiseProduct(z_) - aff.ds.cwiseProduct(aff.dz))
            .cwiseQuotient(z_);
    const Real rtau = target - tau_ * kappa_ - aff.dtau * aff.dkappa;
    const Direction dir = direction(nt, dl, 1.0 - sigma, rx, rl, rtau);

    const Real alpha = std::min<Real>(1.0, kStepFraction * max_step(dir));
    if (!dir.finite || !(alpha > 1e-12)) {
      out.status = SolveStatus::NumericalTrouble;
      break;
    }
    step = alpha;
    if (d_ > 0) {
      X_ = symmetrized(X_ + alpha * dir.dX);
      S_ = symmetrized(S_ + alpha * dir.dS);
    }
    s_ += alpha * dir.ds;
    z_ += alpha * dir.dz;
    w_ += alpha * dir.dw;
    y_ += alpha * dir.dy;
    tau_ += alpha * dir.dtau;
    kappa_ += alpha * dir.dkappa;
  }

  fill_iterate(out);
  const Real scale = obj_scale_ * rhs_scale_;
  out.primal_obj = static_cast<double>(sign * (scale * cx_ / tau_ + prog_.offset));
  out.dual_obj = static_cast<double>(sign * (scale * by_ / tau_ + prog_.offset));

  if (out.status == SolveStatus::Unbounded) {
    Certificate ray;
    const Real cx = scale * cx_;
    const Real norm = rhs_scale_ / -cx;
    ray.primal.psd = (X_ * norm).cast<double>();
    ray.primal.nonneg = (s_ * norm).cast<double>();
    ray.primal.free = (w_ * norm).cast<double>();
    out.ray = ray;
    out.primal_obj = sign * -kInf;
    out.dual_obj = sign * -kInf;
  } else if (out.status == SolveStatus::Infeasible) {
    Certificate ray;
    const Real norm = obj_scale_ / (scale * by_);
    ray.y = (y_.cwiseQuotient(row_scale_) * norm).cast<double>();
    ray.dual_psd = (S_ * norm).cast<double>();
    ray.dual_nonneg = (z_ * norm).cast<double>();
    out.ray = ray;
    out.primal_obj = sign * kInf;
    out.dual_obj = sign * kInf;
  }
}

}  // namespace

void run_embedding(const ConicProgram& prog, const SolverSettings& settings, double report_sign,
                   ConicSolution& out) {
  HsdSolver solver(prog, settings, report_sign);
  solver.run(out);
}

}  // namespace dnnrelax::detail
