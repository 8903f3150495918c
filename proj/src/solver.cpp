#include "dnnrelax/solver.hpp"

#include "hsd.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dnnrelax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double inner(const MatrixXd& a, const MatrixXd& b) { return a.cwiseProduct(b).sum(); }

MatrixXd symmetrized(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

ConicProgram minimization_form(const ConicProgram& prog) {
  ConicProgram p = prog;
  if (p.sense == Sense::Maximize) {
    p.objective_psd = -p.objective_psd;
    p.objective_nonneg = -p.objective_nonneg;
    p.objective_free = -p.objective_free;
    p.offset = -p.offset;
    p.sense = Sense::Minimize;
  }
  return p;
}

VectorXd dense_row(const EqRow& r, int d, int p, int f) {
  VectorXd v = VectorXd::Zero(svec_length(d) + p + f);
  if (d > 0) v.head(svec_length(d)) = r.psd_svec(d).data;
  for (const SparseTerm& t : r.nonneg) v(svec_length(d) + t.index) += t.coef;
  for (const SparseTerm& t : r.free) v(svec_length(d) + p + t.index) += t.coef;
  return v;
}




// Symmetric coefficient matrix of the PSD part of a row.
MatrixXd row_matrix(const EqRow& r, int d) {
  MatrixXd m = MatrixXd::Zero(d, d);
  for (const PsdTerm& t : r.psd) {
    if (t.row == t.col) {
      m(t.row, t.row) += t.coef;
    } else {
      m(t.row, t.col) += 0.5 * t.coef;
      m(t.col, t.row) += 0.5 * t.coef;
    }
  }
  return m;
}

// A^*(y) split by block.
void adjoint(const ConicProgram& prog, const VectorXd& y, MatrixXd& ax, VectorXd& al, VectorXd& af) {
  const int d = prog.psd_order;
  ax = MatrixXd::Zero(d, d);
  al = VectorXd::Zero(prog.nonneg_count);
  af = VectorXd::Zero(prog.free_count);
  for (int i = 0; i < prog.row_count(); ++i) {
    if (y(i) == 0.0) continue;
    for (const PsdTerm& t : prog.rows[i].psd) {
      const double a = t.row == t.col ? t.coef : 0.5 * t.coef;
      ax(t.row, t.col) += y(i) * a;
      if (t.row != t.col) ax(t.col, t.row) += y(i) * a;
    }
    for (const SparseTerm& t : prog.rows[i].nonneg) al(t.index) += y(i) * t.coef;
    for (const SparseTerm& t : prog.rows[i].free) af(t.index) += y(i) * t.coef;
  }
}

// Restriction of the PSD block to the face {Y : Y v = 0 for every hinted v}.
struct FaceReduction {
  bool active = false;
  ConicProgram program;  // PSD block replaced by P with Y = basis P basis^T
  MatrixXd basis;        // d x r, orthonormal columns
  MatrixXd exposer;      // sum of v v^T, equals A^*(exposer_weights) on the PSD block
  VectorXd exposer_weights;
  std::vector<double> noise;  // per-row rounding level left by the projection
};

FaceReduction reduce_to_face(const ConicProgram& prog) {
  FaceReduction fr;
  const int d = prog.psd_order;
  if (prog.face.empty() || d == 0) return fr;

  MatrixXd vecs(d, static_cast<Eigen::Index>(prog.face.size()));
  fr.exposer = MatrixXd::Zero(d, d);
  fr.exposer_weights = VectorXd::Zero(prog.row_count());
  for (size_t h = 0; h < prog.face.size(); ++h) {
    const FaceHint& hint = prog.face[h];
    MatrixXd combo = MatrixXd::Zero(d, d);
    VectorXd other = VectorXd::Zero(prog.nonneg_count + prog.free_count);
    double rhs = 0, rhs_scale = 1;
    for (const SparseTerm& t : hint.rows) {
      const EqRow& r = prog.rows[t.index];
      combo += t.coef * row_matrix(r, d);
      for (const SparseTerm& u : r.nonneg) other(u.index) += t.coef * u.coef;
      for (const SparseTerm& u : r.free) other(prog.nonneg_count + u.index) += t.coef * u.coef;
      rhs += t.coef * r.rhs;
      rhs_scale += std::abs(t.coef * r.rhs);
      fr.exposer_weights(t.index) += t.coef;
    }
    const MatrixXd target = hint.v * hint.v.transpose();
    const double scale = 1.0 + target.lpNorm<Eigen::Infinity>();
    if ((combo - target).lpNorm<Eigen::Infinity>() > 1e-9 * scale ||
        (other.size() > 0 && other.lpNorm<Eigen::Infinity>() > 1e-9 * scale) ||
        std::abs(rhs) > 1e-9 * rhs_scale) {
      throw std::invalid_argument("face hint " + std::to_string(h) + " does not match its rows");
    }
    vecs.col(static_cast<Eigen::Index>(h)) = hint.v;
    fr.exposer += target;
  }

  Eigen::JacobiSVD<MatrixXd> svd(vecs, Eigen::ComputeFullU);
  const VectorXd& sv = svd.singularValues();
  const double cut = 1e-10 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0) * std::max(d, 1);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cut) ++rank;
  if (rank == 0) return fr;

  fr.active = true;
  const int r = d - rank;
  fr.basis = svd.matrixU().rightCols(r);
  ConicProgram& red = fr.program;
  red = prog;
  red.face.clear();
  red.psd_order = r;
  red.objective_psd = symmetrized(fr.basis.transpose() * prog.objective_psd * fr.basis);
  for (EqRow& row : red.rows) {
    const MatrixXd full = row_matrix(row, d);
    const MatrixXd m = fr.basis.transpose() * full * fr.basis;
    // entries at rounding level of the original row are structural zeros
    const double big = 1e3 * std::numeric_limits<double>::epsilon() * d * full.lpNorm<Eigen::Infinity>();
    // a row that vanishes on the face keeps only this much of itself
    fr.noise.push_back(1e-12 * d * full.norm());
    row.psd.clear();
    for (int k = 0; k < r; ++k) {
      for (int l = k; l < r; ++l) {
        const double v = k == l ? m(k, k) : m(k, l) + m(l, k);
        if (std::abs(v) > big) row.psd.push_back({k, l, v});
      }
    }
  }
  return fr;
}

// Dual slack on the full block from a reduced-space solve: adds t * exposer
// (t picked to maximize the PSD margin) and shifts y so that the PSD dual
// residual is exactly the reduced one.
void lift_dual(const ConicProgram& prog, const FaceReduction& fr, bool with_objective,
               const MatrixXd& reduced_slack, VectorXd& y, MatrixXd& slack) {
  const int d = prog.psd_order;
  MatrixXd ax;
  VectorXd al, af;
  adjoint(prog, y, ax, al, af);
  MatrixXd s0 = (with_objective ? MatrixXd(symmetrized(prog.objective_psd)) : MatrixXd::Zero(d, d)) - ax;
  const MatrixXd& v = fr.basis;
  s0 += v * (reduced_slack - v.transpose() * s0 * v) * v.transpose();
  s0 = symmetrized(s0);

  // use the exposer exactly as the rows produce it so that y and slack stay consistent
  MatrixXd exposer;
  {
    VectorXd l, f;
    adjoint(prog, fr.exposer_weights, exposer, l, f);
  }
  auto margin = [&](double t) { return psd_margin(SymMatrix(MatrixXd(s0 + t * exposer))); };
  const double base = std::max(1.0, s0.lpNorm<Eigen::Infinity>()) /
                      std::max(1.0, exposer.lpNorm<Eigen::Infinity>());
  std::vector<std::pair<double, double>> scan{{0.0, margin(0.0)}};
  // multiples beyond 1e8 * base would bury y in rounding
  for (int k = -24; k <= 32; ++k) {
    const double t = base * std::pow(10.0, 0.25 * k);
    scan.push_back({t, margin(t)});
  }
  double best = scan[0].second;
  for (const auto& [t, mg] : scan) best = std::max(best, mg);
  // smallest multiple close to the best margin; large multiples amplify rounding in y.
  // A singular reduced slack only reaches margin ~0 as t grows, hence the absolute floor.
  const double slack_floor = 1e-10 * std::max(1.0, s0.lpNorm<Eigen::Infinity>());
  double best_t = 0;
  for (const auto& [t, mg] : scan) {
    if (mg >= best - 0.1 * std::abs(best) - slack_floor) {
      best_t = t;
      break;
    }
  }
  y -= best_t * fr.exposer_weights;
  slack = symmetrized(s0 + best_t * exposer);
}

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::NumericalTrouble: return "numerical_trouble";
  }
  return "?";
}

void SolverSettings::validate() const {
  if (!(tol_gap > 0) || !(tol_feas > 0) || !(tol_infeas > 0)) {
    throw std::invalid_argument("solver tolerances must be positive");
  }
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
}

namespace {

PresolveResult rank_check(const ConicProgram& prog, const std::vector<double>& noise) {
  const int d = prog.psd_order, p = prog.nonneg_count, f = prog.free_count;
  const int m = prog.row_count();

  PresolveResult res;
  std::vector<VectorXd> basis;
  std::vector<double> basis_rhs;
  for (int r = 0; r < m; ++r) {
    const VectorXd v = dense_row(prog.rows[r], d, p, f);
    const double nv = v.norm();
    VectorXd u = v;
    VectorXd proj = VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
    for (int pass = 0; pass < 2; ++pass) {
      for (size_t k = 0; k < basis.size(); ++k) {
        const double c = basis[k].dot(u);
        u -= c * basis[k];
        proj(static_cast<Eigen::Index>(k)) += c;
      }
    }
    const double nu = u.norm();
    const double rhs = prog.rows[r].rhs;
    const double floor = noise.empty() ? 0.0 : noise[static_cast<size_t>(r)];
    if (nu <= 1e-10 * nv || nu <= floor || nv == 0.0) {
      double implied = 0;
      for (size_t k = 0; k < basis.size(); ++k) implied += proj(static_cast<Eigen::Index>(k)) * basis_rhs[k];
      res.dropped.push_back(r);
      if (!res.inconsistent && std::abs(rhs - implied) > 1e-8 * (1.0 + std::abs(rhs))) {
        res.inconsistent = true;
        // y = e_r - (combination of kept rows reproducing row r), b^T y = rhs - implied
        res.farkas = VectorXd::Zero(m);
        res.farkas(r) = 1.0;
        if (!res.kept.empty()) {
          MatrixXd kept_rows(v.size(), static_cast<Eigen::Index>(res.kept.size()));
          for (size_t j = 0; j < res.kept.size(); ++j) {
            kept_rows.col(static_cast<Eigen::Index>(j)) = dense_row(prog.rows[res.kept[j]], d, p, f);
          }
          const VectorXd coef = kept_rows.colPivHouseholderQr().solve(v);
          for (size_t j = 0; j < res.kept.size(); ++j) res.farkas(res.kept[j]) -= coef(static_cast<Eigen::Index>(j));
        }
        double by = 0;
        for (int i = 0; i < m; ++i) by += res.farkas(i) * prog.rows[i].rhs;
        res.farkas /= by;
      }
      continue;
    }
    double implied = 0;
    for (size_t k = 0; k < basis.size(); ++k) implied += proj(static_cast<Eigen::Index>(k)) * basis_rhs[k];
    basis.push_back(u / nu);
    basis_rhs.push_back((rhs - implied) / nu);
    res.kept.push_back(r);
  }

  res.program = prog;
  res.program.rows.clear();
  for (int r : res.kept) res.program.rows.push_back(prog.rows[r]);
  return res;
}

}  // namespace

PresolveResult presolve_rank_check(const ConicProgram& prog) {
  prog.validate();
  return rank_check(prog, {});
}

ConicSolution solve(const ConicProgram& prog, const SolverSettings& settings) {
  settings.validate();
  prog.validate();
  const double sign = prog.sense == Sense::Maximize ? -1.0 : 1.0;
  const ConicProgram minprog = minimization_form(prog);
  const FaceReduction face = reduce_to_face(minprog);
  const ConicProgram& working = face.active ? face.program : minprog;
  working.validate();
  const PresolveResult pre = rank_check(working, face.active ? face.noise : std::vector<double>{});
  const int d = prog.psd_order;
  const int m = prog.row_count();

  ConicSolution out;
  out.dropped_rows = pre.dropped;
  if (settings.verbosity > 0) {
    std::ostream& os = settings.log != nullptr ? *settings.log : std::cerr;
    if (face.active) os << "presolve: PSD block restricted to a face of order " << working.psd_order << "\n";
    if (!pre.dropped.empty()) os << "presolve: dropped " << pre.dropped.size() << " dependent row(s)\n";
    if (settings.verbosity > 1) {
      os << "presolve: dropped";
      for (int r : pre.dropped) os << ' ' << prog.rows[r].tag;
      os << '\n';
    }
  }

  // scatter kept-row multipliers back to the original rows
  auto expand = [&](const VectorXd& kept_y) {
    VectorXd full = VectorXd::Zero(m);
    for (size_t j = 0; j < pre.kept.size(); ++j) full(pre.kept[j]) = kept_y(static_cast<Eigen::Index>(j));
    return full;
  };
  auto infeasibility_ray = [&](VectorXd y, const MatrixXd& reduced_slack) {
    Certificate ray;
    MatrixXd ax;
    VectorXd al, af;
    if (face.active) {
      lift_dual(minprog, face, false, reduced_slack, y, ray.dual_psd);
      adjoint(minprog, y, ax, al, af);
    } else {
      adjoint(minprog, y, ax, al, af);
      ray.dual_psd = -ax;
    }
    ray.y = y;
    ray.dual_nonneg = -al;
    return ray;
  };

  if (pre.inconsistent) {
    out.status = SolveStatus::Infeasible;
    out.ray = infeasibility_ray(pre.farkas, MatrixXd::Zero(working.psd_order, working.psd_order));
    out.primal.psd = MatrixXd::Zero(d, d);
    out.primal.nonneg = VectorXd::Zero(prog.nonneg_count);
    out.primal.free = VectorXd::Zero(prog.free_count);
    out.y = VectorXd::Zero(m);
    out.dual_psd = MatrixXd::Zero(d, d);
    out.dual_nonneg = VectorXd::Zero(prog.nonneg_count);
    out.primal_obj = sign * kInf;
    out.dual_obj = sign * kInf;
    return out;
  }

  ConicSolution red;
  detail::run_embedding(pre.program, settings, sign, red);

  out.status = red.status;
  out.iters = red.iters;
  out.residuals = red.residuals;
  out.history = std::move(red.history);
  out.primal_obj = red.primal_obj;
  out.dual_obj = red.dual_obj;
  out.primal = red.primal;
  out.dual_nonneg = red.dual_nonneg;
  out.y = expand(red.y);
  if (face.active) {
    out.primal.psd = symmetrized(face.basis * red.primal.psd * face.basis.transpose());
    lift_dual(minprog, face, true, red.dual_psd, out.y, out.dual_psd);
  } else {
    out.dual_psd = red.dual_psd;
  }

  if (red.ray && out.status == SolveStatus::Unbounded) {
    Certificate ray = *red.ray;
    if (face.active) ray.primal.psd = symmetrized(face.basis * ray.primal.psd * face.basis.transpose());
    out.ray = ray;
  } else if (red.ray && out.status == SolveStatus::Infeasible) {
    out.ray = infeasibility_ray(expand(red.ray->y), red.ray->dual_psd);
  }
  return out;
}

CertificateReport certify(const ConicProgram& prog, const ConicSolution& sol, double tol) {
  const ConicProgram mp = minimization_form(prog);
  const int d = mp.psd_order, p = mp.nonneg_count, f = mp.free_count, m = mp.row_count();
  CertificateReport rep;
  auto flag = [&](const std::string& what, double value) {
    std::ostringstream os;
    os << what << " = " << value;
    rep.violations.push_back(os.str());
  };

  auto vec_margin = [](const VectorXd& v) {
    if (v.size() == 0) return 1.0;
    return v.minCoeff() / std::max(1.0, v.lpNorm<Eigen::Infinity>());
  };
  auto block_margin = [&](const MatrixXd& x, const VectorXd& v) {
    double mg = vec_margin(v);
    if (d > 0) mg = std::min(mg, psd_margin(SymMatrix(x)));
    return mg;
  };

  if (sol.status == SolveStatus::Unbounded) {
    if (!sol.ray) {
      flag("missing unboundedness ray", 1.0);
      return rep;
    }
    const ConicPoint& r = sol.ray->primal;
    const double rnorm =
        std::sqrt(r.psd.squaredNorm() + r.nonneg.squaredNorm() + r.free.squaredNorm());
    double eq = 0;
    for (int i = 0; i < m; ++i) {
      const double an = dense_row(mp.rows[i], d, p, f).norm();
      eq = std::max(eq, std::abs(row_value(mp.rows[i], r)) / std::max(1.0, an * std::max(1.0, rnorm)));
    }
    rep.ray_equality_residual = eq;
    rep.ray_objective = objective_value(mp, r) - mp.offset;
    rep.ray_cone_margin = block_margin(r.psd, r.nonneg);
    if (eq > tol) flag("ray equality residual", eq);
    if (rep.ray_objective > -1.0 + tol) flag("ray objective", rep.ray_objective);
    if (rep.ray_cone_margin < -tol) flag("ray cone margin", rep.ray_cone_margin);
    return rep;
  }

  if (sol.status == SolveStatus::Infeasible) {
    if (!sol.ray) {
      flag("missing infeasibility ray", 1.0);
      return rep;
    }
    const VectorXd& y = sol.ray->y;
    MatrixXd ax;
    VectorXd al, af;
    adjoint(mp, y, ax, al, af);
    double by = 0;
    double amax = 1.0;
    for (int i = 0; i < m; ++i) {
      by += y(i) * mp.rows[i].rhs;
      amax = std::max(amax, dense_row(mp.rows[i], d, p, f).norm());
    }
    const double scale = std::max(1.0, y.norm() * amax);
    rep.ray_objective = by;
    rep.ray_cone_margin = block_margin(MatrixXd(-ax), VectorXd(-al));
    rep.ray_equality_residual = f > 0 ? af.lpNorm<Eigen::Infinity>() / scale : 0.0;
    if (by < 1.0 - tol) flag("ray dual objective", by);
    if (rep.ray_cone_margin < -tol) flag("ray dual cone margin", rep.ray_cone_margin);
    if (rep.ray_equality_residual > tol) flag("ray free-block residual", rep.ray_equality_residual);
    return rep;
  }

  const ConicPoint& x = sol.primal;
  double pres = 0;
  for (int i = 0; i < m; ++i) {
    const double v = std::abs(row_value(mp.rows[i], x) - mp.rows[i].rhs) / (1.0 + std::abs(mp.rows[i].rhs));
    if (v > pres) pres = v;
    if (v > tol) flag("primal residual on row '" + mp.rows[i].tag + "'", v);
  }
  rep.primal_residual = pres;

  MatrixXd ax;
  VectorXd al, af;
  adjoint(mp, sol.y, ax, al, af);
  double cmax = 0;
  double dres = 0;
  if (d > 0) {
    cmax = std::max(cmax, mp.objective_psd.lpNorm<Eigen::Infinity>());
    dres = std::max(dres, (mp.objective_psd - ax - sol.dual_psd).lpNorm<Eigen::Infinity>());
  }
  if (p > 0) {
    cmax = std::max(cmax, mp.objective_nonneg.lpNorm<Eigen::Infinity>());
    dres = std::max(dres, (mp.objective_nonneg - al - sol.dual_nonneg).lpNorm<Eigen::Infinity>());
  }
  if (f > 0) {
    cmax = std::max(cmax, mp.objective_free.lpNorm<Eigen::Infinity>());
    dres = std::max(dres, (mp.objective_free - af).lpNorm<Eigen::Infinity>());
  }
  rep.dual_residual = dres / (1.0 + cmax);
  if (rep.dual_residual > tol) flag("dual residual", rep.dual_residual);

  const double sgn = prog.sense == Sense::Maximize ? -1.0 : 1.0;
  const double pobj = objective_value(mp, x);
  double dobj = mp.offset;
  for (int i = 0; i < m; ++i) dobj += sol.y(i) * mp.rows[i].rhs;
  const double comp = (d > 0 ? inner(x.psd, sol.dual_psd) : 0.0) + (p > 0 ? x.nonneg.dot(sol.dual_nonneg) : 0.0);
  rep.complementarity = std::abs(comp) / (1.0 + std::abs(pobj) + std::abs(dobj));
  if (rep.complementarity > tol) flag("complementarity", rep.complementarity);
  rep.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));
  if (rep.gap > tol) flag("duality gap", rep.gap);
  const double reported_err = std::abs(sgn * pobj - sol.primal_obj) / (1.0 + std::abs(pobj));
  if (reported_err > tol) flag("reported primal objective mismatch", reported_err);

  rep.primal_cone_margin = block_margin(x.psd, x.nonneg);
  rep.dual_cone_margin = block_margin(sol.dual_psd, sol.dual_nonneg);
  if (rep.primal_cone_margin < -tol) flag("primal cone margin", rep.primal_cone_margin);
  if (rep.dual_cone_margin < -tol) flag("dual cone margin", rep.dual_cone_margin);
  return rep;
}

}  // namespace dnnrelax
