#include "dnnrelax/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

namespace dnnrelax {

namespace {

void require_dims(const VectorXd& v, const SymMatrix& M, const char* what) {
  if (v.size() != M.order()) {
    throw DimensionError(std::string(what) + ": vector length " + std::to_string(v.size()) +
                         " vs matrix order " + std::to_string(M.order()));
  }
}

std::string idx(const char* name, int i) { return std::string(name) + "[" + std::to_string(i) + "]"; }

std::string idx(const char* name, int i, int j) {
  return std::string(name) + "[" + std::to_string(i) + "," + std::to_string(j) + "]";
}

class Checker {
 public:
  explicit Checker(double tol) : tol_(tol) {}

  void equality(std::string name, double lhs, double rhs) {
    push(std::move(name), std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
  }

  // lhs + constant >= 0
  void at_least_zero(std::string name, double value, double constant = 0) {
    push(std::move(name), std::max(0.0, -value) / (1.0 + std::abs(constant)));
  }

  void psd(std::string name, const SymMatrix& M) { push(std::move(name), std::max(0.0, -psd_margin(M))); }

  std::vector<Violation> take() { return std::move(out_); }

 private:
  void push(std::string name, double amount) {
    if (!(amount <= tol_)) out_.push_back({std::move(name), amount});
  }

  double tol_;
  std::vector<Violation> out_;
};

void check_linear_rows(Checker& ck, const MatrixXd& A, const VectorXd& rhs, double scale,
                       const VectorXd& v, const SymMatrix& V) {
  for (int i = 0; i < A.rows(); ++i) {
    VectorXd a = scale * A.row(i).transpose();
    ck.equality(idx("lin", i), a.dot(v), rhs(i));
    ck.equality(idx("quad", i), a.dot(V.mat() * a), rhs(i) * rhs(i));
  }
}

struct Extracted {
  ConicSolution sol;
  VectorXd v;
  SymMatrix V{1};
  double objective = 0;
};

Extracted run(const BuiltProgram& built, const SolverSettings& settings) {
  Extracted e;
  e.sol = solve(built.program, settings);
  e.V = built.map.extract_matrix(e.sol.primal);
  if (auto v = built.map.extract_vector(e.sol.primal)) e.v = *v;
  return e;
}

// Usable means optimal, or stopped at the iteration limit already close to optimal.
bool usable(const Extracted& e, const char* which, EquivalenceReport& rep) {
  if (e.sol.status == SolveStatus::Optimal) return true;
  if (e.sol.status == SolveStatus::IterationLimit && e.sol.residuals.gap < 1e-6) {
    rep.warnings.push_back(std::string(which) + " stopped at the iteration limit (gap " +
                           std::to_string(e.sol.residuals.gap) + "); using the last iterate");
    return true;
  }
  return false;
}

void record(EquivalenceReport& rep, const std::vector<Violation>& vs, const char* prefix,
            bool& feasible) {
  feasible = vs.empty();
  for (const auto& v : vs) {
    rep.max_violation = std::max(rep.max_violation, v.amount);
    rep.violations.push_back({std::string(prefix) + v.constraint, v.amount});
  }
}

bool same_value(double a, double b, double tol) { return std::abs(a - b) <= tol * (1.0 + std::abs(a)); }

void finish(EquivalenceReport& rep, double tol) {
  bool ok = rep.mapped_feasible_ab && rep.mapped_feasible_ba && rep.objective_match_ab &&
            rep.objective_match_ba && same_value(rep.opt_a, rep.opt_b, tol);
  rep.verdict = ok ? Verdict::Pass : Verdict::Fail;
}

}  // namespace

PointZZ sdr2_to_dnnp_point(const PointXX& p) {
  require_dims(p.x, p.X, "sdr2_to_dnnp_point");
  const int n = p.X.order();
  VectorXd e = VectorXd::Ones(n);
  MatrixXd Z = (e * e.transpose() - e * p.x.transpose() - p.x * e.transpose() + p.X.mat()) / 4.0;
  return {(e - p.x) / 2.0, SymMatrix(Z)};
}

PointXX dnnp_to_sdr2_point(const PointZZ& p) {
  require_dims(p.z, p.Z, "dnnp_to_sdr2_point");
  const int n = p.Z.order();
  SymMatrix X(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) X.set(i, j, 1.0 - 2.0 * p.z(i) - 2.0 * p.z(j) + 4.0 * p.Z(i, j));
  return {VectorXd::Ones(n) - 2.0 * p.z, X};
}

PointXX mc_sdr_to_dnnp_point(const SymMatrix& U) {
  const int n = U.order();
  MatrixXd ones = MatrixXd::Ones(n, n);
  return {VectorXd::Constant(n, 0.5), SymMatrix(MatrixXd((U.mat() + ones) / 4.0))};
}

SymMatrix mc_dnnp_to_sdr_point(const PointXX& p) {
  require_dims(p.x, p.X, "mc_dnnp_to_sdr_point");
  const int n = p.X.order();
  VectorXd e = VectorXd::Ones(n);
  MatrixXd U = 4.0 * p.X.mat() - 2.0 * p.x * e.transpose() - 2.0 * e * p.x.transpose() +
               e * e.transpose();
  return SymMatrix(U);
}

double sdr_objective(const BqpInstance& inst, const PointXX& p) {
  return (inst.Q.mat().cwiseProduct(p.X.mat())).sum() + 2.0 * inst.c.dot(p.x);
}

double dnnp_objective(const BqpInstance& inst, const PointZZ& p) {
  ZSpaceData zs = build_zspace(inst);
  return (zs.Qz.cwiseProduct(p.Z.mat())).sum() + zs.qz.dot(p.z) + zs.constz;
}

double mc_sdr_objective(const MaxCutGraph& g, const SymMatrix& U) {
  return 0.25 * (laplacian(g).mat().cwiseProduct(U.mat())).sum();
}

double mc_dnnp_objective(const MaxCutGraph& g, const PointXX& p) {
  const MatrixXd L = laplacian(g).mat();
  VectorXd Le = L.rowwise().sum();
  return (L.cwiseProduct(p.X.mat())).sum() - p.x.dot(Le) + 0.25 * Le.sum();
}

std::vector<Violation> check_feasibility(Relaxation kind, const PointXX& p, const BqpInstance& inst,
                                         double tol) {
  if (kind != Relaxation::Sdr && kind != Relaxation::Sdr1 && kind != Relaxation::Sdr2) {
    throw std::invalid_argument("check_feasibility: " + to_string(kind) +
                                " does not take an (x, X) point of a BQP instance");
  }
  require_dims(p.x, p.X, "check_feasibility");
  if (p.X.order() != inst.n()) throw DimensionError("check_feasibility: point order differs from n");
  const int n = inst.n();
  Checker ck(tol);
  check_linear_rows(ck, inst.A, inst.b, 1.0, p.x, p.X);
  for (int i = 0; i < n; ++i) ck.equality(idx("diag", i), p.X(i, i), 1.0);
  if (kind == Relaxation::Sdr2) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        ck.at_least_zero(idx("cut", i, j), 1.0 - p.x(i) - p.x(j) + p.X(i, j), 1.0);
  }
  if (kind == Relaxation::Sdr) {
    ck.psd("psd", p.X);
  } else {
    ck.psd("psd", lifted_matrix(1.0, p.x, p.X));
  }
  return ck.take();
}

std::vector<Violation> check_feasibility(Relaxation kind, const PointZZ& p, const BqpInstance& inst,
                                         double tol) {
  if (kind != Relaxation::Dnnp) {
    throw std::invalid_argument("check_feasibility: " + to_string(kind) +
                                " does not take a (z, Z) point");
  }
  require_dims(p.z, p.Z, "check_feasibility");
  if (p.Z.order() != inst.n()) throw DimensionError("check_feasibility: point order differs from n");
  const int n = inst.n();
  ZSpaceData zs = build_zspace(inst);
  Checker ck(tol);
  for (int i = 0; i < n; ++i) ck.equality(idx("diag", i), p.Z(i, i), p.z(i));
  check_linear_rows(ck, inst.A, zs.bz, 2.0, p.z, p.Z);
  for (int i = 0; i < n; ++i) ck.at_least_zero(idx("nonneg", 0, i + 1), p.z(i));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) ck.at_least_zero(idx("nonneg", i + 1, j + 1), p.Z(i, j));
  ck.psd("psd", lifted_matrix(1.0, p.z, p.Z));
  return ck.take();
}

std::vector<Violation> check_feasibility(Relaxation kind, const PointXX& p, const MaxCutGraph& g,
                                         double tol) {
  if (kind != Relaxation::MaxCutDnnp) {
    throw std::invalid_argument("check_feasibility: " + to_string(kind) +
                                " does not take an (x, X) point of a graph");
  }
  require_dims(p.x, p.X, "check_feasibility");
  if (p.X.order() != g.n()) throw DimensionError("check_feasibility: point order differs from n");
  const int n = g.n();
  Checker ck(tol);
  for (int i = 0; i < n; ++i) ck.equality(idx("diag", i), p.X(i, i), p.x(i));
  for (int i = 0; i < n; ++i) ck.at_least_zero(idx("nonneg", 0, i + 1), p.x(i));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) ck.at_least_zero(idx("nonneg", i + 1, j + 1), p.X(i, j));
  ck.psd("psd", lifted_matrix(1.0, p.x, p.X));
  return ck.take();
}

std::vector<Violation> check_feasibility(Relaxation kind, const SymMatrix& U, const MaxCutGraph& g,
                                         double tol) {
  if (kind != Relaxation::MaxCutSdr) {
    throw std::invalid_argument("check_feasibility: " + to_string(kind) +
                                " does not take a single matrix point");
  }
  if (U.order() != g.n()) throw DimensionError("check_feasibility: point order differs from n");
  Checker ck(tol);
  for (int i = 0; i < g.n(); ++i) ck.equality(idx("diag", i), U(i, i), 1.0);
  ck.psd("psd", U);
  return ck.take();
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

EquivalenceReport verify_theorem3(const BqpInstance& inst, double tol, const SolverSettings& settings) {
  inst.validate();
  BuiltProgram pa = build_sdr2(inst);
  BuiltProgram pb = build_dnnp(inst);
  auto fa = std::async(std::launch::async, [&] { return run(pa, settings); });
  Extracted b = run(pb, settings);
  Extracted a = fa.get();

  EquivalenceReport rep;
  rep.relax_a = "sdr2";
  rep.relax_b = "dnnp";
  rep.status_a = a.sol.status;
  rep.status_b = b.sol.status;
  rep.opt_a = a.sol.primal_obj;
  rep.opt_b = b.sol.primal_obj;
  if (!usable(a, "sdr2", rep) || !usable(b, "dnnp", rep)) {
    rep.verdict = Verdict::NotApplicable;
    return rep;
  }

  PointXX xa{a.v, a.V};
  PointZZ zb{b.v, b.V};
  PointZZ ab = sdr2_to_dnnp_point(xa);
  PointXX ba = dnnp_to_sdr2_point(zb);
  record(rep, check_feasibility(Relaxation::Dnnp, ab, inst, tol), "sdr2->dnnp:", rep.mapped_feasible_ab);
  record(rep, check_feasibility(Relaxation::Sdr2, ba, inst, tol), "dnnp->sdr2:", rep.mapped_feasible_ba);
  rep.objective_match_ab = same_value(sdr_objective(inst, xa), dnnp_objective(inst, ab), tol);
  rep.objective_match_ba = same_value(dnnp_objective(inst, zb), sdr_objective(inst, ba), tol);
  finish(rep, tol);
  return rep;
}

EquivalenceReport verify_theorem4(const MaxCutGraph& g, double tol, const SolverSettings& settings) {
  BuiltProgram pa = build_mc_sdr(g);
  BuiltProgram pb = build_mc_dnnp(g);
  auto fa = std::async(std::launch::async, [&] { return run(pa, settings); });
  Extracted b = run(pb, settings);
  Extracted a = fa.get();

  EquivalenceReport rep;
  rep.relax_a = "mc-sdr";
  rep.relax_b = "mc-dnnp";
  rep.status_a = a.sol.status;
  rep.status_b = b.sol.status;
  rep.opt_a = a.sol.primal_obj;
  rep.opt_b = b.sol.primal_obj;
  if (!usable(a, "mc-sdr", rep) || !usable(b, "mc-dnnp", rep)) {
    rep.verdict = Verdict::NotApplicable;
    return rep;
  }

  PointXX xb{b.v, b.V};
  PointXX ab = mc_sdr_to_dnnp_point(a.V);
  SymMatrix ba = mc_dnnp_to_sdr_point(xb);
  record(rep, check_feasibility(Relaxation::MaxCutDnnp, ab, g, tol), "mc-sdr->mc-dnnp:",
         rep.mapped_feasible_ab);
  record(rep, check_feasibility(Relaxation::MaxCutSdr, ba, g, tol), "mc-dnnp->mc-sdr:",
         rep.mapped_feasible_ba);
  rep.objective_match_ab = same_value(mc_sdr_objective(g, a.V), mc_dnnp_objective(g, ab), tol);
  rep.objective_match_ba = same_value(mc_dnnp_objective(g, xb), mc_sdr_objective(g, ba), tol);
  finish(rep, tol);
  return rep;
}

RankOneResult rank_one_certificate(const PointXX& p, double tol) {
  require_dims(p.x, p.X, "rank_one_certificate");
  RankOneResult r;
  r.deviation = (p.X.mat() - p.x * p.x.transpose()).cwiseAbs().maxCoeff();
  r.exact = r.deviation <= tol;
  if (r.exact && ((p.x.cwiseAbs().array() - 1.0).abs() <= tol).all()) {
    r.recovered = p.x.unaryExpr([](double v) { return v >= 0 ? 1.0 : -1.0; });
  }
  return r;
}

bool check_dnn_membership(const SymMatrix& M, double tol) {
  return is_psd(M, tol) && M.mat().minCoeff() >= -tol;
}

}  // namespace dnnrelax
