#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dnnrelax/relax.hpp"

namespace dnnrelax {

enum class SolveStatus { Optimal, Unbounded, Infeasible, IterationLimit, NumericalTrouble };

std::string to_string(SolveStatus s);

struct SolverSettings {
  double tol_gap = 1e-8;
  double tol_feas = 1e-8;
  double tol_infeas = 1e-8;
  int max_iters = 200;
  int verbosity = 0;           // > 0 writes one line per iteration to `log`
  std::ostream* log = nullptr;  // defaults to std::cerr when verbosity > 0

  /// Throws std::invalid_argument on non-positive tolerances or max_iters < 1.
  void validate() const;
};

/// One row of the iteration log. Objectives are in the program's sense with
/// the offset included; residuals are relative.
struct IterateLog {
  int iter = 0;
  double primal_obj = 0;
  double dual_obj = 0;
  double gap = 0;
  double primal_res = 0;
  double dual_res = 0;
  double mu = 0;
  double tau = 0;
  double kappa = 0;
  double step = 0;
};

struct Residuals {
  double primal = 0;  // ||A x - b|| / (1 + ||b||)
  double dual = 0;    // ||c - A^T y - z|| / (1 + ||c||)
  double gap = 0;     // |primal_obj - dual_obj| / (1 + |primal_obj|)
};

/// Improving direction (Unbounded) or dual Farkas ray (Infeasible), both for
/// the minimization form (objective negated when the program maximizes).
/// Unbounded: A r = 0, r in the cone, c^T r = -1.
/// Infeasible: b^T y = 1, -A^T y in the dual cone.
struct Certificate {
  ConicPoint primal;
  VectorXd y;
  MatrixXd dual_psd;
  VectorXd dual_nonneg;
};

/// Dual quantities refer to the minimization form: for a maximizing program
/// the objective is negated before solving, so C_min - A^*(y) = S.
struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalTrouble;
  ConicPoint primal;
  VectorXd y;  // one multiplier per original row; dropped rows get 0
  MatrixXd dual_psd;
  VectorXd dual_nonneg;
  double primal_obj = 0;
  double dual_obj = 0;
  int iters = 0;
  Residuals residuals;
  std::optional<Certificate> ray;
  std::vector<IterateLog> history;
  std::vector<int> dropped_rows;
};

/// Homogeneous self-dual interior-point method with Nesterov-Todd scaling and a
/// Mehrotra predictor-corrector step over (PSD block x orthant x free block).
/// Dependent rows are pruned first by presolve_rank_check.
ConicSolution solve(const ConicProgram& prog, const SolverSettings& settings = {});

struct PresolveResult {
  ConicProgram program;     // kept rows only
  std::vector<int> kept;    // original indices of the kept rows
  std::vector<int> dropped; // original indices of the pruned rows
  bool inconsistent = false;
  /// When inconsistent: y with A^T y = 0 and b^T y = 1 over the original rows.
  VectorXd farkas;
};

/// Removes numerically dependent rows (Gram-Schmidt with pivot threshold
/// 1e-10 ||row||). A dependent row whose rhs differs from the implied value by
/// more than 1e-8 (1 + |rhs|) marks the program inconsistent.
PresolveResult presolve_rank_check(const ConicProgram& prog);

struct CertificateReport {
  double primal_residual = 0;  // max_i |a_i x - b_i| / (1 + |b_i|)
  double dual_residual = 0;    // max-abs of C - A^*(y) - S (all blocks) / (1 + max|C|)
  double complementarity = 0;  // |<X, S> + s^T z| / (1 + |primal_obj| + |dual_obj|)
  double gap = 0;
  double primal_cone_margin = 0;  // min of psd_margin(X) and min(s) / max(1, |s|_inf)
  double dual_cone_margin = 0;
  double ray_equality_residual = 0;
  double ray_objective = 0;
  double ray_cone_margin = 0;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Recomputes residuals, complementarity and cone margins from the returned
/// blocks only; flags every check above `tol`.
CertificateReport certify(const ConicProgram& prog, const ConicSolution& sol, double tol);

}  // namespace dnnrelax
