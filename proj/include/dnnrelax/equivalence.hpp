#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dnnrelax/model.hpp"
#include "dnnrelax/relax.hpp"
#include "dnnrelax/solver.hpp"

namespace dnnrelax {

/// (x, X) of SDR/SDR1/SDR2 or of the max-cut DNN relaxation.
struct PointXX {
  VectorXd x;
  SymMatrix X{1};
};

/// (z, Z) of the z-space DNN relaxation.
struct PointZZ {
  VectorXd z;
  SymMatrix Z{1};
};

/// z = (e - x)/2, Z = (ee^T - ex^T - xe^T + X)/4.
PointZZ sdr2_to_dnnp_point(const PointXX& p);

/// x = e - 2z, X_ij = 1 - 2z_i - 2z_j + 4Z_ij.
PointXX dnnp_to_sdr2_point(const PointZZ& p);

/// X = (U + ee^T)/4, x = e/2.
PointXX mc_sdr_to_dnnp_point(const SymMatrix& U);

/// U = 4X - 2xe^T - 2ex^T + ee^T.
SymMatrix mc_dnnp_to_sdr_point(const PointXX& p);

/// Model-space objectives. The z-space one includes the constant e^TQe + 2c^Te.
double sdr_objective(const BqpInstance& inst, const PointXX& p);
double dnnp_objective(const BqpInstance& inst, const PointZZ& p);
double mc_sdr_objective(const MaxCutGraph& g, const SymMatrix& U);
double mc_dnnp_objective(const MaxCutGraph& g, const PointXX& p);

struct Violation {
  std::string constraint;  // e.g. "quad[0]", "cut[1,2]", "psd"
  double amount = 0;       // relative to 1 + |rhs|
};

/// Evaluates every equality, inequality and PSD condition of the named
/// relaxation and returns the ones exceeding `tol`. Equalities are measured as
/// |lhs - rhs| / (1 + |rhs|), inequalities by their negative part, PSD
/// conditions by -psd_margin. Throws std::invalid_argument when the tag does
/// not fit the point type (sdr/sdr1/sdr2 take PointXX, dnnp PointZZ).
std::vector<Violation> check_feasibility(Relaxation kind, const PointXX& p, const BqpInstance& inst,
                                         double tol);
std::vector<Violation> check_feasibility(Relaxation kind, const PointZZ& p, const BqpInstance& inst,
                                         double tol);
/// mc-dnnp.
std::vector<Violation> check_feasibility(Relaxation kind, const PointXX& p, const MaxCutGraph& g,
                                         double tol);
/// mc-sdr.
std::vector<Violation> check_feasibility(Relaxation kind, const SymMatrix& U, const MaxCutGraph& g,
                                         double tol);

enum class Verdict { Pass, Fail, NotApplicable };
std::string to_string(Verdict v);

struct EquivalenceReport {
  std::string relax_a;
  std::string relax_b;
  SolveStatus status_a = SolveStatus::NumericalTrouble;
  SolveStatus status_b = SolveStatus::NumericalTrouble;
  double opt_a = 0;
  double opt_b = 0;
  bool mapped_feasible_ab = false;
  bool mapped_feasible_ba = false;
  bool objective_match_ab = false;
  bool objective_match_ba = false;
  double max_violation = 0;
  std::vector<Violation> violations;  // prefixed "a->b:" or "b->a:"
  std::vector<std::string> warnings;
  Verdict verdict = Verdict::NotApplicable;

  double gap() const { return opt_a - opt_b; }
};

inline constexpr double kEquivalenceTol = 1e-6;

/// Solves SDR2 (a) and DNNP (b), maps each optimum into the other space and
/// checks feasibility and objective transport there. A solve that ends
/// IterationLimit with relative gap below 1e-6 is used with a warning; any
/// other non-optimal status gives NotApplicable.
EquivalenceReport verify_theorem3(const BqpInstance& inst, double tol = kEquivalenceTol,
                                  const SolverSettings& settings = {});

/// Same for mc-sdr (a) and mc-dnnp (b).
EquivalenceReport verify_theorem4(const MaxCutGraph& g, double tol = kEquivalenceTol,
                                  const SolverSettings& settings = {});

struct RankOneResult {
  bool exact = false;
  double deviation = 0;  // max |X - xx^T|
  std::optional<VectorXd> recovered;
};

/// exact iff max |X_ij - x_i x_j| <= tol. When exact and every |x_i| is within
/// tol of 1, sign(x) is returned as a binary candidate.
RankOneResult rank_one_certificate(const PointXX& p, double tol = 1e-6);

/// PSD and entrywise >= -tol. For order <= 4 this is exactly membership in the
/// completely positive cone; for larger orders it only decides the DNN cone.
bool check_dnn_membership(const SymMatrix& M, double tol = 1e-9);

}  // namespace dnnrelax
