#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "dnnrelax/relax.hpp"
#include "dnnrelax/solver.hpp"
#include "fixtures.hpp"

namespace dnnrelax {
namespace {

using testing::example1;
using testing::example2;

bool mentions(const CertificateReport& r, const std::string& what) {
  for (const auto& v : r.violations)
    if (v.find(what) != std::string::npos) return true;
  return false;
}

// min Y11 over a 1x1 PSD block with Y11 = 5.
ConicProgram pinned_scalar() {
  ConicProgram p;
  p.psd_order = 1;
  p.objective_psd = MatrixXd::Ones(1, 1);
  p.objective_nonneg = VectorXd(0);
  p.objective_free = VectorXd(0);
  EqRow r;
  r.psd.push_back({0, 0, 1.0});
  r.rhs = 5;
  r.tag = "pin";
  p.rows.push_back(r);
  p.label = "pinned";
  return p;
}

TEST(Settings, Validate) {
  SolverSettings s;
  EXPECT_NO_THROW(s.validate());
  s.tol_gap = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.max_iters = 0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  EXPECT_THROW(solve(pinned_scalar(), s), std::invalid_argument);
}

TEST(Solve, PinnedScalar) {
  ConicSolution s = solve(pinned_scalar());
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.primal_obj, 5, 1e-7);
  EXPECT_TRUE(certify(pinned_scalar(), s, 1e-6).ok());
}

TEST(Solve, Example1Sdr1) {
  ConicProgram p = build_sdr1(example1()).program;
  ConicSolution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.primal_obj, -28, 1e-6);
  EXPECT_LE(s.residuals.primal, 1e-8);
  EXPECT_LE(s.residuals.dual, 1e-8);
  EXPECT_LE(std::abs(s.primal_obj - s.dual_obj), 1e-8 * (1 + std::abs(s.primal_obj)));
  CertificateReport c = certify(p, s, 1e-6);
  EXPECT_TRUE(c.ok()) << (c.violations.empty() ? "" : c.violations.front());
  EXPECT_GE(c.primal_cone_margin, -1e-6);
}

TEST(Solve, Example1SdrIsUnbounded) {
  ConicProgram p = build_sdr(example1()).program;
  ConicSolution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::Unbounded);
  ASSERT_TRUE(s.ray.has_value());
  CertificateReport c = certify(p, s, 1e-6);
  EXPECT_TRUE(c.ok()) << (c.violations.empty() ? "" : c.violations.front());
  EXPECT_LE(c.ray_objective, -1 + 1e-6);
  EXPECT_TRUE(std::isinf(s.primal_obj) && s.primal_obj < 0);
}

TEST(Solve, Example2) {
  ConicProgram p = build_sdr1(example2()).program;
  ConicSolution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.primal_obj, testing::kExample2Sdr1Exact, 1e-4);
  EXPECT_TRUE(certify(p, s, 1e-6).ok());
  EXPECT_EQ(solve(build_sdr(example2()).program).status, SolveStatus::Unbounded);
}

TEST(Certify, CorruptedEntryIsFlagged) {
  ConicProgram p = build_sdr1(example1()).program;
  ConicSolution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  s.primal.psd(1, 1) += 1;
  CertificateReport c = certify(p, s, 1e-6);
  EXPECT_FALSE(c.ok());
  EXPECT_TRUE(mentions(c, "diag[0]"));
}

TEST(Certify, BrokenRayIsFlagged) {
  ConicProgram p = build_sdr(example1()).program;
  ConicSolution s = solve(p);
  ASSERT_TRUE(s.ray.has_value());
  s.ray->primal.free *= -1;
  EXPECT_FALSE(certify(p, s, 1e-6).ok());
}

TEST(Presolve, FullRankUnchanged) {
  ConicProgram p = build_sdr(example1()).program;
  PresolveResult r = presolve_rank_check(p);
  EXPECT_TRUE(r.dropped.empty());
  EXPECT_FALSE(r.inconsistent);
  EXPECT_EQ(r.program.row_count(), p.row_count());
}

TEST(Presolve, DuplicateRowDropped) {
  ConicProgram p = build_sdr1(example1()).program;
  ConicProgram dup = p;
  dup.face.clear();
  p.face.clear();
  dup.rows.push_back(dup.rows.back());
  dup.rows.back().tag = "copy";
  PresolveResult r = presolve_rank_check(dup);
  EXPECT_FALSE(r.inconsistent);
  EXPECT_EQ(r.program.row_count(), presolve_rank_check(p).program.row_count());

  ConicSolution a = solve(build_sdr1(example1()).program);
  ConicProgram dup_full = build_sdr1(example1()).program;
  dup_full.rows.push_back(dup_full.rows.back());
  ConicSolution b = solve(dup_full);
  ASSERT_EQ(b.status, SolveStatus::Optimal);
  EXPECT_NEAR(a.primal_obj, b.primal_obj, 1e-6);
  EXPECT_NE(std::find(b.dropped_rows.begin(), b.dropped_rows.end(), dup_full.row_count() - 1),
            b.dropped_rows.end());
  EXPECT_TRUE(certify(dup_full, b, 1e-6).ok());
}

TEST(Presolve, ConflictingDuplicateIsInfeasible) {
  ConicProgram p = build_sdr1(example1()).program;
  p.rows.push_back(p.rows.back());
  p.rows.back().rhs += 1;
  PresolveResult r = presolve_rank_check(p);
  EXPECT_TRUE(r.inconsistent);
  ConicSolution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::Infeasible);
  EXPECT_TRUE(certify(p, s, 1e-6).ok());
}

// rows that vanish on the face leave rounding residue that must not survive presolve
TEST(Presolve, FaceResidueIsDropped) {
  BqpInstance inst = generate_instance(GeneratorKind::RdnBQP, 8, 3, 215);
  ConicProgram p = build_sdr2(inst).program;
  ConicProgram bare = p;
  bare.face.clear();
  ConicSolution a = solve(p), b = solve(bare);
  ASSERT_EQ(a.status, SolveStatus::Optimal);
  ASSERT_EQ(b.status, SolveStatus::Optimal);
  EXPECT_NEAR(a.primal_obj, b.primal_obj, 1e-6);
  EXPECT_EQ(a.dropped_rows.size(), 2u * inst.m());
  EXPECT_TRUE(certify(p, a, 1e-6).ok());
}

TEST(Solve, InfeasibleRelaxation) {
  // x1 + x2 = 3 is out of reach for any lifted point with unit diagonal
  BqpInstance inst = example1();
  inst.A = MatrixXd::Ones(1, 2);
  inst.b = VectorXd::Constant(1, 3.0);
  for (auto r : {Relaxation::Sdr1, Relaxation::Sdr2, Relaxation::Dnnp}) {
    ConicProgram p = build_relaxation(r, inst).program;
    ConicSolution s = solve(p);
    EXPECT_EQ(s.status, SolveStatus::Infeasible) << to_string(r);
    EXPECT_TRUE(certify(p, s, 1e-6).ok()) << to_string(r);
  }
}

TEST(Solve, RelaxationFeasibleWithoutBinaryPoint) {
  BqpInstance inst = testing::odd_sum_zero();
  for (auto r : {Relaxation::Sdr1, Relaxation::Sdr2, Relaxation::Dnnp}) {
    ConicProgram p = build_relaxation(r, inst).program;
    ConicSolution s = solve(p);
    ASSERT_EQ(s.status, SolveStatus::Optimal) << to_string(r);
    EXPECT_TRUE(certify(p, s, 1e-6).ok()) << to_string(r);
  }
}

TEST(Solve, MaximizeSense) {
  ConicProgram p = build_mc_sdr(testing::triangle()).program;
  ConicSolution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.primal_obj, 2.25, 1e-7);
  EXPECT_NEAR(s.dual_obj, 2.25, 1e-7);
  EXPECT_TRUE(certify(p, s, 1e-6).ok());
  // analytic optimum: off-diagonals -1/2
  EXPECT_NEAR(s.primal.psd(0, 1), -0.5, 1e-5);
}

TEST(Solve, IterationLimit) {
  SolverSettings st;
  st.max_iters = 1;
  ConicSolution s = solve(build_sdr2(example1()).program, st);
  EXPECT_EQ(s.status, SolveStatus::IterationLimit);
  EXPECT_EQ(s.iters, 1);
}

TEST(Solve, Deterministic) {
  BqpInstance inst = generate_instance(GeneratorKind::RdnBQP, 7, 3, 12);
  ConicProgram p = build_dnnp(inst).program;
  ConicSolution a = solve(p), b = solve(p);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].primal_obj, b.history[i].primal_obj);
    EXPECT_EQ(a.history[i].mu, b.history[i].mu);
  }
  EXPECT_EQ(a.primal.psd, b.primal.psd);
  EXPECT_EQ(a.y, b.y);
}

TEST(Solve, ObjectiveScaling) {
  std::vector<ConicProgram> suite = {build_sdr1(example1()).program, build_sdr2(example1()).program,
                                     build_dnnp(example1()).program, build_sdr1(example2()).program,
                                     build_sdr(example1()).program, build_mc_sdr(testing::triangle()).program};
  for (const auto& p : suite) {
    ConicProgram q = p;
    q.objective_psd *= 1e3;
    q.objective_nonneg *= 1e3;
    q.objective_free *= 1e3;
    q.offset *= 1e3;
    ConicSolution a = solve(p), b = solve(q);
    EXPECT_EQ(a.status, b.status) << p.label;
    if (a.status == SolveStatus::Optimal) {
      EXPECT_LE(std::abs(b.primal_obj - 1e3 * a.primal_obj), 1e-6 * std::abs(1e3 * a.primal_obj) + 1e-6)
          << p.label;
    }
  }
}

TEST(Solve, FinalIterateWeakDuality) {
  for (std::uint64_t s = 0; s < 4; ++s) {
    BqpInstance inst = generate_instance(GeneratorKind::RdsBQP, 6, 2, s);
    ConicSolution sol = solve(build_sdr2(inst).program);
    ASSERT_EQ(sol.status, SolveStatus::Optimal);
    EXPECT_LE(sol.dual_obj, sol.primal_obj + 1e-8 * (1 + std::abs(sol.primal_obj)));
  }
}

TEST(Solve, LogColumns) {
  std::ostringstream log;
  SolverSettings st;
  st.verbosity = 1;
  st.log = &log;
  ConicSolution s = solve(build_sdr1(example1()).program, st);
  std::string first;
  std::istringstream in(log.str());
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("iter", 0) == 0) {
      first = line;
      break;
    }
  }
  EXPECT_EQ(first, "iter primal_obj dual_obj gap primal_res dual_res mu tau kappa step");
  EXPECT_EQ(static_cast<int>(s.history.size()), s.iters + 1);
}

TEST(Solve, FaceHintMismatchRejected) {
  ConicProgram p = build_sdr1(example1()).program;
  ASSERT_FALSE(p.face.empty());
  p.face[0].v(0) += 1;
  EXPECT_THROW(solve(p), std::invalid_argument);
}

}  // namespace
}  // namespace dnnrelax
