#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dnnrelax/equivalence.hpp"
#include "fixtures.hpp"

namespace dnnrelax {
namespace {

using testing::example1;
using testing::random_symmetric;
using testing::random_vector;

SymMatrix ones(int n) { return SymMatrix(MatrixXd(MatrixXd::Ones(n, n))); }

double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

bool flagged(const std::vector<Violation>& vs, const std::string& prefix) {
  for (const auto& v : vs)
    if (v.constraint.rfind(prefix, 0) == 0) return true;
  return false;
}

TEST(Maps, Sdr2ToDnnpExamples) {
  PointZZ a = sdr2_to_dnnp_point({-VectorXd::Ones(2), ones(2)});
  EXPECT_EQ(a.z, VectorXd::Ones(2));
  EXPECT_EQ(a.Z, ones(2));
  PointZZ b = sdr2_to_dnnp_point({VectorXd::Ones(2), ones(2)});
  EXPECT_EQ(b.z, VectorXd::Zero(2));
  EXPECT_EQ(b.Z.mat(), MatrixXd::Zero(2, 2));
  EXPECT_THROW(sdr2_to_dnnp_point({VectorXd::Ones(3), ones(2)}), DimensionError);
}

TEST(Maps, DnnpToSdr2Examples) {
  PointXX a = dnnp_to_sdr2_point({VectorXd::Zero(2), SymMatrix(2)});
  EXPECT_EQ(a.x, VectorXd::Ones(2));
  EXPECT_EQ(a.X, ones(2));
  PointXX b = dnnp_to_sdr2_point({VectorXd::Ones(2), ones(2)});
  EXPECT_EQ(b.x, -VectorXd::Ones(2));
  EXPECT_EQ(b.X, ones(2));
}

TEST(Maps, McExamples) {
  PointXX a = mc_sdr_to_dnnp_point(ones(3));
  EXPECT_EQ(a.x, VectorXd::Constant(3, 0.5));
  EXPECT_EQ(a.X.mat(), MatrixXd::Constant(3, 3, 0.5));

  PointXX b = mc_sdr_to_dnnp_point(SymMatrix::identity(2));
  MatrixXd expect(2, 2);
  expect << 0.5, 0.25, 0.25, 0.5;
  EXPECT_EQ(b.X.mat(), expect);

  MatrixXd u(3, 3);
  u << 1, -0.5, -0.5, -0.5, 1, -0.5, -0.5, -0.5, 1;
  PointXX t = mc_sdr_to_dnnp_point(SymMatrix(u));
  EXPECT_DOUBLE_EQ(t.X(0, 1), 0.125);
  EXPECT_DOUBLE_EQ(t.X(2, 2), 0.5);
  EXPECT_NEAR(mc_dnnp_objective(testing::triangle(), t), 2.25, 1e-14);

  EXPECT_EQ(mc_dnnp_to_sdr_point({VectorXd::Zero(3), SymMatrix(3)}), ones(3));
  EXPECT_EQ(mc_dnnp_to_sdr_point(t), SymMatrix(u));
}

TEST(Maps, RoundTripsAreExact) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 1 + trial % 9;
    PointXX p{random_vector(n, rng), SymMatrix(random_symmetric(n, rng))};
    PointXX back = dnnp_to_sdr2_point(sdr2_to_dnnp_point(p));
    EXPECT_LE((back.x - p.x).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE(max_abs(back.X.mat() - p.X.mat()), 1e-13);

    SymMatrix U(random_symmetric(n, rng));
    EXPECT_LE(max_abs(mc_dnnp_to_sdr_point(mc_sdr_to_dnnp_point(U)).mat() - U.mat()), 1e-14);
  }
}

TEST(Maps, ObjectiveTransportOnRandomPoints) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 1 + trial % 10;
    BqpInstance inst = generate_instance(GeneratorKind::RdnBQP, n, 0, trial);
    PointXX p{random_vector(n, rng), SymMatrix(random_symmetric(n, rng))};
    double fx = sdr_objective(inst, p);
    double fz = dnnp_objective(inst, sdr2_to_dnnp_point(p));
    ASSERT_LE(std::abs(fx - fz), 1e-10 * (1 + std::abs(fx))) << trial;

    MaxCutGraph g = random_graph(n, trial, -1, 1);
    SymMatrix U(random_symmetric(n, rng));
    PointXX q{random_vector(n, rng), SymMatrix(random_symmetric(n, rng))};
    double a = mc_sdr_objective(g, mc_dnnp_to_sdr_point(q));
    double b = mc_dnnp_objective(g, q);
    ASSERT_LE(std::abs(a - b), 1e-10 * (1 + std::abs(b))) << trial;
    double c = mc_sdr_objective(g, U);
    ASSERT_LE(std::abs(c - mc_dnnp_objective(g, mc_sdr_to_dnnp_point(U))), 1e-10 * (1 + std::abs(c)));
  }
}

TEST(Maps, SchurStepConsistency) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + trial % 6;
    PointXX p{random_vector(n, rng), SymMatrix(random_symmetric(n, rng))};
    PointZZ q = sdr2_to_dnnp_point(p);
    MatrixXd lhs = q.Z.mat() - q.z * q.z.transpose();
    MatrixXd rhs = (p.X.mat() - p.x * p.x.transpose()) / 4;
    EXPECT_LE(max_abs(lhs - rhs), 1e-12);
  }
}

TEST(Maps, DecompositionIdentity) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + trial % 6;
    PointXX p{random_vector(n, rng), SymMatrix(random_symmetric(n, rng))};
    VectorXd e = VectorXd::Ones(n);
    MatrixXd rebuilt = 4 * (p.X.mat() - p.x * p.x.transpose()) + (2 * p.x - e) * (2 * p.x - e).transpose();
    EXPECT_LE(max_abs(mc_dnnp_to_sdr_point(p).mat() - rebuilt), 1e-12);
  }
}

TEST(Maps, UnitDiagonalPsdMapsIntoHalfBox) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + trial % 7;
    MatrixXd V = random_symmetric(n, rng);
    MatrixXd G = V * V.transpose() + 1e-3 * MatrixXd::Identity(n, n);
    VectorXd d = G.diagonal().cwiseSqrt().cwiseInverse();
    SymMatrix U(MatrixXd(d.asDiagonal() * G * d.asDiagonal()));
    PointXX p = mc_sdr_to_dnnp_point(U);
    EXPECT_GE(p.X.mat().minCoeff(), -1e-15);
    EXPECT_LE(p.X.mat().maxCoeff(), 0.5 + 1e-15);
  }
}

TEST(Feasibility, BinaryPointOfExample1) {
  BqpInstance inst = example1();
  PointXX p{-VectorXd::Ones(2), ones(2)};
  EXPECT_TRUE(check_feasibility(Relaxation::Sdr2, p, inst, 1e-12).empty());
  EXPECT_TRUE(check_feasibility(Relaxation::Sdr1, p, inst, 1e-12).empty());
  EXPECT_TRUE(check_feasibility(Relaxation::Sdr, p, inst, 1e-12).empty());
  EXPECT_TRUE(check_feasibility(Relaxation::Dnnp, sdr2_to_dnnp_point(p), inst, 1e-12).empty());
}

TEST(Feasibility, PerturbedEntryIsFlagged) {
  BqpInstance inst = example1();
  MatrixXd X = MatrixXd::Ones(2, 2);
  X(0, 1) = X(1, 0) = 1.1;
  auto vs = check_feasibility(Relaxation::Sdr2, PointXX{-VectorXd::Ones(2), SymMatrix(X)}, inst, 1e-6);
  EXPECT_TRUE(flagged(vs, "quad[0]"));
  EXPECT_TRUE(flagged(vs, "psd"));
  EXPECT_FALSE(flagged(vs, "diag"));
}

TEST(Feasibility, CutRowsAndNonnegativity) {
  BqpInstance inst = testing::single_linear();
  // x = 2 breaks the cut 2 - 2x >= 0 and z = (1 - x)/2 >= 0
  PointXX p{VectorXd::Constant(1, 2.0), SymMatrix::identity(1)};
  EXPECT_TRUE(flagged(check_feasibility(Relaxation::Sdr2, p, inst, 1e-9), "cut[0,0]"));
  EXPECT_FALSE(flagged(check_feasibility(Relaxation::Sdr1, p, inst, 1e-9), "cut"));
  EXPECT_TRUE(flagged(check_feasibility(Relaxation::Dnnp, sdr2_to_dnnp_point(p), inst, 1e-9), "nonneg[0,1]"));
}

TEST(Feasibility, WrongTag) {
  BqpInstance inst = example1();
  PointXX p{-VectorXd::Ones(2), ones(2)};
  EXPECT_THROW(check_feasibility(Relaxation::Dnnp, p, inst, 1e-6), std::invalid_argument);
  EXPECT_THROW(check_feasibility(Relaxation::Sdr2, PointZZ{VectorXd::Ones(2), ones(2)}, inst, 1e-6),
               std::invalid_argument);
  EXPECT_THROW(check_feasibility(Relaxation::MaxCutSdr, p, testing::triangle(), 1e-6), std::invalid_argument);
  EXPECT_THROW(check_feasibility(Relaxation::Sdr, ones(3), testing::triangle(), 1e-6), std::invalid_argument);
}

TEST(Feasibility, MaxCutPoints) {
  MaxCutGraph g = testing::triangle();
  EXPECT_TRUE(check_feasibility(Relaxation::MaxCutSdr, SymMatrix::identity(3), g, 1e-9).empty());
  EXPECT_TRUE(check_feasibility(Relaxation::MaxCutDnnp, PointXX{VectorXd::Zero(3), SymMatrix(3)}, g, 1e-9).empty());
  EXPECT_TRUE(check_feasibility(Relaxation::MaxCutSdr, ones(3), g, 1e-9).empty());
  MatrixXd bad = MatrixXd::Identity(3, 3);
  bad(0, 1) = bad(1, 0) = 2;
  EXPECT_TRUE(flagged(check_feasibility(Relaxation::MaxCutSdr, SymMatrix(bad), g, 1e-9), "psd"));
}

TEST(Sdr2DnnpEquivalence, Example1) {
  EquivalenceReport r = verify_theorem3(example1(), 1e-6);
  EXPECT_EQ(r.verdict, Verdict::Pass) << r.max_violation;
  EXPECT_NEAR(r.opt_a, -28, 1e-6);
  EXPECT_NEAR(r.opt_b, -28, 1e-6);

  // the DNNP optimum of Example 1 mapped back is SDR2-feasible
  BuiltProgram b = build_dnnp(example1());
  ConicSolution s = solve(b.program);
  PointZZ z{*b.map.extract_vector(s.primal), b.map.extract_matrix(s.primal)};
  EXPECT_TRUE(check_feasibility(Relaxation::Sdr2, dnnp_to_sdr2_point(z), example1(), 1e-6).empty());
}

TEST(Sdr2DnnpEquivalence, PlantedInstance) {
  EquivalenceReport r = verify_theorem3(generate_instance(GeneratorKind::RdBQP, 8, 3, 7), 1e-5);
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_TRUE(r.mapped_feasible_ab && r.mapped_feasible_ba);
}

TEST(Sdr2DnnpEquivalence, EmptyBinarySetStillPasses) {
  BqpInstance inst = testing::odd_sum_zero();
  ASSERT_FALSE(brute_force_bqp(inst).feasible);
  EquivalenceReport r = verify_theorem3(inst, 1e-6);
  EXPECT_EQ(r.verdict, Verdict::Pass);
}

TEST(Sdr2DnnpEquivalence, InfeasibleRelaxationIsNotApplicable) {
  BqpInstance inst = example1();
  inst.A = MatrixXd::Ones(1, 2);
  inst.b = VectorXd::Constant(1, 3.0);
  EquivalenceReport r = verify_theorem3(inst);
  EXPECT_EQ(r.verdict, Verdict::NotApplicable);
  EXPECT_EQ(r.status_a, SolveStatus::Infeasible);
}

TEST(Sdr2DnnpEquivalence, IterationLimitFarFromOptimumIsNotApplicable) {
  SolverSettings st;
  st.max_iters = 2;
  EquivalenceReport r = verify_theorem3(generate_instance(GeneratorKind::RdnBQP, 6, 2, 1), 1e-6, st);
  EXPECT_EQ(r.verdict, Verdict::NotApplicable);
  EXPECT_EQ(r.status_b, SolveStatus::IterationLimit);
}

TEST(MaxCutEquivalence, Triangle) {
  EquivalenceReport r = verify_theorem4(testing::triangle(), 1e-6);
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_NEAR(r.opt_a, 2.25, 1e-6);
  EXPECT_NEAR(r.opt_b, 2.25, 1e-6);
}

TEST(MaxCutEquivalence, EmptyAndRandomGraphs) {
  EquivalenceReport e = verify_theorem4(MaxCutGraph(4), 1e-6);
  EXPECT_EQ(e.verdict, Verdict::Pass);
  EXPECT_NEAR(e.opt_a, 0, 1e-7);
  EXPECT_NEAR(e.opt_b, 0, 1e-7);
  EXPECT_EQ(verify_theorem4(random_graph(8, 3), 1e-5).verdict, Verdict::Pass);
}

TEST(RankOne, Examples) {
  RankOneResult a = rank_one_certificate({-VectorXd::Ones(2), ones(2)});
  EXPECT_TRUE(a.exact);
  ASSERT_TRUE(a.recovered.has_value());
  EXPECT_EQ(*a.recovered, -VectorXd::Ones(2));

  RankOneResult b = rank_one_certificate({VectorXd::Zero(3), SymMatrix::identity(3)});
  EXPECT_FALSE(b.exact);
  EXPECT_FALSE(b.recovered.has_value());

  // rank one but not binary: no candidate
  VectorXd x = VectorXd::Constant(2, 0.5);
  RankOneResult c = rank_one_certificate({x, SymMatrix(MatrixXd(x * x.transpose()))});
  EXPECT_TRUE(c.exact);
  EXPECT_FALSE(c.recovered.has_value());
}

TEST(RankOne, SolverOptima) {
  BuiltProgram b1 = build_sdr1(example1());
  ConicSolution s1 = solve(b1.program);
  RankOneResult r1 = rank_one_certificate({*b1.map.extract_vector(s1.primal), b1.map.extract_matrix(s1.primal)});
  EXPECT_TRUE(r1.exact);
  ASSERT_TRUE(r1.recovered.has_value());
  EXPECT_EQ(*r1.recovered, -VectorXd::Ones(2));

  BuiltProgram b2 = build_sdr1(testing::example2());
  ConicSolution s2 = solve(b2.program);
  EXPECT_FALSE(rank_one_certificate({*b2.map.extract_vector(s2.primal), b2.map.extract_matrix(s2.primal)}).exact);
}

TEST(DnnMembership, Examples) {
  EXPECT_TRUE(check_dnn_membership(SymMatrix::identity(3)));
  MatrixXd neg(2, 2);
  neg << 1, -0.1, -0.1, 1;
  EXPECT_FALSE(check_dnn_membership(SymMatrix(neg)));
  MatrixXd indef(2, 2);
  indef << 1, 2, 2, 1;
  EXPECT_FALSE(check_dnn_membership(SymMatrix(indef)));
  EXPECT_TRUE(check_dnn_membership(ones(5)));
}

}  // namespace
}  // namespace dnnrelax
