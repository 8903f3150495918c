#include <cmath>
#include <optional>

#include <gtest/gtest.h>

#include "dnnrelax/model.hpp"
#include "fixtures.hpp"

namespace dnnrelax {
namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(BqpObjective, Example1) {
  BqpInstance inst = testing::example1();
  EXPECT_DOUBLE_EQ(bqp_objective(inst, vec({-1, -1})), -28);
  EXPECT_DOUBLE_EQ(bqp_objective(inst, vec({1, 1})), -24);
}

TEST(BqpObjective, ZeroData) {
  BqpInstance inst;
  inst.Q = SymMatrix(3);
  inst.c = VectorXd::Zero(3);
  inst.A = MatrixXd(0, 3);
  inst.b = VectorXd(0);
  EXPECT_EQ(bqp_objective(inst, vec({1, -1, 1})), 0);
  EXPECT_THROW(bqp_objective(inst, vec({1, 1})), DimensionError);
}

TEST(BruteForceBqp, Example1) {
  BqpOracleResult r = brute_force_bqp(testing::example1());
  ASSERT_TRUE(r.feasible);
  EXPECT_DOUBLE_EQ(r.opt, -28);
  EXPECT_EQ(r.argmin, vec({-1, -1}));
}

TEST(BruteForceBqp, SingleVariable) {
  BqpOracleResult r = brute_force_bqp(testing::single_linear());
  ASSERT_TRUE(r.feasible);
  EXPECT_DOUBLE_EQ(r.opt, -2);
  EXPECT_EQ(r.argmin, vec({-1}));
}

TEST(BruteForceBqp, Infeasible) {
  BqpInstance inst = testing::example1();
  inst.A = MatrixXd::Ones(1, 2);
  inst.b = VectorXd::Constant(1, 3.0);
  EXPECT_FALSE(brute_force_bqp(inst).feasible);
  EXPECT_FALSE(brute_force_bqp(testing::odd_sum_zero()).feasible);
  // Example 2 has no feasible sign vector either
  EXPECT_FALSE(brute_force_bqp(testing::example2()).feasible);
}

TEST(BruteForceBqp, RefusesLargeN) {
  BqpInstance inst = generate_instance(GeneratorKind::RdBQP, 23, 0, 1);
  EXPECT_THROW(brute_force_bqp(inst), std::length_error);
  EXPECT_THROW(brute_force_bqp(generate_instance(GeneratorKind::RdBQP, 8, 0, 1), 6), std::length_error);
}

TEST(Laplacian, Examples) {
  MatrixXd tri(3, 3);
  tri << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  EXPECT_EQ(laplacian(testing::triangle()).mat(), tri);
  MatrixXd edge(2, 2);
  edge << 3, -3, -3, 3;
  EXPECT_EQ(laplacian(testing::single_edge(3)).mat(), edge);
  EXPECT_EQ(laplacian(MaxCutGraph(3)).mat(), MatrixXd::Zero(3, 3));
}

TEST(Laplacian, RowSumsZero) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    MaxCutGraph g = random_graph(7, s, -1, 1);
    VectorXd le = laplacian(g).mat() * VectorXd::Ones(7);
    EXPECT_LE(le.cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(CutValue, Examples) {
  EXPECT_DOUBLE_EQ(cut_value(testing::triangle(), vec({1, 1, -1})), 2);
  EXPECT_DOUBLE_EQ(cut_value(testing::single_edge(3), vec({1, -1})), 3);
  EXPECT_NEAR(cut_value(random_graph(6, 3), VectorXd::Ones(6)), 0, 1e-12);
  EXPECT_THROW(cut_value(testing::triangle(), vec({1, 0.5, -1})), std::invalid_argument);
}

TEST(CutValue, EdgeSumIdentity) {
  MaxCutGraph g = random_graph(6, 9, -2, 3);
  for (int mask = 0; mask < 64; ++mask) {
    VectorXd u(6);
    for (int i = 0; i < 6; ++i) u(i) = (mask >> i & 1) ? 1 : -1;
    double direct = 0;
    for (int i = 0; i < 6; ++i)
      for (int j = i + 1; j < 6; ++j) direct += g.weights()(i, j) * (u(i) - u(j)) * (u(i) - u(j)) / 4;
    EXPECT_NEAR(cut_value(g, u), direct, 1e-12);
  }
}

TEST(BruteForceMaxCut, Examples) {
  EXPECT_DOUBLE_EQ(brute_force_maxcut(testing::triangle()).opt, 2);
  EXPECT_DOUBLE_EQ(brute_force_maxcut(testing::single_edge(3)).opt, 3);
  EXPECT_DOUBLE_EQ(brute_force_maxcut(MaxCutGraph(4)).opt, 0);
  EXPECT_THROW(brute_force_maxcut(MaxCutGraph(21)), std::length_error);
}

TEST(McToBqp, NegatesCut) {
  BqpInstance t = mc_to_bqp(testing::triangle());
  EXPECT_EQ(t.m(), 0);
  EXPECT_DOUBLE_EQ(bqp_objective(t, vec({1, 1, -1})), -2);
  EXPECT_DOUBLE_EQ(bqp_objective(mc_to_bqp(MaxCutGraph(3)), vec({1, -1, 1})), 0);
  EXPECT_DOUBLE_EQ(bqp_objective(mc_to_bqp(testing::single_edge(3)), vec({1, -1})), -3);
}

TEST(McToBqp, OracleConsistency) {
  for (int n = 2; n <= 12; n += 2) {
    MaxCutGraph g = random_graph(n, 100 + n, -1, 1);
    EXPECT_NEAR(brute_force_maxcut(g).opt, -brute_force_bqp(mc_to_bqp(g)).opt, 1e-12) << n;
  }
}

TEST(Generator, Deterministic) {
  for (auto kind : {GeneratorKind::RdnBQP, GeneratorKind::RdiBQP, GeneratorKind::RdBQP, GeneratorKind::RdsBQP}) {
    BqpInstance a = generate_instance(kind, 9, 4, 77);
    BqpInstance b = generate_instance(kind, 9, 4, 77);
    EXPECT_EQ(a.Q, b.Q);
    EXPECT_EQ(a.c, b.c);
    EXPECT_EQ(a.A, b.A);
    EXPECT_EQ(a.b, b.b);
    EXPECT_EQ(a.name, b.name);
    BqpInstance c = generate_instance(kind, 9, 4, 78);
    EXPECT_NE(a.c, c.c);
  }
}

TEST(Generator, PlantedPointIsFeasible) {
  for (auto kind : {GeneratorKind::RdnBQP, GeneratorKind::RdiBQP, GeneratorKind::RdBQP, GeneratorKind::RdsBQP}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      std::optional<VectorXd> xh;
      BqpInstance inst = generate_instance(kind, 8, 3, s, true, &xh);
      ASSERT_TRUE(xh.has_value());
      EXPECT_LE((inst.A * *xh - inst.b).cwiseAbs().maxCoeff(), 1e-9);
      BqpOracleResult r = brute_force_bqp(inst);
      ASSERT_TRUE(r.feasible);
      EXPECT_LE(r.opt, bqp_objective(inst, *xh) + 1e-9);
    }
  }
}

TEST(Generator, IntegerFamilyRanges) {
  BqpInstance inst = generate_instance(GeneratorKind::RdiBQP, 10, 5, 3, false);
  auto integral = [](const MatrixXd& m, double lim) {
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j)
        if (m(i, j) != std::round(m(i, j)) || std::abs(m(i, j)) > lim) return false;
    return true;
  };
  EXPECT_TRUE(integral(inst.A, 10));
  EXPECT_TRUE(integral(inst.b, 10));
  EXPECT_TRUE(integral(inst.c, 10));
  EXPECT_TRUE(integral(inst.Q.mat(), 20));
}

TEST(Generator, FamilyDistributions) {
  BqpInstance u = generate_instance(GeneratorKind::RdBQP, 20, 10, 1, false);
  EXPECT_GE(u.A.minCoeff(), 0);
  EXPECT_LE(u.A.maxCoeff(), 1);
  BqpInstance s = generate_instance(GeneratorKind::RdsBQP, 20, 10, 1, false);
  EXPECT_GE(s.A.minCoeff(), -1);
  EXPECT_LE(s.A.maxCoeff(), 1);
  EXPECT_LT(s.A.minCoeff(), 0);
}

TEST(Generator, InvalidSizes) {
  EXPECT_THROW(generate_instance(GeneratorKind::RdBQP, 0, 0, 1), std::invalid_argument);
  EXPECT_THROW(generate_instance(GeneratorKind::RdBQP, 3, -1, 1), std::invalid_argument);
}

TEST(Generator, KindNames) {
  for (auto kind : {GeneratorKind::RdnBQP, GeneratorKind::RdiBQP, GeneratorKind::RdBQP, GeneratorKind::RdsBQP}) {
    EXPECT_EQ(parse_generator_kind(to_string(kind)), kind);
  }
  EXPECT_EQ(parse_generator_kind("rdbqp"), GeneratorKind::RdBQP);
  EXPECT_THROW(parse_generator_kind("bogus"), std::invalid_argument);
}

TEST(Graph, Validation) {
  MaxCutGraph g(3);
  EXPECT_THROW(g.add_edge(0, 0, 1), std::invalid_argument);
  EXPECT_THROW(g.add_edge(0, 3, 1), std::invalid_argument);
  MatrixXd w = MatrixXd::Ones(2, 2);
  EXPECT_THROW(MaxCutGraph{SymMatrix(w)}, std::invalid_argument);
}

TEST(Instance, ValidateDims) {
  BqpInstance inst = testing::example1();
  inst.b = VectorXd::Zero(2);
  EXPECT_THROW(inst.validate(), DimensionError);
}

}  // namespace
}  // namespace dnnrelax
