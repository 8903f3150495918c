#pragma once

// Shared instances and closed-form reference values for the tests.

#include <cmath>
#include <random>

#include "dnnrelax/model.hpp"

namespace dnnrelax::testing {

inline BqpInstance example1() {
  BqpInstance inst;
  inst.name = "example1";
  MatrixXd Q(2, 2);
  Q << 0, -3, -3, -20;
  inst.Q = SymMatrix::checked(Q);
  inst.c = VectorXd(2);
  inst.c << -8, 9;
  inst.A = MatrixXd(1, 2);
  inst.A << 10, -10;
  inst.b = VectorXd::Zero(1);
  return inst;
}

inline BqpInstance example2() {
  BqpInstance inst;
  inst.name = "example2";
  MatrixXd Q(5, 5);
  Q << -52, 31, 49, -7, 4,
       31, -16, -50, -13, -49,
       49, -50, 8, 44, -30,
       -7, -13, 44, 36, 12,
       4, -49, -30, 12, 56;
  inst.Q = SymMatrix::checked(Q);
  inst.c = VectorXd(5);
  inst.c << -20, 37, 43, 25, -6;
  inst.A = MatrixXd(3, 5);
  inst.A << 4, 10, 29, 14, -36,
            38, 9, 1, -17, 23,
            48, 39, 5, -17, -13;
  inst.b = VectorXd(3);
  inst.b << 11, -50, -36;
  return inst;
}

// n=1, Q=[0], c=[1], m=0: optimum -2 at x=-1.
inline BqpInstance single_linear() {
  BqpInstance inst;
  inst.name = "single";
  inst.Q = SymMatrix(1);
  inst.c = VectorXd::Ones(1);
  inst.A = MatrixXd(0, 1);
  inst.b = VectorXd(0);
  return inst;
}

// x1 + x2 + x3 = 0 has no sign solution, but x = 0, X = (3I - ee^T)/2 is
// feasible for every relaxation.
inline BqpInstance odd_sum_zero() {
  BqpInstance inst;
  inst.name = "odd-sum";
  MatrixXd Q(3, 3);
  Q << 1, 0.5, 0, 0.5, -1, 0.25, 0, 0.25, 2;
  inst.Q = SymMatrix::checked(Q);
  inst.c = VectorXd(3);
  inst.c << 0.5, -1, 0.25;
  inst.A = MatrixXd::Ones(1, 3);
  inst.b = VectorXd::Zero(1);
  return inst;
}

inline MaxCutGraph triangle() {
  MaxCutGraph g(3);
  g.add_edge(0, 1, 1);
  g.add_edge(0, 2, 1);
  g.add_edge(1, 2, 1);
  return g;
}

inline MaxCutGraph single_edge(double w) {
  MaxCutGraph g(2);
  g.add_edge(0, 1, w);
  return g;
}

// Exact SDR1 optimum of Example 2 (the feasible set is one point; value from
// solving the pinned reduced system in rational arithmetic).
inline constexpr double kExample2Sdr1Exact = -60168139164914.0 / 198848614871.0;

inline MatrixXd random_symmetric(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = nd(rng);
  return (G + G.transpose()) / 2.0;
}

inline VectorXd random_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = nd(rng);
  return v;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / (1.0 + std::abs(b)); }

}  // namespace dnnrelax::testing
