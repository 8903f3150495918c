#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "dnnrelax/conic_core.hpp"

namespace dnnrelax {

/// min x^T Q x + 2 c^T x  s.t.  A x = b,  x in {-1, 1}^n.
struct BqpInstance {
  std::string name;
  SymMatrix Q{1};
  VectorXd c;
  MatrixXd A;  // m x n, row i is a_i^T
  VectorXd b;

  int n() const { return Q.order(); }
  int m() const { return static_cast<int>(A.rows()); }

  /// Throws DimensionError when the blocks disagree.
  void validate() const;
};

/// Weighted undirected graph, W(i, j) = weight of edge {i, j}, zero diagonal.
class MaxCutGraph {
 public:
  explicit MaxCutGraph(int n);
  explicit MaxCutGraph(const SymMatrix& weights);

  int n() const { return W_.order(); }
  const SymMatrix& weights() const { return W_; }
  void add_edge(int i, int j, double w);

 private:
  SymMatrix W_;
};

enum class GeneratorKind { RdnBQP, RdiBQP, RdBQP, RdsBQP };

GeneratorKind parse_generator_kind(std::string_view s);
std::string to_string(GeneratorKind k);

double bqp_objective(const BqpInstance& inst, const VectorXd& x);

struct BqpOracleResult {
  bool feasible = false;
  double opt = 0;
  VectorXd argmin;
};

inline constexpr int kBqpBruteForceLimit = 22;
inline constexpr int kMaxCutBruteForceLimit = 20;

/// Enumerates all 2^n sign vectors; a point is feasible when
/// ||A x - b||_inf <= 1e-9. Refuses (std::length_error) when n > limit.
BqpOracleResult brute_force_bqp(const BqpInstance& inst, int limit = kBqpBruteForceLimit);

SymMatrix laplacian(const MaxCutGraph& g);

/// (1/4) u^T L u; u must be a sign vector.
double cut_value(const MaxCutGraph& g, const VectorXd& u);

struct MaxCutOracleResult {
  double opt = 0;
  VectorXd arg;
};

/// Maximum cut by enumeration with u_0 fixed to +1.
MaxCutOracleResult brute_force_maxcut(const MaxCutGraph& g, int limit = kMaxCutBruteForceLimit);

/// Q = -L/4, c = 0, m = 0, so bqp_objective(u) == -cut_value(u).
BqpInstance mc_to_bqp(const MaxCutGraph& g);

/// Deterministic random instance of one of the four families. With `planted`
/// the right-hand side is b = A x_hat for a random sign vector x_hat, which
/// guarantees a feasible binary point.
BqpInstance generate_instance(GeneratorKind kind, int n, int m, std::uint64_t seed,
                              bool planted = true);

/// Same as generate_instance, also returning the planted point.
BqpInstance generate_instance(GeneratorKind kind, int n, int m, std::uint64_t seed, bool planted,
                              std::optional<VectorXd>* planted_point);

/// Random graph with every edge present, weight uniform on [lo, hi].
MaxCutGraph random_graph(int n, std::uint64_t seed, double lo = 0.0, double hi = 1.0);

}  // namespace dnnrelax
