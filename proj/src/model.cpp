#include "dnnrelax/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace dnnrelax {

namespace {

constexpr double kFeasTol = 1e-9;

void require_sign_vector(const VectorXd& u) {
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    if (u(i) != 1.0 && u(i) != -1.0) {
      throw std::invalid_argument("entry " + std::to_string(i) + " is not +-1");
    }
  }
}

// Index of the bit that flips between Gray codes k-1 and k (k >= 1).
int gray_flip_bit(std::uint64_t k) {
  int bit = 0;
  while ((k & 1u) == 0) {
    k >>= 1;
    ++bit;
  }
  return bit;
}

}  // namespace

void BqpInstance::validate() const {
  const int dim = n();
  if (c.size() != dim) throw DimensionError("c has length " + std::to_string(c.size()));
  if (A.rows() > 0 && A.cols() != dim) throw DimensionError("A column count differs from n");
  if (b.size() != A.rows()) throw DimensionError("b length differs from the row count of A");
  if (!Q.mat().allFinite() || !c.allFinite() || !A.allFinite() || !b.allFinite()) {
    throw NumericError("instance data has non-finite entries");
  }
}

MaxCutGraph::MaxCutGraph(int n) : W_(n) {}

MaxCutGraph::MaxCutGraph(const SymMatrix& weights) : W_(weights) {
  for (int i = 0; i < n(); ++i) {
    if (W_(i, i) != 0.0) throw std::invalid_argument("graph weights need a zero diagonal");
  }
}

void MaxCutGraph::add_edge(int i, int j, double w) {
  if (i == j || i < 0 || j < 0 || i >= n() || j >= n()) {
    throw std::invalid_argument("invalid edge (" + std::to_string(i) + ", " + std::to_string(j) +
                                ")");
  }
  W_.set(i, j, w);
}

GeneratorKind parse_generator_kind(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "rdnbqp") return GeneratorKind::RdnBQP;
  if (lower == "rdibqp") return GeneratorKind::RdiBQP;
  if (lower == "rdbqp") return GeneratorKind::RdBQP;
  if (lower == "rdsbqp") return GeneratorKind::RdsBQP;
  throw std::invalid_argument("unknown generator kind '" + std::string(s) + "'");
}

std::string to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::RdnBQP: return "RdnBQP";
    case GeneratorKind::RdiBQP: return "RdiBQP";
    case GeneratorKind::RdBQP: return "RdBQP";
    case GeneratorKind::RdsBQP: return "RdsBQP";
  }
  return "?";
}

double bqp_objective(const BqpInstance& inst, const VectorXd& x) {
  if (x.size() != inst.n()) throw DimensionError("bqp_objective: dim(x) != n");
  return x.dot(inst.Q.mat() * x) + 2.0 * inst.c.dot(x);
}

BqpOracleResult brute_force_bqp(const BqpInstance& inst, int limit) {
  inst.validate();
  const int n = inst.n();
  if (n > limit) {
    throw std::length_error("brute_force_bqp: n = " + std::to_string(n) + " exceeds limit " +
                            std::to_string(limit));
  }
  const MatrixXd& Q = inst.Q.mat();
  VectorXd x = VectorXd::Constant(n, 1.0);
  VectorXd qx = Q * x;
  VectorXd ax = inst.A * x;
  double obj = x.dot(qx) + 2.0 * inst.c.dot(x);

  BqpOracleResult best;
  auto consider = [&]() {
    // incremental values drift, so candidates are re-evaluated exactly
    if (inst.m() > 0 && (ax - inst.b).lpNorm<Eigen::Infinity>() > 1e-6) return;
    if (best.feasible && obj > best.opt + 1e-6 * (1.0 + std::abs(best.opt))) return;
    if (inst.m() > 0 && (inst.A * x - inst.b).lpNorm<Eigen::Infinity>() > kFeasTol) return;
    const double exact = bqp_objective(inst, x);
    if (!best.feasible || exact < best.opt) {
      best.feasible = true;
      best.opt = exact;
      best.argmin = x;
    }
  };

  consider();
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int i = gray_flip_bit(k);
    const double xi = x(i);
    // x' = x - 2 xi e_i
    obj += -4.0 * xi * qx(i) + 4.0 * Q(i, i) - 4.0 * inst.c(i) * xi;
    qx -= 2.0 * xi * Q.col(i);
    if (inst.m() > 0) ax -= 2.0 * xi * inst.A.col(i);
    x(i) = -xi;
    consider();
  }
  return best;
}

SymMatrix laplacian(const MaxCutGraph& g) {
  const MatrixXd& w = g.weights().mat();
  MatrixXd l = -w;
  l.diagonal() = w.rowwise().sum();
  return SymMatrix(l);
}

double cut_value(const MaxCutGraph& g, const VectorXd& u) {
  if (u.size() != g.n()) throw DimensionError("cut_value: dim(u) != n");
  require_sign_vector(u);
  return 0.25 * u.dot(laplacian(g).mat() * u);
}

MaxCutOracleResult brute_force_maxcut(const MaxCutGraph& g, int limit) {
  const int n = g.n();
  if (n > limit) {
    throw std::length_error("brute_force_maxcut: n = " + std::to_string(n) + " exceeds limit " +
                            std::to_string(limit));
  }
  const MatrixXd l = laplacian(g).mat();
  VectorXd u = VectorXd::Constant(n, 1.0);
  VectorXd lu = l * u;
  double quad = u.dot(lu);

  MaxCutOracleResult best{0.25 * quad, u};
  const std::uint64_t total = std::uint64_t{1} << (n - 1);
  for (std::uint64_t k = 1; k < total; ++k) {
    const int i = gray_flip_bit(k) + 1;
    const double ui = u(i);
    quad += -4.0 * ui * lu(i) + 4.0 * l(i, i);
    lu -= 2.0 * ui * l.col(i);
    u(i) = -ui;
    if (0.25 * quad > best.opt + 1e-9 * (1.0 + std::abs(best.opt))) {
      const double exact = 0.25 * u.dot(l * u);
      if (exact > best.opt) best = {exact, u};
    }
  }
  return best;
}

BqpInstance mc_to_bqp(const MaxCutGraph& g) {
  BqpInstance inst;
  inst.name = "maxcut";
  inst.Q = SymMatrix(MatrixXd(-0.25 * laplacian(g).mat()));
  inst.c = VectorXd::Zero(g.n());
  inst.A = MatrixXd(0, g.n());
  inst.b = VectorXd(0);
  return inst;
}

BqpInstance generate_instance(GeneratorKind kind, int n, int m, std::uint64_t seed, bool planted) {
  return generate_instance(kind, n, m, seed, planted, nullptr);
}

BqpInstance generate_instance(GeneratorKind kind, int n, int m, std::uint64_t seed, bool planted,
                              std::optional<VectorXd>* planted_point) {
  if (n < 1) throw std::invalid_argument("generate_instance: n must be >= 1");
  if (m < 0) throw std::invalid_argument("generate_instance: m must be >= 0");

  detail::Rng rng(seed);
  auto draw = [&]() -> double {
    switch (kind) {
      case GeneratorKind::RdnBQP: return rng.normal();
      case GeneratorKind::RdiBQP: return static_cast<double>(rng.integer(-10, 10));
      case GeneratorKind::RdBQP: return rng.uniform();
      case GeneratorKind::RdsBQP: return rng.uniform(-1.0, 1.0);
    }
    return 0.0;
  };

  MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = draw();

  BqpInstance inst;
  inst.name = to_string(kind) + "-n" + std::to_string(n) + "-m" + std::to_string(m) + "-s" +
              std::to_string(seed);
  inst.Q = SymMatrix(MatrixXd(g + g.transpose()));
  inst.c.resize(n);
  for (int i = 0; i < n; ++i) inst.c(i) = draw();
  inst.A.resize(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) inst.A(i, j) = draw();

  if (planted) {
    VectorXd xhat(n);
    for (int i = 0; i < n; ++i) xhat(i) = rng.sign();
    inst.b = inst.A * xhat;
    if (planted_point != nullptr) *planted_point = xhat;
  } else {
    inst.b.resize(m);
    for (int i = 0; i < m; ++i) inst.b(i) = draw();
    if (planted_point != nullptr) planted_point->reset();
  }
  return inst;
}

MaxCutGraph random_graph(int n, std::uint64_t seed, double lo, double hi) {
  if (n < 1) throw std::invalid_argument("random_graph: n must be >= 1");
  detail::Rng rng(seed);
  MaxCutGraph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j, rng.uniform(lo, hi));
  return g;
}

}  // namespace dnnrelax
