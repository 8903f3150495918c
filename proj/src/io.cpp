#include "dnnrelax/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <utility>

namespace dnnrelax {

using json = nlohmann::ordered_json;

namespace {

int get_size(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    throw FormatError(std::string("instance: '") + key + "' must be an integer");
  }
  long long v = j[key].get<long long>();
  if (v < 0 || v > 100000) throw FormatError(std::string("instance: '") + key + "' out of range");
  return static_cast<int>(v);
}

std::vector<double> flat_numbers(const json& j, const char* key, int rows, int cols) {
  if (!j.contains(key) || !j[key].is_array()) throw FormatError(std::string("instance: '") + key + "' must be an array");
  std::vector<double> out;
  const json& a = j[key];
  bool nested = !a.empty() && a[0].is_array();
  for (const auto& el : a) {
    if (nested) {
      if (!el.is_array() || static_cast<int>(el.size()) != cols) {
        throw FormatError(std::string("instance: rows of '") + key + "' must have length " + std::to_string(cols));
      }
      for (const auto& v : el) {
        if (!v.is_number()) throw FormatError(std::string("instance: '") + key + "' has a non-number");
        out.push_back(v.get<double>());
      }
    } else {
      if (!el.is_number()) throw FormatError(std::string("instance: '") + key + "' has a non-number");
      out.push_back(el.get<double>());
    }
  }
  if (static_cast<long long>(out.size()) != static_cast<long long>(rows) * cols) {
    throw FormatError(std::string("instance: '") + key + "' has " + std::to_string(out.size()) +
                      " entries, expected " + std::to_string(static_cast<long long>(rows) * cols));
  }
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FileError("cannot open " + path);
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw FileError("cannot open " + path + " for writing");
  return f;
}

json row_json(const EqRow& r) {
  json psd = json::array(), nn = json::array(), fr = json::array();
  for (const auto& t : r.psd) psd.push_back({t.row, t.col, t.coef});
  for (const auto& t : r.nonneg) nn.push_back({t.index, t.coef});
  for (const auto& t : r.free) fr.push_back({t.index, t.coef});
  return {{"tag", r.tag}, {"rhs", r.rhs}, {"psd", psd}, {"nonneg", nn}, {"free", fr}};
}

json matrix_json(const MatrixXd& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    out.push_back(row);
  }
  return out;
}

}  // namespace

BqpInstance instance_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("instance: top level must be an object");
  const int n = get_size(j, "n");
  const int m = get_size(j, "m");
  if (n < 1) throw FormatError("instance: n must be >= 1");
  auto q = flat_numbers(j, "Q", n, n);
  auto c = flat_numbers(j, "c", n, 1);
  auto a = flat_numbers(j, "A", m, n);
  auto b = flat_numbers(j, "b", m, 1);

  MatrixXd Q(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) Q(i, k) = q[i * n + k];
  BqpInstance inst;
  inst.name = j.value("name", std::string());
  try {
    inst.Q = SymMatrix::checked(Q);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("instance: Q is not symmetric: ") + e.what());
  }
  inst.c = Eigen::Map<VectorXd>(c.data(), n);
  inst.A = MatrixXd(m, n);
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < n; ++k) inst.A(i, k) = a[i * n + k];
  inst.b = Eigen::Map<VectorXd>(b.data(), m);
  inst.validate();
  return inst;
}

json instance_to_json(const BqpInstance& inst) {
  const int n = inst.n(), m = inst.m();
  std::vector<double> q, a;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) q.push_back(inst.Q(i, k));
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < n; ++k) a.push_back(inst.A(i, k));
  return {{"name", inst.name},
          {"n", n},
          {"m", m},
          {"Q", q},
          {"c", std::vector<double>(inst.c.data(), inst.c.data() + n)},
          {"A", a},
          {"b", std::vector<double>(inst.b.data(), inst.b.data() + m)}};
}

BqpInstance load_instance(const std::string& path) {
  auto f = open_in(path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return instance_from_json(j);
}

void save_instance(const BqpInstance& inst, const std::string& path) {
  auto f = open_out(path);
  f << instance_to_json(inst).dump(2) << '\n';
  if (!f) throw FileError("write failed: " + path);
}

MaxCutGraph read_graph(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++lineno;
      auto p = out.find_first_not_of(" \t\r");
      if (p == std::string::npos || out[p] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next(line)) throw FormatError("graph: missing node count");
  std::istringstream head(line);
  int n = 0;
  std::string extra;
  if (!(head >> n) || n < 1 || (head >> extra)) throw FormatError("graph: first line must be a positive node count");
  MaxCutGraph g(n);
  std::set<std::pair<int, int>> seen;
  while (next(line)) {
    std::istringstream ls(line);
    int i = 0, k = 0;
    double w = 0;
    if (!(ls >> i >> k >> w) || (ls >> extra)) {
      throw FormatError("graph line " + std::to_string(lineno) + ": expected 'i j w'");
    }
    if (i < 1 || k < 1 || i > n || k > n || i == k || !std::isfinite(w)) {
      throw FormatError("graph line " + std::to_string(lineno) + ": invalid edge");
    }
    if (!seen.insert({std::min(i, k), std::max(i, k)}).second) {
      throw FormatError("graph line " + std::to_string(lineno) + ": duplicate edge " + std::to_string(i) + " " +
                        std::to_string(k));
    }
    g.add_edge(i - 1, k - 1, w);
  }
  return g;
}

void write_graph(std::ostream& out, const MaxCutGraph& g) {
  out << g.n() << '\n' << std::setprecision(17);
  for (int i = 0; i < g.n(); ++i)
    for (int k = i + 1; k < g.n(); ++k)
      if (g.weights()(i, k) != 0) out << i + 1 << ' ' << k + 1 << ' ' << g.weights()(i, k) << '\n';
}

MaxCutGraph load_graph(const std::string& path) {
  auto f = open_in(path);
  try {
    return read_graph(f);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void save_graph(const MaxCutGraph& g, const std::string& path) {
  auto f = open_out(path);
  write_graph(f, g);
  if (!f) throw FileError("write failed: " + path);
}

json program_to_json(const ConicProgram& prog) {
  json rows = json::array();
  for (const auto& r : prog.rows) rows.push_back(row_json(r));
  json face = json::array();
  for (const auto& h : prog.face) {
    json w = json::array();
    for (const auto& t : h.rows) w.push_back({t.index, t.coef});
    face.push_back({{"v", std::vector<double>(h.v.data(), h.v.data() + h.v.size())}, {"rows", w}});
  }
  return {{"format", "dnnrelax-program"},
          {"version", 1},
          {"label", prog.label},
          {"sense", prog.sense == Sense::Minimize ? "min" : "max"},
          {"psd_order", prog.psd_order},
          {"nonneg_count", prog.nonneg_count},
          {"free_count", prog.free_count},
          {"offset", prog.offset},
          {"objective_psd", matrix_json(prog.objective_psd)},
          {"objective_nonneg", std::vector<double>(prog.objective_nonneg.data(),
                                                   prog.objective_nonneg.data() + prog.objective_nonneg.size())},
          {"objective_free", std::vector<double>(prog.objective_free.data(),
                                                 prog.objective_free.data() + prog.objective_free.size())},
          {"rows", rows},
          {"face", face}};
}

json number_or_string(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json report_to_json(const EquivalenceReport& rep) {
  json vs = json::array();
  for (const auto& v : rep.violations) vs.push_back({{"constraint", v.constraint}, {"amount", v.amount}});
  return {{"relax_a", rep.relax_a},
          {"relax_b", rep.relax_b},
          {"status_a", to_string(rep.status_a)},
          {"status_b", to_string(rep.status_b)},
          {"opt_a", number_or_string(rep.opt_a)},
          {"opt_b", number_or_string(rep.opt_b)},
          {"gap", number_or_string(rep.gap())},
          {"mapped_feasible_ab", rep.mapped_feasible_ab},
          {"mapped_feasible_ba", rep.mapped_feasible_ba},
          {"objective_match_ab", rep.objective_match_ab},
          {"objective_match_ba", rep.objective_match_ba},
          {"max_violation", rep.max_violation},
          {"violations", vs},
          {"warnings", rep.warnings},
          {"verdict", to_string(rep.verdict)}};
}

json record_to_json(const RunRecord& rec) {
  return {{"instance_id", rec.instance_id}, {"method", to_string(rec.method)},
          {"status", to_string(rec.status)}, {"bound", number_or_string(rec.bound)},
          {"iters", rec.iters},             {"wall_time", rec.wall_time},
          {"seed", rec.seed}};
}

}  // namespace dnnrelax
