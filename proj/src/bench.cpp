#include "dnnrelax/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace dnnrelax {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool suite_method(Relaxation r) {
  return r == Relaxation::Sdr || r == Relaxation::Sdr1 || r == Relaxation::Sdr2 ||
         r == Relaxation::Dnnp;
}

std::string instance_id(GeneratorKind kind, int n, int m, std::uint64_t seed) {
  return to_string(kind) + "-n" + std::to_string(n) + "-m" + std::to_string(m) + "-s" +
         std::to_string(seed);
}

RunRecord run_one(const BqpInstance& inst, Relaxation method, const SolverSettings& settings) {
  BuiltProgram built = build_relaxation(method, inst);
  auto t0 = std::chrono::steady_clock::now();
  ConicSolution sol = solve(built.program, settings);
  auto t1 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.method = method;
  rec.status = sol.status;
  rec.iters = sol.iters;
  rec.wall_time = std::chrono::duration<double>(t1 - t0).count();
  switch (sol.status) {
    case SolveStatus::Optimal: rec.bound = sol.primal_obj; break;
    case SolveStatus::Unbounded: rec.bound = -kInf; break;
    default: rec.bound = std::numeric_limits<double>::quiet_NaN();
  }
  return rec;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_row(std::ostream& out, const std::vector<std::string>& cells, bool gnuplot) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << (gnuplot ? ' ' : ',');
    out << cells[i];
  }
  out << '\n';
}

template <class T>
void emit_to(const T& data, const std::string& path, bool gnuplot) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(f, data, gnuplot);
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace

std::vector<RunRecord> run_suite(const SuiteOptions& opts) {
  if (opts.count < 1) throw std::invalid_argument("run_suite: count must be >= 1");
  for (Relaxation r : opts.methods) {
    if (!suite_method(r)) throw std::invalid_argument("run_suite: unsupported method " + to_string(r));
  }
  const int k = static_cast<int>(opts.methods.size());
  std::vector<BqpInstance> instances;
  for (int i = 0; i < opts.count; ++i) {
    instances.push_back(generate_instance(opts.kind, opts.n, opts.m, opts.base_seed + i, opts.planted));
  }

  std::vector<RunRecord> out(static_cast<std::size_t>(opts.count) * k);
  auto job = [&](int idx) {
    int i = idx / k;
    std::uint64_t seed = opts.base_seed + i;
    RunRecord rec = run_one(instances[i], opts.methods[idx % k], opts.settings);
    rec.instance_id = instance_id(opts.kind, opts.n, opts.m, seed);
    rec.seed = seed;
    out[idx] = std::move(rec);
  };

  const int total = static_cast<int>(out.size());
  const int workers = std::clamp(opts.workers, 1, total);
  if (workers == 1) {
    for (int i = 0; i < total; ++i) job(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int i = next++; i < total; i = next++) job(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  return out;
}

std::vector<RunRecord> run_suite(GeneratorKind kind, int count, int n, int m,
                                 const std::vector<Relaxation>& methods, std::uint64_t base_seed) {
  SuiteOptions o;
  o.kind = kind;
  o.count = count;
  o.n = n;
  o.m = m;
  o.methods = methods;
  o.base_seed = base_seed;
  return run_suite(o);
}

ProfileMetric parse_profile_metric(const std::string& s) {
  if (s == "bound") return ProfileMetric::Bound;
  if (s == "iters") return ProfileMetric::Iters;
  if (s == "time") return ProfileMetric::Time;
  throw std::invalid_argument("unknown metric '" + s + "' (expected bound, iters or time)");
}

std::string to_string(ProfileMetric m) {
  switch (m) {
    case ProfileMetric::Bound: return "bound";
    case ProfileMetric::Iters: return "iters";
    case ProfileMetric::Time: return "time";
  }
  return "?";
}

double ProfileCurve::rho_at(double tau) const {
  double rho = 0;
  for (const auto& p : points) {
    if (p.tau > tau) break;
    rho = p.rho;
  }
  return rho;
}

std::vector<ProfileCurve> performance_profile(const std::vector<std::vector<double>>& cost,
                                              const std::vector<Relaxation>& methods) {
  const std::size_t S = methods.size();
  const std::size_t P = cost.size();
  std::vector<std::vector<double>> ratio(P, std::vector<double>(S, kInf));
  std::vector<double> grid{1.0};
  for (std::size_t p = 0; p < P; ++p) {
    if (cost[p].size() != S) throw std::invalid_argument("performance_profile: ragged cost table");
    double best = kInf;
    for (double c : cost[p]) best = std::min(best, c);
    if (!std::isfinite(best)) continue;
    for (std::size_t s = 0; s < S; ++s) {
      if (!std::isfinite(cost[p][s])) continue;
      ratio[p][s] = best > 0 ? cost[p][s] / best : (cost[p][s] > 0 ? kInf : 1.0);
      if (std::isfinite(ratio[p][s])) grid.push_back(ratio[p][s]);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<ProfileCurve> curves;
  for (std::size_t s = 0; s < S; ++s) {
    ProfileCurve c;
    c.method = methods[s];
    for (double tau : grid) {
      std::size_t hit = 0;
      for (std::size_t p = 0; p < P; ++p) hit += ratio[p][s] <= tau;
      c.points.push_back({tau, P ? static_cast<double>(hit) / static_cast<double>(P) : 0.0});
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

std::vector<ProfileCurve> performance_profile(const std::vector<RunRecord>& records,
                                              ProfileMetric metric) {
  std::vector<Relaxation> methods;
  std::vector<std::string> ids;
  for (const auto& r : records) {
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) methods.push_back(r.method);
    if (std::find(ids.begin(), ids.end(), r.instance_id) == ids.end()) ids.push_back(r.instance_id);
  }
  std::map<std::pair<std::string, Relaxation>, const RunRecord*> table;
  for (const auto& r : records) {
    if (!table.emplace(std::make_pair(r.instance_id, r.method), &r).second) {
      throw std::invalid_argument("performance_profile: repeated record for " + r.instance_id + "/" +
                                  to_string(r.method));
    }
  }

  std::vector<std::vector<double>> cost(ids.size(), std::vector<double>(methods.size(), kInf));
  for (std::size_t p = 0; p < ids.size(); ++p) {
    double best = -kInf;
    for (std::size_t s = 0; s < methods.size(); ++s) {
      auto it = table.find({ids[p], methods[s]});
      if (it == table.end()) {
        throw std::invalid_argument("performance_profile: no record for " + ids[p] + "/" +
                                    to_string(methods[s]));
      }
      const RunRecord& r = *it->second;
      if (r.status != SolveStatus::Optimal) continue;
      switch (metric) {
        case ProfileMetric::Iters: cost[p][s] = r.iters; break;
        case ProfileMetric::Time: cost[p][s] = r.wall_time; break;
        case ProfileMetric::Bound: best = std::max(best, r.bound); break;
      }
    }
    if (metric != ProfileMetric::Bound || !std::isfinite(best)) continue;
    const double eps = 1e-9 * std::max(1.0, std::abs(best));
    for (std::size_t s = 0; s < methods.size(); ++s) {
      const RunRecord& r = *table.at({ids[p], methods[s]});
      if (r.status == SolveStatus::Optimal) cost[p][s] = (best - r.bound) + eps;
    }
  }
  return performance_profile(cost, methods);
}

double profile_area(const ProfileCurve& c, double tau_max) {
  if (c.points.empty()) return 0;
  if (tau_max <= 1) return c.rho_at(1);
  const double span = std::log(tau_max);
  double area = 0;
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    double lo = std::max(1.0, c.points[i].tau);
    double hi = i + 1 < c.points.size() ? std::min(tau_max, c.points[i + 1].tau) : tau_max;
    if (hi > lo) area += c.points[i].rho * (std::log(hi) - std::log(lo));
  }
  return area / span;
}

void write_csv(std::ostream& out, const std::vector<ProfileCurve>& curves, bool gnuplot) {
  out << (gnuplot ? "# method tau rho\n" : "method,tau,rho\n");
  for (const auto& c : curves) {
    for (const auto& p : c.points) write_row(out, {to_string(c.method), fmt(p.tau), fmt(p.rho)}, gnuplot);
  }
}

void write_csv(std::ostream& out, const std::vector<RunRecord>& records, bool gnuplot) {
  out << (gnuplot ? "# instance_id method status bound iters wall_time seed\n"
                  : "instance_id,method,status,bound,iters,wall_time,seed\n");
  for (const auto& r : records) {
    write_row(out,
              {r.instance_id, to_string(r.method), to_string(r.status), fmt(r.bound),
               std::to_string(r.iters), fmt(r.wall_time), std::to_string(r.seed)},
              gnuplot);
  }
}

void emit_csv(const std::vector<ProfileCurve>& curves, const std::string& path, bool gnuplot) {
  emit_to(curves, path, gnuplot);
}

void emit_csv(const std::vector<RunRecord>& records, const std::string& path, bool gnuplot) {
  emit_to(records, path, gnuplot);
}

BoundOrderReport bound_order_report(const std::vector<RunRecord>& records, double tol) {
  std::vector<std::string> ids;
  std::map<std::pair<std::string, Relaxation>, const RunRecord*> table;
  for (const auto& r : records) {
    if (std::find(ids.begin(), ids.end(), r.instance_id) == ids.end()) ids.push_back(r.instance_id);
    table[{r.instance_id, r.method}] = &r;
  }
  BoundOrderReport rep;
  for (const auto& id : ids) {
    const RunRecord* rec[3];
    const Relaxation need[3] = {Relaxation::Sdr1, Relaxation::Sdr2, Relaxation::Dnnp};
    for (int k = 0; k < 3; ++k) {
      auto it = table.find({id, need[k]});
      if (it == table.end()) {
        throw std::invalid_argument("bound_order_report: " + id + " has no " + to_string(need[k]) + " record");
      }
      rec[k] = it->second;
    }
    BoundOrderEntry e;
    e.instance_id = id;
    e.sdr1 = rec[0]->bound;
    e.sdr2 = rec[1]->bound;
    e.dnnp = rec[2]->bound;
    e.skipped = std::any_of(rec, rec + 3, [](const RunRecord* r) { return r->status != SolveStatus::Optimal; });
    if (e.skipped) {
      ++rep.skipped;
    } else {
      const double scale = 1.0 + std::abs(e.sdr2);
      e.chain_violation = e.sdr1 > e.sdr2 + tol * scale;
      double diff = std::abs(e.sdr2 - e.dnnp) / scale;
      e.equality_violation = diff > tol;
      rep.max_sdr2_dnnp_diff = std::max(rep.max_sdr2_dnnp_diff, diff);
      rep.chain_violations += e.chain_violation;
      rep.equality_violations += e.equality_violation;
    }
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace dnnrelax
