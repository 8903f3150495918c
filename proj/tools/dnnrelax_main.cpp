// dnnrelax command-line front end.
//
// Exit codes: 0 ok, 1 verification failed, 2 usage or malformed input,
// 3 unbounded or infeasible, 4 file I/O, 5 numerical failure, 6 not applicable.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dnnrelax/bench.hpp"
#include "dnnrelax/equivalence.hpp"
#include "dnnrelax/io.hpp"
#include "dnnrelax/model.hpp"
#include "dnnrelax/relax.hpp"
#include "dnnrelax/solver.hpp"

using namespace dnnrelax;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kVerifyFail = 1, kUsage = 2, kNoOptimum = 3, kIo = 4, kNumeric = 5, kNotApplicable = 6 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  double tol = 1e-8;
  int max_iters = 200;
  int verbose = 0;
  std::uint64_t seed = 1;
};

double default_tol() {
  if (const char* s = std::getenv("DNNRELAX_TOL")) {
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end != s && *end == '\0' && v > 0) return v;
    std::cerr << "warning: ignoring DNNRELAX_TOL='" << s << "'\n";
  }
  return 1e-8;
}

SolverSettings settings_from(const Common& c) {
  SolverSettings s;
  s.tol_gap = s.tol_feas = s.tol_infeas = c.tol;
  s.max_iters = c.max_iters;
  s.verbosity = c.verbose;
  s.validate();
  return s;
}

std::vector<Relaxation> parse_list(const std::string& csv) {
  std::vector<Relaxation> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      out.push_back(parse_relaxation(tok));
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  if (out.empty()) throw UsageError("empty relaxation list");
  return out;
}

Relaxation parse_one(const std::string& tag) {
  try {
    return parse_relaxation(tag);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

int status_exit(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return kOk;
    case SolveStatus::Unbounded:
    case SolveStatus::Infeasible: return kNoOptimum;
    default: return kNumeric;
  }
}

json vec_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

struct Timed {
  ConicSolution sol;
  double seconds = 0;
};

Timed timed_solve(const ConicProgram& prog, const SolverSettings& s) {
  auto t0 = std::chrono::steady_clock::now();
  Timed t{solve(prog, s), 0};
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return t;
}

double bound_of(const ConicSolution& sol, Sense sense) {
  switch (sol.status) {
    case SolveStatus::Optimal: return sol.primal_obj;
    case SolveStatus::Unbounded: return sense == Sense::Minimize ? -INFINITY : INFINITY;
    default: return NAN;
  }
}

json solve_report(const std::string& tag, const BuiltProgram& built, const Timed& t, double tol) {
  const ConicSolution& sol = t.sol;
  json out = {{"relax", tag},
              {"status", to_string(sol.status)},
              {"bound", number_or_string(bound_of(sol, built.program.sense))},
              {"iters", sol.iters},
              {"time", t.seconds}};
  if (sol.status == SolveStatus::Optimal) {
    out["residuals"] = {{"primal", sol.residuals.primal}, {"dual", sol.residuals.dual}, {"gap", sol.residuals.gap}};
    auto x = built.map.extract_vector(sol.primal);
    if (x) {
      out["x"] = vec_json(*x);
      RankOneResult r1 = rank_one_certificate({*x, built.map.extract_matrix(sol.primal)});
      json r = {{"exact", r1.exact}, {"deviation", r1.deviation}};
      if (r1.recovered) r["recovered"] = vec_json(*r1.recovered);
      out["rank_one"] = r;
    }
  }
  if (sol.status == SolveStatus::Optimal || sol.ray) {
    CertificateReport cert = certify(built.program, sol, std::max(tol * 100, 1e-6));
    json c = {{"verified", cert.ok()}, {"violations", cert.violations}};
    if (sol.ray) {
      c["ray_objective"] = cert.ray_objective;
      c["ray_equality_residual"] = cert.ray_equality_residual;
      c["ray_cone_margin"] = cert.ray_cone_margin;
    }
    out["certificate"] = c;
  }
  if (!sol.dropped_rows.empty()) out["dropped_rows"] = sol.dropped_rows;
  return out;
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

int cmd_gen(const std::string& kind, int n, int m, const Common& c, bool unplanted, bool graph,
            const std::string& out) {
  if (n < 1 || m < 0) throw UsageError("--n must be >= 1 and --m >= 0");
  if (graph) {
    MaxCutGraph g = random_graph(n, c.seed);
    if (out.empty()) {
      write_graph(std::cout, g);
    } else {
      save_graph(g, out);
      std::cout << "graph n=" << n << " seed=" << c.seed << " -> " << out << '\n';
    }
    return kOk;
  }
  GeneratorKind k;
  try {
    k = parse_generator_kind(kind);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  BqpInstance inst = generate_instance(k, n, m, c.seed, !unplanted);
  if (out.empty()) {
    print(instance_to_json(inst));
  } else {
    save_instance(inst, out);
    std::cout << inst.name << " n=" << n << " m=" << m << " seed=" << c.seed
              << (unplanted ? "" : " planted") << " -> " << out << '\n';
  }
  return kOk;
}

int cmd_solve(const std::string& path, const std::string& tag, const Common& c, bool dump) {
  BqpInstance inst = load_instance(path);
  Relaxation r = parse_one(tag);
  BuiltProgram built = build_relaxation(r, inst);
  if (dump) {
    print(program_to_json(built.program));
    return kOk;
  }
  SolverSettings s = settings_from(c);
  Timed t = timed_solve(built.program, s);
  print(solve_report(to_string(r), built, t, c.tol));
  return status_exit(t.sol.status);
}

int cmd_compare(const std::string& path, const std::string& list, const Common& c) {
  std::vector<Relaxation> rs = parse_list(list);
  BqpInstance inst = load_instance(path);
  SolverSettings s = settings_from(c);
  std::vector<RunRecord> recs;
  int code = kOk;
  std::cout << std::left << std::setw(8) << "relax" << std::setw(12) << "status" << std::right << std::setw(18)
            << "bound" << std::setw(7) << "iters" << std::setw(10) << "time" << '\n';
  for (Relaxation r : rs) {
    BuiltProgram built = build_relaxation(r, inst);
    Timed t = timed_solve(built.program, s);
    RunRecord rec{inst.name, r, t.sol.status, bound_of(t.sol, built.program.sense), t.sol.iters, t.seconds, 0};
    recs.push_back(rec);
    if (t.sol.status == SolveStatus::NumericalTrouble || t.sol.status == SolveStatus::IterationLimit) code = kNumeric;
    std::ostringstream b;
    b << std::setprecision(10) << rec.bound;
    std::cout << std::left << std::setw(8) << to_string(r) << std::setw(12) << to_string(rec.status) << std::right
              << std::setw(18) << b.str() << std::setw(7) << rec.iters << std::setw(10) << std::fixed
              << std::setprecision(3) << rec.wall_time << std::defaultfloat << '\n';
  }
  auto has = [&](Relaxation r) { return std::find(rs.begin(), rs.end(), r) != rs.end(); };
  if (has(Relaxation::Sdr1) && has(Relaxation::Sdr2) && has(Relaxation::Dnnp)) {
    BoundOrderReport rep = bound_order_report(recs);
    const auto& e = rep.entries.front();
    if (e.skipped) {
      std::cout << "bound order: not checked (a solve was not optimal)\n";
    } else {
      std::cout << "bound order: sdr1 <= sdr2 " << (e.chain_violation ? "VIOLATED" : "ok") << ", sdr2 == dnnp "
                << (e.equality_violation ? "VIOLATED" : "ok") << " (rel diff " << rep.max_sdr2_dnnp_diff << ")\n";
    }
  }
  return code;
}

int cmd_verify(const std::string& mode, const std::string& path, double tol, const Common& c) {
  SolverSettings s = settings_from(c);
  EquivalenceReport rep;
  if (mode == "thm3") {
    rep = verify_theorem3(load_instance(path), tol, s);
  } else if (mode == "thm4") {
    rep = verify_theorem4(load_graph(path), tol, s);
  } else {
    throw UsageError("verify mode must be thm3 or thm4");
  }
  print(report_to_json(rep));
  switch (rep.verdict) {
    case Verdict::Pass: return kOk;
    case Verdict::Fail: return kVerifyFail;
    case Verdict::NotApplicable: return kNotApplicable;
  }
  return kVerifyFail;
}

int cmd_oracle(const std::string& path, bool graph) {
  if (graph) {
    MaxCutGraph g = load_graph(path);
    MaxCutOracleResult r = brute_force_maxcut(g);
    print({{"opt", r.opt}, {"u", vec_json(r.arg)}});
    return kOk;
  }
  BqpOracleResult r = brute_force_bqp(load_instance(path));
  if (!r.feasible) {
    print({{"feasible", false}});
    return kNoOptimum;
  }
  print({{"feasible", true}, {"opt", r.opt}, {"x", vec_json(r.argmin)}});
  return kOk;
}

int cmd_maxcut(const std::string& path, std::string tag, const Common& c, bool oracle) {
  if (tag == "sdr" || tag == "dnnp") tag = "mc-" + tag;
  Relaxation r = parse_one(tag);
  MaxCutGraph g = load_graph(path);
  BuiltProgram built;
  if (r == Relaxation::MaxCutSdr) {
    built = build_mc_sdr(g);
  } else if (r == Relaxation::MaxCutDnnp) {
    built = build_mc_dnnp(g);
  } else {
    throw UsageError("maxcut --relax must be sdr or dnnp");
  }
  Timed t = timed_solve(built.program, settings_from(c));
  json out = solve_report(to_string(r), built, t, c.tol);
  out.erase("rank_one");
  if (oracle) out["brute_force"] = brute_force_maxcut(g).opt;
  print(out);
  return status_exit(t.sol.status);
}

int cmd_profile(const std::string& suite, int count, int n, int m, const std::string& list,
                const std::string& metric_name, const std::string& out, const std::string& records_out,
                int workers, bool gnuplot, const Common& c) {
  if (count < 1 || n < 1 || m < 0) throw UsageError("--count and --n must be >= 1, --m >= 0");
  SuiteOptions o;
  try {
    o.kind = parse_generator_kind(suite);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  ProfileMetric metric;
  try {
    metric = parse_profile_metric(metric_name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  o.count = count;
  o.n = n;
  o.m = m;
  o.methods = parse_list(list);
  o.base_seed = c.seed;
  o.settings = settings_from(c);
  o.workers = metric == ProfileMetric::Time ? 1 : workers;
  std::vector<RunRecord> recs;
  try {
    recs = run_suite(o);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  auto curves = performance_profile(recs, metric);
  if (out.empty()) {
    write_csv(std::cout, curves, gnuplot);
  } else {
    emit_csv(curves, out, gnuplot);
  }
  if (!records_out.empty()) emit_csv(recs, records_out, gnuplot);
  double tau_max = 1;
  for (const auto& cv : curves)
    if (!cv.points.empty()) tau_max = std::max(tau_max, cv.points.back().tau);
  std::ostream& summary = out.empty() ? std::cerr : std::cout;
  for (const auto& cv : curves) {
    summary << "area " << to_string(cv.method) << ' ' << std::setprecision(4) << profile_area(cv, tau_max)
            << " (rho(1) = " << cv.rho_at(1) << ")\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lower bounds for binary quadratic programs from SDP and DNN relaxations"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Common c;
  c.tol = default_tol();
  app.add_option("--tol", c.tol, "solver tolerance (default 1e-8, or $DNNRELAX_TOL)")->check(CLI::PositiveNumber);
  app.add_option("--max-iters", c.max_iters, "iteration cap")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "random seed");
  app.add_flag("-v,--verbose", c.verbose, "per-iteration log on stderr");

  std::string kind = "rdbqp", out, path, relax = "sdr1", list = "sdr1,sdr2,dnnp", mode, metric = "bound",
              records_out;
  int n = 12, m = 5, count = 20, workers = 1;
  bool unplanted = false, graph = false, dump = false, oracle = false, gnuplot = false;
  double eq_tol = kEquivalenceTol;

  auto* gen = app.add_subcommand("gen", "generate a random instance (or graph)");
  gen->add_option("--kind", kind, "rdnbqp, rdibqp, rdbqp or rdsbqp");
  gen->add_option("--n", n);
  gen->add_option("--m", m);
  gen->add_option("--out,-o", out, "output file (stdout when omitted)");
  gen->add_flag("--unplanted", unplanted, "draw b at random instead of b = A x_hat");
  gen->add_flag("--graph", graph, "write a random max-cut graph instead");

  auto* sol = app.add_subcommand("solve", "solve one relaxation, JSON report on stdout");
  sol->add_option("instance", path)->required();
  sol->add_option("--relax,-r", relax, "sdr, sdr1, sdr2 or dnnp");
  sol->add_flag("--dump-program", dump, "print the conic program instead of solving");

  auto* cmp = app.add_subcommand("compare", "solve several relaxations and tabulate bounds");
  cmp->add_option("instance", path)->required();
  cmp->add_option("--relax,-r", list, "comma-separated list");

  auto* ver = app.add_subcommand("verify", "check an equivalence theorem on one input");
  ver->add_option("mode", mode, "thm3 (instance file) or thm4 (graph file)")->required();
  ver->add_option("input", path)->required();
  ver->add_option("--eq-tol", eq_tol, "equivalence tolerance (relative)")->check(CLI::PositiveNumber);

  auto* orc = app.add_subcommand("oracle", "brute-force optimum");
  orc->add_option("input", path)->required();
  orc->add_flag("--graph", graph, "input is a graph file; report the maximum cut");

  auto* mc = app.add_subcommand("maxcut", "solve a max-cut relaxation");
  mc->add_option("graph", path)->required();
  mc->add_option("--relax,-r", relax, "sdr or dnnp")->default_str("sdr");
  mc->add_flag("--oracle", oracle, "also report the brute-force maximum cut");

  auto* prof = app.add_subcommand("profile", "run a suite and write performance profiles");
  prof->add_option("--suite", kind, "generator family");
  prof->add_option("--count", count);
  prof->add_option("--n", n);
  prof->add_option("--m", m);
  prof->add_option("--relax,-r", list, "comma-separated methods");
  prof->add_option("--metric", metric, "bound, iters or time");
  prof->add_option("--out,-o", out, "curve CSV (stdout when omitted)");
  prof->add_option("--records", records_out, "also write the run records");
  prof->add_option("--workers", workers, "concurrent solves (forced to 1 for --metric time)")
      ->check(CLI::PositiveNumber);
  prof->add_flag("--gnuplot", gnuplot, "space-separated columns with a commented header");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return cmd_gen(kind, n, m, c, unplanted, graph, out);
    if (*sol) return cmd_solve(path, relax, c, dump);
    if (*cmp) return cmd_compare(path, list, c);
    if (*ver) return cmd_verify(mode, path, eq_tol, c);
    if (*orc) return cmd_oracle(path, graph);
    if (*mc) return cmd_maxcut(path, mc->count("--relax") ? relax : "sdr", c, oracle);
    if (*prof) return cmd_profile(kind, count, n, m, list, metric, out, records_out, workers, gnuplot, c);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::length_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
  return kUsage;
}
