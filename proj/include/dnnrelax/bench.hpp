#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dnnrelax/model.hpp"
#include "dnnrelax/relax.hpp"
#include "dnnrelax/solver.hpp"

namespace dnnrelax {

struct RunRecord {
  std::string instance_id;
  Relaxation method = Relaxation::Sdr1;
  SolveStatus status = SolveStatus::NumericalTrouble;
  double bound = 0;  // model-space value with offset; -inf when Unbounded, NaN on other failures
  int iters = 0;
  double wall_time = 0;  // seconds spent inside solve()
  std::uint64_t seed = 0;
};

struct SuiteOptions {
  GeneratorKind kind = GeneratorKind::RdBQP;
  int count = 20;
  int n = 12;
  int m = 5;
  std::vector<Relaxation> methods{Relaxation::Sdr1, Relaxation::Sdr2, Relaxation::Dnnp};
  std::uint64_t base_seed = 1;
  bool planted = true;
  int workers = 1;  // > 1 solves (instance, method) pairs concurrently
  SolverSettings settings;
};

/// Instance i uses seed base_seed + i. Records come back ordered by instance,
/// then by the order of `methods`, whatever the worker count. Throws
/// std::invalid_argument for count < 1 or a method outside sdr/sdr1/sdr2/dnnp.
std::vector<RunRecord> run_suite(const SuiteOptions& opts);

std::vector<RunRecord> run_suite(GeneratorKind kind, int count, int n, int m,
                                 const std::vector<Relaxation>& methods, std::uint64_t base_seed);

enum class ProfileMetric { Bound, Iters, Time };
ProfileMetric parse_profile_metric(const std::string& s);
std::string to_string(ProfileMetric m);

struct ProfilePoint {
  double tau = 1;
  double rho = 0;
};

/// Step function: rho(tau) is the rho of the last point with point.tau <= tau.
/// All curves of one profile share the same tau grid.
struct ProfileCurve {
  Relaxation method = Relaxation::Sdr1;
  std::vector<ProfilePoint> points;

  double rho_at(double tau) const;
};

/// Dolan-More profile over the methods present in `records`. Costs: the value
/// itself for iters and time; for bound (larger is better),
/// (best - bound) + 1e-9 max(1, |best|). Any non-Optimal record costs +inf.
/// Throws std::invalid_argument when an (instance, method) pair is missing or
/// repeated.
std::vector<ProfileCurve> performance_profile(const std::vector<RunRecord>& records,
                                              ProfileMetric metric);

/// Same, starting from a cost table cost[problem][method].
std::vector<ProfileCurve> performance_profile(const std::vector<std::vector<double>>& cost,
                                              const std::vector<Relaxation>& methods);

/// Mean of rho over log(tau) on [1, tau_max]; rho(1) when tau_max <= 1.
double profile_area(const ProfileCurve& c, double tau_max);

/// Header "method,tau,rho". With `gnuplot` the header is commented with '#'
/// and the columns are space separated.
void write_csv(std::ostream& out, const std::vector<ProfileCurve>& curves, bool gnuplot = false);
/// Header "instance_id,method,status,bound,iters,wall_time,seed".
void write_csv(std::ostream& out, const std::vector<RunRecord>& records, bool gnuplot = false);

/// Throws std::runtime_error when the file cannot be written.
void emit_csv(const std::vector<ProfileCurve>& curves, const std::string& path, bool gnuplot = false);
void emit_csv(const std::vector<RunRecord>& records, const std::string& path, bool gnuplot = false);

struct BoundOrderEntry {
  std::string instance_id;
  double sdr1 = 0;
  double sdr2 = 0;
  double dnnp = 0;
  bool chain_violation = false;  // sdr1 > sdr2 + tol (1 + |sdr2|)
  bool equality_violation = false;  // |sdr2 - dnnp| > tol (1 + |sdr2|)
  bool skipped = false;  // some of the three solves not Optimal
};

struct BoundOrderReport {
  std::vector<BoundOrderEntry> entries;
  int chain_violations = 0;
  int equality_violations = 0;
  int skipped = 0;
  double max_sdr2_dnnp_diff = 0;  // relative, over compared instances
};

/// Throws std::invalid_argument when an instance lacks sdr1, sdr2 or dnnp.
BoundOrderReport bound_order_report(const std::vector<RunRecord>& records, double tol = 1e-5);

}  // namespace dnnrelax
