#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dnnrelax/bench.hpp"
#include "dnnrelax/equivalence.hpp"
#include "dnnrelax/io.hpp"
#include "dnnrelax/relax.hpp"
#include "dnnrelax/solver.hpp"

namespace py = pybind11;
using namespace dnnrelax;

namespace {

BqpInstance make_instance(const MatrixXd& Q, const VectorXd& c, const MatrixXd& A, const VectorXd& b,
                          const std::string& name) {
  BqpInstance inst;
  inst.name = name;
  inst.Q = SymMatrix::checked(Q);
  inst.c = c;
  inst.A = A.size() == 0 ? MatrixXd(0, Q.rows()) : A;
  inst.b = b;
  inst.validate();
  return inst;
}

py::dict solution_dict(const BuiltProgram& built, const ConicSolution& s) {
  py::dict d;
  d["status"] = to_string(s.status);
  d["bound"] = s.primal_obj;
  d["dual_bound"] = s.dual_obj;
  d["iters"] = s.iters;
  d["residuals"] = py::dict(py::arg("primal") = s.residuals.primal, py::arg("dual") = s.residuals.dual,
                            py::arg("gap") = s.residuals.gap);
  if (s.status == SolveStatus::Optimal || s.status == SolveStatus::IterationLimit) {
    auto v = built.map.extract_vector(s.primal);
    d["vector"] = v ? py::cast(*v) : py::none();
    d["matrix"] = built.map.extract_matrix(s.primal).mat();
  }
  CertificateReport c = certify(built.program, s, 1e-6);
  d["certified"] = c.ok();
  d["violations"] = c.violations;
  return d;
}

SolverSettings settings_from(double tol, int max_iters) {
  SolverSettings st;
  st.tol_gap = st.tol_feas = st.tol_infeas = tol;
  st.max_iters = max_iters;
  return st;
}

py::dict equivalence_dict(const EquivalenceReport& r) {
  py::dict d;
  d["relax_a"] = r.relax_a;
  d["relax_b"] = r.relax_b;
  d["status_a"] = to_string(r.status_a);
  d["status_b"] = to_string(r.status_b);
  d["opt_a"] = r.opt_a;
  d["opt_b"] = r.opt_b;
  d["verdict"] = to_string(r.verdict);
  d["max_violation"] = r.max_violation;
  py::list v;
  for (const auto& x : r.violations) v.append(py::make_tuple(x.constraint, x.amount));
  d["violations"] = v;
  d["warnings"] = r.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lower bounds for binary quadratic programs from SDP and DNN relaxations";

  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<FileError>(m, "FileError", PyExc_OSError);

  py::class_<BqpInstance>(m, "BqpInstance")
      .def(py::init(&make_instance), py::arg("Q"), py::arg("c"), py::arg("A"), py::arg("b"),
           py::arg("name") = "")
      .def_readonly("name", &BqpInstance::name)
      .def_property_readonly("Q", [](const BqpInstance& i) { return i.Q.mat(); })
      .def_readonly("c", &BqpInstance::c)
      .def_readonly("A", &BqpInstance::A)
      .def_readonly("b", &BqpInstance::b)
      .def_property_readonly("n", &BqpInstance::n)
      .def_property_readonly("m", &BqpInstance::m)
      .def("objective", [](const BqpInstance& i, const VectorXd& x) { return bqp_objective(i, x); });

  py::class_<MaxCutGraph>(m, "MaxCutGraph")
      .def(py::init<int>())
      .def(py::init([](const MatrixXd& W) { return MaxCutGraph(SymMatrix::checked(W)); }))
      .def_property_readonly("n", &MaxCutGraph::n)
      .def_property_readonly("weights", [](const MaxCutGraph& g) { return g.weights().mat(); })
      .def("add_edge", &MaxCutGraph::add_edge)
      .def("cut_value", [](const MaxCutGraph& g, const VectorXd& u) { return cut_value(g, u); });

  m.def("generate_instance",
        [](const std::string& kind, int n, int m_rows, std::uint64_t seed, bool planted) {
          return generate_instance(parse_generator_kind(kind), n, m_rows, seed, planted);
        },
        py::arg("kind"), py::arg("n"), py::arg("m"), py::arg("seed"), py::arg("planted") = true);
  m.def("random_graph", &random_graph, py::arg("n"), py::arg("seed"), py::arg("lo") = 0.0, py::arg("hi") = 1.0);
  m.def("load_instance", &load_instance);
  m.def("load_graph", &load_graph);

  m.def("brute_force_bqp", [](const BqpInstance& inst) {
    BqpOracleResult r = brute_force_bqp(inst);
    return py::make_tuple(r.feasible ? r.opt : std::numeric_limits<double>::infinity(),
                          r.feasible ? py::cast(r.argmin) : py::none());
  });
  m.def("brute_force_maxcut", [](const MaxCutGraph& g) {
    MaxCutOracleResult r = brute_force_maxcut(g);
    return py::make_tuple(r.opt, r.arg);
  });

  m.def("solve_relaxation",
        [](const std::string& tag, const BqpInstance& inst, double tol, int max_iters) {
          BuiltProgram b = build_relaxation(parse_relaxation(tag), inst);
          ConicSolution s;
          {
            py::gil_scoped_release release;
            s = solve(b.program, settings_from(tol, max_iters));
          }
          return solution_dict(b, s);
        },
        py::arg("relax"), py::arg("instance"), py::arg("tol") = 1e-8, py::arg("max_iters") = 200);
  m.def("solve_maxcut",
        [](const std::string& tag, const MaxCutGraph& g, double tol, int max_iters) {
          Relaxation r = parse_relaxation(tag == "sdr" || tag == "dnnp" ? "mc-" + tag : tag);
          if (r != Relaxation::MaxCutSdr && r != Relaxation::MaxCutDnnp) {
            throw std::invalid_argument("max-cut relaxation must be sdr or dnnp");
          }
          BuiltProgram b = r == Relaxation::MaxCutSdr ? build_mc_sdr(g) : build_mc_dnnp(g);
          ConicSolution s;
          {
            py::gil_scoped_release release;
            s = solve(b.program, settings_from(tol, max_iters));
          }
          return solution_dict(b, s);
        },
        py::arg("relax"), py::arg("graph"), py::arg("tol") = 1e-8, py::arg("max_iters") = 200);

  m.def("verify_theorem3",
        [](const BqpInstance& inst, double tol) { return equivalence_dict(verify_theorem3(inst, tol)); },
        py::arg("instance"), py::arg("tol") = 1e-6);
  m.def("verify_theorem4",
        [](const MaxCutGraph& g, double tol) { return equivalence_dict(verify_theorem4(g, tol)); },
        py::arg("graph"), py::arg("tol") = 1e-6);

  m.def("rank_one_certificate", [](const VectorXd& x, const MatrixXd& X, double tol) {
    RankOneResult r = rank_one_certificate(PointXX{x, SymMatrix::checked(X)}, tol);
    return py::make_tuple(r.exact, r.deviation, r.recovered ? py::cast(*r.recovered) : py::none());
  }, py::arg("x"), py::arg("X"), py::arg("tol") = 1e-6);

  m.def("performance_profile",
        [](const std::vector<std::vector<double>>& cost, const std::vector<std::string>& methods) {
          std::vector<Relaxation> rs;
          for (const auto& t : methods) rs.push_back(parse_relaxation(t));
          py::dict out;
          for (const ProfileCurve& c : performance_profile(cost, rs)) {
            std::vector<double> tau, rho;
            for (const auto& p : c.points) {
              tau.push_back(p.tau);
              rho.push_back(p.rho);
            }
            out[py::str(to_string(c.method))] = py::make_tuple(tau, rho);
          }
          return out;
        },
        py::arg("cost"), py::arg("methods"));
}
