#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "farfield/asymptotics.hpp"
#include "farfield/errors.hpp"
#include "farfield/extraction.hpp"
#include "farfield/fd_solver.hpp"
#include "farfield/fundamental_solutions.hpp"
#include "farfield/harness.hpp"
#include "farfield/serialization.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace farfield;

namespace {

py::object loads(const std::string& text) { return py::module_::import("json").attr("loads")(text); }

py::dict report_dict(const SolveReport& r) {
  return py::dict("iterations"_a = r.iterations, "residual"_a = r.residual, "policy_switches"_a = r.policy_switches,
                  "wall_ms"_a = r.wall_ms);
}

Eigen::MatrixXd grid_points(const GridFunction& u) {
  if (u.is_radial()) {
    const RadialGrid& g = u.radial_grid();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(g.nodes(), u.dim());
    for (int i = 0; i < g.nodes(); ++i) p(i, 0) = g.radius(i);
    return p;
  }
  const PolarGrid& g = u.polar_grid();
  Eigen::MatrixXd p(g.node_count(), 2);
  for (int k = 0; k < g.node_count(); ++k) p.row(k) = g.point(k).transpose();
  return p;
}

Polynomial affine(const Eigen::VectorXd& gradient, double constant) { return Polynomial::affine(gradient, constant); }

ExtractionOptions extraction_options(const std::vector<double>& schedule, double tolerance) {
  ExtractionOptions o;
  if (!schedule.empty()) o.schedule = schedule;
  o.tolerance = tolerance;
  return o;
}

}  // namespace

PYBIND11_MODULE(_farfield, m) {
  m.doc() = "Far-field asymptotics of fully nonlinear uniformly elliptic equations";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<InvalidConfiguration>(m, "InvalidConfiguration", PyExc_ValueError);
  py::register_exception<NonConvergence>(m, "NonConvergence", PyExc_RuntimeError);
  py::register_exception<MissingBaseline>(m, "MissingBaseline", PyExc_FileNotFoundError);
  py::register_exception<ExtractionError>(m, "ExtractionError", PyExc_RuntimeError);

  py::class_<Ellipticity>(m, "Ellipticity")
      .def(py::init<double, double, int>(), "lower"_a, "upper"_a, "dim"_a)
      .def_property_readonly("lower", &Ellipticity::lower)
      .def_property_readonly("upper", &Ellipticity::upper)
      .def_property_readonly("dim", &Ellipticity::dim)
      .def("__repr__", [](const Ellipticity& e) {
        return "Ellipticity(" + std::to_string(e.lower()) + ", " + std::to_string(e.upper()) + ", " + std::to_string(e.dim()) + ")";
      });

  py::class_<OperatorSpec>(m, "Operator")
      .def_static("pucci_plus", &OperatorSpec::pucci_plus, "e"_a)
      .def_static("pucci_minus", &OperatorSpec::pucci_minus, "e"_a)
      .def_static("laplace", &OperatorSpec::laplace, "n"_a)
      .def_static(
          "bellman",
          [](const Ellipticity& e, const std::vector<Eigen::MatrixXd>& controls, bool rotation_closed) {
            std::vector<SymMatrix> c;
            for (const auto& a : controls) c.emplace_back(a);
            return OperatorSpec::bellman(e, c, rotation_closed ? ControlSet::RotationClosed : ControlSet::Fixed);
          },
          "e"_a, "controls"_a, "rotation_closed"_a = false)
      .def_static("with_rhs", &OperatorSpec::with_rhs, "base"_a, "rhs"_a)
      .def_static("from_json", [](const std::string& s) { return operator_from_json(s); })
      .def("to_json", [](const OperatorSpec& f) { return to_json(f); })
      .def("dual", &OperatorSpec::dual)
      .def("__call__", [](const OperatorSpec& f, const Eigen::MatrixXd& m) { return f.evaluate(SymMatrix(m)); }, "m"_a)
      .def_property_readonly("dim", &OperatorSpec::dim)
      .def_property_readonly("ellipticity", &OperatorSpec::ellipticity)
      .def_property_readonly("rotation_invariant", &OperatorSpec::is_rotation_invariant)
      .def_property_readonly("positively_homogeneous", &OperatorSpec::is_positively_homogeneous)
      .def("check_ellipticity", [](const OperatorSpec& f, int trials, std::uint64_t seed) {
        const SandwichReport r = check_uniform_ellipticity(f, trials, seed);
        return py::dict("pass"_a = r.pass, "worst_violation"_a = r.worst_violation, "trials"_a = r.trials);
      }, "trials"_a = 1000, "seed"_a = 0)
      .def("check_homogeneity", [](const OperatorSpec& f, int trials, std::uint64_t seed) {
        const HomogeneityReport r = check_homogeneity(f, trials, seed);
        return py::dict("pass"_a = r.pass, "worst_relative_error"_a = r.worst_relative_error, "trials"_a = r.trials);
      }, "trials"_a = 1000, "seed"_a = 0)
      .def("__repr__", [](const OperatorSpec& f) { return "Operator(" + to_json(f) + ")"; });

  m.def("scaling_exponents", [](const Ellipticity& e) {
    const ScalingExponents s = scaling_exponents(e);
    return py::make_tuple(s.alpha_plus, s.alpha_minus);
  }, "e"_a, "(alpha_plus, alpha_minus) of the Pucci class");
  m.def("decay_case", [](const Ellipticity& e) { return to_string(decay_case(e)); }, "e"_a);
  m.def("rotation_invariant_exponent", &rotation_invariant_exponent, "f"_a);
  m.def("estimate_scaling_exponent", [](const OperatorSpec& f) {
    const ExponentEstimate est = estimate_scaling_exponent(f);
    return py::dict("alpha_hat"_a = est.alpha_hat, "half_width"_a = est.half_width, "fit_r2"_a = est.fit_r2,
                    "logarithmic"_a = est.logarithmic, "flagged"_a = est.flagged);
  }, "f"_a);

  py::class_<FundamentalSolution>(m, "FundamentalSolution")
      .def(py::init([](const std::string& side, const std::string& orientation, const Ellipticity& e) {
             if (side != "plus" && side != "minus") throw InvalidInput("side must be 'plus' or 'minus'");
             if (orientation != "upward" && orientation != "downward") {
               throw InvalidInput("orientation must be 'upward' or 'downward'");
             }
             return FundamentalSolution(side == "plus" ? PucciSide::Plus : PucciSide::Minus,
                                        orientation == "upward" ? Orientation::Upward : Orientation::Downward, e);
           }),
           "side"_a, "orientation"_a, "e"_a)
      .def("__call__", [](const FundamentalSolution& fs, const py::array_t<double>& r) {
        return py::vectorize([&fs](double x) { return fs.eval(x); })(r);
      }, "r"_a)
      .def("derivative", [](const FundamentalSolution& fs, const py::array_t<double>& r) {
        return py::vectorize([&fs](double x) { return fs.derivative(x); })(r);
      }, "r"_a)
      .def("solved_operator", &FundamentalSolution::solved_operator);

  py::class_<GridFunction>(m, "GridFunction")
      .def_static(
          "radial",
          [](double r_in, double r_out, int nodes, int dim, const std::function<double(double)>& f) {
            return GridFunction::sample(RadialGrid(r_in, r_out, nodes), dim, f);
          },
          "r_in"_a, "r_out"_a, "nodes"_a, "dim"_a, "f"_a, "Samples f(r) on a uniform radial grid")
      .def_static(
          "polar",
          [](double r_in, double r_out, int radial_nodes, int angular_nodes, const std::function<double(double, double)>& f) {
            return GridFunction::sample(PolarGrid(r_in, r_out, radial_nodes, angular_nodes),
                                        [&](const Eigen::Vector2d& x) { return f(x(0), x(1)); });
          },
          "r_in"_a, "r_out"_a, "radial_nodes"_a, "angular_nodes"_a, "f"_a, "Samples f(x, y) on a polar grid")
      .def_property_readonly("values", [](const GridFunction& u) { return u.values(); })
      .def_property_readonly("points", &grid_points, "Node coordinates (radial grids report points on the first axis)")
      .def_property_readonly("dim", &GridFunction::dim)
      .def_property_readonly("is_radial", &GridFunction::is_radial)
      .def("__call__", [](const GridFunction& u, const Eigen::VectorXd& x) { return u.value_at(x); }, "x"_a)
      .def("to_csv", &GridFunction::to_csv);

  m.def(
      "solve_radial",
      [](const OperatorSpec& f, double r_in, double r_out, int nodes, double inner, double outer, double rhs) {
        const RadialGrid g(r_in, r_out, nodes);
        DirichletProblem p{f, g, rhs, {}, std::vector<double>(nodes, 0.0)};
        p.boundary_values.front() = inner;
        p.boundary_values.back() = outer;
        const Solution s = solve_radial(p);
        return py::make_tuple(s.u, report_dict(s.report));
      },
      "f"_a, "r_in"_a, "r_out"_a, "nodes"_a, "inner"_a, "outer"_a, "rhs"_a = 0.0,
      "Radial Dirichlet problem F(D^2 u) = rhs; inner is ignored when r_in = 0");
  m.def(
      "solve_polar",
      [](const OperatorSpec& f, double r_in, double r_out, int radial_nodes, int angular_nodes,
         const std::function<double(double, double)>& boundary, double rhs, int frames) {
        DirichletProblem p{f, PolarGrid(r_in, r_out, radial_nodes, angular_nodes), rhs,
                           [&](const Eigen::VectorXd& x) { return boundary(x(0), x(1)); }, {}};
        SolveOptions o;
        o.frames = frames;
        const Solution s = solve_polar(p, o);
        return py::make_tuple(s.u, report_dict(s.report));
      },
      "f"_a, "r_in"_a, "r_out"_a, "radial_nodes"_a, "angular_nodes"_a, "boundary"_a, "rhs"_a = 0.0, "frames"_a = 8,
      "Planar Dirichlet problem on an annulus or disc with boundary(x, y) data");

  m.def(
      "extract_linear_profile",
      [](const GridFunction& u, const OperatorSpec& f, const std::vector<double>& schedule, double tolerance) {
        const LinearExtraction ex = extract_linear_profile(u, f, extraction_options(schedule, tolerance));
        return py::dict("gradient"_a = ex.profile.gradient, "constant"_a = ex.profile.constant,
                        "trace"_a = loads(ex.trace.to_json()));
      },
      "u"_a, "f"_a, "schedule"_a = std::vector<double>{}, "tolerance"_a = 1e-3);
  m.def(
      "extract_quadratic_profile",
      [](const GridFunction& u, const OperatorSpec& f, double rhs, const std::vector<double>& schedule, double tolerance) {
        const QuadraticExtraction ex = extract_quadratic_profile(u, f, rhs, extraction_options(schedule, tolerance));
        return py::dict("hessian"_a = ex.profile.hessian, "gradient"_a = ex.profile.gradient,
                        "constant"_a = ex.profile.constant, "operator_value"_a = ex.profile.operator_value,
                        "trace"_a = loads(ex.trace.to_json()));
      },
      "u"_a, "f"_a, "rhs"_a, "schedule"_a = std::vector<double>{}, "tolerance"_a = 1e-3);

  m.def(
      "classify_tail",
      [](const GridFunction& u, const OperatorSpec& f, const Eigen::VectorXd& gradient, double constant) {
        const TailClass tc = classify_tail(u, affine(gradient, constant), upward_tail(f), upward_tail(f.dual()));
        return loads(tc.to_json());
      },
      "u"_a, "f"_a, "gradient"_a, "constant"_a, "Tail alternative of u - P against the fundamental pair of f");
  m.def(
      "estimate_limit_at_infinity",
      [](const GridFunction& u, const Eigen::VectorXd& gradient, double constant) {
        return loads(estimate_limit_at_infinity(u, affine(gradient, constant)).to_json());
      },
      "u"_a, "gradient"_a, "constant"_a);
  m.def(
      "fit_decay",
      [](const std::vector<double>& r, const std::vector<double>& deviation, double noise_scale) {
        if (r.size() != deviation.size()) throw InvalidInput("fit_decay: r and deviation differ in length");
        std::vector<DecaySample> s;
        for (std::size_t i = 0; i < r.size(); ++i) s.push_back({r[i], deviation[i]});
        return loads(fit_decay(s, noise_scale).to_json());
      },
      "r"_a, "deviation"_a, "noise_scale"_a = 1.0);
  m.def(
      "verify_decay_bounds",
      [](const GridFunction& u, const OperatorSpec& f, const Eigen::VectorXd& gradient, double constant) {
        return loads(verify_decay_bounds(u, affine(gradient, constant), f.ellipticity()).to_json());
      },
      "u"_a, "f"_a, "gradient"_a, "constant"_a);

  m.def("list_scenarios", [] {
    py::list out;
    for (const auto& s : scenario_catalog()) {
      out.append(py::dict("name"_a = s.name, "case"_a = s.theorem_case, "estimate"_a = s.estimate));
    }
    return out;
  });
  m.def("config_hash", [](const std::string& config_json) { return config_hash(parse_config(config_json)); }, "config_json"_a);
  m.def(
      "run",
      [](const std::string& config_json, const std::filesystem::path& out) {
        const ExperimentConfig c = parse_config(config_json);
        const ResultBundle b = [&] {
          py::gil_scoped_release release;
          return run(c, out);
        }();
        return loads(b.to_json());
      },
      "config_json"_a, "out"_a, "Runs one scenario and writes its bundle into out");
  m.def(
      "verify",
      [](const std::filesystem::path& out, const std::filesystem::path& golden) {
        py::list diffs;
        for (const auto& d : verify(out, golden).entries) {
          diffs.append(py::dict("file"_a = d.file, "field"_a = d.field, "expected"_a = d.expected, "actual"_a = d.actual));
        }
        return diffs;
      },
      "out"_a, "golden"_a);
}
