#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "helmdual/asymptotic.hpp"
#include "helmdual/config.hpp"
#include "helmdual/error.hpp"
#include "helmdual/experiment.hpp"
#include "helmdual/farfield.hpp"
#include "helmdual/field_io.hpp"
#include "helmdual/selftest.hpp"

namespace py = pybind11;
using namespace helmdual;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Field to_field(const GridSpec& g, const Array& a) {
  const auto n = static_cast<py::ssize_t>(g.points_per_axis);
  bool shaped = a.ndim() == g.dimension;
  for (py::ssize_t d = 0; shaped && d < a.ndim(); ++d) shaped = a.shape(d) == n;
  if (!shaped && !(a.ndim() == 1 && static_cast<std::size_t>(a.size()) == g.size()))
    throw Error(ErrorKind::GridMismatch, "array shape does not match the grid");
  return Field(g, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const Field& f) {
  const GridSpec& g = f.grid();
  std::vector<py::ssize_t> shape(g.dimension, g.points_per_axis);
  Array out(shape);
  std::copy(f.data().begin(), f.data().end(), out.mutable_data());
  return out;
}

DescentConfig descent_from(const py::kwargs& kw) {
  DescentConfig c;
  for (auto item : kw) {
    const auto key = item.first.cast<std::string>();
    const py::handle v = item.second;
    if (key == "tol_residual") c.tol_residual = v.cast<double>();
    else if (key == "max_iters") c.max_iters = v.cast<int>();
    else if (key == "armijo_c") c.armijo_c = v.cast<double>();
    else if (key == "armijo_shrink") c.armijo_shrink = v.cast<double>();
    else if (key == "step_init") c.step_init = v.cast<double>();
    else if (key == "dedup_rel_threshold") c.dedup_rel_threshold = v.cast<double>();
    else if (key == "multistart_count") c.multistart_count = v.cast<int>();
    else if (key == "seed") c.rng_seed = v.cast<std::uint64_t>();
    else if (key == "divergence_floor") c.divergence_floor = v.cast<double>();
    else if (key == "newton_switch") c.newton_switch = v.cast<double>();
    else if (key == "lanczos_steps") c.lanczos_steps = v.cast<int>();
    else throw Error(ErrorKind::UnknownKey, "descent option '" + key + "'");
  }
  c.validate();
  return c;
}

py::dict record_dict(const SolutionRecord& r) {
  py::dict d;
  d["v"] = to_array(r.v_star);
  d["u"] = to_array(r.u_star);
  d["level"] = r.level;
  d["dual_residual"] = r.dual_residual;
  d["primal_residual"] = r.primal_residual;
  d["iterations"] = r.iterations;
  d["orbit_shift"] = py::make_tuple(r.orbit_shift[0], r.orbit_shift[1], r.orbit_shift[2]);
  d["sign"] = r.sign;
  return d;
}

const char* status_name(DescentStatus s) {
  switch (s) {
    case DescentStatus::Converged: return "converged";
    case DescentStatus::Diverged: return "diverged";
    case DescentStatus::MaxIters: return "max_iters";
  }
  return "";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dual-variational solver for -Δu - u = Q|u|^{p-2}u on a periodic box";

  static py::exception<Error> error_type(m, "HelmdualError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init([](int N, double L, int n, double epsilon) {
             GridSpec g{N, L, n, epsilon};
             g.validate();
             return g;
           }),
           py::arg("N"), py::arg("L"), py::arg("n"), py::arg("epsilon") = 0.0)
      .def_readonly("N", &GridSpec::dimension)
      .def_readonly("L", &GridSpec::box_length)
      .def_readonly("n", &GridSpec::points_per_axis)
      .def_readonly("epsilon", &GridSpec::shell_epsilon)
      .def_property_readonly("spacing", &GridSpec::spacing)
      .def_property_readonly("shape", [](const GridSpec& g) { return std::vector<int>(g.dimension, g.points_per_axis); })
      .def("coordinates", [](const GridSpec& g) {
        std::vector<py::ssize_t> shape(g.dimension, g.points_per_axis);
        shape.push_back(g.dimension);
        py::array_t<double> out(shape);
        double* p = out.mutable_data();
        for (std::size_t i = 0; i < g.size(); ++i) {
          const Point3 x = coordinates(g, i);
          for (int d = 0; d < g.dimension; ++d) *p++ = x[d];
        }
        return out;
      })
      .def("__repr__", [](const GridSpec& g) {
        std::ostringstream o;
        o << "GridSpec(N=" << g.dimension << ", L=" << g.box_length << ", n=" << g.points_per_axis
          << ", epsilon=" << g.shell_epsilon << ")";
        return o.str();
      });

  m.def("shell_gap", &shell_gap, py::arg("grid"));
  m.def("resolvent_apply", [](const GridSpec& g, const Array& f) { return to_array(Resolvent(g).apply(to_field(g, f))); },
        py::arg("grid"), py::arg("f"));
  m.def("fundamental_solution_psi", &fundamental_solution_psi, py::arg("r"), py::arg("N"));

  py::class_<FunctionalContext>(m, "Context")
      .def(py::init([](const GridSpec& g, double p, const Array& Q, bool periodic) {
             return FunctionalContext(g, p, Coefficient::make(to_field(g, Q), p, periodic));
           }),
           py::arg("grid"), py::arg("p"), py::arg("Q"), py::arg("periodic") = false)
      .def_static("from_config", [](const std::string& text, const std::string& mode) {
            const RunConfig cfg = parse_config(text, mode);
            return FunctionalContext(cfg.grid, cfg.p, build_coefficient(cfg));
          },
          py::arg("text") = std::string(), py::arg("mode") = std::string("solve"))
      .def_property_readonly("grid", &FunctionalContext::grid)
      .def_property_readonly("p", [](const FunctionalContext& c) { return c.exponents().p; })
      .def_property_readonly("p_conj", [](const FunctionalContext& c) { return c.exponents().p_conj; })
      .def_property_readonly("Q", [](const FunctionalContext& c) { return to_array(c.coefficient().Q); })
      .def("apply_K", [](const FunctionalContext& c, const Array& v) { return to_array(apply_K(c, to_field(c.grid(), v))); })
      .def("energy", [](const FunctionalContext& c, const Array& v) { return energy(c, to_field(c.grid(), v)); })
      .def("gradient", [](const FunctionalContext& c, const Array& v) { return to_array(gradient(c, to_field(c.grid(), v))); })
      .def("quadratic_form", [](const FunctionalContext& c, const Array& v) { return quadratic_form(c, to_field(c.grid(), v)); })
      .def("fibering_scale", [](const FunctionalContext& c, const Array& v) { return fibering_scale(c, to_field(c.grid(), v)); })
      .def("nehari_energy", [](const FunctionalContext& c, const Array& v) { return nehari_energy(c, to_field(c.grid(), v)); })
      .def("dual_to_primal", [](const FunctionalContext& c, const Array& v) { return to_array(dual_to_primal(c, to_field(c.grid(), v))); })
      .def("primal_residual", [](const FunctionalContext& c, const Array& u) { return primal_residual(c, to_field(c.grid(), u)); })
      .def("dual_residual", [](const FunctionalContext& c, const Array& v) { return dual_residual(c, to_field(c.grid(), v)); })
      .def("random_initial_field", [](const FunctionalContext& c, std::uint64_t seed) { return to_array(random_initial_field(c, seed)); },
           py::arg("seed"))
      .def("orbit_distance", [](const FunctionalContext& c, const Array& v, const Array& w) {
        return orbit_distance(c, to_field(c.grid(), v), to_field(c.grid(), w));
      });

  m.def("find_critical_point",
        [](const FunctionalContext& c, const Array& v0, const py::kwargs& kw) {
          const DescentOutcome out = descend(c, to_field(c.grid(), v0), descent_from(kw));
          py::dict d = record_dict(out.record);
          d["status"] = status_name(out.status);
          d["energies"] = out.energies;
          return d;
        },
        py::arg("ctx"), py::arg("v0"));
  m.def("multistart_search",
        [](const FunctionalContext& c, const py::kwargs& kw) {
          const MultistartResult res = multistart_search(c, descent_from(kw));
          py::dict d;
          d["level"] = res.level;
          py::list recs;
          for (const auto& r : res.records) recs.append(record_dict(r));
          d["records"] = recs;
          py::list starts;
          for (const auto& s : res.starts)
            starts.append(py::dict(py::arg("seed") = s.seed, py::arg("status") = status_name(s.status),
                                   py::arg("iterations") = s.iterations, py::arg("level") = s.level,
                                   py::arg("dual_residual") = s.dual_residual));
          d["starts"] = starts;
          return d;
        },
        py::arg("ctx"));

  m.def("farfield_amplitude",
        [](const FunctionalContext& c, const Array& u, int n_theta, int n_phi, const std::array<double, 3>& origin) {
          const SphereSamples s =
              farfield_amplitude(c, to_field(c.grid(), u), sphere_grid(c.grid().dimension, n_theta, n_phi, origin));
          py::array_t<double> dirs({static_cast<py::ssize_t>(s.directions.size()), static_cast<py::ssize_t>(3)});
          double* p = dirs.mutable_data();
          for (const Point3& x : s.directions)
            for (double v : x) *p++ = v;
          return py::make_tuple(dirs, py::array(py::cast(s.values)));
        },
        py::arg("ctx"), py::arg("u"), py::arg("n_theta") = 16, py::arg("n_phi") = 32,
        py::arg("origin") = std::array<double, 3>{0.0, 0.0, 0.0});

  m.def("default_config", [](const std::string& mode) { return serialize_config(default_config(mode)); }, py::arg("mode"));
  m.def("normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); }, py::arg("text"),
        "Parses and validates a config, returning it with every default filled in.");
  m.def("run_experiment",
        [](const std::string& text, const std::string& out) {
          RunConfig cfg = parse_config(text);
          cfg.output = out;
          std::ostringstream log;
          const int code = run_experiment(cfg, log);
          return py::make_tuple(code, log.str());
        },
        py::arg("config"), py::arg("out"));

  m.def("write_field", [](const std::string& path, const GridSpec& g, const Array& f) { write_field_file(path, to_field(g, f)); },
        py::arg("path"), py::arg("grid"), py::arg("f"));
  m.def("read_field", [](const std::string& path) {
    const Field f = read_field_file(path);
    return py::make_tuple(f.grid(), to_array(f));
  }, py::arg("path"));

  m.def("quick_checks", [](std::uint64_t seed) {
    py::list out;
    for (const CheckResult& r : {check_operator_exactness(seed), check_k_symmetry(seed), check_gradient(seed),
                                 check_fibering(seed), check_reverse_holder(seed), check_io(seed)})
      out.append(py::dict(py::arg("criterion") = r.criterion, py::arg("name") = r.name, py::arg("pass") = r.pass,
                          py::arg("detail") = r.detail));
    return out;
  }, py::arg("seed") = 1, "Runs the fast invariant suites.");
}
