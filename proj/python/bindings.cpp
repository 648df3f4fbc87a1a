#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "atomfringe/bounds.hpp"
#include "atomfringe/errors.hpp"
#include "atomfringe/measures.hpp"
#include "atomfringe/photon_sim.hpp"
#include "atomfringe/states.hpp"
#include "atomfringe/three_atom.hpp"
#include "atomfringe/tomography.hpp"
#include "atomfringe/two_atom.hpp"

namespace py = pybind11;
using namespace atomfringe;

PYBIND11_MODULE(_atomfringe, m) {
  m.doc() = "Fringe visibility, entanglement bounds and tomography for pinned two-level emitters";
  m.attr("__version__") = "0.1.0";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidState>(m, "InvalidState", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<IllPosed>(m, "IllPosed", base.ptr());
  py::register_exception<InsufficientData>(m, "InsufficientData", base.ptr());
  py::register_exception<InternalError>(m, "InternalError", base.ptr());

  py::class_<TwoQubitBlochState>(m, "TwoQubitBlochState")
      .def(py::init<double, double, double>(), py::arg("s"), py::arg("theta"), py::arg("phi"))
      .def_static("from_vector", &TwoQubitBlochState::from_vector)
      .def_property_readonly("s", &TwoQubitBlochState::s)
      .def_property_readonly("theta", &TwoQubitBlochState::theta)
      .def_property_readonly("phi", &TwoQubitBlochState::phi)
      .def("bloch_vector", &TwoQubitBlochState::bloch_vector)
      .def("matrix", &TwoQubitBlochState::matrix)
      .def("__repr__", [](const TwoQubitBlochState& s) { return "TwoQubitBlochState(" + to_json(s).dump() + ")"; });

  py::class_<WLikeState>(m, "WLikeState")
      .def(py::init<double, double, double, double, double>(), py::arg("c1"), py::arg("c2"), py::arg("c3"),
           py::arg("phi2") = 0.0, py::arg("phi3") = 0.0)
      .def_property_readonly("c", [](const WLikeState& s) { return s.c(); })
      .def_property_readonly("phi2", &WLikeState::phi2)
      .def_property_readonly("phi3", &WLikeState::phi3)
      .def("__repr__", [](const WLikeState& s) { return "WLikeState(" + to_json(s).dump() + ")"; });

  m.def("concurrence_bloch", &concurrence_bloch);
  m.def("negativity_cut", &negativity_cut);
  m.def("negativity_max", &negativity_max);
  m.def("mixedness", &mixedness);
  m.def("geometric_measure", &geometric_measure_wlike);
  m.def("three_pi", &three_pi);

  py::enum_<VisibilityMode>(m, "VisibilityMode")
      .value("formal", VisibilityMode::formal)
      .value("physical", VisibilityMode::physical);

  py::class_<PairCoupling>(m, "PairCoupling")
      .def_readonly("u", &PairCoupling::u)
      .def_readonly("f", &PairCoupling::f)
      .def_readonly("g", &PairCoupling::g)
      .def_readonly("omega_plus", &PairCoupling::omega_plus)
      .def_readonly("omega_minus", &PairCoupling::omega_minus)
      .def_readonly("gamma_plus", &PairCoupling::gamma_plus)
      .def_readonly("gamma_minus", &PairCoupling::gamma_minus);
  m.def("eigenmodes_two", &eigenmodes_two, py::arg("u"));
  m.def("emission_spectrum_two",
        [](const TwoQubitBlochState& s, double u, double omega, double chi) {
          return emission_spectrum_two(s, u, omega, chi);
        },
        py::arg("state"), py::arg("u"), py::arg("omega"), py::arg("chi"));
  m.def("visibility_two", &visibility_two, py::arg("state"), py::arg("u"), py::arg("omega") = 0.0,
        py::arg("mode") = VisibilityMode::formal);
  m.def("visibility_two_bruteforce", &visibility_two_bruteforce, py::arg("state"), py::arg("u"),
        py::arg("omega"), py::arg("n_grid"), py::arg("mode") = VisibilityMode::formal);
  m.def("deviation_s0_analytic", &deviation_s0_analytic, py::arg("u"));
  m.def("deviation_max",
        [](double s, double u, double omega) {
          const auto r = deviation_max(s, u, omega);
          return py::make_tuple(r.max_dev, r.theta_star, r.phi_star);
        },
        py::arg("s"), py::arg("u"), py::arg("omega") = 0.0);

  m.def("farfield_intensity", &farfield_intensity, py::arg("state"), py::arg("theta1"), py::arg("theta2"));
  m.def("visibility_three", &visibility_three, py::arg("state"));
  m.def("visibility_three_bruteforce", &visibility_three_bruteforce, py::arg("state"), py::arg("n_grid"));
  m.def("fringe_extrema_three", [](const WLikeState& s) {
    const auto e = fringe_extrema_three(s);
    return py::make_tuple(e.imax, e.imin, e.angles);
  });

  py::enum_<Measure>(m, "Measure")
      .value("mixedness", Measure::mixedness)
      .value("geometric", Measure::geometric)
      .value("negativity_max", Measure::negativity_max)
      .value("three_pi", Measure::three_pi);
  py::class_<BoundInterval>(m, "BoundInterval")
      .def_readonly("visibility", &BoundInterval::visibility)
      .def_readonly("upsilon", &BoundInterval::upsilon)
      .def_readonly("lower", &BoundInterval::lower)
      .def_readonly("upper", &BoundInterval::upper)
      .def_readonly("lower_closed", &BoundInterval::lower_closed)
      .def_readonly("upper_closed", &BoundInterval::upper_closed)
      .def("contains", &BoundInterval::contains, py::arg("value"), py::arg("tol") = 1e-9);
  m.def("bounds_for", &bounds_for, py::arg("measure"), py::arg("visibility"));
  m.def("left_limit_at_unit_visibility", &left_limit_at_unit_visibility, py::arg("measure"));
  m.def("measure_value", &measure_value, py::arg("measure"), py::arg("state"));
  m.def("sample_states_at_visibility", &sample_states_at_visibility, py::arg("visibility"), py::arg("n"),
        py::arg("seed"));

  m.def("tomography_two",
        [](const std::vector<std::tuple<double, double, double, double>>& rows) {
          std::vector<FringeSample> s;
          for (const auto& [chi, omega, u, intensity] : rows) s.push_back({chi, omega, u, intensity});
          const auto r = tomography_two_exact(s);
          return py::make_tuple(r.state, r.covariance, r.residual);
        },
        py::arg("samples"), "samples: (chi, omega, u, intensity) tuples over two or more separations");
  m.def("tomography_three",
        [](const std::vector<std::tuple<double, double, double>>& rows) {
          std::vector<TorusSample> s;
          for (const auto& [t1, t2, i] : rows) s.push_back({t1, t2, i});
          const auto r = tomography_three(s);
          return py::make_tuple(r.c_atom_order, r.phi2, r.phi3, r.residual);
        },
        py::arg("samples"), "samples: (theta1, theta2, intensity) tuples");
  m.def("default_torus_design", &default_torus_design);

  m.def("simulate_fringe_two",
        [](const TwoQubitBlochState& s, double u, std::size_t n, std::uint64_t seed, std::size_t bins) {
          const auto h = simulate_fringe_two(s, u, n, seed, bins);
          const auto e = estimate_visibility(h);
          py::dict d;
          d["edges"] = h.edges;
          d["counts"] = h.counts;
          d["visibility"] = e.value;
          d["sigma"] = e.sigma;
          return d;
        },
        py::arg("state"), py::arg("u"), py::arg("n"), py::arg("seed"), py::arg("bins") = 128);
}
