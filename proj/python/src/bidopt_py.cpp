#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "bidopt/auction_sim.hpp"
#include "bidopt/errors.hpp"
#include "bidopt/io.hpp"
#include "bidopt/oracle.hpp"
#include "bidopt/single_group.hpp"
#include "bidopt/solver.hpp"

namespace py = pybind11;
using bidopt::io::json;

namespace {

// Documents cross the boundary as JSON text; the Python package converts
// to and from dicts.
json in(const std::string& text) { return bidopt::io::parse_json(text); }
std::string out(const json& doc) { return doc.dump(); }

bidopt::ProblemInstance instance(const std::string& text) {
  return bidopt::io::instance_from_json(in(text));
}

bidopt::MixedStrategy strategy(const bidopt::ProblemInstance& inst, const std::string& spec) {
  if (spec == "pure" || spec == "mixed") {
    const auto d = bidopt::decompose(inst);
    if (spec == "pure") return bidopt::lift(bidopt::build_allocation(inst, d));
    return bidopt::build_mixed(inst, d).strategy;
  }
  return bidopt::io::mixed_from_json(inst, in(spec));
}

std::string solve(const std::string& text) {
  const auto inst = instance(text);
  return out(bidopt::io::solution_to_json(inst, bidopt::decompose(inst)));
}

std::string mixed(const std::string& text, py::object delta, std::vector<double> b1) {
  const auto inst = instance(text);
  const auto d = bidopt::decompose(inst);
  auto choice = bidopt::B1Choice::automatic();
  if (!delta.is_none()) choice = bidopt::B1Choice::relative_delta(delta.cast<double>());
  if (!b1.empty()) choice = bidopt::B1Choice::per_component_bids(std::move(b1));
  return out(bidopt::io::mixed_report_to_json(inst, bidopt::build_mixed(inst, d, choice)));
}

std::string single(const std::string& curve, double demand, py::object b1) {
  const auto c = bidopt::io::curve_from_json(in(curve));
  auto doc = bidopt::io::single_to_json(bidopt::solve_single(c, demand));
  if (!b1.is_none()) doc["two_point"] = bidopt::io::two_point_to_json(bidopt::two_point_mixed(c, demand, b1.cast<double>()));
  return out(doc);
}

std::string verify(const std::string& text, const std::string& alloc) {
  const auto inst = instance(text);
  const auto a = alloc == "pure" ? bidopt::build_allocation(inst, bidopt::decompose(inst))
                                 : bidopt::io::pure_from_json(inst, in(alloc));
  auto doc = bidopt::io::verification_to_json(bidopt::verify_sufficient(inst, a));
  doc["cost"] = bidopt::pure_cost(inst, a);
  doc["feasibility"] = bidopt::io::feasibility_to_json(inst, bidopt::check_feasible(inst, a));
  return out(doc);
}

std::string cost(const std::string& text, const std::string& spec) {
  const auto inst = instance(text);
  const auto s = strategy(inst, spec);
  json doc = {{"cost", bidopt::mixed_cost(inst, s)}};
  doc["feasibility"] = bidopt::io::feasibility_to_json(inst, bidopt::check_feasible(inst, s));
  return out(doc);
}

std::string oracle(const std::string& text, int gamma_steps, int subdivisions, bool mixed_search,
                   double max_states) {
  const auto inst = instance(text);
  bidopt::GridSpec spec;
  spec.gamma_steps = gamma_steps;
  spec.subdivisions = subdivisions;
  spec.max_states = max_states;
  const auto r = mixed_search ? bidopt::grid_mixed_cost(inst, spec) : bidopt::grid_pure_optimum(inst, spec);
  return out(bidopt::io::oracle_to_json(inst, r, mixed_search));
}

std::string simulate(const std::string& text, const std::string& spec, std::uint64_t seed,
                     std::size_t replications, bool poisson) {
  const auto inst = instance(text);
  bidopt::SimOptions opts{seed, replications, poisson};
  return out(bidopt::io::simulation_to_json(inst, bidopt::run_simulation(inst, strategy(inst, spec), opts)));
}

}  // namespace

PYBIND11_MODULE(_bidopt, m) {
  m.doc() = "Bidding strategies for campaigns with overlapping targeting (JSON-text interface).";

  auto base = py::register_exception<bidopt::Error>(m, "BidoptError", PyExc_RuntimeError);
  py::register_exception<bidopt::SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<bidopt::DomainError>(m, "DomainError", base.ptr());
  py::register_exception<bidopt::InfeasibleInstance>(m, "InfeasibleInstance", base.ptr());
  py::register_exception<bidopt::UnsatisfiableSupply>(m, "UnsatisfiableSupply", base.ptr());
  py::register_exception<bidopt::OracleCapExceeded>(m, "OracleCapExceeded", base.ptr());
  py::register_exception<bidopt::UnsupportedCurve>(m, "UnsupportedCurve", base.ptr());

  py::class_<bidopt::SupplyCurve>(m, "SupplyCurve")
      .def_static(
          "step", [](std::vector<std::pair<double, double>> k) {
            std::vector<bidopt::SupplyCurve::Knot> knots;
            for (auto [b, v] : k) knots.push_back({b, v});
            return bidopt::SupplyCurve::step(std::move(knots));
          },
          py::arg("knots"))
      .def_static(
          "linear", [](std::vector<std::pair<double, double>> k) {
            std::vector<bidopt::SupplyCurve::Knot> knots;
            for (auto [b, v] : k) knots.push_back({b, v});
            return bidopt::SupplyCurve::linear(std::move(knots));
          },
          py::arg("knots"))
      .def_static("from_json", [](const std::string& t) { return bidopt::io::curve_from_json(in(t)); })
      .def("to_json", [](const bidopt::SupplyCurve& c) { return out(bidopt::io::curve_to_json(c)); })
      .def("eval", &bidopt::SupplyCurve::eval, py::arg("bid"))
      .def("left_limit", &bidopt::SupplyCurve::left_limit, py::arg("bid"))
      .def("integral", &bidopt::SupplyCurve::integral, py::arg("bid"))
      .def("win_cost", &bidopt::SupplyCurve::win_cost, py::arg("bid"))
      .def("quantile", &bidopt::SupplyCurve::quantile, py::arg("target"))
      .def_property_readonly("max_volume", &bidopt::SupplyCurve::max_volume)
      .def("__call__", &bidopt::SupplyCurve::eval);

  m.def("build_groups", [](const std::string& t) { return out(bidopt::io::build_groups(in(t))); });
  m.def("solve", &solve, py::arg("instance"));
  m.def("mixed", &mixed, py::arg("instance"), py::arg("delta") = py::none(),
        py::arg("b1") = std::vector<double>{});
  m.def("single", &single, py::arg("curve"), py::arg("demand"), py::arg("b1") = py::none());
  m.def("verify", &verify, py::arg("instance"), py::arg("allocation"));
  m.def("cost", &cost, py::arg("instance"), py::arg("strategy"));
  m.def("oracle", &oracle, py::arg("instance"), py::arg("gamma_steps") = 20, py::arg("subdivisions") = 1,
        py::arg("mixed") = false, py::arg("max_states") = 1e8);
  m.def("simulate", &simulate, py::arg("instance"), py::arg("strategy"), py::arg("seed"),
        py::arg("replications") = 1, py::arg("poisson") = false);
}
