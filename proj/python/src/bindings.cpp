#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qrep/errors.hpp"
#include "qrep/io.hpp"
#include "qrep/montecarlo.hpp"
#include "qrep/named_policies.hpp"

namespace py = pybind11;
using namespace qrep;

namespace {

Model model_of(const std::string& name) {
  if (name == "nocc") return Model::NoCC;
  if (name == "cc") return Model::CC;
  throw InvalidArgument("model must be 'nocc' or 'cc', got '" + name + "'");
}

Mdp make_mdp(int n, double p, double a, const std::string& model) {
  return build_mdp(n, ModelParams::make(p, a, model_of(model)));
}

py::dict policy_dict(const Mdp& mdp, const Policy& policy) {
  py::dict out;
  for (std::size_t s = 0; s < mdp.num_nonterminal(); ++s) {
    out[py::str(mdp.space().state(s).to_string())] = mdp.actions(s)[policy.choice[s]].to_string();
  }
  return out;
}

py::dict values_dict(const Mdp& mdp, const ValueVector& values) {
  py::dict out;
  for (std::size_t s = 0; s < values.size(); ++s) {
    out[py::str(mdp.space().state(s).to_string())] = values[s];
  }
  out[py::str(mdp.space().state(mdp.space().terminal()).to_string())] = 0.0;
  return out;
}

Policy resolve_policy(const Mdp& mdp, const py::object& policy) {
  if (py::isinstance<py::dict>(policy)) {
    py::module_ json = py::module_::import("json");
    return parse_policy_json(mdp, json.attr("dumps")(policy).cast<std::string>());
  }
  const SchemeId id = SchemeId::parse(policy.cast<std::string>());
  if (id.kind == SchemeKind::Custom) return load_policy_file(mdp, id.label);
  return scheme_policy(mdp, id);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Optimal entanglement swapping in quantum repeater chains";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<Intractable>(m, "Intractable", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  m.def("enumerate_states", [](int n, const std::string& model) {
    const StateSpace space = enumerate_states(n, model_of(model));
    std::vector<std::string> out;
    for (const auto& s : space.states()) out.push_back(s.to_string());
    return out;
  }, py::arg("n"), py::arg("model") = "nocc");

  m.def("predicted_count", &predicted_count, py::arg("n"));

  m.def("mdp_size", [](int n, const std::string& model) {
    const auto st = build_structure(n, model_of(model));
    return py::make_tuple(st->space.num_nonterminal(), st->constraint_count());
  }, py::arg("n"), py::arg("model") = "nocc");

  m.def("solve", [](int n, double p, double a, const std::string& model) {
    const Mdp mdp = make_mdp(n, p, a, model);
    Solution sol;
    {
      py::gil_scoped_release release;
      sol = solve_optimal(mdp);
    }
    py::dict out;
    out["value"] = sol.values[mdp.initial()];
    out["values"] = values_dict(mdp, sol.values);
    out["policy"] = policy_dict(mdp, sol.policy);
    out["residual"] = sol.residual;
    out["iterations"] = sol.iterations;
    return out;
  }, py::arg("n"), py::arg("p"), py::arg("a"), py::arg("model") = "nocc");

  m.def("policy", [](int n, double p, double a, const std::string& model, const std::string& name) {
    const Mdp mdp = make_mdp(n, p, a, model);
    return policy_dict(mdp, scheme_policy(mdp, SchemeId::parse(name)));
  }, py::arg("n"), py::arg("p"), py::arg("a"), py::arg("model"), py::arg("name"));

  m.def("evaluate", [](int n, double p, double a, const std::string& model, const py::object& policy) {
    const Mdp mdp = make_mdp(n, p, a, model);
    const ValueVector v = evaluate_policy(mdp, resolve_policy(mdp, policy));
    py::dict out;
    out["value"] = v[mdp.initial()];
    out["values"] = values_dict(mdp, v);
    return out;
  }, py::arg("n"), py::arg("p"), py::arg("a"), py::arg("model"), py::arg("policy"));

  m.def("simulate", [](int n, double p, double a, const std::string& model, const py::object& policy,
                       std::uint64_t trials, std::uint64_t seed) {
    const Mdp mdp = make_mdp(n, p, a, model);
    const Policy pol = resolve_policy(mdp, policy);
    SimConfig config;
    config.trials = trials;
    config.seed = seed;
    SimEstimate est;
    {
      py::gil_scoped_release release;
      est = estimate_waiting_time(mdp, pol, config);
    }
    py::dict out;
    out["mean"] = est.mean;
    out["stderr"] = est.std_error;
    out["trials"] = est.trials;
    out["seed"] = est.seed;
    if (!est.warning.empty()) out["warning"] = est.warning;
    return out;
  }, py::arg("n"), py::arg("p"), py::arg("a"), py::arg("model"), py::arg("policy"),
     py::arg("trials") = 10000, py::arg("seed") = 1);
}
