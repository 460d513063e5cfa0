#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrep/analysis.hpp"
#include "qrep/errors.hpp"
#include "qrep/io.hpp"
#include "qrep/montecarlo.hpp"
#include "qrep/named_policies.hpp"

namespace {

using namespace qrep;
using nlohmann::ordered_json;

enum Exit { kOk = 0, kInternal = 1, kInvalid = 2, kIntractable = 3, kNumerical = 4 };

struct Args {
  int n = 4;
  double p = 0.5;
  double a = 0.5;
  std::string model = "nocc";
  std::string grid = "0.01:1:0.01:1:100";
  std::string policy;
  std::uint64_t trials = 100000;
  std::uint64_t step_cap = 1'000'000'000;
  std::uint64_t seed = 1;
  std::string out;
  std::string format;
  unsigned threads = 0;
  int n_min = 2;
  int refine = 0;
  bool dump_mdp = false;
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write '" + path + "'");
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

std::string sidecar_path(const std::string& csv_path) {
  const auto dot = csv_path.rfind('.');
  const auto slash = csv_path.rfind('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) {
    return csv_path.substr(0, dot) + ".json";
  }
  return csv_path + ".json";
}

// CSV to --out (or stdout) with the sidecar beside it (or on stderr); with
// --format json a single document holding both.
void emit_table(const Args& args, const std::string& csv, const std::string& sidecar) {
  if (args.format == "json") {
    ordered_json doc = ordered_json::parse(sidecar);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    for (std::stringstream h(line); std::getline(h, line, ',');) header.push_back(line);
    ordered_json rows = ordered_json::array();
    while (std::getline(in, line)) {
      ordered_json row;
      std::stringstream cells(line);
      std::string cell;
      for (std::size_t k = 0; std::getline(cells, cell, ','); ++k) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end && *end == '\0' && !cell.empty()) {
          row[header.at(k)] = v;
        } else {
          row[header.at(k)] = cell;
        }
      }
      rows.push_back(std::move(row));
    }
    doc["rows"] = std::move(rows);
    emit(doc.dump(2), args.out);
    return;
  }
  emit(csv, args.out);
  if (args.out.empty()) {
    std::cerr << sidecar << '\n';
  } else {
    emit(sidecar, sidecar_path(args.out));
  }
}

Model model_of(const Args& args) { return parse_model(args.model); }

Mdp make_mdp(const Args& args, bool sweep = false) {
  const Model model = model_of(args);
  const ModelParams params = ModelParams::make(args.p, args.a, model);
  check_tractable(args.n, model, sweep);
  return build_mdp(args.n, params);
}

Policy policy_of(const Mdp& mdp, const std::string& text) {
  const SchemeId scheme = SchemeId::parse(text);
  if (scheme.kind == SchemeKind::Custom) return load_policy_file(mdp, scheme.label);
  return scheme_policy(mdp, scheme);
}

int cmd_solve(const Args& args) {
  const Mdp mdp = make_mdp(args);
  const Solution sol = solve_optimal(mdp);
  if (args.format == "csv") {
    std::ostringstream out;
    out << "state,value,action\n";
    for (std::size_t s = 0; s < mdp.num_nonterminal(); ++s) {
      out << mdp.space().state(s).to_string() << "," << std::setprecision(17) << sol.values[s]
          << "," << mdp.actions(s)[sol.policy.choice[s]].to_string() << "\n";
    }
    emit(out.str(), args.out);
  } else {
    emit(solution_json(mdp, sol), args.out);
  }
  std::cerr << "optimal waiting time " << std::setprecision(12) << sol.values[mdp.initial()]
            << " (residual " << sol.residual << ", " << sol.iterations << " iterations)\n";
  return kOk;
}

int cmd_evaluate(const Args& args) {
  if (args.policy.empty()) throw InvalidArgument("evaluate needs --policy");
  const Mdp mdp = make_mdp(args);
  const Policy policy = policy_of(mdp, args.policy);
  LinearSolveInfo info;
  const ValueVector v = evaluate_policy(mdp, policy, &info);
  if (args.format == "csv") {
    std::ostringstream out;
    out << "state,value,action\n" << std::setprecision(17);
    for (std::size_t s = 0; s < v.size(); ++s) {
      out << mdp.space().state(s).to_string() << "," << v[s] << ","
          << mdp.actions(s)[policy.choice[s]].to_string() << "\n";
    }
    emit(out.str(), args.out);
    return kOk;
  }
  ordered_json doc;
  doc["params"] = {{"n", args.n}, {"p", args.p}, {"a", args.a}, {"model", args.model}};
  doc["policy_name"] = args.policy;
  doc["initial_value"] = v[mdp.initial()];
  doc["relative_residual"] = info.relative_residual;
  ordered_json values = ordered_json::object();
  for (std::size_t s = 0; s < v.size(); ++s) values[mdp.space().state(s).to_string()] = v[s];
  doc["values"] = std::move(values);
  doc["policy"] = ordered_json::parse(policy_json(mdp, policy));
  emit(doc.dump(2), args.out);
  return kOk;
}

int cmd_enumerate(const Args& args) {
  const Model model = model_of(args);
  check_tractable(args.n, model, false);
  if (args.dump_mdp) {
    emit(mdp_dump_json(make_mdp(args)), args.out);
    return kOk;
  }
  const auto structure = build_structure(args.n, model);
  const StateSpace& space = structure->space;
  if (args.format == "csv") {
    std::ostringstream out;
    out << "index,state,actions\n";
    for (std::size_t s = 0; s < space.size(); ++s) {
      const std::size_t k = s < space.num_nonterminal()
                                ? structure->action_offset[s + 1] - structure->action_offset[s]
                                : 0;
      out << s << "," << space.state(s).to_string() << "," << k << "\n";
    }
    emit(out.str(), args.out);
  } else {
    emit(state_space_json(space), args.out);
  }
  std::cerr << space.size() << " states (" << space.num_nonterminal() << " non-terminal), "
            << structure->constraint_count() << " constraints";
  if (model == Model::NoCC) std::cerr << "; predicted " << predicted_count(args.n);
  std::cerr << "\n";
  return kOk;
}

int cmd_policies(const Args& args) {
  const Mdp mdp = make_mdp(args);
  if (!args.policy.empty()) {
    emit(policy_json(mdp, policy_of(mdp, args.policy)), args.out);
    return kOk;
  }
  ordered_json doc;
  doc["n"] = args.n;
  doc["model"] = args.model;
  doc["log10_policy_count"] = PolicyEnumerator::log10_count(mdp);
  const double count = PolicyEnumerator::count(mdp);
  if (count < 9.007e15) doc["policy_count"] = static_cast<std::uint64_t>(count);
  ordered_json schemes = ordered_json::object();
  for (const char* name : {"doubling", "swap-asap", "pi0", "pi1", "pi2"}) {
    const SchemeId id = SchemeId::parse(name);
    if (!scheme_applies(id, args.n)) continue;
    schemes[name] = ordered_json::parse(policy_json(mdp, scheme_policy(mdp, id)));
  }
  doc["schemes"] = std::move(schemes);
  emit(doc.dump(2), args.out);
  return kOk;
}

int cmd_region_map(const Args& args) {
  SweepSpec spec;
  spec.segments = args.n;
  spec.model = model_of(args);
  spec.grid = GridSpec::parse(args.grid);
  spec.threads = args.threads;
  const SweepResult result = run_sweep(spec);
  emit_table(args, sweep_csv(result), region_sidecar(result));
  return kOk;
}

int cmd_ratio_map(const Args& args) {
  SweepSpec spec;
  spec.segments = args.n;
  spec.model = model_of(args);
  spec.grid = GridSpec::parse(args.grid);
  spec.schemes = {SchemeId::parse(args.policy.empty() ? "doubling" : args.policy)};
  spec.fingerprints = false;
  spec.threads = args.threads;
  const SweepResult result = run_sweep(spec);
  emit_table(args, ratio_csv(result, 0), ratio_sidecar(result, 0));
  return kOk;
}

int cmd_cc_impact(const Args& args) {
  const ImpactResult result = cc_impact(args.n, GridSpec::parse(args.grid), args.refine, args.threads);
  emit_table(args, impact_csv(result), impact_sidecar(result));
  return kOk;
}

int cmd_scaling(const Args& args) {
  const Model model = model_of(args);
  const auto points = scaling(args.n_min, args.n, args.p, args.a, model);
  emit_table(args, scaling_csv(points), scaling_sidecar(points, args.p, args.a, model));
  return kOk;
}

int cmd_simulate(const Args& args) {
  const Mdp mdp = make_mdp(args);
  const Policy policy = policy_of(mdp, args.policy.empty() ? "swap-asap" : args.policy);
  SimConfig config;
  config.trials = args.trials;
  config.step_cap = args.step_cap;
  config.seed = args.seed;
  const SimEstimate est = estimate_waiting_time(mdp, policy, config);
  if (!est.warning.empty()) std::cerr << "warning: " << est.warning << "\n";
  emit(estimate_json(mdp, policy, est), args.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal entanglement swapping in repeater chains"};
  app.require_subcommand(1);
  Args args;

  auto add_common = [&](CLI::App* sub, bool point, bool policy) {
    sub->add_option("--n", args.n, "number of segments")->capture_default_str();
    sub->add_option("--model", args.model, "nocc or cc")
        ->check(CLI::IsMember({"nocc", "cc"}))
        ->capture_default_str();
    if (point) {
      sub->add_option("--p", args.p, "distribution success probability")->capture_default_str();
      sub->add_option("--a", args.a, "swap success probability")->capture_default_str();
    }
    if (policy) {
      sub->add_option("--policy", args.policy, "doubling, swap-asap, pi0, pi1, pi2 or file=PATH");
    }
    sub->add_option("--out", args.out, "output file (default stdout)");
    sub->add_option("--format", args.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* solve = app.add_subcommand("solve", "optimal values and policy");
  add_common(solve, true, false);
  auto* evaluate = app.add_subcommand("evaluate", "exact waiting time of a fixed policy");
  add_common(evaluate, true, true);
  auto* enumerate = app.add_subcommand("enumerate", "list the reachable states");
  add_common(enumerate, true, false);
  enumerate->add_flag("--dump-mdp", args.dump_mdp, "dump actions and transitions at (p, a)");
  auto* policies = app.add_subcommand("policies", "named policies as JSON");
  add_common(policies, true, true);

  auto* region = app.add_subcommand("region-map", "optimal policy id per grid cell");
  auto* ratio = app.add_subcommand("ratio-map", "scheme / optimal waiting time per grid cell");
  auto* impact = app.add_subcommand("cc-impact", "optimal waiting time with CC / without");
  for (auto* sub : {region, ratio, impact}) {
    add_common(sub, false, sub == ratio);
    sub->add_option("--grid", args.grid, "pmin:pmax:amin:amax:steps")->capture_default_str();
    sub->add_option("--threads", args.threads, "worker threads (0 = all cores)");
  }
  impact->add_option("--refine", args.refine, "rounds of local refinement around the maximum");

  auto* scaling_cmd = app.add_subcommand("scaling", "optimal waiting time for n = n-min..n");
  add_common(scaling_cmd, true, false);
  scaling_cmd->add_option("--n-min", args.n_min, "smallest n")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of a policy's waiting time");
  add_common(simulate, true, true);
  simulate->add_option("--trials", args.trials)->capture_default_str();
  simulate->add_option("--seed", args.seed)->capture_default_str();
  simulate->add_option("--step-cap", args.step_cap, "abort a trajectory after this many steps")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalid;
  }

  try {
    if (*solve) return cmd_solve(args);
    if (*evaluate) return cmd_evaluate(args);
    if (*enumerate) return cmd_enumerate(args);
    if (*policies) return cmd_policies(args);
    if (*region) return cmd_region_map(args);
    if (*ratio) return cmd_ratio_map(args);
    if (*impact) return cmd_cc_impact(args);
    if (*scaling_cmd) return cmd_scaling(args);
    if (*simulate) return cmd_simulate(args);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const Intractable& e) {
    std::cerr << "intractable: " << e.what() << "\n";
    return kIntractable;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kInternal;
}
