#include "qrep/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "qrep/errors.hpp"
#include "qrep/io.hpp"

namespace qrep {

using nlohmann::ordered_json;

namespace {

// Non-terminal state counts with CC (lumped), n = 2..10.
constexpr std::uint64_t kCcStates[] = {0, 0, 3, 12, 45, 156, 528, 1826, 6265, 21857, 76814};

double estimated_states(int n, Model model) {
  if (model == Model::NoCC) return static_cast<double>(predicted_count(n));
  if (n <= 10) return static_cast<double>(kCcStates[std::max(n, 2)]);
  return 76814.0 * std::pow(3.5, n - 10);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_coord(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

// Runs job(i) for i in [0, count) on a small pool; rethrows the first error.
template <typename Job>
void parallel_for(std::size_t count, unsigned threads, Job job) {
  const unsigned workers = worker_count(threads, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

ordered_json grid_json(const GridSpec& g) {
  return {{"p_min", g.p_min}, {"p_max", g.p_max}, {"a_min", g.a_min},
          {"a_max", g.a_max}, {"steps", g.steps}};
}

double initial_value(const Mdp& mdp, const Policy& policy) {
  return evaluate_policy(mdp, policy)[mdp.initial()];
}

}  // namespace

GridSpec GridSpec::parse(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() != 5) {
    throw InvalidArgument("grid must be pmin:pmax:amin:amax:steps, got '" + std::string(text) + "'");
  }
  auto number = [&](std::string_view s) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) {
      throw InvalidArgument("bad number '" + std::string(s) + "' in grid");
    }
    return v;
  };
  GridSpec g;
  g.p_min = number(parts[0]);
  g.p_max = number(parts[1]);
  g.a_min = number(parts[2]);
  g.a_max = number(parts[3]);
  const double steps = number(parts[4]);
  if (steps != std::floor(steps) || steps > 100000) {
    throw InvalidArgument("grid steps must be an integer");
  }
  g.steps = static_cast<int>(steps);
  g.validate();
  return g;
}

void GridSpec::validate() const {
  auto range_ok = [](double lo, double hi) { return lo > 0.0 && lo <= hi && hi <= 1.0; };
  if (!range_ok(p_min, p_max) || !range_ok(a_min, a_max)) {
    throw InvalidArgument("grid ranges must satisfy 0 < min <= max <= 1");
  }
  if (steps < 2) throw InvalidArgument("grid needs at least 2 steps per axis");
}

double GridSpec::p(int i) const {
  return i == steps - 1 ? p_max : p_min + (p_max - p_min) * i / (steps - 1);
}

double GridSpec::a(int j) const {
  return j == steps - 1 ? a_max : a_min + (a_max - a_min) * j / (steps - 1);
}

std::string GridSpec::to_string() const {
  return fmt_coord(p_min) + ":" + fmt_coord(p_max) + ":" + fmt_coord(a_min) + ":" +
         fmt_coord(a_max) + ":" + std::to_string(steps);
}

void check_tractable(int segments, Model model, bool sweep) {
  if (segments < 2) throw InvalidArgument("need at least 2 segments");
  const int limit = model == Model::CC ? (sweep ? 10 : 11) : (sweep ? 12 : 14);
  if (segments > limit) {
    std::ostringstream msg;
    msg << "n=" << segments << " (" << to_string(model) << ") has about "
        << estimated_states(segments, model) << " states; the limit for "
        << (sweep ? "sweeps" : "single solves") << " is n=" << limit;
    throw Intractable(msg.str());
  }
}

PolicyFingerprint reachable_fingerprint(const Mdp& mdp, const Policy& policy) {
  check_policy(mdp, policy);
  const MdpStructure& st = mdp.structure();
  const std::size_t terminal = mdp.terminal();
  std::vector<char> seen(mdp.num_states(), 0);
  std::vector<std::uint32_t> stack{static_cast<std::uint32_t>(mdp.initial())};
  seen[mdp.initial()] = 1;
  while (!stack.empty()) {
    const std::uint32_t s = stack.back();
    stack.pop_back();
    if (s == terminal) continue;
    const std::size_t g = st.action_offset[s] + policy.choice[s];
    for (std::size_t o = st.outcome_offset[g]; o < st.outcome_offset[g + 1]; ++o) {
      const std::uint32_t t = st.targets[o];
      if (!seen[t]) {
        seen[t] = 1;
        stack.push_back(t);
      }
    }
  }
  ordered_json table = ordered_json::object();
  PolicyFingerprint fp;
  for (std::size_t s = 0; s < mdp.num_nonterminal(); ++s) {
    if (!seen[s]) continue;
    table[mdp.space().state(s).to_string()] = mdp.actions(s)[policy.choice[s]].to_string();
    ++fp.reachable;
  }
  fp.table = table.dump();
  fp.id = digest_hex(fp.table);
  return fp;
}

SweepResult run_sweep(const SweepSpec& spec) {
  spec.grid.validate();
  check_tractable(spec.segments, spec.model, true);
  for (const auto& scheme : spec.schemes) {
    if (scheme.kind == SchemeKind::Custom) {
      throw InvalidArgument("sweeps take named schemes only");
    }
    if (!scheme_applies(scheme, spec.segments)) {
      throw InvalidArgument("scheme " + scheme.to_string() + " is not defined for n=" +
                            std::to_string(spec.segments));
    }
  }
  const auto structure = build_structure(spec.segments, spec.model);
  std::vector<Policy> scheme_policies;
  {
    const Mdp probe(structure, ModelParams::make(0.5, 0.5, spec.model));
    for (const auto& scheme : spec.schemes) scheme_policies.push_back(scheme_policy(probe, scheme));
  }

  const int steps = spec.grid.steps;
  SweepResult result;
  result.spec = spec;
  result.cells.resize(static_cast<std::size_t>(steps) * steps);
  std::vector<PolicyFingerprint> prints(result.cells.size());

  parallel_for(static_cast<std::size_t>(steps), spec.threads, [&](std::size_t i) {
    std::optional<Policy> warm;
    for (int j = 0; j < steps; ++j) {
      SweepCell& cell = result.cells[i * steps + j];
      cell.p = spec.grid.p(static_cast<int>(i));
      cell.a = spec.grid.a(j);
      const Mdp mdp(structure, ModelParams::make(cell.p, cell.a, spec.model));
      SolveOptions options;
      options.initial_policy = warm;
      Solution sol = solve_optimal(mdp, options);
      cell.optimal = sol.values[mdp.initial()];
      cell.residual = sol.residual;
      if (spec.fingerprints) {
        prints[i * steps + j] = reachable_fingerprint(mdp, sol.policy);
        cell.policy_id = prints[i * steps + j].id;
      }
      for (const auto& policy : scheme_policies) cell.schemes.push_back(initial_value(mdp, policy));
      warm = std::move(sol.policy);
    }
  });
  for (auto& fp : prints) {
    if (!fp.id.empty()) result.legend.emplace(fp.id, std::move(fp));
  }
  return result;
}

ImpactResult cc_impact(int segments, const GridSpec& grid, int refine_rounds,
                       unsigned threads) {
  grid.validate();
  check_tractable(segments, Model::CC, true);
  if (refine_rounds < 0) throw InvalidArgument("refine_rounds must be >= 0");
  const auto cc = build_structure(segments, Model::CC);
  const auto nocc = build_structure(segments, Model::NoCC);

  struct Warm {
    std::optional<Policy> cc, nocc;
  };
  auto evaluate = [&](double p, double a, Warm& warm) {
    ImpactPoint pt{p, a, 0.0, 0.0};
    const Mdp m_cc(cc, ModelParams::make(p, a, Model::CC));
    const Mdp m_nocc(nocc, ModelParams::make(p, a, Model::NoCC));
    SolveOptions o_cc, o_nocc;
    o_cc.initial_policy = warm.cc;
    o_nocc.initial_policy = warm.nocc;
    Solution s_cc = solve_optimal(m_cc, o_cc);
    Solution s_nocc = solve_optimal(m_nocc, o_nocc);
    pt.cc = s_cc.values[m_cc.initial()];
    pt.nocc = s_nocc.values[m_nocc.initial()];
    warm.cc = std::move(s_cc.policy);
    warm.nocc = std::move(s_nocc.policy);
    return pt;
  };

  ImpactResult result;
  result.segments = segments;
  result.grid = grid;
  result.refine_rounds = refine_rounds;
  const int steps = grid.steps;
  result.cells.resize(static_cast<std::size_t>(steps) * steps);
  std::vector<Warm> row_end(steps);
  parallel_for(static_cast<std::size_t>(steps), threads, [&](std::size_t i) {
    Warm warm;
    for (int j = 0; j < steps; ++j) {
      result.cells[i * steps + j] = evaluate(grid.p(static_cast<int>(i)), grid.a(j), warm);
    }
  });
  result.points_evaluated = result.cells.size();
  std::size_t best_index = 0;
  for (std::size_t k = 1; k < result.cells.size(); ++k) {
    if (result.cells[k].ratio() > result.cells[best_index].ratio()) best_index = k;
  }
  result.best = result.cells[best_index];

  double hp = (grid.p_max - grid.p_min) / (steps - 1);
  double ha = (grid.a_max - grid.a_min) / (steps - 1);
  for (int round = 0; round < refine_rounds; ++round) {
    hp /= 2;
    ha /= 2;
    const ImpactPoint centre = result.best;
    std::vector<double> ps, as;
    for (int k = -2; k <= 2; ++k) {
      const double p = centre.p + k * hp;
      const double a = centre.a + k * ha;
      if (p >= grid.p_min - 1e-15 && p <= grid.p_max + 1e-15) ps.push_back(std::clamp(p, grid.p_min, grid.p_max));
      if (a >= grid.a_min - 1e-15 && a <= grid.a_max + 1e-15) as.push_back(std::clamp(a, grid.a_min, grid.a_max));
    }
    std::vector<ImpactPoint> patch(ps.size() * as.size());
    parallel_for(ps.size(), threads, [&](std::size_t i) {
      Warm warm;
      for (std::size_t j = 0; j < as.size(); ++j) patch[i * as.size() + j] = evaluate(ps[i], as[j], warm);
    });
    result.points_evaluated += patch.size();
    for (const auto& pt : patch) {
      if (pt.ratio() > result.best.ratio()) result.best = pt;
    }
  }
  return result;
}

std::vector<ScalingPoint> scaling(int n_min, int n_max, double p, double a, Model model) {
  if (n_min < 2 || n_max < n_min) throw InvalidArgument("need 2 <= n_min <= n_max");
  const ModelParams params = ModelParams::make(p, a, model);
  for (int n = n_min; n <= n_max; ++n) check_tractable(n, model, false);
  std::vector<ScalingPoint> out;
  for (int n = n_min; n <= n_max; ++n) {
    const Mdp mdp = build_mdp(n, params);
    out.push_back({n, solve_optimal(mdp).values[mdp.initial()]});
  }
  return out;
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("fit needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

std::string sweep_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "p,a,policy_id,optimal";
  for (const auto& s : result.spec.schemes) out << "," << s.to_string();
  out << "\n";
  for (const auto& c : result.cells) {
    out << fmt_coord(c.p) << "," << fmt_coord(c.a) << "," << c.policy_id << "," << fmt(c.optimal);
    for (double v : c.schemes) out << "," << fmt(v);
    out << "\n";
  }
  return out.str();
}

std::string region_sidecar(const SweepResult& result) {
  ordered_json out;
  out["command"] = "region-map";
  out["n"] = result.spec.segments;
  out["model"] = std::string(to_string(result.spec.model));
  out["grid"] = grid_json(result.spec.grid);
  std::map<std::string, std::size_t> counts;
  for (const auto& c : result.cells) ++counts[c.policy_id];
  out["distinct_policies"] = result.legend.size();
  ordered_json legend = ordered_json::array();
  for (const auto& [id, fp] : result.legend) {
    legend.push_back({{"id", id},
                      {"cells", counts[id]},
                      {"reachable_states", fp.reachable},
                      {"actions", ordered_json::parse(fp.table)}});
  }
  out["legend"] = std::move(legend);
  const auto [lo, hi] = std::minmax_element(
      result.cells.begin(), result.cells.end(),
      [](const SweepCell& x, const SweepCell& y) { return x.optimal < y.optimal; });
  out["extrema"] = {{"optimal_min", lo->optimal}, {"optimal_min_at", {lo->p, lo->a}},
                    {"optimal_max", hi->optimal}, {"optimal_max_at", {hi->p, hi->a}}};
  return out.dump(2);
}

static void check_scheme_index(const SweepResult& result, std::size_t scheme) {
  if (scheme >= result.spec.schemes.size()) {
    throw InvalidArgument("sweep has no scheme #" + std::to_string(scheme));
  }
}

std::string ratio_csv(const SweepResult& result, std::size_t scheme) {
  check_scheme_index(result, scheme);
  std::ostringstream out;
  out << "p,a,optimal," << result.spec.schemes.at(scheme).to_string() << ",ratio\n";
  for (const auto& c : result.cells) {
    out << fmt_coord(c.p) << "," << fmt_coord(c.a) << "," << fmt(c.optimal) << ","
        << fmt(c.schemes[scheme]) << "," << fmt(c.schemes[scheme] / c.optimal) << "\n";
  }
  return out.str();
}

std::string ratio_sidecar(const SweepResult& result, std::size_t scheme) {
  check_scheme_index(result, scheme);
  ordered_json out;
  out["command"] = "ratio-map";
  out["n"] = result.spec.segments;
  out["model"] = std::string(to_string(result.spec.model));
  out["scheme"] = result.spec.schemes.at(scheme).to_string();
  out["grid"] = grid_json(result.spec.grid);
  auto ratio = [&](const SweepCell& c) { return c.schemes[scheme] / c.optimal; };
  const auto [lo, hi] = std::minmax_element(
      result.cells.begin(), result.cells.end(),
      [&](const SweepCell& x, const SweepCell& y) { return ratio(x) < ratio(y); });
  out["extrema"] = {{"ratio_min", ratio(*lo)}, {"ratio_min_at", {lo->p, lo->a}},
                    {"ratio_max", ratio(*hi)}, {"ratio_max_at", {hi->p, hi->a}}};
  return out.dump(2);
}

std::string impact_csv(const ImpactResult& result) {
  std::ostringstream out;
  out << "p,a,optimal_cc,optimal_nocc,ratio\n";
  for (const auto& c : result.cells) {
    out << fmt_coord(c.p) << "," << fmt_coord(c.a) << "," << fmt(c.cc) << "," << fmt(c.nocc)
        << "," << fmt(c.ratio()) << "\n";
  }
  return out.str();
}

std::string impact_sidecar(const ImpactResult& result) {
  ordered_json out;
  out["command"] = "cc-impact";
  out["n"] = result.segments;
  out["grid"] = grid_json(result.grid);
  out["refine_rounds"] = result.refine_rounds;
  out["points_evaluated"] = result.points_evaluated;
  const auto [lo, hi] = std::minmax_element(
      result.cells.begin(), result.cells.end(),
      [](const ImpactPoint& x, const ImpactPoint& y) { return x.ratio() < y.ratio(); });
  out["extrema"] = {{"grid_ratio_min", lo->ratio()}, {"grid_ratio_min_at", {lo->p, lo->a}},
                    {"grid_ratio_max", hi->ratio()}, {"grid_ratio_max_at", {hi->p, hi->a}},
                    {"ratio_max", result.best.ratio()},
                    {"ratio_max_at", {result.best.p, result.best.a}}};
  return out.dump(2);
}

std::string scaling_csv(const std::vector<ScalingPoint>& points) {
  std::ostringstream out;
  out << "n,optimal\n";
  for (const auto& pt : points) out << pt.segments << "," << fmt(pt.optimal) << "\n";
  return out.str();
}

std::string scaling_sidecar(const std::vector<ScalingPoint>& points, double p, double a,
                            Model model) {
  std::vector<double> x, y;
  for (const auto& pt : points) {
    x.push_back(pt.segments);
    y.push_back(pt.optimal);
  }
  ordered_json out;
  out["command"] = "scaling";
  out["p"] = p;
  out["a"] = a;
  out["model"] = std::string(to_string(model));
  if (points.size() >= 2) {
    const LinearFit fit = fit_line(x, y);
    out["linear_fit"] = {{"slope", fit.slope}, {"intercept", fit.intercept},
                         {"r_squared", fit.r_squared}};
  }
  return out.dump(2);
}

}  // namespace qrep
