#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "qrep/named_policies.hpp"
#include "qrep/solver.hpp"

namespace qrep {

/// Square (p, a) grid with `steps` evenly spaced points per axis, both ends
/// included.
struct GridSpec {
  double p_min = 0.01;
  double p_max = 1.0;
  double a_min = 0.01;
  double a_max = 1.0;
  int steps = 100;

  // "pmin:pmax:amin:amax:steps"; throws InvalidArgument.
  static GridSpec parse(std::string_view text);
  void validate() const;
  double p(int i) const;
  double a(int j) const;
  std::string to_string() const;
};

// Throws Intractable (with the expected state count) when n is beyond what a
// single solve or a grid sweep is allowed to attempt.
void check_tractable(int segments, Model model, bool sweep);

/// Identity of a policy restricted to the states it can reach from the
/// all-idle state (structurally, i.e. for any p, a in (0, 1)).
struct PolicyFingerprint {
  std::string id;     // 16 hex digits
  std::string table;  // {state: action} over the reachable states, JSON
  std::size_t reachable = 0;
};
PolicyFingerprint reachable_fingerprint(const Mdp& mdp, const Policy& policy);

struct SweepCell {
  double p = 0.0;
  double a = 0.0;
  double optimal = 0.0;  // optimal value at the initial state
  std::string policy_id;
  std::vector<double> schemes;  // initial-state value per requested scheme
  double residual = 0.0;
};

struct SweepSpec {
  int segments = 4;
  Model model = Model::NoCC;
  GridSpec grid;
  std::vector<SchemeId> schemes;
  bool fingerprints = true;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct SweepResult {
  SweepSpec spec;
  std::vector<SweepCell> cells;  // p-major, a-minor
  std::map<std::string, PolicyFingerprint> legend;
};

// Solves every cell, warm-starting each cell from its neighbour in the same
// p row. Rows are distributed over worker threads; the result does not
// depend on the thread count. Throws InvalidArgument if a scheme does not
// apply to n (custom schemes are not supported here).
SweepResult run_sweep(const SweepSpec& spec);

struct ImpactPoint {
  double p = 0.0;
  double a = 0.0;
  double cc = 0.0;
  double nocc = 0.0;
  double ratio() const { return cc / nocc; }
};

struct ImpactResult {
  int segments = 0;
  GridSpec grid;
  std::vector<ImpactPoint> cells;  // p-major, a-minor
  ImpactPoint best;                // largest ratio seen, including refinement
  int refine_rounds = 0;
  std::size_t points_evaluated = 0;
};

// Optimal CC / NoCC waiting-time ratio over the grid. With refine_rounds > 0
// the maximum is then searched on successively finer 5x5 patches centred on
// the best point so far (half the spacing each round), clipped to the grid.
ImpactResult cc_impact(int segments, const GridSpec& grid, int refine_rounds = 0,
                       unsigned threads = 0);

struct ScalingPoint {
  int segments = 0;
  double optimal = 0.0;
};
std::vector<ScalingPoint> scaling(int n_min, int n_max, double p, double a, Model model);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// CSV and JSON sidecar writers.
std::string sweep_csv(const SweepResult& result);
std::string region_sidecar(const SweepResult& result);
std::string ratio_csv(const SweepResult& result, std::size_t scheme);
std::string ratio_sidecar(const SweepResult& result, std::size_t scheme);
std::string impact_csv(const ImpactResult& result);
std::string impact_sidecar(const ImpactResult& result);
std::string scaling_csv(const std::vector<ScalingPoint>& points);
std::string scaling_sidecar(const std::vector<ScalingPoint>& points, double p, double a,
                            Model model);

}  // namespace qrep
