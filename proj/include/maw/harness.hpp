#pragma once

// Experiment runner, runtime invariant monitors and bound certificates.

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "maw/field.hpp"
#include "maw/geometry.hpp"
#include "maw/walkers.hpp"

namespace maw {

// Geometry needed by the bounds and the potential monitor, computed once
// per (domain, r).
struct DomainAnalysis {
  int r = 0;
  DiameterResult diameter;
  Tessellation tessellation;
};

DomainAnalysis analyze(const Domain& domain, int r);

inline std::int64_t ceil_ratio(double d, int r) {
  // d is integral for L1/Linf; the slack keeps octile sums from rounding up.
  return static_cast<std::int64_t>(std::ceil(d / r - kDistTol));
}

struct BoundCertificate {
  double d = 0.0;
  bool d_exact = true;
  std::int64_t n = 0;
  int r = 0;
  std::int64_t ceil_d_r = 0;
  std::int64_t coverage_bound = 0;  // n*ceil(d/r) + 1
  std::int64_t revisit_bound = 0;   // 2n(ceil(d/r) + 1)
  std::size_t free_cells = 0;
  Metric metric = Metric::Linf;
  // Present when the initial field is not all zero.
  std::optional<Level> noise_max;
  std::optional<Level> noise_min;
  std::optional<std::int64_t> noisy_bound;  // n(M - m + ceil(d/r)) + 1

  // The bound that applies to a run: noisy if present, else coverage.
  std::int64_t applicable_bound() const { return noisy_bound.value_or(coverage_bound); }
};

// initial == nullptr or an all-zero field gives the clean certificate.
BoundCertificate bound_certificate(const Domain& domain, const DomainAnalysis& analysis,
                                   const PheromoneField* initial = nullptr);
BoundCertificate bound_certificate(const Domain& domain, int r, const PheromoneField* initial = nullptr);

std::string certificate_json(const BoundCertificate& cert);

enum class MonitorMode { Off, Sampled, Exhaustive };
MonitorMode parse_monitor_mode(std::string_view s);
std::string_view to_string(MonitorMode m);

struct ViolationCounts {
  std::int64_t proximity = 0;        // |s(a)-s(b)| <= 1 for d(a,b) <= r
  std::int64_t monotone = 0;         // levels never decrease
  std::int64_t global_gap = 0;       // max - min <= ceil(d/r)
  std::int64_t step_distance = 0;    // r <= move <= 2r
  std::int64_t potential_ge_t = 0;   // S_t >= t
  std::int64_t potential_increase = 0;  // S_{t+1} > S_t
  std::int64_t revisit = 0;          // max gap <= revisit bound

  // potential_increase only counts for a single robot on a clean field. With
  // several robots a step may raise the level under a resting robot, and with
  // noise a newly marked cell may lower a tile minimum; both are reported
  // but not totalled (see README).
  std::int64_t total(bool strict_increase) const {
    return proximity + monotone + global_gap + step_distance + potential_ge_t + revisit +
           (strict_increase ? potential_increase : 0);
  }
  ViolationCounts& operator+=(const ViolationCounts& o);
};

// Potential S_t = sum of per-tile minimum levels - sum of levels under the
// robots. In noisy runs tile minima range over robot-marked cells only and
// an unmarked tile counts 0.
class PotentialAudit {
 public:
  PotentialAudit(const Domain& domain, const Tessellation& tess, bool marked_only);

  // Full recomputation.
  std::int64_t compute(const SimState& state) const;
  // Incremental: refresh tiles containing `changed`, then evaluate.
  std::int64_t update(const SimState& state, std::span<const NodeId> changed);

 private:
  Level tile_min(const SimState& state, int tile) const;

  bool marked_only_;
  const Tessellation* tess_;
  std::vector<std::int64_t> offset_;
  std::vector<NodeId> members_;
  std::vector<Level> mins_;
  std::int64_t sum_ = 0;
  bool initialized_ = false;
};

// Runtime checks of the pheromone invariants. Call before_step() with the
// pre-step state and after_step() with the outcome.
class InvariantMonitor {
 public:
  struct Options {
    MonitorMode mode = MonitorMode::Sampled;
    int sampled_pairs = 16;
    bool noisy = false;         // restrict to robot-marked cells
    bool pheromone = true;      // false for the random walk
    std::uint64_t seed = 0;
  };

  InvariantMonitor(const Domain& domain, const Footprints& fp, const DomainAnalysis& analysis,
                   Options options);

  void start(const SimState& state);
  void before_step(const SimState& state, std::size_t robot);
  void after_step(const SimState& state, const StepOutcome& outcome);

  const ViolationCounts& violations() const noexcept { return v_; }
  // First step index whose S audit failed, -1 if none.
  Stamp first_potential_failure() const noexcept { return first_potential_failure_; }
  std::int64_t potential() const noexcept { return potential_; }

  // Exhaustive checks over the whole field; usable on any state.
  static std::int64_t count_proximity(const SimState& state, bool marked_only);
  static std::int64_t count_global_gap(const SimState& state, std::int64_t ceil_d_r);

 private:
  bool pair_ok(const SimState& s, NodeId a, NodeId b) const;

  const Domain* domain_;
  const Footprints* fp_;
  std::int64_t ceil_d_r_;
  Options opt_;
  Rng rng_;
  GeodesicSearch search_;
  PotentialAudit audit_;
  ViolationCounts v_;
  std::int64_t potential_ = 0;
  Level floor_ = 0;
  Stamp first_potential_failure_ = -1;

  // Pre-step snapshot.
  std::vector<NodeId> changed_;
  std::vector<Level> before_levels_;
  std::vector<char> before_marked_;
  LevelVector prev_levels_;
  FlagVector prev_marked_;
};

enum class Algorithm { Maw, RandomWalk };
std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);

struct ExperimentConfig {
  std::string domain_name = "domain";
  int r = 3;
  int robots = 1;
  Algorithm algorithm = Algorithm::Maw;
  TieBreakKind tie_break = TieBreakKind::SeededRandom;
  NoiseProfile noise;
  int runs = 100;
  std::uint64_t seed = 0;
  // 0 selects a default: the applicable bound for MAW, 50x it for the random walk.
  std::int64_t max_steps = 0;
  MonitorMode monitors = MonitorMode::Sampled;
  int monitor_pairs = 16;
  // Keep stepping this many revisit bounds past first coverage; 0 stops at coverage.
  double revisit_horizon = 0.0;
  int jobs = 1;
  std::vector<int> loop_labels;  // per node, for the adversarial tie-break

  // Called for run 0 every snapshot_every steps (and at t = 0).
  std::int64_t snapshot_every = 0;
  std::function<void(const SimState&)> on_snapshot;
  std::ostream* trace = nullptr;  // step log of run 0
};

struct RunResult {
  int run_index = 0;
  std::uint64_t seed = 0;
  bool covered = false;
  // Cover times count rounds (every robot activated once); with one robot a
  // round is a single step. The *_steps fields count activations.
  Stamp cover_time_swept = -1;
  Stamp cover_time_marked = -1;
  Stamp cover_steps_swept = -1;
  Stamp cover_steps_marked = -1;
  Stamp steps = 0;
  Stamp max_revisit_gap = 0;
  std::int64_t applicable_bound = 0;
  std::optional<Level> noise_max, noise_min;
  ViolationCounts violations;
  Stamp first_potential_failure = -1;
  std::int64_t violations_total = 0;
};

struct Summary {
  int runs = 0;
  int covered_runs = 0;
  double mean = 0, stddev = 0;
  Stamp min = 0, max = 0;
  double mean_marked = 0;
  Stamp max_revisit_gap = 0;
  std::int64_t violations_total = 0;
  ViolationCounts violations;
};

struct ExperimentReport {
  ExperimentConfig config;
  BoundCertificate certificate;  // clean certificate of the domain
  std::vector<RunResult> runs;
  Summary summary;

  bool all_covered() const { return summary.covered_runs == summary.runs; }
};

ExperimentReport run_experiment(const Domain& domain, const ExperimentConfig& config);
// Reuses a precomputed analysis of the same domain and radius.
ExperimentReport run_experiment(const Domain& domain, const DomainAnalysis& analysis,
                                const ExperimentConfig& config);

// A single run; exposed for tests.
RunResult run_once(const Domain& domain, const Footprints& fp, const DomainAnalysis& analysis,
                   const ExperimentConfig& config, int run_index);

Summary summarize(const std::vector<RunResult>& runs);

void write_results_csv(std::ostream& out, const ExperimentReport& report);
void write_summary_csv(std::ostream& out, const std::vector<ExperimentReport>& reports);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);
// Spearman rank correlation (average ranks for ties).
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace maw
