// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "maw/generators.hpp"
#include "maw/harness.hpp"

using namespace maw;

namespace {

constexpr int kRuns = 100;
constexpr double kRevisitHorizon = 3.0;
constexpr double kNoiseValueSpread = 0.10;
constexpr double kLoopsSlopeMin = 1.5;
constexpr double kLinearSlopeMax = 1.3;
constexpr double kRandomWalkRatio = 5.0;
constexpr int kLoopsRuns = 30;
constexpr int kScalingLayouts = 5;
constexpr int kScalingRuns = 30;

struct Named {
  std::string name;
  Domain domain;
  DomainAnalysis analysis;
};

Named preset(const std::string& name, std::uint64_t seed = 0) {
  GeneratedDomain g;
  if (!preset_domain(name, seed, g)) throw std::runtime_error("unknown preset " + name);
  Domain d(std::move(g.mask), Metric::Linf);
  DomainAnalysis a = analyze(d, 3);
  return {name, std::move(d), std::move(a)};
}

std::string artifacts(const ExperimentReport& rep) {
  std::ostringstream s;
  write_results_csv(s, rep);
  write_summary_csv(s, {rep});
  s << certificate_json(rep.certificate);
  return s.str();
}

// Experiments are recorded so that the determinism check can repeat them.
struct Recorded {
  const Named* domain;
  ExperimentConfig config;
  std::string bytes;
};
std::vector<Recorded> g_recorded;

ExperimentReport run(const Named& d, ExperimentConfig c) {
  c.domain_name = d.name;
  ExperimentReport rep = run_experiment(d.domain, d.analysis, c);
  g_recorded.push_back({&d, c, artifacts(rep)});
  return rep;
}

ExperimentConfig base(int runs = kRuns) {
  ExperimentConfig c;
  c.runs = runs;
  return c;
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Verdict {
  bool pass;
  std::string detail;
};

// ---------------------------------------------------------------------------

Verdict coverage_bound(const std::vector<const Named*>& domains) {
  bool ok = true;
  std::string detail;
  for (const Named* d : domains) {
    const ExperimentReport rep = run(*d, base());
    Stamp worst = 0;
    for (const RunResult& r : rep.runs) {
      if (!r.covered || r.cover_time_swept > rep.certificate.coverage_bound) ok = false;
      worst = std::max(worst, r.cover_time_swept);
    }
    if (!rep.all_covered()) ok = false;
    detail += fmt("%s %d/%d covered, max %lld <= %lld; ", d->name.c_str(), rep.summary.covered_runs,
                  rep.summary.runs, static_cast<long long>(worst),
                  static_cast<long long>(rep.certificate.coverage_bound));
  }
  return {ok, detail};
}

Verdict invariant_suite() {
  std::int64_t by_robots[2] = {0, 0};
  std::int64_t ge_t[2] = {0, 0};
  int runs = 0;
  for (int k = 0; k < 20; ++k) {
    const std::string name = "obstacles40_" + std::to_string(k);
    Domain dom(gen_scatter(40, 40, 1000 + static_cast<std::uint64_t>(k), 0.15, 1, 4), Metric::Linf);
    DomainAnalysis a = analyze(dom, 3);
    const Named d{name, std::move(dom), std::move(a)};
    for (int idx = 0; idx < 2; ++idx) {
      ExperimentConfig c = base(5);
      c.robots = idx == 0 ? 1 : 3;
      c.monitors = MonitorMode::Exhaustive;
      c.domain_name = name;
      const ExperimentReport rep = run_experiment(d.domain, d.analysis, c);
      for (const RunResult& r : rep.runs) {
        const ViolationCounts& v = r.violations;
        by_robots[idx] += v.proximity + v.monotone + v.global_gap + v.step_distance + v.potential_ge_t;
        if (c.robots == 1) by_robots[idx] += v.potential_increase;
        ge_t[idx] += v.potential_ge_t;
        ++runs;
      }
    }
  }
  const bool ok = by_robots[0] == 0 && by_robots[1] == 0;
  return {ok, fmt("%d runs; 1 robot: %lld violations; 3 robots: %lld violations (%lld of them S_t >= t)", runs,
                  static_cast<long long>(by_robots[0]), static_cast<long long>(by_robots[1]),
                  static_cast<long long>(ge_t[1]))};
}

Verdict repetitive(const std::vector<const Named*>& domains) {
  bool ok = true;
  std::string detail;
  for (const Named* d : domains) {
    ExperimentConfig c = base(3);
    c.revisit_horizon = kRevisitHorizon;
    const ExperimentReport rep = run(*d, c);
    Stamp worst = 0;
    std::int64_t exceptions = 0;
    for (const RunResult& r : rep.runs) {
      worst = std::max(worst, r.max_revisit_gap);
      if (r.max_revisit_gap > rep.certificate.revisit_bound) ++exceptions;
      if (!r.covered) ++exceptions;
    }
    ok = ok && exceptions == 0;
    detail += fmt("%s max gap %lld <= %lld (%lld exceptions); ", d->name.c_str(), static_cast<long long>(worst),
                  static_cast<long long>(rep.certificate.revisit_bound), static_cast<long long>(exceptions));
  }
  return {ok, detail};
}

Verdict noise_immunity(const Named& d) {
  std::int64_t over_bound = 0, prox = 0, mono = 0;
  int total = 0;
  std::string per;
  for (int i = 1; i <= 9; ++i) {
    ExperimentConfig c = base();
    c.noise = parse_noise(fmt("uniform:%.1f", i / 10.0));
    const ExperimentReport rep = run(d, c);
    std::int64_t p = 0;
    for (const RunResult& r : rep.runs) {
      if (!r.covered || r.cover_time_swept > r.applicable_bound) ++over_bound;
      p += r.violations.proximity;
      mono += r.violations.monotone;
      ++total;
    }
    prox += p;
    if (p > 0) per += fmt(" %.1f:%lld", i / 10.0, static_cast<long long>(p));
  }
  const bool ok = over_bound == 0 && prox == 0 && mono == 0;
  return {ok, fmt("%d runs on %s; over bound %lld; marked monotonicity %lld; marked proximity %lld%s%s", total,
                  d.name.c_str(), static_cast<long long>(over_bound), static_cast<long long>(mono),
                  static_cast<long long>(prox), per.empty() ? "" : " (by fraction", per.empty() ? "" : (per + ")").c_str())};
}

Verdict noise_value(const Named& d) {
  std::vector<double> values, constant, plateau;
  for (int v = 10; v <= 50; v += 10) {
    ExperimentConfig c = base();
    c.noise = parse_noise(fmt("const:%d:0.3", v));
    constant.push_back(run(d, c).summary.mean);
    c.noise = parse_noise(fmt("plateau:%d:0.3", v));
    plateau.push_back(run(d, c).summary.mean);
    values.push_back(v);
  }
  double spread = 0;
  for (std::size_t i = 0; i < constant.size(); ++i)
    for (std::size_t j = i + 1; j < constant.size(); ++j)
      spread = std::max(spread, std::abs(constant[i] - constant[j]) / std::min(constant[i], constant[j]));
  const double rho = spearman(values, plateau);
  const bool ok = spread < kNoiseValueSpread && rho > 0;
  std::string means = "const means";
  for (double m : constant) means += fmt(" %.0f", m);
  means += "; plateau means";
  for (double m : plateau) means += fmt(" %.0f", m);
  return {ok, fmt("max pairwise const difference %.2f%% < %.0f%%; plateau Spearman %.3f > 0; %s", 100 * spread,
                  100 * kNoiseValueSpread, rho, means.c_str())};
}

Verdict multi_robot(const std::vector<const Named*>& domains) {
  bool faster = true;
  std::int64_t ge_t = 0, steps_failed_runs = 0;
  std::string detail;
  for (const Named* d : domains) {
    const double one = run(*d, base()).summary.mean;
    ExperimentConfig c = base();
    c.robots = 5;
    const ExperimentReport five = run(*d, c);
    for (const RunResult& r : five.runs) {
      ge_t += r.violations.potential_ge_t;
      if (r.violations.potential_ge_t > 0) ++steps_failed_runs;
    }
    faster = faster && five.all_covered() && five.summary.mean < one;
    detail += fmt("%s k=1 %.0f, k=5 %.0f; ", d->name.c_str(), one, five.summary.mean);
  }
  const bool ok = faster && ge_t == 0;
  return {ok, detail + fmt("S_t >= t failed on %lld steps in %lld runs", static_cast<long long>(ge_t),
                           static_cast<long long>(steps_failed_runs))};
}

Verdict superlinearity() {
  std::vector<double> free, mean;
  for (int loops = 2; loops <= 10; ++loops) {
    const LoopsDomain l = gen_loops(loops, 3);
    Domain dom(l.mask, Metric::Linf);
    std::vector<int> labels = l.node_labels(dom);
    DomainAnalysis a = analyze(dom, 3);
    const Named d{"loops" + std::to_string(loops), std::move(dom), std::move(a)};
    ExperimentConfig c = base(kLoopsRuns);
    c.tie_break = TieBreakKind::AdversarialLoops;
    c.loop_labels = std::move(labels);
    c.domain_name = d.name;
    const ExperimentReport rep = run_experiment(d.domain, d.analysis, c);
    free.push_back(static_cast<double>(d.domain.free_count()));
    mean.push_back(rep.summary.mean);
  }
  const double worst = loglog_slope(free, mean);

  bool linear = true;
  std::string detail;
  for (const char* family : {"scatter", "rooms", "maze"}) {
    std::vector<double> fx, fy;
    for (int side : {50, 75, 100}) {
      std::vector<double> cells, times;
      for (int layout = 0; layout < kScalingLayouts; ++layout) {
        const Named d = preset(family + std::to_string(side), static_cast<std::uint64_t>(layout));
        ExperimentConfig c = base(kScalingRuns);
        c.seed = static_cast<std::uint64_t>(layout) * 1000;
        c.monitors = MonitorMode::Off;
        c.domain_name = d.name;
        cells.push_back(static_cast<double>(d.domain.free_count()));
        times.push_back(run_experiment(d.domain, d.analysis, c).summary.mean);
      }
      fx.push_back(mean_of(cells));
      fy.push_back(mean_of(times));
    }
    const double s = loglog_slope(fx, fy);
    linear = linear && s <= kLinearSlopeMax;
    detail += fmt(" %s %.2f", family, s);
  }
  return {worst >= kLoopsSlopeMin && linear,
          fmt("loops slope %.2f >= %.1f; random tie-break slopes%s (<= %.1f)", worst, kLoopsSlopeMin, detail.c_str(),
              kLinearSlopeMax)};
}

Verdict baseline(const Named& d) {
  const double maw = run(d, base()).summary.mean;
  ExperimentConfig c = base();
  c.algorithm = Algorithm::RandomWalk;
  c.monitors = MonitorMode::Off;
  const ExperimentReport rw = run(d, c);
  const double ratio = rw.summary.mean / maw;
  return {rw.all_covered() && ratio >= kRandomWalkRatio,
          fmt("%s random walk %.0f vs MAW %.0f: ratio %.1f >= %.0f (%d/%d walks covered)", d.name.c_str(),
              rw.summary.mean, maw, ratio, kRandomWalkRatio, rw.summary.covered_runs, rw.summary.runs)};
}

Verdict determinism() {
  int mismatched = 0;
  std::size_t bytes = 0;
  for (const Recorded& r : g_recorded) {
    const std::string again = artifacts(run_experiment(r.domain->domain, r.domain->analysis, r.config));
    if (again != r.bytes) ++mismatched;
    bytes += again.size();
  }
  return {mismatched == 0 && !g_recorded.empty(),
          fmt("%zu experiments repeated, %d differ (%zu bytes compared)", g_recorded.size(), mismatched, bytes)};
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const Named empty = preset("empty100");
  const Named scatter = preset("scatter100");
  const Named rooms = preset("rooms100");
  const Named maze = preset("maze100");

  struct Criterion {
    const char* title;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria = {
      {"coverage bound", [&] { return coverage_bound({&empty, &rooms, &maze}); }},
      {"invariant suite", [&] { return invariant_suite(); }},
      {"repetitive coverage", [&] { return repetitive({&empty, &maze}); }},
      {"noise immunity", [&] { return noise_immunity(scatter); }},
      {"noise-value insensitivity", [&] { return noise_value(scatter); }},
      {"multi-robot improvement", [&] { return multi_robot({&scatter, &rooms, &maze}); }},
      {"worst-case superlinearity", [&] { return superlinearity(); }},
      {"baseline ordering", [&] { return baseline(maze); }},
      {"determinism", [&] { return determinism(); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = clock::now();
    Verdict v;
    try {
      v = criteria[i].check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    if (!v.pass) ++failed;
    std::printf("%s %zu %s: %s [%.0fs]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].title, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
