#include "maw/harness.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace maw {

DomainAnalysis analyze(const Domain& domain, int r) {
  if (r < 1) throw std::invalid_argument("radius must be >= 1");
  return {r, diameter(domain), tessellate(domain, r)};
}

BoundCertificate bound_certificate(const Domain& domain, const DomainAnalysis& a, const PheromoneField* initial) {
  BoundCertificate c;
  c.d = a.diameter.value;
  c.d_exact = a.diameter.exact;
  c.n = a.tessellation.count;
  c.r = a.r;
  c.ceil_d_r = ceil_ratio(c.d, c.r);
  c.coverage_bound = c.n * c.ceil_d_r + 1;
  c.revisit_bound = 2 * c.n * (c.ceil_d_r + 1);
  c.free_cells = domain.free_count();
  c.metric = domain.metric();
  if (initial && initial->size() > 0 && initial->level.maxCoeff() > 0) {
    c.noise_max = initial->level.maxCoeff();
    c.noise_min = initial->level.minCoeff();
    c.noisy_bound = c.n * (*c.noise_max - *c.noise_min + c.ceil_d_r) + 1;
  }
  return c;
}

BoundCertificate bound_certificate(const Domain& domain, int r, const PheromoneField* initial) {
  return bound_certificate(domain, analyze(domain, r), initial);
}

std::string certificate_json(const BoundCertificate& c) {
  nlohmann::ordered_json j;
  j["metric"] = std::string(to_string(c.metric));
  j["r"] = c.r;
  j["free_cells"] = c.free_cells;
  j["d"] = c.d;
  j["d_exact"] = c.d_exact;
  j["n"] = c.n;
  j["ceil_d_over_r"] = c.ceil_d_r;
  j["coverage_bound"] = c.coverage_bound;
  j["revisit_bound"] = c.revisit_bound;
  j["noise_max"] = c.noise_max ? nlohmann::ordered_json(*c.noise_max) : nlohmann::ordered_json(nullptr);
  j["noise_min"] = c.noise_min ? nlohmann::ordered_json(*c.noise_min) : nlohmann::ordered_json(nullptr);
  j["noisy_bound"] = c.noisy_bound ? nlohmann::ordered_json(*c.noisy_bound) : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

MonitorMode parse_monitor_mode(std::string_view s) {
  if (s == "off") return MonitorMode::Off;
  if (s == "sampled") return MonitorMode::Sampled;
  if (s == "all" || s == "exhaustive") return MonitorMode::Exhaustive;
  throw std::invalid_argument("unknown monitor mode '" + std::string(s) + "'");
}

std::string_view to_string(MonitorMode m) {
  switch (m) {
    case MonitorMode::Off: return "off";
    case MonitorMode::Sampled: return "sampled";
    case MonitorMode::Exhaustive: return "all";
  }
  return "?";
}

std::string_view to_string(Algorithm a) { return a == Algorithm::Maw ? "maw" : "random_walk"; }

Algorithm parse_algorithm(std::string_view s) {
  if (s == "maw") return Algorithm::Maw;
  if (s == "random_walk" || s == "rw") return Algorithm::RandomWalk;
  throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

ViolationCounts& ViolationCounts::operator+=(const ViolationCounts& o) {
  proximity += o.proximity;
  monotone += o.monotone;
  global_gap += o.global_gap;
  step_distance += o.step_distance;
  potential_ge_t += o.potential_ge_t;
  potential_increase += o.potential_increase;
  revisit += o.revisit;
  return *this;
}

// ---------------------------------------------------------------------------

PotentialAudit::PotentialAudit(const Domain& domain, const Tessellation& tess, bool marked_only)
    : marked_only_(marked_only), tess_(&tess) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(tess.count) + 1, 0);
  for (auto t : tess.tile_of) ++counts[static_cast<std::size_t>(t) + 1];
  offset_.assign(counts.size(), 0);
  std::partial_sum(counts.begin(), counts.end(), offset_.begin());
  members_.resize(domain.free_count());
  std::vector<std::int64_t> fill(offset_.begin(), offset_.end() - 1);
  for (NodeId n = 0; n < static_cast<NodeId>(domain.free_count()); ++n)
    members_[static_cast<std::size_t>(fill[tess.tile_of[n]]++)] = n;
  mins_.assign(static_cast<std::size_t>(tess.count), 0);
}

Level PotentialAudit::tile_min(const SimState& s, int tile) const {
  Level m = std::numeric_limits<Level>::max();
  bool any = false;
  for (auto i = offset_[tile]; i < offset_[tile + 1]; ++i) {
    const NodeId n = members_[static_cast<std::size_t>(i)];
    if (marked_only_ && !s.field.robot_marked(n)) continue;
    m = std::min(m, s.field.level(n));
    any = true;
  }
  return any ? m : 0;
}

std::int64_t PotentialAudit::compute(const SimState& s) const {
  std::int64_t sum = 0;
  for (int tile = 0; tile < tess_->count; ++tile) sum += tile_min(s, tile);
  for (const Robot& robot : s.robots) sum -= s.field.level(robot.node);
  return sum;
}

std::int64_t PotentialAudit::update(const SimState& s, std::span<const NodeId> changed) {
  if (!initialized_) {
    initialized_ = true;
    for (int tile = 0; tile < tess_->count; ++tile) {
      mins_[static_cast<std::size_t>(tile)] = tile_min(s, tile);
      sum_ += mins_[static_cast<std::size_t>(tile)];
    }
  }
  for (NodeId n : changed) {
    const int tile = tess_->tile_of[n];
    const Level m = tile_min(s, tile);
    sum_ += m - mins_[static_cast<std::size_t>(tile)];
    mins_[static_cast<std::size_t>(tile)] = m;
  }
  std::int64_t out = sum_;
  for (const Robot& robot : s.robots) out -= s.field.level(robot.node);
  return out;
}

// ---------------------------------------------------------------------------

InvariantMonitor::InvariantMonitor(const Domain& domain, const Footprints& fp, const DomainAnalysis& analysis,
                                   Options options)
    : domain_(&domain),
      fp_(&fp),
      ceil_d_r_(ceil_ratio(analysis.diameter.value, analysis.r)),
      opt_(options),
      rng_(make_rng(options.seed, Stream::Monitor)),
      search_(domain),
      audit_(domain, analysis.tessellation, options.noisy) {}

bool InvariantMonitor::pair_ok(const SimState& s, NodeId a, NodeId b) const {
  if (opt_.noisy && !(s.field.robot_marked(a) && s.field.robot_marked(b))) return true;
  const Level d = s.field.level(a) - s.field.level(b);
  return d >= -1 && d <= 1;
}

std::int64_t InvariantMonitor::count_proximity(const SimState& s, bool marked_only) {
  std::int64_t bad = 0;
  const auto nodes = static_cast<NodeId>(s.domain->free_count());
  for (NodeId a = 0; a < nodes; ++a) {
    if (marked_only && !s.field.robot_marked(a)) continue;
    const Level la = s.field.level(a);
    for (NodeId b : s.footprints->near(a)) {
      if (b <= a || (marked_only && !s.field.robot_marked(b))) continue;
      const Level d = la - s.field.level(b);
      if (d < -1 || d > 1) ++bad;
    }
  }
  return bad;
}

std::int64_t InvariantMonitor::count_global_gap(const SimState& s, std::int64_t ceil_d_r) {
  return (s.field.level.maxCoeff() - s.field.level.minCoeff() > ceil_d_r) ? 1 : 0;
}

void InvariantMonitor::start(const SimState& s) {
  if (opt_.mode == MonitorMode::Off || !opt_.pheromone) return;
  v_.proximity += count_proximity(s, opt_.noisy);
  if (!opt_.noisy) v_.global_gap += count_global_gap(s, ceil_d_r_);
  floor_ = s.field.level.minCoeff();
  potential_ = opt_.mode == MonitorMode::Exhaustive ? audit_.compute(s) : audit_.update(s, {});
  if (potential_ < s.t) {
    ++v_.potential_ge_t;
    if (first_potential_failure_ < 0) first_potential_failure_ = s.t;
  }
}

void InvariantMonitor::before_step(const SimState& s, std::size_t robot) {
  if (opt_.mode == MonitorMode::Off || !opt_.pheromone) return;
  const auto disk = fp_->disk(s.robots[robot].node);
  changed_.assign(disk.begin(), disk.end());
  before_levels_.clear();
  before_marked_.clear();
  for (NodeId n : changed_) {
    before_levels_.push_back(s.field.level(n));
    before_marked_.push_back(s.field.robot_marked(n) ? 1 : 0);
  }
  if (opt_.mode == MonitorMode::Exhaustive) {
    prev_levels_ = s.field.level;
    prev_marked_ = s.field.robot_marked;
  }
}

void InvariantMonitor::after_step(const SimState& s, const StepOutcome& out) {
  if (opt_.mode == MonitorMode::Off) return;
  const int r = fp_->r();
  if (!out.terminal) {
    search_.run(domain_->node(out.from), 2.0 * r);
    if (!within_ring(search_.dist(domain_->node(out.moved_to)), r, 2.0 * r)) ++v_.step_distance;
  }
  if (!opt_.pheromone) return;

  if (opt_.mode == MonitorMode::Exhaustive) {
    for (Eigen::Index i = 0; i < s.field.level.size(); ++i)
      if ((!opt_.noisy || prev_marked_(i)) && s.field.level(i) < prev_levels_(i)) ++v_.monotone;
    v_.proximity += count_proximity(s, opt_.noisy);
  } else {
    for (std::size_t i = 0; i < changed_.size(); ++i)
      if ((!opt_.noisy || before_marked_[i]) && s.field.level(changed_[i]) < before_levels_[i]) ++v_.monotone;
    // Only pairs touching a changed cell can have changed status.
    for (NodeId a : changed_)
      for (NodeId b : fp_->near(a))
        if (!pair_ok(s, a, b)) ++v_.proximity;
    const auto nodes = domain_->free_count();
    for (int k = 0; k < opt_.sampled_pairs; ++k) {
      const auto a = static_cast<NodeId>(uniform_index(rng_, nodes));
      const auto near = fp_->near(a);
      if (near.empty()) continue;
      if (!pair_ok(s, a, near[uniform_index(rng_, near.size())])) ++v_.proximity;
    }
  }
  if (!opt_.noisy) {
    if (opt_.mode == MonitorMode::Exhaustive) {
      v_.global_gap += count_global_gap(s, ceil_d_r_);
    } else if (out.marked) {
      // Levels only rise on a clean field, so floor_ stays a lower bound on
      // the minimum; rescan only when it is too low to certify the new level.
      if (out.new_level - floor_ > ceil_d_r_) floor_ = s.field.level.minCoeff();
      if (out.new_level - floor_ > ceil_d_r_) ++v_.global_gap;
    }
  }

  const std::int64_t next =
      opt_.mode == MonitorMode::Exhaustive ? audit_.compute(s) : audit_.update(s, changed_);
  bool failed = false;
  if (!out.terminal && next <= potential_) {
    ++v_.potential_increase;
    failed = true;
  }
  if (!out.terminal && next < s.t) {
    ++v_.potential_ge_t;
    failed = true;
  }
  if (failed && first_potential_failure_ < 0) first_potential_failure_ = s.t;
  potential_ = next;
}

// ---------------------------------------------------------------------------

namespace {

void write_trace_header(std::ostream& out) { out << "t,robot_id,x,y,marked,new_level\n"; }

void write_trace_line(std::ostream& out, const SimState& s, const StepOutcome& o) {
  out << s.t << ',' << o.robot << ',' << o.from.x << ',' << o.from.y << ',' << (o.marked ? 1 : 0) << ','
      << (o.marked ? o.new_level : 0) << '\n';
}

}  // namespace

RunResult run_once(const Domain& domain, const Footprints& fp, const DomainAnalysis& analysis,
                   const ExperimentConfig& cfg, int run_index) {
  RunResult res;
  res.run_index = run_index;
  res.seed = cfg.seed + static_cast<std::uint64_t>(run_index);

  NoisyField init = init_field(domain, cfg.noise, res.seed);
  const bool noisy = init.field.level.maxCoeff() > 0;
  const BoundCertificate cert = bound_certificate(domain, analysis, &init.field);
  res.applicable_bound = cert.applicable_bound();
  res.noise_max = cert.noise_max;
  res.noise_min = cert.noise_min;

  // Clean runs start anywhere; noisy runs start on a minimal-level cell.
  std::vector<NodeId> candidates;
  const Level floor_level = init.field.level.minCoeff();
  for (NodeId n = 0; n < static_cast<NodeId>(domain.free_count()); ++n)
    if (init.field.level(n) == floor_level) candidates.push_back(n);
  Rng start_rng = make_rng(res.seed, Stream::Start);
  std::vector<NodeId> starts;
  for (int i = 0; i < cfg.robots; ++i) starts.push_back(candidates[uniform_index(start_rng, candidates.size())]);

  SimState state = make_state(domain, fp, std::move(init.field), starts);
  TieBreaker tie(cfg.tie_break, res.seed);
  if (!cfg.loop_labels.empty()) tie.set_loop_labels(cfg.loop_labels);
  Rng walk_rng = make_rng(res.seed, Stream::Walk);

  const bool maw = cfg.algorithm == Algorithm::Maw;
  InvariantMonitor monitor(domain, fp, analysis,
                           {cfg.monitors, cfg.monitor_pairs, noisy, maw, res.seed});
  monitor.start(state);

  const std::int64_t default_cap = maw ? res.applicable_bound : 50 * res.applicable_bound;
  const std::int64_t cap = cfg.max_steps > 0 ? cfg.max_steps
                                             : default_cap + static_cast<std::int64_t>(std::ceil(
                                                                 cfg.revisit_horizon * cert.revisit_bound));
  std::int64_t limit = cap;

  const bool log_run = run_index == 0;
  if (log_run && cfg.trace) write_trace_header(*cfg.trace);
  if (log_run && cfg.on_snapshot && cfg.snapshot_every > 0) cfg.on_snapshot(state);

  while (state.t < limit) {
    const std::size_t robot = state.next_robot;
    monitor.before_step(state, robot);
    StepOutcome out;
    if (maw) {
      out = multi_step(state, tie);
    } else {
      state.next_robot = (state.next_robot + 1) % state.robots.size();
      out = random_walk_step(state, robot, walk_rng);
    }
    monitor.after_step(state, out);
    if (log_run && cfg.trace) write_trace_line(*cfg.trace, state, out);
    if (log_run && cfg.on_snapshot && cfg.snapshot_every > 0 && state.t % cfg.snapshot_every == 0)
      cfg.on_snapshot(state);

    if (res.cover_steps_swept < 0 && state.covered()) {
      res.cover_steps_swept = state.t;
      if (cfg.revisit_horizon > 0)
        limit = std::min(cap, state.t + static_cast<std::int64_t>(std::ceil(cfg.revisit_horizon * cert.revisit_bound)));
    }
    if (res.cover_steps_marked < 0 && state.fully_marked()) res.cover_steps_marked = state.t;
    // A terminal step never marks, so it ends the run once the domain is swept.
    if (cfg.revisit_horizon <= 0 && res.cover_steps_swept >= 0 && (res.cover_steps_marked >= 0 || !maw || out.terminal))
      break;
  }

  const auto to_rounds = [k = cfg.robots](Stamp s) { return s < 0 ? s : (s + k - 1) / k; };
  res.cover_time_swept = to_rounds(res.cover_steps_swept);
  res.cover_time_marked = to_rounds(res.cover_steps_marked);
  res.covered = res.cover_steps_swept >= 0;
  res.steps = state.t;
  res.max_revisit_gap = revisit_max_gap(state);
  res.violations = monitor.violations();
  if (maw && !noisy && cfg.revisit_horizon > 0 && res.max_revisit_gap > cert.revisit_bound) res.violations.revisit = 1;
  res.first_potential_failure = monitor.first_potential_failure();
  res.violations_total = res.violations.total(cfg.robots == 1 && !noisy);
  return res;
}

Summary summarize(const std::vector<RunResult>& runs) {
  Summary s;
  s.runs = static_cast<int>(runs.size());
  std::vector<double> times;
  double marked_sum = 0;
  int marked_n = 0;
  for (const RunResult& r : runs) {
    if (r.covered) times.push_back(static_cast<double>(r.cover_time_swept));
    if (r.cover_time_marked >= 0) {
      marked_sum += static_cast<double>(r.cover_time_marked);
      ++marked_n;
    }
    s.max_revisit_gap = std::max(s.max_revisit_gap, r.max_revisit_gap);
    s.violations += r.violations;
    s.violations_total += r.violations_total;
  }
  s.covered_runs = static_cast<int>(times.size());
  if (!times.empty()) {
    const Eigen::Map<const Eigen::ArrayXd> t(times.data(), static_cast<Eigen::Index>(times.size()));
    s.mean = t.mean();
    s.stddev = times.size() > 1 ? std::sqrt((t - s.mean).square().sum() / static_cast<double>(times.size() - 1)) : 0.0;
    s.min = static_cast<Stamp>(t.minCoeff());
    s.max = static_cast<Stamp>(t.maxCoeff());
  }
  s.mean_marked = marked_n ? marked_sum / marked_n : 0.0;
  return s;
}

ExperimentReport run_experiment(const Domain& domain, const ExperimentConfig& config) {
  return run_experiment(domain, analyze(domain, config.r), config);
}

ExperimentReport run_experiment(const Domain& domain, const DomainAnalysis& analysis, const ExperimentConfig& config) {
  if (config.r < 1 || config.robots < 1 || config.runs < 1)
    throw std::invalid_argument("experiment needs r >= 1, robots >= 1 and runs >= 1");
  if (analysis.r != config.r) throw std::invalid_argument("analysis radius does not match the config");
  config.noise.validate();

  ExperimentReport report;
  report.config = config;
  report.config.on_snapshot = nullptr;
  report.config.trace = nullptr;
  report.certificate = bound_certificate(domain, analysis);
  const Footprints fp(domain, config.r);
  report.runs.resize(static_cast<std::size_t>(config.runs));

  // Results are keyed by run index, so scheduling does not affect output.
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < config.runs; i = next++) {
      try {
        report.runs[static_cast<std::size_t>(i)] = run_once(domain, fp, analysis, config, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int jobs = std::clamp(config.jobs, 1, config.runs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  report.summary = summarize(report.runs);
  return report;
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string noise_value(const NoiseProfile& p) {
  switch (p.kind) {
    case NoiseProfile::Kind::None: return "0";
    case NoiseProfile::Kind::UniformScatter: return std::to_string(p.low) + "-" + std::to_string(p.high);
    default: return std::to_string(p.value);
  }
}

}  // namespace

void write_results_csv(std::ostream& out, const ExperimentReport& rep) {
  const ExperimentConfig& c = rep.config;
  out << "run_index,seed,algorithm,robots,noise_kind,noise_fraction,noise_value,cover_time_swept,"
         "cover_time_marked,max_revisit_gap,violations_total\n";
  for (const RunResult& r : rep.runs) {
    out << r.run_index << ',' << r.seed << ',' << to_string(c.algorithm) << ',' << c.robots << ','
        << to_string(c.noise.kind) << ',' << fmt("%g", c.noise.fraction) << ',' << noise_value(c.noise) << ','
        << r.cover_time_swept << ',' << r.cover_time_marked << ',' << r.max_revisit_gap << ','
        << r.violations_total << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<ExperimentReport>& reports) {
  out << "domain,algorithm,robots,tie_break,noise_kind,noise_fraction,noise_value,runs,covered_runs,"
         "mean_cover_time,std_cover_time,min_cover_time,max_cover_time,mean_cover_time_marked,"
         "max_revisit_gap,violations_total,coverage_bound\n";
  for (const ExperimentReport& rep : reports) {
    const ExperimentConfig& c = rep.config;
    const Summary& s = rep.summary;
    out << c.domain_name << ',' << to_string(c.algorithm) << ',' << c.robots << ',' << to_string(c.tie_break)
        << ',' << to_string(c.noise.kind) << ',' << fmt("%g", c.noise.fraction) << ',' << noise_value(c.noise)
        << ',' << s.runs << ',' << s.covered_runs << ',' << fmt("%.3f", s.mean) << ',' << fmt("%.3f", s.stddev)
        << ',' << s.min << ',' << s.max << ',' << fmt("%.3f", s.mean_marked) << ',' << s.max_revisit_gap << ','
        << s.violations_total << ',' << rep.certificate.coverage_bound << '\n';
  }
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope needs >= 2 paired points");
  Eigen::ArrayXd lx(static_cast<Eigen::Index>(x.size())), ly(lx.size());
  for (Eigen::Index i = 0; i < lx.size(); ++i) {
    lx(i) = std::log(x[static_cast<std::size_t>(i)]);
    ly(i) = std::log(y[static_cast<std::size_t>(i)]);
  }
  const Eigen::ArrayXd dx = lx - lx.mean();
  return (dx * (ly - ly.mean())).sum() / dx.square().sum();
}

namespace {

Eigen::ArrayXd ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  Eigen::ArrayXd r(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r(static_cast<Eigen::Index>(idx[k])) = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman needs >= 2 paired points");
  const Eigen::ArrayXd rx = ranks(x), ry = ranks(y);
  const Eigen::ArrayXd dx = rx - rx.mean(), dy = ry - ry.mean();
  const double denom = std::sqrt(dx.square().sum() * dy.square().sum());
  return denom == 0.0 ? 0.0 : (dx * dy).sum() / denom;
}

}  // namespace maw
