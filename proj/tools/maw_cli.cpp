// maw: command-line driver for the Mark-Ant-Walk coverage simulator.
//
//   maw run       run an experiment, write results/summary CSV and the certificate
//   maw bounds    print the bound certificate of a domain as JSON
//   maw gen       write a generated domain in the text format
//   maw snapshot  run one simulation and dump field snapshots (PGM + CSV)

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "maw/generators.hpp"
#include "maw/harness.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUncovered = 2;
constexpr int kExitViolations = 3;

struct DomainFlags {
  std::string domain;
  std::string gen;
  int width = 100;
  int height = 100;
  std::string metric = "linf";
  int r = 3;
  std::uint64_t seed = 0;

  void add(CLI::App& app) {
    auto* d = app.add_option("--domain", domain, "Domain file (text or PGM) or preset (empty100, maze75, ...)");
    auto* g = app.add_option("--gen", gen, "Generator: empty|scatter|rooms|maze|loops:N|star:K:LEN");
    d->excludes(g);
    app.add_option("--w,--width", width, "Generated domain width")->check(CLI::PositiveNumber);
    app.add_option("--h,--height", height, "Generated domain height")->check(CLI::PositiveNumber);
    app.add_option("--metric", metric, "l1|l2|linf")->check(CLI::IsMember({"l1", "l2", "linf"}));
    app.add_option("--r", r, "Robot radius in cells")->check(CLI::Range(1, 1000));
    app.add_option("--seed", seed, "Base seed");
  }

  struct Loaded {
    maw::Domain domain;
    std::string name;
    std::vector<int> loop_labels;
  };

  Loaded load() const {
    const maw::Metric m = maw::parse_metric(metric);
    if (!gen.empty()) {
      maw::GeneratedDomain g = maw::generate(gen, width, height, seed, r);
      maw::Domain dom(std::move(g.mask), m);
      std::vector<int> labels;
      if (!g.loop_of.empty()) {
        labels.assign(dom.free_count(), -1);
        for (std::size_t n = 0; n < labels.size(); ++n) {
          const maw::Cell c = dom.cell(static_cast<maw::NodeId>(n));
          labels[n] = g.loop_of[static_cast<std::size_t>(c.y) * dom.width() + c.x];
        }
      }
      return {std::move(dom), gen, std::move(labels)};
    }
    if (domain.empty()) throw std::invalid_argument("one of --domain or --gen is required");
    if (fs::exists(domain)) return {maw::load_domain(domain, m), fs::path(domain).filename().string(), {}};
    maw::GeneratedDomain g;
    if (maw::preset_domain(domain, seed, g)) return {maw::Domain(std::move(g.mask), m), domain, {}};
    throw maw::DomainError(maw::DomainError::Kind::Io, "no such domain file or preset: " + domain);
  }
};

struct RunFlags {
  int robots = 1;
  std::string algo = "maw";
  std::string tie = "random";
  std::string noise = "none";
  int runs = 100;
  std::int64_t max_steps = 0;
  std::string monitors = "sampled";
  int monitor_pairs = 16;
  double revisit_horizon = 0.0;
  std::int64_t snapshot_every = 0;
  std::string out = ".";
  std::string trace;
  int jobs = 1;

  void add(CLI::App& app) {
    app.add_option("--robots", robots, "Robot count")->check(CLI::Range(1, 10000));
    app.add_option("--algo", algo, "maw|random_walk")->check(CLI::IsMember({"maw", "random_walk"}));
    app.add_option("--tie", tie, "random|scan|adversarial")->check(CLI::IsMember({"random", "scan", "adversarial"}));
    app.add_option("--noise", noise, "none|uniform:FRAC|const:VAL:FRAC|plateau:VAL:FRAC");
    app.add_option("--runs", runs, "Number of runs")->check(CLI::Range(1, 1000000));
    app.add_option("--max-steps", max_steps, "Step cap per run (default: bound-derived)");
    app.add_option("--monitors", monitors, "all|sampled|off")->check(CLI::IsMember({"all", "sampled", "off"}));
    app.add_option("--monitor-pairs", monitor_pairs, "Random proximity pairs per step in sampled mode");
    app.add_option("--revisit-horizon", revisit_horizon, "Continue this many revisit bounds past coverage");
    app.add_option("--snapshot-every", snapshot_every, "Field snapshot period for run 0 (steps)");
    app.add_option("--out", out, "Output directory");
    app.add_option("--trace", trace, "Step trace CSV of run 0");
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1, 1024));
  }

  maw::ExperimentConfig config(const DomainFlags& d, const std::string& name) const {
    maw::ExperimentConfig c;
    c.domain_name = name;
    c.r = d.r;
    c.robots = robots;
    c.algorithm = maw::parse_algorithm(algo);
    c.tie_break = maw::parse_tie_break(tie);
    c.noise = maw::parse_noise(noise);
    c.runs = runs;
    c.seed = d.seed;
    c.max_steps = max_steps;
    c.monitors = maw::parse_monitor_mode(monitors);
    c.monitor_pairs = monitor_pairs;
    c.revisit_horizon = revisit_horizon;
    c.snapshot_every = snapshot_every;
    c.jobs = jobs;
    return c;
  }
};

void configure_logging() {
  const char* env = std::getenv("MAW_LOG");
  const std::string level = env ? env : "info";
  spdlog::set_level(spdlog::level::from_str(level));
  spdlog::set_pattern("[%l] %v");
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw maw::DomainError(maw::DomainError::Kind::Io, "cannot write " + path.string());
  return f;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw maw::DomainError(maw::DomainError::Kind::Io, "cannot create output directory " + dir.string());
}

void write_snapshot(const fs::path& dir, const maw::SimState& s) {
  char name[64];
  std::snprintf(name, sizeof name, "field_%08lld", static_cast<long long>(s.t));
  auto pgm = open_out(dir / (std::string(name) + ".pgm"));
  maw::write_field_pgm(pgm, *s.domain, s.field);
  auto csv = open_out(dir / (std::string(name) + ".csv"));
  maw::write_field_csv(csv, *s.domain, s.field);
}

int cmd_run(const DomainFlags& df, const RunFlags& rf) {
  const fs::path out(rf.out);
  ensure_dir(out);
  auto loaded = df.load();
  maw::ExperimentConfig cfg = rf.config(df, loaded.name);
  cfg.loop_labels = loaded.loop_labels;
  if (rf.snapshot_every > 0) cfg.on_snapshot = [&](const maw::SimState& s) { write_snapshot(out, s); };
  std::optional<std::ofstream> trace;
  if (!rf.trace.empty()) {
    trace = open_out(rf.trace);
    cfg.trace = &*trace;
  }

  spdlog::info("domain {} ({}x{}, {} free cells), {} runs", loaded.name, loaded.domain.width(),
               loaded.domain.height(), loaded.domain.free_count(), cfg.runs);
  const maw::ExperimentReport rep = maw::run_experiment(loaded.domain, cfg);

  auto results = open_out(out / "results.csv");
  maw::write_results_csv(results, rep);
  auto summary = open_out(out / "summary.csv");
  maw::write_summary_csv(summary, {rep});
  auto cert = open_out(out / "certificate.json");
  cert << maw::certificate_json(rep.certificate);

  const maw::Summary& s = rep.summary;
  std::cout << "covered " << s.covered_runs << "/" << s.runs << "  mean " << s.mean << "  std " << s.stddev
            << "  min " << s.min << "  max " << s.max << "  bound " << rep.certificate.coverage_bound
            << "  violations " << s.violations_total << "\n";
  if (!rep.all_covered()) {
    spdlog::warn("{} of {} runs did not cover the domain", s.runs - s.covered_runs, s.runs);
    return kExitUncovered;
  }
  if (s.violations_total > 0) {
    spdlog::warn("{} invariant violations", s.violations_total);
    return kExitViolations;
  }
  return kExitOk;
}

int cmd_bounds(const DomainFlags& df, const std::string& noise) {
  auto loaded = df.load();
  const maw::NoiseProfile profile = maw::parse_noise(noise);
  const maw::NoisyField init = maw::init_field(loaded.domain, profile, df.seed);
  std::cout << maw::certificate_json(maw::bound_certificate(loaded.domain, df.r, &init.field));
  return kExitOk;
}

int cmd_gen(const std::string& spec, int w, int h, std::uint64_t seed, int r, const std::string& out_path) {
  maw::GeneratedDomain g = maw::generate(spec, w, h, seed, r);
  const maw::Domain dom(std::move(g.mask), maw::Metric::Linf);
  if (out_path.empty() || out_path == "-") {
    std::cout << maw::to_text(dom);
  } else {
    auto f = open_out(out_path);
    f << maw::to_text(dom);
  }
  return kExitOk;
}

int cmd_snapshot(const DomainFlags& df, RunFlags rf) {
  rf.runs = 1;
  if (rf.snapshot_every <= 0) rf.snapshot_every = 1;
  return cmd_run(df, rf);
}

}  // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Mark-Ant-Walk coverage simulator"};
  app.require_subcommand(1);
  // -h/--h is the domain height.
  app.set_help_flag("--help", "Print this help message and exit");

  DomainFlags run_domain, bounds_domain, snap_domain;
  RunFlags run_flags, snap_flags;
  std::string bounds_noise = "none";

  auto* run = app.add_subcommand("run", "Run an experiment");
  run_domain.add(*run);
  run_flags.add(*run);

  auto* bounds = app.add_subcommand("bounds", "Print the bound certificate as JSON");
  bounds_domain.add(*bounds);
  bounds->add_option("--noise", bounds_noise, "Initial noise profile (realized with --seed)");

  std::string gen_spec, gen_out;
  int gen_w = 100, gen_h = 100, gen_r = 3;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "Write a generated domain");
  gen->add_option("spec", gen_spec, "empty|scatter|rooms|maze|loops:N|star:K:LEN")->required();
  gen->add_option("--w,--width", gen_w, "Width")->check(CLI::PositiveNumber);
  gen->add_option("--h,--height", gen_h, "Height")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--r", gen_r, "Radius used to size loop rings")->check(CLI::Range(1, 1000));
  gen->add_option("--out", gen_out, "Output file (default stdout)");

  auto* snap = app.add_subcommand("snapshot", "Run one simulation and write field snapshots");
  snap_domain.add(*snap);
  snap_flags.add(*snap);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run) return cmd_run(run_domain, run_flags);
    if (*bounds) return cmd_bounds(bounds_domain, bounds_noise);
    if (*gen) return cmd_gen(gen_spec, gen_w, gen_h, gen_seed, gen_r, gen_out);
    if (*snap) return cmd_snapshot(snap_domain, snap_flags);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitError;
  }
  return kExitError;
}
