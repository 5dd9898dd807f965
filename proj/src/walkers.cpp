#include "maw/walkers.hpp"

#include <algorithm>
#include <limits>

namespace maw {

Footprints::Footprints(const Domain& domain, int r) : r_(r) {
  if (r < 1) throw std::invalid_argument("robot radius must be >= 1");
  GeodesicSearch search(domain);
  const auto nodes = static_cast<NodeId>(domain.free_count());
  std::vector<NodeId> buf;
  for (NodeId n = 0; n < nodes; ++n) {
    search.run(n, 2.0 * r);
    auto emit = [&](Csr& csr, auto keep) {
      buf.clear();
      for (NodeId m : search.reached())
        if (keep(search.dist(m))) buf.push_back(m);
      std::sort(buf.begin(), buf.end());  // node order == scan order
      csr.data.insert(csr.data.end(), buf.begin(), buf.end());
      csr.offset.push_back(static_cast<std::int64_t>(csr.data.size()));
    };
    emit(disk_, [r](double d) { return within_open_disk(d, r); });
    emit(ring_, [r](double d) { return within_ring(d, r, 2.0 * r); });
    emit(near_, [r](double d) { return d > 0.0 && d <= r + kDistTol; });
  }
}

SimState make_state(const Domain& domain, const Footprints& footprints, PheromoneField field,
                    std::span<const NodeId> starts) {
  if (starts.empty()) throw std::invalid_argument("at least one robot is required");
  if (field.size() != domain.free_count()) throw std::invalid_argument("field does not match domain");
  SimState s;
  s.domain = &domain;
  s.footprints = &footprints;
  s.marked_count = static_cast<std::size_t>(field.robot_marked.count());
  s.field = std::move(field);
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (starts[i] < 0 || starts[i] >= static_cast<NodeId>(domain.free_count()))
      throw std::invalid_argument("robot start is not a free cell");
    s.robots.push_back({static_cast<int>(i), starts[i]});
  }
  s.swept = FlagVector::Constant(static_cast<Eigen::Index>(domain.free_count()), false);
  s.last_visit.assign(domain.free_count(), 0);
  s.max_gap.assign(domain.free_count(), 0);
  return s;
}

Stamp revisit_max_gap(const SimState& state) {
  Stamp best = 0;
  for (std::size_t i = 0; i < state.last_visit.size(); ++i)
    best = std::max({best, state.max_gap[i], state.t - state.last_visit[i]});
  return best;
}

std::string_view to_string(TieBreakKind k) {
  switch (k) {
    case TieBreakKind::SeededRandom: return "random";
    case TieBreakKind::ScanOrder: return "scan";
    case TieBreakKind::AdversarialLoops: return "adversarial";
  }
  return "?";
}

TieBreakKind parse_tie_break(std::string_view s) {
  if (s == "random") return TieBreakKind::SeededRandom;
  if (s == "scan") return TieBreakKind::ScanOrder;
  if (s == "adversarial") return TieBreakKind::AdversarialLoops;
  throw std::invalid_argument("unknown tie-break '" + std::string(s) + "'");
}

TieBreaker::TieBreaker(TieBreakKind kind, std::uint64_t seed)
    : kind_(kind), rng_(make_rng(seed, Stream::TieBreak)) {}

NodeId TieBreaker::choose(std::span<const NodeId> candidates, const SimState& state, std::size_t robot) {
  if (candidates.empty()) throw std::invalid_argument("tie-break over an empty candidate set");
  if (candidates.size() == 1) return candidates.front();
  switch (kind_) {
    case TieBreakKind::SeededRandom: return candidates[uniform_index(rng_, candidates.size())];
    case TieBreakKind::ScanOrder: return *std::min_element(candidates.begin(), candidates.end());
    case TieBreakKind::AdversarialLoops: return adversarial(candidates, state, robot);
  }
  return candidates.front();
}

NodeId TieBreaker::adversarial(std::span<const NodeId> candidates, const SimState& state, std::size_t robot) {
  if (heading_.size() < state.robots.size()) heading_.resize(state.robots.size(), Cell{0, 0});
  const Domain& domain = *state.domain;
  const Cell p = domain.cell(state.robots[robot].node);
  const Cell h = heading_[robot];

  // Fall back toward the oldest loop, then keep the current heading, then
  // scan order. Cells outside every loop rank last.
  NodeId best = candidates.front();
  std::tuple<int, long, NodeId> best_key{std::numeric_limits<int>::max(), 0, 0};
  for (NodeId c : candidates) {
    const Cell q = domain.cell(c);
    const int loop = c < static_cast<NodeId>(loop_of_.size()) ? loop_of_[c] : -1;
    const int rank = loop >= 0 ? loop : std::numeric_limits<int>::max() - 1;
    const long along = static_cast<long>(q.x - p.x) * h.x + static_cast<long>(q.y - p.y) * h.y;
    const std::tuple<int, long, NodeId> key{rank, -along, c};
    if (key < best_key) {
      best_key = key;
      best = c;
    }
  }
  const Cell q = domain.cell(best);
  heading_[robot] = {q.x - p.x, q.y - p.y};
  return best;
}

namespace {

void sweep(SimState& s, std::span<const NodeId> disk) {
  const Stamp now = s.t + 1;
  for (NodeId n : disk) {
    if (!s.swept(n)) {
      s.swept(n) = true;
      ++s.swept_count;
    }
    s.max_gap[n] = std::max(s.max_gap[n], now - s.last_visit[n]);
    s.last_visit[n] = now;
  }
}

// Handles the empty-ring case; returns true if the step was consumed.
bool degenerate_step(SimState& s, std::size_t robot, StepOutcome& out) {
  const NodeId here = s.robots[robot].node;
  const auto disk = s.footprints->disk(here);
  if (disk.size() != s.domain->free_count())
    throw DomainTooSmall("sensing ring is empty at (" + std::to_string(out.from.x) + "," +
                         std::to_string(out.from.y) + ") and the disk does not cover the domain");
  sweep(s, disk);
  ++s.t;
  out.moved_to = out.from;
  out.terminal = true;
  return true;
}

}  // namespace

StepOutcome maw_step(SimState& s, std::size_t robot, TieBreaker& tie) {
  const NodeId here = s.robots.at(robot).node;
  StepOutcome out;
  out.robot = robot;
  out.from = s.domain->cell(here);
  const auto ring = s.footprints->ring(here);
  if (ring.empty()) {
    degenerate_step(s, robot, out);
    return out;
  }

  // Argmin over the ring into scratch.
  Level lo = std::numeric_limits<Level>::max();
  s.scratch.clear();
  for (NodeId n : ring) {
    const Level v = s.field.level(n);
    if (v < lo) {
      lo = v;
      s.scratch.clear();
    }
    if (v == lo) s.scratch.push_back(n);
  }
  const NodeId target = tie.choose(s.scratch, s, robot);

  const auto disk = s.footprints->disk(here);
  if (s.field.level(here) <= s.field.level(target)) {
    out.marked = true;
    out.new_level = s.field.level(target) + 1;
    for (NodeId n : disk) s.marked_count += s.field.robot_marked(n) ? 0 : 1;
    mark_disk(s.field, disk, out.new_level);
  }
  sweep(s, disk);
  ++s.t;
  s.robots[robot].node = target;
  out.moved_to = s.domain->cell(target);
  return out;
}

StepOutcome random_walk_step(SimState& s, std::size_t robot, Rng& rng) {
  const NodeId here = s.robots.at(robot).node;
  StepOutcome out;
  out.robot = robot;
  out.from = s.domain->cell(here);
  const auto ring = s.footprints->ring(here);
  if (ring.empty()) {
    degenerate_step(s, robot, out);
    return out;
  }
  const NodeId target = ring[uniform_index(rng, ring.size())];
  sweep(s, s.footprints->disk(here));
  ++s.t;
  s.robots[robot].node = target;
  out.moved_to = s.domain->cell(target);
  return out;
}

StepOutcome multi_step(SimState& s, TieBreaker& tie) {
  const std::size_t robot = s.next_robot;
  s.next_robot = (s.next_robot + 1) % s.robots.size();
  return maw_step(s, robot, tie);
}

}  // namespace maw
