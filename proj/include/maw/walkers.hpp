#pragma once

// Robot state and the step rules: Mark-Ant-Walk, the ring-restricted random
// walk baseline, and the sequential round-robin scheduler.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "maw/field.hpp"
#include "maw/geometry.hpp"
#include "maw/random.hpp"

namespace maw {

// Per-node effector disk (d < r), sensing ring (r <= d <= 2r) and proximity
// neighbourhood (0 < d <= r), precomputed for one radius.
class Footprints {
 public:
  Footprints(const Domain& domain, int r);

  int r() const noexcept { return r_; }
  std::span<const NodeId> disk(NodeId n) const noexcept { return slice(disk_, n); }
  std::span<const NodeId> ring(NodeId n) const noexcept { return slice(ring_, n); }
  std::span<const NodeId> near(NodeId n) const noexcept { return slice(near_, n); }

 private:
  struct Csr {
    std::vector<std::int64_t> offset{0};
    std::vector<NodeId> data;
  };
  static std::span<const NodeId> slice(const Csr& c, NodeId n) noexcept {
    return {c.data.data() + c.offset[n], c.data.data() + c.offset[n + 1]};
  }

  int r_;
  Csr disk_, ring_, near_;
};

struct Robot {
  int id = 0;
  NodeId node = kNoNode;
};

using Stamp = std::int64_t;

// One simulation. Step stamps are 1-based: step k sweeps at stamp k.
struct SimState {
  const Domain* domain = nullptr;
  const Footprints* footprints = nullptr;
  PheromoneField field;
  std::vector<Robot> robots;
  Stamp t = 0;
  std::size_t next_robot = 0;

  FlagVector swept;
  std::size_t swept_count = 0;
  std::size_t marked_count = 0;
  std::vector<Stamp> last_visit;  // 0 until first sweep
  std::vector<Stamp> max_gap;     // largest gap between consecutive sweeps (from 0)

  std::vector<NodeId> scratch;

  int r() const noexcept { return footprints->r(); }
  Cell position(std::size_t robot) const { return domain->cell(robots[robot].node); }
  bool covered() const noexcept { return swept_count == domain->free_count(); }
  bool fully_marked() const noexcept { return marked_count == domain->free_count(); }
};

SimState make_state(const Domain& domain, const Footprints& footprints, PheromoneField field,
                    std::span<const NodeId> starts);

// Largest revisit gap over all free cells, counting the open gap from each
// cell's last sweep to the current time.
Stamp revisit_max_gap(const SimState& state);

enum class TieBreakKind { SeededRandom, ScanOrder, AdversarialLoops };

std::string_view to_string(TieBreakKind k);
TieBreakKind parse_tie_break(std::string_view s);

// Picks one ring cell among equal minima. Deterministic given the seed and
// the sequence of calls.
class TieBreaker {
 public:
  TieBreaker(TieBreakKind kind, std::uint64_t seed);

  // Loop membership per node for the adversarial rule (-1 outside any loop).
  // Without labels the adversarial rule falls back to its heading preference.
  void set_loop_labels(std::vector<int> labels) { loop_of_ = std::move(labels); }

  NodeId choose(std::span<const NodeId> candidates, const SimState& state, std::size_t robot);
  TieBreakKind kind() const noexcept { return kind_; }

 private:
  NodeId adversarial(std::span<const NodeId> candidates, const SimState& state, std::size_t robot);

  TieBreakKind kind_;
  Rng rng_;
  std::vector<int> loop_of_;
  std::vector<Cell> heading_;  // last displacement per robot
};

class DomainTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StepOutcome {
  std::size_t robot = 0;
  Cell from;
  Cell moved_to;
  bool marked = false;
  Level new_level = 0;
  // Empty ring with the whole domain inside the disk: swept in place.
  bool terminal = false;
};

// Mark-Ant-Walk step for one robot. Throws DomainTooSmall when the sensing
// ring is empty but the disk does not hold the whole domain.
StepOutcome maw_step(SimState& state, std::size_t robot, TieBreaker& tie);

// Uniform move to a ring cell; sweeps but never writes pheromone.
StepOutcome random_walk_step(SimState& state, std::size_t robot, Rng& rng);

// Activates the next robot in id order with the Mark-Ant-Walk rule.
StepOutcome multi_step(SimState& state, TieBreaker& tie);

}  // namespace maw
