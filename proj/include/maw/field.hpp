#pragma once

// Pheromone levels per free cell, the marking primitive, and initial noise.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "maw/geometry.hpp"

namespace maw {

using Level = std::int64_t;
using LevelVector = Eigen::Array<Level, Eigen::Dynamic, 1>;
using FlagVector = Eigen::Array<bool, Eigen::Dynamic, 1>;

// Indexed by NodeId. Levels never saturate.
struct PheromoneField {
  LevelVector level;
  FlagVector robot_marked;

  PheromoneField() = default;
  explicit PheromoneField(std::size_t nodes)
      : level(LevelVector::Zero(static_cast<Eigen::Index>(nodes))),
        robot_marked(FlagVector::Constant(static_cast<Eigen::Index>(nodes), false)) {}

  std::size_t size() const noexcept { return static_cast<std::size_t>(level.size()); }
  Level operator[](NodeId n) const { return level(n); }
};

struct NoiseProfile {
  enum class Kind { None, UniformScatter, ConstScatter, Plateau };

  Kind kind = Kind::None;
  double fraction = 0.0;
  Level value = 1;    // const_scatter and plateau
  Level low = 1;      // uniform_scatter range, inclusive
  Level high = 10;

  bool noisy() const noexcept { return kind != Kind::None && fraction > 0.0; }
  // Throws std::invalid_argument on fraction outside [0,1] or values < 1.
  void validate() const;
};

// none | uniform:FRAC | const:VAL:FRAC | plateau:VAL:FRAC
NoiseProfile parse_noise(std::string_view spec);
std::string_view to_string(NoiseProfile::Kind k);

struct NoisyField {
  PheromoneField field;
  std::size_t target_cells = 0;    // floor(fraction * |free|)
  std::size_t noisy_cells = 0;     // cells actually written
  double achieved_fraction = 0.0;
};

// Scatter kinds choose floor(fraction*|free|) cells by partial Fisher-Yates on
// the row-major node list. Plateau fills the free cells of an axis-aligned
// rectangle grown from the free-cell centroid.
NoisyField init_field(const Domain& domain, const NoiseProfile& noise, std::uint64_t seed);

// Assigns (not accumulates) new_level and sets robot_marked.
void mark_disk(PheromoneField& field, std::span<const NodeId> nodes, Level new_level);
void mark_disk(PheromoneField& field, const Domain& domain, std::span<const Cell> cells, Level new_level);

struct MinResult {
  Level min = 0;
  std::vector<NodeId> argmin;  // in the order given
};

// Throws std::invalid_argument on an empty set.
MinResult min_over(const PheromoneField& field, std::span<const NodeId> nodes);

// Odor map: free-cell levels min-max scaled to 0..255, obstacles 0.
void write_field_pgm(std::ostream& out, const Domain& domain, const PheromoneField& field);
// Integer matrix, obstacles -1.
void write_field_csv(std::ostream& out, const Domain& domain, const PheromoneField& field);

}  // namespace maw
