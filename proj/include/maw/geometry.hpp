#pragma once

// Occupancy-grid domains and geodesic queries.
//
// A Domain is a rectangular grid of free/obstacle cells. Free cells are
// numbered densely in row-major order ("nodes"); all searches run on the
// node graph induced by the metric's adjacency:
//   L1       4-neighbour, unit cost
//   Linf     8-neighbour, unit cost
//   L2approx 8-neighbour, axis cost 1, diagonal cost sqrt(2)
// Diagonal moves are allowed regardless of the two orthogonal cells.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace maw {

enum class Metric { L1, L2Approx, Linf };

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view s);

struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
  // Scan order: least (y, x) first.
  friend std::strong_ordering operator<=>(const Cell& a, const Cell& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;
inline constexpr double kInf = std::numeric_limits<double>::infinity();
// Comparison slack for the non-integer metric.
inline constexpr double kDistTol = 1e-9;

template <typename Scalar>
using Grid = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using FreeMask = Grid<bool>;

class DomainError : public std::runtime_error {
 public:
  enum class Kind { NonRectangular, NoFreeCells, Disconnected, BadFormat, Io };
  DomainError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class Domain {
 public:
  // Throws DomainError if there is no free cell or the free set is disconnected.
  Domain(FreeMask free, Metric metric);

  int width() const noexcept { return static_cast<int>(free_.cols()); }
  int height() const noexcept { return static_cast<int>(free_.rows()); }
  Metric metric() const noexcept { return metric_; }
  const FreeMask& mask() const noexcept { return free_; }

  bool in_bounds(Cell c) const noexcept {
    return c.x >= 0 && c.y >= 0 && c.x < width() && c.y < height();
  }
  bool is_free(Cell c) const noexcept { return in_bounds(c) && free_(c.y, c.x); }

  std::size_t free_count() const noexcept { return cells_.size(); }
  // kNoNode for obstacles and out-of-bounds cells.
  NodeId node(Cell c) const noexcept {
    return in_bounds(c) ? node_of_[static_cast<std::size_t>(c.y) * width() + c.x] : kNoNode;
  }
  Cell cell(NodeId n) const noexcept { return cells_[static_cast<std::size_t>(n)]; }
  std::span<const Cell> cells() const noexcept { return cells_; }

  std::span<const NodeId> neighbors(NodeId n) const noexcept {
    return {adj_.data() + adj_offset_[n], adj_.data() + adj_offset_[n + 1]};
  }
  std::span<const double> neighbor_costs(NodeId n) const noexcept {
    return {adj_cost_.data() + adj_offset_[n], adj_cost_.data() + adj_offset_[n + 1]};
  }
  bool unit_costs() const noexcept { return metric_ != Metric::L2Approx; }

  Domain with_metric(Metric m) const { return Domain(free_, m); }

 private:
  FreeMask free_;
  Metric metric_;
  std::vector<Cell> cells_;
  std::vector<NodeId> node_of_;
  std::vector<std::int32_t> adj_offset_;
  std::vector<NodeId> adj_;
  std::vector<double> adj_cost_;
};

// '.' free, '#' obstacle; one row per line; trailing '\r' tolerated.
Domain parse_domain_text(std::string_view text, Metric metric);
// PGM (P2/P5): luminance >= 128 of 255 is free.
Domain parse_pgm(std::string_view bytes, Metric metric);
// Dispatches on the PGM magic number, otherwise parses the text format.
Domain load_domain(const std::filesystem::path& path, Metric metric);
std::string to_text(const Domain& domain);

// Reusable single-source shortest-path search over a domain's node graph.
// Results stay valid until the next run().
class GeodesicSearch {
 public:
  explicit GeodesicSearch(const Domain& domain);

  // Settles every node with distance <= cutoff (+tolerance).
  void run(NodeId source, double cutoff = kInf);

  // Nodes settled by the last run, in nondecreasing distance order.
  std::span<const NodeId> reached() const noexcept { return reached_; }
  double dist(NodeId n) const noexcept { return dist_[static_cast<std::size_t>(n)]; }
  double eccentricity() const noexcept { return reached_.empty() ? 0.0 : dist(reached_.back()); }

 private:
  const Domain* domain_;
  std::vector<double> dist_;
  std::vector<NodeId> reached_;
  std::vector<NodeId> queue_;
};

struct DistanceField {
  Cell source;
  Metric metric = Metric::Linf;
  Grid<double> dist;  // kInf on obstacles and beyond the cutoff

  double at(Cell c) const { return dist(c.y, c.x); }
};

// Throws std::invalid_argument if source is not free.
DistanceField geodesic_dist_field(const Domain& domain, Cell source,
                                  std::optional<double> cutoff = std::nullopt);

inline bool within_open_disk(double d, double r) { return d < r - kDistTol; }
inline bool within_ring(double d, double r1, double r2) {
  return d >= r1 - kDistTol && d <= r2 + kDistTol;
}

// Open disk: free cells at geodesic distance < r. Scan-ordered.
std::vector<Cell> disk_cells(const Domain& domain, Cell center, double r);
// Closed ring: free cells with r1 <= distance <= r2. Scan-ordered, may be empty.
std::vector<Cell> ring_cells(const Domain& domain, Cell center, double r1, double r2);

struct DiameterResult {
  double value = 0.0;
  bool exact = true;
};

// Exact all-pairs maximum of the geodesic distance.
DiameterResult diameter(const Domain& domain);
// Two-sweep lower bound; never exceeds the exact value.
DiameterResult diameter_two_sweep(const Domain& domain);

struct Tessellation {
  int r = 0;
  int count = 0;
  std::vector<std::int32_t> tile_of;  // per node; ids assigned in row-major order of first cell

  int tile_at(const Domain& domain, Cell c) const { return tile_of[domain.node(c)]; }
};

// Partition of the free cells into tiles of geodesic diameter < r, built from
// r x r blocks split into within-block components; components whose
// within-tile diameter is not < r are split into single cells.
Tessellation tessellate(const Domain& domain, int r);

// Geodesic diameter of a node subset measured inside the subset only.
double subset_diameter(const Domain& domain, std::span<const NodeId> nodes);

}  // namespace maw
