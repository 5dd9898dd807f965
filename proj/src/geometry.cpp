#include "maw/geometry.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <queue>
#include <sstream>

namespace maw {

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::L1: return "l1";
    case Metric::L2Approx: return "l2";
    case Metric::Linf: return "linf";
  }
  return "?";
}

Metric parse_metric(std::string_view s) {
  if (s == "l1" || s == "L1") return Metric::L1;
  if (s == "l2" || s == "L2" || s == "l2approx") return Metric::L2Approx;
  if (s == "linf" || s == "Linf" || s == "LINF") return Metric::Linf;
  throw std::invalid_argument("unknown metric '" + std::string(s) + "'");
}

namespace {

struct Offset {
  int dx, dy;
  double cost;
};

std::span<const Offset> offsets(Metric m) {
  static const Offset four[] = {{1, 0, 1.0}, {-1, 0, 1.0}, {0, 1, 1.0}, {0, -1, 1.0}};
  static const Offset eight[] = {{1, 0, 1.0},  {-1, 0, 1.0}, {0, 1, 1.0},  {0, -1, 1.0},
                                 {1, 1, 1.0},  {1, -1, 1.0}, {-1, 1, 1.0}, {-1, -1, 1.0}};
  static const Offset octile[] = {
      {1, 0, 1.0},           {-1, 0, 1.0},           {0, 1, 1.0},           {0, -1, 1.0},
      {1, 1, std::sqrt(2.0)}, {1, -1, std::sqrt(2.0)}, {-1, 1, std::sqrt(2.0)}, {-1, -1, std::sqrt(2.0)}};
  switch (m) {
    case Metric::L1: return four;
    case Metric::Linf: return eight;
    case Metric::L2Approx: return octile;
  }
  return four;
}

}  // namespace

Domain::Domain(FreeMask free, Metric metric) : free_(std::move(free)), metric_(metric) {
  if (free_.rows() < 1 || free_.cols() < 1)
    throw DomainError(DomainError::Kind::NoFreeCells, "domain has zero width or height");
  const int w = width(), h = height();
  node_of_.assign(static_cast<std::size_t>(w) * h, kNoNode);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (free_(y, x)) {
        node_of_[static_cast<std::size_t>(y) * w + x] = static_cast<NodeId>(cells_.size());
        cells_.push_back({x, y});
      }
  if (cells_.empty()) throw DomainError(DomainError::Kind::NoFreeCells, "domain has no free cell");

  adj_offset_.reserve(cells_.size() + 1);
  adj_offset_.push_back(0);
  for (const Cell c : cells_) {
    for (const Offset& o : offsets(metric_)) {
      const NodeId n = node({c.x + o.dx, c.y + o.dy});
      if (n == kNoNode) continue;
      adj_.push_back(n);
      adj_cost_.push_back(o.cost);
    }
    adj_offset_.push_back(static_cast<std::int32_t>(adj_.size()));
  }

  // Single connected component.
  std::vector<char> seen(cells_.size(), 0);
  std::vector<NodeId> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    for (NodeId m : neighbors(n))
      if (!seen[m]) {
        seen[m] = 1;
        ++reached;
        stack.push_back(m);
      }
  }
  if (reached != cells_.size())
    throw DomainError(DomainError::Kind::Disconnected,
                      "free cells are disconnected (" + std::to_string(reached) + " of " +
                          std::to_string(cells_.size()) + " reachable from the first)");
}

Domain parse_domain_text(std::string_view text, Metric metric) {
  std::vector<std::string_view> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    rows.push_back(line);
    pos = end + 1;
  }
  while (!rows.empty() && rows.back().empty()) rows.pop_back();
  if (rows.empty()) throw DomainError(DomainError::Kind::NoFreeCells, "empty domain text");

  const std::size_t w = rows.front().size();
  FreeMask mask(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(w));
  for (std::size_t y = 0; y < rows.size(); ++y) {
    if (rows[y].size() != w)
      throw DomainError(DomainError::Kind::NonRectangular,
                        "row " + std::to_string(y) + " has " + std::to_string(rows[y].size()) +
                            " columns, expected " + std::to_string(w));
    for (std::size_t x = 0; x < w; ++x) {
      const char ch = rows[y][x];
      if (ch != '.' && ch != '#')
        throw DomainError(DomainError::Kind::BadFormat,
                          std::string("unexpected character '") + ch + "' at row " + std::to_string(y));
      mask(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) = (ch == '.');
    }
  }
  return Domain(std::move(mask), metric);
}

namespace {

// Reads the next whitespace-separated header token, skipping '#' comments.
bool next_pgm_token(std::string_view bytes, std::size_t& pos, std::string& out) {
  out.clear();
  while (pos < bytes.size()) {
    const char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])) && bytes[pos] != '#')
    out.push_back(bytes[pos++]);
  return !out.empty();
}

int parse_positive(const std::string& tok, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used == tok.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw DomainError(DomainError::Kind::BadFormat, std::string("bad PGM ") + what + " '" + tok + "'");
}

}  // namespace

Domain parse_pgm(std::string_view bytes, Metric metric) {
  std::size_t pos = 0;
  std::string tok;
  if (!next_pgm_token(bytes, pos, tok) || (tok != "P2" && tok != "P5"))
    throw DomainError(DomainError::Kind::BadFormat, "not a P2/P5 PGM");
  const bool binary = tok == "P5";
  next_pgm_token(bytes, pos, tok);
  const int w = parse_positive(tok, "width");
  next_pgm_token(bytes, pos, tok);
  const int h = parse_positive(tok, "height");
  next_pgm_token(bytes, pos, tok);
  const int maxval = parse_positive(tok, "maxval");
  if (maxval > 65535) throw DomainError(DomainError::Kind::BadFormat, "PGM maxval too large");

  FreeMask mask(h, w);
  auto classify = [&](long v) { return v * 255 >= 128L * maxval; };
  if (binary) {
    ++pos;  // single whitespace after maxval
    const std::size_t bpp = maxval < 256 ? 1 : 2;
    if (bytes.size() < pos + bpp * static_cast<std::size_t>(w) * h)
      throw DomainError(DomainError::Kind::BadFormat, "truncated P5 raster");
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        long v = static_cast<unsigned char>(bytes[pos++]);
        if (bpp == 2) v = (v << 8) | static_cast<unsigned char>(bytes[pos++]);
        mask(y, x) = classify(v);
      }
  } else {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        if (!next_pgm_token(bytes, pos, tok))
          throw DomainError(DomainError::Kind::BadFormat, "truncated P2 raster");
        mask(y, x) = classify(std::stol(tok));
      }
  }
  return Domain(std::move(mask), metric);
}

Domain load_domain(const std::filesystem::path& path, Metric metric) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError(DomainError::Kind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '2' || bytes[1] == '5'))
    return parse_pgm(bytes, metric);
  return parse_domain_text(bytes, metric);
}

std::string to_text(const Domain& domain) {
  std::string out;
  out.reserve(static_cast<std::size_t>(domain.width() + 1) * domain.height());
  for (int y = 0; y < domain.height(); ++y) {
    for (int x = 0; x < domain.width(); ++x) out.push_back(domain.mask()(y, x) ? '.' : '#');
    out.push_back('\n');
  }
  return out;
}

GeodesicSearch::GeodesicSearch(const Domain& domain)
    : domain_(&domain), dist_(domain.free_count(), kInf) {}

void GeodesicSearch::run(NodeId source, double cutoff) {
  for (NodeId n : queue_) dist_[n] = kInf;
  for (NodeId n : reached_) dist_[n] = kInf;
  queue_.clear();
  reached_.clear();
  const double limit = cutoff + kDistTol;

  if (domain_->unit_costs()) {
    queue_.push_back(source);
    dist_[source] = 0.0;
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const NodeId n = queue_[head];
      const double nd = dist_[n] + 1.0;
      if (nd > limit) continue;
      for (NodeId m : domain_->neighbors(n))
        if (dist_[m] == kInf) {
          dist_[m] = nd;
          queue_.push_back(m);
        }
    }
    // BFS pop order is already nondecreasing in distance.
    reached_.swap(queue_);
    return;
  }

  // Dijkstra; queue_ doubles as the list of touched nodes.
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist_[source] = 0.0;
  queue_.push_back(source);
  heap.push({0.0, source});
  while (!heap.empty()) {
    const auto [d, n] = heap.top();
    heap.pop();
    if (d > dist_[n]) continue;
    reached_.push_back(n);
    const auto nbrs = domain_->neighbors(n);
    const auto costs = domain_->neighbor_costs(n);
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      const NodeId m = nbrs[i];
      const double nd = d + costs[i];
      if (nd > limit || nd >= dist_[m]) continue;
      if (dist_[m] == kInf) queue_.push_back(m);
      dist_[m] = nd;
      heap.push({nd, m});
    }
  }
}

DistanceField geodesic_dist_field(const Domain& domain, Cell source, std::optional<double> cutoff) {
  const NodeId src = domain.node(source);
  if (src == kNoNode) throw std::invalid_argument("distance field source is not a free cell");
  GeodesicSearch search(domain);
  search.run(src, cutoff.value_or(kInf));
  DistanceField field{source, domain.metric(), Grid<double>::Constant(domain.height(), domain.width(), kInf)};
  for (NodeId n : search.reached()) {
    const Cell c = domain.cell(n);
    field.dist(c.y, c.x) = search.dist(n);
  }
  return field;
}

namespace {

template <typename Keep>
std::vector<Cell> collect(const Domain& domain, Cell center, double cutoff, Keep keep) {
  const NodeId src = domain.node(center);
  if (src == kNoNode) throw std::invalid_argument("center is not a free cell");
  GeodesicSearch search(domain);
  search.run(src, cutoff);
  std::vector<Cell> out;
  for (NodeId n : search.reached())
    if (keep(search.dist(n))) out.push_back(domain.cell(n));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<Cell> disk_cells(const Domain& domain, Cell center, double r) {
  if (r < 1.0) throw std::invalid_argument("disk radius must be >= 1");
  return collect(domain, center, r, [r](double d) { return within_open_disk(d, r); });
}

std::vector<Cell> ring_cells(const Domain& domain, Cell center, double r1, double r2) {
  if (!(r1 > 0.0) || r2 < r1) throw std::invalid_argument("ring requires 0 < r1 <= r2");
  return collect(domain, center, r2, [r1, r2](double d) { return within_ring(d, r1, r2); });
}

DiameterResult diameter(const Domain& domain) {
  GeodesicSearch search(domain);
  double best = 0.0;
  for (NodeId n = 0; n < static_cast<NodeId>(domain.free_count()); ++n) {
    search.run(n);
    best = std::max(best, search.eccentricity());
  }
  return {best, true};
}

DiameterResult diameter_two_sweep(const Domain& domain) {
  GeodesicSearch search(domain);
  search.run(0);
  const NodeId far = search.reached().back();
  search.run(far);
  return {search.eccentricity(), false};
}

double subset_diameter(const Domain& domain, std::span<const NodeId> nodes) {
  if (nodes.size() <= 1) return 0.0;
  // Small subsets only: local index map and Floyd-free repeated Dijkstra/BFS.
  std::vector<NodeId> sorted(nodes.begin(), nodes.end());
  std::sort(sorted.begin(), sorted.end());
  auto local = [&](NodeId n) -> int {
    auto it = std::lower_bound(sorted.begin(), sorted.end(), n);
    return (it != sorted.end() && *it == n) ? static_cast<int>(it - sorted.begin()) : -1;
  };
  const std::size_t k = sorted.size();
  double best = 0.0;
  std::vector<double> dist(k);
  for (std::size_t s = 0; s < k; ++s) {
    std::fill(dist.begin(), dist.end(), kInf);
    dist[s] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, static_cast<int>(s)});
    while (!heap.empty()) {
      const auto [d, i] = heap.top();
      heap.pop();
      if (d > dist[i]) continue;
      const auto nbrs = domain.neighbors(sorted[i]);
      const auto costs = domain.neighbor_costs(sorted[i]);
      for (std::size_t e = 0; e < nbrs.size(); ++e) {
        const int j = local(nbrs[e]);
        if (j < 0 || d + costs[e] >= dist[j]) continue;
        dist[j] = d + costs[e];
        heap.push({dist[j], j});
      }
    }
    for (double d : dist) best = std::max(best, d);
  }
  return best;
}

Tessellation tessellate(const Domain& domain, int r) {
  if (r < 1) throw std::invalid_argument("tessellation radius must be >= 1");
  const auto nodes = static_cast<NodeId>(domain.free_count());
  auto block_of = [&](NodeId n) {
    const Cell c = domain.cell(n);
    return std::pair{c.x / r, c.y / r};
  };

  // Provisional component labels; -1 unlabeled.
  std::vector<std::int32_t> comp(static_cast<std::size_t>(nodes), -1);
  std::vector<std::vector<NodeId>> members;
  for (NodeId seed = 0; seed < nodes; ++seed) {
    if (comp[seed] >= 0) continue;
    const auto block = block_of(seed);
    const auto id = static_cast<std::int32_t>(members.size());
    members.emplace_back();
    std::vector<NodeId> stack{seed};
    comp[seed] = id;
    while (!stack.empty()) {
      const NodeId n = stack.back();
      stack.pop_back();
      members[id].push_back(n);
      for (NodeId m : domain.neighbors(n))
        if (comp[m] < 0 && block_of(m) == block) {
          comp[m] = id;
          stack.push_back(m);
        }
    }
  }

  // Oversized components fall apart into singletons.
  std::vector<char> split(members.size(), 0);
  for (std::size_t i = 0; i < members.size(); ++i)
    if (!within_open_disk(subset_diameter(domain, members[i]), r)) split[i] = 1;

  Tessellation t;
  t.r = r;
  t.tile_of.assign(static_cast<std::size_t>(nodes), -1);
  std::vector<std::int32_t> comp_tile(members.size(), -1);
  for (NodeId n = 0; n < nodes; ++n) {  // row-major node order
    const auto c = comp[n];
    if (split[c]) {
      t.tile_of[n] = t.count++;
    } else {
      if (comp_tile[c] < 0) comp_tile[c] = t.count++;
      t.tile_of[n] = comp_tile[c];
    }
  }
  return t;
}

}  // namespace maw
