#include "maw/field.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "maw/random.hpp"

namespace maw {

std::string_view to_string(NoiseProfile::Kind k) {
  switch (k) {
    case NoiseProfile::Kind::None: return "none";
    case NoiseProfile::Kind::UniformScatter: return "uniform";
    case NoiseProfile::Kind::ConstScatter: return "const";
    case NoiseProfile::Kind::Plateau: return "plateau";
  }
  return "?";
}

void NoiseProfile::validate() const {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("noise fraction must lie in [0,1]");
  if (kind == Kind::UniformScatter && (low < 1 || high < low))
    throw std::invalid_argument("uniform noise range must satisfy 1 <= low <= high");
  if ((kind == Kind::ConstScatter || kind == Kind::Plateau) && value < 1)
    throw std::invalid_argument("noise value must be >= 1");
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t end = s.find(sep, pos);
    parts.push_back(s.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  return parts;
}

double to_double(std::string_view s) {
  std::size_t used = 0;
  const std::string str(s);
  double v = 0;
  try {
    v = std::stod(str, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != str.size() || str.empty()) throw std::invalid_argument("bad number '" + str + "'");
  return v;
}

Level to_level(std::string_view s) {
  Level v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument("bad integer '" + std::string(s) + "'");
  return v;
}

}  // namespace

NoiseProfile parse_noise(std::string_view spec) {
  const auto parts = split(spec, ':');
  NoiseProfile p;
  if (parts[0] == "none" && parts.size() == 1) {
    p.kind = NoiseProfile::Kind::None;
  } else if (parts[0] == "uniform" && parts.size() == 2) {
    p.kind = NoiseProfile::Kind::UniformScatter;
    p.fraction = to_double(parts[1]);
  } else if ((parts[0] == "const" || parts[0] == "plateau") && parts.size() == 3) {
    p.kind = parts[0] == "const" ? NoiseProfile::Kind::ConstScatter : NoiseProfile::Kind::Plateau;
    p.value = to_level(parts[1]);
    p.fraction = to_double(parts[2]);
  } else {
    throw std::invalid_argument("bad noise spec '" + std::string(spec) +
                                "' (expected none|uniform:FRAC|const:VAL:FRAC|plateau:VAL:FRAC)");
  }
  p.validate();
  return p;
}

namespace {

// Free cells of a rectangle grown greedily around the free-cell centroid,
// with a partial edge strip to hit the target exactly.
std::vector<NodeId> plateau_cells(const Domain& domain, std::size_t target) {
  std::vector<NodeId> out;
  if (target == 0) return out;

  double sx = 0, sy = 0;
  for (const Cell c : domain.cells()) {
    sx += c.x;
    sy += c.y;
  }
  const double n = static_cast<double>(domain.free_count());
  const double cx = sx / n, cy = sy / n;
  Cell anchor = domain.cell(0);
  double best = kInf;
  for (const Cell c : domain.cells()) {
    const double d = (c.x - cx) * (c.x - cx) + (c.y - cy) * (c.y - cy);
    if (d < best) {
      best = d;
      anchor = c;
    }
  }

  int x0 = anchor.x, x1 = anchor.x, y0 = anchor.y, y1 = anchor.y;
  std::size_t count = 1;
  auto strip = [&](int side) {
    // 0 right, 1 down, 2 left, 3 up
    std::vector<NodeId> cells;
    if (side == 0 || side == 2) {
      const int x = side == 0 ? x1 + 1 : x0 - 1;
      if (x < 0 || x >= domain.width()) return std::pair{false, cells};
      for (int y = y0; y <= y1; ++y)
        if (const NodeId id = domain.node({x, y}); id != kNoNode) cells.push_back(id);
    } else {
      const int y = side == 1 ? y1 + 1 : y0 - 1;
      if (y < 0 || y >= domain.height()) return std::pair{false, cells};
      for (int x = x0; x <= x1; ++x)
        if (const NodeId id = domain.node({x, y}); id != kNoNode) cells.push_back(id);
    }
    return std::pair{true, cells};
  };
  auto grow = [&](int side) {
    switch (side) {
      case 0: ++x1; break;
      case 1: ++y1; break;
      case 2: --x0; break;
      default: --y0; break;
    }
  };

  while (count < target) {
    // Widen the shorter dimension first, on the side that keeps the anchor
    // centred, to stay compact.
    const bool wide = (x1 - x0) > (y1 - y0);
    const int h_side = (x1 - anchor.x) <= (anchor.x - x0) ? 0 : 2;
    const int v_side = (y1 - anchor.y) <= (anchor.y - y0) ? 1 : 3;
    const int order[4] = {wide ? v_side : h_side, wide ? 4 - v_side : 2 - h_side,
                          wide ? h_side : v_side, wide ? 2 - h_side : 4 - v_side};
    bool grew = false;
    for (int side : order) {
      auto [ok, cells] = strip(side);
      if (ok && count + cells.size() <= target) {
        grow(side);
        count += cells.size();
        grew = true;
        break;
      }
    }
    if (grew) continue;
    // Every full strip overshoots: take a prefix of the first available one.
    for (int side : order) {
      auto [ok, cells] = strip(side);
      if (!ok) continue;
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
          if (const NodeId id = domain.node({x, y}); id != kNoNode) out.push_back(id);
      for (std::size_t i = 0; count < target && i < cells.size(); ++i, ++count) out.push_back(cells[i]);
      std::sort(out.begin(), out.end());
      return out;
    }
    break;
  }
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (const NodeId id = domain.node({x, y}); id != kNoNode) out.push_back(id);
  return out;
}

}  // namespace

NoisyField init_field(const Domain& domain, const NoiseProfile& noise, std::uint64_t seed) {
  noise.validate();
  NoisyField out{PheromoneField(domain.free_count())};
  const std::size_t nodes = domain.free_count();
  if (!noise.noisy()) return out;
  out.target_cells = static_cast<std::size_t>(std::floor(noise.fraction * static_cast<double>(nodes) + 1e-9));

  Rng rng = make_rng(seed, Stream::Noise);
  if (noise.kind == NoiseProfile::Kind::Plateau) {
    for (NodeId id : plateau_cells(domain, out.target_cells)) out.field.level(id) = noise.value;
  } else {
    std::vector<NodeId> order(nodes);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < out.target_cells; ++i) {
      const std::size_t j = i + uniform_index(rng, nodes - i);
      std::swap(order[i], order[j]);
      const Level v = noise.kind == NoiseProfile::Kind::ConstScatter
                          ? noise.value
                          : noise.low + static_cast<Level>(uniform_index(
                                            rng, static_cast<std::uint64_t>(noise.high - noise.low + 1)));
      out.field.level(order[i]) = v;
    }
  }
  out.noisy_cells = static_cast<std::size_t>((out.field.level > 0).count());
  out.achieved_fraction = static_cast<double>(out.noisy_cells) / static_cast<double>(nodes);
  return out;
}

void mark_disk(PheromoneField& field, std::span<const NodeId> nodes, Level new_level) {
  for (NodeId n : nodes) {
    field.level(n) = new_level;
    field.robot_marked(n) = true;
  }
}

void mark_disk(PheromoneField& field, const Domain& domain, std::span<const Cell> cells, Level new_level) {
  for (const Cell c : cells) {
    const NodeId n = domain.node(c);
    if (n == kNoNode) throw std::invalid_argument("mark_disk on a non-free cell");
    field.level(n) = new_level;
    field.robot_marked(n) = true;
  }
}

MinResult min_over(const PheromoneField& field, std::span<const NodeId> nodes) {
  if (nodes.empty()) throw std::invalid_argument("min_over on an empty cell set");
  MinResult r{field.level(nodes.front()), {}};
  for (NodeId n : nodes) {
    const Level v = field.level(n);
    if (v < r.min) {
      r.min = v;
      r.argmin.clear();
    }
    if (v == r.min) r.argmin.push_back(n);
  }
  return r;
}

void write_field_pgm(std::ostream& out, const Domain& domain, const PheromoneField& field) {
  const Level lo = field.level.minCoeff();
  const Level hi = field.level.maxCoeff();
  out << "P2\n" << domain.width() << ' ' << domain.height() << "\n255\n";
  for (int y = 0; y < domain.height(); ++y) {
    for (int x = 0; x < domain.width(); ++x) {
      const NodeId n = domain.node({x, y});
      long v = 0;
      if (n != kNoNode && hi > lo) v = static_cast<long>(std::lround(static_cast<double>(field.level(n) - lo) * 255.0 / static_cast<double>(hi - lo)));
      out << v << (x + 1 < domain.width() ? ' ' : '\n');
    }
  }
}

void write_field_csv(std::ostream& out, const Domain& domain, const PheromoneField& field) {
  for (int y = 0; y < domain.height(); ++y) {
    for (int x = 0; x < domain.width(); ++x) {
      const NodeId n = domain.node({x, y});
      out << (n == kNoNode ? Level{-1} : field.level(n)) << (x + 1 < domain.width() ? ',' : '\n');
    }
  }
}

}  // namespace maw
