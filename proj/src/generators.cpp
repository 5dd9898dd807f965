
#include "maw/generators.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "maw/random.hpp"

namespace maw {

FreeMask gen_empty(int width, int height) {
  if (width < 1 || height < 1) throw std::invalid_argument("domain size must be >= 1");
  return FreeMask::Constant(height, width, true);
}

FreeMask largest_component(const FreeMask& mask) {
  const int h = static_cast<int>(mask.rows()), w = static_cast<int>(mask.cols());
  Grid<int> label = Grid<int>::Constant(h, w, -1);
  int best = -1;
  std::size_t best_size = 0;
  int next = 0;
  std::vector<std::pair<int, int>> stack;
  for (int y0 = 0; y0 < h; ++y0)
    for (int x0 = 0; x0 < w; ++x0) {
      if (!mask(y0, x0) || label(y0, x0) >= 0) continue;
      std::size_t size = 0;
      stack.push_back({x0, y0});
      label(y0, x0) = next;
      while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        ++size;
        const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
          const int nx = x + dx[k], ny = y + dy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h || !mask(ny, nx) || label(ny, nx) >= 0) continue;
          label(ny, nx) = next;
          stack.push_back({nx, ny});
        }
      }
      if (size > best_size) {
        best_size = size;
        best = next;
      }
      ++next;
    }
  return label == best;
}

FreeMask gen_scatter(int width, int height, std::uint64_t seed, double density, int min_block, int max_block) {
  FreeMask mask = gen_empty(width, height);
  Rng rng = make_rng(seed, Stream::Generator);
  const auto target = static_cast<Eigen::Index>(density * width * height);
  const int span = std::max(1, max_block - min_block + 1);
  for (int guard = 0; (mask == false).count() < target && guard < 100000; ++guard) {
    const int bw = min_block + static_cast<int>(uniform_index(rng, span));
    const int bh = min_block + static_cast<int>(uniform_index(rng, span));
    const int x = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(width)));
    const int y = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(height)));
    mask.block(y, x, std::min(bh, height - y), std::min(bw, width - x)).setConstant(false);
  }
  return largest_component(mask);
}

namespace {

struct Divider {
  FreeMask& mask;
  Rng& rng;
  int min_room;
  int door;

  bool free_at(int x, int y) const {
    return x >= 0 && y >= 0 && x < mask.cols() && y < mask.rows() && mask(y, x);
  }

  // Region [x0,x1] x [y0,y1] is open floor bounded by walls or the grid edge.
  void divide(int x0, int y0, int x1, int y1) {
    const int w = x1 - x0 + 1, h = y1 - y0 + 1;
    const bool can_h = h >= 2 * min_room + 1, can_v = w >= 2 * min_room + 1;
    if (!can_h && !can_v) return;
    bool horizontal = can_h && (!can_v || h > w || (h == w && (rng() & 1)));

    for (int attempt = 0; attempt < 16; ++attempt) {
      if (horizontal) {
        const int y = y0 + min_room + static_cast<int>(uniform_index(rng, h - 2 * min_room));
        // A wall end must not plug a door of the enclosing wall.
        if ((x0 > 0 && free_at(x0 - 1, y)) || (x1 + 1 < mask.cols() && free_at(x1 + 1, y))) continue;
        for (int x = x0; x <= x1; ++x) mask(y, x) = false;
        const int d = std::min(door, w);
        const int at = x0 + static_cast<int>(uniform_index(rng, w - d + 1));
        for (int x = at; x < at + d; ++x) mask(y, x) = true;
        divide(x0, y0, x1, y - 1);
        divide(x0, y + 1, x1, y1);
      } else {
        const int x = x0 + min_room + static_cast<int>(uniform_index(rng, w - 2 * min_room));
        if ((y0 > 0 && free_at(x, y0 - 1)) || (y1 + 1 < mask.rows() && free_at(x, y1 + 1))) continue;
        for (int y = y0; y <= y1; ++y) mask(y, x) = false;
        const int d = std::min(door, h);
        const int at = y0 + static_cast<int>(uniform_index(rng, h - d + 1));
        for (int y = at; y < at + d; ++y) mask(y, x) = true;
        divide(x0, y0, x - 1, y1);
        divide(x + 1, y0, x1, y1);
      }
      return;
    }
  }
};

}  // namespace

FreeMask gen_rooms(int width, int height, std::uint64_t seed) {
  FreeMask mask = gen_empty(width, height);
  Rng rng = make_rng(seed, Stream::Generator);
  Divider{mask, rng, 8, 4}.divide(0, 0, width - 1, height - 1);
  return largest_component(mask);
}

FreeMask gen_maze(int width, int height, std::uint64_t seed, int corridor) {
  const int pitch = corridor + 1;
  const int cw = (width - 1) / pitch, ch = (height - 1) / pitch;
  if (cw < 1 || ch < 1) throw std::invalid_argument("maze too small for the corridor width");
  FreeMask mask = FreeMask::Constant(height, width, false);
  auto open_cell = [&](int cx, int cy) {
    mask.block(1 + cy * pitch, 1 + cx * pitch, corridor, corridor).setConstant(true);
  };
  Rng rng = make_rng(seed, Stream::Generator);
  std::vector<char> seen(static_cast<std::size_t>(cw) * ch, 0);
  std::vector<std::pair<int, int>> stack{{0, 0}};
  seen[0] = 1;
  open_cell(0, 0);
  const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
  while (!stack.empty()) {
    const auto [cx, cy] = stack.back();
    int options[4];
    int k = 0;
    for (int d = 0; d < 4; ++d) {
      const int nx = cx + dx[d], ny = cy + dy[d];
      if (nx >= 0 && ny >= 0 && nx < cw && ny < ch && !seen[static_cast<std::size_t>(ny) * cw + nx])
        options[k++] = d;
    }
    if (k == 0) {
      stack.pop_back();
      continue;
    }
    const int d = options[uniform_index(rng, k)];
    const int nx = cx + dx[d], ny = cy + dy[d];
    seen[static_cast<std::size_t>(ny) * cw + nx] = 1;
    open_cell(nx, ny);
    // Knock out the wall between the two cells.
    if (dx[d] != 0) {
      const int wx = 1 + std::max(cx, nx) * pitch - 1;
      mask.block(1 + cy * pitch, wx, corridor, 1).setConstant(true);
    } else {
      const int wy = 1 + std::max(cy, ny) * pitch - 1;
      mask.block(wy, 1 + cx * pitch, 1, corridor).setConstant(true);
    }
    stack.push_back({nx, ny});
  }
  return mask;
}

std::vector<int> LoopsDomain::node_labels(const Domain& domain) const {
  std::vector<int> out(domain.free_count(), -1);
  for (std::size_t n = 0; n < out.size(); ++n) {
    const Cell c = domain.cell(static_cast<NodeId>(n));
    out[n] = loop_of[static_cast<std::size_t>(c.y) * domain.width() + c.x];
  }
  return out;
}

LoopsDomain gen_loops(int loop_count, int r) {
  if (loop_count < 1) throw std::invalid_argument("loop count must be >= 1");
  // Perimeter 16r: the far junction stays out of sensing range (2r) from
  // anywhere near the near junction.
  const int side = 4 * r + 1;
  const int pitch = side + 1;
  const int width = loop_count * pitch - 1, height = side;
  LoopsDomain out;
  out.loop_count = loop_count;
  out.mask = FreeMask::Constant(height, width, false);
  out.loop_of.assign(static_cast<std::size_t>(width) * height, -1);
  for (int k = 0; k < loop_count; ++k) {
    const int x0 = k * pitch;
    for (int y = 0; y < side; ++y)
      for (int x = x0; x < x0 + side; ++x)
        if (y == 0 || y == side - 1 || x == x0 || x == x0 + side - 1) {
          out.mask(y, x) = true;
          out.loop_of[static_cast<std::size_t>(y) * width + x] = k;
        }
    if (k + 1 < loop_count) out.mask(side / 2, x0 + side) = true;  // junction
  }
  return out;
}

FreeMask gen_star(int spokes, int spoke_len) {
  if (spokes < 1 || spoke_len < 1) throw std::invalid_argument("star needs spokes >= 1 and length >= 1");
  if (spokes <= 8) {
    const int n = 2 * spoke_len + 1;
    FreeMask mask = FreeMask::Constant(n, n, false);
    const int dirs[8][2] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}, {1, -1}, {-1, -1}, {-1, 1}, {1, 1}};
    mask(spoke_len, spoke_len) = true;
    for (int s = 0; s < spokes; ++s)
      for (int i = 1; i <= spoke_len; ++i) mask(spoke_len + i * dirs[s][1], spoke_len + i * dirs[s][0]) = true;
    return mask;
  }
  const int columns = (spokes + 1) / 2;
  const int width = 2 * columns - 1, height = 2 * spoke_len + 1;
  FreeMask mask = FreeMask::Constant(height, width, false);
  mask.row(spoke_len).setConstant(true);
  for (int s = 0; s < spokes; ++s) {
    const int x = 2 * (s / 2);
    for (int i = 1; i <= spoke_len; ++i) mask(s % 2 == 0 ? spoke_len - i : spoke_len + i, x) = true;
  }
  return mask;
}

namespace {

int to_int(std::string_view s, const char* what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument(std::string("bad ") + what + " '" + std::string(s) + "'");
  return v;
}

}  // namespace

GeneratedDomain generate(std::string_view spec, int width, int height, std::uint64_t seed, int r) {
  GeneratedDomain out;
  out.name = std::string(spec);
  std::vector<std::string_view> parts;
  for (std::size_t pos = 0;;) {
    const std::size_t end = spec.find(':', pos);
    parts.push_back(spec.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }
  const std::string_view kind = parts[0];
  if (kind == "empty" && parts.size() == 1) {
    out.mask = gen_empty(width, height);
  } else if (kind == "scatter" && parts.size() == 1) {
    out.mask = gen_scatter(width, height, seed);
  } else if (kind == "rooms" && parts.size() == 1) {
    out.mask = gen_rooms(width, height, seed);
  } else if (kind == "maze" && parts.size() == 1) {
    out.mask = gen_maze(width, height, seed);
  } else if (kind == "loops" && parts.size() == 2) {
    LoopsDomain loops = gen_loops(to_int(parts[1], "loop count"), r);
    out.mask = std::move(loops.mask);
    out.loop_of = std::move(loops.loop_of);
  } else if (kind == "star" && parts.size() == 3) {
    out.mask = gen_star(to_int(parts[1], "spoke count"), to_int(parts[2], "spoke length"));
  } else {
    throw std::invalid_argument("unknown generator '" + std::string(spec) +
                                "' (expected empty|scatter|rooms|maze|loops:N|star:K:LEN)");
  }
  return out;
}

bool preset_domain(std::string_view name, std::uint64_t seed, GeneratedDomain& out) {
  static const std::pair<std::string_view, std::string_view> prefixes[] = {
      {"empty", "empty"}, {"scatter", "scatter"}, {"rooms", "rooms"}, {"maze", "maze"},
      {"A", "scatter"},   {"B", "rooms"},         {"C", "maze"}};
  for (const auto& [prefix, kind] : prefixes) {
    if (!name.starts_with(prefix)) continue;
    const std::string_view digits = name.substr(prefix.size());
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }))
      continue;
    const int n = to_int(digits, "preset size");
    if (n < 1) return false;
    out = generate(kind, n, n, seed, 3);
    out.name = std::string(name);
    return true;
  }
  return false;
}

}  // namespace maw
