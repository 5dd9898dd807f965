#pragma once

// Synthetic domains: obstacle-free boxes, the three 100x100-style analogs
// (scattered blocks, rooms, maze), chained loops, and star spokes.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "maw/geometry.hpp"

namespace maw {

FreeMask gen_empty(int width, int height);

// Scattered rectangular blocks covering roughly `density` of the grid; only
// the largest connected free component is kept.
FreeMask gen_scatter(int width, int height, std::uint64_t seed, double density = 0.12,
                     int min_block = 2, int max_block = 6);

// Office-like floor: recursive division into rooms by 1-cell walls with
// door gaps.
FreeMask gen_rooms(int width, int height, std::uint64_t seed);

// Perfect maze (recursive backtracker) with corridors `corridor` cells wide
// and 1-cell walls.
FreeMask gen_maze(int width, int height, std::uint64_t seed, int corridor = 4);

struct LoopsDomain {
  FreeMask mask;
  std::vector<int> loop_of;  // per grid cell, row-major; -1 outside loops
  int loop_count = 0;

  std::vector<int> node_labels(const Domain& domain) const;
};

// Horizontal chain of 1-cell-wide rectangular ring corridors. Consecutive
// rings are joined through one junction cell. Each ring has side 4r+1.
LoopsDomain gen_loops(int loop_count, int r);

// 1-cell-wide spokes from a hub. Up to 8 spokes radiate in the grid
// directions; more spokes hang alternately up and down from a horizontal
// spine with a 2-cell pitch.
FreeMask gen_star(int spokes, int spoke_len);

struct GeneratedDomain {
  FreeMask mask;
  std::vector<int> loop_of;  // only for loops
  std::string name;
};

// empty | scatter | rooms | maze | loops:N | star:K:LEN
// Sizes apply to the first four; r sizes loop rings.
GeneratedDomain generate(std::string_view spec, int width, int height, std::uint64_t seed, int r);

// Preset names accepted in place of a domain path: empty<N>, scatter<N>
// (alias A<N>), rooms<N> (B<N>), maze<N> (C<N>). Returns false if unknown.
bool preset_domain(std::string_view name, std::uint64_t seed, GeneratedDomain& out);

// Keeps the largest 4-connected free component, valid under every metric.
FreeMask largest_component(const FreeMask& mask);

}  // namespace maw
