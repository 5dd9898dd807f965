#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "maw/field.hpp"
#include "maw/generators.hpp"
#include "oracles.hpp"

using namespace maw;

namespace {

std::vector<NodeId> all_nodes(const Domain& d) {
  std::vector<NodeId> v(d.free_count());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST_CASE("noise specs parse") {
  CHECK(parse_noise("none").kind == NoiseProfile::Kind::None);
  const NoiseProfile u = parse_noise("uniform:0.6");
  CHECK(u.kind == NoiseProfile::Kind::UniformScatter);
  CHECK(u.fraction == 0.6);
  CHECK(u.low == 1);
  CHECK(u.high == 10);
  const NoiseProfile c = parse_noise("const:30:0.3");
  CHECK(c.kind == NoiseProfile::Kind::ConstScatter);
  CHECK(c.value == 30);
  CHECK(parse_noise("plateau:50:0.25").kind == NoiseProfile::Kind::Plateau);

  CHECK_THROWS(parse_noise("uniform:1.5"));
  CHECK_THROWS(parse_noise("const:0:0.3"));
  CHECK_THROWS(parse_noise("salt:0.1"));
  CHECK_THROWS(parse_noise("const:10"));
}

TEST_CASE("clean init is all zero") {
  const Domain d(oracle::open_grid(10, 10), Metric::Linf);
  const NoisyField f = init_field(d, {}, 3);
  CHECK(f.field.level.maxCoeff() == 0);
  CHECK_FALSE(f.field.robot_marked.any());
  CHECK(f.noisy_cells == 0);
}

TEST_CASE("uniform scatter on the 100x100 grid") {
  const Domain d(oracle::open_grid(100, 100), Metric::Linf);
  const NoisyField f = init_field(d, parse_noise("uniform:0.6"), 42);
  CHECK(f.target_cells == 6000);
  CHECK(f.noisy_cells == 6000);
  CHECK(f.field.level.maxCoeff() <= 10);
  CHECK_FALSE(f.field.robot_marked.any());
  // About 600 per value; 5 sigma of a binomial(6000, 0.1) is ~116.
  for (Level v = 1; v <= 10; ++v) {
    const auto count = (f.field.level == v).count();
    CHECK(count > 480);
    CHECK(count < 720);
  }
}

TEST_CASE("const scatter") {
  const Domain d(oracle::open_grid(100, 100), Metric::Linf);
  const NoisyField f = init_field(d, parse_noise("const:30:0.3"), 5);
  CHECK((f.field.level == 30).count() == 3000);
  CHECK((f.field.level == 0).count() == 7000);
}

TEST_CASE("scatter selects exactly floor(fraction * free) cells") {
  std::mt19937 pick(9);
  for (int k = 0; k < 20; ++k) {
    const Domain d(gen_scatter(20 + k, 17, k, 0.2, 1, 3), Metric::Linf);
    const double frac = std::uniform_real_distribution<double>(0.0, 1.0)(pick);
    for (const char* kind : {"uniform", "const"}) {
      const std::string spec = std::string(kind) == "const" ? "const:7:" + std::to_string(frac)
                                                            : "uniform:" + std::to_string(frac);
      const NoiseProfile p = parse_noise(spec);
      const NoisyField f = init_field(d, p, static_cast<std::uint64_t>(k));
      const auto expect = static_cast<long>(std::floor(p.fraction * static_cast<double>(d.free_count()) + 1e-9));
      CHECK((f.field.level > 0).count() == expect);
    }
  }
  const Domain small(oracle::open_grid(10, 10), Metric::Linf);
  CHECK(init_field(small, parse_noise("const:3:0.29"), 0).noisy_cells == 29);
}

TEST_CASE("scatter is seeded") {
  const Domain d(oracle::open_grid(30, 30), Metric::Linf);
  const NoiseProfile p = parse_noise("uniform:0.4");
  CHECK((init_field(d, p, 1).field.level == init_field(d, p, 1).field.level).all());
  CHECK_FALSE((init_field(d, p, 1).field.level == init_field(d, p, 2).field.level).all());
}

TEST_CASE("plateau is one compact rectangle") {
  const Domain d(oracle::open_grid(100, 100), Metric::Linf);
  const NoisyField f = init_field(d, parse_noise("plateau:20:0.3"), 0);
  CHECK(f.noisy_cells == 3000);
  CHECK(f.achieved_fraction == doctest::Approx(0.3));
  int x0 = 100, y0 = 100, x1 = -1, y1 = -1;
  for (NodeId n = 0; n < static_cast<NodeId>(d.free_count()); ++n)
    if (f.field.level(n) > 0) {
      CHECK(f.field.level(n) == 20);
      const Cell c = d.cell(n);
      x0 = std::min(x0, c.x), y0 = std::min(y0, c.y), x1 = std::max(x1, c.x), y1 = std::max(y1, c.y);
    }
  // A full rectangle plus at most one partial strip along one side.
  const int w = x1 - x0 + 1, h = y1 - y0 + 1;
  CHECK(w * h >= 3000);
  CHECK(w * h - 3000 < std::max(w, h));
  CHECK(std::abs(w - h) <= 2);
  // Centred on the grid.
  CHECK(std::abs((x0 + x1) - 99) <= 2);
  CHECK(std::abs((y0 + y1) - 99) <= 2);
}

TEST_CASE("plateau on an obstructed domain reports what it achieved") {
  const Domain d(gen_rooms(60, 60, 2), Metric::Linf);
  const NoisyField f = init_field(d, parse_noise("plateau:9:0.5"), 0);
  CHECK(f.noisy_cells == static_cast<std::size_t>((f.field.level > 0).count()));
  CHECK(f.noisy_cells <= f.target_cells);
  CHECK(f.achieved_fraction == doctest::Approx(static_cast<double>(f.noisy_cells) / d.free_count()));
}

TEST_CASE("mark_disk assigns") {
  const Domain d(oracle::open_grid(11, 11), Metric::Linf);
  PheromoneField field(d.free_count());
  const auto disk = disk_cells(d, {5, 5}, 3);
  mark_disk(field, d, disk, 1);
  CHECK((field.level == 1).count() == 25);
  CHECK(field.robot_marked.count() == 25);
  for (Cell c : disk) CHECK(field[d.node(c)] == 1);

  mark_disk(field, d, disk, 2);
  CHECK((field.level == 2).count() == 25);
  CHECK(field.level.sum() == 50);

  const PheromoneField once = field;
  mark_disk(field, d, disk, 2);
  CHECK((field.level == once.level).all());
  CHECK((field.robot_marked == once.robot_marked).all());
}

TEST_CASE("mark_disk overwrites noise") {
  const Domain d(oracle::open_grid(3, 3), Metric::Linf);
  PheromoneField field(d.free_count());
  field.level(4) = 50;
  const NodeId cell[] = {4};
  mark_disk(field, cell, 4);
  CHECK(field.level(4) == 4);
  CHECK(field.robot_marked(4));
}

TEST_CASE("min_over examples") {
  const Domain d(oracle::open_grid(21, 21), Metric::Linf);
  PheromoneField field(d.free_count());
  std::vector<NodeId> ring;
  for (Cell c : ring_cells(d, {10, 10}, 3, 6)) ring.push_back(d.node(c));

  MinResult m = min_over(field, ring);
  CHECK(m.min == 0);
  CHECK(m.argmin.size() == 144);

  for (std::size_t i = 0; i < ring.size(); ++i) field.level(ring[i]) = static_cast<Level>(i % 3);
  m = min_over(field, ring);
  CHECK(m.min == 0);
  CHECK(m.argmin.size() == 48);

  for (NodeId n : ring) field.level(n) = 7;
  field.level(ring[17]) = 3;
  m = min_over(field, ring);
  CHECK(m.min == 3);
  CHECK(m.argmin == std::vector<NodeId>{ring[17]});

  CHECK_THROWS_AS(min_over(field, std::span<const NodeId>{}), std::invalid_argument);
}

TEST_CASE("min_over agrees with a full scan") {
  const Domain d(oracle::open_grid(15, 15), Metric::Linf);
  std::mt19937_64 gen(3);
  PheromoneField field(d.free_count());
  for (int trial = 0; trial < 200; ++trial) {
    for (Eigen::Index i = 0; i < field.level.size(); ++i) field.level(i) = static_cast<Level>(gen() % 6);
    std::vector<NodeId> subset;
    for (NodeId n : all_nodes(d))
      if (gen() % 3 == 0) subset.push_back(n);
    if (subset.empty()) continue;
    Level lo = std::numeric_limits<Level>::max();
    for (NodeId n : subset) lo = std::min(lo, field.level(n));
    std::vector<NodeId> at;
    for (NodeId n : subset)
      if (field.level(n) == lo) at.push_back(n);
    const MinResult m = min_over(field, subset);
    CHECK(m.min == lo);
    CHECK(m.argmin == at);
  }
}

TEST_CASE("field exports") {
  const Domain d = parse_domain_text(".#\n..\n", Metric::Linf);
  PheromoneField field(d.free_count());
  field.level << 2, 4, 6;

  std::ostringstream pgm;
  write_field_pgm(pgm, d, field);
  CHECK(pgm.str() == "P2\n2 2\n255\n0 0\n128 255\n");

  std::ostringstream csv;
  write_field_csv(csv, d, field);
  CHECK(csv.str() == "2,-1\n4,6\n");

  PheromoneField flat(d.free_count());
  std::ostringstream zero;
  write_field_pgm(zero, d, flat);
  CHECK(zero.str() == "P2\n2 2\n255\n0 0\n0 0\n");
}
