// Copyright (c) 2026 the papt authors. Apache-2.0 license; see LICENSE.
#include <catch2/catch_amalgamated.hpp>

#include "papt/percolation.hpp"

using namespace papt;

namespace {

MultiGraph path3() {
  MultiGraph g;
  g.n_vertices = 3;
  g.degrees.assign(4, 0);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  return g;
}

PAConfig small_cfg() {
  PAConfig cfg;
  cfg.variant = Variant::B;
  cfg.m = 2;
  cfg.delta = 1.0;
  cfg.n = 500;
  return cfg;
}

}  // namespace

TEST_CASE("pi = 0 and pi = 1 masks are empty and full") {
  auto g = path3();
  auto u = edge_uniforms(g, 1);
  auto m0 = percolate_mask(u, 0.0);
  auto m1 = percolate_mask(u, 1.0);
  REQUIRE(std::count(m0.begin(), m0.end(), 1) == 0);
  REQUIRE(std::count(m1.begin(), m1.end(), 1) == 2);
}

TEST_CASE("coupled masks are nested across pi") {
  auto g = generate(small_cfg());
  auto u = edge_uniforms(g, 9);
  auto lo = percolate_mask(u, 0.3);
  auto hi = percolate_mask(u, 0.7);
  for (std::size_t i = 0; i < lo.size(); ++i) REQUIRE(lo[i] <= hi[i]);
}

TEST_CASE("component examples") {
  auto g = path3();
  std::vector<std::uint8_t> none(2, 0), all(2, 1), first_only{1, 0};
  REQUIRE(components(g, none) == std::vector<std::uint64_t>{1, 1, 1});
  REQUIRE(components(g, all) == std::vector<std::uint64_t>{3});
  REQUIRE(components(g, first_only) == std::vector<std::uint64_t>{2, 1});
}

TEST_CASE("self-loops never merge components") {
  MultiGraph g;
  g.n_vertices = 2;
  g.degrees.assign(3, 0);
  g.add_edge(1, 1);
  g.add_edge(2, 2);
  std::vector<std::uint8_t> all(2, 1);
  REQUIRE(components(g, all) == std::vector<std::uint64_t>{1, 1});
}

TEST_CASE("component sizes always partition the vertex set") {
  auto g = generate(small_cfg());
  auto u = edge_uniforms(g, 4);
  for (double pi : {0.1, 0.5, 0.9}) {
    auto sizes = components(g, percolate_mask(u, pi));
    std::uint64_t sum = 0;
    for (auto s : sizes) sum += s;
    REQUIRE(sum == g.n_vertices);
  }
}

TEST_CASE("sweep is reproducible and identical across thread counts") {
  auto cfg = small_cfg();
  std::vector<double> grid{0.1, 0.3, 0.5};
  auto t1 = sweep(cfg, grid, 8, 21, 1);
  auto t8 = sweep(cfg, grid, 8, 21, 8);
  REQUIRE(t1.rows.size() == t8.rows.size());
  for (std::size_t i = 0; i < t1.rows.size(); ++i) {
    REQUIRE(t1.rows[i].c1_mean == t8.rows[i].c1_mean);
    REQUIRE(t1.rows[i].c1_sd == t8.rows[i].c1_sd);
    REQUIRE(t1.rows[i].c2_mean == t8.rows[i].c2_mean);
  }
}

TEST_CASE("coupled sweep never violates pathwise monotonicity") {
  auto cfg = small_cfg();
  std::vector<double> grid{0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
  auto t = sweep(cfg, grid, 16, 3, 4);
  REQUIRE(t.monotonicity_violations == 0);
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    REQUIRE(t.rows[i].c1_mean >= t.rows[i - 1].c1_mean);
}

TEST_CASE("sweep endpoints: pi = 0 gives singletons, pi = 1 the whole graph") {
  auto cfg = small_cfg();
  auto t = sweep(cfg, {0.0, 1.0}, 4, 17, 2);
  REQUIRE(t.rows[0].c1_mean == Catch::Approx(1.0 / cfg.n));
  // variant B with m = 2 never self-loops on a vertex's first edge, so the
  // full graph is connected
  REQUIRE(t.rows[1].c1_mean == Catch::Approx(1.0));
}

TEST_CASE("sweep rejects unsorted grids") {
  auto cfg = small_cfg();
  REQUIRE_THROWS_AS(sweep(cfg, {0.5, 0.1}, 2, 1, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(sweep(cfg, {}, 2, 1, 1), std::invalid_argument);
}
