// Copyright (c) 2026 the papt authors. Apache-2.0 license; see LICENSE.
#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "papt/expander.hpp"

using namespace papt;

namespace {

MultiGraph cycle(std::uint32_t n) {
  MultiGraph g;
  g.n_vertices = n;
  g.degrees.assign(n + 1, 0);
  for (std::uint32_t v = 1; v <= n; ++v) g.add_edge(v, v % n + 1);
  return g;
}

MultiGraph complete(std::uint32_t n) {
  MultiGraph g;
  g.n_vertices = n;
  g.degrees.assign(n + 1, 0);
  for (std::uint32_t u = 1; u <= n; ++u)
    for (std::uint32_t v = u + 1; v <= n; ++v) g.add_edge(u, v);
  return g;
}

MultiGraph path(std::uint32_t n) {
  MultiGraph g;
  g.n_vertices = n;
  g.degrees.assign(n + 1, 0);
  for (std::uint32_t v = 1; v < n; ++v) g.add_edge(v, v + 1);
  return g;
}

}  // namespace

TEST_CASE("cutset counts multiplicities and skips self-loops") {
  auto g = cycle(4);
  std::vector<std::uint8_t> s{0, 1, 1, 0, 0};  // adjacent pair {1,2}
  REQUIRE(cutset_size(g, s) == 2);
  REQUIRE(cutset_size(g, std::vector<std::uint8_t>(5, 0)) == 0);
  REQUIRE(cutset_size(g, std::vector<std::uint8_t>{0, 1, 1, 1, 1}) == 0);

  MultiGraph tri;
  tri.n_vertices = 3;
  tri.degrees.assign(4, 0);
  tri.add_edge(1, 2);
  tri.add_edge(1, 2);
  tri.add_edge(1, 3);
  tri.add_edge(2, 3);
  tri.add_edge(1, 1);
  REQUIRE(cutset_size(tri, std::vector<std::uint8_t>{0, 1, 0, 0}) == 3);
}

TEST_CASE("exact expander constant on reference graphs") {
  auto c4 = exact_alpha(cycle(4), 0.25);
  REQUIRE(c4.alpha == Catch::Approx(1.0));
  REQUIRE(c4.witness.size() >= 1);

  auto k4 = exact_alpha(complete(4), 0.25);
  REQUIRE(k4.alpha == Catch::Approx(2.0));

  // disconnected: an admissible subset with empty cut
  MultiGraph two;
  two.n_vertices = 4;
  two.degrees.assign(5, 0);
  two.add_edge(1, 2);
  two.add_edge(3, 4);
  REQUIRE(exact_alpha(two, 0.25).alpha == 0.0);
}

TEST_CASE("exact witness realizes the reported ratio") {
  PAConfig cfg;
  cfg.variant = Variant::B;
  cfg.m = 2;
  cfg.delta = 0.0;
  cfg.n = 14;
  cfg.seed = 5;
  auto g = generate(cfg);
  auto rep = exact_alpha(g, 0.25);
  std::vector<std::uint8_t> ind(g.n_vertices + 1, 0);
  for (auto v : rep.witness) ind[v] = 1;
  REQUIRE(static_cast<double>(cutset_size(g, ind)) / rep.witness.size() ==
          Catch::Approx(rep.alpha));
  REQUIRE(rep.witness.size() >= static_cast<std::size_t>(std::ceil(0.25 * g.n_vertices)));
  REQUIRE(rep.witness.size() <= g.n_vertices / 2);
}

TEST_CASE("exact refuses oversized graphs") {
  REQUIRE_THROWS_AS(exact_alpha(cycle(30), 0.25), std::invalid_argument);
}

TEST_CASE("normalized Laplacian gap of the complete graph") {
  auto rep = spectral_alpha_bound(complete(10), 0.25);
  REQUIRE(rep.lambda2 == Catch::Approx(10.0 / 9.0).epsilon(1e-6));
  REQUIRE(rep.alpha == Catch::Approx(0.5 * (10.0 / 9.0) * 9.0).epsilon(1e-6));
}

TEST_CASE("path graphs have a near-zero bound") {
  auto rep = spectral_alpha_bound(path(50), 0.25);
  REQUIRE(rep.alpha < 0.05);
  REQUIRE(rep.alpha >= 0.0);
}

TEST_CASE("spectral bound never exceeds the exact constant") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PAConfig cfg;
    cfg.variant = Variant::B;
    cfg.m = 2;
    cfg.delta = (seed % 2 == 0) ? 0.0 : 1.0;
    cfg.n = 10 + static_cast<std::uint32_t>(seed % 8);
    cfg.seed = seed_stream(400, seed);
    auto g = generate(cfg);
    auto exact = exact_alpha(g, 0.25);
    auto bound = spectral_alpha_bound(g, 0.25);
    REQUIRE(bound.alpha <= exact.alpha + 1e-9);
  }
}

TEST_CASE("expansion experiment is deterministic and sane") {
  PAConfig base;
  base.variant = Variant::B;
  base.m = 2;
  base.delta = 0.0;
  auto r1 = expansion_experiment(base, 0.25, 0.05, {10, 12}, 20, 9, 1);
  auto r4 = expansion_experiment(base, 0.25, 0.05, {10, 12}, 20, 9, 4);
  REQUIRE(r1.size() == 2);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    REQUIRE(r1[i].fail_frac == r4[i].fail_frac);
    REQUIRE(r1[i].min_observed == r4[i].min_observed);
    REQUIRE(r1[i].min_observed > 0.0);  // connected, so some edge always crosses
  }
  // alpha_probe = 0 can never fail
  auto r0 = expansion_experiment(base, 0.25, 0.0, {10}, 20, 9, 2);
  REQUIRE(r0[0].fail_frac == 0.0);
  REQUIRE_THROWS_AS(expansion_experiment(PAConfig{Variant::B, 1, 0.0, 10, 1, {}}, 0.25, 0.05,
                                         {10}, 5, 1, 1),
                    std::invalid_argument);
}
