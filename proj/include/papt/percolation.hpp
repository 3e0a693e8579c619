// Copyright (c) 2026 the papt authors. Apache-2.0 license; see LICENSE.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "papt/graph.hpp"
#include "papt/pa_model.hpp"
#include "papt/parallel.hpp"
#include "papt/rng.hpp"

namespace papt {

struct PercolationOutcome {
  double pi = 0.0;
  std::uint64_t retained_edges = 0;
  std::vector<std::uint64_t> component_sizes;  // descending
  double c1_frac = 0.0;
  double c2_frac = 0.0;
};

/// One uniform draw per edge. Thresholding the same draws at different pi
/// gives the monotone coupling used by sweep().
inline std::vector<double> edge_uniforms(const MultiGraph& g, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<double> u(g.edges.size());
  for (auto& x : u) x = rng.uniform();
  return u;
}

inline std::vector<std::uint8_t> percolate_mask(const std::vector<double>& uniforms, double pi) {
  if (pi < 0.0 || pi > 1.0) throw std::invalid_argument("pi must lie in [0,1]");
  std::vector<std::uint8_t> mask(uniforms.size());
  for (std::size_t i = 0; i < uniforms.size(); ++i) mask[i] = uniforms[i] <= pi ? 1 : 0;
  return mask;
}

namespace detail {
class UnionFind {
 public:
  explicit UnionFind(std::uint32_t n) : parent_(n + 1), size_(n + 1, 1) {
    std::iota(parent_.begin(), parent_.end(), 0u);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }
  std::uint64_t size_of(std::uint32_t x) { return size_[find(x)]; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint64_t> size_;
};
}  // namespace detail

/// Component sizes (descending) of the retained subgraph. Self-loops are
/// ignored here; they cannot merge components.
inline std::vector<std::uint64_t> components(const MultiGraph& g,
                                             const std::vector<std::uint8_t>& mask) {
  if (mask.size() != g.edges.size()) throw std::invalid_argument("mask length != edge count");
  detail::UnionFind uf(g.n_vertices);
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (!mask[i]) continue;
    auto [u, v] = g.edges[i];
    if (u != v) uf.unite(u, v);
  }
  std::vector<std::uint64_t> sizes;
  std::vector<std::uint8_t> seen(g.n_vertices + 1, 0);
  for (std::uint32_t v = 1; v <= g.n_vertices; ++v) {
    std::uint32_t r = uf.find(v);
    if (!seen[r]) {
      seen[r] = 1;
      sizes.push_back(uf.size_of(r));
    }
  }
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  return sizes;
}

inline PercolationOutcome percolate(const MultiGraph& g, const std::vector<double>& uniforms,
                                    double pi) {
  PercolationOutcome out;
  out.pi = pi;
  auto mask = percolate_mask(uniforms, pi);
  for (auto b : mask) out.retained_edges += b;
  out.component_sizes = components(g, mask);
  const double n = static_cast<double>(g.n_vertices);
  out.c1_frac = out.component_sizes.empty() ? 0.0 : static_cast<double>(out.component_sizes[0]) / n;
  out.c2_frac =
      out.component_sizes.size() < 2 ? 0.0 : static_cast<double>(out.component_sizes[1]) / n;
  return out;
}

struct SweepRow {
  double pi;
  double c1_mean, c1_sd, c1_min, c1_max;
  double c2_mean, c2_sd, c2_min, c2_max;
};

struct SweepTable {
  std::vector<double> pi_grid;
  std::uint64_t replicas = 0;
  std::uint64_t seed = 0;
  std::vector<SweepRow> rows;
  std::uint64_t monotonicity_violations = 0;  // across all replicas, exact check
};

/// Percolate `replicas` fresh graphs over the whole grid with one set of edge
/// uniforms per replica (coupled across pi). c1 is exactly non-decreasing in
/// pi within a replica; violations are counted, not assumed.
inline SweepTable sweep(const PAConfig& cfg, const std::vector<double>& pi_grid,
                        std::uint64_t replicas, std::uint64_t seed,
                        unsigned threads = default_threads()) {
  if (pi_grid.empty()) throw std::invalid_argument("pi grid must be non-empty");
  if (!std::is_sorted(pi_grid.begin(), pi_grid.end()))
    throw std::invalid_argument("pi grid must be sorted ascending");
  cfg.validate();

  const std::size_t P = pi_grid.size();
  std::vector<std::vector<double>> c1(replicas, std::vector<double>(P));
  std::vector<std::vector<double>> c2(replicas, std::vector<double>(P));
  std::vector<std::uint64_t> violations(replicas, 0);

  parallel_for_index(replicas, threads, [&](std::uint64_t r) {
    PAConfig local = cfg;
    local.seed = seed_stream(seed, 2 * r);
    MultiGraph g = generate(local);
    auto uniforms = edge_uniforms(g, seed_stream(seed, 2 * r + 1));
    double prev = -1.0;
    for (std::size_t k = 0; k < P; ++k) {
      auto out = percolate(g, uniforms, pi_grid[k]);
      c1[r][k] = out.c1_frac;
      c2[r][k] = out.c2_frac;
      if (out.c1_frac < prev) ++violations[r];
      prev = out.c1_frac;
    }
  });

  SweepTable t;
  t.pi_grid = pi_grid;
  t.replicas = replicas;
  t.seed = seed;
  for (std::uint64_t r = 0; r < replicas; ++r) t.monotonicity_violations += violations[r];
  for (std::size_t k = 0; k < P; ++k) {
    SweepRow row{};
    row.pi = pi_grid[k];
    double s1 = 0, s2 = 0, q1 = 0, q2 = 0;
    row.c1_min = 1.0;
    row.c2_min = 1.0;
    row.c1_max = 0.0;
    row.c2_max = 0.0;
    for (std::uint64_t r = 0; r < replicas; ++r) {
      s1 += c1[r][k];
      s2 += c2[r][k];
      row.c1_min = std::min(row.c1_min, c1[r][k]);
      row.c1_max = std::max(row.c1_max, c1[r][k]);
      row.c2_min = std::min(row.c2_min, c2[r][k]);
      row.c2_max = std::max(row.c2_max, c2[r][k]);
    }
    row.c1_mean = s1 / replicas;
    row.c2_mean = s2 / replicas;
    for (std::uint64_t r = 0; r < replicas; ++r) {
      q1 += (c1[r][k] - row.c1_mean) * (c1[r][k] - row.c1_mean);
      q2 += (c2[r][k] - row.c2_mean) * (c2[r][k] - row.c2_mean);
    }
    row.c1_sd = replicas > 1 ? std::sqrt(q1 / (replicas - 1)) : 0.0;
    row.c2_sd = replicas > 1 ? std::sqrt(q2 / (replicas - 1)) : 0.0;
    t.rows.push_back(row);
  }
  return t;
}

}  // namespace papt
