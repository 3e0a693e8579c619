// Copyright (c) 2026 the papt authors. Apache-2.0 license; see LICENSE.
#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>
#include <vector>

namespace papt {

/// Undirected multigraph with self-loops. Vertices are 1-indexed; an edge is
/// stored as (u, v) with u <= v, u == v encoding a self-loop. A self-loop
/// contributes 2 to the degree of its vertex.
struct MultiGraph {
  std::uint32_t n_vertices = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::uint64_t> degrees;  // degrees[0] unused

  void add_edge(std::uint32_t u, std::uint32_t v) {
    if (u > v) std::swap(u, v);
    if (u == 0 || v > n_vertices) throw std::invalid_argument("edge endpoint out of range");
    edges.emplace_back(u, v);
    if (u == v) {
      degrees[u] += 2;
    } else {
      degrees[u] += 1;
      degrees[v] += 1;
    }
  }

  std::uint64_t total_degree() const {
    std::uint64_t s = 0;
    for (std::uint32_t v = 1; v <= n_vertices; ++v) s += degrees[v];
    return s;
  }
};

inline std::map<std::uint64_t, std::uint64_t> degree_histogram(const MultiGraph& g) {
  std::map<std::uint64_t, std::uint64_t> h;
  for (std::uint32_t v = 1; v <= g.n_vertices; ++v) ++h[g.degrees[v]];
  return h;
}

}  // namespace papt
