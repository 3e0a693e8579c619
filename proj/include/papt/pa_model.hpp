// Copyright (c) 2026 the papt authors. Apache-2.0 license; see LICENSE.
#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "papt/graph.hpp"
#include "papt/io.hpp"
#include "papt/rng.hpp"

namespace papt {

enum class Variant : char { A = 'a', B = 'b', D = 'd' };

inline char variant_letter(Variant v) { return static_cast<char>(v); }

inline Variant variant_from_letter(char c) {
  switch (c) {
    case 'a': return Variant::A;
    case 'b': return Variant::B;
    case 'd': return Variant::D;
    default: throw std::invalid_argument(std::string("unknown variant: ") + c);
  }
}

/// Parameters of a sequential preferential attachment run. The initial
/// 2-vertex graph is given explicitly as an edge multiset over {1,2}
/// (self-loops allowed); a1/a2 are derived from it.
struct PAConfig {
  Variant variant = Variant::B;
  std::uint32_t m = 2;
  double delta = 0.0;
  std::uint32_t n = 2;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> initial_edges;  // empty = m parallel (1,2)

  std::vector<std::pair<std::uint32_t, std::uint32_t>> effective_initial_edges() const {
    if (!initial_edges.empty()) return initial_edges;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> e;
    for (std::uint32_t i = 0; i < m; ++i) e.emplace_back(1, 2);
    return e;
  }

  void validate() const {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (!(delta > -static_cast<double>(m))) throw std::invalid_argument("delta must exceed -m");
    if (n < 2) throw std::invalid_argument("n must be >= 2");
    std::uint64_t a1 = 0, a2 = 0;
    for (auto [u, v] : effective_initial_edges()) {
      if (u < 1 || u > 2 || v < 1 || v > 2)
        throw std::invalid_argument("initial edges must connect vertices 1 and 2");
      a1 += (u == 1) + (v == 1);
      a2 += (u == 2) + (v == 2);
    }
    if (a1 == 0 && a2 == 0) throw std::invalid_argument("initial edge multiset is empty");
    if (std::min(a1, a2) > m)
      throw std::invalid_argument("at least one initial vertex must have degree <= m");
  }

  std::uint64_t a_sum() const {  // a_{[2]} = a1 + a2
    return 2 * effective_initial_edges().size();
  }
};

namespace pa_detail {

/// Fenwick tree over per-vertex attachment weights; supports prefix-sum
/// sampling in O(log n).
class WeightTree {
 public:
  explicit WeightTree(std::uint32_t n) : tree_(n + 1, 0.0) {}

  void add(std::uint32_t i, double w) {
    for (; i < tree_.size(); i += i & (~i + 1)) tree_[i] += w;
    total_ += w;
  }

  double total() const { return total_; }

  /// Smallest index whose prefix sum exceeds r (0 <= r < total).
  std::uint32_t find(double r) const {
    std::uint32_t pos = 0;
    std::uint32_t mask = 1;
    while ((mask << 1) < tree_.size()) mask <<= 1;
    for (; mask != 0; mask >>= 1) {
      std::uint32_t next = pos + mask;
      if (next < tree_.size() && tree_[next] <= r) {
        r -= tree_[next];
        pos = next;
      }
    }
    return pos + 1;
  }

 private:
  std::vector<double> tree_;
  double total_ = 0.0;
};

}  // namespace pa_detail

/// Closed-form normalizer c_{v,j} of the attachment step (v, j).
inline double attachment_normalizer(Variant variant, std::uint32_t m, double delta,
                                    std::uint64_t a_sum, std::uint32_t v, std::uint32_t j) {
  const double base = static_cast<double>(a_sum) + 2.0 * delta +
                      (2.0 * m + delta) * (static_cast<double>(v) - 3.0);
  switch (variant) {
    case Variant::A:
      return base + 2.0 * (j - 1.0) + 1.0 + j * delta / m;
    case Variant::B:
      return base + 2.0 * (j - 1.0) + (j - 1.0) * delta / m;
    case Variant::D:
      return base + (j - 1.0);
  }
  return 0.0;  // unreachable
}

/// Exact attachment probabilities of the j-th edge of vertex v, given the
/// degrees of vertices 1..v-1 and the endpoints vertex v has already placed
/// (self-loops counting 2). Entry [v] is the self-loop probability, zero for
/// variant D. Entries [1..v], index 0 unused.
inline std::vector<double> attachment_distribution(const std::vector<std::uint64_t>& degrees,
                                                   std::uint64_t own_endpoints, Variant variant,
                                                   std::uint32_t m, double delta,
                                                   std::uint64_t a_sum, std::uint32_t v,
                                                   std::uint32_t j) {
  if (v < 3 || j < 1 || j > m) throw std::invalid_argument("attachment step out of range");
  if (!(delta > -static_cast<double>(m))) throw std::invalid_argument("delta must exceed -m");
  if (degrees.size() < v) throw std::invalid_argument("degree array too short");
  std::vector<double> p(v + 1, 0.0);
  double sum = 0.0;
  for (std::uint32_t u = 1; u < v; ++u) {
    p[u] = static_cast<double>(degrees[u]) + delta;
    sum += p[u];
  }
  switch (variant) {
    case Variant::A:
      p[v] = static_cast<double>(own_endpoints) + 1.0 + j * delta / m;
      break;
    case Variant::B:
      p[v] = static_cast<double>(own_endpoints) + (j - 1.0) * delta / m;
      break;
    case Variant::D:
      p[v] = 0.0;
      break;
  }
  sum += p[v];
  const double c = attachment_normalizer(variant, m, delta, a_sum, v, j);
  if (std::abs(sum - c) > 1e-9 * std::max(1.0, std::abs(c)))
    throw std::logic_error("degree state inconsistent with closed-form normalizer");
  for (auto& x : p) x /= sum;
  return p;
}

/// Sequentially grow a preferential attachment multigraph. Bit-exact
/// reproducible from (config, seed).
inline MultiGraph generate(const PAConfig& cfg) {
  cfg.validate();
  MultiGraph g;
  g.n_vertices = cfg.n;
  g.degrees.assign(cfg.n + 1, 0);
  for (auto [u, v] : cfg.effective_initial_edges()) g.add_edge(u, v);

  CounterRng rng(cfg.seed);
  pa_detail::WeightTree weights(cfg.n);
  weights.add(1, static_cast<double>(g.degrees[1]) + cfg.delta);
  weights.add(2, static_cast<double>(g.degrees[2]) + cfg.delta);

  const double delta = cfg.delta;
  const std::uint32_t m = cfg.m;
  for (std::uint32_t v = 3; v <= cfg.n; ++v) {
    std::uint64_t own = 0;  // degree of v among its placed edges (self-loops count 2)
    for (std::uint32_t j = 1; j <= m; ++j) {
      double self_w = 0.0;
      switch (cfg.variant) {
        case Variant::A: self_w = static_cast<double>(own) + 1.0 + j * delta / m; break;
        case Variant::B: self_w = static_cast<double>(own) + (j - 1.0) * delta / m; break;
        case Variant::D: self_w = 0.0; break;
      }
      const double total = weights.total() + self_w;
      const double r = rng.uniform() * total;
      if (r >= weights.total()) {
        g.add_edge(v, v);
        own += 2;
      } else {
        const std::uint32_t u = weights.find(r);
        g.add_edge(u, v);
        weights.add(u, 1.0);
        own += 1;
      }
    }
    weights.add(v, static_cast<double>(g.degrees[v]) + delta);
  }
  return g;
}

/// Plain text graph format: header `n m delta variant seed`, then one
/// 1-indexed `u v` pair per line (self-loop as `v v`).
inline void write_graph(std::ostream& os, const MultiGraph& g, const PAConfig& cfg) {
  os << g.n_vertices << ' ' << cfg.m << ' ' << format_double(cfg.delta) << ' '
     << variant_letter(cfg.variant) << ' ' << cfg.seed << '\n';
  for (auto [u, v] : g.edges) os << u << ' ' << v << '\n';
}

inline MultiGraph read_graph(std::istream& is, PAConfig* cfg_out = nullptr) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("empty graph stream");
  std::istringstream hs(header);
  std::uint32_t n, m;
  double delta;
  char variant;
  std::uint64_t seed;
  if (!(hs >> n >> m >> delta >> variant >> seed))
    throw std::runtime_error("malformed graph header");
  MultiGraph g;
  g.n_vertices = n;
  g.degrees.assign(n + 1, 0);
  std::uint32_t u, v;
  while (is >> u >> v) g.add_edge(u, v);
  if (cfg_out) {
    cfg_out->variant = variant_from_letter(variant);
    cfg_out->m = m;
    cfg_out->delta = delta;
    cfg_out->n = n;
    cfg_out->seed = seed;
  }
  return g;
}

}  // namespace papt
