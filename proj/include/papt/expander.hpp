// Copyright (c) 2026 the papt authors. Apache-2.0 license; see LICENSE.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "papt/graph.hpp"
#include "papt/pa_model.hpp"
#include "papt/parallel.hpp"
#include "papt/rng.hpp"

namespace papt {

/// Edges with exactly one endpoint in S, counted with multiplicity.
/// Self-loops can never cross.
inline std::uint64_t cutset_size(const MultiGraph& g, const std::vector<std::uint8_t>& in_s) {
  if (in_s.size() != g.n_vertices + 1) throw std::invalid_argument("indicator length != n + 1");
  std::uint64_t cut = 0;
  for (auto [u, v] : g.edges)
    if (in_s[u] != in_s[v]) ++cut;
  return cut;
}

enum class CutMethod { Exact, SpectralBound };

struct CutReport {
  double epsilon = 0.0;
  double alpha = 0.0;
  CutMethod method = CutMethod::Exact;
  std::vector<std::uint32_t> witness;  // minimizing subset, Exact only
  double lambda2 = 0.0;                // SpectralBound only
  std::uint32_t iterations = 0;
};

constexpr std::uint32_t kExactAlphaMaxVertices = 24;

/// Exact edge-expander constant min_{eps n <= |S| <= n/2} cut(S)/|S| by full
/// subset enumeration. The Gray-code walk flips one vertex per step and
/// updates the cut incrementally, so each step costs one adjacency row.
inline CutReport exact_alpha(const MultiGraph& g, double epsilon) {
  const std::uint32_t n = g.n_vertices;
  if (n > kExactAlphaMaxVertices)
    throw std::invalid_argument("exact enumeration limited to 24 vertices; use the spectral bound");
  if (n < 2) throw std::invalid_argument("need at least 2 vertices");
  // Adjacency rows over non-loop edges, parallel edges repeated.
  std::vector<std::vector<std::uint32_t>> adj(n + 1);
  for (auto [u, v] : g.edges) {
    if (u == v) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  const std::uint32_t lo = static_cast<std::uint32_t>(std::ceil(epsilon * n - 1e-9));
  const std::uint32_t hi = n / 2;
  if (lo > hi) throw std::invalid_argument("size window empty for this epsilon");

  CutReport rep;
  rep.epsilon = epsilon;
  std::uint32_t mask = 0;  // bit v-1 set means vertex v in S
  std::uint64_t cut = 0;
  std::uint32_t size = 0;
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  const std::uint64_t total = std::uint64_t(1) << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const std::uint32_t bit = static_cast<std::uint32_t>(__builtin_ctzll(i));
    const std::uint32_t v = bit + 1;
    const bool entering = !(mask >> bit & 1u);
    mask ^= 1u << bit;
    size += entering ? 1 : -1;
    std::int64_t d = 0;
    for (std::uint32_t w : adj[v]) d += (mask >> (w - 1) & 1u) ? -1 : +1;
    cut += entering ? d : -d;
    if (size >= lo && size <= hi) {
      const double ratio = static_cast<double>(cut) / size;
      if (ratio < best) {
        best = ratio;
        best_mask = mask;
      }
    }
  }
  rep.alpha = best;
  for (std::uint32_t v = 1; v <= n; ++v)
    if (best_mask >> (v - 1) & 1u) rep.witness.push_back(v);
  return rep;
}

namespace expander_detail {

/// Weighted CSR adjacency; self-loops contribute 2 to their diagonal weight
/// so that row sums equal the multigraph degrees.
struct Csr {
  std::vector<std::uint64_t> row;   // size n+1 offsets over rows 0..n-1
  std::vector<std::uint32_t> col;
  std::vector<double> w;
  std::vector<double> deg;

  explicit Csr(const MultiGraph& g) {
    const std::uint32_t n = g.n_vertices;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> tmp(n);
    deg.assign(n, 0.0);
    for (auto [u, v] : g.edges) {
      if (u == v) {
        tmp[u - 1].emplace_back(u - 1, 2.0);
        deg[u - 1] += 2.0;
      } else {
        tmp[u - 1].emplace_back(v - 1, 1.0);
        tmp[v - 1].emplace_back(u - 1, 1.0);
        deg[u - 1] += 1.0;
        deg[v - 1] += 1.0;
      }
    }
    row.assign(n + 1, 0);
    for (std::uint32_t i = 0; i < n; ++i) row[i + 1] = row[i] + tmp[i].size();
    col.resize(row[n]);
    w.resize(row[n]);
    for (std::uint32_t i = 0; i < n; ++i) {
      std::uint64_t o = row[i];
      for (auto [c, x] : tmp[i]) {
        col[o] = c;
        w[o] = x;
        ++o;
      }
    }
  }
};

}  // namespace expander_detail

/// Certified lower bound alpha >= (lambda2 / 2) * d_min via the Cheeger
/// inequality for the normalized Laplacian: cut(S) >= Phi vol(S) >=
/// (lambda2/2) d_min |S|. lambda2 is found by power iteration on
/// 2I - L deflated against the known top eigenvector D^{1/2} 1.
inline CutReport spectral_alpha_bound(const MultiGraph& g, double epsilon,
                                      std::uint32_t max_iters = 100000) {
  const std::uint32_t n = g.n_vertices;
  if (n < 2) throw std::invalid_argument("need at least 2 vertices");
  expander_detail::Csr a(g);
  double d_min = std::numeric_limits<double>::infinity();
  for (double d : a.deg) {
    if (d <= 0.0) throw std::invalid_argument("isolated vertex: graph is not connected");
    d_min = std::min(d_min, d);
  }
  std::vector<double> sqrt_d(n), phi1(n);
  double phi_norm2 = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    sqrt_d[i] = std::sqrt(a.deg[i]);
    phi1[i] = sqrt_d[i];
    phi_norm2 += a.deg[i];
  }
  const double phi_norm = std::sqrt(phi_norm2);
  for (auto& x : phi1) x /= phi_norm;

  // B = 2I - L = I + D^{-1/2} W D^{-1/2}; spectrum in [0,2], top pair
  // (2, phi1). Deflation keeps the iterate orthogonal to phi1.
  std::vector<double> v(n), nv(n);
  CounterRng rng(0x9d5f3c2ab1e07u);
  for (auto& x : v) x = rng.uniform() - 0.5;
  auto project = [&](std::vector<double>& x) {
    double dot = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) dot += x[i] * phi1[i];
    for (std::uint32_t i = 0; i < n; ++i) x[i] -= dot * phi1[i];
  };
  project(v);
  double rq_prev = 0.0;
  std::uint32_t stable = 0;
  CutReport rep;
  rep.epsilon = epsilon;
  rep.method = CutMethod::SpectralBound;
  for (std::uint32_t it = 1; it <= max_iters; ++it) {
    for (std::uint32_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::uint64_t o = a.row[i]; o < a.row[i + 1]; ++o)
        s += a.w[o] * v[a.col[o]] / sqrt_d[a.col[o]];
      nv[i] = v[i] + s / sqrt_d[i];
    }
    project(nv);
    double num = 0.0, den = 0.0, nrm2 = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
      num += v[i] * nv[i];
      den += v[i] * v[i];
      nrm2 += nv[i] * nv[i];
    }
    rep.iterations = it;
    if (nrm2 == 0.0) throw std::runtime_error("eigen iteration collapsed to zero");
    const double rq = num / den;
    const double nrm = std::sqrt(nrm2);
    for (auto& x : nv) x /= nrm;
    v.swap(nv);
    if (it > 1 && std::abs(rq - rq_prev) < 1e-10 * std::max(std::abs(rq), 1e-300)) {
      if (++stable >= 5) {
        rep.lambda2 = 2.0 - rq;
        rep.alpha = 0.5 * rep.lambda2 * d_min;
        return rep;
      }
    } else {
      stable = 0;
    }
    rq_prev = rq;
  }
  throw std::runtime_error("eigen iteration did not converge within the iteration budget");
}

struct ExpansionRow {
  std::uint32_t n = 0;
  std::uint64_t replicas = 0;
  CutMethod method = CutMethod::Exact;
  double epsilon = 0.0;
  double alpha_probe = 0.0;
  double fail_frac = 0.0;   // fraction of replicas with measured value < probe
  double min_observed = 0.0;
};

/// Empirical check that small-alpha failures vanish as n grows: per n, the
/// fraction of replicas whose measured expansion falls below alpha_probe.
/// Exact enumeration up to 24 vertices, spectral lower bound beyond.
inline std::vector<ExpansionRow> expansion_experiment(const PAConfig& base, double epsilon,
                                                      double alpha_probe,
                                                      const std::vector<std::uint32_t>& n_grid,
                                                      std::uint64_t replicas, std::uint64_t seed,
                                                      unsigned threads = default_threads()) {
  if (base.m < 2) throw std::invalid_argument("m = 1 gives trees, which are not expanders");
  std::vector<ExpansionRow> rows;
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    const std::uint32_t n = n_grid[gi];
    const bool exact = n <= kExactAlphaMaxVertices;
    std::vector<double> measured(replicas);
    parallel_for_index(replicas, threads, [&](std::uint64_t r) {
      PAConfig cfg = base;
      cfg.n = n;
      cfg.seed = seed_stream(seed, gi * replicas + r);
      MultiGraph g = generate(cfg);
      measured[r] = exact ? exact_alpha(g, epsilon).alpha : spectral_alpha_bound(g, epsilon).alpha;
    });
    ExpansionRow row;
    row.n = n;
    row.replicas = replicas;
    row.method = exact ? CutMethod::Exact : CutMethod::SpectralBound;
    row.epsilon = epsilon;
    row.alpha_probe = alpha_probe;
    row.min_observed = std::numeric_limits<double>::infinity();
    std::uint64_t fails = 0;
    for (double x : measured) {
      if (x < alpha_probe) ++fails;
      row.min_observed = std::min(row.min_observed, x);
    }
    row.fail_frac = static_cast<double>(fails) / replicas;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace papt
