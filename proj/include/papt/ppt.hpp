// Copyright (c) 2026 the papt authors. Apache-2.0 license; see LICENSE.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "papt/parallel.hpp"
#include "papt/rng.hpp"
#include "papt/spectral.hpp"

namespace papt {

/// Parameters of a Polya point tree run. b <= 1 means restricted mode
/// (child ages capped at 1); b > 1 truncates child ages at b * parent age
/// instead. pi is the edge retention probability.
struct PptParams {
  std::uint32_t m = 2;
  double delta = 0.0;
  double pi = 1.0;
  double b = 0.0;
  // The root has m older children like an O node but the construction gives
  // it no label. With this knob the root also draws the O strength
  // Gamma(m+delta+1); default is the un-size-biased Gamma(m+delta).
  bool root_as_o_node = false;

  double chi() const { return (m + delta) / (2.0 * m + delta); }
  bool truncated() const { return b > 1.0; }

  void validate() const {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    if (!(delta > -static_cast<double>(m))) throw std::invalid_argument("delta must exceed -m");
    if (pi < 0.0 || pi > 1.0) throw std::invalid_argument("pi must lie in [0,1]");
    if (b > 0.0 && b <= 1.0) throw std::invalid_argument("b must exceed 1 when set");
  }
};

struct Particle {
  double age = 0.0;
  Label label = Label::O;
};

namespace ppt_detail {

inline double sample_strength(Label label, const PptParams& p, CounterRng& rng) {
  const double shape = p.m + p.delta + (label == Label::O ? 1.0 : 0.0);
  return rng.gamma(shape);
}

/// Children of one node, already thinned by pi. Older children first (ages
/// age * U^{1/chi}, label O), then the Poisson Y-children in increasing age.
inline void append_children(double age, std::uint32_t m_minus, double strength,
                            const PptParams& p, CounterRng& rng, std::vector<Particle>& out) {
  if (!(age > 0.0)) throw std::invalid_argument("node age must be positive");
  const double chi = p.chi();
  for (std::uint32_t i = 0; i < m_minus; ++i) {
    const double child_age = age * std::pow(rng.uniform_pos(), 1.0 / chi);
    if (rng.uniform() < p.pi) out.push_back({child_age, Label::O});
  }
  if (p.pi <= 0.0) return;
  const double upper = p.truncated() ? p.b * age : 1.0;
  if (upper <= age) return;
  // Inverse of the thinned cumulative intensity pi * Gamma * ((x/A)^{1-chi} - 1).
  const double rate = p.pi * strength;
  double s = 0.0;
  for (;;) {
    s += rng.exponential();
    const double x = age * std::pow(1.0 + s / rate, 1.0 / (1.0 - chi));
    if (x > upper) return;
    out.push_back({x, Label::Y});
  }
}

}  // namespace ppt_detail

/// Children of a non-root node; strengths of the children are drawn lazily
/// when they are themselves expanded.
inline std::vector<Particle> sample_children(const Particle& node, double strength,
                                             const PptParams& p, CounterRng& rng) {
  p.validate();
  const std::uint32_t m_minus = node.label == Label::Y ? p.m - 1 : p.m;
  std::vector<Particle> out;
  ppt_detail::append_children(node.age, m_minus, strength, p, rng, out);
  return out;
}

struct SurvivalEstimate {
  double pi = 0.0;
  std::uint32_t generations = 0;
  std::uint64_t population_cap = 0;
  std::uint64_t replicas = 0;
  std::uint64_t survivals = 0;
  double survival_frac = 0.0;
  double ci_half_width = 0.0;  // binomial 95%

  void finish() {
    survival_frac = replicas ? static_cast<double>(survivals) / replicas : 0.0;
    ci_half_width =
        replicas ? 1.96 * std::sqrt(survival_frac * (1.0 - survival_frac) / replicas) : 0.0;
  }
};

namespace ppt_detail {

/// Grow one percolated tree breadth-first. Returns true if generation G is
/// reached with a live particle or the population ever reaches cap K.
inline bool replica_survives(const PptParams& p, std::uint32_t g_max, std::uint64_t k_cap,
                             CounterRng& rng) {
  std::vector<Particle> cur, next;
  const double root_age = rng.uniform_pos();
  const double root_strength = sample_strength(p.root_as_o_node ? Label::O : Label::Y, p, rng);
  append_children(root_age, p.m, root_strength, p, rng, cur);
  if (cur.size() >= k_cap) return true;
  for (std::uint32_t g = 2; g <= g_max; ++g) {
    if (cur.empty()) return false;
    next.clear();
    for (const auto& node : cur) {
      const double strength = sample_strength(node.label, p, rng);
      const std::uint32_t m_minus = node.label == Label::Y ? p.m - 1 : p.m;
      append_children(node.age, m_minus, strength, p, rng, next);
      if (next.size() >= k_cap) return true;
    }
    cur.swap(next);
  }
  return !cur.empty();
}

}  // namespace ppt_detail

/// Monte Carlo survival probability of the percolated tree. A replica counts
/// as surviving if it reaches generation G alive or its population hits K
/// (early-exit declare rule).
inline SurvivalEstimate estimate_survival(const PptParams& p, std::uint32_t generations,
                                          std::uint64_t population_cap, std::uint64_t replicas,
                                          std::uint64_t seed,
                                          unsigned threads = default_threads()) {
  p.validate();
  if (generations < 1 || population_cap < 1 || replicas < 1)
    throw std::invalid_argument("G, K, R must be >= 1");
  std::vector<std::uint8_t> survived(replicas, 0);
  parallel_for_index(replicas, threads, [&](std::uint64_t r) {
    CounterRng rng(seed_stream(seed, r));
    survived[r] = ppt_detail::replica_survives(p, generations, population_cap, rng) ? 1 : 0;
  });
  SurvivalEstimate est;
  est.pi = p.pi;
  est.generations = generations;
  est.population_cap = population_cap;
  est.replicas = replicas;
  for (auto s : survived) est.survivals += s;
  est.finish();
  return est;
}

/// Mean offspring of the elbow-children branching process that lower-bounds
/// the percolated tree for delta <= 0. Closed form from the kernel bound.
inline double elbow_bp_mean(double pi, double h_cut, std::uint32_t m, double delta) {
  if (delta > 0.0) throw std::domain_error("elbow bound requires delta <= 0");
  if (!(h_cut > 0.0) || !(h_cut < 1.0)) throw std::domain_error("h_cut must lie in (0,1)");
  if (!(pi > 0.0) || pi > 1.0) throw std::domain_error("pi must lie in (0,1]");
  const auto k = kernel_constants(m, delta);
  const double chi = k.chi;
  const double c2 = k.c_oy * k.c_yo * pi * pi;
  if (delta == 0.0) return c2 * std::log(1.0 / h_cut);
  return c2 * std::pow(h_cut, 2.0 * chi - 1.0) * (1.0 - std::pow(h_cut, 1.0 - 2.0 * chi)) /
         (chi * (1.0 - 2.0 * chi));
}

struct ElbowThreshold {
  double h_unit = 0.0;    // mean crosses 1 here
  double h_chosen = 0.0;  // mean = 2, a comfortably supercritical choice
  double mean_at_chosen = 0.0;
};

/// Bisect the (monotone decreasing in h) closed-form mean for the h where the
/// dominated single-type process turns supercritical. Exists for every
/// pi > 0 when delta <= 0: the mean diverges as h -> 0.
inline ElbowThreshold choose_elbow_threshold(double pi, std::uint32_t m, double delta) {
  if (delta > 0.0) throw std::domain_error("elbow bound requires delta <= 0");
  auto solve = [&](double target) {
    double lo = std::log(1e-300), hi = std::log(1.0 - 1e-12);
    if (elbow_bp_mean(pi, std::exp(lo), m, delta) < target)
      throw std::runtime_error("elbow mean does not reach target in representable range");
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (elbow_bp_mean(pi, std::exp(mid), m, delta) >= target)
        lo = mid;
      else
        hi = mid;
    }
    return std::exp(lo);
  };
  ElbowThreshold t;
  t.h_unit = solve(1.0);
  t.h_chosen = solve(2.0);
  t.mean_at_chosen = elbow_bp_mean(pi, t.h_chosen, m, delta);
  return t;
}

namespace ppt_detail {

/// One draw of the elbow-children count of a node held at age h: Y-children
/// by thinned Poisson on (h, 1], then each Y-child's O-children thinned and
/// kept only if their age falls at or below h.
inline std::uint64_t elbow_offspring_draw(double pi, double h_cut, std::uint32_t m, double delta,
                                          CounterRng& rng) {
  const double chi = (m + delta) / (2.0 * m + delta);
  const double strength = rng.gamma(m + delta + 1.0);  // the node is an O node
  std::uint64_t count = 0;
  if (pi <= 0.0 || m < 2) return 0;
  const double rate = pi * strength;
  double s = 0.0;
  for (;;) {
    s += rng.exponential();
    const double x = h_cut * std::pow(1.0 + s / rate, 1.0 / (1.0 - chi));
    if (x > 1.0) break;
    for (std::uint32_t i = 0; i + 1 < m; ++i) {  // Y-child has m-1 older children
      const double child_age = x * std::pow(rng.uniform_pos(), 1.0 / chi);
      if (child_age <= h_cut && rng.uniform() < pi) ++count;
    }
  }
  return count;
}

}  // namespace ppt_detail

struct MomentEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::uint64_t n = 0;
};

/// Empirical offspring moments of the elbow process; oracle is
/// elbow_bp_mean.
inline MomentEstimate elbow_offspring_moments(double pi, double h_cut, std::uint32_t m,
                                              double delta, std::uint64_t replicas,
                                              std::uint64_t seed,
                                              unsigned threads = default_threads()) {
  if (delta > 0.0) throw std::domain_error("elbow bound requires delta <= 0");
  std::vector<double> draws(replicas);
  parallel_for_index(replicas, threads, [&](std::uint64_t r) {
    CounterRng rng(seed_stream(seed, r));
    draws[r] = static_cast<double>(ppt_detail::elbow_offspring_draw(pi, h_cut, m, delta, rng));
  });
  MomentEstimate est;
  est.n = replicas;
  double sum = 0.0;
  for (double d : draws) sum += d;
  est.mean = sum / replicas;
  double q = 0.0;
  for (double d : draws) q += (d - est.mean) * (d - est.mean);
  est.se = replicas > 1 ? std::sqrt(q / (replicas - 1.0) / replicas) : 0.0;
  return est;
}

/// Survival of the dominated single-type elbow branching process.
inline SurvivalEstimate simulate_elbow_bp(double pi, double h_cut, std::uint32_t m, double delta,
                                          std::uint32_t generations, std::uint64_t population_cap,
                                          std::uint64_t replicas, std::uint64_t seed,
                                          unsigned threads = default_threads()) {
  if (delta > 0.0) throw std::domain_error("elbow bound requires delta <= 0");
  if (generations < 1 || population_cap < 1 || replicas < 1)
    throw std::invalid_argument("G, K, R must be >= 1");
  std::vector<std::uint8_t> survived(replicas, 0);
  parallel_for_index(replicas, threads, [&](std::uint64_t r) {
    CounterRng rng(seed_stream(seed, r));
    std::uint64_t pop = 1;
    bool alive = true;
    for (std::uint32_t g = 1; g <= generations && alive; ++g) {
      std::uint64_t next = 0;
      for (std::uint64_t i = 0; i < pop; ++i) {
        next += ppt_detail::elbow_offspring_draw(pi, h_cut, m, delta, rng);
        if (next >= population_cap) break;
      }
      if (next >= population_cap) {
        survived[r] = 1;
        alive = false;
      } else if (next == 0) {
        alive = false;
      }
      pop = next;
    }
    if (pop > 0 && !survived[r]) survived[r] = 1;  // reached G alive
  });
  SurvivalEstimate est;
  est.pi = pi;
  est.generations = generations;
  est.population_cap = population_cap;
  est.replicas = replicas;
  for (auto s : survived) est.survivals += s;
  est.finish();
  return est;
}

struct TrajectoryRow {
  std::uint32_t generation = 0;
  double particles_mean = 0.0;
  double mean = 0.0;  // score or martingale value
  double se = 0.0;
};

namespace ppt_detail {

constexpr std::uint64_t kTreeNodeBudget = 10'000'000;

struct WeightSpec {
  double w_o = 0.0;  // numerator weight for label O: w_s / sqrt(age)
  double w_y = 0.0;
  double root_w = 0.0;
  double norm = 1.0;  // per-generation multiplier (1 for the raw score, 1/rho_b else)
};

/// Per-replica trajectory of sum_particles w(y,t) / w(root), scaled by
/// norm^generation. Fills values[0..G].
inline void weighted_trajectory(const PptParams& p, const WeightSpec& ws, std::uint32_t g_max,
                                CounterRng& rng, std::vector<double>& values,
                                std::vector<double>& particle_counts) {
  std::vector<Particle> cur, next;
  const double root_age = rng.uniform_pos();
  const double root_strength = sample_strength(p.root_as_o_node ? Label::O : Label::Y, p, rng);
  const double root_h = ws.root_w / std::sqrt(root_age);
  values[0] = 1.0;
  particle_counts[0] = 1.0;
  append_children(root_age, p.m, root_strength, p, rng, cur);
  double scale = ws.norm;
  for (std::uint32_t g = 1; g <= g_max; ++g) {
    double sum = 0.0;
    for (const auto& node : cur)
      sum += (node.label == Label::O ? ws.w_o : ws.w_y) / std::sqrt(node.age);
    values[g] = scale * sum / root_h;
    particle_counts[g] = static_cast<double>(cur.size());
    scale *= ws.norm;
    if (g == g_max) break;
    next.clear();
    for (const auto& node : cur) {
      const double strength = sample_strength(node.label, p, rng);
      const std::uint32_t m_minus = node.label == Label::Y ? p.m - 1 : p.m;
      append_children(node.age, m_minus, strength, p, rng, next);
      if (next.size() > kTreeNodeBudget)
        throw std::runtime_error("tree population exceeded the node budget");
    }
    cur.swap(next);
  }
}

inline std::vector<TrajectoryRow> run_trajectory(const PptParams& p, const WeightSpec& ws,
                                                 std::uint32_t generations, std::uint64_t replicas,
                                                 std::uint64_t seed, unsigned threads) {
  const std::size_t cols = generations + 1;
  std::vector<double> vals(replicas * cols), counts(replicas * cols);
  parallel_for_index(replicas, threads, [&](std::uint64_t r) {
    CounterRng rng(seed_stream(seed, r));
    std::vector<double> v(cols), c(cols);
    weighted_trajectory(p, ws, generations, rng, v, c);
    std::copy(v.begin(), v.end(), vals.begin() + r * cols);
    std::copy(c.begin(), c.end(), counts.begin() + r * cols);
  });
  std::vector<TrajectoryRow> rows(cols);
  for (std::size_t g = 0; g < cols; ++g) {
    TrajectoryRow& row = rows[g];
    row.generation = static_cast<std::uint32_t>(g);
    double sv = 0.0, sc = 0.0;
    for (std::uint64_t r = 0; r < replicas; ++r) {
      sv += vals[r * cols + g];
      sc += counts[r * cols + g];
    }
    row.mean = sv / replicas;
    row.particles_mean = sc / replicas;
    double q = 0.0;
    for (std::uint64_t r = 0; r < replicas; ++r) {
      const double d = vals[r * cols + g] - row.mean;
      q += d * d;
    }
    row.se = replicas > 1 ? std::sqrt(q / (replicas - 1.0) / replicas) : 0.0;
  }
  return rows;
}

}  // namespace ppt_detail

/// Per-generation mean of the score X^(n) = sum f(age,label) / f(root) with
/// f(x,s) = p_s / sqrt(x), simulated in restricted mode. At pi = 1/r the
/// means are non-increasing (supermartingale).
inline std::vector<TrajectoryRow> score_trajectory(const PptParams& p, std::uint32_t generations,
                                                   std::uint64_t replicas, std::uint64_t seed,
                                                   unsigned threads = default_threads()) {
  p.validate();
  if (!(p.delta > 0.0)) throw std::domain_error("score weights require delta > 0");
  if (p.truncated()) throw std::domain_error("score runs use restricted mode (no b)");
  const auto s = spectral_norm(p.m, p.delta);
  ppt_detail::WeightSpec ws;
  ws.w_o = s.p[0];
  ws.w_y = s.p[1];
  ws.root_w = s.p[0];  // root scored as an O node
  ws.norm = 1.0;
  return ppt_detail::run_trajectory(p, ws, generations, replicas, seed, threads);
}

/// Per-generation mean of M^(n) = rho_b^{-n} sum h(age,label) / h(root) with
/// h(x,s) = u_s / sqrt(x) and rho_b = pi * r_b. The mean-one identity needs
/// the root to carry the O-node strength, so that knob is forced on here.
inline std::vector<TrajectoryRow> martingale_trajectory(const PptParams& params,
                                                        std::uint32_t generations,
                                                        std::uint64_t replicas, std::uint64_t seed,
                                                        unsigned threads = default_threads()) {
  PptParams p = params;
  p.root_as_o_node = true;
  p.validate();
  if (!(p.delta > 0.0)) throw std::domain_error("martingale weights require delta > 0");
  if (!p.truncated()) throw std::domain_error("martingale runs require b > 1");
  const auto t = truncated_spectral(p.m, p.delta, p.b);
  const double rho = p.pi * t.r_b;
  if (!(rho > 0.0)) throw std::domain_error("pi * r_b must be positive");
  ppt_detail::WeightSpec ws;
  ws.w_o = t.u[0];
  ws.w_y = t.u[1];
  ws.root_w = t.u[0];
  ws.norm = 1.0 / rho;
  return ppt_detail::run_trajectory(p, ws, generations, replicas, seed, threads);
}

}  // namespace papt
