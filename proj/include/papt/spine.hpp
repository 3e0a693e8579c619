// Copyright (c) 2026 the papt authors. Apache-2.0 license; see LICENSE.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "papt/rng.hpp"
#include "papt/spectral.hpp"

namespace papt {

/// 2-state label chain of the tilted spine together with its closed-form
/// stationary law. p[s][t] = (M_b)_{st} u_t / (lambda_b u_s).
struct SpineChain {
  double p[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  double stationary[2] = {0.0, 0.0};  // upsilon, sums to 1
  double chi = 0.0;
  double b = 0.0;
};

inline SpineChain transition_matrix(double m, double delta, double b) {
  const auto k = kernel_constants(m, delta);
  const auto t = truncated_spectral(m, delta, b);
  SpineChain c;
  c.chi = k.chi;
  c.b = b;
  const double q = t.q;
  const double mb[2][2] = {{k.c_oo, k.c_oy * q}, {k.c_yo, k.c_yy * q}};
  for (int s = 0; s < 2; ++s)
    for (int u = 0; u < 2; ++u) c.p[s][u] = mb[s][u] * t.u[u] / (t.lambda_m_b * t.u[s]);
  // upsilon_O / upsilon_Y = p_YO / p_OY for a 2-state chain.
  if (c.p[0][1] > 0.0) {
    const double ratio = c.p[1][0] / c.p[0][1];
    c.stationary[0] = ratio / (1.0 + ratio);
    c.stationary[1] = 1.0 / (1.0 + ratio);
  } else {  // m = 1: O is absorbing
    c.stationary[0] = 1.0;
    c.stationary[1] = 0.0;
  }
  return c;
}

inline void stationary_law(double m, double delta, double b, double out[2]) {
  const auto c = transition_matrix(m, delta, b);
  out[0] = c.stationary[0];
  out[1] = c.stationary[1];
}

/// Multiplicative age ratio along the spine, by inverse CDF.
/// R(O) in (0,1] with tail 1 - a^{chi-1/2}; R(Y) in (1,b) with tail
/// (a^{1/2-chi} - b^{1/2-chi}) / (1 - b^{1/2-chi}).
inline double sample_ratio(Label label, double chi, double b, CounterRng& rng) {
  const double e = 2.0 / (2.0 * chi - 1.0);
  if (label == Label::O) return std::pow(rng.uniform_pos(), e);
  const double beta = std::pow(b, 0.5 - chi);
  return std::pow(1.0 - rng.uniform() * (1.0 - beta), -e);
}

/// E[log R(label)] in closed form, written exactly as the source identity.
inline double expected_log_ratio(Label label, double chi, double b) {
  const double a = chi - 0.5;
  if (label == Label::O) return -1.0 / a;
  const double beta = std::pow(b, 0.5 - chi);
  return (1.0 / (1.0 - beta)) * ((1.0 - beta) / a - beta * std::log(b));
}

/// Same quantity, algebraically simplified; unit tests pin the two forms
/// together.
inline double expected_log_ratio_simplified(Label label, double chi, double b) {
  const double a = chi - 0.5;
  if (label == Label::O) return -1.0 / a;
  const double beta = std::pow(b, 0.5 - chi);
  return 1.0 / a - beta * std::log(b) / (1.0 - beta);
}

/// upsilon_O E[log R(O)] + upsilon_Y E[log R(Y)]: the a.s. limit of
/// log(X_n)/n. Strictly negative for finite b, tends to 0 as b grows.
inline double lyapunov_drift(double m, double delta, double b) {
  const auto c = transition_matrix(m, delta, b);
  return c.stationary[0] * expected_log_ratio(Label::O, c.chi, b) +
         c.stationary[1] * expected_log_ratio(Label::Y, c.chi, b);
}

struct SpineTrajectory {
  std::vector<Label> labels;    // t_0 .. t_n
  std::vector<double> log_age;  // log X_0 .. log X_n
  double drift_estimate = 0.0;  // log(X_n)/n, 0 when steps = 0
  double label_freq[2] = {0.0, 0.0};
};

/// Simulate the label chain and the multiplicative age recursion directly.
/// Starts from the stationary law with age 1.
inline SpineTrajectory simulate_spine(double m, double delta, double b, std::uint64_t steps,
                                      std::uint64_t seed) {
  const auto c = transition_matrix(m, delta, b);
  CounterRng rng(seed);
  SpineTrajectory tr;
  tr.labels.reserve(steps + 1);
  tr.log_age.reserve(steps + 1);
  Label cur = rng.uniform() < c.stationary[0] ? Label::O : Label::Y;
  double lx = 0.0;
  tr.labels.push_back(cur);
  tr.log_age.push_back(lx);
  std::uint64_t freq[2] = {0, 0};
  for (std::uint64_t i = 0; i < steps; ++i) {
    const int s = cur == Label::O ? 0 : 1;
    cur = rng.uniform() < c.p[s][0] ? Label::O : Label::Y;
    lx += std::log(sample_ratio(cur, c.chi, b, rng));
    tr.labels.push_back(cur);
    tr.log_age.push_back(lx);
    ++freq[cur == Label::O ? 0 : 1];
  }
  if (steps > 0) {
    tr.drift_estimate = lx / static_cast<double>(steps);
    tr.label_freq[0] = static_cast<double>(freq[0]) / steps;
    tr.label_freq[1] = static_cast<double>(freq[1]) / steps;
  }
  return tr;
}

struct SpineCheck {
  std::string name;
  double empirical = 0.0;
  double analytic = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SpineReport {
  bool applicable = false;
  std::vector<SpineCheck> checks;
  bool all_pass = false;
};

/// Bundle of empirical-vs-closed-form comparisons. Inapplicable (not an
/// error) when delta <= 0.
inline SpineReport empirical_vs_analytic_report(double m, double delta, double b,
                                                std::uint64_t steps, std::uint64_t ratio_draws,
                                                std::uint64_t seed) {
  SpineReport rep;
  if (!(delta > 0.0)) return rep;
  rep.applicable = true;
  const auto c = transition_matrix(m, delta, b);

  auto add = [&](const std::string& name, double emp, double ana, double tol) {
    rep.checks.push_back({name, emp, ana, tol, std::abs(emp - ana) <= tol});
  };

  const auto tr = simulate_spine(m, delta, b, steps, seed_stream(seed, 0));
  add("stationary_O", tr.label_freq[0], c.stationary[0], 0.01);
  add("stationary_Y", tr.label_freq[1], c.stationary[1], 0.01);
  const double drift = lyapunov_drift(m, delta, b);
  add("drift", tr.drift_estimate, drift, std::max(0.05 * std::abs(drift), 0.05));

  for (Label lab : {Label::O, Label::Y}) {
    CounterRng rng(seed_stream(seed, lab == Label::O ? 1 : 2));
    double sum = 0.0, sq = 0.0;
    for (std::uint64_t i = 0; i < ratio_draws; ++i) {
      const double lr = std::log(sample_ratio(lab, c.chi, b, rng));
      sum += lr;
      sq += lr * lr;
    }
    const double mean = sum / ratio_draws;
    const double var = std::max(0.0, sq / ratio_draws - mean * mean);
    const double se = std::sqrt(var / ratio_draws);
    add(lab == Label::O ? "mean_log_ratio_O" : "mean_log_ratio_Y", mean,
        expected_log_ratio(lab, c.chi, b), 3.0 * se);
  }

  rep.all_pass = true;
  for (const auto& ch : rep.checks) rep.all_pass = rep.all_pass && ch.pass;
  return rep;
}

}  // namespace papt
