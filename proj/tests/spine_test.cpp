// Copyright (c) 2026 the papt authors. Apache-2.0 license; see LICENSE.
#include <algorithm>
#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "papt/spine.hpp"

using namespace papt;

TEST_CASE("transition matrix at the reference point") {
  auto c = transition_matrix(2, 1, 16);
  REQUIRE(c.p[0][0] == Catch::Approx(0.852258743711144).epsilon(1e-12));
  REQUIRE(c.p[0][1] == Catch::Approx(0.147741256288856).epsilon(1e-12));
  REQUIRE(c.p[1][0] == Catch::Approx(0.793632604687016).epsilon(1e-12));
  REQUIRE(c.p[0][0] + c.p[0][1] == Catch::Approx(1.0).epsilon(1e-14));
  REQUIRE(c.p[1][0] + c.p[1][1] == Catch::Approx(1.0).epsilon(1e-14));
  // p_OO = c_OO / lambda_b
  auto k = kernel_constants(2, 1);
  auto t = truncated_spectral(2, 1, 16);
  REQUIRE(c.p[0][0] == Catch::Approx(k.c_oo / t.lambda_m_b).epsilon(1e-13));
  // older steps dominate
  REQUIRE(c.p[0][0] + c.p[1][0] == Catch::Approx(1.64589134839816).epsilon(1e-12));
  REQUIRE(c.p[0][0] + c.p[1][0] > 1.0);
}

TEST_CASE("stationary law is a fixed point and matches the ratio identity") {
  auto c = transition_matrix(2, 1, 16);
  REQUIRE(c.stationary[0] == Catch::Approx(0.843057830248547).epsilon(1e-12));
  REQUIRE(c.stationary[1] == Catch::Approx(0.156942169751453).epsilon(1e-12));
  for (int t = 0; t < 2; ++t) {
    const double v = c.stationary[0] * c.p[0][t] + c.stationary[1] * c.p[1][t];
    REQUIRE(v == Catch::Approx(c.stationary[t]).epsilon(1e-12));
  }
  REQUIRE(c.stationary[0] > c.stationary[1]);
}

TEST_CASE("p_oo + p_yo exceeds one on a parameter grid") {
  for (double m : {2.0, 3.0, 5.0})
    for (double delta : {0.3, 1.0, 2.5})
      for (double b : {2.0, 16.0, 256.0}) {
        auto c = transition_matrix(m, delta, b);
        REQUIRE(c.p[0][0] + c.p[1][0] > 1.0);
      }
}

TEST_CASE("stationary law tends to (1/2, 1/2) as b grows") {
  auto c = transition_matrix(2, 1, 1e12);
  REQUIRE(std::abs(c.stationary[0] - 0.5) < 0.05);
}

TEST_CASE("expected log ratios: both algebraic forms and the reference values") {
  const double chi = 0.6;
  REQUIRE(expected_log_ratio(Label::O, chi, 16) == Catch::Approx(-10.0).epsilon(1e-13));
  REQUIRE(expected_log_ratio(Label::Y, chi, 16) ==
          Catch::Approx(1.32231588403289).epsilon(1e-12));
  for (double b : {2.0, 16.0, 1000.0})
    for (Label lab : {Label::O, Label::Y})
      REQUIRE(expected_log_ratio(lab, chi, b) ==
              Catch::Approx(expected_log_ratio_simplified(lab, chi, b)).epsilon(1e-13));
}

TEST_CASE("ratio samples stay in their supports") {
  CounterRng rng(6);
  for (int i = 0; i < 20000; ++i) {
    double ro = sample_ratio(Label::O, 0.6, 16, rng);
    REQUIRE(ro > 0.0);
    REQUIRE(ro <= 1.0);
    double ry = sample_ratio(Label::Y, 0.6, 16, rng);
    REQUIRE(ry > 1.0);
    REQUIRE(ry < 16.0);
  }
}

TEST_CASE("ratio samples pass a KS test against the closed CDF") {
  const double chi = 0.6, b = 16.0;
  const int n = 100000;
  const double crit = 1.628 / std::sqrt(static_cast<double>(n));  // 1% level
  for (Label lab : {Label::O, Label::Y}) {
    CounterRng rng(lab == Label::O ? 71 : 72);
    std::vector<double> xs(n);
    for (auto& x : xs) x = sample_ratio(lab, chi, b, rng);
    std::sort(xs.begin(), xs.end());
    const double beta = std::pow(b, 0.5 - chi);
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
      const double f = lab == Label::O ? std::pow(xs[i], chi - 0.5)
                                       : (1.0 - std::pow(xs[i], 0.5 - chi)) / (1.0 - beta);
      d = std::max(d, std::abs(f - (i + 1.0) / n));
      d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    REQUIRE(d < crit);
  }
}

TEST_CASE("lyapunov drift: reference value, sign and monotonicity in b") {
  REQUIRE(lyapunov_drift(2, 1, 16) == Catch::Approx(-8.22305117854854).epsilon(1e-12));
  double prev = -1e300;
  for (double b : {2.0, 16.0, 256.0, 4096.0}) {
    const double d = lyapunov_drift(2, 1, b);
    REQUIRE(d < 0.0);
    REQUIRE(d > prev);
    prev = d;
  }
}

TEST_CASE("simulated spine tracks the closed forms") {
  auto tr = simulate_spine(2, 1, 16, 100000, 13);
  const double drift = lyapunov_drift(2, 1, 16);
  REQUIRE(std::abs(tr.drift_estimate - drift) <= std::max(0.05 * std::abs(drift), 0.05));
  auto c = transition_matrix(2, 1, 16);
  REQUIRE(std::abs(tr.label_freq[0] - c.stationary[0]) < 0.01);
  // log-age moves down at O steps and up by less than log b at Y steps
  for (std::size_t i = 1; i < tr.labels.size(); ++i) {
    const double step = tr.log_age[i] - tr.log_age[i - 1];
    if (tr.labels[i] == Label::O) {
      REQUIRE(step <= 0.0);
    } else {
      REQUIRE(step > 0.0);
      REQUIRE(step < std::log(16.0));
    }
  }
}

TEST_CASE("report bundle passes on defaults and degrades cleanly") {
  auto rep = empirical_vs_analytic_report(2, 1, 16, 100000, 200000, 3);
  REQUIRE(rep.applicable);
  REQUIRE(rep.all_pass);
  auto na = empirical_vs_analytic_report(2, -0.5, 16, 1000, 1000, 3);
  REQUIRE_FALSE(na.applicable);
  REQUIRE_THROWS_AS(empirical_vs_analytic_report(2, 1, 0.5, 10, 10, 1), std::domain_error);
}
