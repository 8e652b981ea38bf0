#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "sqec/fitting.hpp"
#include "sqec/util.hpp"

using namespace sqec;
using Catch::Approx;

namespace {
std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}
}  // namespace

TEST_CASE("exponential fit recovers exact model") {
  auto t = linspace(0, 200, 201);
  std::vector<double> y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) y[i] = 0.5 + 0.5 * std::exp(-t[i] / 40.0);
  DecayFit f = fit_exponential(t, y, 0.0, 0.5);
  CHECK(f.lifetime == Approx(40.0).epsilon(1e-3));
  CHECK(f.amplitude == Approx(0.5).epsilon(1e-3));
  CHECK(f.residual_rms < 1e-10);
}

TEST_CASE("transient cut removes an early dip") {
  auto t = linspace(0, 200, 401);
  std::vector<double> y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    y[i] = 0.5 + 0.5 * std::exp(-t[i] / 40.0) - 0.2 * std::exp(-t[i] / 0.1);
  DecayFit f = fit_exponential(t, y, 1.0, 0.5);
  CHECK(f.lifetime == Approx(40.0).epsilon(0.01));
}

TEST_CASE("degenerate exponential inputs are rejected") {
  auto t = linspace(0, 10, 50);
  std::vector<double> flat(t.size(), 0.7);
  CHECK_THROWS(fit_exponential(t, flat, 0.0, 0.0));

  std::vector<double> below(t.size(), 0.2);
  CHECK_THROWS_AS(fit_exponential(t, below, 0.0, 0.5), std::invalid_argument);

  auto t_short = linspace(0, 1, 5);
  std::vector<double> y_short(5, 1.0);
  CHECK_THROWS_AS(fit_exponential(t_short, y_short, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("exponential fit is scale-equivariant") {
  auto t = linspace(0, 100, 101);
  std::vector<double> y(t.size()), y2(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    y[i] = 0.25 + 0.9 * std::exp(-t[i] / 17.0);
    y2[i] = 2.0 * y[i];  // power-of-two scale: exact in floating point
  }
  DecayFit a = fit_exponential(t, y, 0.0, 0.25);
  DecayFit b = fit_exponential(t, y2, 0.0, 0.5);
  CHECK(b.lifetime == Approx(a.lifetime).epsilon(1e-12));
  CHECK(b.amplitude == Approx(2.0 * a.amplitude).epsilon(1e-12));
}

TEST_CASE("free-floor fit identifies amplitude, lifetime and floor") {
  auto t = linspace(0, 60, 241);
  std::vector<double> y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) y[i] = 0.37 + 0.8 * std::exp(-t[i] / 12.0);
  DecayFit f = fit_exponential_free_floor(t, y, 0.0);
  CHECK(f.lifetime == Approx(12.0).epsilon(5e-3));
  CHECK(f.amplitude == Approx(0.8).epsilon(5e-3));
  CHECK(f.floor == Approx(0.37).margin(5e-3));
  CHECK(f.residual_rms < 1e-8);
}

TEST_CASE("power-law regression, noiseless") {
  std::vector<PowerLawSample> s;
  for (double W : {1.0, 2.0, 4.0})
    for (double dw : {0.5, 1.0, 2.0})
      for (double g : {1.0, 3.0, 9.0})
        s.push_back({W, dw, g, 2.30 * W * W / (dw * dw * g)});
  auto [a, b, c, d] = fit_powerlaw_multi(s);
  CHECK(a == Approx(2.30).epsilon(1e-10));
  CHECK(b == Approx(2.0).margin(1e-10));
  CHECK(c == Approx(-2.0).margin(1e-10));
  CHECK(d == Approx(-1.0).margin(1e-10));
}

TEST_CASE("power-law regression with multiplicative noise") {
  Rng rng(12345);
  std::vector<PowerLawSample> s;
  for (double W : {1.0, 2.0, 4.0})
    for (double dw : {0.5, 1.0, 2.0})
      for (double g : {1.0, 3.0, 9.0}) {
        double noise = 1.0 + 0.1 * (2.0 * rng.uniform() - 1.0);
        s.push_back({W, dw, g, 2.30 * W * W / (dw * dw * g) * noise});
      }
  auto [a, b, c, d] = fit_powerlaw_multi(s);
  (void)a;
  CHECK(b == Approx(2.0).margin(0.1));
  CHECK(c == Approx(-2.0).margin(0.1));
  CHECK(d == Approx(-1.0).margin(0.1));
}

TEST_CASE("power-law regression rejects degenerate grids") {
  std::vector<PowerLawSample> s;
  for (double W : {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0})
    s.push_back({W, 1.0, 1.0, W * W});
  CHECK_THROWS_AS(fit_powerlaw_multi(s), std::invalid_argument);

  std::vector<PowerLawSample> few = {{1, 1, 1, 1}, {2, 2, 2, 2}};
  CHECK_THROWS_AS(fit_powerlaw_multi(few), std::invalid_argument);
}
