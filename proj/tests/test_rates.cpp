#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "sqec/rates.hpp"

using namespace sqec;
using Catch::Approx;

namespace {
DeviceParams pinned_params(double T1P_us = 0.0) {
  DeviceParams p;
  p.W = two_pi * 35.0;
  p.delta = two_pi * 350.0;
  p.Omega = two_pi * 5.0;
  p.gamma_S = 50.0;
  p.gamma_P = T1P_us > 0 ? 1.0 / T1P_us : 0.0;
  return p;
}
}  // namespace

TEST_CASE("repair rate is a Lorentzian peaked at -(W + delta/2)") {
  DeviceParams p = pinned_params();
  double center = -(p.W + 0.5 * p.delta);
  double peak = gamma_R(center, p);
  CHECK(peak == Approx(4 * p.Omega * p.Omega * p.gamma_S /
                       (4 * p.Omega * p.Omega + p.gamma_S * p.gamma_S)));

  // Scan: maximum at the center, symmetric about it.
  for (double off : {10.0, 50.0, 200.0, 1000.0}) {
    CHECK(gamma_R(center + off, p) < peak);
    CHECK(gamma_R(center + off, p) == Approx(gamma_R(center - off, p)));
  }

  // Half maximum at offset sqrt(4 Omega^2 + Gamma_S^2)/2.
  double hw = 0.5 * std::sqrt(4 * p.Omega * p.Omega + p.gamma_S * p.gamma_S);
  CHECK(gamma_R(center + hw, p) == Approx(0.5 * peak).epsilon(1e-10));

  DeviceParams p0 = p;
  p0.Omega = 0;
  CHECK(gamma_R(center, p0) == 0.0);
  CHECK(gamma_R(0.0, p0) == 0.0);

  DeviceParams pg = p;
  pg.gamma_S = 0;
  CHECK_THROWS_AS(gamma_R(0.0, pg), std::invalid_argument);
}

TEST_CASE("pinned repair-rate values") {
  DeviceParams p = pinned_params();
  CHECK(gamma_R(-(p.W + 0.5 * p.delta), p) == Approx(30.6137).epsilon(1e-4));
  CHECK(gamma_R(p.W - 0.5 * p.delta, p) == Approx(0.252994).epsilon(1e-4));
  CHECK(gamma_R(p.W + 0.5 * p.delta, p) == Approx(7.08453e-3).epsilon(1e-4));
}

TEST_CASE("logical error rates") {
  DeviceParams p = pinned_params(10.0);
  auto [gx, gy] = gamma_E(p);
  CHECK(gx > gy);

  // Loss-free limit: the Y rate vanishes, the X rate keeps its constant
  // off-resonant floor.
  DeviceParams p0 = pinned_params();
  auto [gx0, gy0] = gamma_E(p0);
  CHECK(gy0 == 0.0);
  CHECK(gx0 == Approx(2.0 * gamma_R(p0.W + 0.5 * p0.delta, p0)));

  // Quadratic loss scaling when gamma_P dominates the wrong-branch rate.
  DeviceParams pa = pinned_params();
  pa.gamma_P = 10.0;
  DeviceParams pb = pa;
  pb.gamma_P = 20.0;
  CHECK(gamma_E(pb).second / gamma_E(pa).second == Approx(4.0).epsilon(0.02));

  // Same regime: gy ~ 4 gamma_P^2 / gamma_R(resonant).
  double approx_gy = 4.0 * pa.gamma_P * pa.gamma_P /
                     gamma_R(-(pa.W + 0.5 * pa.delta), pa);
  CHECK(gamma_E(pa).second == Approx(approx_gy).epsilon(0.02));
}

TEST_CASE("pinned lifetime predictions") {
  const double T1P[4] = {3, 10, 30, 100};
  const double T1L[4] = {49.93, 337.9, 1436.5, 5607.0};
  const double T2L[4] = {29.24, 58.38, 67.27, 69.70};
  for (int i = 0; i < 4; ++i) {
    RatePrediction r = predict_lifetimes(pinned_params(T1P[i]));
    CHECK(r.T1L_pred == Approx(T1L[i]).epsilon(1e-3));
    CHECK(r.T2L_pred == Approx(T2L[i]).epsilon(1e-3));
    CHECK(r.T1L_pred >= r.T2L_pred);
    CHECK(r.recapture_P > 0);
    CHECK(r.recapture_P < 1);
  }
}

TEST_CASE("ordering holds across random parameters") {
  Rng rng(777);
  for (int i = 0; i < 50; ++i) {
    DeviceParams p;
    p.W = rng.uniform(1.0, 300.0);
    p.delta = rng.uniform(0.0, 3000.0);
    p.Omega = rng.uniform(0.01, 50.0);
    p.gamma_S = rng.uniform(0.1, 100.0);
    p.gamma_P = rng.uniform(0.0, 2.0);
    RatePrediction r = predict_lifetimes(p);
    CHECK(r.T1L_pred >= r.T2L_pred);
    CHECK(r.recapture_P >= 0);
    CHECK(r.recapture_P <= 1);
  }
}

TEST_CASE("recapture probability") {
  DeviceParams p = pinned_params();
  double g_res = gamma_R(-(p.W + 0.5 * p.delta), p);
  p.gamma_P = g_res / 20.0;  // g_res = 10 * (2 gamma_P)
  RatePrediction r = predict_lifetimes(p);
  CHECK(r.recapture_P == Approx(10.0 / 11.0).epsilon(1e-12));

  p.gamma_P = 0.0;
  r = predict_lifetimes(p);
  CHECK(std::isinf(r.T1L_pred));
  CHECK(r.recapture_P == Approx(1.0));
}

TEST_CASE("device dephasing conversion") {
  CHECK(dephasing_device_conversion(8.0, NoiseKind::telegraph) == Approx(1.0));
  CHECK(dephasing_device_conversion(16.0, NoiseKind::one_over_f) == Approx(2.0));
  CHECK(dephasing_device_conversion(5.5, NoiseKind::one_over_f, 1, 1) == Approx(5.5));
  CHECK_THROWS_AS(dephasing_device_conversion(1.0, NoiseKind::telegraph, 0, 1),
                  std::invalid_argument);
}
