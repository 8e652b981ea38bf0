#pragma once

// Decay-law fitting (fixed-floor and free-floor exponentials) and the
// multivariate power-law regression used by the telegraph-noise sweeps.

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "sqec/util.hpp"

namespace sqec {

struct DecayFit {
  double amplitude = 0.0;     // F in  floor + F exp(-t/T)
  double lifetime = 0.0;      // T, us
  double floor = 0.0;         // asymptote (given or fitted)
  double residual_rms = 0.0;  // RMS misfit over the fitted window
};

namespace detail {

struct Window {
  std::vector<double> t, y;
};

inline Window cut_window(const std::vector<double>& times,
                         const std::vector<double>& values, double transient_cut) {
  if (times.size() != values.size())
    throw std::invalid_argument("fit: times/values length mismatch");
  Window w;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] >= transient_cut) {
      w.t.push_back(times[i]);
      w.y.push_back(values[i]);
    }
  }
  if (w.t.size() < 8)
    throw std::invalid_argument("fit: fewer than 8 samples after transient cut");
  return w;
}

inline double rms(const std::vector<double>& r) {
  double s = 0;
  for (double v : r) s += v * v;
  return std::sqrt(s / r.size());
}

}  // namespace detail

// Least-squares fit of  floor + F exp(-t/T)  with the floor supplied by the
// caller.  A log-domain linear fit seeds (F, T); Gauss-Newton refines them.
inline DecayFit fit_exponential(const std::vector<double>& times,
                                const std::vector<double>& values,
                                double transient_cut, double floor) {
  auto w = detail::cut_window(times, values, transient_cut);
  std::vector<double> logy(w.t.size());
  for (std::size_t i = 0; i < w.t.size(); ++i) {
    double d = w.y[i] - floor;
    if (d <= 0.0)
      throw std::invalid_argument("fit_exponential: values must stay above the floor");
    logy[i] = std::log(d);
  }
  auto [intercept, slope] = linear_fit(w.t, logy);
  double span = w.t.back() - w.t.front();
  if (slope >= -1e-12 / std::max(span, 1e-12))
    throw std::runtime_error("fit_exponential: lifetime unidentifiable (no decay)");
  double F = std::exp(intercept);
  double T = -1.0 / slope;

  for (int iter = 0; iter < 60; ++iter) {
    double a11 = 0, a12 = 0, a22 = 0, b1 = 0, b2 = 0;
    for (std::size_t i = 0; i < w.t.size(); ++i) {
      double e = std::exp(-w.t[i] / T);
      double r = floor + F * e - w.y[i];
      double jF = e;
      double jT = F * w.t[i] / (T * T) * e;
      a11 += jF * jF;
      a12 += jF * jT;
      a22 += jT * jT;
      b1 += jF * r;
      b2 += jT * r;
    }
    double det = a11 * a22 - a12 * a12;
    if (std::abs(det) < 1e-300) break;
    double dF = -(a22 * b1 - a12 * b2) / det;
    double dT = -(a11 * b2 - a12 * b1) / det;
    double scale = 1.0;
    while (T + scale * dT <= 0 && scale > 1e-6) scale *= 0.5;
    F += scale * dF;
    T += scale * dT;
    if (std::abs(dF * scale) < 1e-14 * std::abs(F) + 1e-300 &&
        std::abs(dT * scale) < 1e-14 * T)
      break;
  }

  std::vector<double> resid(w.t.size());
  for (std::size_t i = 0; i < w.t.size(); ++i)
    resid[i] = floor + F * std::exp(-w.t[i] / T) - w.y[i];
  return {F, T, floor, detail::rms(resid)};
}

// Three-parameter variant with the floor fitted as well (Levenberg-damped
// Gauss-Newton).  Used by the time-domain lifetime extractor, where the
// asymptote of the decay curve is not known a priori.  Reliable only on
// windows deep enough to constrain the floor (several lifetimes).
inline DecayFit fit_exponential_free_floor(const std::vector<double>& times,
                                           const std::vector<double>& values,
                                           double transient_cut) {
  auto w = detail::cut_window(times, values, transient_cut);
  std::size_t n = w.t.size();

  std::size_t tail = std::max<std::size_t>(3, n / 10);
  double c = 0.0;
  for (std::size_t i = n - tail; i < n; ++i) c += w.y[i];
  c /= tail;
  double amp0 = w.y.front() - c;
  if (std::abs(amp0) < 1e-300)
    throw std::runtime_error("fit_exponential_free_floor: flat series");

  std::vector<double> ts, logy;
  for (std::size_t i = 0; i < n; ++i) {
    double d = (w.y[i] - c) / amp0;
    if (d > 0.05) {
      ts.push_back(w.t[i]);
      logy.push_back(std::log(d * std::abs(amp0)));
    }
  }
  double F, T;
  if (ts.size() >= 3) {
    auto [intercept, slope] = linear_fit(ts, logy);
    if (slope >= 0) throw std::runtime_error("fit_exponential_free_floor: no decay");
    F = std::copysign(std::exp(intercept), amp0);
    T = -1.0 / slope;
  } else {
    F = amp0;
    T = (w.t.back() - w.t.front()) / 3.0;
  }

  auto sse = [&](double F_, double T_, double c_) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = c_ + F_ * std::exp(-w.t[i] / T_) - w.y[i];
      s += r * r;
    }
    return s;
  };

  double lambda = 1e-6;
  double cur = sse(F, T, c);
  for (int iter = 0; iter < 100; ++iter) {
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    Eigen::Vector3d g = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      double e = std::exp(-w.t[i] / T);
      double r = c + F * e - w.y[i];
      Eigen::Vector3d J(e, F * w.t[i] / (T * T) * e, 1.0);
      A += J * J.transpose();
      g += J * r;
    }
    bool stepped = false;
    for (int k = 0; k < 12; ++k) {
      Eigen::Matrix3d Ad = A + lambda * Eigen::Matrix3d(A.diagonal().asDiagonal());
      Eigen::Vector3d step = Ad.ldlt().solve(-g);
      double Fn = F + step(0), Tn = T + step(1), cn = c + step(2);
      if (Tn > 0) {
        double nxt = sse(Fn, Tn, cn);
        if (nxt <= cur) {
          F = Fn;
          T = Tn;
          c = cn;
          lambda = std::max(lambda * 0.3, 1e-12);
          stepped = true;
          if (cur - nxt < 1e-15 * (cur + 1e-300)) iter = 100;
          cur = nxt;
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!stepped) break;
  }

  std::vector<double> resid(n);
  for (std::size_t i = 0; i < n; ++i)
    resid[i] = c + F * std::exp(-w.t[i] / T) - w.y[i];
  return {F, T, c, detail::rms(resid)};
}

// One sample of a driven-dephasing sweep: (W, delta_omega10, gamma_sw, T2).
using PowerLawSample = std::array<double, 4>;

// Fits T2 = a * W^b * delta_omega10^c * gamma_sw^d by linear least squares on
// logarithms; returns (a, b, c, d).
inline std::array<double, 4> fit_powerlaw_multi(const std::vector<PowerLawSample>& samples) {
  if (samples.size() < 8)
    throw std::invalid_argument("fit_powerlaw_multi: need at least 8 samples");
  for (int axis = 0; axis < 3; ++axis) {
    std::set<double> vals;
    for (const auto& s : samples) vals.insert(s[axis]);
    if (vals.size() < 2)
      throw std::invalid_argument("fit_powerlaw_multi: design matrix rank-deficient "
                                  "(an axis takes a single value)");
  }
  Eigen::MatrixXd X(samples.size(), 4);
  Eigen::VectorXd y(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (int axis = 0; axis < 4; ++axis)
      if (samples[i][axis] <= 0)
        throw std::invalid_argument("fit_powerlaw_multi: all values must be positive");
    X(i, 0) = 1.0;
    X(i, 1) = std::log(samples[i][0]);
    X(i, 2) = std::log(samples[i][1]);
    X(i, 3) = std::log(samples[i][2]);
    y(i) = std::log(samples[i][3]);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < 4)
    throw std::invalid_argument("fit_powerlaw_multi: design matrix rank-deficient");
  Eigen::Vector4d beta = qr.solve(y);
  return {std::exp(beta(0)), beta(1), beta(2), beta(3)};
}

}  // namespace sqec
