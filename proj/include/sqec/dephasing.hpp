#pragma once

// Stochastic dephasing toolkit: telegraph and 1/f frequency-noise synthesis,
// exact piecewise-constant propagation of a driven spin, seeded ensemble
// averaging whose output is bitwise independent of thread count, echo-based
// noise-strength calibration, and the driven-dephasing parameter sweep.
//
// Conventions used throughout:
//   - The spin Hamiltonian is H = W sigma_x + dz(t) sigma_z, so a level pair
//     split by dz accumulates relative phase at rate 2 dz.
//   - A telegraph fluctuator contributes dz = delta_omega10 while "on" and 0
//     while "off" (asymmetric two-state noise).
//   - 1/f noise is a sum of log-spaced cosines with per-trace random phases
//     and per-trace log-uniform frequency jitter inside each bin; amplitudes
//     are chosen so the two-sided spectral density is 2 pi^2 S0 / |omega|.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqec/fitting.hpp"
#include "sqec/util.hpp"

namespace sqec {

using cdouble = std::complex<double>;

struct TelegraphParams {
  double delta_omega10 = 0.0;  // frequency shift while "on" (rad/us)
  double gamma_sw = 0.0;       // switching rate (1/us)

  void validate() const {
    if (delta_omega10 < 0.0 || !(gamma_sw > 0.0))
      throw std::invalid_argument(
          "TelegraphParams: need delta_omega10 >= 0 and gamma_sw > 0");
  }
};

struct OneOverFParams {
  double S0 = 0.0;        // noise power normalization (see header comment)
  double f_min = 0.0;     // synthesis band lower edge (1/us)
  double f_max = 0.0;     // synthesis band upper edge (1/us)
  int n_components = 0;   // number of cosine components

  void validate() const {
    if (S0 < 0.0) throw std::invalid_argument("OneOverFParams: S0 must be >= 0");
    if (!(f_min > 0.0) || !(f_max > f_min))
      throw std::invalid_argument("OneOverFParams: require 0 < f_min < f_max");
    if (n_components < 100)
      throw std::invalid_argument("OneOverFParams: need at least 100 components");
  }
};

struct NoiseTrace {
  double dt = 0.0;              // sample spacing (us)
  std::vector<double> samples;  // sigma_z coefficient dz at t = k*dt (rad/us)
};

enum class Protocol { free, rabi, echo };

namespace detail {

inline std::size_t trace_length(double t_max, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("noise trace: dt must be > 0");
  auto n = static_cast<long long>(std::llround(t_max / dt));
  if (n < 1) throw std::invalid_argument("noise trace: t_max shorter than one step");
  return static_cast<std::size_t>(n);
}

}  // namespace detail

// Telegraph process with exponential holding times at rate gamma_sw and an
// equiprobable seeded initial state.  Draw order (part of the determinism
// contract): one coin flip for the initial state, then successive
// exponential(gamma_sw) holding times consumed as the trace advances.
// Samples take the value at the start of each step.
inline NoiseTrace gen_telegraph(const TelegraphParams& p, double t_max, double dt,
                                std::uint64_t seed) {
  p.validate();
  if (dt > 0.1 / p.gamma_sw * (1.0 + 1e-12))
    throw std::invalid_argument("gen_telegraph: dt must be <= 0.1/gamma_sw");
  std::size_t n = detail::trace_length(t_max, dt);
  NoiseTrace trace;
  trace.dt = dt;
  trace.samples.resize(n);
  Rng rng(seed);
  bool on = rng.coin();
  double t_switch = rng.exponential(p.gamma_sw);
  for (std::size_t k = 0; k < n; ++k) {
    double t = k * dt;
    while (t_switch <= t) {
      on = !on;
      t_switch += rng.exponential(p.gamma_sw);
    }
    trace.samples[k] = on ? p.delta_omega10 : 0.0;
  }
  return trace;
}

// Sum of n_components cosines with log-spaced center frequencies, per-trace
// uniform phases and log-uniform frequency jitter within each bin.  With
// amplitude A^2 = 4 pi S0 ln(r) per component (r the bin ratio) the ensemble
// periodogram approaches the two-sided density 2 pi^2 S0 / omega across the
// band.  Evaluated with per-component complex rotation recurrences.
inline NoiseTrace gen_one_over_f(const OneOverFParams& p, double t_max, double dt,
                                 std::uint64_t seed) {
  p.validate();
  if (p.f_min > 1.0 / t_max * (1.0 + 1e-12))
    throw std::invalid_argument("gen_one_over_f: f_min must not exceed 1/t_max");
  if (dt > 0.5 / p.f_max)
    throw std::invalid_argument("gen_one_over_f: dt under-resolves f_max");
  std::size_t n = detail::trace_length(t_max, dt);
  NoiseTrace trace;
  trace.dt = dt;
  trace.samples.assign(n, 0.0);

  int m = p.n_components;
  double r = std::pow(p.f_max / p.f_min, 1.0 / m);
  double ln_r = std::log(r);
  double amp = std::sqrt(4.0 * pi * p.S0 * ln_r);

  std::vector<double> zr(m), zi(m), rr(m), ri(m);
  Rng rng(seed);
  for (int j = 0; j < m; ++j) {
    double phase = rng.uniform() * two_pi;
    double w = two_pi * p.f_min * std::pow(r, j + 0.5 + (rng.uniform() - 0.5));
    zr[j] = amp * std::cos(phase);
    zi[j] = amp * std::sin(phase);
    rr[j] = std::cos(w * dt);
    ri[j] = std::sin(w * dt);
  }
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (int j = 0; j < m; ++j) {
      s += zr[j];
      double t = zr[j] * rr[j] - zi[j] * ri[j];
      zi[j] = zr[j] * ri[j] + zi[j] * rr[j];
      zr[j] = t;
    }
    trace.samples[k] = s;
  }
  return trace;
}

namespace detail {

// One exact propagator step for H = W sigma_x + dz sigma_z over dt.
inline void spin_step(cdouble& p0, cdouble& p1, double W, double dz, double dt) {
  double nrm = std::sqrt(W * W + dz * dz);
  if (nrm == 0.0) return;
  double th = nrm * dt;
  double c = std::cos(th);
  double s = std::sin(th) / nrm;
  cdouble a(c, -s * dz);
  cdouble b(0.0, -s * W);
  cdouble q0 = a * p0 + b * p1;
  cdouble q1 = b * p0 + std::conj(a) * p1;
  p0 = q0;
  p1 = q1;
}

struct CoherenceSeries {
  std::vector<double> times;
  std::vector<cdouble> values;
};

// Computes the per-trace coherence at every stride-th index (index 0 and the
// final index always included).  Series index k corresponds to time k*dt for
// free and rabi, and to a total duration of 2*k*dt for echo (pi pulse at the
// midpoint k*dt).  free and echo are undriven pure-dephasing protocols and
// reject W != 0; their phase factors are exact integrals of the trace.
inline CoherenceSeries spin_series(const NoiseTrace& trace, double W,
                                   Protocol protocol, std::size_t stride) {
  if (!(trace.dt > 0.0) || trace.samples.empty())
    throw std::invalid_argument("evolve_spin: empty or invalid noise trace");
  if (protocol != Protocol::rabi && W != 0.0)
    throw std::invalid_argument(
        "evolve_spin: free/echo protocols require undriven evolution (W = 0)");
  if (stride == 0) stride = 1;
  std::size_t n = trace.samples.size();
  double dt = trace.dt;
  CoherenceSeries out;
  auto want = [&](std::size_t k, std::size_t last) {
    return k % stride == 0 || k == last;
  };

  if (protocol == Protocol::rabi) {
    cdouble p0(1.0 / std::sqrt(2.0), 0.0), p1 = p0;
    out.times.push_back(0.0);
    out.values.push_back(1.0);
    // Two-slot propagator memo: telegraph traces alternate between two dz
    // values, so the trig work per step collapses to a lookup there while
    // continuously-valued noise just recomputes.
    double memo_dz[2] = {std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::quiet_NaN()};
    cdouble memo_a[2], memo_b[2];
    int victim = 0;
    for (std::size_t k = 0; k < n; ++k) {
      double dz = trace.samples[k];
      int slot;
      if (dz == memo_dz[0]) {
        slot = 0;
      } else if (dz == memo_dz[1]) {
        slot = 1;
      } else {
        slot = victim;
        victim ^= 1;
        double nrm = std::sqrt(W * W + dz * dz);
        double s = nrm == 0.0 ? 0.0 : std::sin(nrm * dt) / nrm;
        memo_dz[slot] = dz;
        memo_a[slot] = cdouble(nrm == 0.0 ? 1.0 : std::cos(nrm * dt), -s * dz);
        memo_b[slot] = cdouble(0.0, -s * W);
      }
      cdouble q0 = memo_a[slot] * p0 + memo_b[slot] * p1;
      p1 = memo_b[slot] * p0 + std::conj(memo_a[slot]) * p1;
      p0 = q0;
      if (want(k + 1, n)) {
        out.times.push_back((k + 1) * dt);
        out.values.push_back(2.0 * std::conj(p0) * p1);
      }
    }
    return out;
  }

  if (protocol == Protocol::free) {
    double P = 0.0;
    out.times.push_back(0.0);
    out.values.push_back(1.0);
    for (std::size_t k = 0; k < n; ++k) {
      P += trace.samples[k] * dt;
      if (want(k + 1, n))  {
        out.times.push_back((k + 1) * dt);
        out.values.push_back(std::polar(1.0, 2.0 * P));
      }
    }
    return out;
  }

  // echo: phase 2*(P(2k) - 2*P(k)) via two integration cursors.
  std::size_t m = n / 2;
  if (m == 0) throw std::invalid_argument("evolve_spin: trace too short for echo");
  double P_half = 0.0, P_full = 0.0;
  out.times.push_back(0.0);
  out.values.push_back(1.0);
  for (std::size_t k = 0; k < m; ++k) {
    P_half += trace.samples[k] * dt;
    P_full += (trace.samples[2 * k] + trace.samples[2 * k + 1]) * dt;
    if (want(k + 1, m)) {
      out.times.push_back(2.0 * (k + 1) * dt);
      out.values.push_back(std::polar(1.0, 2.0 * (P_full - 2.0 * P_half)));
    }
  }
  return out;
}

// Windowed log-linear decay fit: least squares on log(y) over samples with
// lo < y < hi, truncated at the first crossing below lo so that the
// finite-ensemble noise floor (where only positive excursions would enter
// the log) cannot drag the fitted lifetime long.  Falls back to a wider
// window when the curve barely decays; reports an infinite lifetime when
// there is nothing to fit.
inline DecayFit windowed_decay_fit(const std::vector<double>& times,
                                   const std::vector<double>& values,
                                   double hi = 0.9, double lo = 0.1) {
  auto collect = [&](double h, double l) {
    std::pair<std::vector<double>, std::vector<double>> w;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (values[i] <= l && !w.first.empty()) break;
      if (values[i] < h && values[i] > l) {
        w.first.push_back(times[i]);
        w.second.push_back(std::log(values[i]));
      }
    }
    return w;
  };
  auto w = collect(hi, lo);
  if (w.first.size() < 8) w = collect(0.98, 0.05);
  if (w.first.size() < 8)
    return {values.empty() ? 0.0 : values.front(),
            std::numeric_limits<double>::infinity(), 0.0, 0.0};
  auto [intercept, slope] = linear_fit(w.first, w.second);
  if (slope >= 0.0)
    return {std::exp(intercept), std::numeric_limits<double>::infinity(), 0.0, 0.0};
  double F = std::exp(intercept);
  double T = -1.0 / slope;
  std::vector<double> resid(w.first.size());
  for (std::size_t i = 0; i < w.first.size(); ++i)
    resid[i] = F * std::exp(-w.first[i] / T) - std::exp(w.second[i]);
  return {F, T, 0.0, rms(resid)};
}

}  // namespace detail

// Coherence series for one noise realization.  Entry k is the coherence at
// time k*dt (free, rabi) or for total duration 2*k*dt (echo, with the pi
// rotation about x applied at the midpoint).  rabi returns <sigma_x(t)> from
// a sigma_x = +1 start; free returns the Ramsey phase factor; echo returns
// the recovered coherence.
inline std::vector<cdouble> evolve_spin(const NoiseTrace& trace, double W,
                                        Protocol protocol) {
  return detail::spin_series(trace, W, protocol, 1).values;
}

// First crossing of the curve below `level`, linearly interpolated; +infinity
// when the curve never crosses.
inline double crossing_time(const std::vector<double>& times,
                            const std::vector<double>& values, double level) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < level) {
      double y0 = values[i - 1], y1 = values[i];
      double f = (y0 - level) / (y0 - y1);
      return times[i - 1] + f * (times[i] - times[i - 1]);
    }
  }
  return std::numeric_limits<double>::infinity();
}

// Which noise generator an ensemble run should draw from, plus the common
// trace geometry.
struct NoiseSpec {
  enum class Kind { telegraph, one_over_f };
  Kind kind = Kind::telegraph;
  TelegraphParams telegraph{};
  OneOverFParams one_over_f{};
  double t_max = 0.0;
  double dt = 0.0;
};

inline NoiseSpec telegraph_spec(const TelegraphParams& p, double t_max, double dt) {
  NoiseSpec s;
  s.kind = NoiseSpec::Kind::telegraph;
  s.telegraph = p;
  s.t_max = t_max;
  s.dt = dt;
  return s;
}

inline NoiseSpec one_over_f_spec(const OneOverFParams& p, double t_max, double dt) {
  NoiseSpec s;
  s.kind = NoiseSpec::Kind::one_over_f;
  s.one_over_f = p;
  s.t_max = t_max;
  s.dt = dt;
  return s;
}

inline NoiseTrace gen_trace(const NoiseSpec& spec, std::uint64_t seed) {
  if (spec.kind == NoiseSpec::Kind::telegraph)
    return gen_telegraph(spec.telegraph, spec.t_max, spec.dt, seed);
  return gen_one_over_f(spec.one_over_f, spec.t_max, spec.dt, seed);
}

struct EnsembleResult {
  std::vector<double> times;
  std::vector<double> curve;  // rabi: Re<sigma_x>; free/echo: |mean coherence|
  DecayFit fit;               // windowed exponential fit of the curve
};

// Averages the per-trace coherence over n_traces realizations whose seeds are
// derived deterministically from the master seed.  Traces are summed in fixed
// chunks of 64 in index order, and the chunk partials are reduced
// sequentially, so the result is bitwise identical for every thread count and
// scheduling order.  record_stride = 0 picks a stride that keeps roughly 1500
// points of the curve.
inline EnsembleResult ensemble_average(const NoiseSpec& spec, double W,
                                       Protocol protocol, int n_traces,
                                       std::uint64_t seed, int n_threads = 1,
                                       std::size_t record_stride = 0) {
  if (n_traces < 50)
    throw std::invalid_argument("ensemble_average: need at least 50 traces");
  std::size_t n_steps = detail::trace_length(spec.t_max, spec.dt);
  std::size_t n_out = protocol == Protocol::echo ? n_steps / 2 : n_steps;
  if (record_stride == 0) record_stride = std::max<std::size_t>(1, n_out / 1500);

  constexpr std::size_t kChunk = 64;
  std::size_t n_chunks = (static_cast<std::size_t>(n_traces) + kChunk - 1) / kChunk;
  std::vector<std::vector<cdouble>> partial(n_chunks);
  std::vector<double> times;  // filled by the first trace of chunk 0

  parallel_for(n_chunks, n_threads, [&](std::size_t c) {
    std::size_t lo = c * kChunk;
    std::size_t hi = std::min<std::size_t>(n_traces, lo + kChunk);
    std::vector<cdouble>& acc = partial[c];
    for (std::size_t i = lo; i < hi; ++i) {
      NoiseTrace trace = gen_trace(spec, trace_seed(seed, i));
      auto series = detail::spin_series(trace, W, protocol, record_stride);
      if (acc.empty()) acc.assign(series.values.size(), cdouble(0.0, 0.0));
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += series.values[k];
      if (c == 0 && i == lo) times = std::move(series.times);
    }
  });

  EnsembleResult out;
  out.times = std::move(times);
  std::vector<cdouble> total(out.times.size(), cdouble(0.0, 0.0));
  for (const auto& acc : partial)
    for (std::size_t k = 0; k < total.size(); ++k) total[k] += acc[k];
  out.curve.resize(total.size());
  for (std::size_t k = 0; k < total.size(); ++k) {
    cdouble mean = total[k] / static_cast<double>(n_traces);
    out.curve[k] = protocol == Protocol::rabi ? mean.real() : std::abs(mean);
  }
  // Magnitude curves acquire a positive incoherent floor ~ n_traces^-1/2;
  // keep the fit window above it.  Driven decay under synthesized 1/f noise
  // follows a single exponential only down to ~e^-1 and then accelerates
  // (the per-trace noise is quasi-periodic with a finite band), so that fit
  // stops at the primary decade; telegraph decay stays exponential deep into
  // the tail and uses the full window.
  double lo;
  if (protocol == Protocol::rabi)
    lo = spec.kind == NoiseSpec::Kind::one_over_f ? 0.3 : 0.1;
  else
    lo = std::max(0.12, 3.0 / std::sqrt(static_cast<double>(n_traces)));
  out.fit = detail::windowed_decay_fit(out.times, out.curve, 0.9, lo);
  return out;
}

// Enough components that adjacent bins near the spin-locking resonance at
// 2W are spaced finer than the Fourier resolution of a t_max-long run, with
// a floor of 300 for band coverage.
inline int recommended_components(double f_min, double f_max, double W, double t_max) {
  double ln_range = std::log(f_max / f_min);
  double density = ln_range * 2.0 * W * 1.5 * t_max / two_pi;
  return std::max(300, static_cast<int>(std::ceil(density)));
}

// Predicted Rabi-limited dephasing time W / (2 pi^2 S0): the drive moves the
// sensitivity to the spectral density at the drive frequency, where the 1/f
// weight is 2 pi S0 / W, and the accumulated phase variance grows as
// pi S(W) t.
inline double rabi_T2_prediction(double S0, double W) {
  if (!(W > 0.0)) throw std::invalid_argument("rabi_T2_prediction: W must be > 0");
  if (!(S0 > 0.0)) throw std::invalid_argument("rabi_T2_prediction: S0 must be > 0");
  return W / (2.0 * pi * pi * S0);
}

// Finds S0 such that the simulated spin-echo coherence (undriven, ensemble
// of n_traces 1/f realizations over the given band) crosses 1/e at
// T2_echo_target.  Uses the Gaussian-decay scaling S0 ~ T2^-2 both for the
// analytic starting point and for the fixed-point update; every evaluation
// reuses the same master seed, so the iteration is deterministic.
inline double calibrate_S0_to_echo(double T2_echo_target, double f_min, double f_max,
                                   int n_components, std::uint64_t seed,
                                   int n_traces = 300, int n_threads = 1) {
  if (!(T2_echo_target > 0.0))
    throw std::invalid_argument("calibrate_S0_to_echo: target must be > 0");
  double t_max = 2.5 * T2_echo_target;
  double dt = 0.4 / (two_pi * f_max);
  double S0 = 1.0 / (4.0 * pi * std::log(2.0) * T2_echo_target * T2_echo_target);
  const double level = std::exp(-1.0);
  for (int iter = 0; iter < 12; ++iter) {
    OneOverFParams p{S0, f_min, f_max, n_components};
    EnsembleResult r = ensemble_average(one_over_f_spec(p, t_max, dt), 0.0,
                                        Protocol::echo, n_traces, seed, n_threads);
    double T = crossing_time(r.times, r.curve, level);
    if (!std::isfinite(T)) {
      S0 *= 4.0;  // noise too weak for the window; push the crossing inward
      continue;
    }
    if (std::abs(T / T2_echo_target - 1.0) <= 0.03) return S0;
    double ratio = T / T2_echo_target;
    S0 *= std::clamp(ratio * ratio, 0.25, 4.0);
  }
  throw std::runtime_error("calibrate_S0_to_echo: did not converge onto the target");
}

inline double calibrate_S0_to_echo(double T2_echo_target, std::uint64_t seed,
                                   int n_traces = 300, int n_threads = 1) {
  double t_max = 2.5 * T2_echo_target;
  return calibrate_S0_to_echo(T2_echo_target, 1.0 / (10.0 * t_max),
                              25.0 / T2_echo_target, 300, seed, n_traces, n_threads);
}

struct TelegraphSweepPoint {
  double W = 0.0;
  double delta_omega10 = 0.0;
  double gamma_sw = 0.0;
  double T2 = 0.0;
  DecayFit fit{};
};

struct TelegraphSweepResult {
  std::vector<TelegraphSweepPoint> points;
  bool has_power_law = false;  // regression needs >= 2 values per axis, >= 8 points
  std::array<double, 4> power_law{};  // T2 = a * W^b * delta_omega10^c * gamma_sw^d
  std::vector<std::string> warnings;
};

// Reference scale for the driven telegraph decay, used to size each run.
inline double telegraph_T2_reference(double W, double delta_omega10, double gamma_sw) {
  return 2.0 * (W * W + gamma_sw * gamma_sw) /
         (delta_omega10 * delta_omega10 * gamma_sw);
}

// Fits the driven dephasing time on every grid point (Rabi protocol,
// windowed exponential fit) and regresses the power law across the grid.
// Grid points outside the validated box W/2pi in [10, 37.5] MHz,
// delta_omega10/2pi in [0.1, 0.55] MHz, gamma_sw in [4, 22] /us are
// evaluated anyway but flagged with a warning.
inline TelegraphSweepResult telegraph_sweep(const std::vector<double>& W_grid,
                                            const std::vector<double>& domega_grid,
                                            const std::vector<double>& gsw_grid,
                                            int n_traces, std::uint64_t seed,
                                            int n_threads = 1) {
  if (W_grid.empty() || domega_grid.empty() || gsw_grid.empty())
    throw std::invalid_argument("telegraph_sweep: empty grid axis");
  TelegraphSweepResult out;
  std::vector<PowerLawSample> samples;
  std::size_t index = 0;
  for (double W : W_grid)
    for (double dom : domega_grid)
      for (double gsw : gsw_grid) {
        if (W < two_pi * 10.0 || W > two_pi * 37.5 || dom < two_pi * 0.1 ||
            dom > two_pi * 0.55 || gsw < 4.0 || gsw > 22.0)
          out.warnings.push_back(
              "point (W=" + format_g17(W) + ", domega=" + format_g17(dom) +
              ", gamma_sw=" + format_g17(gsw) + ") lies outside the validated box");
        double T2_ref = telegraph_T2_reference(W, dom, gsw);
        double dt = 0.1 / gsw;
        double t_max = 4.0 * T2_ref;
        TelegraphParams p{dom, gsw};
        EnsembleResult r =
            ensemble_average(telegraph_spec(p, t_max, dt), W, Protocol::rabi,
                             n_traces, trace_seed(seed, index), n_threads);
        if (!std::isfinite(r.fit.lifetime))
          throw std::runtime_error("telegraph_sweep: decay fit failed on a grid point");
        out.points.push_back({W, dom, gsw, r.fit.lifetime, r.fit});
        samples.push_back({W, dom, gsw, r.fit.lifetime});
        ++index;
      }
  if (W_grid.size() >= 2 && domega_grid.size() >= 2 && gsw_grid.size() >= 2 &&
      samples.size() >= 8) {
    out.power_law = fit_powerlaw_multi(samples);
    out.has_power_law = true;
  }
  return out;
}

}  // namespace sqec
