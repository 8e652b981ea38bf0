#pragma once

// Config-driven experiment runners behind the CLI: reproducible parameter
// sweeps over the lifetime engine, dephasing ensembles, and the circuit
// calculators, with CSV/JSON emission.
//
// Every output file opens with '#'-prefixed header lines embedding the fully
// resolved configuration (defaults filled in, flag overrides applied) and the
// master seed, so a file by itself is enough to reproduce the run.  Numbers
// are printed with %.17g, lines end with LF, and row order follows the
// configured grid order regardless of thread count.

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sqec/circuit.hpp"
#include "sqec/dephasing.hpp"
#include "sqec/fitting.hpp"
#include "sqec/lindblad.hpp"
#include "sqec/model.hpp"
#include "sqec/qalgebra.hpp"
#include "sqec/rates.hpp"
#include "sqec/util.hpp"

namespace sqec {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Units.  Frequency-like inputs (W, delta, Omega, delta_omega10) can be given
// either as plain MHz (converted internally via x -> 2*pi*x rad/us) or
// directly as rad/us.  Rates (gamma_*, Gamma_sw) are 1/us in both
// conventions, and the circuit planner works in plain GHz throughout.
// ---------------------------------------------------------------------------

enum class UnitConvention { MHz_2pi, rad_per_us };

inline UnitConvention parse_units(const std::string& s) {
  if (s == "MHz") return UnitConvention::MHz_2pi;
  if (s == "rad_per_us") return UnitConvention::rad_per_us;
  throw std::invalid_argument("units must be \"MHz\" or \"rad_per_us\", got \"" + s + "\"");
}

inline double to_angular(double value, UnitConvention u) {
  return u == UnitConvention::MHz_2pi ? two_pi * value : value;
}

struct CliOverrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> method;
};

namespace detail {

inline json resolve_config(json cfg, const CliOverrides& o) {
  if (o.out) cfg["out"] = *o.out;
  if (o.seed) cfg["seed"] = *o.seed;
  if (o.threads) cfg["threads"] = *o.threads;
  if (o.method) cfg["method"] = *o.method;
  return cfg;
}

inline void write_header(std::ostream& os, const json& resolved) {
  os << "# " << resolved.value("experiment", "unknown") << " run\n";
  os << "# config: " << resolved.dump() << "\n";
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);  // binary keeps LF on every platform
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  return f;
}

// Frequency echo in both unit conventions, preserving the entered value
// byte-exactly in its own convention.
inline json echo_frequency(double entered, UnitConvention u) {
  json j;
  if (u == UnitConvention::MHz_2pi) {
    j["MHz"] = entered;
    j["rad_per_us"] = two_pi * entered;
  } else {
    j["rad_per_us"] = entered;
    j["MHz"] = entered / two_pi;
  }
  return j;
}

template <typename T>
T require(const json& cfg, const char* key) {
  if (!cfg.contains(key))
    throw std::invalid_argument(std::string("config missing required field \"") + key + "\"");
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string("config field \"") + key + "\" has the wrong type");
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Logical lifetimes for one device point, spectral and/or time-domain.
// ---------------------------------------------------------------------------

struct LifetimePoint {
  double T1L = 0.0, T2L = 0.0;  // integral lifetimes, us
  double fit_residual = 0.0;    // rms of the tail fit; 0 for the spectral path
};

// Liouvillian-spectrum route: exact integral lifetimes from the mode
// amplitudes of the two decay experiments.
inline LifetimePoint logical_lifetimes_spectral(const DeviceParams& p) {
  TensorSpace space = build_space(p);
  SpectralDecomposition sd = decompose_liouvillian(
      build_liouvillian(build_hamiltonian(p, space), collapse_operators(p, space)));
  auto [L0, L1] = logical_states(space);
  ComplexMatrix PL0 = projector(L0);
  ComplexVector sup = (L0 + L1) / std::sqrt(2.0);
  ComplexMatrix zz = embed(ztilde(), "l", space) * embed(ztilde(), "r", space);
  LifetimePoint out;
  out.T1L = integral_lifetime(sd, PL0, PL0);
  out.T2L = integral_lifetime(sd, projector(sup), zz);
  return out;
}

// Time-domain route: integrate both decay experiments out to a few lifetimes
// and take the integral lifetime of each sampled curve.  horizon_T1/T2 set
// the integration horizons (typically 4.5x the expected lifetime).
inline std::pair<LifetimePoint, EvolutionResult> logical_lifetimes_timedomain(
    const DeviceParams& p, double horizon_T1, double horizon_T2, double rtol,
    int n_points, int positivity_stride = 25) {
  if (n_points < 32)
    throw std::invalid_argument("logical_lifetimes_timedomain: need >= 32 grid points");
  TensorSpace space = build_space(p);
  ComplexMatrix H = build_hamiltonian(p, space);
  auto collapse = collapse_operators(p, space);
  auto [L0, L1] = logical_states(space);
  ComplexMatrix PL0 = projector(L0);
  ComplexVector sup = (L0 + L1) / std::sqrt(2.0);
  ComplexMatrix zz = embed(ztilde(), "l", space) * embed(ztilde(), "r", space);

  auto grid = [&](double t_end) {
    std::vector<double> t(n_points);
    for (int i = 0; i < n_points; ++i) t[i] = t_end * i / (n_points - 1);
    return t;
  };

  EvolutionResult r1 = evolve(PL0, H, collapse, grid(horizon_T1), rtol,
                              ObservableSet{{"F", PL0}}, -1.0, positivity_stride);
  EvolutionResult r2 = evolve(projector(sup), H, collapse, grid(horizon_T2), rtol,
                              ObservableSet{{"zz", zz}}, -1.0, positivity_stride);

  CurveLifetime c1 = integral_lifetime_from_curve(r1.times, r1.observables.at("F"));
  CurveLifetime c2 = integral_lifetime_from_curve(r2.times, r2.observables.at("zz"));
  LifetimePoint out;
  out.T1L = c1.T_int;
  out.T2L = c2.T_int;
  out.fit_residual = std::max(c1.tail.residual_rms, c2.tail.residual_rms);

  // Fold the worst invariant excursions of both runs into one report.
  r1.trace_err_max = std::max(r1.trace_err_max, r2.trace_err_max);
  r1.herm_defect_max = std::max(r1.herm_defect_max, r2.herm_defect_max);
  r1.min_eigenvalue = std::min(r1.min_eigenvalue, r2.min_eigenvalue);
  return {out, r1};
}

// ---------------------------------------------------------------------------
// lifetimes: sweep gamma_P = 1/T1P over a grid, emit one CSV.
// ---------------------------------------------------------------------------

inline std::vector<std::string> run_sweep_lifetimes(const json& config,
                                                    const CliOverrides& o = {}) {
  json cfg = detail::resolve_config(config, o);
  cfg["experiment"] = "lifetimes";
  UnitConvention units = parse_units(cfg.value("units", "MHz"));

  DeviceParams base;
  base.W = to_angular(detail::require<double>(cfg, "W"), units);
  base.delta = to_angular(detail::require<double>(cfg, "delta"), units);
  base.Omega = to_angular(detail::require<double>(cfg, "Omega"), units);
  base.gamma_S = detail::require<double>(cfg, "gamma_S");
  base.n_shadow = cfg.value("n_shadow", 1);
  base.validate();

  std::vector<double> t1p_grid = detail::require<std::vector<double>>(cfg, "T1P_grid");
  if (t1p_grid.empty())
    throw std::invalid_argument("lifetimes: T1P_grid must be non-empty");
  for (double t : t1p_grid)
    if (!(t > 0)) throw std::invalid_argument("lifetimes: T1P values must be positive");

  std::string method = cfg.value("method", "spectral");
  if (method != "spectral" && method != "timedomain" && method != "both")
    throw std::invalid_argument("lifetimes: method must be spectral, timedomain or both");
  double rtol = cfg.value("rtol", 1e-7);
  double horizon = cfg.value("horizon_lifetimes", 4.5);
  int n_points = cfg.value("n_points", 241);
  cfg["units"] = units == UnitConvention::MHz_2pi ? "MHz" : "rad_per_us";
  cfg["method"] = method;
  cfg["rtol"] = rtol;
  cfg["horizon_lifetimes"] = horizon;
  cfg["n_points"] = n_points;
  cfg["n_shadow"] = base.n_shadow;

  std::string out_path = cfg.value("out", "lifetimes.csv");
  std::ofstream f = detail::open_out(out_path);
  detail::write_header(f, cfg);
  f << "T1P_us,T1L_us,T2L_us,T1L_over_T1P,T2L_over_T1P,"
       "T1L_pred_us,T2L_pred_us,fit_residual,method\n";

  auto emit = [&](double t1p, const LifetimePoint& pt, const RatePrediction& pred,
                  const char* tag) {
    f << format_g17(t1p) << ',' << format_g17(pt.T1L) << ',' << format_g17(pt.T2L)
      << ',' << format_g17(pt.T1L / t1p) << ',' << format_g17(pt.T2L / t1p) << ','
      << format_g17(pred.T1L_pred) << ',' << format_g17(pred.T2L_pred) << ','
      << format_g17(pt.fit_residual) << ',' << tag << '\n';
  };

  for (double t1p : t1p_grid) {
    DeviceParams p = base;
    p.gamma_P = 1.0 / t1p;
    RatePrediction pred = predict_lifetimes(p);
    std::optional<LifetimePoint> spectral;
    if (method != "timedomain") {
      spectral = logical_lifetimes_spectral(p);
      emit(t1p, *spectral, pred, "spectral");
    }
    if (method != "spectral") {
      double h1 = horizon * (spectral ? spectral->T1L : pred.T1L_pred);
      double h2 = horizon * (spectral ? spectral->T2L : pred.T2L_pred);
      auto [pt, inv] = logical_lifetimes_timedomain(p, h1, h2, rtol, n_points);
      (void)inv;  // evolve() already enforces the invariant budgets
      emit(t1p, pt, pred, "timedomain");
    }
  }
  f.close();
  return {out_path};
}

// ---------------------------------------------------------------------------
// dephasing: 1/f Rabi sweeps over W, or telegraph grids with the power-law
// regression.  Emits <out>_curves.csv/<out>_fits.csv (1/f) or
// <out>_sweep.csv/<out>_regression.json (telegraph).
// ---------------------------------------------------------------------------

// Band and step recipe for a driven 1/f ensemble at drive W (rad/us):
// horizon a few predicted lifetimes, synthesis band reaching 100x the drive
// frequency, component count from the density rule.
struct OneOverFRecipe {
  OneOverFParams params;
  double t_max = 0.0, dt = 0.0;
};

inline OneOverFRecipe one_over_f_recipe(double S0, double W, double t_max) {
  if (!(t_max > 0)) throw std::invalid_argument("one_over_f_recipe: t_max must be positive");
  OneOverFRecipe r;
  r.t_max = t_max;
  double f_min = 1.0 / (10.0 * t_max);
  double f_max = std::max(100.0 * W / two_pi, 25.0 * f_min);
  r.params = OneOverFParams{S0, f_min, f_max,
                            recommended_components(f_min, f_max, W, t_max)};
  r.dt = 0.5 / (two_pi * f_max);
  return r;
}

inline std::vector<std::string> run_dephasing(const json& config,
                                              const CliOverrides& o = {}) {
  json cfg = detail::resolve_config(config, o);
  cfg["experiment"] = "dephasing";
  std::string kind = detail::require<std::string>(cfg, "kind");
  UnitConvention units = parse_units(cfg.value("units", "MHz"));
  std::uint64_t seed = detail::require<std::uint64_t>(cfg, "seed");
  int threads = cfg.value("threads", 1);
  int n_traces = cfg.value("n_traces", 200);
  std::string prefix = cfg.value("out", "dephasing");
  cfg["threads"] = threads;
  cfg["n_traces"] = n_traces;

  if (kind == "one_over_f") {
    std::vector<double> w_grid = detail::require<std::vector<double>>(cfg, "W_grid");
    if (w_grid.empty()) throw std::invalid_argument("dephasing: W_grid must be non-empty");

    double S0;
    if (cfg.contains("S0")) {
      S0 = detail::require<double>(cfg, "S0");
      if (!(S0 > 0)) throw std::invalid_argument("dephasing: S0 must be positive");
    } else {
      double target = detail::require<double>(cfg, "target_T2_echo_us");
      S0 = calibrate_S0_to_echo(target, trace_seed(seed, 0xca11b), 300, threads);
    }
    cfg["S0"] = S0;

    // Horizon rule per point; W = 0 rows borrow the band of the smallest
    // driven point so the undriven reference curve is still well defined.
    double w_ref = 0.0;
    for (double w : w_grid) {
      double wa = to_angular(w, units);
      if (wa > 0 && (w_ref == 0.0 || wa < w_ref)) w_ref = wa;
    }
    if (w_ref == 0.0)
      throw std::invalid_argument("dephasing: W_grid needs at least one nonzero entry");

    std::string curves_path = prefix + "_curves.csv";
    std::string fits_path = prefix + "_fits.csv";
    std::ofstream fc = detail::open_out(curves_path);
    std::ofstream ff = detail::open_out(fits_path);
    detail::write_header(fc, cfg);
    detail::write_header(ff, cfg);
    fc << "W,time_us,coherence\n";
    ff << "W,protocol,S0,n_traces,T2_us,T2_pred_us,amplitude,floor,residual_rms\n";

    for (std::size_t i = 0; i < w_grid.size(); ++i) {
      double W = to_angular(w_grid[i], units);
      double W_eff = W > 0 ? W : w_ref;
      double t_max = 2.5 * rabi_T2_prediction(S0, W_eff);
      OneOverFRecipe rec = one_over_f_recipe(S0, W_eff, t_max);
      NoiseSpec spec = one_over_f_spec(rec.params, rec.t_max, rec.dt);
      EnsembleResult ens = ensemble_average(spec, W, Protocol::rabi, n_traces,
                                            trace_seed(seed, i), threads);
      for (std::size_t k = 0; k < ens.times.size(); ++k)
        fc << format_g17(w_grid[i]) << ',' << format_g17(ens.times[k]) << ','
           << format_g17(ens.curve[k]) << '\n';
      double pred = W > 0 ? rabi_T2_prediction(S0, W)
                          : std::numeric_limits<double>::infinity();
      ff << format_g17(w_grid[i]) << ",rabi," << format_g17(S0) << ','
         << n_traces << ',' << format_g17(ens.fit.lifetime) << ','
         << format_g17(pred) << ',' << format_g17(ens.fit.amplitude) << ','
         << format_g17(ens.fit.floor) << ',' << format_g17(ens.fit.residual_rms)
         << '\n';
    }
    fc.close();
    ff.close();
    return {curves_path, fits_path};
  }

  if (kind == "telegraph") {
    auto get_grid = [&](const char* key) {
      auto g = detail::require<std::vector<double>>(cfg, key);
      if (g.empty()) throw std::invalid_argument(std::string("dephasing: ") + key + " empty");
      return g;
    };
    std::vector<double> w_grid = get_grid("W_grid");
    std::vector<double> dom_grid = get_grid("delta_omega_grid");
    std::vector<double> gsw_grid = get_grid("gamma_sw_grid");

    std::vector<double> w_ang(w_grid.size()), dom_ang(dom_grid.size());
    for (std::size_t i = 0; i < w_grid.size(); ++i) w_ang[i] = to_angular(w_grid[i], units);
    for (std::size_t i = 0; i < dom_grid.size(); ++i)
      dom_ang[i] = to_angular(dom_grid[i], units);

    TelegraphSweepResult sw =
        telegraph_sweep(w_ang, dom_ang, gsw_grid, n_traces, seed, threads);

    std::string sweep_path = prefix + "_sweep.csv";
    std::string reg_path = prefix + "_regression.json";
    std::ofstream fs = detail::open_out(sweep_path);
    detail::write_header(fs, cfg);
    fs << "W,delta_omega10,gamma_sw,T2_us,T2_reference_us,residual_rms\n";
    for (const auto& pt : sw.points) {
      double w_out = units == UnitConvention::MHz_2pi ? pt.W / two_pi : pt.W;
      double dom_out =
          units == UnitConvention::MHz_2pi ? pt.delta_omega10 / two_pi : pt.delta_omega10;
      fs << format_g17(w_out) << ',' << format_g17(dom_out) << ','
         << format_g17(pt.gamma_sw) << ',' << format_g17(pt.T2) << ','
         << format_g17(telegraph_T2_reference(pt.W, pt.delta_omega10, pt.gamma_sw))
         << ',' << format_g17(pt.fit.residual_rms) << '\n';
    }
    fs.close();

    json reg;
    reg["config"] = cfg;
    reg["n_points"] = sw.points.size();
    reg["warnings"] = sw.warnings;
    if (sw.has_power_law) {
      reg["power_law"] = {{"prefactor", sw.power_law[0]},
                          {"W_exponent", sw.power_law[1]},
                          {"delta_omega_exponent", sw.power_law[2]},
                          {"gamma_sw_exponent", sw.power_law[3]}};
    } else {
      reg["power_law_note"] = "grid too small for the power-law regression";
    }
    json pts = json::array();
    for (const auto& pt : sw.points) {
      pts.push_back({{"W_rad_per_us", pt.W},
                     {"delta_omega10_rad_per_us", pt.delta_omega10},
                     {"gamma_sw_per_us", pt.gamma_sw},
                     {"T2_us", pt.T2}});
    }
    reg["points"] = pts;
    std::ofstream fr = detail::open_out(reg_path);
    fr << reg.dump(2) << "\n";
    fr.close();
    return {sweep_path, reg_path};
  }

  throw std::invalid_argument("dephasing: kind must be one_over_f or telegraph");
}

// ---------------------------------------------------------------------------
// rates: closed-form predictions for one device point, JSON report.
// ---------------------------------------------------------------------------

inline std::vector<std::string> run_rates(const json& config, const CliOverrides& o = {}) {
  json cfg = detail::resolve_config(config, o);
  cfg["experiment"] = "rates";
  UnitConvention units = parse_units(cfg.value("units", "MHz"));

  double W_in = detail::require<double>(cfg, "W");
  double delta_in = detail::require<double>(cfg, "delta");
  double Omega_in = detail::require<double>(cfg, "Omega");
  DeviceParams p;
  p.W = to_angular(W_in, units);
  p.delta = to_angular(delta_in, units);
  p.Omega = to_angular(Omega_in, units);
  p.gamma_S = detail::require<double>(cfg, "gamma_S");
  if (cfg.contains("T1P_us"))
    p.gamma_P = 1.0 / detail::require<double>(cfg, "T1P_us");
  else
    p.gamma_P = detail::require<double>(cfg, "gamma_P");
  p.validate();
  RatePrediction pred = predict_lifetimes(p);

  json out;
  out["config"] = cfg;
  out["inputs"] = {{"W", detail::echo_frequency(W_in, units)},
                   {"delta", detail::echo_frequency(delta_in, units)},
                   {"Omega", detail::echo_frequency(Omega_in, units)},
                   {"gamma_S_per_us", p.gamma_S},
                   {"gamma_P_per_us", p.gamma_P}};
  out["derived"] = {{"gamma_R_resonant_per_us", pred.gamma_R_resonant},
                    {"gamma_EX_per_us", pred.gamma_EX},
                    {"gamma_EY_per_us", pred.gamma_EY},
                    {"T1L_pred_us", pred.T1L_pred},
                    {"T2L_pred_us", pred.T2L_pred},
                    {"recapture_P", pred.recapture_P}};

  std::string out_path = cfg.value("out", "rates.json");
  std::ofstream f = detail::open_out(out_path);
  f << out.dump(2) << "\n";
  f.close();
  return {out_path};
}

// ---------------------------------------------------------------------------
// plan: two-tone drive plan, JSON report with the collision table.
// ---------------------------------------------------------------------------

inline std::vector<std::string> run_plan(const json& config, const CliOverrides& o = {}) {
  json cfg = detail::resolve_config(config, o);
  cfg["experiment"] = "plan";
  double wl = detail::require<double>(cfg, "omega_l_GHz");
  double wr = detail::require<double>(cfg, "omega_r_GHz");
  double d = detail::require<double>(cfg, "delta_GHz");
  DrivePlan plan = plan_w_drive(wl, wr, d);

  json out;
  out["config"] = cfg;
  out["inputs"] = {{"omega_l_GHz", wl}, {"omega_r_GHz", wr}, {"delta_GHz", d}};
  out["tones_GHz"] = {plan.tones[0].frequency, plan.tones[1].frequency};
  out["targets_GHz"] = {plan.targets[0], plan.targets[1]};
  out["min_detuning_GHz"] = plan.min_detuning;
  out["min_detuning_third_order_GHz"] = plan.min_detuning_third_order;
  out["min_detuning_vs_targets_GHz"] = plan.min_detuning_vs_targets;
  out["warn_threshold_GHz"] = kCollisionWarnThreshold;
  out["recommended_pass_GHz"] = 1.0;
  json rows = json::array();
  for (const auto& r : plan.collision_report) {
    rows.push_back({{"product", r.product},
                    {"n1", r.n1},
                    {"n2", r.n2},
                    {"frequency_GHz", r.frequency},
                    {"nearest_transition", r.nearest},
                    {"transition_freq_GHz", r.transition_freq},
                    {"detuning_GHz", r.detuning},
                    {"wanted", r.wanted}});
  }
  out["collision_report"] = rows;
  out["warnings"] = plan.warnings;

  std::string out_path = cfg.value("out", "plan.json");
  std::ofstream f = detail::open_out(out_path);
  f << out.dump(2) << "\n";
  f.close();
  return {out_path};
}

// ---------------------------------------------------------------------------
// transmon: spectrum, matrix elements, quasiparticle ratios, drive solve.
// ---------------------------------------------------------------------------

inline std::vector<std::string> run_transmon(const json& config,
                                             const CliOverrides& o = {}) {
  json cfg = detail::resolve_config(config, o);
  cfg["experiment"] = "transmon";
  TransmonParams p;
  p.EJ = detail::require<double>(cfg, "EJ_GHz");
  p.EC = detail::require<double>(cfg, "EC_GHz");
  p.ng = cfg.value("ng", 0.0);
  p.n_cutoff = cfg.value("n_cutoff", 40);
  TransmonSpectrum s = diagonalize_transmon(p);

  json out;
  out["config"] = cfg;
  out["inputs"] = {{"EJ_GHz", p.EJ}, {"EC_GHz", p.EC}, {"ng", p.ng},
                   {"n_cutoff", p.n_cutoff}, {"EJ_over_EC", p.EJ / p.EC}};
  out["levels_GHz"] = s.energies;
  out["E01_GHz"] = s.e01();
  out["anharmonicity_GHz"] = s.anharmonicity();
  out["cos_phi_elements"] = {{"C00", s.C00}, {"C11", s.C11}, {"C22", s.C22},
                             {"C02", s.C02}, {"C01", s.C01}};
  out["sin_phi_elements"] = {{"S01", s.S01}, {"S12", s.S12}};

  if (cfg.value("include_qp_ratios", true)) {
    auto [r1, r2] = qp_matrix_ratios(p);
    out["qp_ratios"] = {{"loss_dephase", r1}, {"triple", r2}};
  }
  if (cfg.contains("drive")) {
    const json& dr = cfg.at("drive");
    double W_GHz = detail::require<double>(dr, "W_GHz");
    double EJi = detail::require<double>(dr, "EJi_GHz");
    double alpha = alpha_for_W(W_GHz, EJi, s.C02);
    out["drive"] = {{"W_GHz", W_GHz},
                    {"EJi_GHz", EJi},
                    {"alpha", alpha},
                    {"W_check_GHz", W_from_drive(EJi, alpha, s.C02)}};
  }

  std::string out_path = cfg.value("out", "transmon.json");
  std::ofstream f = detail::open_out(out_path);
  f << out.dump(2) << "\n";
  f.close();
  return {out_path};
}

// Dispatch by the "experiment" field or an explicit subcommand name.
inline std::vector<std::string> run_experiment(const std::string& name, const json& cfg,
                                               const CliOverrides& o = {}) {
  if (name == "lifetimes") return run_sweep_lifetimes(cfg, o);
  if (name == "dephasing") return run_dephasing(cfg, o);
  if (name == "rates") return run_rates(cfg, o);
  if (name == "plan") return run_plan(cfg, o);
  if (name == "transmon") return run_transmon(cfg, o);
  throw std::invalid_argument("unknown experiment: " + name);
}

}  // namespace sqec
