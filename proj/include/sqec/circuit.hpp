#pragma once

// Transmon circuit analysis: charge-basis spectra and phase-operator matrix
// elements, the flux-drive-induced pair coupling W, quasiparticle half-angle
// suppression ratios, and two-tone drive planning with collision checks.
//
// Units in this module are GHz (plain frequencies, no 2*pi) unless noted.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sqec/util.hpp"

namespace sqec {

struct TransmonParams {
  double EJ = 12.5;   // Josephson energy, GHz
  double EC = 0.25;   // charging energy, GHz
  double ng = 0.0;    // offset charge
  int n_cutoff = 40;  // charge basis spans n in [-n_cutoff, n_cutoff]

  void validate() const {
    if (!(EJ > 0) || !(EC > 0))
      throw std::invalid_argument("TransmonParams: EJ and EC must be positive");
    if (n_cutoff < 20)
      throw std::invalid_argument("TransmonParams: n_cutoff must be >= 20");
  }
};

namespace detail {

struct SectorEigen {
  Eigen::VectorXd q;  // charge offsets (integer or half-integer lattice)
  Eigen::VectorXd E;  // ascending eigenvalues
  Eigen::MatrixXd V;  // columns are eigenvectors, gauge-fixed
};

// Diagonalizes H = 4 EC (q - ng)^2 - (EJ/2) * (shift + shift^T) on the charge
// lattice q = -ncut..ncut, offset by 1/2 for the half-integer parity sector.
// Gauge: the largest-magnitude component of each eigenvector is positive.
inline SectorEigen diag_charge_sector(double EJ, double EC, double ng,
                                      bool half_integer, int ncut) {
  const int d = 2 * ncut + 1;
  SectorEigen s;
  s.q.resize(d);
  for (int i = 0; i < d; ++i)
    s.q[i] = -ncut + i + (half_integer ? 0.5 : 0.0);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    double dq = s.q[i] - ng;
    H(i, i) = 4.0 * EC * dq * dq;
    if (i + 1 < d) H(i, i + 1) = H(i + 1, i) = -0.5 * EJ;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  s.E = es.eigenvalues();
  s.V = es.eigenvectors();
  for (int k = 0; k < d; ++k) {
    int imax = 0;
    s.V.col(k).cwiseAbs().maxCoeff(&imax);
    if (s.V(imax, k) < 0) s.V.col(k) = -s.V.col(k);
  }
  return s;
}

// <i| cos(phi) |j> via the exact charge-translation form (shift by +-1)/2.
inline double cos_phi_elem(const Eigen::MatrixXd& V, int i, int j) {
  double acc = 0.0;
  const int d = static_cast<int>(V.rows());
  for (int n = 0; n + 1 < d; ++n)
    acc += V(n, i) * V(n + 1, j) + V(n + 1, i) * V(n, j);
  return 0.5 * acc;
}

// |<i| sin(phi) |j>|; the element itself is imaginary for real eigenvectors.
inline double sin_phi_elem(const Eigen::MatrixXd& V, int i, int j) {
  double acc = 0.0;
  const int d = static_cast<int>(V.rows());
  for (int n = 0; n + 1 < d; ++n)
    acc += V(n, i) * V(n + 1, j) - V(n + 1, i) * V(n, j);
  return std::abs(0.5 * acc);
}

}  // namespace detail

struct TransmonSpectrum {
  std::vector<double> energies;  // first few raw eigenvalues, GHz
  double C00 = 0, C11 = 0, C22 = 0, C02 = 0, C01 = 0;  // <i|cos phi|j>, signed
  double S01 = 0, S12 = 0;                             // |<i|sin phi|j>|

  double transition(int i, int j) const { return energies.at(j) - energies.at(i); }
  double e01() const { return transition(0, 1); }
  double anharmonicity() const { return transition(0, 1) - transition(1, 2); }
};

// Diagonalizes the single-transmon charge-basis Hamiltonian and extracts the
// cos/sin phase-operator matrix elements over the first three levels.  The
// cutoff is verified by redoing the solve at twice n_cutoff; a relative shift
// above 1e-8 in any of E0..E3 throws.
inline TransmonSpectrum diagonalize_transmon(const TransmonParams& p) {
  p.validate();
  auto base = detail::diag_charge_sector(p.EJ, p.EC, p.ng, false, p.n_cutoff);
  auto wide = detail::diag_charge_sector(p.EJ, p.EC, p.ng, false, 2 * p.n_cutoff);
  for (int k = 0; k < 4; ++k) {
    double scale = std::max(1.0, std::abs(wide.E[k]));
    if (std::abs(base.E[k] - wide.E[k]) > 1e-8 * scale)
      throw std::runtime_error(
          "diagonalize_transmon: spectrum not converged at this n_cutoff");
  }
  TransmonSpectrum out;
  int keep = std::min<int>(6, static_cast<int>(base.E.size()));
  out.energies.assign(base.E.data(), base.E.data() + keep);
  out.C00 = detail::cos_phi_elem(base.V, 0, 0);
  out.C11 = detail::cos_phi_elem(base.V, 1, 1);
  out.C22 = detail::cos_phi_elem(base.V, 2, 2);
  out.C02 = detail::cos_phi_elem(base.V, 0, 2);
  out.C01 = detail::cos_phi_elem(base.V, 0, 1);  // vanishes by parity at ng = 0
  out.S01 = detail::sin_phi_elem(base.V, 0, 1);
  out.S12 = detail::sin_phi_elem(base.V, 1, 2);
  return out;
}

// Pair coupling magnitude produced by a cubic flux drive of relative amplitude
// alpha on a coupling junction of energy EJi:  |W| = EJi * alpha^3 * C02^2 / 4.
// The physical coupling enters the Hamiltonian with a minus sign.
inline double W_from_drive(double EJi, double alpha, double C02) {
  if (!(EJi > 0))
    throw std::invalid_argument("W_from_drive: EJi must be positive");
  if (alpha < 0 || alpha >= 1.0)
    throw std::invalid_argument(
        "W_from_drive: drive amplitude must lie in [0, 1) to stay perturbative");
  return 0.25 * EJi * alpha * alpha * alpha * C02 * C02;
}

// Inverse of W_from_drive: the drive amplitude that realizes a target |W|.
inline double alpha_for_W(double W, double EJi, double C02) {
  if (!(W > 0) || !(EJi > 0) || C02 == 0.0)
    throw std::invalid_argument("alpha_for_W: W, EJi must be positive, C02 nonzero");
  return std::cbrt(4.0 * W / (EJi * C02 * C02));
}

namespace detail {

// Phase-space wavefunction of eigenstate k on a uniform grid covering
// [-2pi, 2pi):  psi_k(phi) = sum_q V(q,k) e^{i q phi} / sqrt(4 pi).
// Half-integer charge sectors give 4pi-periodic (double-valued) functions,
// which is why the doubled interval is needed for half-angle operators.
inline Eigen::VectorXcd phase_wavefunction(const SectorEigen& s, int k, int N) {
  using cd = std::complex<double>;
  Eigen::VectorXcd w(N);
  const int d = static_cast<int>(s.q.size());
  const double dphi = 4.0 * pi / N;
  const double norm = 1.0 / std::sqrt(4.0 * pi);
  for (int n = 0; n < N; ++n) {
    double phi = -2.0 * pi + n * dphi;
    cd step = std::polar(1.0, phi);
    cd ph = std::polar(1.0, s.q[0] * phi);
    cd acc = 0.0;
    for (int m = 0; m < d; ++m) {
      acc += s.V(m, k) * ph;
      ph *= step;
    }
    w[n] = norm * acc;
  }
  return w;
}

// |<a| op(phi/2) |b>| by quadrature on the doubled interval; op is cos or sin.
inline double half_angle_elem(const Eigen::VectorXcd& wa,
                              const Eigen::VectorXcd& wb, bool use_cos) {
  const int N = static_cast<int>(wa.size());
  const double dphi = 4.0 * pi / N;
  std::complex<double> acc = 0.0;
  for (int n = 0; n < N; ++n) {
    double half = 0.5 * (-2.0 * pi + n * dphi);
    double op = use_cos ? std::cos(half) : std::sin(half);
    acc += std::conj(wa[n]) * op * wb[n];
  }
  return std::abs(acc) * dphi;
}

// Quasiparticle suppression ratios at a given half-angle grid size.  Built
// from the single-transmon elements c_kk = |<odd_k|cos(phi/2)|even_k>| and
// ch02 = |<odd_0|cos(phi/2)|even_2>|: with abar = (c00 + c22)/2, the
// dephasing-type weight is ((c22 - c00)/2 / abar)^2 and the triple-loss
// weight is (ch02 / abar)^2, both normalized to the single-loss channel.
inline std::pair<double, double> qp_ratios_at(double EJ, double EC, int ncut,
                                              int N) {
  auto even = diag_charge_sector(EJ, EC, 0.0, false, ncut);
  auto odd = diag_charge_sector(EJ, EC, 0.0, true, ncut);
  auto we0 = phase_wavefunction(even, 0, N);
  auto we2 = phase_wavefunction(even, 2, N);
  auto wo0 = phase_wavefunction(odd, 0, N);
  auto wo2 = phase_wavefunction(odd, 2, N);
  double c00 = half_angle_elem(wo0, we0, true);
  double c22 = half_angle_elem(wo2, we2, true);
  double ch02 = half_angle_elem(wo0, we2, true);
  double abar = 0.5 * (c00 + c22);
  double z = 0.5 * (c22 - c00) / abar;
  double t = ch02 / abar;
  return {z * z, t * t};
}

}  // namespace detail

// Squared matrix-element ratios (dephasing-type, triple-loss) of the
// quasiparticle half-angle operator sin((phi_l - phi_r)/2), normalized to its
// single-photon-loss component, for two identical transmons.  Evaluated on a
// 4096-point doubled-period phase grid; a redo at twice the resolution must
// agree within 5% or the call throws.
inline std::pair<double, double> qp_matrix_ratios(const TransmonParams& p) {
  p.validate();
  if (p.EJ / p.EC < 20.0)
    throw std::invalid_argument("qp_matrix_ratios: requires EJ/EC >= 20");
  const int N = 4096;
  auto base = detail::qp_ratios_at(p.EJ, p.EC, p.n_cutoff, N);
  auto fine = detail::qp_ratios_at(p.EJ, p.EC, p.n_cutoff, 2 * N);
  if (std::abs(base.first - fine.first) > 0.05 * fine.first ||
      std::abs(base.second - fine.second) > 0.05 * fine.second)
    throw std::runtime_error("qp_matrix_ratios: phase grid not converged");
  return base;
}

struct DriveTone {
  double frequency = 0.0;  // GHz
  double amplitude = 1.0;  // relative scale; both tones are driven equally
};

struct CollisionRow {
  int n1 = 0, n2 = 0;           // product = n1*f1 + n2*f2, sign-canonicalized
  std::string product;          // e.g. "2f1 + f2"
  double frequency = 0.0;       // |n1*f1 + n2*f2|, GHz
  std::string nearest;          // label of the nearest device transition
  double transition_freq = 0.0; // GHz
  double detuning = 0.0;        // GHz
  bool wanted = false;          // product realizes one of the two targets
};

struct DrivePlan {
  std::array<DriveTone, 2> tones;
  std::array<double, 2> targets;  // {2(wl+wr-delta), 2|wl-wr|}, GHz
  // Spec of the three detuning figures:
  //  - min_detuning counts every intermodulation product through third order,
  //    bare tones and pair sums included, against the full transition list;
  //  - min_detuning_third_order restricts to |n1|+|n2| == 3, the products a
  //    cubic nonlinearity generates at leading order;
  //  - min_detuning_vs_targets measures separation of unwanted products from
  //    the two wanted signal frequencies only.
  double min_detuning = 0.0;
  double min_detuning_third_order = 0.0;
  double min_detuning_vs_targets = 0.0;
  std::vector<CollisionRow> collision_report;
  std::vector<std::string> warnings;
};

inline constexpr double kCollisionWarnThreshold = 0.5;  // GHz

// Two-tone plan for the flux drive generating the pair coupling: tones solve
//   2 f1 + f2 = 2 (wl + wr - delta)   (sum-type target)
//   2 f2 - f1 = 2 |wl - wr|           (difference-type target)
// giving f1 = (2S - D)/5, f2 = (S + 2D)/5.  The collision report enumerates
// intermodulation products n1*f1 + n2*f2 with 1 <= |n1|+|n2| <= 3 against the
// low-lying device transitions and flags products landing within
// kCollisionWarnThreshold of any of them.
inline DrivePlan plan_w_drive(double omega_l, double omega_r, double delta) {
  if (!(omega_l > 0) || !(omega_r > 0))
    throw std::invalid_argument("plan_w_drive: mode frequencies must be positive");
  if (std::abs(omega_l - omega_r) < 1.0)
    throw std::invalid_argument(
        "plan_w_drive: transmon frequencies must differ by at least 1 GHz");

  const double S = 2.0 * (omega_l + omega_r - delta);
  const double D = 2.0 * std::abs(omega_l - omega_r);
  const double f1 = (2.0 * S - D) / 5.0;
  const double f2 = (S + 2.0 * D) / 5.0;
  if (!(f1 > 0) || !(f2 > 0))
    throw std::runtime_error("plan_w_drive: infeasible tone solution");

  DrivePlan plan;
  plan.tones = {DriveTone{f1, 1.0}, DriveTone{f2, 1.0}};
  plan.targets = {S, D};

  const std::array<std::pair<std::string, double>, 8> transitions = {{
      {"2|wl-wr|", D},
      {"2(wl+wr-delta)", S},
      {"wl", omega_l},
      {"wr", omega_r},
      {"wl-delta", omega_l - delta},
      {"wr-delta", omega_r - delta},
      {"2wl-delta", 2.0 * omega_l - delta},
      {"2wr-delta", 2.0 * omega_r - delta},
  }};

  struct Prod {
    int n1, n2;
    double freq;
  };
  std::vector<Prod> prods;
  for (int n1 = -3; n1 <= 3; ++n1) {
    for (int n2 = -3; n2 <= 3; ++n2) {
      int order = std::abs(n1) + std::abs(n2);
      if (order == 0 || order > 3) continue;
      double v = n1 * f1 + n2 * f2;
      Prod pr{n1, n2, v};
      if (v < 0) pr = Prod{-n1, -n2, -v};
      prods.push_back(pr);
    }
  }
  std::sort(prods.begin(), prods.end(), [](const Prod& a, const Prod& b) {
    if (a.freq != b.freq) return a.freq < b.freq;
    if (a.n1 != b.n1) return a.n1 < b.n1;
    return a.n2 < b.n2;
  });
  const double merge_tol = 1e-9 * std::max(1.0, S);
  std::vector<Prod> unique;
  for (const auto& pr : prods)
    if (unique.empty() || pr.freq - unique.back().freq > merge_tol)
      unique.push_back(pr);

  auto describe = [](int n1, int n2) {
    std::string s;
    auto term = [&](int n, const char* name) {
      if (n == 0) return;
      if (s.empty()) {
        if (n < 0) s += "-";
      } else {
        s += (n < 0) ? " - " : " + ";
      }
      if (std::abs(n) != 1) s += std::to_string(std::abs(n));
      s += name;
    };
    term(n1, "f1");
    term(n2, "f2");
    return s;
  };

  const double target_tol = 1e-6;
  double dmin = std::numeric_limits<double>::infinity();
  double dmin3 = dmin, dmin_t = dmin;
  for (const auto& pr : unique) {
    CollisionRow row;
    row.n1 = pr.n1;
    row.n2 = pr.n2;
    row.product = describe(pr.n1, pr.n2);
    row.frequency = pr.freq;
    row.wanted = std::abs(pr.freq - S) <= target_tol ||
                 std::abs(pr.freq - D) <= target_tol;
    int best = 0;
    double bestd = std::numeric_limits<double>::infinity();
    for (int t = 0; t < static_cast<int>(transitions.size()); ++t) {
      double d = std::abs(pr.freq - transitions[t].second);
      if (d < bestd) {
        bestd = d;
        best = t;
      }
    }
    row.nearest = transitions[best].first;
    row.transition_freq = transitions[best].second;
    row.detuning = bestd;
    if (!row.wanted) {
      dmin = std::min(dmin, bestd);
      if (std::abs(pr.n1) + std::abs(pr.n2) == 3) dmin3 = std::min(dmin3, bestd);
      double dt = std::min(std::abs(pr.freq - S), std::abs(pr.freq - D));
      dmin_t = std::min(dmin_t, dt);
      if (bestd < kCollisionWarnThreshold)
        plan.warnings.push_back(row.product + " at " + format_g17(pr.freq) +
                                " GHz lies " + format_g17(bestd) +
                                " GHz from transition " + row.nearest);
    }
    plan.collision_report.push_back(std::move(row));
  }
  plan.min_detuning = dmin;
  plan.min_detuning_third_order = dmin3;
  plan.min_detuning_vs_targets = dmin_t;
  return plan;
}

// Drive frequency that parks a shadow resonator exchange on resonance with the
// one-photon error transition: omega_k + omega_Sk - W - delta.
inline double shadow_drive_freq(double omega_k, double omega_Sk, double W,
                                double delta) {
  if (!(omega_k > 0) || !(omega_Sk > 0))
    throw std::invalid_argument("shadow_drive_freq: mode frequencies must be positive");
  if (W < 0 || delta < 0)
    throw std::invalid_argument("shadow_drive_freq: W and delta must be non-negative");
  return omega_k + omega_Sk - W - delta;
}

}  // namespace sqec
