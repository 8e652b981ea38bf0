#pragma once

// Rotating-frame model of the two-transmon logical qubit with one lossy
// "shadow" resonator per transmon.  Mode order is (l, r, Sl, Sr); the qubits
// are three-level, the shadows are truncated at n_shadow photons.
//
// Conventions (hbar = 1, angular frequencies in rad/us, rates in 1/us):
//   H_qubits  = -W xtilde_l xtilde_r + (delta/2) (P1_l + P1_r)
//   H_shadow  = (W + delta/2) (n_Sl + n_Sr)
//   H_couple  = Omega (al^ asl^ + ar^ asr^ + h.c.)        (^ = dagger)
// delta is positive here: the one-photon qubit states sit delta/2 above the
// code manifold, so a loss event |code> -> |1_k, ...> costs W + delta/2 and a
// shadow photon carries exactly that energy away, making the repair
// transition resonant.

#include <stdexcept>
#include <utility>
#include <vector>

#include "sqec/qalgebra.hpp"

namespace sqec {

struct DeviceParams {
  double W = 0.0;        // code-space coupling, rad/us
  double delta = 0.0;    // qubit nonlinearity penalty, rad/us, must be >= 0
  double Omega = 0.0;    // qubit-shadow exchange coupling, rad/us
  double gamma_P = 0.0;  // qubit photon loss rate, 1/us
  double gamma_S = 0.0;  // shadow decay rate, 1/us
  double gamma_up = 0.0; // optional incoherent photon addition rate, 1/us
  int n_shadow = 1;      // shadow truncation (max occupation), 1 or 2

  void validate() const {
    if (W < 0 || delta < 0 || Omega < 0 || gamma_P < 0 || gamma_S < 0 || gamma_up < 0)
      throw std::invalid_argument("DeviceParams: all frequencies and rates must be >= 0");
    if (n_shadow != 1 && n_shadow != 2)
      throw std::invalid_argument("DeviceParams: n_shadow must be 1 or 2");
  }
};

// The six reference states of the error-correction analysis: the logical pair
// and the four one-photon excited doublet states (left-qubit loss convention;
// the right-qubit states follow by l <-> r symmetry).
struct LogicalBasis {
  ComplexVector L0, L1;
  ComplexVector E0p, E0m, E1p, E1m;
};

inline TensorSpace build_space(const DeviceParams& p) {
  p.validate();
  return TensorSpace{{3, 3, p.n_shadow + 1, p.n_shadow + 1}, {"l", "r", "Sl", "Sr"}};
}

inline ComplexMatrix build_HP(const DeviceParams& p, const TensorSpace& space) {
  p.validate();
  ComplexMatrix xl = embed(xtilde(), "l", space);
  ComplexMatrix xr = embed(xtilde(), "r", space);
  ComplexMatrix p1l = embed(number_projector(3, 1), "l", space);
  ComplexMatrix p1r = embed(number_projector(3, 1), "r", space);
  return -p.W * (xl * xr) + 0.5 * p.delta * (p1l + p1r);
}

inline ComplexMatrix build_HPS_HS(const DeviceParams& p, const TensorSpace& space) {
  p.validate();
  int ds = p.n_shadow + 1;
  ComplexMatrix asl = embed(annihilation(ds), "Sl", space);
  ComplexMatrix asr = embed(annihilation(ds), "Sr", space);
  ComplexMatrix al = embed(annihilation(3), "l", space);
  ComplexMatrix ar = embed(annihilation(3), "r", space);
  ComplexMatrix n_shadow_total = asl.adjoint() * asl + asr.adjoint() * asr;
  ComplexMatrix exchange =
      al.adjoint() * asl.adjoint() + ar.adjoint() * asr.adjoint();
  return (p.W + 0.5 * p.delta) * n_shadow_total +
         p.Omega * (exchange + exchange.adjoint());
}

inline ComplexMatrix build_hamiltonian(const DeviceParams& p, const TensorSpace& space) {
  return build_HP(p, space) + build_HPS_HS(p, space);
}

// Single-qutrit doublet states (|0> +- |2>)/sqrt(2).
inline ComplexVector qutrit_plus() {
  ComplexVector v = ComplexVector::Zero(3);
  v(0) = v(2) = 1.0 / std::sqrt(2.0);
  return v;
}

inline ComplexVector qutrit_minus() {
  ComplexVector v = ComplexVector::Zero(3);
  v(0) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return v;
}

namespace detail {
inline ComplexVector product_state(const TensorSpace& space,
                                   const ComplexVector& l, const ComplexVector& r,
                                   int n_sl, int n_sr) {
  int ds = space.mode_dims[2];
  ComplexVector sl = ComplexVector::Zero(ds), sr = ComplexVector::Zero(ds);
  sl(n_sl) = 1.0;
  sr(n_sr) = 1.0;
  ComplexVector out(space.dim());
  int idx = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < ds; ++k)
        for (int m = 0; m < ds; ++m) out(idx++) = l(i) * r(j) * sl(k) * sr(m);
  return out;
}
}  // namespace detail

// |L0> = |+>|+>|vac>, |L1> = |->|->|vac>.  Both are +1 eigenstates of
// xtilde_l xtilde_r; ztilde_l ztilde_r maps one onto the other, so it acts as
// the logical bit-flip observable used for phase-coherence tracking.
inline std::pair<ComplexVector, ComplexVector> logical_states(const TensorSpace& space) {
  return {detail::product_state(space, qutrit_plus(), qutrit_plus(), 0, 0),
          detail::product_state(space, qutrit_minus(), qutrit_minus(), 0, 0)};
}

// One-photon excited eigendoublets in the strong-W limit.  A left-qubit loss
// from |Li> produces |1_l> |pm_r> |vac>; the shadow coupling hybridizes it
// with |Li>|1_Sl> into a doublet split by 2 Omega, which is what makes the
// excitation swing into the shadow and decay there.
inline LogicalBasis error_states(const DeviceParams& p, const TensorSpace& space) {
  p.validate();
  LogicalBasis b;
  auto [L0, L1] = logical_states(space);
  b.L0 = L0;
  b.L1 = L1;

  ComplexVector one = ComplexVector::Zero(3);
  one(1) = 1.0;
  ComplexVector bare0 = detail::product_state(space, one, qutrit_plus(), 0, 0);
  ComplexVector bare1 = detail::product_state(space, one, qutrit_minus(), 0, 0);
  ComplexVector shadow0 = detail::product_state(space, qutrit_plus(), qutrit_plus(), 1, 0);
  ComplexVector shadow1 = detail::product_state(space, qutrit_minus(), qutrit_minus(), 1, 0);

  double s = 1.0 / std::sqrt(2.0);
  // <+|a^|1> = +1 while <-|a^|1> = -1, so the upper eigenstate pairs the bare
  // error with +shadow for L0 and -shadow for L1.
  b.E0p = s * (bare0 + shadow0);
  b.E0m = s * (bare0 - shadow0);
  b.E1p = s * (bare1 - shadow1);
  b.E1m = s * (bare1 + shadow1);
  return b;
}

// Lindblad collapse channels: photon loss on each qubit, decay of each
// shadow, and (optionally) incoherent photon addition on the qubits.
inline std::vector<std::pair<ComplexMatrix, double>> collapse_operators(
    const DeviceParams& p, const TensorSpace& space) {
  p.validate();
  int ds = p.n_shadow + 1;
  std::vector<std::pair<ComplexMatrix, double>> ops;
  ops.emplace_back(embed(annihilation(3), "l", space), p.gamma_P);
  ops.emplace_back(embed(annihilation(3), "r", space), p.gamma_P);
  ops.emplace_back(embed(annihilation(ds), "Sl", space), p.gamma_S);
  ops.emplace_back(embed(annihilation(ds), "Sr", space), p.gamma_S);
  if (p.gamma_up > 0) {
    ops.emplace_back(embed(annihilation(3), "l", space).adjoint().eval(), p.gamma_up);
    ops.emplace_back(embed(annihilation(3), "r", space).adjoint().eval(), p.gamma_up);
  }
  return ops;
}

}  // namespace sqec
