#pragma once

// Time-domain Lindblad integration and Liouvillian spectral analysis.
//
// The integrator is an embedded Dormand-Prince 5(4) Runge-Kutta pair with PI
// step control operating directly on the density matrix.  The rotating-frame
// spectrum spans only ~delta, so stiffness is mild and matrix exponentials
// are unnecessary.  Trace, Hermiticity and positivity are monitored (not
// enforced) on every accepted step; violations abort with diagnostics.
//
// Lifetimes are reported as amplitude-weighted integral lifetimes: the area
// under the floor-subtracted, normalized decay curve of an observable.  For
// a single exponential this equals the fitted lifetime; for multi-mode decay
// it weights every mode by its contribution, which makes the spectral and
// time-domain extraction paths compute the same functional of the same curve
// and keeps the logical-vs-bare lifetime comparison meaningful in regimes
// where the asymptotic tail alone would be misleading.

#include <complex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sqec/fitting.hpp"
#include "sqec/qalgebra.hpp"

namespace sqec {

struct IntegrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StiffnessError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using ObservableSet = std::vector<std::pair<std::string, ComplexMatrix>>;

struct EvolutionResult {
  std::vector<double> times;  // us
  std::map<std::string, std::vector<double>> observables;
  ComplexMatrix final_rho;
  // Worst-case invariant excursions seen over the whole run.
  double trace_err_max = 0.0;
  double herm_defect_max = 0.0;
  double min_eigenvalue = 0.0;
};

// Reference right-hand side:
//   drho/dt = -i[H, rho] + sum_k (g_k/2)(2 L_k rho L_k^ - {L_k^ L_k, rho}).
inline ComplexMatrix lindblad_rhs(
    const ComplexMatrix& rho, const ComplexMatrix& H,
    const std::vector<std::pair<ComplexMatrix, double>>& collapse) {
  Eigen::Index d = rho.rows();
  if (rho.cols() != d || H.rows() != d || H.cols() != d)
    throw std::invalid_argument("lindblad_rhs: dimension mismatch");
  ComplexMatrix out = cdouble(0, -1) * (H * rho - rho * H);
  for (const auto& [L, g] : collapse) {
    if (L.rows() != d || L.cols() != d)
      throw std::invalid_argument("lindblad_rhs: collapse dimension mismatch");
    ComplexMatrix Ld = L.adjoint();
    ComplexMatrix LdL = Ld * L;
    out += (0.5 * g) * (2.0 * L * rho * Ld - LdL * rho - rho * LdL);
  }
  return out;
}

namespace detail {

using SparseC = Eigen::SparseMatrix<cdouble>;

inline SparseC to_sparse(const ComplexMatrix& m) {
  SparseC s(m.rows(), m.cols());
  std::vector<Eigen::Triplet<cdouble>> trip;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (std::abs(m(i, j)) > 0) trip.emplace_back(i, j, m(i, j));
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

// Cached right-hand side: sparse application of the effective non-Hermitian
// Hamiltonian plus sparse jump terms (both stay sparse for this model, which
// is what keeps long-horizon integration cheap).  Writing the coherent part
// as -i(M - M^) with M = Heff rho keeps the result exactly Hermitian for
// Hermitian input, so hermiticity drift is pinned at roundoff level.
struct Rhs {
  SparseC Heff;
  std::vector<SparseC> L, Ld;
  std::vector<double> g;

  Rhs(const ComplexMatrix& H,
      const std::vector<std::pair<ComplexMatrix, double>>& collapse) {
    ComplexMatrix Heff_dense = H;
    for (const auto& [Lk, gk] : collapse) {
      if (gk == 0.0) continue;
      Heff_dense -= cdouble(0, 0.5) * gk * (Lk.adjoint() * Lk);
      L.push_back(to_sparse(Lk));
      Ld.push_back(to_sparse(Lk.adjoint()));
      g.push_back(gk);
    }
    Heff = to_sparse(Heff_dense);
  }

  ComplexMatrix operator()(const ComplexMatrix& rho) const {
    ComplexMatrix M = Heff * rho;
    ComplexMatrix out = cdouble(0, -1) * (M - M.adjoint());
    for (std::size_t k = 0; k < L.size(); ++k) {
      ComplexMatrix t = L[k] * rho;
      out.noalias() += g[k] * (t * Ld[k]);
    }
    return out;
  }
};

inline double error_norm(const ComplexMatrix& err, const ComplexMatrix& y0,
                         const ComplexMatrix& y1, double atol, double rtol) {
  double acc = 0.0;
  const Eigen::Index n = err.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    double scale = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
    double q = std::abs(err(i)) / scale;
    acc += q * q;
  }
  return std::sqrt(acc / n);
}

}  // namespace detail

// Adaptive integration of the master equation, sampling observables on the
// supplied output grid.  rho0 must be Hermitian with unit trace.
// positivity_stride controls how often the (comparatively expensive) full
// eigenvalue positivity check runs: every accepted step by default; larger
// strides still check at every output sample.
inline EvolutionResult evolve(
    const ComplexMatrix& rho0, const ComplexMatrix& H,
    const std::vector<std::pair<ComplexMatrix, double>>& collapse,
    const std::vector<double>& t_grid, double rtol,
    const ObservableSet& observables = {}, double atol = -1.0,
    int positivity_stride = 1) {
  if (rtol < 1e-10 || rtol > 1e-4)
    throw std::invalid_argument("evolve: rtol must lie in [1e-10, 1e-4]");
  if (atol <= 0) atol = rtol * 1e-2;
  if (t_grid.size() < 1) throw std::invalid_argument("evolve: empty time grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (t_grid[i] <= t_grid[i - 1])
      throw std::invalid_argument("evolve: time grid must be strictly increasing");
  if (std::abs(rho0.trace().real() - 1.0) > 1e-8 || hermiticity_defect(rho0) > 1e-10)
    throw std::invalid_argument("evolve: rho0 must be Hermitian with unit trace");

  detail::Rhs rhs(H, collapse);

  // Dormand-Prince 5(4) tableau.
  static const double A[7][6] = {
      {0, 0, 0, 0, 0, 0},
      {1.0 / 5, 0, 0, 0, 0, 0},
      {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
      {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static const double C[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static const double B5[7] = {35.0 / 384,     0, 500.0 / 1113, 125.0 / 192,
                               -2187.0 / 6784, 11.0 / 84, 0};
  static const double B4[7] = {5179.0 / 57600,    0,           7571.0 / 16695, 393.0 / 640,
                               -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

  EvolutionResult res;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> esolver;
  auto record = [&](double t, const ComplexMatrix& rho) {
    res.times.push_back(t);
    for (const auto& [name, op] : observables)
      res.observables[name].push_back(expectation(rho, op).real());
    res.trace_err_max = std::max(res.trace_err_max, std::abs(rho.trace().real() - 1.0));
    res.herm_defect_max = std::max(res.herm_defect_max, hermiticity_defect(rho));
  };
  long accepted = 0;
  auto check_step_invariants = [&](double t, const ComplexMatrix& rho, bool force_eig) {
    double tr_err = std::abs(rho.trace().real() - 1.0);
    double hd = hermiticity_defect(rho);
    res.trace_err_max = std::max(res.trace_err_max, tr_err);
    res.herm_defect_max = std::max(res.herm_defect_max, hd);
    if (tr_err > 1e-7)
      throw IntegrationError("evolve: trace drift " + std::to_string(tr_err) +
                             " at t = " + std::to_string(t));
    if (hd > 1e-8)
      throw IntegrationError("evolve: hermiticity defect " + std::to_string(hd) +
                             " at t = " + std::to_string(t));
    if (force_eig || positivity_stride <= 1 || accepted % positivity_stride == 0) {
      esolver.compute(rho, Eigen::EigenvaluesOnly);
      double mineig = esolver.eigenvalues().minCoeff();
      res.min_eigenvalue = std::min(res.min_eigenvalue, mineig);
      if (mineig < -1e-6)
        throw IntegrationError("evolve: negative eigenvalue " + std::to_string(mineig) +
                               " at t = " + std::to_string(t));
    }
  };

  ComplexMatrix y = rho0;
  double t = t_grid.front();
  res.min_eigenvalue = 0.0;
  record(t, y);
  check_step_invariants(t, y, true);

  std::size_t next_out = 1;
  if (next_out >= t_grid.size()) {
    res.final_rho = y;
    return res;
  }
  double t_end = t_grid.back();

  ComplexMatrix k[7];
  k[0] = rhs(y);
  double f_norm = k[0].norm();
  double y_norm = y.norm();
  double h_ctrl = 0.01 * (y_norm > 0 && f_norm > 0 ? y_norm / f_norm : 1e-3);
  double err_prev = 1.0;
  const double h_floor = 1e-14 * std::max(1.0, t_end - t);

  while (next_out < t_grid.size()) {
    bool clipped = t + h_ctrl >= t_grid[next_out];
    double h = clipped ? t_grid[next_out] - t : h_ctrl;
    if (h < h_floor)
      throw StiffnessError("evolve: step size underflow at t = " + std::to_string(t) +
                           " (h = " + std::to_string(h) + "); system too stiff for "
                           "the requested tolerance");

    for (int s = 1; s < 7; ++s) {
      ComplexMatrix ys = y;
      for (int j = 0; j < s; ++j)
        if (A[s][j] != 0.0) ys.noalias() += (h * A[s][j]) * k[j];
      (void)C;
      k[s] = rhs(ys);
    }
    ComplexMatrix y5 = y;
    for (int s = 0; s < 7; ++s)
      if (B5[s] != 0.0) y5.noalias() += (h * B5[s]) * k[s];
    ComplexMatrix err = ComplexMatrix::Zero(y.rows(), y.cols());
    for (int s = 0; s < 7; ++s) {
      double d = B5[s] - B4[s];
      if (d != 0.0) err.noalias() += (h * d) * k[s];
    }
    double e = detail::error_norm(err, y, y5, atol, rtol);

    if (e <= 1.0) {
      t += h;
      y.swap(y5);
      k[0] = k[6];  // first-same-as-last
      ++accepted;
      bool at_sample = t >= t_grid[next_out] - 1e-14 * std::max(1.0, std::abs(t));
      check_step_invariants(t, y, at_sample);
      while (next_out < t_grid.size() &&
             t >= t_grid[next_out] - 1e-14 * std::max(1.0, std::abs(t))) {
        record(t_grid[next_out], y);
        ++next_out;
      }
      double e_soft = std::max(e, 1e-10);
      double fac = std::clamp(0.9 * std::pow(e_soft, -0.14) * std::pow(err_prev, 0.08),
                              0.2, 5.0);
      err_prev = e_soft;
      if (!clipped) h_ctrl = h * fac;
      // After a clipped step the controller keeps its own estimate.
    } else {
      h_ctrl = h * std::clamp(0.9 * std::pow(e, -0.2), 0.1, 0.9);
    }
  }

  res.final_rho = y;
  return res;
}

// Column-stacking vectorization: L vec(rho) = vec(drho/dt).
inline ComplexMatrix build_liouvillian(
    const ComplexMatrix& H, const std::vector<std::pair<ComplexMatrix, double>>& collapse) {
  Eigen::Index d = H.rows();
  if (H.cols() != d) throw std::invalid_argument("build_liouvillian: H not square");
  if (d > 100)
    throw CapacityError("build_liouvillian: dimension " + std::to_string(d) +
                        " too large for a dense superoperator");
  ComplexMatrix I = ComplexMatrix::Identity(d, d);
  ComplexMatrix L = cdouble(0, -1) * (kron(I, H) - kron(H.transpose(), I));
  for (const auto& [Ck, g] : collapse) {
    if (Ck.rows() != d || Ck.cols() != d)
      throw std::invalid_argument("build_liouvillian: collapse dimension mismatch");
    if (g == 0.0) continue;
    ComplexMatrix CdC = Ck.adjoint() * Ck;
    L += g * kron(Ck.conjugate(), Ck);
    L -= (0.5 * g) * kron(I, CdC);
    L -= (0.5 * g) * kron(CdC.transpose(), I);
  }
  return L;
}

// Full eigendecomposition of a Liouvillian, kept together with the LU
// factorization of the eigenvector matrix so that many initial conditions
// can be projected at the cost of one triangular solve each.
struct SpectralDecomposition {
  Eigen::VectorXcd eigenvalues;
  ComplexMatrix V;
  Eigen::PartialPivLU<ComplexMatrix> vlu;
  Eigen::Index d = 0;  // Hilbert-space dimension (superoperator is d^2 x d^2)
};

inline SpectralDecomposition decompose_liouvillian(const ComplexMatrix& L) {
  SpectralDecomposition sd;
  Eigen::Index n = L.rows();
  sd.d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(n))));
  if (sd.d * sd.d != n)
    throw std::invalid_argument("decompose_liouvillian: not a superoperator shape");
  ComplexMatrix A = L;
  sd.eigenvalues.resize(n);
  sd.V.resize(n, n);
  int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', static_cast<int>(n),
                           A.data(), static_cast<int>(n), sd.eigenvalues.data(),
                           nullptr, static_cast<int>(n), sd.V.data(),
                           static_cast<int>(n));
  if (info != 0)
    throw IntegrationError("decompose_liouvillian: eigensolver did not converge (info " +
                           std::to_string(info) + ")");
  sd.vlu.compute(sd.V);
  return sd;
}

inline Eigen::Map<const ComplexVector> vec(const ComplexMatrix& m) {
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

inline ComplexMatrix unvec(const ComplexVector& v, Eigen::Index d) {
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

// Per-mode contribution of each Liouvillian eigenmode to the expectation
// value Tr[O rho(t)] = sum_j amp_j exp(lambda_j t) for rho(0) = rho0.
struct ModeAmplitudes {
  Eigen::VectorXcd lambda;
  Eigen::VectorXcd amp;
};

inline ModeAmplitudes mode_amplitudes(const SpectralDecomposition& sd,
                                      const ComplexMatrix& rho0,
                                      const ComplexMatrix& O) {
  ModeAmplitudes ma;
  ma.lambda = sd.eigenvalues;
  Eigen::VectorXcd c = sd.vlu.solve(vec(rho0));
  ComplexMatrix Ot = O.transpose();
  Eigen::VectorXcd w = sd.V.transpose() * vec(Ot);
  ma.amp = w.cwiseProduct(c);
  return ma;
}

// Amplitude-weighted integral lifetime over the decaying modes:
//   T = sum_j amp_j / (-lambda_j)  /  sum_j amp_j,   Re lambda_j < -decay_cut.
// Equals the area under the floor-subtracted decay curve divided by its
// initial value.
inline double integral_lifetime(const SpectralDecomposition& sd,
                                const ComplexMatrix& rho0, const ComplexMatrix& O,
                                double decay_cut = 1e-9) {
  ModeAmplitudes ma = mode_amplitudes(sd, rho0, O);
  cdouble num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < ma.lambda.size(); ++j) {
    if (ma.lambda(j).real() < -decay_cut) {
      num += ma.amp(j) / (-ma.lambda(j));
      den += ma.amp(j);
    }
  }
  if (std::abs(den.real()) < 1e-12)
    throw std::runtime_error("integral_lifetime: observable has no decaying weight");
  return num.real() / den.real();
}

struct LiouvillianSpectrum {
  std::vector<cdouble> eigenvalues;  // steady eigenvalue first, then ascending |Re|
  ComplexMatrix steady_state;
};

inline LiouvillianSpectrum slowest_decay_rates(const SpectralDecomposition& sd, int k) {
  if (k < 1) throw std::invalid_argument("slowest_decay_rates: k must be >= 1");
  Eigen::Index n = sd.eigenvalues.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(sd.eigenvalues(a).real()) < std::abs(sd.eigenvalues(b).real());
  });
  double max_re = sd.eigenvalues.real().maxCoeff();
  if (max_re > 1e-9)
    throw IntegrationError("slowest_decay_rates: positive Liouvillian eigenvalue " +
                           std::to_string(max_re));
  if (std::abs(sd.eigenvalues(order[0]).real()) > 1e-9)
    throw IntegrationError("slowest_decay_rates: no steady state found");

  LiouvillianSpectrum out;
  for (Eigen::Index i = 0; i < std::min<Eigen::Index>(n, k + 1); ++i)
    out.eigenvalues.push_back(sd.eigenvalues(order[i]));
  ComplexMatrix rho = unvec(sd.V.col(order[0]), sd.d);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  cdouble tr = rho.trace();
  if (std::abs(tr) < 1e-12)
    throw IntegrationError("slowest_decay_rates: traceless steady eigenvector");
  out.steady_state = rho / tr;
  return out;
}

inline LiouvillianSpectrum slowest_decay_rates(const ComplexMatrix& L, int k) {
  return slowest_decay_rates(decompose_liouvillian(L), k);
}

// Time-domain version of the integral lifetime: trapezoid area of the
// floor-subtracted curve plus the analytic completion of the fitted
// exponential tail beyond the simulated horizon.  The floor comes from a
// free-floor tail fit, so the curve must extend several lifetimes deep.
struct CurveLifetime {
  double T_int = 0.0;
  DecayFit tail;
};

inline CurveLifetime integral_lifetime_from_curve(const std::vector<double>& ts,
                                                  const std::vector<double>& ys,
                                                  double fit_frac = 0.25) {
  if (ts.size() != ys.size() || ts.size() < 16)
    throw std::invalid_argument("integral_lifetime_from_curve: need >= 16 samples");
  CurveLifetime out;
  out.tail = fit_exponential_free_floor(ts, ys, fit_frac * ts.back());
  std::vector<double> shifted(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) shifted[i] = ys[i] - out.tail.floor;
  double area = trapezoid(ts, shifted);
  area += out.tail.amplitude * out.tail.lifetime *
          std::exp(-ts.back() / out.tail.lifetime);
  double start = ys.front() - out.tail.floor;
  if (std::abs(start) < 1e-12)
    throw std::runtime_error("integral_lifetime_from_curve: curve starts at its floor");
  out.T_int = area / start;
  return out;
}

}  // namespace sqec
