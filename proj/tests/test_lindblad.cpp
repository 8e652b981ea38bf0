#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "sqec/lindblad.hpp"
#include "sqec/model.hpp"
#include "sqec/rates.hpp"

using namespace sqec;
using Catch::Approx;

namespace {

DeviceParams fast_params(double T1P_us) {
  DeviceParams p;
  p.W = two_pi * 3.5;
  p.delta = two_pi * 35.0;
  p.Omega = two_pi * 0.5;
  p.gamma_S = 5.0;
  p.gamma_P = 1.0 / T1P_us;
  return p;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

ComplexMatrix random_density(Rng& rng, int d) {
  ComplexMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      m(i, j) = cdouble(rng.uniform() - 0.5, rng.uniform() - 0.5);
  ComplexMatrix rho = m * m.adjoint();
  return rho / rho.trace();
}

}  // namespace

TEST_CASE("reference right-hand side") {
  ComplexMatrix a = annihilation(2);
  ComplexMatrix H0 = ComplexMatrix::Zero(2, 2);
  double g = 0.7;

  ComplexMatrix vac = ComplexMatrix::Zero(2, 2);
  vac(0, 0) = 1.0;
  CHECK(lindblad_rhs(vac, H0, {{a, g}}).cwiseAbs().maxCoeff() < 1e-15);

  ComplexMatrix exc = ComplexMatrix::Zero(2, 2);
  exc(1, 1) = 1.0;
  ComplexMatrix expect = ComplexMatrix::Zero(2, 2);
  expect(0, 0) = g;
  expect(1, 1) = -g;
  CHECK((lindblad_rhs(exc, H0, {{a, g}}) - expect).cwiseAbs().maxCoeff() < 1e-14);

  Rng rng(42);
  ComplexMatrix H(2, 2);
  H << 0.3, cdouble(0.1, 0.2), cdouble(0.1, -0.2), -0.4;
  for (int trial = 0; trial < 100; ++trial) {
    ComplexMatrix rho = random_density(rng, 2);
    CHECK(std::abs(lindblad_rhs(rho, H, {{a, g}}).trace()) < 1e-13);
  }
}

TEST_CASE("integrator reproduces textbook decay and Rabi") {
  ComplexMatrix a = annihilation(2);
  ComplexMatrix H0 = ComplexMatrix::Zero(2, 2);
  ComplexMatrix exc = ComplexMatrix::Zero(2, 2);
  exc(1, 1) = 1.0;
  ObservableSet obs{{"P1", exc}};
  EvolutionResult r = evolve(exc, H0, {{a, 1.0}}, linspace(0, 1, 11), 1e-9, obs);
  CHECK(r.observables.at("P1").back() == Approx(std::exp(-1.0)).margin(1e-6));

  double W = 2.3;
  ComplexMatrix sx(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  ComplexMatrix up = ComplexMatrix::Zero(2, 2);
  up(0, 0) = 1.0;
  ObservableSet obs2{{"sz", sz}};
  EvolutionResult r2 = evolve(up, W * sx, {}, linspace(0, 2, 41), 1e-9, obs2);
  for (std::size_t i = 0; i < r2.times.size(); ++i)
    CHECK(r2.observables.at("sz")[i] == Approx(std::cos(2 * W * r2.times[i])).margin(1e-6));
}

TEST_CASE("superoperator matches the right-hand side") {
  ComplexMatrix a = annihilation(2);
  double g = 0.9;
  ComplexMatrix L = build_liouvillian(ComplexMatrix::Zero(2, 2), {{a, g}});
  Eigen::ComplexEigenSolver<ComplexMatrix> es(L);
  std::vector<double> re;
  for (int i = 0; i < 4; ++i) re.push_back(es.eigenvalues()(i).real());
  std::sort(re.begin(), re.end());
  CHECK(re[0] == Approx(-g).margin(1e-12));
  CHECK(re[1] == Approx(-g / 2).margin(1e-12));
  CHECK(re[2] == Approx(-g / 2).margin(1e-12));
  CHECK(re[3] == Approx(0.0).margin(1e-12));

  CHECK(build_liouvillian(ComplexMatrix::Zero(3, 3), {}).cwiseAbs().maxCoeff() == 0.0);

  // Full circuit: L vec(rho) = vec(rhs(rho)) for seeded random states.
  DeviceParams p = fast_params(3.0);
  TensorSpace space = build_space(p);
  ComplexMatrix H = build_hamiltonian(p, space);
  auto collapse = collapse_operators(p, space);
  ComplexMatrix Lfull = build_liouvillian(H, collapse);
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ComplexMatrix rho = random_density(rng, 36);
    ComplexVector lhs = Lfull * vec(rho);
    ComplexMatrix rhs_mat = lindblad_rhs(rho, H, collapse);
    double diff = (lhs - ComplexVector(vec(rhs_mat))).cwiseAbs().maxCoeff();
    CHECK(diff < 1e-10);
  }

  CHECK_THROWS_AS(build_liouvillian(ComplexMatrix::Zero(101, 101), {}), CapacityError);
}

TEST_CASE("slowest decay rates of a damped mode") {
  ComplexMatrix a = annihilation(2);
  double g = 0.8;
  ComplexMatrix L = build_liouvillian(ComplexMatrix::Zero(2, 2), {{a, g}});
  LiouvillianSpectrum spec = slowest_decay_rates(L, 3);
  REQUIRE(spec.eigenvalues.size() == 4);
  CHECK(std::abs(spec.eigenvalues[0].real()) < 1e-12);
  CHECK(-spec.eigenvalues[1].real() == Approx(g / 2).margin(1e-10));
  CHECK(-spec.eigenvalues[2].real() == Approx(g / 2).margin(1e-10));
  CHECK(-spec.eigenvalues[3].real() == Approx(g).margin(1e-10));
  CHECK(spec.steady_state.trace().real() == Approx(1.0));
  CHECK((spec.steady_state - ComplexMatrix(projector(ComplexVector(
            ComplexVector::Unit(2, 0))))).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("halving the tolerance changes observables less than the coarser rtol") {
  ComplexMatrix a = annihilation(3);
  ComplexMatrix H = 0.3 * (a + a.adjoint().eval());
  ComplexMatrix n = a.adjoint() * a;
  ComplexMatrix rho0 = ComplexMatrix::Zero(3, 3);
  rho0(1, 1) = 1.0;
  ObservableSet obs{{"n", n}};
  auto grid = linspace(0, 5, 26);
  EvolutionResult coarse = evolve(rho0, H, {{a, 0.4}}, grid, 2e-6, obs);
  EvolutionResult fine = evolve(rho0, H, {{a, 0.4}}, grid, 1e-6, obs);
  double max_diff = 0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    max_diff = std::max(max_diff, std::abs(coarse.observables.at("n")[i] -
                                           fine.observables.at("n")[i]));
  CHECK(max_diff < 2e-6);
}

TEST_CASE("integral lifetime: spectral and time-domain paths agree on a single mode") {
  ComplexMatrix a = annihilation(3);
  double g = 0.5;
  ComplexMatrix P1 = number_projector(3, 1);
  ComplexMatrix rho0 = ComplexMatrix::Zero(3, 3);
  rho0(1, 1) = 1.0;

  SpectralDecomposition sd = decompose_liouvillian(
      build_liouvillian(ComplexMatrix::Zero(3, 3), {{a, g}}));
  double T_spec = integral_lifetime(sd, rho0, P1);
  CHECK(T_spec == Approx(1.0 / g).epsilon(1e-8));

  auto grid = linspace(0, 9.0 / g, 301);
  ObservableSet obs{{"P1", P1}};
  EvolutionResult r = evolve(rho0, ComplexMatrix::Zero(3, 3), {{a, g}}, grid, 1e-9, obs);
  CurveLifetime ct = integral_lifetime_from_curve(r.times, r.observables.at("P1"));
  CHECK(ct.T_int == Approx(T_spec).epsilon(0.02));
  CHECK(ct.T_int == Approx(1.0 / g).epsilon(1e-3));
}

TEST_CASE("logical lifetimes on the fast parameter set") {
  DeviceParams p = fast_params(10.0);
  TensorSpace space = build_space(p);
  ComplexMatrix H = build_hamiltonian(p, space);
  auto collapse = collapse_operators(p, space);
  SpectralDecomposition sd = decompose_liouvillian(build_liouvillian(H, collapse));

  CHECK(sd.eigenvalues.real().maxCoeff() < 1e-9);

  auto [L0, L1] = logical_states(space);
  ComplexMatrix PL0 = projector(L0);
  ComplexMatrix zz = embed(ztilde(), "l", space) * embed(ztilde(), "r", space);
  ComplexVector sup = (L0 + L1) / std::sqrt(2.0);

  double T1L = integral_lifetime(sd, PL0, PL0);
  double T2L = integral_lifetime(sd, projector(sup), zz);
  CHECK(T1L == Approx(69.3685).epsilon(1e-3));
  CHECK(T2L == Approx(56.2325).epsilon(1e-3));

  // The asymptotic tails are slower than the integral values here because the
  // decays are mildly multi-exponential.
  LiouvillianSpectrum slow = slowest_decay_rates(sd, 8);
  bool found_t1_tail = false, found_t2_tail = false;
  for (std::size_t i = 1; i < slow.eigenvalues.size(); ++i) {
    double T = -1.0 / slow.eigenvalues[i].real();
    if (std::abs(T - 83.011) / 83.011 < 2e-3) found_t1_tail = true;
    if (std::abs(T - 59.1264) / 59.1264 < 2e-3) found_t2_tail = true;
  }
  CHECK(found_t1_tail);
  CHECK(found_t2_tail);
  CHECK(slow.steady_state.trace().real() == Approx(1.0));

  SpectralDecomposition sd3 = decompose_liouvillian(build_liouvillian(
      build_hamiltonian(fast_params(3.0), space),
      collapse_operators(fast_params(3.0), space)));
  CHECK(integral_lifetime(sd3, PL0, PL0) == Approx(6.7442).epsilon(1e-3));
  CHECK(integral_lifetime(sd3, projector(sup), zz) == Approx(5.3893).epsilon(1e-3));
}

TEST_CASE("shadow truncation convergence of the fitted logical lifetime") {
  double T_vals[2];
  for (int ns : {1, 2}) {
    DeviceParams p = fast_params(3.0);
    p.Omega = two_pi * 0.35;  // W = 10 Omega
    p.n_shadow = ns;
    TensorSpace space = build_space(p);
    ComplexMatrix H = build_hamiltonian(p, space);
    auto collapse = collapse_operators(p, space);
    auto [L0, L1] = logical_states(space);
    ComplexMatrix PL0 = projector(L0);
    auto grid = linspace(0, 24.0, 241);
    EvolutionResult r = evolve(PL0, H, collapse, grid, 1e-7,
                               ObservableSet{{"F", PL0}}, -1.0, 25);
    T_vals[ns - 1] = integral_lifetime_from_curve(r.times, r.observables.at("F")).T_int;
    CHECK(r.trace_err_max <= 1e-7);
    CHECK(r.herm_defect_max <= 1e-8);
    CHECK(r.min_eigenvalue >= -1e-6);
  }
  CHECK(std::abs(T_vals[1] / T_vals[0] - 1.0) < 0.05);
}
