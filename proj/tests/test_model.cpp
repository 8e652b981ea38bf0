#include <catch2/catch_amalgamated.hpp>

#include "sqec/lindblad.hpp"
#include "sqec/model.hpp"

using namespace sqec;
using Catch::Approx;

namespace {
DeviceParams scaled_params() {
  DeviceParams p;
  p.W = two_pi * 3.5;
  p.delta = two_pi * 35.0;
  p.Omega = two_pi * 0.5;
  p.gamma_S = 5.0;
  p.gamma_P = 0.0;
  return p;
}
}  // namespace

TEST_CASE("space construction") {
  DeviceParams p = scaled_params();
  CHECK(build_space(p).dim() == 36);
  p.n_shadow = 2;
  CHECK(build_space(p).dim() == 81);
  p.n_shadow = 3;
  CHECK_THROWS_AS(build_space(p), std::invalid_argument);
  p.n_shadow = 1;
  p.gamma_P = -1.0;
  CHECK_THROWS_AS(build_space(p), std::invalid_argument);
}

TEST_CASE("qubit Hamiltonian energies") {
  DeviceParams p = scaled_params();
  TensorSpace space = build_space(p);
  ComplexMatrix HP = build_HP(p, space);
  CHECK(hermiticity_defect(HP) < 1e-12);

  auto [L0, L1] = logical_states(space);
  CHECK(std::real(cdouble(L0.adjoint() * HP * L0)) == Approx(-p.W).epsilon(1e-12));

  // One lost photon leaves |1_l>|+_r>|vac>, which costs delta/2; together
  // with the -W it gave up this sets the W + delta/2 repair quantum.
  ComplexVector plus = qutrit_plus();
  ComplexVector full = ComplexVector::Zero(36);
  for (int j = 0; j < 3; ++j) full(space.flatten({1, j, 0, 0})) = plus(j);
  CHECK(std::real(cdouble(full.adjoint() * HP * full)) ==
        Approx(0.5 * p.delta).epsilon(1e-12));

  DeviceParams p0 = p;
  p0.W = 0;
  p0.delta = 0;
  CHECK(build_HP(p0, space).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("shadow Hamiltonian structure") {
  DeviceParams p = scaled_params();
  TensorSpace space = build_space(p);

  DeviceParams pd = p;
  pd.Omega = 0;
  ComplexMatrix HS = build_HPS_HS(pd, space);
  ComplexMatrix offdiag = HS;
  offdiag.diagonal().setZero();
  CHECK(offdiag.cwiseAbs().maxCoeff() < 1e-15);
  ComplexVector one_shadow = space.basis_state({0, 0, 1, 0});
  CHECK(std::real(cdouble(one_shadow.adjoint() * HS * one_shadow)) ==
        Approx(p.W + 0.5 * p.delta));

  ComplexMatrix H = build_hamiltonian(p, space);
  CHECK(hermiticity_defect(H) < 1e-12);

  // The repair transition |1_l,+_r,vac> -> |L0>|1_Sl> has matrix element
  // exactly Omega: <+|a^|1> = 1.
  auto [L0, L1] = logical_states(space);
  ComplexVector asl_dag_L0 = embed(annihilation(2), "Sl", space).adjoint() * L0;
  ComplexVector bare = ComplexVector::Zero(36);
  ComplexVector plus = qutrit_plus();
  for (int j = 0; j < 3; ++j) bare(space.flatten({1, j, 0, 0})) = plus(j);
  CHECK(std::abs(cdouble(asl_dag_L0.adjoint() * H * bare) - cdouble(p.Omega)) < 1e-10);
}

TEST_CASE("logical states") {
  DeviceParams p = scaled_params();
  TensorSpace space = build_space(p);
  auto [L0, L1] = logical_states(space);
  CHECK(L0.norm() == Approx(1.0));
  CHECK(L1.norm() == Approx(1.0));
  CHECK(std::abs(cdouble(L0.adjoint() * L1)) < 1e-15);

  ComplexMatrix stab = embed(xtilde(), "l", space) * embed(xtilde(), "r", space);
  CHECK(std::real(expectation(projector(L0), stab)) == Approx(1.0));
  CHECK(std::real(expectation(projector(L1), stab)) == Approx(1.0));

  // ztilde_l ztilde_r exchanges L0 and L1, so it reads out the coherence of
  // an equal superposition.
  ComplexMatrix zz = embed(ztilde(), "l", space) * embed(ztilde(), "r", space);
  ComplexVector sup = (L0 + L1) / std::sqrt(2.0);
  CHECK(std::real(expectation(projector(sup), zz)) == Approx(1.0));

  // With Omega = 0 the logical states are exact eigenstates at -W.
  DeviceParams pd = p;
  pd.Omega = 0;
  ComplexMatrix H0 = build_hamiltonian(pd, space);
  CHECK((H0 * L0 + p.W * L0).norm() < 1e-12);
  CHECK((H0 * L1 + p.W * L1).norm() < 1e-12);
}

TEST_CASE("one-photon excited doublets") {
  DeviceParams p = scaled_params();
  p.W = two_pi * 5.0;  // W = 10 Omega
  TensorSpace space = build_space(p);
  LogicalBasis b = error_states(p, space);

  const ComplexVector* states[4] = {&b.E0p, &b.E0m, &b.E1p, &b.E1m};
  for (int i = 0; i < 4; ++i) {
    CHECK(states[i]->norm() == Approx(1.0));
    for (int j = i + 1; j < 4; ++j)
      CHECK(std::abs(cdouble(states[i]->adjoint() * *states[j])) < 1e-14);
  }

  ComplexMatrix H = build_hamiltonian(p, space);
  double ep = std::real(cdouble(b.E0p.adjoint() * H * b.E0p));
  double em = std::real(cdouble(b.E0m.adjoint() * H * b.E0m));
  CHECK(ep - em == Approx(2.0 * p.Omega).epsilon(1e-10));
  double e1p = std::real(cdouble(b.E1p.adjoint() * H * b.E1p));
  double e1m = std::real(cdouble(b.E1m.adjoint() * H * b.E1m));
  CHECK(e1p - e1m == Approx(2.0 * p.Omega).epsilon(1e-10));

  ComplexVector lost = embed(annihilation(3), "l", space) * b.L0;
  lost.normalize();
  ComplexVector recon = (b.E0p + b.E0m) / std::sqrt(2.0);
  CHECK((lost - recon).norm() < 1e-12);
}

TEST_CASE("collapse operator inventory") {
  DeviceParams p = scaled_params();
  p.gamma_P = 0.1;
  TensorSpace space = build_space(p);
  auto ops = collapse_operators(p, space);
  REQUIRE(ops.size() == 4);
  CHECK(ops[0].second == Approx(p.gamma_P));
  CHECK(ops[2].second == Approx(p.gamma_S));
  for (const auto& [L, g] : ops) {
    CHECK(L.rows() == 36);
    CHECK(L.cwiseAbs().maxCoeff() > 0);
  }
  p.gamma_up = 0.01;
  CHECK(collapse_operators(p, space).size() == 6);
}

TEST_CASE("dissipationless evolution is unitary") {
  DeviceParams p = scaled_params();
  p.gamma_P = 0;
  p.gamma_S = 0;
  TensorSpace space = build_space(p);
  ComplexMatrix H = build_hamiltonian(p, space);
  auto [L0, L1] = logical_states(space);
  ComplexVector sup = (L0 + cdouble(0, 1) * L1).normalized();
  ComplexMatrix rho0 = projector(sup);

  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.1 * i);
  EvolutionResult r = evolve(rho0, H, {}, grid, 1e-8);
  double purity = std::real(expectation(r.final_rho, r.final_rho));
  CHECK(std::abs(purity - 1.0) < 1e-8);
}

TEST_CASE("off-resonant leakage bound") {
  DeviceParams p = scaled_params();
  p.Omega = two_pi * 0.35;  // W = 10 Omega
  TensorSpace space = build_space(p);
  ComplexMatrix H = build_hamiltonian(p, space);
  auto [L0, L1] = logical_states(space);

  double t_max = 10.0 / p.Omega;
  std::vector<double> grid;
  for (int i = 0; i <= 160; ++i) grid.push_back(t_max * i / 160.0);
  ObservableSet obs{{"F", projector(L0)}};
  EvolutionResult r = evolve(projector(L0), H, {}, grid, 1e-8, obs);

  double x = p.Omega / (2.0 * p.W + p.delta);
  double bound = 16.0 * x * x;  // 4 c x^2 with c = 4
  for (double f : r.observables.at("F")) CHECK(1.0 - f <= bound);
}

TEST_CASE("error doublet flops at 2 Omega") {
  DeviceParams p = scaled_params();
  p.Omega = two_pi * 0.35;
  TensorSpace space = build_space(p);
  ComplexMatrix H = build_hamiltonian(p, space);
  auto [L0, L1] = logical_states(space);

  ComplexVector bare = (embed(annihilation(3), "l", space) * L0).normalized();
  double period_guess = pi / p.Omega;  // population period of the doublet
  std::vector<double> grid;
  int n = 400;
  for (int i = 0; i <= n; ++i) grid.push_back(1.2 * period_guess * i / n);
  ObservableSet obs{{"P", projector(bare)}};
  EvolutionResult r = evolve(projector(bare), H, {}, grid, 1e-8, obs);

  const auto& pop = r.observables.at("P");
  std::size_t imin = 0;
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (pop[i] < pop[imin]) imin = i;
  double t_half = r.times[imin];              // first population minimum
  double freq = two_pi / (2.0 * t_half);      // oscillation angular frequency
  CHECK(freq == Approx(2.0 * p.Omega).epsilon(0.05));
}
