#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "vislim/solver.hpp"

using namespace vislim;
constexpr double kPi = std::numbers::pi;

namespace {

RunConfig stokes_config(int Ny, double dt) {
  RunConfig c;
  c.domain.Nx = 16;
  c.domain.Ny = Ny;
  c.domain.T_final = 0.1;
  c.nu = 0.01;
  c.dt = dt;
  c.init.kind = InitKind::StokesMode;
  c.snapshot_every = 1 << 30;
  return c;
}

double stokes_error(const RunConfig& c) {
  auto r = run(c);
  const auto& u = r.snapshots.back();
  const double decay = std::exp(-c.nu * kPi * kPi / (c.domain.H * c.domain.H) * u.time());
  auto ex = ScalarField::from_function(c.domain, [&](double, double y) { return std::sin(kPi * y / c.domain.H) * decay; });
  return std::sqrt(l2_norm(u.u - ex) * l2_norm(u.u - ex) + inner(u.v, u.v));
}

// Smallest positive root of lambda * tan(lambda H / 2) = alpha, by bisection.
double robin_root(double alpha, double H) {
  double lo = 1e-12, hi = kPi / H - 1e-12;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::tan(mid * H / 2) < alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

RunConfig random_config(BcKind bc) {
  RunConfig c;
  c.domain.Nx = 32;
  c.domain.Ny = 25;
  c.domain.T_final = 0.1;
  c.domain.bc = bc;
  c.nu = 2e-3;
  c.dt = 2e-3;
  c.init.seed = 11;
  c.snapshot_every = 10;
  return c;
}

}  // namespace

TEST(Step, StokesModeMatchesHeatDecay) {
  EXPECT_LE(stokes_error(stokes_config(129, 1e-4)), 1e-6);
}

TEST(Step, StokesModeSecondOrderUnderRefinement) {
  const double e1 = stokes_error(stokes_config(129, 1e-4));
  const double e2 = stokes_error(stokes_config(257, 5e-5));
  EXPECT_GE(e1 / e2, 3.6);
}

TEST(Step, RobinModeMatchesHeatDecay) {
  RunConfig c = stokes_config(129, 1e-4);
  c.domain.bc = BcKind::NavierFriction;
  c.domain.alpha0 = 2.0;
  c.domain.beta = 0.0;
  const double H = c.domain.H;
  const double lam = robin_root(2.0, H);
  auto init = ScalarField::from_function(c.domain, [&](double, double y) { return std::cos(lam * (y - H / 2)); });
  VelocityField u0(init, ScalarField(c.domain));
  auto r = run(c, u0);
  const auto& u = r.snapshots.back();
  const double decay = std::exp(-c.nu * lam * lam * u.time());
  auto ex = ScalarField::from_function(c.domain, [&](double, double y) { return std::cos(lam * (y - H / 2)) * decay; });
  EXPECT_LE(l2_norm(u.u - ex), 1e-6);
  EXPECT_LE(r.ledger.max_step_violation(), 1e-8 * r.ledger.E0());
  EXPECT_GT(r.ledger.dissipation_wall.back(), 0.0);
}

TEST(Step, UnforcedEnergyNonincreasingEveryStep) {
  for (auto bc : {BcKind::NoSlip, BcKind::NavierFriction}) {
    auto r = run(random_config(bc));
    for (std::size_t n = 1; n < r.ledger.rows(); ++n)
      EXPECT_LE(r.ledger.kinetic[n], r.ledger.kinetic[n - 1] * (1 + 1e-13)) << to_string(bc) << " step " << n;
  }
}

TEST(Step, EnergyBudgetHoldsEveryStep) {
  for (auto bc : {BcKind::NoSlip, BcKind::NavierFriction}) {
    RunConfig c = random_config(bc);
    c.forcing = {ForcingKind::SteadySolenoidal, 2.0, 1, 1};
    auto r = run(c);
    EXPECT_TRUE(r.ledger.inequality_holds(1e-8)) << to_string(bc) << " " << r.ledger.max_step_violation();
    EXPECT_GT(std::abs(r.ledger.force_work.back()), 0.0);
    EXPECT_EQ(r.ledger.curvature_term, 0.0);
    if (bc == BcKind::NoSlip) {
      EXPECT_EQ(r.ledger.dissipation_wall.back(), 0.0);
    } else {
      EXPECT_GT(r.ledger.dissipation_wall.back(), 0.0);
    }
  }
}

TEST(Step, StatesStaySolenoidalAndSatisfyWallConditions) {
  for (auto bc : {BcKind::NoSlip, BcKind::NavierFriction}) {
    auto r = run(random_config(bc));
    for (const auto& s : r.snapshots) {
      EXPECT_LE(divergence(s).max_abs(), 1e-10 * l2_norm(s));
      for (int i = 0; i < s.domain().Nx; ++i) {
        EXPECT_LE(std::abs(s.v(i, 0)) + std::abs(s.v(i, s.domain().Ny - 1)), 1e-13);
        if (bc == BcKind::NoSlip) {
          EXPECT_LE(std::abs(s.u(i, 0)) + std::abs(s.u(i, s.domain().Ny - 1)), 1e-13);
        }
      }
    }
  }
}

TEST(Step, AlternativeSchemesRunAndStaySolenoidal) {
  for (auto scheme : {TimeScheme::Ab2, TimeScheme::Midpoint})
    for (auto adv : {AdvectionForm::Conservative, AdvectionForm::Rotational}) {
      RunConfig c = random_config(BcKind::NoSlip);
      c.scheme = scheme;
      c.advection = adv;
      auto r = run(c);
      EXPECT_LE(divergence(r.snapshots.back()).max_abs(), 1e-10 * l2_norm(r.snapshots.back()));
      EXPECT_LT(r.ledger.kinetic.back(), r.ledger.E0());
    }
}

TEST(Step, RejectsNonFiniteState) {
  RunConfig c = random_config(BcKind::NoSlip);
  auto u0 = make_initial(c.init, c.domain);
  u0.u(3, 5) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(run(c, u0), NumericalFailure);
}

TEST(Step, CflViolationHalvesTimeStep) {
  RunConfig c = random_config(BcKind::NoSlip);
  c.dt = 0.05;
  c.domain.T_final = 0.05;
  auto r = run(c);
  EXPECT_GT(r.retries, 0);
  EXPECT_NEAR(r.snapshots.back().time(), 0.05, 1e-14);
}

TEST(Run, ZeroFinalTimeGivesInitialSnapshotOnly) {
  RunConfig c = random_config(BcKind::NoSlip);
  c.domain.T_final = 0.0;
  auto r = run(c);
  ASSERT_EQ(r.snapshots.size(), 1u);
  EXPECT_EQ(r.steps, 0);
}

TEST(Run, IsBitwiseDeterministic) {
  RunConfig c = random_config(BcKind::NavierFriction);
  auto a = run(c), b = run(c);
  ASSERT_EQ(a.snapshots.size(), b.snapshots.size());
  for (std::size_t n = 0; n < a.snapshots.size(); ++n) {
    EXPECT_EQ(io::encode_snapshot(a.snapshots[n]), io::encode_snapshot(b.snapshots[n]));
  }
  EXPECT_EQ(a.ledger.kinetic, b.ledger.kinetic);
}

TEST(Run, HalvedViscosityLedgersAreFiniteAndBounded) {
  for (double nu : {4e-3, 2e-3}) {
    RunConfig c = random_config(BcKind::NoSlip);
    c.nu = nu;
    auto r = run(c);
    EXPECT_TRUE(std::isfinite(r.ledger.dissipation_bulk.back()));
    EXPECT_TRUE(r.ledger.inequality_holds());
    EXPECT_LE(r.ledger.dissipation_bulk.back(), r.ledger.E0() * (1 + 1e-8));
  }
}

TEST(Run, SnapshotCadence) {
  RunConfig c = random_config(BcKind::NoSlip);
  c.snapshot_every = 7;  // 50 steps -> 0,7,...,49 and the final state
  auto r = run(c);
  EXPECT_EQ(r.snapshots.size(), 1u + 7u + 1u);
  EXPECT_NEAR(r.snapshots.back().time(), c.domain.T_final, 1e-14);
}

TEST(Project, SolenoidalFieldIsUnchanged) {
  DomainSpec d;
  d.Nx = 32;
  d.Ny = 25;
  auto psi = ScalarField::from_function(d, [&](double x, double y) { return std::sin(kPi * x) * std::pow(std::sin(kPi * y), 2); });
  ScalarField v = dx(psi);
  v *= -1;
  VelocityField vel(dy(psi), v);
  auto p = project(vel);
  EXPECT_LE(l2_norm(p - vel), 1e-10 * l2_norm(vel));
}

TEST(Project, IsIdempotentAndSolenoidal) {
  DomainSpec d;
  d.Nx = 32;
  d.Ny = 25;
  VelocityField vel(d);
  vel.u = ScalarField::from_function(d, [](double x, double y) { return std::cos(2 * x) * y + std::sin(x + 3 * y); });
  vel.v = ScalarField::from_function(d, [](double x, double y) { return std::sin(x) * y * (1 - y) * std::exp(y); });
  for (auto kind : {SpaceKind::Impermeable, SpaceKind::NoSlip}) {
    auto p = project(vel, kind);
    auto pp = project(p, kind);
    EXPECT_LE(l2_norm(pp - p), 1e-10 * l2_norm(p));
    EXPECT_LE(divergence(p).max_abs(), 1e-10 * l2_norm(p));
    for (int i = 0; i < d.Nx; ++i) EXPECT_LE(std::abs(p.v(i, 0)) + std::abs(p.v(i, d.Ny - 1)), 1e-13);
    // The removed part is orthogonal to the solenoidal space.
    EXPECT_LE(std::abs(inner(vel - p, p)), 1e-10 * inner(vel, vel));
  }
}

TEST(Project, AnnihilatesDiscreteGradients) {
  DomainSpec d;
  d.Nx = 32;
  d.Ny = 33;
  // Smooth phi with zero normal derivative at the walls.
  auto phi = ScalarField::from_function(d, [&](double x, double y) { return std::cos(kPi * x) * std::cos(kPi * y) + std::cos(2 * kPi * y); });
  auto g = gradient(phi);
  auto p = project(g);
  EXPECT_LE(l2_norm(p), 1e-8 * l2_norm(g));
}

TEST(MakeInitial, SameSeedIsBitwiseIdentical) {
  DomainSpec d;
  d.Nx = 64;
  d.Ny = 33;
  InitSpec s;
  s.seed = 42;
  auto a = make_initial(s, d), b = make_initial(s, d);
  EXPECT_EQ(io::encode_snapshot(a), io::encode_snapshot(b));
  s.seed = 43;
  EXPECT_NE(io::encode_snapshot(a), io::encode_snapshot(make_initial(s, d)));
}

TEST(MakeInitial, StokesModeEnergyIsExact) {
  DomainSpec d;
  d.Nx = 16;
  d.Ny = 65;
  InitSpec s;
  s.kind = InitKind::StokesMode;
  auto u = make_initial(s, d);
  EXPECT_NEAR(inner(u, u), d.Lx * d.H / 2, 1e-13);
}

TEST(MakeInitial, RandomSpectrumLiesInDiscreteSpace) {
  DomainSpec d;
  d.Nx = 64;
  d.Ny = 33;
  InitSpec s;
  s.amplitude = 0.7;
  auto u = make_initial(s, d);
  EXPECT_LE(divergence(u).max_abs(), 1e-10 * l2_norm(u));
  for (int i = 0; i < d.Nx; ++i) {
    EXPECT_LE(std::abs(u.u(i, 0)) + std::abs(u.u(i, d.Ny - 1)), 1e-13);
    EXPECT_LE(std::abs(u.v(i, 0)) + std::abs(u.v(i, d.Ny - 1)), 1e-13);
  }
  EXPECT_NEAR(l2_norm(u) / std::sqrt(d.Lx * d.H), 0.7, 1e-12);
}

TEST(MakeInitial, BandAboveNyquistIsRejected) {
  DomainSpec d;
  d.Nx = 32;
  d.Ny = 17;
  InitSpec s;
  s.k_max = 1000.0;
  EXPECT_THROW(make_initial(s, d), InvalidArgument);
}

TEST(MakeInitial, BandLimitKeepsLowModePhases) {
  DomainSpec d;
  d.Nx = 64;
  d.Ny = 33;
  InitSpec s;
  s.amplitude = 0.0;
  s.k_max = 20.0;
  auto a = random_stream_function(s, d);
  s.k_max = 40.0;
  auto b = random_stream_function(s, d);
  // Low-pass both: the first band is contained in the second.
  EXPECT_GT(inner(a, b), 0.99 * inner(a, a));
}

TEST(Forcing, IsSolenoidalAndSupportedAwayFromWalls) {
  DomainSpec d;
  d.Nx = 32;
  d.Ny = 41;
  auto f = make_forcing({ForcingKind::SteadySolenoidal, 1.5, 2, 1}, d);
  EXPECT_LE(divergence(f).max_abs(), 1e-10 * l2_norm(f));
  EXPECT_GT(l2_norm(f), 0.0);
  for (int i = 0; i < d.Nx; ++i)
    for (int j = 0; j < d.Ny; ++j)
      if (d.y(j) < 0.1 * d.H || d.y(j) > 0.9 * d.H) {
        EXPECT_EQ(f.u(i, j), 0.0);
        EXPECT_EQ(f.v(i, j), 0.0);
      }
}
