#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "vislim/analysis.hpp"
#include "vislim/analysis/suites.hpp"
#include "vislim/io/report.hpp"

using namespace vislim;

namespace {

// int_{-1}^{1} exp(-1/(1-s^2)) ds, by adaptive quadrature.
constexpr double kBumpIntegral = 0.4439938161680793;

ZetaFit fit_of(double zeta, double nu, double C = 1.0) {
  ZetaFit f;
  f.zeta2 = f.zeta2_raw = zeta;
  f.nu = nu;
  f.C_U = C;
  return f;
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v;
  for (int k = 0; k < n; ++k) v.push_back(a * std::pow(b / a, static_cast<double>(k) / (n - 1)));
  return v;
}

DomainSpec grid(int Nx, int Ny, double T = 1.0) {
  DomainSpec d;
  d.Nx = Nx;
  d.Ny = Ny;
  d.T_final = T;
  return d;
}

// Snapshots of a steady field at n + 1 equally spaced times on [0, T].
std::vector<VelocityField> steady(const VelocityField& u, double T, int n) {
  std::vector<VelocityField> s;
  for (int k = 0; k <= n; ++k) {
    VelocityField f = u;
    f.set_time(T * k / n);
    s.push_back(std::move(f));
  }
  return s;
}

SweepConfig small_sweep(std::vector<double> nus) {
  SweepConfig c;
  c.base.domain = grid(128, 65, 0.1);
  c.base.dt = 1.25e-3;
  c.base.snapshot_interval = 0.0025;
  c.base.init.k_max = 12;
  c.base.init.seed = 3;
  c.nus = std::move(nus);
  return c;
}

}  // namespace

TEST(Zeta, ExactPowerLawIsRecovered) {
  const auto r = logspace(0.01, 0.2, 10);
  for (double z : {0.4, 2.0 / 3.0, 1.0, 1.5}) {
    std::vector<double> s;
    for (double x : r) s.push_back(2.5 * std::pow(x, z));
    const auto f = fit_zeta2(r, s, 1e-12);
    EXPECT_NEAR(f.zeta2, z, 1e-10);
    EXPECT_NEAR(f.C_U, 2.5, 1e-9);
    EXPECT_LT(f.rms_logfit_residual, 1e-10);
    EXPECT_FALSE(f.out_of_range);
  }
}

TEST(Zeta, DissipationScaleAtReferencePoint) {
  const auto f = fit_of(2.0 / 3.0, 1e-4);
  EXPECT_NEAR(f.eta(), 1e-3, 1e-15);
}

TEST(Zeta, EtaIdentityAndCrossing) {
  for (double z : {0.3, 2.0 / 3.0, 1.0, 1.7})
    for (double nu : {1e-2, 1e-4, 1e-7}) {
      const auto f = fit_of(z, nu);
      EXPECT_LE(eta_identity_gap(f), 1e-12);
      EXPECT_LE(crossing_gap(f), 1e-10);
    }
}

TEST(Zeta, SubDissipationPointsAreExcluded) {
  const double nu = 1e-3, z = 0.5;
  const double eta = std::pow(nu, 1 / (2 - z));
  std::vector<double> r{0.3 * eta, 0.5 * eta, 0.7 * eta};
  for (double x : logspace(eta, 100 * eta, 12)) r.push_back(x);
  std::vector<double> s;
  for (double x : r) s.push_back(x >= eta ? std::pow(x, z) : std::pow(eta, z) * (x / eta) * (x / eta));
  const auto f = fit_zeta2(r, s, nu);
  EXPECT_NEAR(f.zeta2, z, 1e-9);
  EXPECT_GE(f.r_lo, eta);
  EXPECT_FALSE(f.inertial_unresolved);
}

TEST(Zeta, UnresolvedWhenShiftsLieBelowEta) {
  const auto r = logspace(1e-4, 1e-3, 8);
  std::vector<double> s;
  for (double x : r) s.push_back(x);
  const auto f = fit_zeta2(r, s, 0.5);
  EXPECT_TRUE(f.inertial_unresolved);
}

TEST(Zeta, RejectsBadInput) {
  const auto r = logspace(0.01, 0.1, 8);
  std::vector<double> s(8, 1.0);
  EXPECT_THROW(fit_zeta2(r, s, 0.0), InvalidArgument);
  s[3] = 0.0;
  EXPECT_THROW(fit_zeta2(r, s, 1e-3), InvalidArgument);
  EXPECT_THROW(fit_zeta2({0.1, 0.2}, {1.0, 2.0}, 1e-3), InvalidArgument);
}

TEST(Zeta, RandomFieldExponentRecovery) {
  DomainSpec d = grid(256, 129);
  const Subdomain U{0.5, 1.5, 0.25, 0.75};
  const auto sh = axis_shift_set(d, U);
  double mean = 0;
  const int seeds = 4;
  for (int k = 0; k < seeds; ++k) {
    InitSpec s;
    s.zeta = 2.0 / 3.0;
    s.seed = 100 + k;
    const auto tab = structure_function(std::vector<VelocityField>{make_initial(s, d)}, U, sh);
    mean += fit_zeta2(tab, 1e-8).zeta2 / seeds;
  }
  EXPECT_NEAR(mean, 2.0 / 3.0, 0.05);
}

TEST(Inertial, PassWhenConstantsAreUniform) {
  std::vector<std::optional<ZetaFit>> f{fit_of(0.6, 1e-2, 1.0), fit_of(0.65, 5e-3, 1.5), fit_of(0.7, 2.5e-3, 2.0)};
  const auto v = check_inertial_condition(f);
  EXPECT_EQ(v.verdict, Verdict::Pass);
  EXPECT_DOUBLE_EQ(v.c_ratio, 2.0);
  EXPECT_NEAR(v.zeta_spread, 0.1, 1e-12);
}

TEST(Inertial, FailOnGrowingConstant) {
  std::vector<std::optional<ZetaFit>> f{fit_of(0.6, 1e-2, 1.0), fit_of(0.6, 5e-3, 4.0), fit_of(0.6, 2.5e-3, 10.0)};
  const auto v = check_inertial_condition(f);
  EXPECT_EQ(v.verdict, Verdict::Fail);
  EXPECT_NE(v.reason.find("C_U ratio"), std::string::npos);
}

TEST(Inertial, FailOnExponentSpreadOrFloor) {
  std::vector<std::optional<ZetaFit>> f{fit_of(0.3, 1e-2), fit_of(0.6, 5e-3), fit_of(0.6, 2.5e-3)};
  EXPECT_EQ(check_inertial_condition(f).verdict, Verdict::Fail);
  std::vector<std::optional<ZetaFit>> g{fit_of(0.05, 1e-2), fit_of(0.05, 5e-3), fit_of(0.05, 2.5e-3)};
  EXPECT_EQ(check_inertial_condition(g).verdict, Verdict::Fail);
}

TEST(Inertial, PartialOnMissingOrFewFits) {
  std::vector<std::optional<ZetaFit>> f{fit_of(0.6, 1e-2), std::nullopt, fit_of(0.6, 2.5e-3), fit_of(0.6, 1e-3)};
  EXPECT_EQ(check_inertial_condition(f).verdict, Verdict::Partial);
  std::vector<std::optional<ZetaFit>> g{fit_of(0.6, 1e-2), fit_of(0.6, 5e-3)};
  EXPECT_EQ(check_inertial_condition(g).verdict, Verdict::Partial);
}

TEST(SubDissipation, GradientBoundBelowEta) {
  const double nu = 1e-2, D = 0.5;
  const auto fit = fit_of(1.0, nu);  // eta = 0.01
  StructureFunctionTable t;
  t.shifts = {{{1.0, 0.0}}, {0.002, 0.005, 0.01, 0.05, 0.1}};
  t.values = {{}};
  for (double r : t.shifts.magnitudes) t.values[0].push_back(r <= 0.01 ? 0.5 * r * r / nu * D : r);
  auto v = sub_dissipation_check(t, fit, nu, D);
  EXPECT_EQ(v.verdict, Verdict::Pass);
  EXPECT_EQ(v.sampled_below_eta, 3);
  EXPECT_NEAR(v.worst_gradient_ratio, 0.5, 1e-12);
  EXPECT_TRUE(v.combined_bound_holds);
  t.values[0][0] *= 4;
  EXPECT_EQ(sub_dissipation_check(t, fit, nu, D).verdict, Verdict::Fail);
  EXPECT_EQ(sub_dissipation_check(t, fit_of(1.0, 1e-4), 1e-4, D).verdict, Verdict::Unresolved);
}

TEST(Anomaly, VanishingDissipation) {
  std::vector<double> nus{1e-2, 5e-3, 2.5e-3, 1.25e-3}, D;
  for (double n : nus) D.push_back(3 * std::sqrt(n));
  const auto e = dissipation_anomaly(nus, D);
  EXPECT_EQ(e.trend, DissipationTrend::Vanishing);
  EXPECT_NEAR(e.slope, 0.5, 1e-12);
  EXPECT_LT(e.limit, D.back());
}

TEST(Anomaly, PlateauAndIncreasing) {
  std::vector<double> nus{1e-2, 5e-3, 2.5e-3}, P, I;
  for (double n : nus) {
    P.push_back(0.3 + 0.1 * n);
    I.push_back(std::pow(n, -0.3));
  }
  const auto p = dissipation_anomaly({nus[2], nus[0], nus[1]}, {P[2], P[0], P[1]});
  EXPECT_EQ(p.trend, DissipationTrend::Plateau);
  EXPECT_NEAR(p.limit, 0.3, 1e-9);
  EXPECT_EQ(p.nus.front(), 1e-2);
  EXPECT_EQ(dissipation_anomaly(nus, I).trend, DissipationTrend::Increasing);
  EXPECT_THROW(dissipation_anomaly({1e-2, 1e-3}, {1.0, 1.0}), InvalidArgument);
}

TEST(Bank, StandardBankIsSolenoidalAndCompactlySupported) {
  const auto d = grid(64, 33);
  const auto b = TestFieldBank::standard(d, 1.0);
  ASSERT_EQ(b.size(), 12u);
  for (const auto& f : b.fields) {
    EXPECT_LE(divergence(f.phi).max_abs(), 1e-10);
    EXPECT_EQ(f.time_factor(f.tc + f.tau), 0.0);
    EXPECT_DOUBLE_EQ(f.time_factor(f.tc), 1.0);
    for (int i = 0; i < d.Nx; ++i) {
      EXPECT_EQ(f.phi.u(i, 0), 0.0);
      EXPECT_EQ(f.phi.v(i, d.Ny - 1), 0.0);
    }
  }
  EXPECT_NEAR(required_spacing(b), 0.2 / 8, 1e-15);
}

TEST(Bank, PairingWithOwnSpatialFactor) {
  const auto d = grid(64, 33);
  const auto b = TestFieldBank::standard(d, 1.0);
  const int n = 640;
  for (std::size_t j : {0u, 5u, 11u}) {
    const auto& f = b.fields[j];
    const auto r = weak_pairing(steady(f.phi, 1.0, n), b);
    const double expected = inner(f.phi, f.phi) * f.tau * std::exp(1.0) * kBumpIntegral;
    EXPECT_NEAR(r.P[j], expected, 1e-9 * expected);
  }
}

TEST(Bank, PairingIsLinear) {
  const auto d = grid(64, 33);
  const auto b = TestFieldBank::standard(d, 1.0);
  InitSpec s;
  const auto u = make_initial(s, d);
  s.seed = 2;
  const auto w = make_initial(s, d);
  const auto pu = weak_pairing(steady(u, 1.0, 64), b), pw = weak_pairing(steady(w, 1.0, 64), b);
  const auto ps = weak_pairing(steady(2.0 * u + 3.0 * w, 1.0, 64), b);
  for (std::size_t j = 0; j < b.size(); ++j)
    EXPECT_NEAR(ps.P[j], 2 * pu.P[j] + 3 * pw.P[j], 1e-12 * (std::abs(pu.P[j]) + std::abs(pw.P[j]) + 1e-12));
}

TEST(Bank, CoarseCadenceIsRejected) {
  const auto d = grid(64, 33);
  const auto b = TestFieldBank::standard(d, 1.0);
  const auto snaps = steady(VelocityField(d), 1.0, 20);
  try {
    euler_residual(snaps, std::nullopt, b, 1e-2);
    FAIL() << "expected a cadence error";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("need spacing <= 0.025"), std::string::npos) << e.what();
  }
}

TEST(Bank, ResidualsOfZeroFieldVanishAndBoundHolds) {
  const auto d = grid(64, 33);
  const auto b = TestFieldBank::standard(d, 1.0);
  const auto z = euler_residual(steady(VelocityField(d), 1.0, 64), std::nullopt, b, 1e-2);
  for (const auto& r : z.records) {
    EXPECT_EQ(r.R, 0.0);
    EXPECT_EQ(r.V, 0.0);
  }
  InitSpec s;
  s.seed = 4;
  const auto res = euler_residual(steady(make_initial(s, d), 1.0, 64), std::nullopt, b, 1e-2);
  for (const auto& r : res.records) EXPECT_LE(std::abs(r.V), r.cs_bound * (1 + 1e-12));
}

TEST(Equivalence, ZeroFieldGivesZeroNorms) {
  const auto d = grid(128, 65);
  const NestedRegions R{{0.4, 1.6, 0.2, 0.8}, {0.6, 1.4, 0.3, 0.7}, {0.8, 1.2, 0.4, 0.6}};
  const auto e = equivalence_report({VelocityField(d)}, R, 1.0);
  EXPECT_EQ(e.besov_u_U, 0.0);
  EXPECT_EQ(e.vort_V, 0.0);
  EXPECT_EQ(e.step1_ratio, 0.0);
  EXPECT_EQ(e.step2_ratio, 0.0);
  EXPECT_DOUBLE_EQ(e.delta, 0.45);
}

TEST(Equivalence, RoughEnsembleStepTwoConstantIsUniform) {
  const auto checks = equivalence_suite();
  ASSERT_EQ(checks.size(), 1u);
  EXPECT_TRUE(checks[0].pass) << checks[0].detail;
}

TEST(Equivalence, RegionsMustNestWithMargin) {
  const auto d = grid(128, 65);
  const NestedRegions R{{0.4, 1.6, 0.2, 0.8}, {0.45, 1.4, 0.3, 0.7}, {0.8, 1.2, 0.4, 0.6}};
  EXPECT_THROW(R.validate(d), InvalidArgument);
  EXPECT_NEAR(default_delta(2.0 / 3.0), 1.0 / 3.0 - 0.05, 1e-15);
}

TEST(Uniformity, Verdicts) {
  EXPECT_EQ(uniformity({1.0, 2.0, 2.5}).verdict, Verdict::Pass);
  EXPECT_EQ(uniformity({1.0, 2.0, 10.0}).verdict, Verdict::Fail);
  EXPECT_EQ(uniformity({1.0, 5.0}).verdict, Verdict::Partial);
}

TEST(LimitProxy, AverageAndBound) {
  const auto d = grid(64, 33);
  InitSpec s;
  const auto a = steady(make_initial(s, d), 1.0, 4);
  s.seed = 9;
  const auto b = steady(make_initial(s, d), 1.0, 4);
  const auto same = average_runs(a, a);
  for (std::size_t n = 0; n < a.size(); ++n)
    EXPECT_TRUE(std::ranges::equal(same[n].u.data(), a[n].u.data()));
  const Subdomain U{0.5, 1.5, 0.25, 0.75};
  const auto sh = default_shift_set(d, U);
  const double na = besov_norm_time(a, 0.3, U, sh).value, nb = besov_norm_time(b, 0.3, U, sh).value;
  const auto c = limit_besov_check(average_runs(a, b), U, 0.6, std::max(na, nb), sh, 0.0);
  EXPECT_TRUE(c.holds);  // triangle inequality
  auto shifted = b;
  shifted.back().set_time(2.0);
  EXPECT_THROW(average_runs(a, shifted), InvalidArgument);
}

TEST(Sweep, SingleViscosityHasNoCrossVerdicts) {
  const auto rep = run_sweep(small_sweep({0.01}));
  ASSERT_EQ(rep.records.size(), 1u);
  EXPECT_TRUE(rep.records[0].ok) << rep.records[0].error;
  EXPECT_FALSE(rep.cross_sufficient);
  EXPECT_EQ(io::to_json(rep)["cross_nu"], "insufficient data");
}

TEST(Sweep, ViscosityOrderDoesNotMatter) {
  const auto a = io::dump(io::to_json(run_sweep(small_sweep({0.02, 0.01, 0.005}))));
  auto c = small_sweep({0.005, 0.02, 0.01});
  c.threads = 2;
  const auto b = io::dump(io::to_json(run_sweep(c)));
  EXPECT_EQ(a, b);
}

TEST(Sweep, RejectsCoarseCadenceUpFront) {
  auto c = small_sweep({0.01});
  c.base.snapshot_interval = 0.01;
  EXPECT_THROW(run_sweep(c), InvalidArgument);
}
