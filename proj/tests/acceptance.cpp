// Acceptance checks: one PASS/FAIL line per criterion.
// usage: acceptance <vislim-cli> <configs-dir> <work-dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "vislim/analysis.hpp"
#include "vislim/analysis/suites.hpp"
#include "vislim/io/config.hpp"
#include "vislim/io/report.hpp"
#include "vislim/io/snapshot.hpp"
#include "vislim/norms.hpp"
#include "vislim/solver.hpp"

using namespace vislim;
namespace fs = std::filesystem;
constexpr double kPi = std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void check(bool ok, const std::string& what) {
    pass &= ok;
    detail += (detail.empty() ? "" : "; ") + what + (ok ? "" : " [failed]");
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Largest per-step energy violation seen by any run, relative to its E0.
double g_worst_step_violation = 0.0;

RunResult tracked_run(const RunConfig& c, const VelocityField* u0 = nullptr) {
  RunResult r = u0 ? run(c, *u0) : run(c);
  g_worst_step_violation = std::max(g_worst_step_violation, r.ledger.max_step_violation() / r.ledger.E0());
  return r;
}

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
  const auto r = tracked_run(c);
  const auto& u = r.snapshots.back();
  const double H = c.domain.H;
  const double decay = std::exp(-c.nu * kPi * kPi / (H * H) * u.time());
  const auto ex = ScalarField::from_function(c.domain, [&](double, double y) { return std::sin(kPi * y / H) * decay; });
  const double e = l2_norm(u.u - ex);
  return std::sqrt(e * e + inner(u.v, u.v));
}

// Smallest positive root of lambda tan(lambda H / 2) = alpha.
double robin_root(double alpha, double H) {
  double lo = 1e-12, hi = kPi / H - 1e-12;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mid * std::tan(mid * H / 2) < alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Outcome solver_exactness() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const double e1 = stokes_error(stokes_config(129, 1e-4));
  const double e2 = stokes_error(stokes_config(257, 5e-5));
  const double t = seconds_since(t0);
  o.check(e1 <= 1e-6, "L2 error " + short_num(e1) + " <= 1e-6");
  o.check(e1 / e2 >= 3.6, "refinement ratio " + short_num(e1 / e2) + " >= 3.6");
  o.check(t <= 30, "runtime " + short_num(t) + " s <= 30 s");
  return o;
}

Outcome robin_mode() {
  Outcome o;
  RunConfig c = stokes_config(129, 1e-4);
  c.domain.bc = BcKind::NavierFriction;
  c.domain.alpha0 = 2.0;
  c.domain.beta = 0.0;
  const double H = c.domain.H, lam = robin_root(2.0, H);
  const auto prof = [&](double y) { return std::cos(lam * (y - H / 2)); };
  const VelocityField u0(ScalarField::from_function(c.domain, [&](double, double y) { return prof(y); }),
                         ScalarField(c.domain));
  const auto r = tracked_run(c, &u0);
  const auto& u = r.snapshots.back();
  const double decay = std::exp(-c.nu * lam * lam * u.time());
  const auto ex = ScalarField::from_function(c.domain, [&](double, double y) { return prof(y) * decay; });
  const double err = std::hypot(l2_norm(u.u - ex), l2_norm(u.v));
  o.check(err <= 1e-6, "Robin-mode L2 error " + short_num(err) + " <= 1e-6 (lambda " + short_num(lam) + ")");
  return o;
}

Outcome energy_budgets() {
  Outcome o;
  for (BcKind bc : {BcKind::NoSlip, BcKind::NavierFriction}) {
    RunConfig c;
    c.domain = DomainSpec{2.0, 1.0, 64, 65, 0.2, bc};
    c.nu = 2e-3;
    c.dt = 1e-3;
    c.init.k_max = 16;
    c.init.seed = 5;
    c.forcing = {ForcingKind::SteadySolenoidal, 1.0, 1, 2};
    const auto r = tracked_run(c);
    o.check(r.ledger.inequality_holds(1e-8), std::string(to_string(bc)) + " forced run budget holds");
  }
  return o;
}

// u = cos(2 pi m x / Lx + 0.3) y (H - y) + 0.2, v = 0.
double xmode(const DomainSpec& d, int m, double x, double y) {
  return std::cos(2 * kPi * m * x / d.Lx + 0.3) * y * (d.H - y) + 0.2;
}

Outcome structure_function_exactness() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  DomainSpec d;
  d.Nx = 256;
  d.Ny = 129;
  const Subdomain U{0.5, 1.5, 0.25, 0.75};
  const int m = 3;
  VelocityField f(d);
  f.u = ScalarField::from_function(d, [&](double x, double y) { return xmode(d, m, x, y); });
  ShiftSet sh{{{1.0, 0.0}, {-1.0, 0.0}}, {}};
  for (int k = 1; k * d.dx() < U.margin(d); ++k) sh.magnitudes.push_back(k * d.dx());
  const auto tab = structure_function(std::vector<VelocityField>{f}, U, sh);
  const auto w = restrict(d, U);
  double worst = 0;
  for (std::size_t a = 0; a < sh.directions.size(); ++a)
    for (std::size_t b = 0; b < sh.magnitudes.size(); ++b) {
      const double rx = sh.directions[a][0] * sh.magnitudes[b];
      double ref = 0;
      for (int i = 0; i < d.Nx; ++i)
        for (int j = 0; j < d.Ny; ++j) {
          const double e = xmode(d, m, d.x(i) + rx, d.y(j)) - xmode(d, m, d.x(i), d.y(j));
          ref += w.wx[i] * w.wy[j] * e * e;
        }
      worst = std::max(worst, std::abs(tab.values[a][b] - ref) / ref);
    }
  const double t = seconds_since(t0);
  o.check(worst <= 1e-12, "max relative gap " + short_num(worst) + " over " +
                              std::to_string(2 * sh.magnitudes.size()) + " grid-aligned shifts <= 1e-12");
  o.check(t <= 5, "runtime " + short_num(t) + " s <= 5 s");
  return o;
}

std::vector<ZetaFit> g_fits;

Outcome zeta_recovery() {
  Outcome o;
  DomainSpec d;
  d.Nx = 256;
  d.Ny = 129;
  const Subdomain U{0.5, 1.5, 0.25, 0.75};
  const auto sh = axis_shift_set(d, U);
  double worst_identity = 0;
  for (double target : {0.4, 2.0 / 3.0, 1.0}) {
    double mean = 0;
    for (int k = 0; k < 16; ++k) {
      InitSpec s;
      s.zeta = target;
      s.seed = 1000 + static_cast<std::uint64_t>(k);
      const auto tab = structure_function(std::vector<VelocityField>{make_initial(s, d)}, U, sh);
      const auto f = fit_zeta2(tab, 1e-8);
      g_fits.push_back(f);
      worst_identity = std::max(worst_identity, eta_identity_gap(f));
      mean += f.zeta2 / 16;
    }
    o.check(std::abs(mean - target) <= 0.05,
            "target " + short_num(target) + " mean " + short_num(mean) + " (16 seeds, tol 0.05)");
  }
  o.check(worst_identity <= 1e-12, "eta identity gap " + short_num(worst_identity) + " <= 1e-12");
  ZetaFit ref;
  ref.zeta2 = 2.0 / 3.0;
  ref.nu = 1e-4;
  o.check(std::abs(ref.eta() - 1e-3) <= 1e-15, "eta(1e-4, 2/3) = " + short_num(ref.eta()));
  return o;
}

Outcome crossing() {
  Outcome o;
  double worst = 0;
  for (const auto& f : g_fits) worst = std::max(worst, crossing_gap(f));
  o.check(!g_fits.empty() && worst <= 1e-10,
          "max relative crossing gap " + short_num(worst) + " over " + std::to_string(g_fits.size()) + " fits <= 1e-10");
  return o;
}

Outcome embeddings() {
  Outcome o;
  for (const auto& c : embedding_suite(EmbeddingConfig{})) o.check(c.pass, c.name + ": " + c.detail);
  return o;
}

Outcome weak_form_consistency() {
  Outcome o;
  RunConfig c;
  c.domain = DomainSpec{2.0, 1.0, 64, 129, 1.0};
  c.nu = 0.01;
  c.dt = 1e-3;
  c.snapshot_interval = 0.01;
  c.init.kind = InitKind::StokesMode;
  const auto r = tracked_run(c);
  const auto bank = TestFieldBank::standard(c.domain, c.domain.T_final, 0.2, 0.2);
  const auto res = euler_residual(r.snapshots, std::nullopt, bank, c.nu);
  double worst = 0;
  for (const auto& q : res.records) worst = std::max(worst, std::abs(q.R - q.V) / q.scale);
  o.check(worst <= 1e-4, "max scaled |R - V| " + short_num(worst) + " over " + std::to_string(res.records.size()) +
                             " test fields <= 1e-4");
  return o;
}

std::string slurp(const fs::path& p) {
  const auto b = io::read_file(p);
  return std::string(b.begin(), b.end());
}

Outcome determinism(const std::string& cli, const fs::path& configs, const fs::path& work) {
  Outcome o;
  std::string reports[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path out = work / ("determinism_" + std::to_string(k));
    fs::remove_all(out);
    const std::string cmd = "\"" + cli + "\" sweep --config \"" + (configs / "small_sweep.conf").string() +
                            "\" --out \"" + out.string() + "\" >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    o.check(rc == 0, "sweep execution " + std::to_string(k + 1) + " exit " + std::to_string(rc));
    if (fs::exists(out / "sweep_report.json")) reports[k] = slurp(out / "sweep_report.json");
  }
  o.check(!reports[0].empty() && reports[0] == reports[1],
          "sweep_report.json byte-identical (" + std::to_string(reports[0].size()) + " bytes, sha256 " +
              io::sha256_hex(reports[0]).substr(0, 12) + ")");

  DomainSpec d;
  d.Nx = 256;
  d.Ny = 129;
  d.bc = BcKind::NavierFriction;
  d.beta = 0.25;
  InitSpec s;
  s.seed = 77;
  VelocityField f = make_initial(s, d);
  f.nu = 1.25e-3;
  f.set_time(0.375);
  io::save_snapshot(work / "roundtrip.nsfld", f);
  const auto g = io::load_snapshot(work / "roundtrip.nsfld");
  const bool same = std::memcmp(f.u.data().data(), g.u.data().data(), 8 * f.u.data().size()) == 0 &&
                    std::memcmp(f.v.data().data(), g.v.data().data(), 8 * f.v.data().size()) == 0 &&
                    g.time() == f.time() && g.nu == f.nu && g.domain().beta == d.beta &&
                    io::encode_snapshot(g) == io::encode_snapshot(f);
  o.check(same, "NSFLD1 round-trip bitwise exact");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::fprintf(stderr, "usage: acceptance <vislim-cli> <configs-dir> <work-dir>\n");
    return 2;
  }
  const std::string cli = argv[1];
  const fs::path configs = argv[2], work = argv[3];
  fs::create_directories(work);
  std::vector<std::pair<std::string, Outcome>> res(11);
  try {
    res[1] = {"solver_exactness", solver_exactness()};
    res[3] = {"structure_function_exactness", structure_function_exactness()};
    res[4] = {"zeta_recovery", zeta_recovery()};
    res[6] = {"embedding_suite", embeddings()};
    res[9] = {"weak_form_consistency", weak_form_consistency()};

    auto cfg = io::parse_config(configs / "reference_sweep.conf", {"sweep.nus"}, false).sweep;
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = run_sweep(cfg);
    const double t = seconds_since(t0);
    Outcome agree;
    for (const auto& r : rep.records) {
      agree.check(r.ok, "nu " + short_num(r.nu) + " " + (r.ok ? "ran" : r.error));
      if (!r.ok) continue;
      g_fits.push_back(r.fit);
      g_worst_step_violation = std::max(g_worst_step_violation, r.ledger.max_step_violation / r.ledger.E0);
    }

    Outcome energy = robin_mode();
    const auto budgets = energy_budgets();
    energy.check(budgets.pass, budgets.detail);
    energy.check(g_worst_step_violation <= 1e-8,
                 "worst per-step violation over all runs " + short_num(g_worst_step_violation) + " E0 <= 1e-8 E0");
    res[2] = {"energy_inequality", energy};
    res[5] = {"dissipation_scale_crossing", crossing()};

    agree.check(rep.cross_sufficient && rep.records.size() == 6, "six-viscosity sweep");
    agree.check(rep.verdicts_agree, std::string("structure-function verdict ") + to_string(rep.inertial.verdict) +
                                        ", vorticity verdict " + to_string(rep.vorticity.verdict) + " agree");
    agree.check(t <= 900, "runtime " + short_num(t) + " s <= 900 s");
    res[7] = {"verdict_agreement", agree};

    Outcome viscous;
    viscous.check(rep.viscous_slope >= 0.45, "log-log slope of max|V| vs nu " + short_num(rep.viscous_slope) + " >= 0.45");
    viscous.check(rep.viscous_cs_all, "Cauchy-Schwarz bound holds for every run and test field");
    res[8] = {"viscous_residual_decay", viscous};

    res[10] = {"determinism_and_io", determinism(cli, configs, work)};
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  int failures = 0;
  for (int n = 1; n <= 10; ++n) {
    const auto& [name, o] = res[n];
    std::printf("%s criterion %d %s: %s\n", o.pass ? "PASS" : "FAIL", n, name.c_str(), o.detail.c_str());
    failures += !o.pass;
  }
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
