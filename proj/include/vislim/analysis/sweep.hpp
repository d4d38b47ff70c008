#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "vislim/analysis/anomaly.hpp"
#include "vislim/analysis/bank.hpp"
#include "vislim/analysis/equivalence.hpp"
#include "vislim/analysis/zeta.hpp"
#include "vislim/error.hpp"
#include "vislim/norms/structure_function.hpp"
#include "vislim/solver/run.hpp"

namespace vislim {

struct SweepConfig {
  RunConfig base;            ///< everything but nu
  std::vector<double> nus;   ///< sorted into decreasing order by run_sweep
  Subdomain U{0.5, 1.5, 0.25, 0.75};
  NestedRegions regions{{0.4, 1.6, 0.2, 0.8}, {0.6, 1.4, 0.3, 0.7}, {0.8, 1.2, 0.4, 0.6}};
  int shift_count = 12;
  bool shift_axes_only = false;
  double shift_fraction = 0.95;
  double bank_radius = 0.2;  ///< fraction of min(H, Lx/2)
  double bank_tau = 0.2;     ///< fraction of T
  InertialThresholds thresholds;
  double vorticity_tol_growth = 3.0;
  double delta_offset = 0.05;  ///< delta = min(zeta2/2 - offset, 0.45)
  double limit_slack = 0.1;
  double plateau_tol = 0.1;
  int threads = 1;

  ShiftSet shifts_for(const Subdomain& R) const {
    return shift_axes_only ? axis_shift_set(base.domain, R, shift_count, shift_fraction)
                           : default_shift_set(base.domain, R, shift_count, shift_fraction);
  }

  /// Problems of the diagnostic settings (viscosity list excluded).
  std::vector<std::string> analysis_problems() const {
    std::vector<std::string> p;
    for (double nu : nus)
      if (!(nu > 0)) p.push_back("sweep viscosities must be > 0");
    auto sorted = nus;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      p.push_back("sweep viscosities must be distinct");
    if (shift_count < 6) p.push_back("shifts.count must be >= 6");
    if (!(shift_fraction > 0 && shift_fraction < 1)) p.push_back("shifts.fraction must lie in (0,1)");
    if (!(bank_radius > 0 && bank_radius < 0.5)) p.push_back("bank.radius must lie in (0,0.5)");
    if (!(bank_tau > 0 && bank_tau < 0.25)) p.push_back("bank.tau must lie in (0,0.25)");
    if (threads < 1) p.push_back("threads must be >= 1");
    if (!(delta_offset > 0)) p.push_back("delta_offset must be > 0");
    try {
      U.validate(base.domain);
    } catch (const InvalidArgument& e) {
      p.push_back(e.what());
    }
    return p;
  }

  std::vector<std::string> problems() const {
    auto p = base.problems();
    if (nus.empty()) p.push_back("sweep needs at least one viscosity");
    const double spacing = base.snapshot_interval > 0 ? base.snapshot_interval : base.snapshot_every * base.dt;
    const double need = bank_tau * base.domain.T_final / 8;
    if (spacing > need * (1 + 1e-9))
      p.push_back("snapshot spacing " + std::to_string(spacing) + " too coarse for the test-field bank; need <= " +
                  std::to_string(need) + " (bank.tau * T_final / 8)");
    for (auto& q : analysis_problems()) p.push_back(q);
    try {
      regions.validate(base.domain);
    } catch (const InvalidArgument& e) {
      p.push_back(e.what());
    }
    return p;
  }

  void validate() const {
    auto p = problems();
    if (p.empty()) return;
    std::string msg = "invalid sweep config:";
    for (const auto& s : p) msg += " " + s + ";";
    throw InvalidArgument(msg);
  }
};

struct LedgerSummary {
  double E0 = 0, E_T = 0, dissipation_bulk = 0, dissipation_wall = 0, force_work = 0;
  double max_step_violation = 0, max_cumulative_violation = 0;
  bool inequality_holds = false;
  long steps = 0, retries = 0;
};

struct NuRecord {
  double nu = 0.0;
  bool ok = false;
  std::string error;
  LedgerSummary ledger;
  StructureFunctionTable s2;
  ZetaFit fit;
  SubDissipationVerdict sub_dissipation;
  NormReport besov_u;  ///< L2_t B^{zeta2/2}(U), common zeta2
  EquivalenceReport equivalence;
  PairingResult pairing;
  ResidualResult residuals;
  double max_abs_V = 0.0;
  bool cs_bound_holds = true;
};

struct SweepReport {
  std::vector<NuRecord> records;  ///< decreasing nu
  bool cross_sufficient = false;  ///< at least 3 successful viscosities
  double common_zeta2 = 0.0;
  double delta = 0.0;
  InertialVerdict inertial;
  UniformityVerdict vorticity;
  bool verdicts_agree = false;
  std::vector<std::vector<double>> cauchy_gaps;  ///< [i][j] |P_i[j] - P_{i+1}[j]|
  std::optional<AnomalyEstimate> anomaly;
  std::optional<LimitBesovCheck> limit_besov;
  double viscous_slope = 0.0;  ///< log-log slope of max_j |V_j| vs nu
  bool viscous_cs_all = false;
};

/// Runs fn(0..n-1) on up to `threads` workers.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (int k = next++; k < n; k = next++) fn(k);
    });
  for (auto& t : pool) t.join();
}

/// Called after each viscosity finishes its run (index into the sorted list).
using SweepProgress = std::function<void(int, const NuRecord&, const RunResult*)>;

inline SweepReport run_sweep(SweepConfig cfg, const SweepProgress& progress = {}) {
  std::sort(cfg.nus.begin(), cfg.nus.end(), std::greater<>());
  cfg.validate();
  const DomainSpec& d = cfg.base.domain;
  const int n = static_cast<int>(cfg.nus.size());
  const VelocityField u0 = make_initial(cfg.base.init, d);
  const ShiftSet shifts = cfg.shifts_for(cfg.U);
  const TestFieldBank bank = TestFieldBank::standard(d, d.T_final, cfg.bank_radius, cfg.bank_tau);
  std::optional<VelocityField> force;
  if (cfg.base.forcing.kind != ForcingKind::None) force = make_forcing(cfg.base.forcing, d);

  SweepReport rep;
  rep.records.resize(n);
  std::vector<std::vector<VelocityField>> snaps(n);

  // Runs and per-run diagnostics that do not need the common exponent.
  parallel_for(n, cfg.threads, [&](int k) {
    NuRecord& r = rep.records[k];
    r.nu = cfg.nus[k];
    try {
      RunConfig rc = cfg.base;
      rc.nu = r.nu;
      RunResult res = run(rc, u0);
      const auto& L = res.ledger;
      r.ledger = {L.E0(), L.kinetic.back(), L.dissipation_bulk.back(), L.dissipation_wall.back(),
                  L.force_work.back(), L.max_step_violation(), L.max_cumulative_violation(),
                  L.inequality_holds(), res.steps, res.retries};
      r.s2 = structure_function(res.snapshots, cfg.U, shifts);
      r.fit = fit_zeta2(r.s2, r.nu);
      r.sub_dissipation = sub_dissipation_check(r.s2, r.fit, r.nu, r.ledger.dissipation_bulk);
      r.pairing = weak_pairing(res.snapshots, bank);
      r.residuals = euler_residual(res.snapshots, force, bank, r.nu);
      for (const auto& q : r.residuals.records) {
        r.max_abs_V = std::max(r.max_abs_V, std::abs(q.V));
        r.cs_bound_holds &= std::abs(q.V) <= q.cs_bound * (1 + 1e-12);
      }
      r.ok = true;
      if (progress) progress(k, r, &res);
      snaps[k] = std::move(res.snapshots);
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
      if (progress) progress(k, r, nullptr);
    }
  });

  std::vector<int> good;
  for (int k = 0; k < n; ++k)
    if (rep.records[k].ok) good.push_back(k);
  rep.cross_sufficient = good.size() >= 3;
  if (good.empty()) return rep;

  double zsum = 0;
  for (int k : good) zsum += rep.records[k].fit.zeta2;
  rep.common_zeta2 = zsum / static_cast<double>(good.size());
  rep.delta = std::clamp(std::min(rep.common_zeta2 / 2 - cfg.delta_offset, 0.45), 1e-6, 0.5 - 1e-6);

  parallel_for(static_cast<int>(good.size()), cfg.threads, [&](int g) {
    const int k = good[g];
    NuRecord& r = rep.records[k];
    r.besov_u = besov_norm_time(snaps[k], rep.common_zeta2 / 2, cfg.U, shifts);
    r.equivalence = equivalence_report(snaps[k], cfg.regions, rep.common_zeta2, rep.delta);
  });

  std::vector<std::optional<ZetaFit>> fits;
  std::vector<double> vort, nus_ok, vmax, D;
  rep.viscous_cs_all = true;
  for (int k = 0; k < n; ++k) {
    const auto& r = rep.records[k];
    if (!r.ok) {
      fits.push_back(std::nullopt);
      continue;
    }
    fits.push_back(r.fit);
    vort.push_back(r.equivalence.vort_U);
    nus_ok.push_back(r.nu);
    vmax.push_back(r.max_abs_V);
    D.push_back(r.ledger.dissipation_bulk + r.ledger.dissipation_wall);
    rep.viscous_cs_all &= r.cs_bound_holds;
  }
  rep.inertial = check_inertial_condition(fits, cfg.thresholds);
  rep.vorticity = uniformity(vort, cfg.vorticity_tol_growth);
  rep.verdicts_agree = rep.inertial.verdict == rep.vorticity.verdict;

  for (std::size_t g = 0; g + 1 < good.size(); ++g) {
    const auto& a = rep.records[good[g]].pairing.P;
    const auto& b = rep.records[good[g + 1]].pairing.P;
    std::vector<double> gap;
    for (std::size_t j = 0; j < a.size(); ++j) gap.push_back(std::abs(a[j] - b[j]));
    rep.cauchy_gaps.push_back(std::move(gap));
  }

  if (rep.cross_sufficient) {
    rep.anomaly = dissipation_anomaly(nus_ok, D, cfg.plateau_tol);
    std::vector<double> x, y;
    for (std::size_t g = 0; g < nus_ok.size(); ++g)
      if (vmax[g] > 0) {
        x.push_back(std::log(nus_ok[g]));
        y.push_back(std::log(vmax[g]));
      }
    if (x.size() >= 2) rep.viscous_slope = detail::least_squares(x, y).slope;
    const int a = good[good.size() - 2], b = good.back();
    double max_besov = 0;
    for (int k : good) max_besov = std::max(max_besov, rep.records[k].besov_u.value);
    rep.limit_besov = limit_besov_check(average_runs(snaps[a], snaps[b]), cfg.U, rep.common_zeta2, max_besov,
                                        shifts, cfg.limit_slack);
  }
  return rep;
}

}  // namespace vislim
