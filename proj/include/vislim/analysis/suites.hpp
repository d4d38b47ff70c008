#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "vislim/analysis/equivalence.hpp"
#include "vislim/norms/embedding.hpp"
#include "vislim/solver/run.hpp"

namespace vislim {

struct SuiteCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

inline std::string short_num(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

/// Stokes-mode decay and the discrete energy budget.
inline std::vector<SuiteCheck> solver_suite() {
  std::vector<SuiteCheck> out;
  const double pi = std::numbers::pi;
  {
    RunConfig c;
    c.domain = DomainSpec{2.0, 1.0, 16, 129, 0.1};
    c.nu = 0.01;
    c.dt = 1e-4;
    c.init.kind = InitKind::StokesMode;
    c.snapshot_every = 1 << 30;
    auto r = run(c);
    const auto& u = r.snapshots.back();
    const double decay = std::exp(-c.nu * pi * pi * c.domain.T_final);
    ScalarField e = u.u - ScalarField::from_function(c.domain, [&](double, double y) { return decay * std::sin(pi * y); });
    const double err = std::sqrt(inner(e, e) + inner(u.v, u.v));
    out.push_back({"stokes_mode_l2_error", err <= 1e-6, "error " + short_num(err) + " (bound 1e-6)"});
  }
  for (BcKind bc : {BcKind::NoSlip, BcKind::NavierFriction}) {
    RunConfig c;
    c.domain = DomainSpec{2.0, 1.0, 32, 33, 0.2, bc};
    c.nu = 0.005;
    c.dt = 2e-3;
    c.init.k_max = 12;
    c.forcing = {ForcingKind::SteadySolenoidal, 0.5, 1, 2};
    auto r = run(c);
    const double v = std::max(r.ledger.max_step_violation(), r.ledger.max_cumulative_violation()) / r.ledger.E0();
    out.push_back({std::string("energy_budget_") + to_string(bc), r.ledger.inequality_holds(),
                   "max violation " + short_num(v) + " E0 (bound 1e-8)"});
  }
  return out;
}

/// Embedding constants and the cut-off product inequality.
inline std::vector<SuiteCheck> embedding_suite(const EmbeddingConfig& c) {
  std::vector<SuiteCheck> out;
  const auto chain = verify_embedding_chain(c);
  for (const auto& r : chain.ratios)
    out.push_back({"embedding_" + r.name, r.stable,
                   "max ratio " + short_num(r.max_coarse) + " -> " + short_num(r.max_fine) + " under band doubling (change " +
                       short_num(r.relative_change) + ", tol " + short_num(c.stability_tol) + ")"});
  const auto cut = verify_cutoff_inequality(c);
  out.push_back({"cutoff_inequality", cut.pass,
                 "max ratio " + short_num(std::max(cut.max_coarse, cut.max_fine)) + " <= C_cal " + short_num(cut.constant) +
                     " (change " + short_num(cut.relative_change) + ")"});
  return out;
}

struct EquivalenceSuiteConfig {
  DomainSpec domain{2.0, 1.0, 128, 65};
  NestedRegions regions{{0.4, 1.6, 0.2, 0.8}, {0.6, 1.4, 0.3, 0.7}, {0.8, 1.2, 0.4, 0.6}};
  double zeta = 0.5;
  int members = 32;
  std::uint64_t seed = 1;
  double max_spread = 10.0;
};

/// Step-2 constant of the equivalence over a rough random ensemble.
inline std::vector<SuiteCheck> equivalence_suite(const EquivalenceSuiteConfig& c = {}) {
  double lo = INFINITY, hi = 0;
  bool finite = true;
  for (int k = 0; k < c.members; ++k) {
    InitSpec is;
    is.zeta = c.zeta;
    is.seed = c.seed + static_cast<std::uint64_t>(k);
    const auto rep = equivalence_report({make_initial(is, c.domain)}, c.regions, c.zeta);
    finite &= std::isfinite(rep.step2_ratio) && std::isfinite(rep.step1_ratio);
    lo = std::min(lo, rep.step2_ratio);
    hi = std::max(hi, rep.step2_ratio);
  }
  const double spread = lo > 0 ? hi / lo : INFINITY;
  return {{"equivalence_step2_spread", finite && spread <= c.max_spread,
           "max/min " + short_num(spread) + " over " + std::to_string(c.members) + " members (bound " +
               short_num(c.max_spread) + ")"}};
}

}  // namespace vislim
