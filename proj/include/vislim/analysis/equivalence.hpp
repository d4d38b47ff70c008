#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "vislim/analysis/zeta.hpp"
#include "vislim/error.hpp"
#include "vislim/fields/operators.hpp"
#include "vislim/norms/besov.hpp"
#include "vislim/norms/cutoff.hpp"
#include "vislim/norms/sobolev.hpp"

namespace vislim {

/// U contains W contains V, each with a margin of at least 4 cells.
struct NestedRegions {
  Subdomain U, W, V;

  void validate(const DomainSpec& d) const {
    U.validate(d);
    W.validate(d);
    V.validate(d);
    const double gap = 4 * std::max(d.dx(), d.dy());
    require(U.contains(W, gap) && W.contains(V, gap),
            "equivalence: nested regions need margins of at least 4 grid cells");
  }
};

/// Default smoothness of the vorticity norm: min(zeta2/2 - 0.05, 0.45).
inline double default_delta(double zeta2) { return std::min(zeta2 / 2 - 0.05, 0.45); }

struct EquivalenceReport {
  double zeta2 = 0.0;
  double delta = 0.0;
  double besov_u_U = 0.0;  ///< ||u||_{L2_t B^{zeta2/2}(U)}
  double vort_V = 0.0;     ///< ||chi_V w||_{L2_t H^{-1+delta}}, chi_V = 1 on V, inside W
  double step1_ratio = 0.0;
  double hdelta_u = 0.0;   ///< ||chi_W u||_{L2_t H^delta}, chi_W = 1 on W, inside U
  double vort_U = 0.0;     ///< ||chi_W w||_{L2_t H^{-1+delta}}
  double l2_u_U = 0.0;     ///< ||u||_{L2_t L2(U)}
  double step2_ratio = 0.0;
};

/// Both directions of the structure-function / vorticity equivalence on one
/// snapshot series.  Ratios with a zero denominator are 0.
inline EquivalenceReport equivalence_report(const std::vector<VelocityField>& snaps, const NestedRegions& R,
                                            double zeta2, std::optional<double> delta = std::nullopt) {
  require(!snaps.empty(), "equivalence: empty snapshot series");
  const auto& d = snaps.front().domain();
  R.validate(d);
  require(zeta2 > 0 && zeta2 < 2, "equivalence: zeta2 must lie in (0,2)");
  EquivalenceReport rep;
  rep.zeta2 = zeta2;
  rep.delta = delta.value_or(default_delta(zeta2));
  require(rep.delta > 0 && rep.delta < 0.5, "equivalence: delta must lie in (0,1/2)");

  const Cutoff chiV = make_cutoff(d, R.W, R.V);
  const Cutoff chiW = make_cutoff(d, R.U, R.W);
  const auto times = snapshot_times(snaps);
  std::vector<VorticityField> w;
  for (const auto& s : snaps) w.push_back(curl(s));

  rep.besov_u_U = besov_norm_time(snaps, zeta2 / 2, R.U, default_shift_set(d, R.U)).value;
  rep.vort_V = sobolev_norm_cutoff_time(w, times, -1 + rep.delta, chiV).value;
  rep.hdelta_u = sobolev_norm_cutoff_time(snaps, times, rep.delta, chiW).value;
  rep.vort_U = sobolev_norm_cutoff_time(w, times, -1 + rep.delta, chiW).value;
  const auto tw = trapezoid_time_weights(times);
  const auto wU = restrict(d, R.U);
  double l2 = 0;
  for (std::size_t n = 0; n < snaps.size(); ++n) {
    const double v = l2_norm(snaps[n], wU);
    l2 += tw[n] * v * v;
  }
  rep.l2_u_U = std::sqrt(l2);
  rep.step1_ratio = rep.besov_u_U > 0 ? rep.vort_V / rep.besov_u_U : 0.0;
  const double den = rep.vort_U + rep.l2_u_U;
  rep.step2_ratio = den > 0 ? rep.hdelta_u / den : 0.0;
  return rep;
}

struct UniformityVerdict {
  Verdict verdict = Verdict::Partial;
  double ratio = 0.0;  ///< max / min over the sequence
  std::string reason;
};

/// Bounded max/min ratio of a positive sequence (fewer than 3 values: partial).
inline UniformityVerdict uniformity(const std::vector<double>& values, double tol_growth = 3.0) {
  UniformityVerdict v;
  if (values.empty()) {
    v.reason = "no values";
    return v;
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  v.ratio = *lo > 0 ? *hi / *lo : (*hi > 0 ? INFINITY : 1.0);
  const bool ok = v.ratio <= tol_growth;
  if (!ok) v.reason = "ratio " + std::to_string(v.ratio) + " > " + std::to_string(tol_growth);
  if (values.size() < 3) {
    v.verdict = Verdict::Partial;
    if (v.reason.empty()) v.reason = "fewer than 3 viscosities";
  } else {
    v.verdict = ok ? Verdict::Pass : Verdict::Fail;
  }
  return v;
}

}  // namespace vislim
