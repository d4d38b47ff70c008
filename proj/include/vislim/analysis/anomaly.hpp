#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "vislim/analysis/zeta.hpp"
#include "vislim/error.hpp"
#include "vislim/norms/besov.hpp"
#include "vislim/solver/ledger.hpp"

namespace vislim {

enum class DissipationTrend { Vanishing, Plateau, Increasing };

inline const char* to_string(DissipationTrend t) {
  switch (t) {
    case DissipationTrend::Vanishing: return "vanishing";
    case DissipationTrend::Plateau: return "plateau";
    case DissipationTrend::Increasing: return "increasing";
  }
  return "?";
}

struct AnomalyEstimate {
  std::vector<double> nus;         ///< decreasing
  std::vector<double> dissipation; ///< D(nu) = bulk (+ wall) at T
  double slope = 0.0;              ///< d log D / d log nu over the three smallest nu
  double limit = 0.0;              ///< Aitken extrapolation of the three smallest nu, >= 0
  DissipationTrend trend = DissipationTrend::Plateau;
};

/// Total dissipation at the end of a run.
inline double total_dissipation(const EnergyLedger& l) {
  return l.dissipation_bulk.back() + l.dissipation_wall.back();
}

/// Trend of D(nu) as nu decreases: slope > plateau_tol is vanishing, slope
/// < -plateau_tol is increasing.
inline AnomalyEstimate dissipation_anomaly(std::vector<double> nus, std::vector<double> D,
                                           double plateau_tol = 0.1) {
  require(nus.size() == D.size(), "dissipation_anomaly: size mismatch");
  require(nus.size() >= 3, "dissipation_anomaly: need at least 3 viscosities");
  std::vector<std::size_t> order(nus.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return nus[a] > nus[b]; });
  AnomalyEstimate e;
  for (auto k : order) {
    require(nus[k] > 0 && D[k] >= 0, "dissipation_anomaly: nu must be > 0 and D >= 0");
    e.nus.push_back(nus[k]);
    e.dissipation.push_back(D[k]);
  }
  const std::size_t n = e.nus.size();
  std::vector<double> x, y;
  bool positive = true;
  for (std::size_t k = n - 3; k < n; ++k) {
    positive &= e.dissipation[k] > 0;
    x.push_back(std::log(e.nus[k]));
    y.push_back(std::log(std::max(e.dissipation[k], 1e-300)));
  }
  e.slope = positive ? detail::least_squares(x, y).slope : 0.0;
  const double d0 = e.dissipation[n - 3], d1 = e.dissipation[n - 2], d2 = e.dissipation[n - 1];
  const double den = (d2 - d1) - (d1 - d0);
  const double scale = std::max({std::abs(d0), std::abs(d1), std::abs(d2), 1e-300});
  e.limit = std::abs(den) > 1e-12 * scale ? std::max(0.0, d2 - (d2 - d1) * (d2 - d1) / den) : d2;
  if (e.slope > plateau_tol)
    e.trend = DissipationTrend::Vanishing;
  else if (e.slope < -plateau_tol)
    e.trend = DissipationTrend::Increasing;
  else
    e.trend = DissipationTrend::Plateau;
  return e;
}

inline AnomalyEstimate dissipation_anomaly(const std::vector<double>& nus, const std::vector<EnergyLedger>& ledgers,
                                           double plateau_tol = 0.1) {
  std::vector<double> D;
  for (const auto& l : ledgers) D.push_back(total_dissipation(l));
  return dissipation_anomaly(nus, D, plateau_tol);
}

struct LimitBesovCheck {
  NormReport proxy;
  double max_per_nu = 0.0;
  double bound = 0.0;  ///< (1 + slack) * max_per_nu
  bool holds = false;
};

/// Snapshot-wise average of two runs with matching times.
inline std::vector<VelocityField> average_runs(const std::vector<VelocityField>& a,
                                               const std::vector<VelocityField>& b) {
  require(a.size() == b.size() && !a.empty(), "limit proxy: runs differ in snapshot count");
  std::vector<VelocityField> out;
  for (std::size_t n = 0; n < a.size(); ++n) {
    require(std::abs(a[n].time() - b[n].time()) <= 1e-9 * std::max(1.0, a[n].time()),
            "limit proxy: snapshot times differ");
    VelocityField s = a[n];
    s += b[n];
    s *= 0.5;
    out.push_back(std::move(s));
  }
  return out;
}

/// Besov(zeta2/2) norm of the proxy against the per-viscosity maximum.
inline LimitBesovCheck limit_besov_check(const std::vector<VelocityField>& proxy, const Subdomain& U,
                                         double zeta2, double max_per_nu, const ShiftSet& shifts,
                                         double slack = 0.1) {
  LimitBesovCheck c;
  c.proxy = besov_norm_time(proxy, zeta2 / 2, U, shifts);
  c.max_per_nu = max_per_nu;
  c.bound = (1 + slack) * max_per_nu;
  c.holds = c.proxy.value <= c.bound;
  return c;
}

}  // namespace vislim
