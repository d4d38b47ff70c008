#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "vislim/error.hpp"
#include "vislim/norms/structure_function.hpp"

namespace vislim {

/// Local scaling fit S2(r) ~ C_U |r|^zeta2 over the range |r| >= eta(nu).
struct ZetaFit {
  double zeta2_raw = 0.0;  ///< least-squares slope as fitted
  double zeta2 = 0.0;      ///< reported value, clamped into (0, 2)
  double nu = 0.0;
  double C_U = 0.0;
  double r_lo = 0.0, r_hi = 0.0;
  double rms_logfit_residual = 0.0;
  int iterations = 0;
  int points = 0;
  bool out_of_range = false;         ///< raw slope outside (0, 2)
  bool inertial_unresolved = false;  ///< fewer than 3 shifts above eta

  /// Dissipation scale nu^(1/(2 - zeta2)).
  double eta() const { return std::pow(nu, 1.0 / (2.0 - zeta2)); }
};

namespace detail {

struct LineFit {
  double slope = 0, intercept = 0, rms = 0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  LineFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double r2 = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = y[k] - (f.intercept + f.slope * x[k]);
    r2 += e * e;
  }
  f.rms = std::sqrt(r2 / n);
  return f;
}

inline double clamp_zeta(double z) { return std::clamp(z, 1e-6, 2.0 - 1e-6); }

}  // namespace detail

/// Fit on (|r|, S2) pairs; S2 values must be positive.
inline ZetaFit fit_zeta2(const std::vector<double>& r, const std::vector<double>& s2, double nu,
                         double tol = 1e-3, int max_iter = 10) {
  require(r.size() == s2.size(), "fit_zeta2: size mismatch");
  require(r.size() >= 6, "fit_zeta2: need at least 6 magnitudes");
  require(nu > 0, "fit_zeta2: nu must be > 0");
  for (std::size_t k = 0; k < r.size(); ++k)
    require(r[k] > 0 && s2[k] > 0, "fit_zeta2: |r| and S2 must be positive");

  auto fit_over = [&](double lo, ZetaFit& out) {
    std::vector<double> x, y;
    for (std::size_t k = 0; k < r.size(); ++k)
      if (r[k] >= lo) {
        x.push_back(std::log(r[k]));
        y.push_back(std::log(s2[k]));
      }
    if (x.size() < 3) return false;
    const auto lf = detail::least_squares(x, y);
    out.zeta2_raw = lf.slope;
    out.zeta2 = detail::clamp_zeta(lf.slope);
    out.out_of_range = !(lf.slope > 0 && lf.slope < 2);
    out.rms_logfit_residual = lf.rms;
    out.points = static_cast<int>(x.size());
    out.r_lo = std::exp(x.front());
    out.r_hi = std::exp(x.back());
    return true;
  };

  ZetaFit f;
  f.nu = nu;
  fit_over(0.0, f);
  const ZetaFit full = f;
  for (int it = 1; it <= max_iter; ++it) {
    ZetaFit g = f;
    if (!fit_over(f.eta(), g)) {
      f = full;
      f.inertial_unresolved = true;
      f.iterations = it;
      break;
    }
    const double change = std::abs(g.zeta2_raw - f.zeta2_raw);
    f = g;
    f.iterations = it;
    if (change < tol) break;
  }
  f.C_U = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k)
    if (r[k] >= f.r_lo && r[k] <= f.r_hi) f.C_U = std::max(f.C_U, s2[k] / std::pow(r[k], f.zeta2));
  return f;
}

/// Fit on the direction-averaged column of a table.
inline ZetaFit fit_zeta2(const StructureFunctionTable& t, double nu) {
  return fit_zeta2(t.shifts.magnitudes, t.averaged, nu);
}

/// |(eta/sqrt(nu))^2 - eta^zeta2| / eta^zeta2: the two bounds cross at |r| = eta.
inline double crossing_gap(const ZetaFit& f) {
  const double e = f.eta();
  const double a = e * e / f.nu, b = std::pow(e, f.zeta2);
  return std::abs(a - b) / b;
}

/// |eta^(2 - zeta2) - nu| / nu.
inline double eta_identity_gap(const ZetaFit& f) {
  return std::abs(std::pow(f.eta(), 2.0 - f.zeta2) - f.nu) / f.nu;
}

enum class Verdict { Pass, Fail, Partial, Unresolved };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Partial: return "PARTIAL";
    case Verdict::Unresolved: return "UNRESOLVED";
  }
  return "?";
}

struct InertialThresholds {
  double tol_growth = 3.0;
  double zeta_floor = 0.1;
  double zeta_spread = 0.15;
};

struct InertialVerdict {
  Verdict verdict = Verdict::Partial;
  double c_ratio = 0.0;      ///< max C_U / min C_U
  double min_zeta = 0.0;
  double zeta_spread = 0.0;  ///< max pairwise |zeta_i - zeta_j|
  int fits = 0;
  std::string reason;
};

/// Uniformity of the scaling constant across viscosities.  Missing fits
/// (nullopt) or fewer than three present give a partial verdict computed on
/// what is there.
inline InertialVerdict check_inertial_condition(const std::vector<std::optional<ZetaFit>>& fits,
                                                const InertialThresholds& th = {}) {
  InertialVerdict v;
  double cmin = INFINITY, cmax = 0, zmin = INFINITY, zmax = -INFINITY;
  bool missing = false;
  for (const auto& f : fits) {
    if (!f) {
      missing = true;
      continue;
    }
    ++v.fits;
    cmin = std::min(cmin, f->C_U);
    cmax = std::max(cmax, f->C_U);
    zmin = std::min(zmin, f->zeta2);
    zmax = std::max(zmax, f->zeta2);
  }
  if (v.fits == 0) {
    v.reason = "no fits";
    return v;
  }
  v.c_ratio = cmin > 0 ? cmax / cmin : INFINITY;
  v.min_zeta = zmin;
  v.zeta_spread = zmax - zmin;
  std::vector<std::string> bad;
  if (!(v.c_ratio <= th.tol_growth)) bad.push_back("C_U ratio " + std::to_string(v.c_ratio) + " > " + std::to_string(th.tol_growth));
  if (!(v.min_zeta >= th.zeta_floor)) bad.push_back("zeta2 " + std::to_string(v.min_zeta) + " below floor " + std::to_string(th.zeta_floor));
  if (!(v.zeta_spread <= th.zeta_spread)) bad.push_back("zeta2 spread " + std::to_string(v.zeta_spread) + " > " + std::to_string(th.zeta_spread));
  for (const auto& b : bad) v.reason += (v.reason.empty() ? "" : "; ") + b;
  if (missing || v.fits < 3) {
    v.verdict = Verdict::Partial;
    if (v.reason.empty()) v.reason = missing ? "missing fits" : "fewer than 3 viscosities";
  } else {
    v.verdict = bad.empty() ? Verdict::Pass : Verdict::Fail;
  }
  return v;
}

struct SubDissipationVerdict {
  Verdict verdict = Verdict::Unresolved;
  int sampled_below_eta = 0;
  bool gradient_bound_holds = true;  ///< S2 <= factor * |r|^2 / nu * D_bulk for |r| <= eta
  bool crossing_holds = true;        ///< (|r|/sqrt(nu))^2 <= |r|^zeta2 for |r| <= eta
  double worst_gradient_ratio = 0.0; ///< max S2 / (|r|^2 / nu * D_bulk) below eta
  double effective_constant = 0.0;   ///< C with S2 <= C |r|^zeta2 on every sampled shift
  bool combined_bound_holds = true;
};

/// Checks the dissipation-range bounds below eta on every direction of the
/// table.  D_bulk is nu * int_0^T ||grad u||^2.  `grid_factor` absorbs the
/// mismatch between the time quadratures of S2 and the ledger.
inline SubDissipationVerdict sub_dissipation_check(const StructureFunctionTable& t, const ZetaFit& fit,
                                                   double nu, double dissipation_bulk,
                                                   double grid_factor = 1.1) {
  require(nu > 0, "sub_dissipation_check: nu must be > 0");
  SubDissipationVerdict v;
  const double eta = fit.eta();
  double c_inertial = 0.0;
  for (std::size_t b = 0; b < t.shifts.magnitudes.size(); ++b) {
    const double r = t.shifts.magnitudes[b];
    for (std::size_t a = 0; a < t.shifts.directions.size(); ++a) {
      const double s2 = t.values[a][b];
      if (r <= eta) {
        const double bound = r * r / nu * dissipation_bulk;
        const double ratio = bound > 0 ? s2 / bound : (s2 > 0 ? INFINITY : 0.0);
        v.worst_gradient_ratio = std::max(v.worst_gradient_ratio, ratio);
        v.gradient_bound_holds &= ratio <= grid_factor;
      } else {
        c_inertial = std::max(c_inertial, s2 / std::pow(r, fit.zeta2));
      }
    }
    if (r <= eta) {
      ++v.sampled_below_eta;
      v.crossing_holds &= r * r / nu <= std::pow(r, fit.zeta2) * (1 + 1e-10);
    }
  }
  v.effective_constant = std::max(c_inertial, grid_factor * dissipation_bulk);
  for (std::size_t b = 0; b < t.shifts.magnitudes.size(); ++b)
    for (std::size_t a = 0; a < t.shifts.directions.size(); ++a)
      v.combined_bound_holds &=
          t.values[a][b] <= v.effective_constant * std::pow(t.shifts.magnitudes[b], fit.zeta2) * (1 + 1e-12);
  if (v.sampled_below_eta == 0)
    v.verdict = Verdict::Unresolved;
  else
    v.verdict = v.gradient_bound_holds && v.crossing_holds ? Verdict::Pass : Verdict::Fail;
  return v;
}

}  // namespace vislim
