#pragma once

#include <cmath>
#include <numbers>

#include "vislim/error.hpp"
#include "vislim/norms/besov.hpp"

namespace vislim {

/// exp(1 - 1/(1 - t^2)) on |t| < 1, zero elsewhere.
inline double bump_profile(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

/// Smooth plateau: 1 on U_inner, 0 outside U_outer, product of per-axis profiles.
struct Cutoff {
  Subdomain outer;
  Subdomain inner;
  ScalarField values;

  double operator()(int i, int j) const { return values(i, j); }
};

namespace detail {

inline double plateau(double x, double A, double a, double b, double B) {
  if (x >= a && x <= b) return 1.0;
  if (x <= A || x >= B) return 0.0;
  if (x < a) return bump_profile((a - x) / (a - A));
  return bump_profile((x - b) / (B - b));
}

}  // namespace detail

inline Cutoff make_cutoff(const DomainSpec& d, const Subdomain& outer, const Subdomain& inner) {
  outer.validate(d);
  inner.validate(d);
  require(inner.x_lo > outer.x_lo && inner.x_hi < outer.x_hi && inner.y_lo > outer.y_lo &&
              inner.y_hi < outer.y_hi,
          "cutoff: inner region must lie strictly inside the outer region");
  require(outer.width() < d.Lx, "cutoff: outer region must be narrower than the x period");
  const double cx = 0.5 * (outer.x_lo + outer.x_hi);
  Cutoff c{outer, inner, ScalarField(d)};
  for (int i = 0; i < d.Nx; ++i) {
    const double x = d.x(i) - d.Lx * std::round((d.x(i) - cx) / d.Lx);
    const double px = detail::plateau(x, outer.x_lo, inner.x_lo, inner.x_hi, outer.x_hi);
    for (int j = 0; j < d.Ny; ++j)
      c.values(i, j) = px * detail::plateau(d.y(j), outer.y_lo, inner.y_lo, inner.y_hi, outer.y_hi);
  }
  return c;
}

/// ||chi||_inf + max over nodes and shifts of |chi(x + r) - chi(x)| / |r|^s.
inline NormReport holder_norm(const ScalarField& chi, double s, const ShiftSet& shifts) {
  require(s > 0 && s < 1, "holder_norm: s must lie in (0,1)");
  const auto& d = chi.domain();
  NormReport rep{NormKind::Holder, s, Subdomain{0.0, d.Lx, 0.0, d.H}};
  rep.base_part = chi.max_abs();
  for (std::size_t a = 0; a < shifts.directions.size(); ++a)
    for (std::size_t b = 0; b < shifts.magnitudes.size(); ++b) {
      const auto r = shifts.shift(a, b);
      MaskedField g = shift_sample(chi, r);
      double m = 0;
      for (int i = 0; i < d.Nx; ++i)
        for (int j = 0; j < d.Ny; ++j)
          if (g.row_valid[j]) m = std::max(m, std::abs(g.f(i, j) - chi(i, j)));
      const double qv = m / std::pow(shifts.magnitudes[b], s);
      rep.details.push_back(qv);
      if (qv > rep.difference_part) {
        rep.difference_part = qv;
        rep.argmax = r;
      }
    }
  rep.value = rep.base_part + rep.difference_part;
  return rep;
}

/// chi * f, componentwise.
inline ScalarField apply_cutoff(const Cutoff& chi, ScalarField f) {
  const auto& d = f.domain();
  require(d.same_grid(chi.values.domain()), "cutoff: grid mismatch");
  for (int i = 0; i < d.Nx; ++i)
    for (int j = 0; j < d.Ny; ++j) f(i, j) *= chi(i, j);
  return f;
}
inline VelocityField apply_cutoff(const Cutoff& chi, VelocityField f) {
  f.u = apply_cutoff(chi, std::move(f.u));
  f.v = apply_cutoff(chi, std::move(f.v));
  return f;
}
inline VorticityField apply_cutoff(const Cutoff& chi, VorticityField f) {
  f.w = apply_cutoff(chi, std::move(f.w));
  return f;
}

}  // namespace vislim
