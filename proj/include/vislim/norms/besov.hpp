#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "vislim/error.hpp"
#include "vislim/norms/structure_function.hpp"

namespace vislim {

enum class NormKind { Besov, SobolevFrac, SobolevNeg, L2, Lq, Holder };

inline const char* to_string(NormKind k) {
  switch (k) {
    case NormKind::Besov: return "besov";
    case NormKind::SobolevFrac: return "sobolev";
    case NormKind::SobolevNeg: return "sobolev_negative";
    case NormKind::L2: return "l2";
    case NormKind::Lq: return "lq";
    case NormKind::Holder: return "holder";
  }
  return "?";
}

struct NormReport {
  NormKind kind = NormKind::L2;
  double exponent = 0.0;  ///< sigma, s or q depending on kind
  Subdomain region;
  double value = 0.0;
  double base_part = 0.0;        ///< L2 (or sup) term
  double difference_part = 0.0;  ///< sup of difference quotients (Besov, Holder)
  std::array<double, 2> argmax{0.0, 0.0};  ///< shift attaining the sup
  std::vector<double> details;  ///< per-shift quotients [dir][mag] or per-snapshot values
};

/// Where the increment f(x + r) - f(x) is integrated.
enum class BesovDomain {
  Intersection,  ///< x in U and x + r in U
  Shifted,       ///< x in U, x + r anywhere in the channel (structure-function convention)
};

/// U intersected with U - r, or nothing when empty or free of grid nodes.
inline std::optional<RegionWeights> intersection_weights(const DomainSpec& d, const Subdomain& U,
                                                         std::array<double, 2> r) {
  Subdomain I = U;
  if (U.width() < d.Lx - 1e-12) {
    I.x_lo = U.x_lo + std::max(0.0, -r[0]);
    I.x_hi = U.x_hi - std::max(0.0, r[0]);
  }
  I.y_lo = U.y_lo + std::max(0.0, -r[1]);
  I.y_hi = U.y_hi - std::max(0.0, r[1]);
  if (!(I.x_hi > I.x_lo) || !(I.y_hi > I.y_lo)) return std::nullopt;
  try {
    return restrict(d, I);
  } catch (const InvalidArgument&) {
    return std::nullopt;
  }
}

template <class Field>
double l2_norm(const Field& f, const RegionWeights& w) {
  double s = 0;
  for (const ScalarField* c : components(f)) {
    const auto& d = c->domain();
    for (int i = 0; i < d.Nx; ++i) {
      if (w.wx[i] == 0) continue;
      double col = 0;
      for (int j = 0; j < d.Ny; ++j) col += w.wy[j] * (*c)(i, j) * (*c)(i, j);
      s += w.wx[i] * col;
    }
  }
  return std::sqrt(s);
}

/// ||f||_{L^q(V)} with |f| the pointwise Euclidean magnitude.
template <class Field>
NormReport lq_norm(const Field& f, double q, const Subdomain& V) {
  require(q >= 1, "lq_norm: q must be >= 1");
  auto cs = components(f);
  const auto& d = cs.front()->domain();
  V.validate(d);
  const auto w = restrict(d, V);
  double s = 0;
  for (int i = 0; i < d.Nx; ++i) {
    if (w.wx[i] == 0) continue;
    for (int j = 0; j < d.Ny; ++j) {
      if (w.wy[j] == 0) continue;
      double m2 = 0;
      for (const ScalarField* c : cs) m2 += (*c)(i, j) * (*c)(i, j);
      s += w.wx[i] * w.wy[j] * std::pow(m2, 0.5 * q);
    }
  }
  NormReport r{NormKind::Lq, q, V};
  r.value = r.base_part = std::pow(s, 1.0 / q);
  return r;
}

/// ||f||_{L2(U)} + max over the shift set of ||f(. + r) - f||_{L2} / |r|^sigma.
template <class Field>
NormReport besov_norm(const Field& f, double sigma, const Subdomain& U, const ShiftSet& shifts,
                      BesovDomain conv = BesovDomain::Intersection) {
  require(sigma > 0 && sigma < 1, "besov_norm: sigma must lie in (0,1)");
  const auto& d = components(f).front()->domain();
  U.validate(d);
  shifts.validate(U.margin(d));
  const auto wU = restrict(d, U);

  NormReport rep{NormKind::Besov, sigma, U};
  rep.base_part = l2_norm(f, wU);
  rep.details.assign(shifts.size(), 0.0);
  for (std::size_t a = 0; a < shifts.directions.size(); ++a)
    for (std::size_t b = 0; b < shifts.magnitudes.size(); ++b) {
      const auto r = shifts.shift(a, b);
      double e = 0;
      if (conv == BesovDomain::Shifted) {
        e = increment_energy(f, r, wU);
      } else if (auto w = intersection_weights(d, U, r)) {
        e = increment_energy(f, r, *w);
      }
      const double qv = std::sqrt(e) / std::pow(shifts.magnitudes[b], sigma);
      rep.details[a * shifts.magnitudes.size() + b] = qv;
      if (qv > rep.difference_part) {
        rep.difference_part = qv;
        rep.argmax = r;
      }
    }
  rep.value = rep.base_part + rep.difference_part;
  return rep;
}

/// L2 in time (trapezoid) of the per-snapshot Besov norm.
template <class Field>
NormReport besov_norm_time(const std::vector<Field>& snaps, double sigma, const Subdomain& U,
                           const ShiftSet& shifts, BesovDomain conv = BesovDomain::Intersection) {
  require(!snaps.empty(), "besov_norm_time: empty snapshot series");
  const auto tw = trapezoid_time_weights(snapshot_times(snaps));
  NormReport rep{NormKind::Besov, sigma, U};
  double s = 0, sb = 0, sd = 0;
  for (std::size_t n = 0; n < snaps.size(); ++n) {
    const NormReport r = besov_norm(snaps[n], sigma, U, shifts, conv);
    rep.details.push_back(r.value);
    s += tw[n] * r.value * r.value;
    sb += tw[n] * r.base_part * r.base_part;
    sd += tw[n] * r.difference_part * r.difference_part;
  }
  rep.value = std::sqrt(s);
  rep.base_part = std::sqrt(sb);
  rep.difference_part = std::sqrt(sd);
  return rep;
}

}  // namespace vislim
