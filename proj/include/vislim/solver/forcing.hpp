#pragma once

#include <cmath>
#include <numbers>

#include "vislim/error.hpp"
#include "vislim/fields/field.hpp"
#include "vislim/fields/operators.hpp"

namespace vislim {

enum class ForcingKind { None, SteadySolenoidal };

/// Steady force f = amplitude * (Dy psi, -Dx psi) with
/// psi = cos(2 pi kx x / Lx) * sin(ky pi s) * bump(2s - 1), s = (y - 0.15H) / 0.7H.
/// The discrete curl-form makes f exactly solenoidal; its support stays in
/// [0.15H - dy, 0.85H + dy].
struct ForcingSpec {
  ForcingKind kind = ForcingKind::None;
  double amplitude = 0.0;
  int kx = 1;
  int ky = 1;

  void validate() const {
    if (kind == ForcingKind::None) return;
    require(std::isfinite(amplitude), "forcing: amplitude must be finite");
    require(kx >= 0, "forcing: kx must be >= 0");
    require(ky >= 1, "forcing: ky must be >= 1");
  }
};

inline double bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

inline VelocityField make_forcing(const ForcingSpec& f, const DomainSpec& d) {
  VelocityField out(d);
  if (f.kind == ForcingKind::None || f.amplitude == 0.0) return out;
  f.validate();
  require(2 * f.kx < d.Nx, "forcing: kx must be below the x Nyquist index");
  const double y0 = 0.15 * d.H, h = 0.7 * d.H;
  auto psi = ScalarField::from_function(d, [&](double x, double y) {
    const double s = (y - y0) / h;
    if (s <= 0 || s >= 1) return 0.0;
    return std::cos(2 * std::numbers::pi * f.kx * x / d.Lx) *
           std::sin(f.ky * std::numbers::pi * s) * bump(2 * s - 1);
  });
  out.u = dy(psi);
  out.v = dx(psi);
  out.v *= -1.0;
  out *= f.amplitude;
  return out;
}

}  // namespace vislim
