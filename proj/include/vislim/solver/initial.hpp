#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "vislim/error.hpp"
#include "vislim/fields/fft.hpp"
#include "vislim/fields/field.hpp"
#include "vislim/fields/operators.hpp"
#include "vislim/io/snapshot.hpp"
#include "vislim/solver/basis.hpp"

namespace vislim {

enum class InitKind { RandomSpectrum, StokesMode, FileSnapshot };

struct InitSpec {
  InitKind kind = InitKind::RandomSpectrum;
  double zeta = 2.0 / 3.0;  ///< target structure-function exponent, in (0, 2)
  double k_min = 0.0;       ///< band in angular wavenumber |k|
  double k_max = 0.0;       ///< 0 = no upper cut
  std::uint64_t seed = 1;
  double amplitude = 1.0;  ///< target rms velocity; <= 0 keeps the raw scale
  int stokes_n = 1;
  std::string path;

  void validate(const DomainSpec& d) const {
    if (kind == InitKind::RandomSpectrum) {
      require(zeta > 0 && zeta < 2, "init: zeta must lie in (0,2)");
      require(k_min >= 0, "init: k_min must be >= 0");
      require(k_max == 0 || k_max >= k_min, "init: k_max must be >= k_min");
      const double nyq = std::min(std::numbers::pi / d.dx(), std::numbers::pi / d.dy());
      require(k_max <= nyq, "init: band upper limit " + std::to_string(k_max) +
                                " exceeds the grid Nyquist wavenumber " + std::to_string(nyq));
      require(k_min <= nyq, "init: band lower limit exceeds the grid Nyquist wavenumber");
    } else if (kind == InitKind::StokesMode) {
      require(stokes_n >= 1 && stokes_n < d.Ny - 1, "init: stokes mode index out of range");
    } else {
      require(!path.empty(), "init: snapshot path is empty");
    }
  }
};

namespace detail {

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
inline double smooth_step(double t) {
  if (t <= 0) return 0.0;
  if (t >= 1) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

/// Wall window: vanishes with all derivatives within 0.1H of each wall region edge.
inline double wall_window(double y, double H) {
  const double w = 0.1 * H;
  return smooth_step(y / w) * smooth_step((H - y) / w);
}

/// Modal power of the covariance -g(r)^zeta / 2, with g the chordal distance
/// on the (Lx, 2H) torus.  Indexed (m, n) over the (Nx, 2(Ny-1)) lattice.
inline std::vector<double> chordal_power(const DomainSpec& d, double zeta) {
  const int n0 = d.Nx, n1 = 2 * (d.Ny - 1);
  const double pi = std::numbers::pi;
  std::vector<double> C(static_cast<std::size_t>(n0) * n1);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) {
      const double gx = d.Lx / pi * std::sin(pi * i / n0);
      const double gy = 2 * d.H / pi * std::sin(pi * j / n1);
      C[static_cast<std::size_t>(i) * n1 + j] = -0.5 * std::pow(gx * gx + gy * gy, zeta / 2);
    }
  auto Ch = fft_2d(C, n0, n1);
  const int nh = n1 / 2 + 1;
  std::vector<double> P(static_cast<std::size_t>(n0) * nh);
  for (std::size_t k = 0; k < P.size(); ++k) P[k] = std::max(0.0, Ch[k].real());
  P[0] = 0.0;
  return P;
}

}  // namespace detail

namespace detail {

/// Windowed random sine series with the chordal power-law spectrum.
/// Phases come from mt19937_64 in a fixed (m, n) order, drawn before the band
/// mask so that changing the band keeps the phases of retained modes.  With
/// `potential` set, amplitudes are divided by the discrete gradient symbol so
/// that the gradient (not the field) carries the power law.
inline ScalarField random_series(const InitSpec& s, const DomainSpec& d, bool potential) {
  const int Nx = d.Nx, Ny = d.Ny;
  const int n1 = 2 * (Ny - 1), nh = n1 / 2 + 1;
  const double pi = std::numbers::pi;
  const auto P = chordal_power(d, s.zeta);
  std::mt19937_64 rng(s.seed);
  const double kmax = s.k_max > 0 ? s.k_max : std::numeric_limits<double>::infinity();

  std::vector<cplx> psih(static_cast<std::size_t>(Nx / 2 + 1) * Ny, 0.0);
  for (int m = 0; m <= Nx / 2; ++m) {
    const double kx = 2 * pi * m / d.Lx;
    for (int n = 1; n <= Ny - 2; ++n) {
      const double theta = 2 * pi * static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (2 * m == Nx) continue;
      const double ky = n * pi / d.H;
      const double kk = std::hypot(kx, ky);
      if (kk < s.k_min || kk > kmax) continue;
      const double sy = std::sin(n * pi * d.dy() / d.H) / d.dy();
      const double sym = potential ? kx * kx + sy * sy : 1.0;
      const double w = m > 0 ? 4.0 : 2.0;
      const double p = P[static_cast<std::size_t>(m) * nh + n];
      if (p <= 0) continue;
      const double A = std::sqrt(w * p / sym);
      const cplx c = m > 0 ? 0.5 * Nx * A * std::polar(1.0, theta) : cplx(Nx * A * std::cos(theta), 0.0);
      cplx* col = psih.data() + static_cast<std::size_t>(m) * Ny;
      for (int j = 1; j < Ny - 1; ++j) col[j] += c * std::sin(n * pi * j / (Ny - 1.0));
    }
  }
  auto v = ifft_x(std::move(psih), Nx, Ny);
  ScalarField psi(d);
  for (int i = 0; i < Nx; ++i)
    for (int j = 0; j < Ny; ++j) psi(i, j) = v[static_cast<std::size_t>(i) * Ny + j] * wall_window(d.y(j), d.H);
  return psi;
}

}  // namespace detail

/// Stream function whose velocity has S2 ~ |r|^zeta.
inline ScalarField random_stream_function(const InitSpec& s, const DomainSpec& d) {
  return detail::random_series(s, d, true);
}

/// Scalar with S2 ~ |r|^zeta.
inline ScalarField random_scalar_field(const InitSpec& s, const DomainSpec& d) {
  d.validate();
  s.validate(d);
  return detail::random_series(s, d, false);
}

inline VelocityField make_initial(const InitSpec& s, const DomainSpec& d) {
  d.validate();
  s.validate(d);
  const double pi = std::numbers::pi;
  if (s.kind == InitKind::StokesMode) {
    VelocityField vel(d);
    vel.u = ScalarField::from_function(d, [&](double, double y) { return std::sin(s.stokes_n * pi * y / d.H); });
    return vel;
  }
  if (s.kind == InitKind::FileSnapshot) {
    VelocityField vel = io::load_snapshot(s.path);
    if (!vel.domain().same_grid(d))
      throw InvalidArgument("init: snapshot grid " + std::to_string(vel.domain().Nx) + "x" +
                            std::to_string(vel.domain().Ny) + " does not match the configured domain");
    VelocityField out(d, vel.nu, 0.0);
    out.u = ScalarField(d);
    out.v = ScalarField(d);
    std::copy(vel.u.data().begin(), vel.u.data().end(), out.u.data().begin());
    std::copy(vel.v.data().begin(), vel.v.data().end(), out.v.data().begin());
    return project(out, d.bc);
  }
  ScalarField psi = random_stream_function(s, d);
  ScalarField v = dx(psi);
  v *= -1.0;
  VelocityField vel(dy(psi), std::move(v));
  vel = project(vel, d.bc);
  if (s.amplitude > 0) {
    const double rms = l2_norm(vel) / std::sqrt(d.Lx * d.H);
    if (rms > 0) vel *= s.amplitude / rms;
  }
  return vel;
}

}  // namespace vislim
