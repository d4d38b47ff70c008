#pragma once

#include <cmath>
#include <vector>

#include "vislim/error.hpp"
#include "vislim/fields/fft.hpp"
#include "vislim/fields/field.hpp"
#include "vislim/fields/operators.hpp"

namespace vislim {

enum class WallCondition { DirichletZero, NeumannZero };

namespace detail {

/// Thomas algorithm; lower[0] and upper[n-1] are unused.  `rhs` is
/// overwritten with the solution.
template <class T>
void thomas(const std::vector<double>& lower, const std::vector<double>& diag,
            const std::vector<double>& upper, std::vector<T>& rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n);
  double b = diag[0];
  c[0] = upper[0] / b;
  rhs[0] /= b;
  for (std::size_t j = 1; j < n; ++j) {
    b = diag[j] - lower[j] * c[j - 1];
    c[j] = j + 1 < n ? upper[j] / b : 0.0;
    rhs[j] = (rhs[j] - lower[j] * rhs[j - 1]) / b;
  }
  for (std::size_t j = n - 1; j-- > 0;) rhs[j] -= c[j] * rhs[j + 1];
}

/// k^2 of half-spectrum mode m for the Laplacian (true wavenumber, Nyquist included).
inline double laplace_k2(const DomainSpec& d, int m) {
  const double k = 2.0 * std::numbers::pi * m / d.Lx;
  return k * k;
}

}  // namespace detail

/// Discrete Laplacian matching poisson_solve_channel: spectral in x, three-point
/// in y.  DirichletZero treats wall rows as fixed zeros (output 0 there);
/// NeumannZero uses mirrored ghost nodes.
inline ScalarField laplacian(const ScalarField& phi, WallCondition bc) {
  const auto& d = phi.domain();
  const int Ny = d.Ny;
  auto ph = fft_x({phi.data().begin(), phi.data().end()}, d.Nx, Ny);
  std::vector<cplx> out(ph.size());
  const double h2 = 1.0 / (d.dy() * d.dy());
  for (int m = 0; m <= d.Nx / 2; ++m) {
    const double k2 = detail::laplace_k2(d, m);
    const cplx* f = ph.data() + static_cast<std::size_t>(m) * Ny;
    cplx* g = out.data() + static_cast<std::size_t>(m) * Ny;
    for (int j = 1; j < Ny - 1; ++j) g[j] = (f[j + 1] - 2.0 * f[j] + f[j - 1]) * h2 - k2 * f[j];
    if (bc == WallCondition::NeumannZero) {
      g[0] = 2.0 * (f[1] - f[0]) * h2 - k2 * f[0];
      g[Ny - 1] = 2.0 * (f[Ny - 2] - f[Ny - 1]) * h2 - k2 * f[Ny - 1];
    } else {
      g[0] = g[Ny - 1] = 0.0;
    }
  }
  auto v = ifft_x(std::move(out), d.Nx, Ny);
  ScalarField res(d, phi.time());
  std::copy(v.begin(), v.end(), res.data().begin());
  return res;
}

/// Solves Laplacian(phi) = rhs, periodic in x, with the given wall condition,
/// by one tridiagonal solve per x-mode.  DirichletZero ignores rhs on the wall
/// rows.  NeumannZero requires zero trapezoid mean and returns the zero-mean
/// solution.
inline ScalarField poisson_solve_channel(const ScalarField& rhs, WallCondition bc) {
  const auto& d = rhs.domain();
  const int Ny = d.Ny;
  if (!rhs.all_finite()) throw NumericalFailure("poisson_solve_channel: non-finite right-hand side");
  if (bc == WallCondition::NeumannZero) {
    const double mean = integrate(rhs) / (d.Lx * d.H);
    const double scale = l2_norm(rhs) / std::sqrt(d.Lx * d.H);
    if (std::abs(mean) > 1e-12 * scale)
      throw InvalidArgument("poisson_solve_channel: Neumann data has nonzero mean " +
                            std::to_string(mean));
  }
  auto rh = fft_x({rhs.data().begin(), rhs.data().end()}, d.Nx, Ny);
  const double h2 = 1.0 / (d.dy() * d.dy());

  for (int m = 0; m <= d.Nx / 2; ++m) {
    const double k2 = detail::laplace_k2(d, m);
    cplx* r = rh.data() + static_cast<std::size_t>(m) * Ny;
    if (bc == WallCondition::DirichletZero) {
      const int n = Ny - 2;
      std::vector<double> lo(n, h2), di(n, -2.0 * h2 - k2), up(n, h2);
      std::vector<cplx> b(r + 1, r + Ny - 1);
      detail::thomas(lo, di, up, b);
      r[0] = r[Ny - 1] = 0.0;
      for (int j = 0; j < n; ++j) r[j + 1] = b[j];
    } else {
      std::vector<double> lo(Ny, h2), di(Ny, -2.0 * h2 - k2), up(Ny, h2);
      up[0] = 2.0 * h2;
      lo[Ny - 1] = 2.0 * h2;
      std::vector<cplx> b(r, r + Ny);
      if (m == 0) {
        // Singular mode: pin phi_0 = 0, drop the first equation, fix the mean after.
        std::vector<double> lo1(lo.begin() + 1, lo.end()), di1(di.begin() + 1, di.end()),
            up1(up.begin() + 1, up.end());
        std::vector<cplx> b1(b.begin() + 1, b.end());
        detail::thomas(lo1, di1, up1, b1);
        b[0] = 0.0;
        for (int j = 1; j < Ny; ++j) b[j] = b1[j - 1];
        auto w = y_weights(d);
        cplx mean = 0.0;
        for (int j = 0; j < Ny; ++j) mean += w[j] * b[j];
        mean /= d.H;
        for (int j = 0; j < Ny; ++j) b[j] -= mean;
      } else {
        detail::thomas(lo, di, up, b);
      }
      for (int j = 0; j < Ny; ++j) r[j] = b[j];
    }
  }
  auto v = ifft_x(std::move(rh), d.Nx, Ny);
  ScalarField phi(d, rhs.time());
  std::copy(v.begin(), v.end(), phi.data().begin());
  return phi;
}

/// psi with -Laplacian(psi) = w and psi = 0 on both walls.
inline ScalarField stream_potential(const VorticityField& w) {
  ScalarField rhs = w.w;
  rhs *= -1.0;
  return poisson_solve_channel(rhs, WallCondition::DirichletZero);
}

/// Velocity (Dy psi, -Dx psi) of the Dirichlet stream function of w.
/// Exactly solenoidal (the x and y difference operators commute) and v = 0 on walls.
inline VelocityField stream_function(const VorticityField& w, double nu = 0.0) {
  ScalarField psi = stream_potential(w);
  ScalarField v = dx(psi);
  v *= -1.0;
  return VelocityField(dy(psi), std::move(v), nu);
}

}  // namespace vislim
