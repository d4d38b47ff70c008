#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "vislim/error.hpp"
#include "vislim/fields/fft.hpp"
#include "vislim/fields/field.hpp"

namespace vislim {

/// Angular wavenumber used by the spectral x-derivative for half-spectrum
/// index m.  The Nyquist mode is differentiated to zero.
inline double wavenumber(const DomainSpec& d, int m) {
  if (2 * m == d.Nx) return 0.0;
  return 2.0 * std::numbers::pi * m / d.Lx;
}

/// Second-order y-derivative of every column of an (n, Ny) row-major array:
/// centered in the interior, one-sided three-point at the walls.
template <class T>
void dy_columns(const T* in, T* out, int n, int Ny, double dy) {
  const double h = 1.0 / (2.0 * dy);
  for (int i = 0; i < n; ++i) {
    const T* f = in + static_cast<std::size_t>(i) * Ny;
    T* g = out + static_cast<std::size_t>(i) * Ny;
    g[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * h;
    for (int j = 1; j < Ny - 1; ++j) g[j] = (f[j + 1] - f[j - 1]) * h;
    g[Ny - 1] = (3.0 * f[Ny - 1] - 4.0 * f[Ny - 2] + f[Ny - 3]) * h;
  }
}

/// Transpose of dy_columns (adjoint in the plain Euclidean product).
template <class T>
void dy_columns_transpose(const T* in, T* out, int n, int Ny, double dy) {
  const double h = 1.0 / (2.0 * dy);
  for (int i = 0; i < n; ++i) {
    const T* f = in + static_cast<std::size_t>(i) * Ny;
    T* g = out + static_cast<std::size_t>(i) * Ny;
    for (int j = 0; j < Ny; ++j) g[j] = T{};
    g[0] += -3.0 * h * f[0];
    g[1] += 4.0 * h * f[0];
    g[2] += -h * f[0];
    for (int j = 1; j < Ny - 1; ++j) {
      g[j + 1] += h * f[j];
      g[j - 1] -= h * f[j];
    }
    g[Ny - 1] += 3.0 * h * f[Ny - 1];
    g[Ny - 2] += -4.0 * h * f[Ny - 1];
    g[Ny - 3] += h * f[Ny - 1];
  }
}

/// Trapezoid weights in y (wall rows carry half a cell).
inline std::vector<double> y_weights(const DomainSpec& d) {
  std::vector<double> w(d.Ny, d.dy());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

inline ScalarField dx(const ScalarField& f) {
  const auto& d = f.domain();
  auto fh = fft_x({f.data().begin(), f.data().end()}, d.Nx, d.Ny);
  for (int m = 0; m <= d.Nx / 2; ++m) {
    const cplx ik(0.0, wavenumber(d, m));
    for (int j = 0; j < d.Ny; ++j) fh[static_cast<std::size_t>(m) * d.Ny + j] *= ik;
  }
  auto g = ifft_x(std::move(fh), d.Nx, d.Ny);
  ScalarField out(d, f.time());
  std::copy(g.begin(), g.end(), out.data().begin());
  return out;
}

inline ScalarField dy(const ScalarField& f) {
  const auto& d = f.domain();
  ScalarField out(d, f.time());
  dy_columns(f.data().data(), out.data().data(), d.Nx, d.Ny, d.dy());
  return out;
}

inline VorticityField curl(const VelocityField& vel) {
  ScalarField w = dx(vel.v);
  w -= dy(vel.u);
  return {std::move(w)};
}

inline ScalarField divergence(const VelocityField& vel) {
  ScalarField q = dx(vel.u);
  q += dy(vel.v);
  return q;
}

/// Discrete pressure gradient: the negative adjoint of `divergence` in the
/// trapezoid inner product, (Dx phi, -W^-1 Dy^T W phi).  Its range is exactly
/// the orthogonal complement of the discrete solenoidal fields.
inline VelocityField gradient(const ScalarField& phi, double nu = 0.0) {
  const auto& d = phi.domain();
  auto w = y_weights(d);
  ScalarField gy(d, phi.time());
  std::vector<double> tmp(d.size());
  for (int i = 0; i < d.Nx; ++i)
    for (int j = 0; j < d.Ny; ++j) tmp[static_cast<std::size_t>(i) * d.Ny + j] = w[j] * phi(i, j);
  dy_columns_transpose(tmp.data(), gy.data().data(), d.Nx, d.Ny, d.dy());
  for (int i = 0; i < d.Nx; ++i)
    for (int j = 0; j < d.Ny; ++j) gy(i, j) = -gy(i, j) / w[j];
  return VelocityField(dx(phi), std::move(gy), nu);
}

/// Integral over the channel (uniform in x, trapezoid in y).
inline double integrate(const ScalarField& f) {
  const auto& d = f.domain();
  auto w = y_weights(d);
  double s = 0;
  for (int i = 0; i < d.Nx; ++i)
    for (int j = 0; j < d.Ny; ++j) s += w[j] * f(i, j);
  return s * d.dx();
}

inline double inner(const ScalarField& f, const ScalarField& g) {
  const auto& d = f.domain();
  auto w = y_weights(d);
  double s = 0;
  for (int i = 0; i < d.Nx; ++i)
    for (int j = 0; j < d.Ny; ++j) s += w[j] * f(i, j) * g(i, j);
  return s * d.dx();
}

inline double inner(const VelocityField& a, const VelocityField& b) {
  return inner(a.u, b.u) + inner(a.v, b.v);
}

inline double l2_norm(const ScalarField& f) { return std::sqrt(std::max(0.0, inner(f, f))); }
inline double l2_norm(const VelocityField& f) { return std::sqrt(std::max(0.0, inner(f, f))); }

/// Discrete Dirichlet form: spectral x-derivatives plus forward differences
/// in y, summed with the channel quadrature.  a(f,f) approximates ||grad f||^2.
inline double dirichlet_form(const ScalarField& f, const ScalarField& g) {
  const auto& d = f.domain();
  double s = inner(dx(f), dx(g));
  double sy = 0;
  for (int i = 0; i < d.Nx; ++i)
    for (int j = 0; j + 1 < d.Ny; ++j) sy += (f(i, j + 1) - f(i, j)) * (g(i, j + 1) - g(i, j));
  return s + sy * d.dx() / d.dy();
}

inline double dirichlet_form(const VelocityField& a, const VelocityField& b) {
  return dirichlet_form(a.u, b.u) + dirichlet_form(a.v, b.v);
}

/// Quadrature weights of a region: the integral of f over the region is
/// sum_i sum_j wx[i] * wy[j] * f(i,j).
struct RegionWeights {
  std::vector<double> wx;
  std::vector<double> wy;

  double area() const {
    double a = 0, b = 0;
    for (double v : wx) a += v;
    for (double v : wy) b += v;
    return a * b;
  }
};

namespace detail {

inline double overlap(double a0, double a1, double b0, double b1) {
  return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

}  // namespace detail

/// Node weights for integrating over U: each node carries the length of its
/// dual cell [x_i - dx/2, x_i + dx/2] that falls inside U (periodic in x; the
/// y cells are clipped to [0, H]).  Constants integrate exactly and the full
/// channel reproduces the trapezoid rule.
inline RegionWeights restrict(const DomainSpec& d, const Subdomain& U) {
  require(U.x_hi > U.x_lo && U.y_hi > U.y_lo, "restrict: empty subdomain");
  require(U.width() <= d.Lx + 1e-12, "restrict: subdomain wider than the x period");
  require(U.y_lo >= -1e-12 && U.y_hi <= d.H + 1e-12, "restrict: subdomain leaves the channel");
  RegionWeights r;
  r.wx.assign(d.Nx, 0.0);
  r.wy.assign(d.Ny, 0.0);
  const double hx = d.dx(), hy = d.dy();
  for (int i = 0; i < d.Nx; ++i) {
    const double c0 = d.x(i) - 0.5 * hx, c1 = d.x(i) + 0.5 * hx;
    // U may be shifted by any multiple of the period relative to the cell.
    const double k0 = std::floor((U.x_lo - c1) / d.Lx);
    double acc = 0;
    for (double k = k0; k <= k0 + 2; k += 1)
      acc += detail::overlap(c0 + k * d.Lx, c1 + k * d.Lx, U.x_lo, U.x_hi);
    r.wx[i] = acc;
  }
  for (int j = 0; j < d.Ny; ++j) {
    const double c0 = std::max(0.0, d.y(j) - 0.5 * hy), c1 = std::min(d.H, d.y(j) + 0.5 * hy);
    r.wy[j] = detail::overlap(c0, c1, U.y_lo, U.y_hi);
  }
  bool any_x = false, any_y = false;
  for (double v : r.wx) any_x |= v > 0;
  for (double v : r.wy) any_y |= v > 0;
  require(any_x && any_y, "restrict: subdomain contains no grid nodes");
  return r;
}

/// Whole channel as a region (trapezoid weights).
inline RegionWeights full_region(const DomainSpec& d) {
  return {std::vector<double>(d.Nx, d.dx()), y_weights(d)};
}

inline double integrate(const ScalarField& f, const RegionWeights& r) {
  const auto& d = f.domain();
  double s = 0;
  for (int i = 0; i < d.Nx; ++i) {
    if (r.wx[i] == 0) continue;
    double c = 0;
    for (int j = 0; j < d.Ny; ++j) c += r.wy[j] * f(i, j);
    s += r.wx[i] * c;
  }
  return s;
}

/// Field sampled at shifted points, with rows whose shifted y leaves [0, H]
/// marked invalid.
struct MaskedField {
  ScalarField f;
  std::vector<char> row_valid;
};

/// f(x + r): periodic in x, cubic Lagrange in y for off-grid r_y.
/// Grid-aligned shifts are exact index permutations; other x-shifts use a
/// spectral phase shift.
inline MaskedField shift_sample(const ScalarField& f, std::array<double, 2> r) {
  const auto& d = f.domain();
  const double hx = d.dx(), hy = d.dy();
  const double sx = r[0] / hx, sy = r[1] / hy;
  const long ix = std::lround(sx), iy = std::lround(sy);
  const bool x_grid = std::abs(sx - ix) < 1e-9;
  const bool y_grid = std::abs(sy - iy) < 1e-9;

  // x stage
  ScalarField g(d, f.time());
  if (x_grid) {
    for (int i = 0; i < d.Nx; ++i) {
      const int src = static_cast<int>(((i + ix) % d.Nx + d.Nx) % d.Nx);
      for (int j = 0; j < d.Ny; ++j) g(i, j) = f(src, j);
    }
  } else {
    auto fh = fft_x({f.data().begin(), f.data().end()}, d.Nx, d.Ny);
    for (int m = 0; m <= d.Nx / 2; ++m) {
      const double k = 2.0 * std::numbers::pi * m / d.Lx;
      // The Nyquist coefficient is real-valued on a real grid; keep only the
      // cosine part so the result stays real.
      const cplx ph = (2 * m == d.Nx) ? cplx(std::cos(k * r[0]), 0.0)
                                      : std::polar(1.0, k * r[0]);
      for (int j = 0; j < d.Ny; ++j) fh[static_cast<std::size_t>(m) * d.Ny + j] *= ph;
    }
    auto v = ifft_x(std::move(fh), d.Nx, d.Ny);
    std::copy(v.begin(), v.end(), g.data().begin());
  }

  MaskedField out{ScalarField(d, f.time()), std::vector<char>(d.Ny, 0)};
  int valid = 0;
  for (int j = 0; j < d.Ny; ++j) {
    const double yt = d.y(j) + r[1];
    out.row_valid[j] = (yt >= -1e-12 * d.H && yt <= d.H * (1 + 1e-12)) ? 1 : 0;
    valid += out.row_valid[j];
  }
  if (valid == 0) throw InvalidArgument("shift_sample: the y-shift moves every row out of the channel");

  for (int j = 0; j < d.Ny; ++j) {
    if (!out.row_valid[j]) continue;
    if (y_grid) {
      const int src = j + static_cast<int>(iy);
      for (int i = 0; i < d.Nx; ++i) out.f(i, j) = g(i, src);
      continue;
    }
    const double t = j + sy;  // fractional source row
    int j0 = static_cast<int>(std::floor(t)) - 1;
    j0 = std::clamp(j0, 0, d.Ny - 4);
    double l[4];
    for (int a = 0; a < 4; ++a) {
      l[a] = 1.0;
      for (int b = 0; b < 4; ++b)
        if (b != a) l[a] *= (t - (j0 + b)) / static_cast<double>(a - b);
    }
    for (int i = 0; i < d.Nx; ++i) {
      double s = 0;
      for (int a = 0; a < 4; ++a) s += l[a] * g(i, j0 + a);
      out.f(i, j) = s;
    }
  }
  return out;
}

}  // namespace vislim
