#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "vislim/error.hpp"
#include "vislim/fields/fft.hpp"
#include "vislim/norms/cutoff.hpp"

namespace vislim {

/// Zero extension of a channel field to the doubly periodic box
/// [0, Lx) x [0, 2H) on an (Nx, 2(Ny-1)) grid.  Rejects fields that are
/// nonzero on a wall row (the seam of the extension).
inline std::vector<double> box_extension(const ScalarField& g) {
  const auto& d = g.domain();
  const int n1 = 2 * (d.Ny - 1);
  for (int i = 0; i < d.Nx; ++i)
    require(g(i, 0) == 0.0 && g(i, d.Ny - 1) == 0.0,
            "sobolev_norm_cutoff: support of the cut-off field touches the extension seam");
  std::vector<double> box(static_cast<std::size_t>(d.Nx) * n1, 0.0);
  for (int i = 0; i < d.Nx; ++i)
    for (int j = 0; j < d.Ny; ++j) box[static_cast<std::size_t>(i) * n1 + j] = g(i, j);
  return box;
}

/// sqrt(|box| * sum_k (1 + |k|^2)^s |c_k|^2) with c_k the Fourier
/// coefficients of the (n0, n1) periodic grid function on [0,Lx) x [0,Ly).
inline double box_sobolev_norm(const std::vector<double>& box, int n0, int n1, double Lx, double Ly,
                               double s) {
  const auto c = fft_2d(box, n0, n1);
  const int nh = n1 / 2 + 1;
  const double pi = std::numbers::pi;
  const double N = static_cast<double>(n0) * n1;
  double acc = 0;
  for (int p = 0; p < n0; ++p) {
    const double kx = 2 * pi * fft_freq(p, n0) / Lx;
    for (int q = 0; q < nh; ++q) {
      const double ky = 2 * pi * q / Ly;
      const double w = (q == 0 || 2 * q == n1) ? 1.0 : 2.0;
      const double m = (s == 0.0) ? 1.0 : std::pow(1.0 + kx * kx + ky * ky, s);
      acc += w * m * std::norm(c[static_cast<std::size_t>(p) * nh + q]);
    }
  }
  return std::sqrt(std::max(0.0, Lx * Ly * acc) / (N * N));
}

/// ||chi f||_{H^s} via zero extension to the periodic box (components summed).
template <class Field>
NormReport sobolev_norm_cutoff(const Field& f, double s, const Cutoff& chi) {
  require(s > -2 && s < 1, "sobolev_norm_cutoff: s must lie in (-2,1)");
  const Field g = apply_cutoff(chi, f);
  NormReport rep{s < 0 ? NormKind::SobolevNeg : NormKind::SobolevFrac, s, chi.outer};
  double acc = 0;
  for (const ScalarField* c : components(g)) {
    const auto& d = c->domain();
    const double v = box_sobolev_norm(box_extension(*c), d.Nx, 2 * (d.Ny - 1), d.Lx, 2 * d.H, s);
    rep.details.push_back(v);
    acc += v * v;
  }
  rep.value = rep.base_part = std::sqrt(acc);
  return rep;
}

/// L2 in time (trapezoid) of the per-snapshot cut-off Sobolev norm.
template <class Field>
NormReport sobolev_norm_cutoff_time(const std::vector<Field>& snaps, const std::vector<double>& times,
                                    double s, const Cutoff& chi) {
  require(!snaps.empty() && snaps.size() == times.size(), "sobolev_norm_cutoff_time: bad snapshot series");
  const auto tw = trapezoid_time_weights(times);
  NormReport rep{s < 0 ? NormKind::SobolevNeg : NormKind::SobolevFrac, s, chi.outer};
  double acc = 0;
  for (std::size_t n = 0; n < snaps.size(); ++n) {
    const double v = sobolev_norm_cutoff(snaps[n], s, chi).value;
    rep.details.push_back(v);
    acc += tw[n] * v * v;
  }
  rep.value = rep.base_part = std::sqrt(acc);
  return rep;
}

}  // namespace vislim
