#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "vislim/error.hpp"
#include "vislim/fields/field.hpp"
#include "vislim/fields/operators.hpp"

namespace vislim {

/// Displacements r = magnitude * direction.
struct ShiftSet {
  std::vector<std::array<double, 2>> directions;  ///< unit vectors
  std::vector<double> magnitudes;                 ///< strictly increasing

  std::size_t size() const { return directions.size() * magnitudes.size(); }
  std::array<double, 2> shift(std::size_t dir, std::size_t mag) const {
    return {magnitudes[mag] * directions[dir][0], magnitudes[mag] * directions[dir][1]};
  }

  void validate(double dist) const {
    require(!directions.empty(), "shift set: no directions");
    require(!magnitudes.empty(), "shift set: no magnitudes");
    for (const auto& e : directions)
      require(std::abs(std::hypot(e[0], e[1]) - 1.0) < 1e-12, "shift set: directions must be unit vectors");
    for (std::size_t k = 0; k < magnitudes.size(); ++k) {
      require(magnitudes[k] > 0, "shift set: magnitudes must be positive");
      require(k == 0 || magnitudes[k] > magnitudes[k - 1], "shift set: magnitudes must increase strictly");
    }
    require(magnitudes.back() < dist, "shift set: every |r| must be below dist(U, walls)");
  }
};

inline std::vector<std::array<double, 2>> axis_directions() {
  return {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
}

inline std::vector<std::array<double, 2>> axis_and_diagonal_directions() {
  const double c = 1.0 / std::numbers::sqrt2;
  auto d = axis_directions();
  d.insert(d.end(), {{c, c}, {-c, -c}, {c, -c}, {-c, c}});
  return d;
}

/// Integer multiples n*h of h = min(dx, dy), log-spaced from h to
/// fraction*dist(U, walls), duplicates removed.
inline std::vector<double> log_spaced_magnitudes(const DomainSpec& d, double dist, int count = 12,
                                                 double fraction = 0.95) {
  const double h = std::min(d.dx(), d.dy());
  const int n_hi = static_cast<int>(std::floor(fraction * dist / h * (1 + 1e-12)));
  require(n_hi >= 1, "shift set: dist(U, walls) is below one grid cell");
  std::set<int> ns;
  for (int k = 0; k < count; ++k) {
    const double t = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
    ns.insert(std::max(1, static_cast<int>(std::lround(std::pow(static_cast<double>(n_hi), t)))));
  }
  std::vector<double> out;
  for (int n : ns)
    if (n * h < dist) out.push_back(n * h);
  return out;
}

/// Default set: 8 directions (axes and diagonals), log-spaced grid multiples.
inline ShiftSet default_shift_set(const DomainSpec& d, const Subdomain& U, int count = 12,
                                  double fraction = 0.95) {
  ShiftSet s{axis_and_diagonal_directions(), log_spaced_magnitudes(d, U.margin(d), count, fraction)};
  s.validate(U.margin(d));
  return s;
}

/// Grid-aligned variant: the four axis directions only (exact shifts when dx = dy).
inline ShiftSet axis_shift_set(const DomainSpec& d, const Subdomain& U, int count = 12,
                               double fraction = 0.95) {
  ShiftSet s{axis_directions(), log_spaced_magnitudes(d, U.margin(d), count, fraction)};
  s.validate(U.margin(d));
  return s;
}

/// Time weights of the trapezoid rule over snapshot times (a single snapshot gets weight 1).
inline std::vector<double> trapezoid_time_weights(const std::vector<double>& t) {
  std::vector<double> w(t.size(), 0.0);
  if (t.size() == 1) {
    w[0] = 1.0;
    return w;
  }
  for (std::size_t n = 0; n + 1 < t.size(); ++n) {
    const double h = t[n + 1] - t[n];
    require(h >= 0, "snapshot times must be nondecreasing");
    w[n] += 0.5 * h;
    w[n + 1] += 0.5 * h;
  }
  return w;
}

template <class Snap>
std::vector<double> snapshot_times(const std::vector<Snap>& s) {
  std::vector<double> t;
  for (const auto& f : s) t.push_back(f.time());
  return t;
}

/// int_{x in U, x + r in channel} |f(x + r) - f(x)|^2, summed over components.
template <class Field>
double increment_energy(const Field& f, std::array<double, 2> r, const RegionWeights& w) {
  double s = 0;
  for (const ScalarField* c : components(f)) {
    const auto& d = c->domain();
    MaskedField g = shift_sample(*c, r);
    for (int i = 0; i < d.Nx; ++i) {
      if (w.wx[i] == 0) continue;
      double col = 0;
      for (int j = 0; j < d.Ny; ++j) {
        if (w.wy[j] == 0 || !g.row_valid[j]) continue;
        const double e = g.f(i, j) - (*c)(i, j);
        col += w.wy[j] * e * e;
      }
      s += w.wx[i] * col;
    }
  }
  return s;
}

/// S2(r; U) per (direction, magnitude), time-integrated, with its
/// direction-averaged column and the per-snapshot slices.
struct StructureFunctionTable {
  Subdomain U;
  ShiftSet shifts;
  std::vector<std::vector<double>> values;  ///< [direction][magnitude]
  std::vector<double> averaged;             ///< mean over directions, per magnitude
  std::vector<std::vector<std::vector<double>>> slices;  ///< [snapshot][direction][magnitude]
  double t0 = 0.0, t1 = 0.0;
  std::size_t n_snapshots = 0;
};

template <class Field>
StructureFunctionTable structure_function(const std::vector<Field>& snaps, const Subdomain& U,
                                          const ShiftSet& shifts) {
  require(!snaps.empty(), "structure_function: empty snapshot series");
  const DomainSpec& d = snaps.front().domain();
  for (const auto& s : snaps) require(s.domain().same_grid(d), "structure_function: snapshots differ in grid");
  U.validate(d);
  shifts.validate(U.margin(d));
  const auto w = restrict(d, U);
  const auto tw = trapezoid_time_weights(snapshot_times(snaps));

  StructureFunctionTable tab;
  tab.U = U;
  tab.shifts = shifts;
  tab.t0 = snaps.front().time();
  tab.t1 = snaps.back().time();
  tab.n_snapshots = snaps.size();
  const std::size_t nd = shifts.directions.size(), nm = shifts.magnitudes.size();
  tab.values.assign(nd, std::vector<double>(nm, 0.0));
  tab.slices.assign(snaps.size(), std::vector<std::vector<double>>(nd, std::vector<double>(nm, 0.0)));
  for (std::size_t n = 0; n < snaps.size(); ++n)
    for (std::size_t a = 0; a < nd; ++a)
      for (std::size_t b = 0; b < nm; ++b) {
        const double e = increment_energy(snaps[n], shifts.shift(a, b), w);
        tab.slices[n][a][b] = e;
        tab.values[a][b] += tw[n] * e;
      }
  tab.averaged.assign(nm, 0.0);
  for (std::size_t b = 0; b < nm; ++b) {
    for (std::size_t a = 0; a < nd; ++a) tab.averaged[b] += tab.values[a][b];
    tab.averaged[b] /= static_cast<double>(nd);
  }
  return tab;
}

}  // namespace vislim
