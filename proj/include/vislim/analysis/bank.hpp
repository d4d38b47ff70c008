#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "vislim/error.hpp"
#include "vislim/fields/field.hpp"
#include "vislim/fields/operators.hpp"
#include "vislim/norms/cutoff.hpp"
#include "vislim/norms/structure_function.hpp"

namespace vislim {

/// d/ds of exp(1 - 1/(1 - s^2)).
inline double bump_profile_derivative(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return bump_profile(s) * (-2.0 * s / (q * q));
}

/// phi(x, t) = b((t - tc)/tau) * (dy psi, -dx psi) with
/// psi = rho * b((x - xc)/rho) * b((y - yc)/rho), b the C-infinity bump.
struct TestField {
  double xc = 0, yc = 0, rho = 0, tc = 0, tau = 0;
  VelocityField phi;  ///< spatial factor, discrete curl of psi
  ScalarField du_dx, du_dy, dv_dx, dv_dy;

  double time_factor(double t) const { return bump_profile((t - tc) / tau); }
  double time_derivative(double t) const { return bump_profile_derivative((t - tc) / tau) / tau; }
};

struct TestFieldBank {
  DomainSpec domain;
  double T = 0.0;
  std::vector<TestField> fields;

  std::size_t size() const { return fields.size(); }

  static TestField make(const DomainSpec& d, double xc, double yc, double rho, double tc, double tau) {
    TestField f{xc, yc, rho, tc, tau};
    ScalarField psi = ScalarField::from_function(d, [&](double x, double y) {
      const double xs = x - d.Lx * std::round((x - xc) / d.Lx);
      return rho * bump_profile((xs - xc) / rho) * bump_profile((y - yc) / rho);
    });
    ScalarField v = dx(psi);
    v *= -1.0;
    f.phi = VelocityField(dy(psi), std::move(v));
    f.du_dx = dx(f.phi.u);
    f.du_dy = dy(f.phi.u);
    f.dv_dx = dx(f.phi.v);
    f.dv_dy = dy(f.phi.v);
    return f;
  }

  /// 4 spatial centers x 3 time windows; radius and time half-width as
  /// fractions of min(H, Lx/2) and T.
  static TestFieldBank standard(const DomainSpec& d, double T, double radius = 0.2, double tau = 0.2) {
    require(T > 0, "test bank: T must be > 0");
    TestFieldBank b{d, T};
    const double rho = radius * std::min(d.H, d.Lx / 2);
    const double cx[2] = {0.25 * d.Lx, 0.75 * d.Lx};
    const double cy[2] = {0.35 * d.H, 0.65 * d.H};
    const double ct[3] = {0.25 * T, 0.5 * T, 0.75 * T};
    for (double tc : ct)
      for (double x : cx)
        for (double y : cy) b.fields.push_back(make(d, x, y, rho, tc, tau * T));
    b.validate();
    return b;
  }

  void validate() const {
    const double m = 2 * std::max(domain.dx(), domain.dy());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      const auto& f = fields[j];
      const std::string id = "test field " + std::to_string(j);
      require(f.yc - f.rho >= m && f.yc + f.rho <= domain.H - m, id + ": support within 2 cells of a wall");
      require(2 * f.rho <= domain.Lx - m, id + ": support wraps around the x period");
      require(f.tc - f.tau > 0 && f.tc + f.tau < T, id + ": time support touches 0 or T");
      require(divergence(f.phi).max_abs() <= 1e-10, id + ": not divergence-free");
    }
  }
};

/// Maximal snapshot spacing that resolves every time window (8 per tau).
inline double required_spacing(const TestFieldBank& bank) {
  double tau = INFINITY;
  for (const auto& f : bank.fields) tau = std::min(tau, f.tau);
  return tau / 8.0;
}

inline void check_cadence(const std::vector<double>& times, const TestFieldBank& bank) {
  const double need = required_spacing(bank);
  double worst = 0;
  for (std::size_t n = 1; n < times.size(); ++n) worst = std::max(worst, times[n] - times[n - 1]);
  if (times.size() < 2 || worst > need * (1 + 1e-9))
    throw InvalidArgument("euler_residual: snapshot spacing " + std::to_string(worst) +
                          " too coarse; need spacing <= " + std::to_string(need));
}

struct PairingResult {
  std::vector<double> P;                  ///< int_0^T <u, phi_j> dt
  std::vector<std::vector<double>> rows;  ///< [j][snapshot] <u(t_n), phi_j(t_n)>
  std::vector<double> phi_norm;           ///< ||phi_j||_{L2 L2}
  double u_norm = 0.0;                    ///< ||u||_{L2 L2}
};

inline PairingResult weak_pairing(const std::vector<VelocityField>& snaps, const TestFieldBank& bank) {
  require(!snaps.empty(), "weak_pairing: empty snapshot series");
  const auto times = snapshot_times(snaps);
  const auto tw = trapezoid_time_weights(times);
  PairingResult r;
  double uu = 0;
  for (std::size_t n = 0; n < snaps.size(); ++n) uu += tw[n] * inner(snaps[n], snaps[n]);
  r.u_norm = std::sqrt(uu);
  for (const auto& f : bank.fields) {
    std::vector<double> row;
    double P = 0, pp = 0;
    const double ff = inner(f.phi, f.phi);
    for (std::size_t n = 0; n < snaps.size(); ++n) {
      const double b = f.time_factor(times[n]);
      const double v = b == 0.0 ? 0.0 : b * inner(snaps[n], f.phi);
      row.push_back(v);
      P += tw[n] * v;
      pp += tw[n] * b * b * ff;
    }
    r.P.push_back(P);
    r.rows.push_back(std::move(row));
    r.phi_norm.push_back(std::sqrt(pp));
  }
  return r;
}

struct ResidualRecord {
  double R = 0.0;  ///< int int u.d_t phi + (u x u) : grad phi + f.phi
  double V = 0.0;  ///< nu int int grad u : grad phi
  double grad_phi_norm = 0.0;  ///< ||grad phi||_{L2 L2}
  double cs_bound = 0.0;       ///< sqrt(nu) sqrt(D) ||grad phi||
  double scale = 0.0;          ///< T ||phi||_{W1,inf} (U + U^2), U = max_t ||u||
};

struct ResidualResult {
  std::vector<ResidualRecord> records;
  double dissipation = 0.0;  ///< nu int a(u,u) dt over the snapshots
};

/// Weak-form residuals for every bank member.  `forcing` is time independent.
inline ResidualResult euler_residual(const std::vector<VelocityField>& snaps,
                                     const std::optional<VelocityField>& forcing,
                                     const TestFieldBank& bank, double nu) {
  require(!snaps.empty(), "euler_residual: empty snapshot series");
  const auto times = snapshot_times(snaps);
  check_cadence(times, bank);
  const auto tw = trapezoid_time_weights(times);

  ResidualResult out;
  double umax = 0;
  std::vector<double> a_uu(snaps.size());
  for (std::size_t n = 0; n < snaps.size(); ++n) {
    a_uu[n] = dirichlet_form(snaps[n], snaps[n]);
    out.dissipation += nu * tw[n] * a_uu[n];
    umax = std::max(umax, l2_norm(snaps[n]));
  }
  double bt_max = 0;
  for (int k = 0; k <= 2000; ++k) bt_max = std::max(bt_max, std::abs(bump_profile_derivative(-1 + k / 1000.0)));
  const auto& d = bank.domain;
  for (const auto& f : bank.fields) {
    ResidualRecord rec;
    const double fphi = forcing ? inner(*forcing, f.phi) : 0.0;
    const double a_pp = dirichlet_form(f.phi, f.phi);
    double gp = 0;
    for (std::size_t n = 0; n < snaps.size(); ++n) {
      const double b = f.time_factor(times[n]), bt = f.time_derivative(times[n]);
      if (b == 0.0 && bt == 0.0) continue;
      const auto& u = snaps[n].u;
      const auto& v = snaps[n].v;
      ScalarField g(d);  // (u x u) : grad phi
      for (int i = 0; i < d.Nx; ++i)
        for (int j = 0; j < d.Ny; ++j) {
          const double a = u(i, j), c = v(i, j);
          g(i, j) = a * a * f.du_dx(i, j) + a * c * (f.du_dy(i, j) + f.dv_dx(i, j)) + c * c * f.dv_dy(i, j);
        }
      const double nl = integrate(g);
      rec.R += tw[n] * (bt * inner(snaps[n], f.phi) + b * nl + b * fphi);
      rec.V += tw[n] * nu * b * dirichlet_form(snaps[n], f.phi);
      gp += tw[n] * b * b * a_pp;
    }
    rec.grad_phi_norm = std::sqrt(gp);
    rec.cs_bound = std::sqrt(nu) * std::sqrt(out.dissipation) * rec.grad_phi_norm;
    const double grad_inf = std::max({f.du_dx.max_abs(), f.du_dy.max_abs(), f.dv_dx.max_abs(), f.dv_dy.max_abs()});
    const double phi_inf = std::max(f.phi.u.max_abs(), f.phi.v.max_abs());
    const double w1inf = phi_inf * (1 + bt_max / f.tau) + grad_inf;
    rec.scale = bank.T * w1inf * (umax + umax * umax);
    out.records.push_back(rec);
  }
  return out;
}

}  // namespace vislim
