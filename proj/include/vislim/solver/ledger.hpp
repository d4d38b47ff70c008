#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace vislim {

/// Cumulative energy budget of a run, one row per accepted step (row 0 is t = 0).
///
/// kinetic = E(t) = (1/2)||u||^2; dissipation_bulk = nu * int a(u,u) dt with the
/// discrete Dirichlet form; dissipation_wall = nu * int alpha |u|^2 over both
/// walls; force_work = int <f, u> dt.  Increments use the step midpoint.  Flat
/// walls make the curvature boundary term identically zero.
struct EnergyLedger {
  std::vector<double> times;
  std::vector<double> kinetic;
  std::vector<double> dissipation_bulk;
  std::vector<double> dissipation_wall;
  std::vector<double> force_work;
  /// E(t_{n+1}) - E(t_n) + increments of the dissipations - work increment.
  std::vector<double> step_violation;
  double curvature_term = 0.0;

  void start(double t0, double E0) {
    *this = EnergyLedger{};
    times = {t0};
    kinetic = {E0};
    dissipation_bulk = {0.0};
    dissipation_wall = {0.0};
    force_work = {0.0};
  }

  void record(double t, double E, double dD, double dDw, double dW) {
    step_violation.push_back(E - kinetic.back() + dD + dDw - dW);
    times.push_back(t);
    kinetic.push_back(E);
    dissipation_bulk.push_back(dissipation_bulk.back() + dD);
    dissipation_wall.push_back(dissipation_wall.back() + dDw);
    force_work.push_back(force_work.back() + dW);
  }

  std::size_t rows() const { return times.size(); }
  double E0() const { return kinetic.empty() ? 0.0 : kinetic.front(); }

  /// E(t) - E(0) + D_bulk(t) + D_wall(t) - W(t) at row n.
  double cumulative_violation(std::size_t n) const {
    return kinetic[n] - kinetic.front() + dissipation_bulk[n] + dissipation_wall[n] - force_work[n];
  }

  double max_step_violation() const {
    double m = 0;
    for (double v : step_violation) m = std::max(m, v);
    return m;
  }

  double max_cumulative_violation() const {
    double m = 0;
    for (std::size_t n = 0; n < rows(); ++n) m = std::max(m, cumulative_violation(n));
    return m;
  }

  /// Every step and every prefix satisfies the budget to rel_tol * E(0).
  bool inequality_holds(double rel_tol = 1e-8) const {
    const double tol = rel_tol * E0();
    return max_step_violation() <= tol && max_cumulative_violation() <= tol;
  }
};

}  // namespace vislim
