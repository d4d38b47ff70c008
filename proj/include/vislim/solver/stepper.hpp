#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "vislim/error.hpp"
#include "vislim/fields/fft.hpp"
#include "vislim/fields/field.hpp"
#include "vislim/fields/operators.hpp"
#include "vislim/solver/basis.hpp"
#include "vislim/solver/forcing.hpp"
#include "vislim/solver/initial.hpp"
#include "vislim/solver/ledger.hpp"

namespace vislim {

/// Nonlinear term: -div(u (x) u) or the rotational form (w v, -w u).
/// They differ by a gradient, which the solenoidal Galerkin space removes.
enum class AdvectionForm { Conservative, Rotational };

/// Ab2: explicit Adams-Bashforth-2 advection.  Midpoint: advection evaluated at
/// the step midpoint and solved by fixed-point iteration (energy-neutral).
enum class TimeScheme { Ab2, Midpoint };

inline const char* to_string(AdvectionForm f) {
  return f == AdvectionForm::Conservative ? "conservative" : "rotational";
}
inline const char* to_string(TimeScheme s) { return s == TimeScheme::Ab2 ? "ab2" : "midpoint"; }

struct RunConfig {
  DomainSpec domain;
  double nu = 1e-2;
  double dt = 1e-3;
  ForcingSpec forcing;
  InitSpec init;
  int snapshot_every = 10;
  double snapshot_interval = 0.0;  ///< > 0: snapshot at multiples of this time instead
  std::string out_dir;
  AdvectionForm advection = AdvectionForm::Rotational;
  TimeScheme scheme = TimeScheme::Midpoint;
  double cfl_max = 0.5;
  int max_iterations = 60;
  double iteration_tol = 1e-11;

  std::vector<std::string> problems() const {
    auto p = domain.problems();
    if (!(nu > 0)) p.push_back("nu must be > 0");
    if (!(dt > 0)) p.push_back("dt must be > 0");
    if (snapshot_every < 1) p.push_back("snapshot_every must be >= 1");
    if (!(snapshot_interval >= 0)) p.push_back("snapshot_interval must be >= 0");
    if (!(cfl_max > 0)) p.push_back("cfl_max must be > 0");
    if (max_iterations < 1) p.push_back("max_iterations must be >= 1");
    return p;
  }

  void validate() const {
    auto p = problems();
    if (p.empty()) return;
    std::string msg = "invalid run config:";
    for (const auto& s : p) msg += " " + s + ";";
    throw InvalidArgument(msg);
  }
};

/// Largest mode index kept by the two-thirds rule (3M < Nx).
inline int dealias_limit(int Nx) { return (Nx - 1) / 3; }

/// CN diffusion with AB2 or midpoint advection, solved exactly inside the
/// discrete solenoidal space of the boundary condition.
class Stepper {
 public:
  Stepper(const RunConfig& cfg, const VelocityField& initial)
      : cfg_(cfg),
        dom_(cfg.domain),
        basis_(cfg.domain, space_for(cfg.domain.bc), dealias_limit(cfg.domain.Nx)),
        alpha_(cfg.domain.bc == BcKind::NavierFriction ? cfg.domain.alpha(cfg.nu) : 0.0) {
    cfg.validate();
    require(initial.domain().same_grid(dom_), "stepper: initial field grid mismatch");
    const int M = basis_.m_max();
    c_ = basis_.coefficients(initial);
    t_ = 0.0;
    stiff_bulk_.resize(M + 1);
    stiff_.resize(M + 1);
    for (int m = 0; m <= M; ++m) {
      const ModeSpace& s = basis_.mode(m);
      const double k2 = s.k * s.k;
      stiff_bulk_[m] = SpMat(s.Su + k2 * s.Mu + k2 * s.Sv + (k2 * k2) * s.Mv);
      stiff_[m] = alpha_ > 0 ? SpMat(stiff_bulk_[m] + alpha_ * s.Sw) : stiff_bulk_[m];
    }
    // Force load vectors.
    force_ = make_forcing(cfg.forcing, dom_);
    has_force_ = cfg.forcing.kind != ForcingKind::None && cfg.forcing.amplitude != 0.0;
    Ff_ = loads(force_.u, force_.v);
    ledger_.start(0.0, energy(c_));
    dt_ = cfg.dt;
    factorize(dt_);
  }

  double time() const { return t_; }
  double dt() const { return dt_; }
  const EnergyLedger& ledger() const { return ledger_; }
  const SolenoidalBasis& basis() const { return basis_; }
  double alpha() const { return alpha_; }
  long steps() const { return steps_; }
  long retries() const { return retries_; }
  int last_iterations() const { return last_iterations_; }
  VelocityField state() const { return basis_.field(c_, cfg_.nu, t_); }
  double energy() const { return energy(c_); }

  /// Advances by at most dt toward t_end (the step is shortened so the run
  /// lands on t_end).  Halves dt on CFL violation or iteration failure.
  void step(double t_end) {
    const double remaining = t_end - t_;
    require(remaining > 0, "stepper: already at the end time");
    double dt_try = cfg_.dt;
    while (dt_try > dt_cap_) dt_try *= 0.5;
    const long n = static_cast<long>(std::ceil(remaining / dt_try - 1e-9));
    dt_try = remaining / std::max(1L, n);

    const double h = std::min(dom_.dx(), dom_.dy());
    const double umax = basis_.field(c_).max_speed();
    for (int attempt = 0; attempt < 40; ++attempt) {
      if (umax * dt_try / h > cfg_.cfl_max) {
        halve(dt_try);
        continue;
      }
      if (std::abs(dt_try - dt_) > 1e-12 * dt_)
        factorize(dt_try);
      else
        dt_try = dt_;
      if (try_step(dt_try)) return;
      halve(dt_try);
    }
    throw NumericalFailure("stepper: could not complete a step at t=" + std::to_string(t_));
  }

 private:
  void halve(double& dt_try) {
    dt_try *= 0.5;
    dt_cap_ = std::min(dt_cap_, dt_try);
    ++retries_;
  }

  void factorize(double dt) {
    const int M = basis_.m_max();
    const double theta = 0.5 * cfg_.nu * dt;
    L_.assign(M + 1, nullptr);
    R_.resize(M + 1);
    for (int m = 0; m <= M; ++m) {
      const SpMat& mass = basis_.mode(m).mass;
      L_[m] = std::make_shared<SpLLT>(SpMat(mass + theta * stiff_[m]));
      if (L_[m]->info() != Eigen::Success) throw NumericalFailure("stepper: factorization failed");
      R_[m] = SpMat(mass - theta * stiff_[m]);
    }
    dt_ = dt;
  }

  double energy(const std::vector<CVec>& c) const {
    return 0.5 * basis_.quadratic(c, c, &ModeSpace::mass);
  }

  std::vector<CVec> loads(const ScalarField& u, const ScalarField& v) const {
    const int Nx = dom_.Nx, Ny = dom_.Ny;
    auto uh = fft_x({u.data().begin(), u.data().end()}, Nx, Ny);
    auto vh = fft_x({v.data().begin(), v.data().end()}, Nx, Ny);
    std::vector<CVec> F(basis_.m_max() + 1);
    for (int m = 0; m <= basis_.m_max(); ++m) {
      const std::size_t o = static_cast<std::size_t>(m) * Ny;
      F[m] = basis_.load(m, uh.data() + o, vh.data() + o);
    }
    F[0] = F[0].real().cast<cplx>();
    return F;
  }

  /// Galerkin load of the nonlinear term plus the force, at state c.
  std::vector<CVec> rhs_load(const std::vector<CVec>& c) const {
    const int Nx = dom_.Nx, Ny = dom_.Ny, M = basis_.m_max();
    const std::size_t nh = static_cast<std::size_t>(Nx / 2 + 1) * Ny;
    std::vector<cplx> uh(nh, 0.0), vh(nh, 0.0);
    for (int m = 0; m <= M; ++m) {
      const std::size_t o = static_cast<std::size_t>(m) * Ny;
      basis_.synthesize(m, c[m], uh.data() + o, vh.data() + o);
    }
    std::vector<cplx> nu_h, nv_h;
    if (cfg_.advection == AdvectionForm::Rotational) {
      std::vector<cplx> wh(nh, 0.0);
      dy_columns(uh.data(), wh.data(), Nx / 2 + 1, Ny, dom_.dy());
      for (int m = 0; m <= M; ++m) {
        const cplx ik(0.0, wavenumber(dom_, m));
        for (int j = 0; j < Ny; ++j) {
          const std::size_t q = static_cast<std::size_t>(m) * Ny + j;
          wh[q] = ik * vh[q] - wh[q];
        }
      }
      auto u = ifft_x(uh, Nx, Ny), v = ifft_x(vh, Nx, Ny), w = ifft_x(std::move(wh), Nx, Ny);
      std::vector<double> a(u.size()), b(u.size());
      for (std::size_t q = 0; q < u.size(); ++q) {
        a[q] = w[q] * v[q];
        b[q] = -w[q] * u[q];
      }
      nu_h = fft_x(a, Nx, Ny);
      nv_h = fft_x(b, Nx, Ny);
    } else {
      auto u = ifft_x(uh, Nx, Ny), v = ifft_x(vh, Nx, Ny);
      std::vector<double> uu(u.size()), uv(u.size()), vv(u.size());
      for (std::size_t q = 0; q < u.size(); ++q) {
        uu[q] = u[q] * u[q];
        uv[q] = u[q] * v[q];
        vv[q] = v[q] * v[q];
      }
      auto uuh = fft_x(uu, Nx, Ny), uvh = fft_x(uv, Nx, Ny), vvh = fft_x(vv, Nx, Ny);
      nu_h.assign(nh, 0.0);
      nv_h.assign(nh, 0.0);
      dy_columns(uvh.data(), nu_h.data(), M + 1, Ny, dom_.dy());
      dy_columns(vvh.data(), nv_h.data(), M + 1, Ny, dom_.dy());
      for (int m = 0; m <= M; ++m) {
        const cplx ik(0.0, wavenumber(dom_, m));
        for (int j = 0; j < Ny; ++j) {
          const std::size_t q = static_cast<std::size_t>(m) * Ny + j;
          nu_h[q] = -(ik * uuh[q] + nu_h[q]);
          nv_h[q] = -(ik * uvh[q] + nv_h[q]);
        }
      }
    }
    std::vector<CVec> F(M + 1);
    for (int m = 0; m <= M; ++m) {
      const std::size_t o = static_cast<std::size_t>(m) * Ny;
      F[m] = basis_.load(m, nu_h.data() + o, nv_h.data() + o);
      if (has_force_) F[m] += Ff_[m];
    }
    F[0] = F[0].real().cast<cplx>();
    return F;
  }

  bool finite(const std::vector<CVec>& c) const {
    for (const auto& v : c)
      if (!v.allFinite()) return false;
    return true;
  }

  /// Attempts one step of size dt (already factorized).  Returns false when
  /// the midpoint iteration does not converge.
  bool try_step(double dt) {
    const int M = basis_.m_max();
    std::vector<CVec> base(M + 1);
    for (int m = 0; m <= M; ++m) base[m] = R_[m] * c_[m];

    std::vector<CVec> next(M + 1);
    int iters = 1;
    if (cfg_.scheme == TimeScheme::Ab2) {
      std::vector<CVec> Fn = rhs_load(c_);
      double a1 = 1.0, a2 = 0.0;
      if (!F_prev_.empty()) {
        const double om = dt / dt_prev_;
        a1 = 1.0 + 0.5 * om;
        a2 = -0.5 * om;
      }
      for (int m = 0; m <= M; ++m) {
        CVec r = base[m] + dt * a1 * Fn[m];
        if (a2 != 0.0) r += dt * a2 * F_prev_[m];
        next[m] = SolenoidalBasis::solve(*L_[m], r);
      }
      if (!finite(next)) throw NumericalFailure("stepper: non-finite state at t=" + std::to_string(t_));
      F_prev_ = std::move(Fn);
    } else {
      // Initial guess: linear extrapolation from the previous step.
      std::vector<CVec> guess = c_;
      if (!c_prev_.empty()) {
        const double om = dt / dt_prev_;
        for (int m = 0; m <= M; ++m) guess[m] = c_[m] + om * (c_[m] - c_prev_[m]);
      }
      const double scale = std::sqrt(2.0 * std::max(energy(c_), 1e-300));
      bool converged = false;
      for (iters = 1; iters <= cfg_.max_iterations; ++iters) {
        std::vector<CVec> mid(M + 1);
        for (int m = 0; m <= M; ++m) mid[m] = 0.5 * (c_[m] + guess[m]);
        std::vector<CVec> F = rhs_load(mid);
        for (int m = 0; m <= M; ++m) next[m] = SolenoidalBasis::solve(*L_[m], base[m] + dt * F[m]);
        if (!finite(next)) throw NumericalFailure("stepper: non-finite state at t=" + std::to_string(t_));
        std::vector<CVec> diff(M + 1);
        for (int m = 0; m <= M; ++m) diff[m] = next[m] - guess[m];
        const double dn = std::sqrt(std::max(0.0, basis_.quadratic(diff, diff, &ModeSpace::mass)));
        guess = next;
        if (dn <= cfg_.iteration_tol * scale) {
          converged = true;
          break;
        }
      }
      if (!converged) return false;
    }
    last_iterations_ = iters;

    // Budget increments at the step midpoint.
    std::vector<CVec> mid(M + 1);
    for (int m = 0; m <= M; ++m) mid[m] = 0.5 * (c_[m] + next[m]);
    const double dD = cfg_.nu * dt * quadratic(mid, stiff_bulk_);
    double dDw = 0.0;
    if (alpha_ > 0) dDw = cfg_.nu * dt * alpha_ * basis_.quadratic(mid, mid, &ModeSpace::Sw);
    double dW = 0.0;
    if (has_force_)
      for (int m = 0; m <= M; ++m) dW += dt * basis_.mode_weight(m) * Ff_[m].dot(mid[m]).real();

    c_prev_ = std::move(c_);
    c_ = std::move(next);
    dt_prev_ = dt;
    t_ += dt;
    ++steps_;
    const double E = energy(c_);
    if (!std::isfinite(E)) throw NumericalFailure("stepper: non-finite energy at t=" + std::to_string(t_));
    ledger_.record(t_, E, dD, dDw, dW);
    return true;
  }

  double quadratic(const std::vector<CVec>& a, const std::vector<SpMat>& mats) const {
    double s = 0;
    for (int m = 0; m <= basis_.m_max(); ++m)
      s += basis_.mode_weight(m) * a[m].dot(mats[m] * a[m]).real();
    return s;
  }

  RunConfig cfg_;
  DomainSpec dom_;
  SolenoidalBasis basis_;
  double alpha_;
  std::vector<SpMat> stiff_bulk_, stiff_;
  VelocityField force_;
  bool has_force_ = false;
  std::vector<CVec> Ff_;
  std::vector<CVec> c_, c_prev_, F_prev_;
  std::vector<std::shared_ptr<SpLLT>> L_;
  std::vector<SpMat> R_;
  double t_ = 0.0, dt_ = 0.0, dt_prev_ = 0.0;
  double dt_cap_ = std::numeric_limits<double>::infinity();
  long steps_ = 0, retries_ = 0;
  int last_iterations_ = 0;
  EnergyLedger ledger_;
};

}  // namespace vislim
