#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "vislim/error.hpp"
#include "vislim/norms/besov.hpp"
#include "vislim/norms/cutoff.hpp"
#include "vislim/norms/sobolev.hpp"
#include "vislim/solver/initial.hpp"

namespace vislim {

/// Seeded ensemble of band-limited random scalars on U, with V inside U.
struct EmbeddingConfig {
  DomainSpec domain{2.0, 1.0, 128, 65};
  Subdomain U{0.5, 1.5, 0.2, 0.8};
  Subdomain V{0.75, 1.25, 0.35, 0.65};
  double s = 0.5;
  double eps = 0.1;
  double q = 2.5;
  int members = 200;
  std::uint64_t seed = 1;
  double field_zeta = 1.5;  ///< S2 exponent of the ensemble members
  double band = 50.0;       ///< coarse band limit; the fine ensemble uses 2*band
  double stability_tol = 0.1;
  int calibration_members = 50;
  std::uint64_t calibration_seed_offset = 1000000;
  double calibration_margin = 1.2;

  void validate() const {
    domain.validate();
    U.validate(domain);
    V.validate(domain);
    require(U.contains(V, 1e-12) && V.x_lo > U.x_lo && V.y_lo > U.y_lo,
            "embedding: V must lie strictly inside U");
    require(s > 0 && s < 1, "embedding: s must lie in (0,1)");
    require(eps > 0 && eps < s, "embedding: eps must lie in (0,s)");
    require(q >= 1 && q < 4.0 / (2.0 - 2.0 * s), "embedding: q must lie in [1, 4/(2-2s))");
    require(members >= 1 && calibration_members >= 1, "embedding: ensembles must be nonempty");
    require(band > 0, "embedding: band must be > 0");
  }

  ScalarField member(int k, bool fine, std::uint64_t offset = 0) const {
    InitSpec is;
    is.zeta = field_zeta;
    is.k_max = fine ? 2 * band : band;
    is.seed = seed + offset + static_cast<std::uint64_t>(k);
    return random_scalar_field(is, domain);
  }
};

struct EmbeddingRatio {
  std::string name;
  double max_coarse = 0.0;
  double max_fine = 0.0;
  bool finite = true;
  double relative_change = 0.0;
  bool stable = false;
};

struct EmbeddingReport {
  std::vector<EmbeddingRatio> ratios;
  bool pass = false;
};

/// The three ratios for one field: ||chi f||_{H^{s-eps}} / ||f||_{B(U)},
/// ||f||_{L^q(V)} / ||f||_{B(U)} and ||f||_{B(V)} / ||chi f||_{H^s}, with chi
/// equal to 1 on V and supported in U.  Zero denominators give ratio 0.
inline std::array<double, 3> embedding_ratios(const ScalarField& f, const EmbeddingConfig& c,
                                              const Cutoff& chi, const ShiftSet& shU,
                                              const ShiftSet& shV) {
  auto ratio = [](double a, double b) { return b == 0.0 ? 0.0 : a / b; };
  const double bU = besov_norm(f, c.s, c.U, shU).value;
  const double bV = besov_norm(f, c.s, c.V, shV).value;
  const double hs_low = sobolev_norm_cutoff(f, c.s - c.eps, chi).value;
  const double hs = sobolev_norm_cutoff(f, c.s, chi).value;
  const double lq = lq_norm(f, c.q, c.V).value;
  return {ratio(hs_low, bU), ratio(lq, bU), ratio(bV, hs)};
}

namespace detail {

inline EmbeddingRatio summarize(std::string name, const std::vector<double>& coarse,
                                const std::vector<double>& fine, double tol) {
  EmbeddingRatio r{std::move(name)};
  for (double v : coarse) {
    r.finite &= std::isfinite(v);
    r.max_coarse = std::max(r.max_coarse, v);
  }
  for (double v : fine) {
    r.finite &= std::isfinite(v);
    r.max_fine = std::max(r.max_fine, v);
  }
  r.relative_change = r.max_coarse > 0 ? std::abs(r.max_fine - r.max_coarse) / r.max_coarse : 0.0;
  r.stable = r.finite && r.relative_change <= tol;
  return r;
}

}  // namespace detail

/// Calibrated embedding constants at the coarse and doubled band limits.
inline EmbeddingReport verify_embedding_chain(const EmbeddingConfig& c) {
  c.validate();
  const Cutoff chi = make_cutoff(c.domain, c.U, c.V);
  const ShiftSet shU = default_shift_set(c.domain, c.U);
  const ShiftSet shV = default_shift_set(c.domain, c.V);
  std::array<std::vector<double>, 3> coarse, fine;
  for (int k = 0; k < c.members; ++k) {
    const auto a = embedding_ratios(c.member(k, false), c, chi, shU, shV);
    const auto b = embedding_ratios(c.member(k, true), c, chi, shU, shV);
    for (int e = 0; e < 3; ++e) {
      coarse[e].push_back(a[e]);
      fine[e].push_back(b[e]);
    }
  }
  EmbeddingReport rep;
  const char* names[3] = {"besov_to_sobolev", "besov_to_lq", "sobolev_to_besov"};
  rep.pass = true;
  for (int e = 0; e < 3; ++e) {
    rep.ratios.push_back(detail::summarize(names[e], coarse[e], fine[e], c.stability_tol));
    rep.pass &= rep.ratios.back().stable;
  }
  return rep;
}

/// Besov norm of a periodic box function: L2 plus the max over grid-aligned
/// periodic shifts of the increment L2 norm divided by |r|^s.
inline double box_besov_norm(const std::vector<double>& box, int n0, int n1, double hx, double hy,
                             double s, const ShiftSet& shifts) {
  double l2 = 0;
  for (double v : box) l2 += v * v;
  l2 = std::sqrt(hx * hy * l2);
  double sup = 0;
  for (std::size_t a = 0; a < shifts.directions.size(); ++a)
    for (std::size_t b = 0; b < shifts.magnitudes.size(); ++b) {
      const auto r = shifts.shift(a, b);
      const double sx = r[0] / hx, sy = r[1] / hy;
      const long ix = std::lround(sx), iy = std::lround(sy);
      require(std::abs(sx - ix) < 1e-9 && std::abs(sy - iy) < 1e-9,
              "box_besov_norm: shifts must be grid-aligned");
      double e = 0;
      for (int i = 0; i < n0; ++i) {
        const int si = static_cast<int>(((i + ix) % n0 + n0) % n0);
        for (int j = 0; j < n1; ++j) {
          const int sj = static_cast<int>(((j + iy) % n1 + n1) % n1);
          const double dlt = box[static_cast<std::size_t>(si) * n1 + sj] - box[static_cast<std::size_t>(i) * n1 + j];
          e += dlt * dlt;
        }
      }
      sup = std::max(sup, std::sqrt(hx * hy * e) / std::pow(shifts.magnitudes[b], s));
    }
  return l2 + sup;
}

/// ||chi f||_{B(box)} / (||chi||_{C^s} ||f||_{B(U)}), 0 for f = 0.
inline double cutoff_ratio(const ScalarField& f, const Cutoff& chi, double s, const ShiftSet& shifts,
                           double holder) {
  const auto& d = f.domain();
  const auto box = box_extension(apply_cutoff(chi, f));
  const double lhs = box_besov_norm(box, d.Nx, 2 * (d.Ny - 1), d.dx(), d.dy(), s, shifts);
  const double bU = besov_norm(f, s, chi.outer, shifts).value;
  return bU == 0.0 ? 0.0 : lhs / (holder * bU);
}

struct CutoffInequalityReport {
  double holder = 0.0;           ///< ||chi||_{C^s}
  double calibration_max = 0.0;  ///< max ratio over the calibration ensemble
  double constant = 0.0;         ///< calibration_margin * calibration_max
  double max_coarse = 0.0;
  double max_fine = 0.0;
  double relative_change = 0.0;
  bool bounded = false;  ///< every member ratio <= constant
  bool stable = false;   ///< max ratio changes <= stability_tol under band doubling
  bool pass = false;
};

/// Calibrates C on a disjoint seed range, then checks every member at both
/// band limits against it.  Shifts are the axis set of U (grid-aligned).
inline CutoffInequalityReport verify_cutoff_inequality(const EmbeddingConfig& c) {
  c.validate();
  const Cutoff chi = make_cutoff(c.domain, c.U, c.V);
  const ShiftSet sh = axis_shift_set(c.domain, c.U);
  CutoffInequalityReport rep;
  rep.holder = holder_norm(chi.values, c.s, sh).value;
  for (int k = 0; k < c.calibration_members; ++k)
    rep.calibration_max = std::max(
        rep.calibration_max, cutoff_ratio(c.member(k, false, c.calibration_seed_offset), chi, c.s, sh, rep.holder));
  rep.constant = c.calibration_margin * rep.calibration_max;
  rep.bounded = true;
  for (int k = 0; k < c.members; ++k) {
    const double a = cutoff_ratio(c.member(k, false), chi, c.s, sh, rep.holder);
    const double b = cutoff_ratio(c.member(k, true), chi, c.s, sh, rep.holder);
    rep.bounded &= std::isfinite(a) && std::isfinite(b) && a <= rep.constant && b <= rep.constant;
    rep.max_coarse = std::max(rep.max_coarse, a);
    rep.max_fine = std::max(rep.max_fine, b);
  }
  rep.relative_change = rep.max_coarse > 0 ? std::abs(rep.max_fine - rep.max_coarse) / rep.max_coarse : 0.0;
  rep.stable = rep.relative_change <= c.stability_tol;
  rep.pass = rep.bounded && rep.stable;
  return rep;
}

}  // namespace vislim
