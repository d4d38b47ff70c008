#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "vislim/error.hpp"

namespace vislim {

enum class BcKind : std::uint8_t { NoSlip = 0, NavierFriction = 1 };

inline const char* to_string(BcKind bc) {
  return bc == BcKind::NoSlip ? "no_slip" : "navier_friction";
}

/// Periodic channel [0,Lx) x [0,H] with walls at y = 0 and y = H.
///
/// Nodes are x_i = i*Lx/Nx (i < Nx) and y_j = j*H/(Ny-1) (j < Ny), so rows
/// j = 0 and j = Ny-1 sit on the walls.  Under Navier friction the inverse
/// slip length is alpha(nu) = alpha0 * nu^-beta.
struct DomainSpec {
  double Lx = 2.0;
  double H = 1.0;
  int Nx = 64;
  int Ny = 33;
  double T_final = 1.0;
  BcKind bc = BcKind::NoSlip;
  double alpha0 = 1.0;
  double beta = 1.0;

  double dx() const { return Lx / Nx; }
  double dy() const { return H / (Ny - 1); }
  double x(int i) const { return i * dx(); }
  double y(int j) const { return j * dy(); }
  std::size_t size() const { return static_cast<std::size_t>(Nx) * static_cast<std::size_t>(Ny); }

  double alpha(double nu) const { return alpha0 * std::pow(nu, -beta); }

  /// Every violated invariant, in human-readable form.
  std::vector<std::string> problems() const {
    std::vector<std::string> out;
    if (!(Lx > 0)) out.push_back("Lx must be > 0");
    if (!(H > 0)) out.push_back("H must be > 0");
    if (Nx < 8 || Nx % 2 != 0) out.push_back("Nx must be even and >= 8");
    if (Ny < 9) out.push_back("Ny must be >= 9");
    if (!(T_final >= 0)) out.push_back("T_final must be >= 0");
    if (!(alpha0 > 0)) out.push_back("alpha0 must be > 0");
    if (!(beta >= 0 && beta <= 1)) out.push_back("beta ∈ [0,1] required");
    return out;
  }

  void validate() const {
    auto p = problems();
    if (p.empty()) return;
    std::ostringstream os;
    os << "invalid domain:";
    for (const auto& s : p) os << ' ' << s << ';';
    throw InvalidArgument(os.str());
  }

  bool same_grid(const DomainSpec& o) const {
    return Lx == o.Lx && H == o.H && Nx == o.Nx && Ny == o.Ny;
  }
};

/// Open rectangle U with 0 < y_lo < y_hi < H.  x is periodic, so only the
/// walls bound the distance to the boundary.
struct Subdomain {
  double x_lo = 0;
  double x_hi = 0;
  double y_lo = 0;
  double y_hi = 0;

  double width() const { return x_hi - x_lo; }
  double height() const { return y_hi - y_lo; }
  double area() const { return width() * height(); }
  double margin(const DomainSpec& d) const { return std::min(y_lo, d.H - y_hi); }

  void validate(const DomainSpec& d) const {
    require(x_hi > x_lo, "subdomain: x_hi must exceed x_lo");
    require(width() <= d.Lx, "subdomain: width exceeds the x period");
    require(y_lo > 0 && y_lo < y_hi && y_hi < d.H,
            "subdomain: need 0 < y_lo < y_hi < H (strictly interior)");
  }

  /// U grown by `h` on every side (may leave the domain; callers validate).
  Subdomain grown(double h) const { return {x_lo - h, x_hi + h, y_lo - h, y_hi + h}; }

  /// True when V lies inside this set with at least `gap` to spare on every side.
  bool contains(const Subdomain& v, double gap = 0.0) const {
    return v.x_lo >= x_lo + gap && v.x_hi <= x_hi - gap && v.y_lo >= y_lo + gap &&
           v.y_hi <= y_hi - gap;
  }
};

}  // namespace vislim
