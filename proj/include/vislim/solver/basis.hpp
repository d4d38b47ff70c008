#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <complex>
#include <memory>
#include <vector>

#include "vislim/error.hpp"
#include "vislim/fields/fft.hpp"
#include "vislim/fields/field.hpp"
#include "vislim/fields/operators.hpp"

namespace vislim {

using SpMat = Eigen::SparseMatrix<double>;
using CVec = Eigen::VectorXcd;
using SpLLT = Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::NaturalOrdering<int>>;

/// Which discrete solenoidal space a basis spans.  Both have v = 0 on the
/// walls; NoSlip additionally pins u = 0 there.
enum class SpaceKind { Impermeable, NoSlip };

inline SpaceKind space_for(BcKind bc) {
  return bc == BcKind::NoSlip ? SpaceKind::NoSlip : SpaceKind::Impermeable;
}

/// Galerkin description of one x-mode of the discrete solenoidal space.
///
/// For k != 0 the velocity is u = Dy B c, v = -i k B c, where B maps the
/// coefficients c to stream-function values psi (zero on the walls).  For
/// k = 0 (mean mode, and the Nyquist mode whose x-derivative vanishes) v = 0
/// and c holds the free rows of u directly.
struct ModeSpace {
  int m = 0;
  double k = 0.0;
  bool has_v = false;
  SpMat Ru;  // Ny x n : coefficients -> u column
  SpMat B;   // Ny x n : coefficients -> psi column (k != 0 only)
  SpMat mass;
  SpMat Mu, Mv;  // mass = Mu + k^2 Mv
  SpMat Su, Sv;  // forward-difference stiffness of u and psi
  SpMat Sw;      // |u|^2 on the two wall rows
  std::shared_ptr<SpLLT> mass_llt;

  int size() const { return static_cast<int>(Ru.cols()); }
};

namespace detail {

inline SpMat from_triplets(int rows, int cols, const std::vector<Eigen::Triplet<double>>& t) {
  SpMat A(rows, cols);
  A.setFromTriplets(t.begin(), t.end());
  return A;
}

inline SpMat dy_matrix(int Ny, double dy) {
  const double h = 1.0 / (2.0 * dy);
  std::vector<Eigen::Triplet<double>> t;
  t.emplace_back(0, 0, -3 * h);
  t.emplace_back(0, 1, 4 * h);
  t.emplace_back(0, 2, -h);
  for (int j = 1; j < Ny - 1; ++j) {
    t.emplace_back(j, j + 1, h);
    t.emplace_back(j, j - 1, -h);
  }
  t.emplace_back(Ny - 1, Ny - 1, 3 * h);
  t.emplace_back(Ny - 1, Ny - 2, -4 * h);
  t.emplace_back(Ny - 1, Ny - 3, h);
  return from_triplets(Ny, Ny, t);
}

/// Sum over j of (e_{j+1} - e_j)(e_{j+1} - e_j)^T / dy.
inline SpMat forward_stiffness(int Ny, double dy) {
  std::vector<Eigen::Triplet<double>> t;
  for (int j = 0; j + 1 < Ny; ++j) {
    t.emplace_back(j, j, 1 / dy);
    t.emplace_back(j + 1, j + 1, 1 / dy);
    t.emplace_back(j, j + 1, -1 / dy);
    t.emplace_back(j + 1, j, -1 / dy);
  }
  return from_triplets(Ny, Ny, t);
}

inline SpMat diag_matrix(const std::vector<double>& w) {
  std::vector<Eigen::Triplet<double>> t;
  for (int j = 0; j < static_cast<int>(w.size()); ++j) t.emplace_back(j, j, w[j]);
  return from_triplets(static_cast<int>(w.size()), static_cast<int>(w.size()), t);
}

}  // namespace detail

/// Per-mode Galerkin spaces for modes 0..m_max.
class SolenoidalBasis {
 public:
  SolenoidalBasis(const DomainSpec& d, SpaceKind kind, int m_max = -1)
      : dom_(d), kind_(kind), m_max_(m_max < 0 ? d.Nx / 2 : m_max) {
    const int Ny = d.Ny;
    const SpMat Dy = detail::dy_matrix(Ny, d.dy());
    const SpMat W = detail::diag_matrix(y_weights(d));
    const SpMat Ky = detail::forward_stiffness(Ny, d.dy());
    std::vector<double> ew(Ny, 0.0);
    ew.front() = ew.back() = 1.0;
    const SpMat Ew = detail::diag_matrix(ew);

    modes_.resize(m_max_ + 1);
    for (int m = 0; m <= m_max_; ++m) {
      ModeSpace& s = modes_[m];
      s.m = m;
      s.k = wavenumber(d, m);
      s.has_v = s.k != 0.0;
      std::vector<Eigen::Triplet<double>> t;
      if (!s.has_v) {
        const int j0 = kind == SpaceKind::NoSlip ? 1 : 0;
        const int j1 = kind == SpaceKind::NoSlip ? Ny - 2 : Ny - 1;
        for (int j = j0; j <= j1; ++j) t.emplace_back(j, j - j0, 1.0);
        s.Ru = detail::from_triplets(Ny, j1 - j0 + 1, t);
        s.Mu = SpMat(s.Ru.transpose() * W * s.Ru);
        s.Mv = SpMat(s.Ru.cols(), s.Ru.cols());
        s.Su = SpMat(s.Ru.transpose() * Ky * s.Ru);
        s.Sv = s.Mv;
      } else {
        if (kind == SpaceKind::NoSlip) {
          // Free psi_2..psi_{Ny-3}; psi_1 = psi_2/4 and psi_{Ny-2} = psi_{Ny-3}/4
          // make the one-sided wall derivative (u on the wall) vanish.
          const int n = Ny - 4;
          for (int a = 0; a < n; ++a) t.emplace_back(a + 2, a, 1.0);
          t.emplace_back(1, 0, 0.25);
          t.emplace_back(Ny - 2, n - 1, 0.25);
          s.B = detail::from_triplets(Ny, n, t);
        } else {
          const int n = Ny - 2;
          for (int a = 0; a < n; ++a) t.emplace_back(a + 1, a, 1.0);
          s.B = detail::from_triplets(Ny, n, t);
        }
        s.Ru = SpMat(Dy * s.B);
        s.Mu = SpMat(s.Ru.transpose() * W * s.Ru);
        s.Mv = SpMat(s.B.transpose() * W * s.B);
        s.Su = SpMat(s.Ru.transpose() * Ky * s.Ru);
        s.Sv = SpMat(s.B.transpose() * Ky * s.B);
      }
      s.Sw = SpMat(s.Ru.transpose() * Ew * s.Ru);
      s.mass = SpMat(s.Mu + (s.k * s.k) * s.Mv);
      s.mass_llt = std::make_shared<SpLLT>(s.mass);
      if (s.mass_llt->info() != Eigen::Success)
        throw NumericalFailure("basis: mass matrix factorization failed");
    }
    w_ = y_weights(d);
  }

  const DomainSpec& domain() const { return dom_; }
  SpaceKind kind() const { return kind_; }
  int m_max() const { return m_max_; }
  const ModeSpace& mode(int m) const { return modes_[m]; }

  /// Trapezoid/Parseval weight of half-spectrum mode m in the channel inner product.
  double mode_weight(int m) const {
    const double wt = (m == 0 || 2 * m == dom_.Nx) ? 1.0 : 2.0;
    return wt * dom_.dx() / dom_.Nx;
  }

  /// Solves the real SPD system A x = b for complex b.
  static CVec solve(const SpLLT& llt, const CVec& b) {
    Eigen::MatrixXd rhs(b.size(), 2);
    rhs.col(0) = b.real();
    rhs.col(1) = b.imag();
    Eigen::MatrixXd x = llt.solve(rhs);
    CVec out(b.size());
    out.real() = x.col(0);
    out.imag() = x.col(1);
    return out;
  }

  /// Load vector of a nodal spectral pair (uh, vh) against the mode's basis:
  /// Ru^T W uh + i k B^T W vh.  Its inner product with c is <(u,v), phi(c)>.
  CVec load(int m, const cplx* uh, const cplx* vh) const {
    const ModeSpace& s = modes_[m];
    const auto& w = w_;
    const int Ny = dom_.Ny;
    CVec wu(Ny), wv(Ny);
    for (int j = 0; j < Ny; ++j) {
      wu(j) = w[j] * uh[j];
      wv(j) = w[j] * vh[j];
    }
    CVec out = s.Ru.transpose() * wu;
    if (s.has_v) out += cplx(0.0, s.k) * (s.B.transpose() * wv);
    return out;
  }

  /// Nodal spectral columns of the velocity represented by c in mode m.
  void synthesize(int m, const CVec& c, cplx* uh, cplx* vh) const {
    const ModeSpace& s = modes_[m];
    CVec u = s.Ru * c;
    for (int j = 0; j < dom_.Ny; ++j) uh[j] = u(j);
    if (s.has_v) {
      CVec p = s.B * c;
      const cplx f(0.0, -s.k);
      for (int j = 0; j < dom_.Ny; ++j) vh[j] = f * p(j);
    } else {
      for (int j = 0; j < dom_.Ny; ++j) vh[j] = 0.0;
    }
  }

  const SpLLT& mass_factor(int m) const { return *modes_[m].mass_llt; }

  /// Orthogonal projection coefficients of a nodal velocity (modes 0..m_max).
  std::vector<CVec> coefficients(const VelocityField& vel) const {
    const int Nx = dom_.Nx, Ny = dom_.Ny;
    auto uh = fft_x({vel.u.data().begin(), vel.u.data().end()}, Nx, Ny);
    auto vh = fft_x({vel.v.data().begin(), vel.v.data().end()}, Nx, Ny);
    std::vector<CVec> c(m_max_ + 1);
    for (int m = 0; m <= m_max_; ++m) {
      const std::size_t o = static_cast<std::size_t>(m) * Ny;
      c[m] = solve(mass_factor(m), load(m, uh.data() + o, vh.data() + o));
      if (2 * m == Nx) c[m] = c[m].real().cast<cplx>();
    }
    if (m_max_ >= 0) c[0] = c[0].real().cast<cplx>();
    return c;
  }

  VelocityField field(const std::vector<CVec>& c, double nu = 0.0, double time = 0.0) const {
    const int Nx = dom_.Nx, Ny = dom_.Ny;
    std::vector<cplx> uh(static_cast<std::size_t>(Nx / 2 + 1) * Ny, 0.0), vh(uh.size(), 0.0);
    for (int m = 0; m <= m_max_ && m < static_cast<int>(c.size()); ++m) {
      const std::size_t o = static_cast<std::size_t>(m) * Ny;
      synthesize(m, c[m], uh.data() + o, vh.data() + o);
    }
    VelocityField out(dom_, nu, time);
    auto u = ifft_x(std::move(uh), Nx, Ny);
    auto v = ifft_x(std::move(vh), Nx, Ny);
    std::copy(u.begin(), u.end(), out.u.data().begin());
    std::copy(v.begin(), v.end(), out.v.data().begin());
    return out;
  }

  /// c^H A c summed over modes with Parseval weights.
  double quadratic(const std::vector<CVec>& a, const std::vector<CVec>& b,
                   SpMat ModeSpace::*mat) const {
    double s = 0;
    for (int m = 0; m <= m_max_ && m < static_cast<int>(a.size()); ++m) {
      const SpMat& A = modes_[m].*mat;
      s += mode_weight(m) * a[m].dot(A * b[m]).real();
    }
    return s;
  }

 private:
  DomainSpec dom_;
  SpaceKind kind_;
  int m_max_;
  std::vector<ModeSpace> modes_;
  std::vector<double> w_;
};

/// Orthogonal projection onto the discretely solenoidal, impermeable fields.
/// The removed part is a discrete pressure gradient (see `gradient`).
inline VelocityField project(const VelocityField& vel, SpaceKind kind = SpaceKind::Impermeable) {
  SolenoidalBasis basis(vel.domain(), kind);
  return basis.field(basis.coefficients(vel), vel.nu, vel.time());
}

inline VelocityField project(const VelocityField& vel, BcKind bc) {
  return project(vel, space_for(bc));
}

}  // namespace vislim
