#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "vislim/fields/domain.hpp"

namespace vislim {

/// Nodal scalar on the channel grid, stored row-major with shape (Nx, Ny):
/// entry (i, j) lives at i*Ny + j.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const DomainSpec& dom, double time = 0.0)
      : dom_(dom), data_(dom.size(), 0.0), time_(time) {}

  template <class F>
  static ScalarField from_function(const DomainSpec& dom, F&& f, double time = 0.0) {
    ScalarField out(dom, time);
    for (int i = 0; i < dom.Nx; ++i)
      for (int j = 0; j < dom.Ny; ++j) out(i, j) = f(dom.x(i), dom.y(j));
    return out;
  }

  double& operator()(int i, int j) { return data_[static_cast<std::size_t>(i) * dom_.Ny + j]; }
  double operator()(int i, int j) const {
    return data_[static_cast<std::size_t>(i) * dom_.Ny + j];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const DomainSpec& domain() const { return dom_; }
  int nx() const { return dom_.Nx; }
  int ny() const { return dom_.Ny; }

  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  double max_abs() const {
    double m = 0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  ScalarField& operator+=(const ScalarField& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  ScalarField& operator-=(const ScalarField& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  ScalarField& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }
  /// this += a * o
  ScalarField& axpy(double a, const ScalarField& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += a * o.data_[k];
    return *this;
  }

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }

 private:
  DomainSpec dom_;
  std::vector<double> data_;
  double time_ = 0.0;
};

/// 2D velocity (u, v) with the viscosity of the run that produced it.
struct VelocityField {
  ScalarField u;
  ScalarField v;
  double nu = 0.0;

  VelocityField() = default;
  explicit VelocityField(const DomainSpec& dom, double nu_ = 0.0, double time = 0.0)
      : u(dom, time), v(dom, time), nu(nu_) {}
  VelocityField(ScalarField u_, ScalarField v_, double nu_ = 0.0)
      : u(std::move(u_)), v(std::move(v_)), nu(nu_) {}

  const DomainSpec& domain() const { return u.domain(); }
  double time() const { return u.time(); }
  void set_time(double t) {
    u.set_time(t);
    v.set_time(t);
  }
  bool all_finite() const { return u.all_finite() && v.all_finite(); }

  double max_speed() const {
    double m = 0;
    auto a = u.data();
    auto b = v.data();
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::hypot(a[k], b[k]));
    return m;
  }

  VelocityField& operator+=(const VelocityField& o) {
    u += o.u;
    v += o.v;
    return *this;
  }
  VelocityField& operator-=(const VelocityField& o) {
    u -= o.u;
    v -= o.v;
    return *this;
  }
  VelocityField& operator*=(double s) {
    u *= s;
    v *= s;
    return *this;
  }
  VelocityField& axpy(double a, const VelocityField& o) {
    u.axpy(a, o.u);
    v.axpy(a, o.v);
    return *this;
  }
  friend VelocityField operator+(VelocityField a, const VelocityField& b) { return a += b; }
  friend VelocityField operator-(VelocityField a, const VelocityField& b) { return a -= b; }
  friend VelocityField operator*(double s, VelocityField a) { return a *= s; }
};

struct VorticityField {
  ScalarField w;
};

/// Components of a field, for routines that treat scalars and vectors alike
/// (norms sum the squared components).
inline std::vector<const ScalarField*> components(const ScalarField& f) { return {&f}; }
inline std::vector<const ScalarField*> components(const VelocityField& f) { return {&f.u, &f.v}; }
inline std::vector<const ScalarField*> components(const VorticityField& f) { return {&f.w}; }

}  // namespace vislim
