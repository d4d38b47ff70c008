#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace vislim {

using cplx = std::complex<double>;

namespace detail {

// FFTW planning is not thread-safe; execution on fresh arrays is.  Plans are
// built once per shape under a lock and reused through the new-array API.
// FFTW_UNALIGNED keeps results independent of buffer alignment.
enum class PlanKind { RowR2C, RowC2R, BoxR2C, BoxC2R };

inline std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

inline fftw_plan cached_plan(PlanKind kind, int n0, int n1) {
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto key = std::make_tuple(static_cast<int>(kind), n0, n1);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  const int nh = n0 / 2 + 1;
  fftw_plan p = nullptr;
  switch (kind) {
    case PlanKind::RowR2C: {
      // n0 = transform length along x, n1 = number of interleaved columns.
      std::vector<double> in(static_cast<std::size_t>(n0) * n1);
      std::vector<cplx> out(static_cast<std::size_t>(nh) * n1);
      int n[] = {n0};
      p = fftw_plan_many_dft_r2c(1, n, n1, in.data(), nullptr, n1, 1,
                                 reinterpret_cast<fftw_complex*>(out.data()), nullptr, n1, 1,
                                 flags);
      break;
    }
    case PlanKind::RowC2R: {
      std::vector<cplx> in(static_cast<std::size_t>(nh) * n1);
      std::vector<double> out(static_cast<std::size_t>(n0) * n1);
      int n[] = {n0};
      p = fftw_plan_many_dft_c2r(1, n, n1, reinterpret_cast<fftw_complex*>(in.data()), nullptr,
                                 n1, 1, out.data(), nullptr, n1, 1, flags | FFTW_DESTROY_INPUT);
      break;
    }
    case PlanKind::BoxR2C: {
      std::vector<double> in(static_cast<std::size_t>(n0) * n1);
      std::vector<cplx> out(static_cast<std::size_t>(n0) * (n1 / 2 + 1));
      p = fftw_plan_dft_r2c_2d(n0, n1, in.data(), reinterpret_cast<fftw_complex*>(out.data()),
                               flags);
      break;
    }
    case PlanKind::BoxC2R: {
      std::vector<cplx> in(static_cast<std::size_t>(n0) * (n1 / 2 + 1));
      std::vector<double> out(static_cast<std::size_t>(n0) * n1);
      p = fftw_plan_dft_c2r_2d(n0, n1, reinterpret_cast<fftw_complex*>(in.data()), out.data(),
                               flags | FFTW_DESTROY_INPUT);
      break;
    }
  }
  cache.emplace(key, p);
  return p;
}

}  // namespace detail

/// Unnormalized r2c transform along x of an (Nx, Ny) row-major array.
/// Output has shape (Nx/2+1, Ny): coefficient of mode m in column j at m*Ny+j.
inline std::vector<cplx> fft_x(const std::vector<double>& in, int Nx, int Ny) {
  std::vector<cplx> out(static_cast<std::size_t>(Nx / 2 + 1) * Ny);
  fftw_plan p = detail::cached_plan(detail::PlanKind::RowR2C, Nx, Ny);
  fftw_execute_dft_r2c(p, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

/// Inverse of fft_x, including the 1/Nx factor.
inline std::vector<double> ifft_x(std::vector<cplx> in, int Nx, int Ny) {
  std::vector<double> out(static_cast<std::size_t>(Nx) * Ny);
  fftw_plan p = detail::cached_plan(detail::PlanKind::RowC2R, Nx, Ny);
  fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double s = 1.0 / Nx;
  for (double& v : out) v *= s;
  return out;
}

/// Unnormalized 2D r2c transform of an (n0, n1) row-major array; output (n0, n1/2+1).
inline std::vector<cplx> fft_2d(const std::vector<double>& in, int n0, int n1) {
  std::vector<cplx> out(static_cast<std::size_t>(n0) * (n1 / 2 + 1));
  fftw_plan p = detail::cached_plan(detail::PlanKind::BoxR2C, n0, n1);
  fftw_execute_dft_r2c(p, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

/// Inverse of fft_2d, including the 1/(n0*n1) factor.
inline std::vector<double> ifft_2d(std::vector<cplx> in, int n0, int n1) {
  std::vector<double> out(static_cast<std::size_t>(n0) * n1);
  fftw_plan p = detail::cached_plan(detail::PlanKind::BoxC2R, n0, n1);
  fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double s = 1.0 / (static_cast<double>(n0) * n1);
  for (double& v : out) v *= s;
  return out;
}

/// Signed integer wavenumber of FFT index m for length n.
inline int fft_freq(int m, int n) { return m <= n / 2 ? m : m - n; }

}  // namespace vislim
