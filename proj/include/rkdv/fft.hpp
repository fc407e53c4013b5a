#pragma once

// Thin thread-safe wrapper over FFTW3 real transforms.
//
// Plans are created once per shape under a global mutex and executed through
// the new-array interface, which FFTW guarantees to be reentrant. All plans
// use FFTW_ESTIMATE so results do not depend on timing measurements.

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace rkdv::fft {

using Complex = std::complex<double>;

namespace detail {

enum class Kind { r2c_1d, c2r_1d, r2c_2d, c2r_2d };

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(Kind kind, int n0, int n1 = 0) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(kind, n0, n1);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    const std::size_t real_size = kind == Kind::r2c_2d || kind == Kind::c2r_2d
                                      ? std::size_t(n0) * std::size_t(n1)
                                      : std::size_t(n0);
    const std::size_t spec_size = kind == Kind::r2c_2d || kind == Kind::c2r_2d
                                      ? std::size_t(n0) * std::size_t(n1 / 2 + 1)
                                      : std::size_t(n0 / 2 + 1);
    std::vector<double> r(real_size);
    std::vector<Complex> c(spec_size);
    auto* cp = reinterpret_cast<fftw_complex*>(c.data());

    fftw_plan plan = nullptr;
    switch (kind) {
      case Kind::r2c_1d: plan = fftw_plan_dft_r2c_1d(n0, r.data(), cp, flags); break;
      case Kind::c2r_1d: plan = fftw_plan_dft_c2r_1d(n0, cp, r.data(), flags); break;
      case Kind::r2c_2d: plan = fftw_plan_dft_r2c_2d(n0, n1, r.data(), cp, flags); break;
      case Kind::c2r_2d: plan = fftw_plan_dft_c2r_2d(n0, n1, cp, r.data(), flags); break;
    }
    if (plan == nullptr) throw std::runtime_error("fftw: plan creation failed");
    plans_.emplace(key, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::tuple<Kind, int, int>, fftw_plan> plans_;
};

}  // namespace detail

/// Unnormalized forward transform; returns n/2+1 coefficients.
inline std::vector<Complex> forward(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  fftw_plan plan = detail::PlanCache::instance().get(detail::Kind::r2c_1d, n);
  std::vector<double> in(x.begin(), x.end());
  std::vector<Complex> out(std::size_t(n / 2 + 1));
  fftw_execute_dft_r2c(plan, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

/// Inverse of forward(), including the 1/n normalization.
inline std::vector<double> inverse(std::span<const Complex> c, int n) {
  if (c.size() != std::size_t(n / 2 + 1)) throw std::invalid_argument("fft::inverse: size mismatch");
  fftw_plan plan = detail::PlanCache::instance().get(detail::Kind::c2r_1d, n);
  std::vector<Complex> in(c.begin(), c.end());  // c2r overwrites its input
  std::vector<double> out(static_cast<std::size_t>(n));
  fftw_execute_dft_c2r(plan, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double scale = 1.0 / n;
  for (double& v : out) v *= scale;
  return out;
}

/// Unnormalized 2-D forward transform of a row-major n0 x n1 array; returns
/// n0 x (n1/2+1) coefficients.
inline std::vector<Complex> forward_2d(std::span<const double> x, int n0, int n1) {
  if (x.size() != std::size_t(n0) * std::size_t(n1)) throw std::invalid_argument("fft::forward_2d: size mismatch");
  fftw_plan plan = detail::PlanCache::instance().get(detail::Kind::r2c_2d, n0, n1);
  std::vector<double> in(x.begin(), x.end());
  std::vector<Complex> out(std::size_t(n0) * std::size_t(n1 / 2 + 1));
  fftw_execute_dft_r2c(plan, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

}  // namespace rkdv::fft
