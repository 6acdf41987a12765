#include "curvemax/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <numbers>

namespace curvemax {

namespace {

// The FFTW planner is not re-entrant; execution with a private plan is.
std::mutex planner_mutex;

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};

Spectrum transform(const std::complex<double>* in, std::size_t n, int sign) {
  const std::size_t total = n * n;
  std::unique_ptr<fftw_complex, FftwFree> buf(fftw_alloc_complex(total));
  if (!buf) throw std::bad_alloc();
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex);
    plan = fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buf.get(), buf.get(), sign,
                            FFTW_ESTIMATE);
  }
  std::memcpy(buf.get(), in, total * sizeof(fftw_complex));
  fftw_execute(plan);
  Spectrum out(total);
  std::memcpy(static_cast<void*>(out.data()), buf.get(), total * sizeof(fftw_complex));
  {
    std::lock_guard lock(planner_mutex);
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

std::vector<double> grid_frequencies(std::size_t n, double L) {
  std::vector<double> xi(n);
  const double step = 2.0 * std::numbers::pi / L;
  for (std::size_t k = 0; k < n; ++k) {
    const auto signed_k = static_cast<double>(k) - (k >= (n + 1) / 2 ? static_cast<double>(n) : 0.0);
    xi[k] = step * signed_k;
  }
  return xi;
}

Spectrum fft2(const Spectrum& data, std::size_t n) {
  if (data.size() != n * n) throw GridMismatchError("fft2: array is not n x n");
  return transform(data.data(), n, FFTW_FORWARD);
}

Spectrum ifft2(const Spectrum& s, std::size_t n) {
  if (s.size() != n * n) throw GridMismatchError("ifft2: array is not n x n");
  auto out = transform(s.data(), n, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(n * n);
  for (auto& v : out) v *= scale;
  return out;
}

Spectrum fft2(const SampledField2D& f) {
  Spectrum data(f.values.begin(), f.values.end());
  return fft2(data, f.n);
}

SampledField2D ifft2_real(const Spectrum& s, std::size_t n, double L) {
  const auto back = ifft2(s, n);
  SampledField2D out(n, L);
  for (std::size_t i = 0; i < back.size(); ++i) out.values[i] = back[i].real();
  return out;
}

SampledField2D apply_multiplier(const SampledField2D& f, const Spectrum& m) {
  if (m.size() != f.n * f.n)
    throw GridMismatchError("multiplier has " + std::to_string(m.size()) + " entries, field grid needs " +
                            std::to_string(f.n * f.n));
  auto s = fft2(f);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] *= m[i];
  return ifft2_real(s, f.n, f.L);
}

}  // namespace curvemax
