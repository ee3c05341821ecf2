#include "esslog/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace esslog::kernels {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Backend g_backend = avx2_available() ? Backend::Avx2 : Backend::Scalar;

} // namespace

Backend active_backend() { return g_backend; }

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "scalar";
}

bool set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_available()) return false;
  g_backend = b;
  return true;
}

bool set_backend_by_name(const std::string& name) {
  if (name == "auto") return set_backend(avx2_available() ? Backend::Avx2 : Backend::Scalar);
  if (name == "scalar") return set_backend(Backend::Scalar);
  if (name == "avx2") return set_backend(Backend::Avx2);
  return false;
}

namespace detail {

SplitAccum split_trapezoid_scalar(const double* t, const float* current, const float* voltage,
                                  std::size_t n, Integrand kind, double gap_limit) {
  SplitAccum acc;
  if (n < 2) return acc;
  const bool power = kind == Integrand::Power;
  for (std::size_t i = 1; i < n; ++i) {
    const double h = t[i] - t[i - 1];
    if (!(h > 0.0) || h > gap_limit) continue;
    const double a = current[i - 1];
    const double b = current[i];
    const double f0 = power ? a * static_cast<double>(voltage[i - 1]) : a;
    const double f1 = power ? b * static_cast<double>(voltage[i]) : b;
    double w0 = 1.0, w1 = 1.0;
    if (a * b < 0.0) {
      // Sign change: split at the current zero crossing, f = 0 there.
      const double theta = a / (a - b);
      w0 = theta;
      w1 = 1.0 - theta;
    }
    const double half_h = 0.5 * h;
    acc.charge += half_h * (w0 * std::max(f0, 0.0) + w1 * std::max(f1, 0.0));
    acc.discharge += half_h * (w0 * std::max(-f0, 0.0) + w1 * std::max(-f1, 0.0));
  }
  return acc;
}

void phase_fold_scalar(const float* phase0, const float* u, const float* v, std::size_t n,
                       float shift, float period, int nbins, BinMoments* out) {
  const float inv_width = static_cast<float>(nbins) / period;
  const float neg_shift = -shift;
  for (std::size_t k = 0; k < n; ++k) {
    float ph = std::fmaf(neg_shift, u[k], phase0[k]);
    if (ph < 0.0f) ph += period;
    if (ph >= period) ph -= period;
    int b = static_cast<int>(ph * inv_width);
    b = std::clamp(b, 0, nbins - 1);
    const double val = v[k];
    out[b].count += 1.0;
    out[b].sum += val;
    out[b].sumsq += val * val;
  }
}

} // namespace detail

SplitAccum split_trapezoid(const double* t, const float* current, const float* voltage,
                           std::size_t n, Integrand kind, double gap_limit) {
#if defined(__x86_64__) || defined(_M_X64)
  if (g_backend == Backend::Avx2)
    return detail::split_trapezoid_avx2(t, current, voltage, n, kind, gap_limit);
#endif
  return detail::split_trapezoid_scalar(t, current, voltage, n, kind, gap_limit);
}

void phase_fold(const float* phase0, const float* u, const float* v, std::size_t n, float shift,
                float period, int nbins, BinMoments* out) {
#if defined(__x86_64__) || defined(_M_X64)
  if (g_backend == Backend::Avx2) {
    detail::phase_fold_avx2(phase0, u, v, n, shift, period, nbins, out);
    return;
  }
#endif
  detail::phase_fold_scalar(phase0, u, v, n, shift, period, nbins, out);
}

} // namespace esslog::kernels
