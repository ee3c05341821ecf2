// AVX2/FMA variants of the accumulation kernels. This translation unit is
// compiled with -mavx2 -mfma and entered only after a runtime cpuid check.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "esslog/kernels.hpp"

namespace esslog::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

} // namespace

SplitAccum split_trapezoid_avx2(const double* t, const float* current, const float* voltage,
                                std::size_t n, Integrand kind, double gap_limit) {
  SplitAccum acc;
  if (n < 2) return acc;
  const bool power = kind == Integrand::Power;
  const std::size_t intervals = n - 1;

  const __m256d zero = _mm256_setzero_pd();
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d gap = _mm256_set1_pd(gap_limit);
  __m256d acc_c = zero;
  __m256d acc_d = zero;

  std::size_t i = 0;
  for (; i + 4 <= intervals; i += 4) {
    const __m256d t0 = _mm256_loadu_pd(t + i);
    const __m256d t1 = _mm256_loadu_pd(t + i + 1);
    const __m256d h = _mm256_sub_pd(t1, t0);

    // valid interval: 0 < h <= gap_limit
    const __m256d ok =
        _mm256_and_pd(_mm256_cmp_pd(h, zero, _CMP_GT_OQ), _mm256_cmp_pd(h, gap, _CMP_LE_OQ));

    const __m256d a = _mm256_cvtps_pd(_mm_loadu_ps(current + i));
    const __m256d b = _mm256_cvtps_pd(_mm_loadu_ps(current + i + 1));
    __m256d f0 = a;
    __m256d f1 = b;
    if (power) {
      f0 = _mm256_mul_pd(f0, _mm256_cvtps_pd(_mm_loadu_ps(voltage + i)));
      f1 = _mm256_mul_pd(f1, _mm256_cvtps_pd(_mm_loadu_ps(voltage + i + 1)));
    }

    const __m256d cross = _mm256_cmp_pd(_mm256_mul_pd(a, b), zero, _CMP_LT_OQ);
    // theta lanes with a == b never satisfy cross, so the division result is
    // discarded by the blend even when it is inf/NaN.
    const __m256d theta = _mm256_div_pd(a, _mm256_sub_pd(a, b));
    const __m256d w0 = _mm256_blendv_pd(one, theta, cross);
    const __m256d w1 = _mm256_blendv_pd(one, _mm256_sub_pd(one, theta), cross);

    const __m256d half_h = _mm256_and_pd(_mm256_mul_pd(half, h), ok);
    const __m256d pos = _mm256_fmadd_pd(w0, _mm256_max_pd(f0, zero),
                                        _mm256_mul_pd(w1, _mm256_max_pd(f1, zero)));
    const __m256d neg = _mm256_fmadd_pd(w0, _mm256_max_pd(_mm256_sub_pd(zero, f0), zero),
                                        _mm256_mul_pd(w1, _mm256_max_pd(_mm256_sub_pd(zero, f1), zero)));
    acc_c = _mm256_fmadd_pd(half_h, pos, acc_c);
    acc_d = _mm256_fmadd_pd(half_h, neg, acc_d);
  }

  acc.charge = hsum(acc_c);
  acc.discharge = hsum(acc_d);

  // scalar tail
  for (; i < intervals; ++i) {
    const double h = t[i + 1] - t[i];
    if (!(h > 0.0) || h > gap_limit) continue;
    const double a = current[i];
    const double b = current[i + 1];
    const double f0 = power ? a * static_cast<double>(voltage[i]) : a;
    const double f1 = power ? b * static_cast<double>(voltage[i + 1]) : b;
    double w0 = 1.0, w1 = 1.0;
    if (a * b < 0.0) {
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

void phase_fold_avx2(const float* phase0, const float* u, const float* v, std::size_t n,
                     float shift, float period, int nbins, BinMoments* out) {
  const __m256 per = _mm256_set1_ps(period);
  const __m256 neg_shift = _mm256_set1_ps(-shift);
  const __m256 inv_width = _mm256_set1_ps(static_cast<float>(nbins) / period);
  const __m256 zero = _mm256_setzero_ps();
  const __m256i bin_max = _mm256_set1_epi32(nbins - 1);
  const __m256i bin_min = _mm256_setzero_si256();

  alignas(32) int idx[8];
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    __m256 ph = _mm256_fmadd_ps(neg_shift, _mm256_loadu_ps(u + k), _mm256_loadu_ps(phase0 + k));
    const __m256 lo = _mm256_cmp_ps(ph, zero, _CMP_LT_OQ);
    ph = _mm256_add_ps(ph, _mm256_and_ps(lo, per));
    const __m256 hi = _mm256_cmp_ps(ph, per, _CMP_GE_OQ);
    ph = _mm256_sub_ps(ph, _mm256_and_ps(hi, per));
    __m256i b = _mm256_cvttps_epi32(_mm256_mul_ps(ph, inv_width));
    b = _mm256_min_epi32(_mm256_max_epi32(b, bin_min), bin_max);
    _mm256_store_si256(reinterpret_cast<__m256i*>(idx), b);
    for (int lane = 0; lane < 8; ++lane) {
      BinMoments& m = out[idx[lane]];
      const double val = v[k + lane];
      m.count += 1.0;
      m.sum += val;
      m.sumsq += val * val;
    }
  }

  const float inv_w = static_cast<float>(nbins) / period;
  for (; k < n; ++k) {
    float ph = std::fmaf(-shift, u[k], phase0[k]);
    if (ph < 0.0f) ph += period;
    if (ph >= period) ph -= period;
    int b = static_cast<int>(ph * inv_w);
    b = std::clamp(b, 0, nbins - 1);
    BinMoments& m = out[b];
    const double val = v[k];
    m.count += 1.0;
    m.sum += val;
    m.sumsq += val * val;
  }
}

} // namespace esslog::kernels::detail

#endif // x86_64
