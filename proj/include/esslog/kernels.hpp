#pragma once

#include <cstddef>
#include <string>

namespace esslog::kernels {

enum class Backend { Scalar, Avx2 };

bool avx2_available();

/// Active compute backend. Defaults to the widest one the CPU supports.
Backend active_backend();
const char* backend_name(Backend b);

/// Forces a backend. Returns false (and leaves the selection unchanged)
/// when the requested backend is not available on this CPU.
bool set_backend(Backend b);
bool set_backend_by_name(const std::string& name); // "auto" | "scalar" | "avx2"

/// Split accumulation result in integrand-unit * seconds.
struct SplitAccum {
  double charge = 0.0;
  double discharge = 0.0;
};

enum class Integrand { Current, Power };

/// Charge/discharge split composite trapezoid over n samples (n-1 intervals).
///
/// The integrand f is I (Current) or I*V (Power), piecewise linear between
/// samples. An interval whose current changes sign is split at the linear
/// zero crossing of I, with f taken as 0 there, so the charge/discharge
/// decomposition is exact for piecewise-linear profiles and additive across
/// sample instants. Intervals with dt <= 0 or dt > gap_limit contribute
/// nothing (data holes are not integrated across).
SplitAccum split_trapezoid(const double* t, const float* current, const float* voltage,
                           std::size_t n, Integrand kind, double gap_limit);

/// Per-phase-bin accumulators for the periodicity objective.
struct BinMoments {
  double count = 0.0;
  double sum = 0.0;
  double sumsq = 0.0;
};

/// Folds v into nbins phase bins of the given period after removing an
/// affine clock shift: bin(k) = floor(wrap(phase0[k] - shift*u[k]) * nbins/period).
///
/// phase0[k] must lie in [0, period) and |shift| <= period, so a single
/// conditional wrap suffices. Bin moments accumulate in sample order; the
/// scalar and AVX2 paths use the same fused-multiply-add arithmetic and give
/// bit-identical results.
void phase_fold(const float* phase0, const float* u, const float* v, std::size_t n,
                float shift, float period, int nbins, BinMoments* out);

namespace detail {

SplitAccum split_trapezoid_scalar(const double* t, const float* current, const float* voltage,
                                  std::size_t n, Integrand kind, double gap_limit);
void phase_fold_scalar(const float* phase0, const float* u, const float* v, std::size_t n,
                       float shift, float period, int nbins, BinMoments* out);

#if defined(__x86_64__) || defined(_M_X64)
SplitAccum split_trapezoid_avx2(const double* t, const float* current, const float* voltage,
                                std::size_t n, Integrand kind, double gap_limit);
void phase_fold_avx2(const float* phase0, const float* u, const float* v, std::size_t n,
                     float shift, float period, int nbins, BinMoments* out);
#endif

} // namespace detail

} // namespace esslog::kernels
