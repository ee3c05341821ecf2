#include <doctest.h>

#include <cmath>
#include <vector>

#include "esslog/kernels.hpp"
#include "esslog/synth.hpp"
#include "helpers.hpp"

using namespace esslog;
using kernels::Backend;

namespace {

struct RandomArrays {
  std::vector<double> t;
  std::vector<float> current;
  std::vector<float> voltage;
};

RandomArrays random_arrays(std::size_t n, std::uint64_t seed, bool with_gaps) {
  RandomArrays a;
  SplitMix64 rng(seed);
  double t = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    t += with_gaps && rng.uniform() < 0.01 ? rng.uniform(700.0, 4000.0) : rng.uniform(5.0, 30.0);
    a.t.push_back(t);
    a.current.push_back(static_cast<float>(rng.uniform(-20.0, 20.0)));
    a.voltage.push_back(static_cast<float>(rng.uniform(48.0, 56.0)));
  }
  return a;
}

} // namespace

TEST_CASE("split trapezoid: analytic interval cases") {
  // constant charge
  std::vector<double> t{0, 3600, 7200};
  std::vector<float> i{5, 5, 5};
  std::vector<float> v{50, 50, 50};
  auto r = kernels::detail::split_trapezoid_scalar(t.data(), i.data(), v.data(), 3,
                                                   kernels::Integrand::Current, 1e18);
  CHECK(r.charge == doctest::Approx(36000.0));
  CHECK(r.discharge == doctest::Approx(0.0));

  // symmetric sign change splits 50/50 at the crossing
  t = {0, 7200};
  i = {10, -10};
  v = {50, 50};
  r = kernels::detail::split_trapezoid_scalar(t.data(), i.data(), v.data(), 2,
                                              kernels::Integrand::Current, 1e18);
  CHECK(r.charge == doctest::Approx(18000.0));
  CHECK(r.discharge == doctest::Approx(18000.0));

  // power integrand takes f = I*V with f = 0 at the current crossing
  r = kernels::detail::split_trapezoid_scalar(t.data(), i.data(), v.data(), 2,
                                              kernels::Integrand::Power, 1e18);
  CHECK(r.charge == doctest::Approx(0.5 * 3600.0 * 500.0));
  CHECK(r.discharge == doctest::Approx(0.5 * 3600.0 * 500.0));

  // gap exclusion drops the interval entirely
  r = kernels::detail::split_trapezoid_scalar(t.data(), i.data(), v.data(), 2,
                                              kernels::Integrand::Current, 600.0);
  CHECK(r.charge == 0.0);
  CHECK(r.discharge == 0.0);

  // fewer than two samples integrates to zero
  r = kernels::detail::split_trapezoid_scalar(t.data(), i.data(), v.data(), 1,
                                              kernels::Integrand::Current, 1e18);
  CHECK(r.charge == 0.0);
}

TEST_CASE("scalar split matches the independent antiderivative oracle") {
  SplitMix64 rng(0x5EED);
  std::vector<double> t, f;
  double at = 0.0;
  for (int i = 0; i < 400; ++i) {
    at += rng.uniform(2.0, 40.0);
    t.push_back(at);
    f.push_back(rng.uniform(-15.0, 15.0));
  }
  std::vector<float> ff(f.begin(), f.end());
  std::vector<double> fd(ff.begin(), ff.end()); // quantized copy for the oracle
  std::vector<float> ones(ff.size(), 1.0f);
  const auto got = kernels::detail::split_trapezoid_scalar(
      t.data(), ff.data(), ones.data(), t.size(), kernels::Integrand::Current, 1e18);
  const auto want = testutil::linear_split_exact(t, fd);
  CHECK(got.charge == doctest::Approx(want.positive).epsilon(1e-12));
  CHECK(got.discharge == doctest::Approx(want.negative).epsilon(1e-12));
}

TEST_CASE("avx2 split trapezoid is equivalent to the scalar reference") {
  if (!kernels::avx2_available()) {
    MESSAGE("AVX2 not available; skipping");
    return;
  }
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    for (bool gaps : {false, true}) {
      const auto a = random_arrays(10007, seed, gaps);
      for (auto kind : {kernels::Integrand::Current, kernels::Integrand::Power}) {
        const auto s = kernels::detail::split_trapezoid_scalar(
            a.t.data(), a.current.data(), a.voltage.data(), a.t.size(), kind, 600.0);
        const auto v = kernels::detail::split_trapezoid_avx2(
            a.t.data(), a.current.data(), a.voltage.data(), a.t.size(), kind, 600.0);
        CHECK(v.charge == doctest::Approx(s.charge).epsilon(1e-12));
        CHECK(v.discharge == doctest::Approx(s.discharge).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("phase fold: scalar and avx2 are bit-identical") {
  if (!kernels::avx2_available()) {
    MESSAGE("AVX2 not available; skipping");
    return;
  }
  SplitMix64 rng(0xF01D);
  const std::size_t n = 20011;
  std::vector<float> phase0(n), u(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    phase0[i] = static_cast<float>(rng.uniform(0.0, 86400.0));
    u[i] = static_cast<float>(rng.uniform());
    v[i] = static_cast<float>(rng.uniform(48.0, 56.0));
  }
  for (float shift : {-21600.0f, -607.5f, 0.0f, 60.0f, 21600.0f}) {
    std::vector<kernels::BinMoments> a(96), b(96);
    kernels::detail::phase_fold_scalar(phase0.data(), u.data(), v.data(), n, shift, 86400.0f, 96,
                                       a.data());
    kernels::detail::phase_fold_avx2(phase0.data(), u.data(), v.data(), n, shift, 86400.0f, 96,
                                     b.data());
    for (int bin = 0; bin < 96; ++bin) {
      CHECK(a[bin].count == b[bin].count); // exact, not approximate
      CHECK(a[bin].sum == b[bin].sum);
      CHECK(a[bin].sumsq == b[bin].sumsq);
    }
  }
}

TEST_CASE("phase fold bins cover every sample exactly once") {
  SplitMix64 rng(0xAB);
  const std::size_t n = 5000;
  std::vector<float> phase0(n), u(n), v(n, 1.0f);
  for (std::size_t i = 0; i < n; ++i) {
    phase0[i] = static_cast<float>(rng.uniform(0.0, 86400.0));
    u[i] = static_cast<float>(rng.uniform());
  }
  std::vector<kernels::BinMoments> bins(96);
  kernels::phase_fold(phase0.data(), u.data(), v.data(), n, 1234.0f, 86400.0f, 96, bins.data());
  double total = 0.0;
  for (const auto& b : bins) total += b.count;
  CHECK(total == doctest::Approx(static_cast<double>(n)));
}

TEST_CASE("backend selection honors availability") {
  const Backend original = kernels::active_backend();
  CHECK(kernels::set_backend(Backend::Scalar));
  CHECK(kernels::active_backend() == Backend::Scalar);
  CHECK(kernels::set_backend_by_name("auto"));
  if (kernels::avx2_available()) {
    CHECK(kernels::active_backend() == Backend::Avx2);
    CHECK(kernels::set_backend_by_name("avx2"));
  } else {
    CHECK(kernels::active_backend() == Backend::Scalar);
    CHECK(!kernels::set_backend_by_name("avx2"));
  }
  CHECK(!kernels::set_backend_by_name("quantum"));
  kernels::set_backend(original);
}
