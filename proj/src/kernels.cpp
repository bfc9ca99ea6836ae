#include "sjs/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define SJS_X86 1
#endif

namespace sjs::kernels {

namespace scalar {

void project_step(std::span<double> lambda, std::span<const double> g, double step) {
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    const double v = lambda[i] + step * g[i];
    lambda[i] = v > 0.0 ? v : 0.0;
  }
}

double squared_norm(std::span<const double> v) { return dot(v, v); }

double dot(std::span<const double> a, std::span<const double> b) {
  // Four interleaved partial sums, the same association as the vector path.
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= a.size(); i += 4) {
    for (int k = 0; k < 4; ++k) acc[k] += a[i + k] * b[i + k];
  }
  double total = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  for (; i < a.size(); ++i) total += a[i] * b[i];
  return total;
}

double surrogate_cells(std::span<const double> load, std::span<const double> cap,
                       std::span<const double> lambda, double rho, std::span<double> g) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  auto cell = [&](std::size_t i) {
    const double r = load[i] - cap[i];
    const double v = (r < 0.0 && rho > lambda[i]) ? 0.0 : r;
    g[i] = v;
    return lambda[i] * v + rho * std::fabs(v);
  };
  std::size_t i = 0;
  for (; i + 4 <= load.size(); i += 4) {
    for (int k = 0; k < 4; ++k) acc[k] += cell(i + k);
  }
  double total = (acc[0] + acc[2]) + (acc[1] + acc[3]);
  for (; i < load.size(); ++i) total += cell(i);
  return total;
}

}  // namespace scalar

#ifdef SJS_X86
namespace avx2 {

__attribute__((target("avx2"))) void project_step(std::span<double> lambda,
                                                  std::span<const double> g, double step) {
  const __m256d s = _mm256_set1_pd(step);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= lambda.size(); i += 4) {
    const __m256d v = _mm256_add_pd(_mm256_loadu_pd(&lambda[i]),
                                    _mm256_mul_pd(s, _mm256_loadu_pd(&g[i])));
    // max(v, 0) with the scalar tie rule: NaN and -0.0 map to 0.
    const __m256d keep = _mm256_cmp_pd(v, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(&lambda[i], _mm256_and_pd(keep, v));
  }
  for (; i < lambda.size(); ++i) {
    const double v = lambda[i] + step * g[i];
    lambda[i] = v > 0.0 ? v : 0.0;
  }
}

__attribute__((target("avx2"))) double dot(std::span<const double> a, std::span<const double> b) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= a.size(); i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(&a[i]), _mm256_loadu_pd(&b[i])));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
  for (; i < a.size(); ++i) total += a[i] * b[i];
  return total;
}

double squared_norm(std::span<const double> v) { return dot(v, v); }

__attribute__((target("avx2"))) double surrogate_cells(std::span<const double> load,
                                                       std::span<const double> cap,
                                                       std::span<const double> lambda, double rho,
                                                       std::span<double> g) {
  const __m256d vrho = _mm256_set1_pd(rho);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= load.size(); i += 4) {
    const __m256d r = _mm256_sub_pd(_mm256_loadu_pd(&load[i]), _mm256_loadu_pd(&cap[i]));
    const __m256d lam = _mm256_loadu_pd(&lambda[i]);
    const __m256d fill = _mm256_and_pd(_mm256_cmp_pd(r, zero, _CMP_LT_OQ),
                                       _mm256_cmp_pd(vrho, lam, _CMP_GT_OQ));
    const __m256d v = _mm256_andnot_pd(fill, r);
    _mm256_storeu_pd(&g[i], v);
    const __m256d term = _mm256_add_pd(_mm256_mul_pd(lam, v),
                                       _mm256_mul_pd(vrho, _mm256_andnot_pd(sign, v)));
    acc = _mm256_add_pd(acc, term);
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[2]) + (lanes[1] + lanes[3]);
  for (; i < load.size(); ++i) {
    const double r = load[i] - cap[i];
    const double v = (r < 0.0 && rho > lambda[i]) ? 0.0 : r;
    g[i] = v;
    total += lambda[i] * v + rho * std::fabs(v);
  }
  return total;
}

}  // namespace avx2
#else
namespace avx2 {
void project_step(std::span<double> l, std::span<const double> g, double s) { scalar::project_step(l, g, s); }
double squared_norm(std::span<const double> v) { return scalar::squared_norm(v); }
double dot(std::span<const double> a, std::span<const double> b) { return scalar::dot(a, b); }
double surrogate_cells(std::span<const double> load, std::span<const double> cap,
                       std::span<const double> lambda, double rho, std::span<double> g) {
  return scalar::surrogate_cells(load, cap, lambda, rho, g);
}
}  // namespace avx2
#endif

namespace {

std::atomic<int> g_isa{-1};

Isa detect() {
  if (const char* env = std::getenv("SJS_SIMD"); env && std::strcmp(env, "scalar") == 0) {
    return Isa::kScalar;
  }
  return avx2_available() ? Isa::kAvx2 : Isa::kScalar;
}

}  // namespace

const char* to_string(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

bool avx2_available() {
#ifdef SJS_X86
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() {
  int v = g_isa.load(std::memory_order_relaxed);
  if (v < 0) {
    v = static_cast<int>(detect());
    g_isa.store(v, std::memory_order_relaxed);
  }
  return static_cast<Isa>(v);
}

void force_isa(Isa isa) {
  if (isa == Isa::kAvx2 && !avx2_available()) throw std::runtime_error("AVX2 is not available");
  g_isa.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void project_step(std::span<double> lambda, std::span<const double> g, double step) {
  active_isa() == Isa::kAvx2 ? avx2::project_step(lambda, g, step)
                             : scalar::project_step(lambda, g, step);
}

double squared_norm(std::span<const double> v) {
  return active_isa() == Isa::kAvx2 ? avx2::squared_norm(v) : scalar::squared_norm(v);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return active_isa() == Isa::kAvx2 ? avx2::dot(a, b) : scalar::dot(a, b);
}

double surrogate_cells(std::span<const double> load, std::span<const double> cap,
                       std::span<const double> lambda, double rho, std::span<double> g) {
  return active_isa() == Isa::kAvx2 ? avx2::surrogate_cells(load, cap, lambda, rho, g)
                                    : scalar::surrogate_cells(load, cap, lambda, rho, g);
}

}  // namespace sjs::kernels
