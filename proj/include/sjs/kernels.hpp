#pragma once

#include <span>

// Dense per-cell vector kernels used by the dual engine. Every kernel has a
// portable scalar reference and an AVX2 variant; the variant is picked once
// at first use from the CPU features unless SJS_SIMD=scalar is set.
namespace sjs::kernels {

enum class Isa { kScalar, kAvx2 };

const char* to_string(Isa isa);
bool avx2_available();
Isa active_isa();
// Overrides the dispatch (tests). Requesting AVX2 without CPU support throws.
void force_isa(Isa isa);

// lambda = max(0, lambda + step * g)
void project_step(std::span<double> lambda, std::span<const double> g, double step);
double squared_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

// Per cell: r = load - cap; slack z = -r when r < 0 and rho > lambda, else 0;
// g = r + z. Writes g and returns sum(lambda * g + rho * |g|).
double surrogate_cells(std::span<const double> load, std::span<const double> cap,
                       std::span<const double> lambda, double rho, std::span<double> g);

namespace scalar {
void project_step(std::span<double> lambda, std::span<const double> g, double step);
double squared_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
double surrogate_cells(std::span<const double> load, std::span<const double> cap,
                       std::span<const double> lambda, double rho, std::span<double> g);
}  // namespace scalar

namespace avx2 {
void project_step(std::span<double> lambda, std::span<const double> g, double step);
double squared_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
double surrogate_cells(std::span<const double> load, std::span<const double> cap,
                       std::span<const double> lambda, double rho, std::span<double> g);
}  // namespace avx2

}  // namespace sjs::kernels
