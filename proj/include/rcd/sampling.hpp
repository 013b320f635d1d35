#pragma once

// Low-discrepancy sample generators for the certification sweeps. Halton
// points in prime bases are deterministic in the sequence index, so a "seed"
// is just an offset into the sequence: the same seed reproduces the same
// byte-identical sample set on any platform.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "rcd/errors.hpp"

namespace rcd {

inline double halton(std::uint64_t i, unsigned base) {
  double f = 1.0, r = 0.0;
  ++i;  // index 0 maps to the first nonzero point
  while (i > 0) {
    f /= base;
    r += f * static_cast<double>(i % base);
    i /= base;
  }
  return r;
}

inline constexpr unsigned kHaltonPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                             23, 29, 31, 37, 41, 43, 47, 53};

// One Halton point in [0,1)^dims.
inline std::vector<double> halton_point(std::uint64_t index, unsigned dims) {
  if (dims > sizeof(kHaltonPrimes) / sizeof(kHaltonPrimes[0]))
    throw InvalidParameterError("halton_point: too many dimensions");
  std::vector<double> u(dims);
  for (unsigned d = 0; d < dims; ++d) u[d] = halton(index, kHaltonPrimes[d]);
  return u;
}

// Area-uniform point of the disc of the given radius.
inline std::complex<double> disc_point(double u_r, double u_th, double radius) {
  double r = radius * std::sqrt(u_r);
  double th = 6.283185307179586 * u_th;
  return {r * std::cos(th), r * std::sin(th)};
}

// Area-uniform point of the annulus (radius/2, radius).
inline std::complex<double> annulus_point(double u_r, double u_th,
                                          double radius) {
  double r = radius * std::sqrt(0.25 + 0.75 * u_r);
  double th = 6.283185307179586 * u_th;
  return {r * std::cos(th), r * std::sin(th)};
}

// Polydisc sample around a center, radii per coordinate. Consumes 2n Halton
// dims at the given sequence index.
inline std::vector<std::complex<double>> polydisc_point(
    std::uint64_t index, std::uint64_t seed,
    const std::vector<std::complex<double>>& center,
    const std::vector<double>& radii) {
  unsigned n = static_cast<unsigned>(center.size());
  std::vector<double> u = halton_point(seed + index, 2 * n);
  std::vector<std::complex<double>> z(n);
  for (unsigned s = 0; s < n; ++s)
    z[s] = center[s] + disc_point(u[2 * s], u[2 * s + 1], radii[s]);
  return z;
}

// A point of the closure of the domain, carried as (z, r) with r <= 0 the
// value of the defining function. r is tracked exactly rather than recovered
// from coordinates: at certified strip depths the boundary distance is many
// orders below the roundoff of Re z_{n+1}.
struct BoundaryPoint {
  std::vector<std::complex<double>> z;
  double r = 0.0;
};

}  // namespace rcd
