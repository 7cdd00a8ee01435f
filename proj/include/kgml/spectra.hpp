#pragma once

// Bound states of the undeformed problem. Square integrability terminates the
// hypergeometric series of the closed-form wavefunction, which requires
//     1/2 - w + mu = -n,   w = g eta / sqrt(1 - eta^2),
// and solving for eta gives eta = N / sqrt(N^2 + g^2) with N = n + 1/2 + mu.

#include <cmath>
#include <sstream>
#include <string>

#include "kgml/errors.hpp"
#include "kgml/physcore.hpp"

namespace kgml {

/// Guard on the bisection interval (delta, 1 - delta); w diverges at eta = 1.
inline constexpr double kBracketGuard = 1e-9;

struct SpectrumLine {
  int n = 0;
  int Z = 0;  ///< 0 when the line was computed from g alone
  double eta = 0.0;
  double residual = 0.0;
};

namespace detail {

inline void require_subcritical(double g) {
  if (!(g >= 0.0)) throw OutOfDomainError("coupling must be nonnegative");
  if (g > 0.5) {
    std::ostringstream os;
    os.precision(17);
    os << "supercritical coupling g = " << g
       << " > 1/2: mu = sqrt(1/4 - g^2) is imaginary and the spectral condition 1/2 - w + mu = -n fails";
    throw SupercriticalError(os.str());
  }
}

inline void require_level(int n) {
  if (n < 0) throw OutOfDomainError("radial quantum number n must be >= 0");
}

}  // namespace detail

/// 1/2 - g eta / sqrt(1 - eta^2) + mu(g) + n. Strictly decreasing in eta.
inline double quantization_residual(double g, double eta, int n) {
  detail::require_subcritical(g);
  detail::require_level(n);
  if (!(eta > 0.0) || !(eta < 1.0)) throw OutOfDomainError("quantization_residual: eta must lie in (0, 1)");
  const double eps = std::sqrt((1.0 - eta) * (1.0 + eta));
  return 0.5 - g * eta / eps + mu_of_coupling(g).real() + n;
}

/// d/d eta of quantization_residual: -g / (1 - eta^2)^(3/2).
inline double quantization_residual_slope(double g, double eta) {
  const double e2 = (1.0 - eta) * (1.0 + eta);
  return -g / (e2 * std::sqrt(e2));
}

inline double energy_closed_form(double g, int n) {
  detail::require_subcritical(g);
  detail::require_level(n);
  const double N = n + 0.5 + mu_of_coupling(g).real();
  return N / std::hypot(N, g);
}

/// 1 - eta without the cancellation of the direct difference.
inline double binding_energy_closed_form(double g, int n) {
  detail::require_subcritical(g);
  detail::require_level(n);
  const double N = n + 0.5 + mu_of_coupling(g).real();
  const double r = std::hypot(N, g);
  return g * g / (r * (r + N));
}

/// Root of quantization_residual on (delta, 1 - delta) by bisection, polished
/// with Newton steps that are kept only while they reduce |residual|.
inline SpectrumLine solve_quantization(double g, int n) {
  detail::require_subcritical(g);
  detail::require_level(n);
  double lo = kBracketGuard, hi = 1.0 - kBracketGuard;
  const double flo = quantization_residual(g, lo, n);
  const double fhi = quantization_residual(g, hi, n);
  if (!(flo > 0.0 && fhi < 0.0)) {
    std::ostringstream os;
    os.precision(17);
    os << "solve_quantization: no sign change on (" << lo << ", " << hi << ") for g = " << g << ", n = " << n
       << " (residuals " << flo << ", " << fhi << ")";
    throw BracketingError(os.str());
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (quantization_residual(g, mid, n) > 0.0 ? lo : hi) = mid;
  }
  double eta = 0.5 * (lo + hi);
  double f = quantization_residual(g, eta, n);
  for (int it = 0; it < 4 && f != 0.0; ++it) {
    const double next = eta - f / quantization_residual_slope(g, eta);
    if (!(next > 0.0 && next < 1.0)) break;
    const double fn = quantization_residual(g, next, n);
    if (!(std::abs(fn) < std::abs(f))) break;
    eta = next;
    f = fn;
  }
  return {n, 0, eta, f};
}

inline SpectrumLine solve_quantization(int Z, double alpha, int n) {
  if (Z <= 0) throw OutOfDomainError("Z must be a positive integer");
  SpectrumLine line = solve_quantization(Z * alpha, n);
  line.Z = Z;
  return line;
}

}  // namespace kgml
