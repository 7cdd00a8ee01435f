#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "kgml/errors.hpp"
#include "kgml/fuchsian.hpp"
#include "kgml/physcore.hpp"

namespace kgml {

struct SeriesOptions {
  /// Stop once two consecutive terms fall below tol * |partial sum|.
  double tol = 1e-17;
  int max_terms = 10000;
  /// Distance to a nonpositive integer under which a or b terminates the series.
  double termination_tol = 1e-10;
};

namespace detail {

inline std::optional<int> as_nonpositive_integer(cplx v, double tol) {
  if (std::abs(v.imag()) > tol || v.real() > tol) return std::nullopt;
  const double n = std::round(-v.real());
  if (std::abs(v.real() + n) > tol) return std::nullopt;
  return static_cast<int>(n);
}

inline cplx hyp2f1_direct(cplx a, cplx b, cplx c, cplx z, const SeriesOptions& opts, std::optional<int> degree) {
  cplx term{1.0}, sum{1.0};
  if (degree) {
    for (int n = 0; n < *degree; ++n) {
      term *= (a + double(n)) * (b + double(n)) / ((c + double(n)) * double(n + 1)) * z;
      sum += term;
    }
    return sum;
  }
  int small = 0;
  for (int n = 0; n < opts.max_terms; ++n) {
    term *= (a + double(n)) * (b + double(n)) / ((c + double(n)) * double(n + 1)) * z;
    sum += term;
    small = std::abs(term) <= opts.tol * std::abs(sum) ? small + 1 : 0;
    if (small >= 2) return sum;
  }
  std::ostringstream os;
  os << "hyp2f1: series did not converge in " << opts.max_terms << " terms at z = " << z;
  throw ConvergenceError(os.str());
}

}  // namespace detail

/// Gauss hypergeometric function 2F1(a, b; c; z).
///
/// Uses the direct series for |z| < 1 or the Pfaff-transformed series for
/// |z/(z-1)| < 1, whichever argument is smaller. When a or b is a
/// nonpositive integer the series is summed as the exact polynomial for any z.
inline cplx hyp2f1(cplx a, cplx b, cplx c, cplx z, const SeriesOptions& opts = {}) {
  if (detail::as_nonpositive_integer(c, 1e-12)) {
    std::ostringstream os;
    os << "hyp2f1: c = " << c << " is a nonpositive integer (pole)";
    throw ParameterPoleError(os.str());
  }
  auto na = detail::as_nonpositive_integer(a, opts.termination_tol);
  auto nb = detail::as_nonpositive_integer(b, opts.termination_tol);
  if (na || nb) {
    if (na && (!nb || *na <= *nb)) return detail::hyp2f1_direct(cplx(-*na), b, c, z, opts, *na);
    return detail::hyp2f1_direct(a, cplx(-*nb), c, z, opts, *nb);
  }
  if (z == cplx{}) return 1.0;
  const double direct = std::abs(z);
  const double pfaff = z == cplx(1.0) ? std::numeric_limits<double>::infinity() : std::abs(z / (z - 1.0));
  if (direct < 1.0 && direct <= pfaff) return detail::hyp2f1_direct(a, b, c, z, opts, std::nullopt);
  if (pfaff < 1.0) return std::pow(1.0 - z, -a) * hyp2f1(a, c - b, c, z / (z - 1.0), opts);
  std::ostringstream os;
  os << "hyp2f1: z = " << z << " is outside both |z| < 1 and |z/(z-1)| < 1";
  throw OutOfDomainError(os.str());
}

/// 2F1 with its first two z-derivatives.
inline fuchsian::SeriesValue hyp2f1_derivatives(cplx a, cplx b, cplx c, cplx z, const SeriesOptions& opts = {}) {
  // Snap terminating parameters so a b / c is exactly zero for a constant
  // polynomial and the shifted parameters still terminate.
  if (auto n = detail::as_nonpositive_integer(a, opts.termination_tol)) a = -double(*n);
  if (auto n = detail::as_nonpositive_integer(b, opts.termination_tol)) b = -double(*n);
  fuchsian::SeriesValue v;
  v.value = hyp2f1(a, b, c, z, opts);
  const cplx k1 = a * b / c;
  const cplx k2 = k1 * (a + 1.0) * (b + 1.0) / (c + 1.0);
  v.derivative = k1 == cplx{} ? cplx{} : k1 * hyp2f1(a + 1.0, b + 1.0, c + 1.0, z, opts);
  v.second_derivative = k2 == cplx{} ? cplx{} : k2 * hyp2f1(a + 2.0, b + 2.0, c + 2.0, z, opts);
  return v;
}

/// Parameters of the Heun equation in the form
///   f'' + (c/xi + e/(xi-1) + d/(xi-xi0)) f' + (a b xi + q)/(xi (xi-1)(xi-xi0)) f = 0.
/// Note the accessory-parameter sign: the numerator is a b xi + q.
struct HeunParams {
  cplx xi0, q, a, b, c, d, e;

  cplx fuchsian_residual() const { return a + b + 1.0 - (c + d + e); }

  void validate() const {
    const double scale = std::max({1.0, std::abs(a), std::abs(b), std::abs(c), std::abs(d), std::abs(e)});
    if (std::abs(fuchsian_residual()) > 1e-12 * scale)
      throw OutOfDomainError("HeunParams: a + b + 1 != c + d + e");
    if (std::abs(xi0) < 1e-14 || std::abs(xi0 - 1.0) < 1e-14)
      throw OutOfDomainError("HeunParams: xi0 must differ from 0 and 1");
  }
};

inline fuchsian::RationalCoeffODE heun_ode(const HeunParams& p) {
  const CPoly x = CPoly::identity();
  const CPoly xm1{-1.0, 1.0};
  const CPoly xmx0{-p.xi0, 1.0};
  CPoly a1 = p.c * (xm1 * xmx0) + p.e * (x * xmx0) + p.d * (x * xm1);
  return fuchsian::RationalCoeffODE({{x, 1}, {xm1, 1}, {xmx0, 1}}, a1, CPoly{p.q, p.a * p.b});
}

/// Local Heun function regular at xi = 0, normalized to 1 there, with
/// derivatives. Summed from the three-term recurrence
///   xi0 (n+1)(n+c) c_{n+1} = [(1+xi0) n(n-1) + (c(1+xi0) + e xi0 + d) n - q] c_n
///                            - [(n-1)(n-2+c+d+e) + a b] c_{n-1}.
inline fuchsian::SeriesValue heun_local_derivatives(const HeunParams& p, cplx xi, const SeriesOptions& opts = {}) {
  p.validate();
  if (detail::as_nonpositive_integer(p.c, 1e-12))
    throw ParameterPoleError("heun_local: c is a nonpositive integer; the exponent-0 branch does not exist");
  const double radius = std::min(1.0, std::abs(p.xi0));
  if (!(std::abs(xi) < radius)) {
    std::ostringstream os;
    os << "heun_local: |xi| = " << std::abs(xi) << " is outside the disk |xi| < " << radius;
    throw OutOfDomainError(os.str());
  }
  fuchsian::SeriesValue v;
  v.value = 1.0;
  if (xi == cplx{}) {
    const cplx c1 = -p.q / (p.xi0 * p.c);
    v.derivative = c1;
    const cplx lin = p.c * (1.0 + p.xi0) + p.e * p.xi0 + p.d;
    v.second_derivative = 2.0 * ((lin - p.q) * c1 - p.a * p.b) / (p.xi0 * 2.0 * (1.0 + p.c));
    return v;
  }
  const cplx lin = p.c * (1.0 + p.xi0) + p.e * p.xi0 + p.d;
  const cplx cde = p.c + p.d + p.e;
  cplx prev{0.0}, cur{1.0};
  cplx pw_prev2{0.0}, pw_prev1{0.0}, pw{1.0};  // xi^(n-2), xi^(n-1), xi^n
  int small = 0;
  for (int n = 0; n < opts.max_terms; ++n) {
    const double dn = n;
    const cplx next = (((1.0 + p.xi0) * dn * (dn - 1.0) + lin * dn - p.q) * cur -
                       ((dn - 1.0) * (dn - 2.0 + cde) + p.a * p.b) * prev) /
                      (p.xi0 * (dn + 1.0) * (dn + p.c));
    prev = cur;
    cur = next;
    pw_prev2 = pw_prev1;
    pw_prev1 = pw;
    pw *= xi;
    const double m = dn + 1.0;
    const cplx term = cur * pw;
    v.value += term;
    v.derivative += m * cur * pw_prev1;
    v.second_derivative += m * (m - 1.0) * cur * pw_prev2;
    small = std::abs(term) <= opts.tol * std::abs(v.value) ? small + 1 : 0;
    if (small >= 2) {
      v.error_estimate = std::abs(term);
      return v;
    }
  }
  throw ConvergenceError("heun_local: series did not converge");
}

inline cplx heun_local(const HeunParams& p, cplx xi, const SeriesOptions& opts = {}) {
  return heun_local_derivatives(p, xi, opts).value;
}

/// The local Heun solution continued along the straight segment from 0 to xi.
/// Inside half the disk this is heun_local; beyond it the solution is carried
/// by Taylor re-expansion at ordinary points, each step at most half the
/// distance to the nearest singular point.
inline fuchsian::SeriesValue heun_continued(const HeunParams& p, cplx xi, const SeriesOptions& opts = {}) {
  const double r0 = std::min(1.0, std::abs(p.xi0));
  if (std::abs(xi) <= 0.5 * r0) return heun_local_derivatives(p, xi, opts);

  const auto ode = heun_ode(p);
  std::vector<cplx> sing;
  for (const auto& sp : fuchsian::singular_points(ode))
    if (!sp.location.infinite) sing.push_back(sp.location.z);
  const cplx dir = xi / std::abs(xi);
  for (const cplx s : sing) {
    // Singular points on the open segment (0, xi] block the path.
    const cplx rel = s / dir;
    if (std::abs(rel.imag()) < 1e-12 && rel.real() > 1e-12 && rel.real() <= std::abs(xi) + 1e-12) {
      std::ostringstream os;
      os << "heun_continued: singular point " << s << " lies on the path from 0 to " << xi;
      throw OutOfDomainError(os.str());
    }
  }
  cplx z = 0.5 * r0 * dir;
  auto start = heun_local_derivatives(p, z, opts);
  cplx w = start.value, dw = start.derivative;
  double err = start.error_estimate;
  fuchsian::SeriesValue v = start;
  for (int step = 0; step < 10000; ++step) {
    double dist = std::numeric_limits<double>::infinity();
    for (const cplx s : sing) dist = std::min(dist, std::abs(s - z));
    const double remaining = std::abs(xi - z);
    if (remaining == 0.0) break;
    const double h = std::min(remaining, 0.5 * dist);
    const cplx target = h == remaining ? xi : z + h * dir;
    const auto series = fuchsian::ordinary_point_series(ode, z, w, dw, 60);
    v = fuchsian::evaluate(series, target);
    err += v.error_estimate;
    z = target;
    w = v.value;
    dw = v.derivative;
    if (target == xi) break;
  }
  v.error_estimate = err;
  return v;
}

/// Value and derivative of a function of one variable.
struct ValueAndDerivative {
  cplx value;
  cplx derivative;
};

/// Closed-form momentum-space wavefunction of the undeformed problem, A = 1:
///   psi(u) = u^-1 (1 + i u/eps)^(-3/2-mu) 2F1(3/2+mu, 1/2-w+mu; 2mu+1; 2/(1 + i u/eps)).
inline ValueAndDerivative psi_ordinary_derivative(const CoulombSystem& sys, double u, const SeriesOptions& opts = {}) {
  if (!(u > 0.0)) throw OutOfDomainError("psi_ordinary: u must be positive");
  if (!(sys.eta() < 1.0)) throw OutOfDomainError("psi_ordinary: eta must be < 1");
  const double eps = sys.eps_tilde();
  const cplx mu = sys.mu();
  const cplx I{0.0, 1.0};
  const cplx t = 1.0 + I * u / eps;
  const cplx dt = I / eps;
  const cplx alpha = -1.5 - mu;
  const cplx z = 2.0 / t;
  const cplx dz = -2.0 * dt / (t * t);
  const auto F = hyp2f1_derivatives(1.5 + mu, 0.5 - sys.w() + mu, 2.0 * mu + 1.0, z, opts);
  const cplx ta = std::pow(t, alpha);
  const cplx psi = ta * F.value / u;
  const cplx dpsi = -psi / u + (alpha * ta / t * dt * F.value + ta * F.derivative * dz) / u;
  return {psi, dpsi};
}

inline cplx psi_ordinary(const CoulombSystem& sys, double u, const SeriesOptions& opts = {}) {
  return psi_ordinary_derivative(sys, u, opts).value;
}

}  // namespace kgml
