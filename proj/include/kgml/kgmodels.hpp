#pragma once

// Builders for the three momentum-space Klein-Gordon equations and their
// Heun normal forms. Every equation is derived from
//     (E^2 R^2 + 2 g E R + g^2) psi = R^2 (1 + u^2) psi
// in the units of physcore.hpp, with R^2, R the momentum-space distance
// operators of the ordinary or deformed algebra (l = 0, gamma = 0).

#include <array>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kgml/errors.hpp"
#include "kgml/fuchsian.hpp"
#include "kgml/physcore.hpp"
#include "kgml/polynomial.hpp"
#include "kgml/specialfn.hpp"

namespace kgml {

/// Polynomial form a2 w'' + a1 w' + a0 w = 0 over an arbitrary field, with
/// the leading coefficient kept as a product of powers.
template <class F>
struct PolyForm {
  std::vector<std::pair<Polynomial<F>, int>> leading;
  Polynomial<F> a1, a0;

  Polynomial<F> a2() const {
    Polynomial<F> r = Polynomial<F>::constant(F(1));
    for (const auto& [p, k] : leading) r = r * p.pow(k);
    return r;
  }
};

namespace coefficients {

/// Undeformed equation multiplied by u:
///   u(eps^2 + u^2) psi'' + (2 eps^2 + 2i g eta u + 6u^2) psi' + (2i g eta + (6 + g^2) u) psi = 0.
template <class F>
PolyForm<F> ordinary(const F& g, const F& eta) {
  const F I = scalar_traits<F>::imag_unit();
  const F e2 = F(1) - eta * eta;
  PolyForm<F> f;
  f.leading = {{Polynomial<F>({F(0), F(1)}), 1}, {Polynomial<F>({e2, F(0), F(1)}), 1}};
  f.a1 = Polynomial<F>({F(2) * e2, F(2) * I * g * eta, F(6)});
  f.a0 = Polynomial<F>({F(2) * I * g * eta, F(6) + g * g});
  return f;
}

/// Zero-energy deformed equation. With A = 1 + (theta+theta')u^2 and
/// B = 1 + (2theta+theta')u^2:
///   A^2(1+u^2) psi'' + [4u A^2 + (2/u) A B (1+u^2)] psi' + [2A^2 + 4AB + g^2] psi = 0,
/// multiplied by u.
template <class F>
PolyForm<F> deformed_zero_energy(const F& g, const F& theta, const F& theta_prime) {
  using P = Polynomial<F>;
  const P U({F(0), F(1)});
  const P one_u2({F(1), F(0), F(1)});
  const P A({F(1), F(0), theta + theta_prime});
  const P B({F(1), F(0), F(2) * theta + theta_prime});
  PolyForm<F> f;
  f.leading = {{U, 1}, {one_u2, 1}, {A, 2}};
  f.a1 = U * U * A * A * F(4) + A * B * one_u2 * F(2);
  f.a0 = U * (A * A * F(2) + A * B * F(4) + P::constant(g * g));
  return f;
}

/// First-order deformed equation (theta' = 2 theta) for phi = u psi:
///   (u^2+eps^2)(1+6 theta u^2) phi''
///   + {2 theta u (u^2+eps^2) + 4u(1+6 theta u^2) + 2i w (1+3 theta u^2)} phi'
///   + {-2 theta (u^2+eps^2) - 2(1+6 theta u^2) + 4(1+7 theta u^2) - 4i w theta u + k} phi = 0,
/// with w = g eta, k = g^2.
template <class F>
PolyForm<F> deformed_first_order(const F& g, const F& eta, const F& theta) {
  using P = Polynomial<F>;
  const F I = scalar_traits<F>::imag_unit();
  const F e2 = F(1) - eta * eta;
  const F w = g * eta;
  const F k = g * g;
  const P U({F(0), F(1)});
  const P u2e2({e2, F(0), F(1)});
  const P six({F(1), F(0), F(6) * theta});
  const P three({F(1), F(0), F(3) * theta});
  const P seven({F(1), F(0), F(7) * theta});
  PolyForm<F> f;
  f.leading = {{u2e2, 1}, {six, 1}};
  f.a1 = U * u2e2 * (F(2) * theta) + U * six * F(4) + three * (F(2) * I * w);
  f.a0 = u2e2 * (F(-2) * theta) - six * F(2) + seven * F(4) + U * (F(-4) * I * w * theta) + P::constant(k);
  return f;
}

}  // namespace coefficients

inline fuchsian::RationalCoeffODE to_ode(const PolyForm<cplx>& f) {
  std::vector<fuchsian::Factor> lead;
  for (const auto& [p, k] : f.leading) lead.push_back({p, k});
  return fuchsian::RationalCoeffODE(std::move(lead), f.a1, f.a0);
}

/// An equation together with the map back to psi: psi(u) = u^psi_power y(u).
struct KgModel {
  fuchsian::RationalCoeffODE ode;
  int psi_power = 0;
  std::string id;
  std::string description;

  /// Growth exponents of psi at u -> infinity, descending real part.
  std::array<cplx, 2> psi_exponents_at_infinity() const {
    auto e = fuchsian::indicial_exponents(ode, fuchsian::Point::infinity());
    return {e[0] + double(psi_power), e[1] + double(psi_power)};
  }
};

inline KgModel build_ordinary_kg(const CoulombSystem& sys) {
  if (!(sys.eta() < 1.0)) throw PhysicsDomainError("build_ordinary_kg: eta >= 1 admits no bound state");
  return {to_ode(coefficients::ordinary<cplx>(sys.g(), sys.eta())), 0, "ordinary",
          "undeformed Klein-Gordon Coulomb equation for psi(u)"};
}

inline KgModel build_deformed_zero_energy(double g, const DeformationParams& params) {
  params.validate();
  if (!(g >= 0.0)) throw OutOfDomainError("coupling must be nonnegative");
  return {to_ode(coefficients::deformed_zero_energy<cplx>(g, params.theta, params.theta_prime)), 0,
          "deformed-zero-energy", "zero-energy deformed equation for psi(u)"};
}

inline KgModel build_deformed_first_order(const CoulombSystem& sys, double theta) {
  if (!(theta > 0.0))
    throw DegenerateDeformationError("build_deformed_first_order: theta must be > 0 (use build_ordinary_kg)");
  if (!(sys.eta() < 1.0)) throw PhysicsDomainError("build_deformed_first_order: eta >= 1 admits no bound state");
  return {to_ode(coefficients::deformed_first_order<cplx>(sys.g(), sys.eta(), theta)), -1,
          "deformed-first-order", "first-order deformed equation (theta' = 2 theta) for phi(u) = u psi(u)"};
}

/// Heun normal form of the zero-energy equation:
///   xi = s u^2/(1 + s u^2), s = theta + theta',  psi = (1 - xi) f(xi).
struct HeunReduction {
  HeunParams params;
  double omega1 = 0.0;
  double omega2 = 0.0;
  double k = 0.0;
  cplx nu;
  double s = 0.0;

  double xi_of_u(double u) const { return s * u * u / (1.0 + s * u * u); }
  double u_of_xi(double xi) const { return std::sqrt(xi / (s * (1.0 - xi))); }
};

inline HeunReduction to_heun(double g, const DeformationParams& dp) {
  dp.validate();
  HeunReduction r;
  r.s = dp.sum();
  r.omega1 = dp.omega1();
  r.omega2 = dp.omega2();
  const double one_minus = 1.0 - 2.0 * r.omega2;
  if (std::abs(one_minus) < 1e-12) {
    throw ParameterPoleError("to_heun: 2 omega_2 = theta + theta' = 1 puts a pole in xi0 = 2 omega_2/(2 omega_2 - 1)");
  }
  r.k = 0.25 * g * g;
  r.nu = std::sqrt(cplx((r.omega1 - 1.0) * (r.omega1 - 1.0) - 4.0 * r.k / one_minus));
  auto& p = r.params;
  p.q = -(1.5 + r.k / one_minus);
  p.xi0 = 2.0 * r.omega2 / (2.0 * r.omega2 - 1.0);
  p.a = 0.5 * (3.0 - r.omega1 - r.nu);
  p.b = 0.5 * (3.0 - r.omega1 + r.nu);
  p.c = 1.5;
  p.d = 2.0;
  p.e = 0.5 - r.omega1;
  return r;
}

/// Zero-energy solution regular at u = 0, as a function of xi in [0, 1):
/// psi = (1 - xi) Hl(xi), with Hl continued along the real segment.
inline cplx deformed_psi_heun(const HeunReduction& r, double xi, const SeriesOptions& opts = {}) {
  if (!(xi >= 0.0) || !(xi < 1.0)) throw OutOfDomainError("deformed_psi_heun: xi must lie in [0, 1)");
  return (1.0 - xi) * heun_continued(r.params, xi, opts).value;
}

/// For theta = theta' the point xi = 1 is apparent (e = 0, a b + q = 0) and
/// the Heun equation collapses to the hypergeometric one in xi/xi0:
/// psi = (1 - xi) 2F1(a, b; 3/2; xi/xi0).
inline cplx deformed_psi_hypergeometric(const HeunReduction& r, double xi, const SeriesOptions& opts = {}) {
  const auto& p = r.params;
  const double scale = std::max({1.0, std::abs(p.a * p.b), std::abs(p.q)});
  if (std::abs(p.e) > 1e-12 || std::abs(p.a * p.b + p.q) > 1e-12 * scale)
    throw OutOfDomainError("deformed_psi_hypergeometric: needs theta = theta' (xi = 1 must be apparent)");
  if (!(xi >= 0.0) || !(xi < 1.0)) throw OutOfDomainError("deformed_psi_hypergeometric: xi must lie in [0, 1)");
  return (1.0 - xi) * hyp2f1(p.a, p.b, p.c, xi / p.xi0, opts);
}

/// Parameters of the five-point equation
///   phi'' + (c/x + d/(x-1) + e/(x-x1) + f/(x-x2)) phi'
///         + (a b x^2 + rho1 x + rho2)/(x(x-1)(x-x1)(x-x2)) phi = 0.
struct GenHeunParams {
  cplx a, b, rho1, rho2, c, d, e, f, x1, x2;

  cplx fuchsian_residual() const { return a + b + 1.0 - (c + d + e + f); }
};

inline constexpr double kConfluenceThreshold = 1e-3;

/// x = (1 - i sqrt(6 theta) u)/2 applied to the first-order equation.
struct GenHeunReduction {
  GenHeunParams params;
  double sqrt6theta = 0.0;
  std::vector<std::string> warnings;

  cplx x_of_u(double u) const { return 0.5 * (1.0 - cplx(0.0, sqrt6theta * u)); }
  cplx u_of_x(cplx x) const { return cplx(0.0, 1.0) * (2.0 * x - 1.0) / sqrt6theta; }
};

inline GenHeunReduction to_generalized_heun(const CoulombSystem& sys, double theta) {
  if (!(theta > 0.0)) throw DegenerateDeformationError("to_generalized_heun: theta must be > 0");
  const double eps = sys.eps_tilde();
  if (!(eps > 0.0)) throw PhysicsDomainError("to_generalized_heun: eps = 0 (rest-energy degenerate case)");
  const double e2 = sys.eps_tilde_sq();
  const double D = 1.0 - 6.0 * theta * e2;
  if (std::abs(D) < 1e-12) throw ParameterPoleError("to_generalized_heun: 1 - 6 theta eps^2 = 0 (parameter pole)");
  const double r = std::sqrt(6.0 * theta);
  const double w = sys.omega_tilde();
  const double k = sys.k();

  GenHeunReduction out;
  out.sqrt6theta = r;
  auto& p = out.params;
  p.a = 1.0;
  p.b = 7.0 / 3.0;
  p.rho1 = -7.0 / 3.0 - w * r / 3.0;
  p.rho2 = theta * e2 / 2.0 + w * r / 6.0 + 1.0 / 12.0 - k / 4.0;
  p.c = 1.0 / 6.0 + w * r / (2.0 * D);
  p.d = 1.0 / 6.0 - w * r / (2.0 * D);
  p.e = 2.0 + w * (1.0 - 3.0 * theta * e2) / (D * eps);
  p.f = 2.0 - w * (1.0 - 3.0 * theta * e2) / (D * eps);
  p.x1 = 0.5 * (1.0 + r * eps);
  p.x2 = 0.5 * (1.0 - r * eps);
  if (std::abs(p.x1 - p.x2) < kConfluenceThreshold) {
    std::ostringstream os;
    os << "confluence: x1 and x2 nearly coincide (|x1 - x2| = " << std::abs(p.x1 - p.x2)
       << "); the theta -> 0 limit merges the two singular points";
    out.warnings.push_back(os.str());
  }
  return out;
}

inline fuchsian::RationalCoeffODE generalized_heun_ode(const GenHeunParams& p) {
  const CPoly x = CPoly::identity();
  const CPoly xm1{-1.0, 1.0};
  const CPoly xx1{-p.x1, 1.0};
  const CPoly xx2{-p.x2, 1.0};
  const CPoly a1 = p.c * (xm1 * xx1 * xx2) + p.d * (x * xx1 * xx2) + p.e * (x * xm1 * xx2) + p.f * (x * xm1 * xx1);
  return fuchsian::RationalCoeffODE({{x, 1}, {xm1, 1}, {xx1, 1}, {xx2, 1}}, a1, CPoly{p.rho2, p.rho1, p.a * p.b});
}

}  // namespace kgml
