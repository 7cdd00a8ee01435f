#pragma once

// Linear second-order ODEs with rational coefficients,
//
//     a2(z) w'' + a1(z) w' + a0(z) w = 0,
//
// their singular points, indicial exponents and Frobenius series. The point
// at infinity is handled through the pullback z = 1/t, after which the same
// local machinery is used as for finite points.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kgml/errors.hpp"
#include "kgml/polynomial.hpp"

namespace kgml::fuchsian {

inline constexpr int kDefaultOrder = 64;
inline constexpr double kDefaultResidualTol = 1e-8;
/// Relative distance under which two roots are treated as one point.
inline constexpr double kRootMergeTol = 1e-10;
/// Relative size under which a local Taylor coefficient counts as zero.
inline constexpr double kZeroTol = 1e-10;

/// One factor of the leading coefficient, raised to `power`.
struct Factor {
  CPoly poly;
  int power = 1;
};

class RationalCoeffODE {
 public:
  /// The leading coefficient is the product of `leading`; every factor is
  /// made monic and the scale is moved onto a1 and a0.
  RationalCoeffODE(std::vector<Factor> leading, CPoly a1, CPoly a0) : a1_(std::move(a1)), a0_(std::move(a0)) {
    cplx scale{1.0, 0.0};
    a2_ = CPoly::constant(1.0);
    for (auto& f : leading) {
      if (f.poly.is_zero()) throw OutOfDomainError("RationalCoeffODE: zero factor in the leading coefficient");
      if (f.power < 1) throw OutOfDomainError("RationalCoeffODE: factor powers must be >= 1");
      const cplx lead = f.poly.leading();
      scale *= std::pow(lead, f.power);
      f.poly *= 1.0 / lead;
      if (f.poly.degree() == 0) continue;
      a2_ = a2_ * f.poly.pow(f.power);
      factors_.push_back(std::move(f));
    }
    a1_ *= 1.0 / scale;
    a0_ *= 1.0 / scale;
  }

  /// Unfactored leading coefficient; multiplicities come from root clustering.
  static RationalCoeffODE from_polynomials(const CPoly& a2, CPoly a1, CPoly a0) {
    return RationalCoeffODE({Factor{a2, 1}}, std::move(a1), std::move(a0));
  }

  const CPoly& a2() const { return a2_; }
  const CPoly& a1() const { return a1_; }
  const CPoly& a0() const { return a0_; }
  const std::vector<Factor>& leading_factors() const { return factors_; }

  const CPoly& p1_num() const { return a1_; }
  const CPoly& p1_den() const { return a2_; }
  const CPoly& p0_num() const { return a0_; }
  const CPoly& p0_den() const { return a2_; }

  cplx p1(cplx z) const { return a1_(z) / a2_(z); }
  cplx p0(cplx z) const { return a0_(z) / a2_(z); }

 private:
  std::vector<Factor> factors_;
  CPoly a2_, a1_, a0_;
};

/// A finite point or the point at infinity.
struct Point {
  bool infinite = false;
  cplx z{};

  static Point at(cplx z) { return {false, z}; }
  static Point infinity() { return {true, {}}; }
};

inline std::string to_string(const Point& p) {
  if (p.infinite) return "infinity";
  std::ostringstream os;
  os.precision(17);
  os << p.z;
  return os.str();
}

enum class PointKind { ordinary, regular, irregular };

inline const char* to_string(PointKind k) {
  switch (k) {
    case PointKind::ordinary: return "ordinary";
    case PointKind::regular: return "regular";
    case PointKind::irregular: return "irregular";
  }
  return "?";
}

struct SingularPoint {
  Point location;
  PointKind kind = PointKind::regular;
  /// Growth exponents: w ~ (z - z0)^rho, or w ~ z^rho at infinity. Ordered by
  /// descending real part, ties by descending imaginary part. Meaningful only
  /// for regular points.
  std::array<cplx, 2> exponents{};
  int multiplicity = 0;  ///< order of the zero of a2 (finite points)
  int p1_pole_order = 0;
  int p0_pole_order = 0;
  bool merged = false;  ///< nearly coincident roots were merged into this point
};

struct FrobeniusSolution {
  Point expansion_point;
  /// Growth exponent, same convention as SingularPoint::exponents.
  cplx exponent{};
  std::vector<cplx> coefficients;
  /// Convergence radius in the local variable t = z - z0 (t = 1/z at infinity).
  double radius = 0.0;
};

struct SeriesValue {
  cplx value{};
  cplx derivative{};
  cplx second_derivative{};
  double error_estimate = 0.0;
};

namespace detail {

/// Order of the first coefficient that is nonzero relative to `scale`.
inline int order_of_zero(const std::vector<cplx>& c, const std::vector<double>& scale) {
  for (std::size_t j = 0; j < c.size(); ++j)
    if (std::abs(c[j]) > kZeroTol * scale[j]) return static_cast<int>(j);
  return std::numeric_limits<int>::max() / 4;
}

/// Shifted coefficients of p at z0 together with their rounding scales.
inline std::pair<std::vector<cplx>, std::vector<double>> taylor_at(const CPoly& p, cplx z0) {
  const CPoly s = p.shifted(z0);
  std::vector<cplx> abs_coeffs;
  for (int k = 0; k <= p.degree(); ++k) abs_coeffs.emplace_back(std::abs(p[k]), 0.0);
  const CPoly sa = CPoly(abs_coeffs).shifted(cplx(std::abs(z0), 0.0));
  std::vector<cplx> c(static_cast<std::size_t>(std::max(p.degree() + 1, 0)));
  std::vector<double> sc(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) {
    c[j] = s[static_cast<int>(j)];
    sc[j] = std::max(sa[static_cast<int>(j)].real(), std::numeric_limits<double>::min());
  }
  return {c, sc};
}

inline std::vector<double> max_scale(const std::vector<cplx>& c) {
  double m = 0.0;
  for (const auto& v : c) m = std::max(m, std::abs(v));
  return std::vector<double>(c.size(), std::max(m, std::numeric_limits<double>::min()));
}

/// Local data of the ODE around one point, in the local variable t:
///     A2(t) W'' + A1(t) W' + A0(t) W = 0.
/// With m the order of A2 at 0, substituting W = sum c_n t^(n+s) gives the
/// banded recurrence  sum_l F_l(s + n - l) c_{n-l} = 0  where
///     F_l(r) = A2[l+m] r(r-1) + A1[l+m-1] r + A0[l+m-2].
struct LocalForm {
  std::vector<cplx> A2, A1, A0;
  int m = 0;
  int ord1 = 0;
  int ord0 = 0;

  static cplx at(const std::vector<cplx>& v, int k) {
    if (k < 0 || k >= static_cast<int>(v.size())) return {};
    return v[static_cast<std::size_t>(k)];
  }

  int p1_pole() const { return m - ord1; }
  int p0_pole() const { return m - ord0; }

  PointKind kind() const {
    if (p1_pole() <= 0 && p0_pole() <= 0) return PointKind::ordinary;
    if (p1_pole() <= 1 && p0_pole() <= 2) return PointKind::regular;
    return PointKind::irregular;
  }

  cplx F(int l, cplx r) const { return at(A2, l + m) * r * (r - 1.0) + at(A1, l + m - 1) * r + at(A0, l + m - 2); }

  int bandwidth() const {
    const int l2 = static_cast<int>(A2.size()) - 1 - m;
    const int l1 = static_cast<int>(A1.size()) - 1 - (m - 1);
    const int l0 = static_cast<int>(A0.size()) - 1 - (m - 2);
    return std::max({l2, l1, l0, 0});
  }

  /// Magnitude used to decide whether a recurrence pivot vanishes.
  double pivot_scale(cplx r) const {
    return std::abs(at(A2, m)) * std::abs(r * (r - 1.0)) + std::abs(at(A1, m - 1) * r) + std::abs(at(A0, m - 2));
  }

  /// Roots of F_0 in the local variable, unordered.
  std::array<cplx, 2> indicial_roots() const {
    const cplx a = at(A2, m);
    const cplx b = at(A1, m - 1) - a;
    const cplx c = at(A0, m - 2);
    const cplx sd = std::sqrt(b * b - 4.0 * a * c);
    cplx r1 = (-b + sd) / (2.0 * a);
    cplx r2 = (-b - sd) / (2.0 * a);
    // Recover the small root from the product when the sum cancels.
    if (std::abs(r1) < 1e-3 * std::abs(r2) && std::abs(r2) > 0.0) r1 = c / (a * r2);
    if (std::abs(r2) < 1e-3 * std::abs(r1) && std::abs(r1) > 0.0) r2 = c / (a * r1);
    return {r1, r2};
  }
};

inline void zero_below(std::vector<cplx>& v, int order) {
  for (int j = 0; j < std::min(order, static_cast<int>(v.size())); ++j) v[static_cast<std::size_t>(j)] = 0.0;
}

inline LocalForm local_form_finite(const RationalCoeffODE& ode, cplx z0, int a2_multiplicity) {
  LocalForm lf;
  auto [A2, s2] = taylor_at(ode.a2(), z0);
  auto [A1, s1] = taylor_at(ode.a1(), z0);
  auto [A0, s0] = taylor_at(ode.a0(), z0);
  lf.m = a2_multiplicity;
  lf.ord1 = order_of_zero(A1, s1);
  lf.ord0 = order_of_zero(A0, s0);
  zero_below(A2, lf.m);
  zero_below(A1, lf.ord1);
  zero_below(A0, lf.ord0);
  lf.A2 = std::move(A2);
  lf.A1 = std::move(A1);
  lf.A0 = std::move(A0);
  return lf;
}

/// Pullback z = 1/t: w' = -t^2 W', w'' = t^4 W'' + 2 t^3 W', multiplied by t^K
/// so that all coefficients are polynomials in t.
inline LocalForm local_form_infinity(const RationalCoeffODE& ode) {
  const int n2 = ode.a2().degree();
  const int n1 = ode.a1().degree();
  const int n0 = ode.a0().degree();
  const int K = std::max({n2 - 3, n1 - 2, n0, 0});
  const CPoly r2 = ode.a2().reversed(n2);
  CPoly A2 = r2.shifted_up(K + 4 - n2);
  CPoly A1 = r2.shifted_up(K + 3 - n2) * cplx(2.0);
  if (n1 >= 0) A1 -= ode.a1().reversed(n1).shifted_up(K + 2 - n1);
  CPoly A0 = n0 >= 0 ? ode.a0().reversed(n0).shifted_up(K - n0) : CPoly{};

  LocalForm lf;
  lf.A2 = A2.coeffs();
  lf.A1 = A1.coeffs();
  lf.A0 = A0.coeffs();
  lf.m = K + 4 - n2;
  lf.ord1 = order_of_zero(lf.A1, max_scale(lf.A1));
  lf.ord0 = order_of_zero(lf.A0, max_scale(lf.A0));
  zero_below(lf.A1, lf.ord1);
  zero_below(lf.A0, lf.ord0);
  return lf;
}

struct Root {
  cplx z;
  int multiplicity;
  bool merged;
};

/// Distinct roots of the leading coefficient with multiplicities.
inline std::vector<Root> leading_roots(const RationalCoeffODE& ode) {
  std::vector<Root> out;
  for (const auto& f : ode.leading_factors()) {
    for (const cplx r : polynomial_roots(f.poly)) {
      bool placed = false;
      for (auto& e : out) {
        if (std::abs(e.z - r) <= kRootMergeTol * std::max(1.0, std::abs(r))) {
          e.multiplicity += f.power;
          e.merged = true;
          placed = true;
          break;
        }
      }
      if (!placed) out.push_back({r, f.power, false});
    }
  }
  return out;
}

inline int multiplicity_at(const RationalCoeffODE& ode, cplx z0) {
  int m = 0;
  for (const auto& r : leading_roots(ode))
    if (std::abs(r.z - z0) <= kRootMergeTol * std::max(1.0, std::abs(z0))) m += r.multiplicity;
  return m;
}

inline LocalForm local_form(const RationalCoeffODE& ode, const Point& p) {
  if (p.infinite) return local_form_infinity(ode);
  return local_form_finite(ode, p.z, multiplicity_at(ode, p.z));
}

inline std::array<cplx, 2> ordered(std::array<cplx, 2> e) {
  auto before = [](cplx x, cplx y) {
    const double tie = 1e-12 * std::max(1.0, std::max(std::abs(x.real()), std::abs(y.real())));
    if (std::abs(x.real() - y.real()) > tie) return x.real() > y.real();
    return x.imag() > y.imag();
  };
  if (before(e[1], e[0])) std::swap(e[0], e[1]);
  return e;
}

/// Growth exponents of a local form at `p`.
inline std::array<cplx, 2> growth_exponents(const LocalForm& lf, const Point& p) {
  auto r = lf.indicial_roots();
  if (p.infinite) r = {-r[0], -r[1]};
  return ordered(r);
}

inline SingularPoint describe(const LocalForm& lf, const Point& p, int multiplicity, bool merged) {
  SingularPoint sp;
  sp.location = p;
  sp.kind = lf.kind();
  sp.multiplicity = multiplicity;
  sp.merged = merged;
  sp.p1_pole_order = std::max(lf.p1_pole(), 0);
  sp.p0_pole_order = std::max(lf.p0_pole(), 0);
  if (sp.kind != PointKind::irregular) sp.exponents = growth_exponents(lf, p);
  return sp;
}

}  // namespace detail

/// Finite singular points (roots of the leading coefficient that are not
/// apparent) sorted by real then imaginary part, followed by infinity when it
/// is singular.
inline std::vector<SingularPoint> singular_points(const RationalCoeffODE& ode) {
  std::vector<SingularPoint> out;
  for (const auto& r : detail::leading_roots(ode)) {
    const auto lf = detail::local_form_finite(ode, r.z, r.multiplicity);
    if (lf.kind() == PointKind::ordinary) continue;
    out.push_back(detail::describe(lf, Point::at(r.z), r.multiplicity, r.merged));
  }
  std::sort(out.begin(), out.end(), [](const SingularPoint& a, const SingularPoint& b) {
    if (a.location.z.real() != b.location.z.real()) return a.location.z.real() < b.location.z.real();
    return a.location.z.imag() < b.location.z.imag();
  });
  const auto lf = detail::local_form_infinity(ode);
  if (lf.kind() != PointKind::ordinary) out.push_back(detail::describe(lf, Point::infinity(), 0, false));
  return out;
}

/// Growth exponents at a regular singular (or ordinary) point, ordered by
/// descending real part.
inline std::array<cplx, 2> indicial_exponents(const RationalCoeffODE& ode, const Point& p) {
  const auto lf = detail::local_form(ode, p);
  if (lf.kind() == PointKind::irregular) {
    std::ostringstream os;
    os << "point " << to_string(p) << " is irregular: p1 pole order " << lf.p1_pole() << ", p0 pole order "
       << lf.p0_pole();
    throw IrregularPointError(os.str());
  }
  return detail::growth_exponents(lf, p);
}

/// Sum of the residue of p1 at a finite point, or of the residue of the
/// pulled-back coefficient at t = 0 for infinity. The two local exponents
/// (in the local variable) add up to 1 minus this value.
inline cplx p1_residue(const RationalCoeffODE& ode, const Point& p) {
  const auto lf = detail::local_form(ode, p);
  const cplx a2m = detail::LocalForm::at(lf.A2, lf.m);
  const cplx a1 = detail::LocalForm::at(lf.A1, lf.m - 1);
  return a1 / a2m;
}

namespace detail {

inline double convergence_radius(const RationalCoeffODE& ode, const Point& p) {
  const double inf = std::numeric_limits<double>::infinity();
  double best = inf;
  double farthest = 0.0;
  for (const auto& sp : singular_points(ode)) {
    if (sp.location.infinite) continue;
    farthest = std::max(farthest, std::abs(sp.location.z));
    if (p.infinite) continue;
    const double d = std::abs(sp.location.z - p.z);
    if (d <= kRootMergeTol * std::max(1.0, std::abs(p.z))) continue;
    best = std::min(best, d);
  }
  if (p.infinite) return farthest > 0.0 ? 1.0 / farthest : inf;
  return best;
}

inline std::vector<cplx> run_recurrence(const LocalForm& lf, cplx s, std::vector<cplx> c, int order) {
  const int L = lf.bandwidth();
  for (int n = static_cast<int>(c.size()); n <= order; ++n) {
    const cplx pivot = lf.F(0, s + static_cast<double>(n));
    if (std::abs(pivot) <= 1e-12 * std::max(lf.pivot_scale(s + static_cast<double>(n)), 1e-300)) {
      std::ostringstream os;
      os << "resonant case: recurrence pivot vanishes at n = " << n << " for exponent " << s;
      throw ResonantExponentError(os.str());
    }
    cplx acc{};
    for (int l = 1; l <= std::min(n, L); ++l)
      acc += lf.F(l, s + static_cast<double>(n - l)) * c[static_cast<std::size_t>(n - l)];
    c.push_back(-acc / pivot);
  }
  return c;
}

}  // namespace detail

/// Local series w = t^s sum_k c_k t^k at a regular singular point, c_0 = 1.
/// `exponent` is a growth exponent as returned by indicial_exponents.
inline FrobeniusSolution frobenius_series(const RationalCoeffODE& ode, const Point& p, cplx exponent,
                                          int order = kDefaultOrder) {
  if (order < 1) throw OutOfDomainError("frobenius_series: order must be >= 1");
  const auto lf = detail::local_form(ode, p);
  if (lf.kind() == PointKind::irregular) {
    std::ostringstream os;
    os << "frobenius_series: point " << to_string(p) << " is irregular (p1 pole order " << lf.p1_pole()
       << ", p0 pole order " << lf.p0_pole() << ")";
    throw IrregularPointError(os.str());
  }
  const cplx s = p.infinite ? -exponent : exponent;
  const auto roots = lf.indicial_roots();
  const int nearest = std::abs(roots[0] - s) <= std::abs(roots[1] - s) ? 0 : 1;
  if (std::abs(roots[nearest] - s) > 1e-8 * std::max(1.0, std::abs(s))) {
    std::ostringstream os;
    os << "frobenius_series: " << exponent << " is not an indicial exponent at " << to_string(p);
    throw OutOfDomainError(os.str());
  }
  const cplx gap = roots[1 - nearest] - s;
  const double n_gap = std::round(gap.real());
  if (n_gap >= 1.0 && std::abs(gap - n_gap) <= 1e-9 * std::max(1.0, std::abs(gap))) {
    std::ostringstream os;
    os << "resonant case: exponents at " << to_string(p) << " differ by the integer " << n_gap
       << "; the series for the smaller exponent needs a logarithmic term";
    throw ResonantExponentError(os.str());
  }
  FrobeniusSolution sol;
  sol.expansion_point = p;
  sol.exponent = exponent;
  sol.coefficients = detail::run_recurrence(lf, s, {cplx(1.0)}, order);
  sol.radius = detail::convergence_radius(ode, p);
  return sol;
}

/// Taylor series at an ordinary point with w(z0) = w0, w'(z0) = dw0. The
/// result has exponent 0 and c_0 = w0 (not normalized).
inline FrobeniusSolution ordinary_point_series(const RationalCoeffODE& ode, cplx z0, cplx w0, cplx dw0,
                                               int order = kDefaultOrder) {
  const auto lf = detail::local_form_finite(ode, z0, detail::multiplicity_at(ode, z0));
  if (lf.m != 0) throw OutOfDomainError("ordinary_point_series: " + to_string(Point::at(z0)) + " is singular");
  FrobeniusSolution sol;
  sol.expansion_point = Point::at(z0);
  sol.exponent = 0.0;
  sol.coefficients = detail::run_recurrence(lf, 0.0, {w0, dw0}, std::max(order, 1));
  sol.radius = detail::convergence_radius(ode, Point::at(z0));
  return sol;
}

/// Partial sum with first and second derivatives. Throws outside the disk.
inline SeriesValue evaluate(const FrobeniusSolution& sol, cplx z) {
  const cplx t = sol.expansion_point.infinite ? 1.0 / z : z - sol.expansion_point.z;
  if (!(std::abs(t) < sol.radius)) {
    std::ostringstream os;
    os << "evaluate: z = " << z << " lies outside the convergence disk around "
       << to_string(sol.expansion_point) << " (|t| = " << std::abs(t) << ", radius " << sol.radius << ")";
    throw OutOfDomainError(os.str());
  }
  const auto& c = sol.coefficients;
  cplx S{}, S1{}, S2{};
  for (std::size_t k = c.size(); k-- > 0;) {
    S2 = S2 * t + 2.0 * S1;
    S1 = S1 * t + S;
    S = S * t + c[k];
  }
  const std::size_t N = c.size() - 1;
  const double last = std::abs(c[N]) * std::pow(std::abs(t), static_cast<double>(N));
  double q = std::abs(t) / sol.radius;
  if (!std::isfinite(sol.radius) && N >= 1 && std::abs(c[N - 1]) > 0.0)
    q = std::abs(c[N]) / std::abs(c[N - 1]) * std::abs(t);
  const double tail = q < 1.0 ? last * q / (1.0 - q) : std::numeric_limits<double>::infinity();

  const cplx r = sol.exponent;
  SeriesValue out;
  if (sol.expansion_point.infinite) {
    const cplx zr = std::pow(z, r);
    const cplx G = r * t * S - t * t * S1;
    const cplx G1 = r * S + r * t * S1 - 2.0 * t * S1 - t * t * S2;
    out.value = zr * S;
    out.derivative = zr * G;
    out.second_derivative = zr * (r * t * G - t * t * G1);
    out.error_estimate = std::abs(zr) * tail;
    return out;
  }
  if (t == cplx{}) {
    if (r != cplx{}) throw OutOfDomainError("evaluate: nonzero exponent at the expansion point");
    out.value = c[0];
    out.derivative = c.size() > 1 ? c[1] : cplx{};
    out.second_derivative = c.size() > 2 ? 2.0 * c[2] : cplx{};
    return out;
  }
  if (r == cplx{}) {
    out.value = S;
    out.derivative = S1;
    out.second_derivative = S2;
    out.error_estimate = tail;
    return out;
  }
  const cplx tr = std::pow(t, r);
  out.value = tr * S;
  out.derivative = tr * (r * S / t + S1);
  out.second_derivative = tr * (r * (r - 1.0) * S / (t * t) + 2.0 * r * S1 / t + S2);
  out.error_estimate = std::abs(tr) * tail;
  return out;
}

/// |w'' + p1 w' + p0 w| / (|w''| + |p1 w'| + |p0 w| + floor).
inline double residual(const RationalCoeffODE& ode, cplx z, cplx w, cplx dw, cplx d2w) {
  const cplx t1 = ode.p1(z) * dw;
  const cplx t0 = ode.p0(z) * w;
  const double den = std::abs(d2w) + std::abs(t1) + std::abs(t0) + std::numeric_limits<double>::min();
  return std::abs(d2w + t1 + t0) / den;
}

inline double residual(const RationalCoeffODE& ode, cplx z, const SeriesValue& v) {
  return residual(ode, z, v.value, v.derivative, v.second_derivative);
}

/// The Gauss hypergeometric equation z(1-z)w'' + [c - (a+b+1)z]w' - ab w = 0.
inline RationalCoeffODE hypergeometric_ode(cplx a, cplx b, cplx c) {
  return RationalCoeffODE({Factor{CPoly{0.0, 1.0}, 1}, Factor{CPoly{-1.0, 1.0}, 1}}, CPoly{-c, a + b + 1.0},
                          CPoly{a * b});
}

}  // namespace kgml::fuchsian
