#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "kgml/errors.hpp"

namespace kgml {

using cplx = std::complex<double>;

/// Customization point for the coefficient field of Polynomial and of the
/// ODE builders. Specialize for exact types (tests use Gaussian rationals).
template <class T>
struct scalar_traits;

template <>
struct scalar_traits<cplx> {
  static cplx imag_unit() { return {0.0, 1.0}; }
  static bool is_zero(const cplx& v) { return v == cplx{}; }
};

template <>
struct scalar_traits<double> {
  static bool is_zero(double v) { return v == 0.0; }
};

/// Dense univariate polynomial, coefficients in ascending order.
template <class T>
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }
  Polynomial(std::initializer_list<T> coeffs) : c_(coeffs) { trim(); }

  static Polynomial constant(const T& v) { return Polynomial({v}); }
  /// The monomial `z`.
  static Polynomial identity() { return Polynomial({T(0), T(1)}); }

  /// -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<T>& coeffs() const { return c_; }

  /// Coefficient of z^k, zero outside the stored range.
  T operator[](int k) const {
    if (k < 0 || k >= static_cast<int>(c_.size())) return T(0);
    return c_[static_cast<std::size_t>(k)];
  }
  T leading() const { return c_.empty() ? T(0) : c_.back(); }

  template <class Z>
  auto operator()(const Z& z) const {
    using R = decltype(T{} * z);
    R acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  Polynomial derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<T> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * T(static_cast<int>(k));
    return Polynomial(std::move(d));
  }

  /// Coefficients of p(z0 + t) in powers of t.
  Polynomial shifted(const T& z0) const {
    std::vector<T> b = c_;
    const std::size_t n = b.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = n - 1; j > i; --j) b[j - 1] = b[j - 1] + z0 * b[j];
    return Polynomial(std::move(b));
  }

  /// t^n p(1/t) for n >= degree.
  Polynomial reversed(int n) const {
    std::vector<T> r(static_cast<std::size_t>(n + 1), T(0));
    for (int k = 0; k <= degree(); ++k) r[static_cast<std::size_t>(n - k)] = c_[static_cast<std::size_t>(k)];
    return Polynomial(std::move(r));
  }

  /// Multiplication by t^k.
  Polynomial shifted_up(int k) const {
    if (is_zero()) return {};
    std::vector<T> r(static_cast<std::size_t>(k) + c_.size(), T(0));
    for (std::size_t i = 0; i < c_.size(); ++i) r[static_cast<std::size_t>(k) + i] = c_[i];
    return Polynomial(std::move(r));
  }

  Polynomial& operator+=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] = c_[k] + o.c_[k];
    trim();
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] = c_[k] - o.c_[k];
    trim();
    return *this;
  }
  Polynomial& operator*=(const T& s) {
    for (auto& v : c_) v = v * s;
    trim();
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(const Polynomial& a) { return Polynomial() - a; }
  friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }
  friend Polynomial operator*(const T& s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<T> r(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] = r[i + j] + a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

  Polynomial pow(int n) const {
    Polynomial r = constant(T(1));
    for (int i = 0; i < n; ++i) r = r * *this;
    return r;
  }

  /// Converts coefficients with `f` (e.g. exact -> complex<double>).
  template <class U, class F>
  Polynomial<U> map(F&& f) const {
    std::vector<U> r;
    r.reserve(c_.size());
    for (const auto& v : c_) r.push_back(f(v));
    return Polynomial<U>(std::move(r));
  }

 private:
  void trim() {
    while (!c_.empty() && scalar_traits<T>::is_zero(c_.back())) c_.pop_back();
  }

  std::vector<T> c_;
};

using CPoly = Polynomial<cplx>;

inline std::string to_string(const CPoly& p) {
  std::ostringstream os;
  os.precision(17);
  os << "[";
  for (int k = 0; k <= p.degree(); ++k) os << (k ? ", " : "") << p[k];
  os << "]";
  return os.str();
}

/// Sum of |c_k| |z|^k: the magnitude scale used when deciding whether a
/// polynomial value is zero to rounding.
inline double magnitude_scale(const CPoly& p, double abs_z) {
  double s = 0.0, zk = 1.0;
  for (int k = 0; k <= p.degree(); ++k, zk *= abs_z) s += std::abs(p[k]) * zk;
  return s;
}

/// Roots via the eigenvalues of the companion matrix, followed by one Newton
/// polish step per root.
inline std::vector<cplx> polynomial_roots(const CPoly& p) {
  const int n = p.degree();
  if (n < 0) throw RootFindingError("polynomial_roots: zero polynomial " + to_string(p));
  if (n == 0) return {};
  const cplx lead = p.leading();
  std::vector<cplx> roots;
  if (n == 1) {
    roots.push_back(-p[0] / lead);
  } else {
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -p[i] / lead;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success)
      throw RootFindingError("companion eigenvalue solver failed for " + to_string(p));
    const CPoly dp = p.derivative();
    for (int i = 0; i < n; ++i) {
      cplx r = solver.eigenvalues()[i];
      const cplx d = dp(r);
      if (std::abs(d) > 0.0) {
        const cplx polished = r - p(r) / d;
        if (std::isfinite(polished.real()) && std::isfinite(polished.imag()) &&
            std::abs(p(polished)) <= std::abs(p(r)))
          r = polished;
      }
      roots.push_back(r);
    }
  }
  for (const auto& r : roots)
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()))
      throw RootFindingError("non-finite root for polynomial " + to_string(p));
  return roots;
}

}  // namespace kgml
