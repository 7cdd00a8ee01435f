#pragma once

// Large-momentum behaviour by direct integration. The power law of a branch
// is read off as the least-squares slope of log|psi| against log u.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kgml/errors.hpp"
#include "kgml/fuchsian.hpp"
#include "kgml/kgmodels.hpp"
#include "kgml/physcore.hpp"

namespace kgml {

/// Sampled solution on a strictly increasing grid.
struct Trajectory {
  std::vector<double> grid;
  std::vector<cplx> values;
  std::vector<cplx> derivatives;
  std::string ode_id;
  /// Relative ODE residual of the series seed, when the run was seeded from one.
  double seed_residual = 0.0;
};

namespace detail {

using State = std::array<cplx, 2>;

inline State rhs(const fuchsian::RationalCoeffODE& ode, double u, const State& y) {
  const cplx a2 = ode.a2()(cplx(u));
  return {y[1], -(ode.a1()(cplx(u)) * y[1] + ode.a0()(cplx(u)) * y[0]) / a2};
}

inline State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State r = y;
  for (const auto& [c, k] : terms) {
    r[0] += h * c * (*k)[0];
    r[1] += h * c * (*k)[1];
  }
  return r;
}

inline bool finite(const State& y) {
  for (const auto& v : y)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

}  // namespace detail

/// Dormand-Prince 5(4) integration of a2 psi'' + a1 psi' + a0 psi = 0 from u0
/// to u_end (either direction). The local error of every accepted step is at
/// most tol relative to the size of each state component.
inline Trajectory integrate(const fuchsian::RationalCoeffODE& ode, double u0, cplx psi0, cplx dpsi0, double u_end,
                            double tol, std::string ode_id = "", long max_steps = 2000000) {
  if (!(tol > 0.0)) throw OutOfDomainError("integrate: tol must be positive");
  if (!std::isfinite(u0) || !std::isfinite(u_end) || u0 == u_end)
    throw OutOfDomainError("integrate: need finite u0 != u_end");
  const double lo = std::min(u0, u_end), hi = std::max(u0, u_end);
  for (const auto& sp : fuchsian::singular_points(ode)) {
    if (sp.location.infinite) continue;
    const cplx z = sp.location.z;
    if (std::abs(z.imag()) <= 1e-12 * std::max(1.0, std::abs(z)) && z.real() >= lo && z.real() <= hi) {
      std::ostringstream os;
      os.precision(17);
      os << "integrate: singular point u = " << z.real() << " lies on [" << lo << ", " << hi << "]";
      throw OutOfDomainError(os.str());
    }
  }

  // Dormand-Prince tableau.
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  const double dir = u_end > u0 ? 1.0 : -1.0;
  Trajectory tr;
  tr.ode_id = std::move(ode_id);
  double u = u0;
  detail::State y{psi0, dpsi0};
  if (!detail::finite(y)) throw OutOfDomainError("integrate: non-finite initial data");
  tr.grid.push_back(u);
  tr.values.push_back(y[0]);
  tr.derivatives.push_back(y[1]);

  double h = dir * std::min(std::abs(u_end - u0), 1e-3 * std::max(1.0, std::abs(u0)));
  detail::State k1 = detail::rhs(ode, u, y);
  long steps = 0;
  while (dir * (u_end - u) > 0.0) {
    if (++steps > max_steps) {
      std::ostringstream os;
      os << "integrate: step budget exhausted at u = " << u;
      throw IntegrationError(os.str());
    }
    if (dir * (u + h - u_end) > 0.0) h = u_end - u;
    using detail::axpy;
    const auto k2 = detail::rhs(ode, u + h / 5, axpy(y, h, {{a21, &k1}}));
    const auto k3 = detail::rhs(ode, u + 3 * h / 10, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
    const auto k4 = detail::rhs(ode, u + 4 * h / 5, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const auto k5 = detail::rhs(ode, u + 8 * h / 9, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const auto k6 =
        detail::rhs(ode, u + h, axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const auto ynew = axpy(y, h, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const double unew = (u + h - u_end) * dir >= 0.0 ? u_end : u + h;
    const auto k7 = detail::rhs(ode, unew, ynew);
    const auto err = axpy(detail::State{}, h, {{e1, &k1}, {e3, &k3}, {e4, &k4}, {e5, &k5}, {e6, &k6}, {e7, &k7}});

    double ratio = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double sc = tol * std::max(std::abs(y[i]), std::abs(ynew[i])) + std::numeric_limits<double>::min();
      ratio = std::max(ratio, std::abs(err[i]) / sc);
    }
    if (!std::isfinite(ratio)) ratio = 1e10;
    if (ratio <= 1.0 && detail::finite(ynew)) {
      u = unew;
      y = ynew;
      k1 = k7;
      tr.grid.push_back(u);
      tr.values.push_back(y[0]);
      tr.derivatives.push_back(y[1]);
    }
    const double factor = ratio == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(ratio, -0.2), 0.2, 5.0);
    h *= ratio <= 1.0 ? factor : std::min(factor, 1.0);
    if (std::abs(h) < 1e-13 * std::max(1.0, std::abs(u)) && dir * (u_end - u) > 0.0) {
      std::ostringstream os;
      os.precision(17);
      os << "integrate: step size underflow at u = " << u << " (a singularity is probably close to the path)";
      throw IntegrationError(os.str());
    }
  }
  if (dir < 0.0) {
    std::reverse(tr.grid.begin(), tr.grid.end());
    std::reverse(tr.values.begin(), tr.values.end());
    std::reverse(tr.derivatives.begin(), tr.derivatives.end());
  }
  return tr;
}

/// Minimum |detrended local slope| that counts towards a sign change.
inline constexpr double kOscillationNoiseFloor = 1e-3;
/// More sign changes than this on the window means |psi| oscillates.
inline constexpr int kMaxSlopeSignChanges = 2;

struct ExponentFit {
  double exponent = 0.0;
  double standard_error = 0.0;
  int points = 0;
  int sign_changes = 0;
};

/// Least-squares slope of log|psi| vs log u on [lo, hi], with its standard
/// error. The local slope u Re(psi'/psi) is checked for oscillation first.
inline ExponentFit fit_exponent(const Trajectory& tr, double lo, double hi) {
  if (!(lo > 0.0) || !(hi > lo)) throw OutOfDomainError("fit_exponent: need 0 < lo < hi");
  if (tr.grid.empty() || lo < tr.grid.front() * (1.0 - 1e-12) || hi > tr.grid.back() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "fit_exponent: window [" << lo << ", " << hi << "] is not inside the trajectory";
    throw OutOfDomainError(os.str());
  }
  std::vector<double> x, y, slope;
  for (std::size_t i = 0; i < tr.grid.size(); ++i) {
    const double u = tr.grid[i];
    if (u < lo * (1.0 - 1e-12) || u > hi * (1.0 + 1e-12)) continue;
    const double m = std::abs(tr.values[i]);
    if (!(m > 0.0)) {
      std::ostringstream os;
      os << "fit_exponent: psi vanishes at u = " << u;
      throw OutOfDomainError(os.str());
    }
    x.push_back(std::log(u));
    y.push_back(std::log(m));
    slope.push_back(i < tr.derivatives.size() ? u * (tr.derivatives[i] / tr.values[i]).real()
                                              : std::numeric_limits<double>::quiet_NaN());
  }
  const std::size_t n = x.size();
  if (n < 3) throw OutOfDomainError("fit_exponent: fewer than 3 samples in the window");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) mx += x[i], my += y[i];
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  ExponentFit fit;
  fit.points = static_cast<int>(n);
  fit.exponent = sxy / sxx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (my + fit.exponent * (x[i] - mx));
    ssr += r * r;
  }
  fit.standard_error = n > 2 ? std::sqrt(ssr / double(n - 2) / sxx) : 0.0;

  // Without derivative data fall back to finite differences of the samples.
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(slope[i])) continue;
    const std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 < n ? i + 1 : n - 1;
    slope[i] = (y[b] - y[a]) / (x[b] - x[a]);
  }
  int last = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = slope[i] - fit.exponent;
    if (std::abs(d) <= kOscillationNoiseFloor) continue;
    const int s = d > 0.0 ? 1 : -1;
    if (last != 0 && s != last) ++fit.sign_changes;
    last = s;
  }
  if (fit.sign_changes > kMaxSlopeSignChanges) {
    std::ostringstream os;
    os << "fit_exponent: |psi| oscillates on [" << lo << ", " << hi << "] (" << fit.sign_changes
       << " sign changes of the detrended log-log slope); no single power law describes it";
    throw OscillationError(os.str());
  }
  return fit;
}

enum class Branch {
  dominant,  ///< fastest decay at infinity, seeded from the Frobenius series there
  generic,   ///< psi = 1, psi' = 0 at a fixed small u
};

struct BranchOptions {
  double tol = 1e-10;
  int order = fuchsian::kDefaultOrder;
  double generic_start = 1.0;
};

namespace detail {

/// Converts a trajectory of y to one of psi = u^p y.
inline Trajectory to_psi(Trajectory tr, int p) {
  if (p == 0) return tr;
  for (std::size_t i = 0; i < tr.grid.size(); ++i) {
    const double u = tr.grid[i];
    const double up = std::pow(u, p);
    const cplx y = tr.values[i], dy = tr.derivatives[i];
    tr.values[i] = up * y;
    tr.derivatives[i] = up * (dy + double(p) * y / u);
  }
  return tr;
}

}  // namespace detail

/// One branch of `model` on [lo, hi], returned as psi (not the model's
/// internal unknown). The dominant branch is integrated backward from hi,
/// where it grows, so the recessive direction never has to be tracked.
inline Trajectory track_branch(const KgModel& model, Branch branch, double lo, double hi,
                               const BranchOptions& opts = {}) {
  if (!(lo > 0.0) || !(hi > lo)) throw OutOfDomainError("track_branch: need 0 < lo < hi");
  Trajectory tr;
  if (branch == Branch::dominant) {
    const auto inf = fuchsian::Point::infinity();
    const auto exps = fuchsian::indicial_exponents(model.ode, inf);
    const auto series = fuchsian::frobenius_series(model.ode, inf, exps[1], opts.order);
    const auto seed = fuchsian::evaluate(series, cplx(hi));
    tr = integrate(model.ode, hi, seed.value, seed.derivative, lo, opts.tol, model.id);
    tr.seed_residual = fuchsian::residual(model.ode, cplx(hi), seed);
  } else {
    if (!(opts.generic_start < lo)) throw OutOfDomainError("track_branch: generic start must lie below the window");
    tr = integrate(model.ode, opts.generic_start, 1.0, 0.0, hi, opts.tol, model.id);
  }
  return detail::to_psi(std::move(tr), model.psi_power);
}

inline ExponentFit fit_branch_exponent(const KgModel& model, Branch branch, double lo, double hi,
                                       const BranchOptions& opts = {}) {
  return fit_exponent(track_branch(model, branch, lo, hi, opts), lo, hi);
}

enum class Regime { ordinary_subcritical, ordinary_supercritical, deformed };
enum class Conclusion { unique_selection, phase_ambiguous, regularized };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::ordinary_subcritical: return "ordinary-subcritical";
    case Regime::ordinary_supercritical: return "ordinary-supercritical";
    case Regime::deformed: return "deformed";
  }
  return "?";
}

inline const char* to_string(Conclusion c) {
  switch (c) {
    case Conclusion::unique_selection: return "unique-selection";
    case Conclusion::phase_ambiguous: return "phase-ambiguous";
    case Conclusion::regularized: return "regularized";
  }
  return "?";
}

struct RegularizationVerdict {
  Regime regime = Regime::ordinary_subcritical;
  cplx dominant_exponent;
  cplx subdominant_exponent;
  bool z_dependent = false;
  Conclusion conclusion = Conclusion::unique_selection;
  std::string note;
};

/// Energy used for the undeformed equation when only g is given; the
/// exponents at infinity do not depend on it.
inline constexpr double kClassifyEta = 0.5;

/// Qualitative verdict from the exponents at infinity. The three conclusions
/// formalize the usual argument: a faster-decaying branch selects the physical
/// solution, a complex pair leaves a free phase, and g-independent real
/// exponents mean the coupling strength no longer matters at large momentum.
inline RegularizationVerdict classify(double g, const std::optional<DeformationParams>& deformation = std::nullopt) {
  if (!(g > 0.0)) throw OutOfDomainError("classify: coupling must be positive");
  const double g_alt = 2.0 * g;
  auto exps_at = [&](double gg) {
    const KgModel m = deformation ? build_deformed_zero_energy(gg, *deformation)
                                  : build_ordinary_kg(CoulombSystem::from_coupling(gg, kClassifyEta));
    return m.psi_exponents_at_infinity();
  };
  const auto e = exps_at(g);
  const auto e_alt = exps_at(g_alt);

  RegularizationVerdict v;
  v.subdominant_exponent = e[0];
  v.dominant_exponent = e[1];
  v.z_dependent = !(e[0] == e_alt[0] && e[1] == e_alt[1]);
  const char* label = " (qualitative classification of the large-momentum behaviour, not a quantitative criterion)";
  if (deformation) {
    v.regime = Regime::deformed;
    v.conclusion = Conclusion::regularized;
    v.note = std::string("real exponents independent of the coupling: no weak/strong distinction") + label;
  } else if (g <= 0.5) {
    v.regime = Regime::ordinary_subcritical;
    v.conclusion = Conclusion::unique_selection;
    v.note = std::string("real exponents: the faster-decaying branch is selected") + label;
  } else {
    v.regime = Regime::ordinary_supercritical;
    v.conclusion = Conclusion::phase_ambiguous;
    v.note = std::string("complex-conjugate exponents: both branches decay alike and the solution carries an "
                         "arbitrary phase, as for singular potentials") +
             label;
  }
  return v;
}

}  // namespace kgml
