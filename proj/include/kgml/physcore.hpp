#pragma once

// Unit conventions shared by every module. Momenta are measured in units of
// m c, energies in m c^2 and lengths in hbar/(m c):
//   u = p/(m c),  eta = E/(m c^2),  theta = beta (m c)^2,  theta' = beta' (m c)^2.
// The Coulomb coupling is g = Z alpha.

#include <cmath>
#include <complex>
#include <string>

#include "kgml/errors.hpp"
#include "kgml/polynomial.hpp"

namespace kgml {

inline constexpr double kFineStructure = 1.0 / 137.035999;

/// Deformation sector of the minimal-length algebra in dimensionless form.
struct DeformationParams {
  double theta = 0.0;        ///< beta (m c)^2
  double theta_prime = 0.0;  ///< beta' (m c)^2
  double gamma = 0.0;        ///< representation parameter; fixed to 0 here

  double sum() const { return theta + theta_prime; }

  /// Throws unless the parameters describe a deformed model.
  void validate() const {
    if (!(theta >= 0.0) || !(theta_prime >= 0.0))
      throw OutOfDomainError("deformation parameters must be nonnegative");
    if (gamma != 0.0) throw OutOfDomainError("only gamma = 0 is supported");
    if (!(sum() > 0.0))
      throw DegenerateDeformationError("theta + theta' = 0: the model is undeformed");
  }

  /// omega_1 = theta/(theta + theta'); the exponent at infinity of the
  /// zero-energy equation is -3 - 2 omega_1.
  double omega1() const { return theta / sum(); }
  /// omega_2 = (theta + theta')/2.
  double omega2() const { return 0.5 * sum(); }
};

/// Physical inputs of the Klein-Gordon Coulomb problem and their
/// dimensionless images.
class CoulombSystem {
 public:
  CoulombSystem(int Z, double alpha, double eta) : Z_(Z), alpha_(alpha), g_(Z * alpha), eta_(eta) {
    if (Z <= 0) throw OutOfDomainError("Z must be a positive integer");
    if (!(alpha > 0.0)) throw OutOfDomainError("alpha must be positive");
    check_eta();
  }

  /// System specified directly by its coupling g = Z alpha (Z reported as 0).
  static CoulombSystem from_coupling(double g, double eta) {
    if (!(g > 0.0)) throw OutOfDomainError("coupling g must be positive");
    return CoulombSystem(g, eta);
  }

  int Z() const { return Z_; }
  double alpha() const { return alpha_; }
  double g() const { return g_; }
  double eta() const { return eta_; }

  /// sqrt(1 - eta^2), computed as sqrt((1 - eta)(1 + eta)).
  double eps_tilde() const { return std::sqrt((1.0 - eta_) * (1.0 + eta_)); }
  double eps_tilde_sq() const { return (1.0 - eta_) * (1.0 + eta_); }
  cplx mu() const;
  /// w = g eta / eps_tilde (diverges as eta -> 1).
  double w() const { return g_ * eta_ / eps_tilde(); }
  double k() const { return g_ * g_; }
  double omega_tilde() const { return g_ * eta_; }

 private:
  CoulombSystem(double g, double eta) : Z_(0), alpha_(0.0), g_(g), eta_(eta) { check_eta(); }

  void check_eta() const {
    if (!(eta_ > 0.0) || !(eta_ <= 1.0))
      throw OutOfDomainError("bound-state energy eta must lie in (0, 1]");
  }

  int Z_;
  double alpha_;
  double g_;
  double eta_;
};

/// Minimal position uncertainty sqrt(N theta + theta') in units of hbar/(m c).
inline double minimal_length(const DeformationParams& params, int dims) {
  if (dims < 1) throw OutOfDomainError("dims must be >= 1");
  return std::sqrt(dims * params.theta + params.theta_prime);
}

/// mu = sqrt(1/4 - g^2), principal branch: positive imaginary for g > 1/2.
inline cplx mu_of_coupling(double g) {
  if (!(g >= 0.0)) throw OutOfDomainError("coupling must be nonnegative");
  const double d = (0.5 - g) * (0.5 + g);
  if (d >= 0.0) return {std::sqrt(d), 0.0};
  return {0.0, std::sqrt(-d)};
}

inline cplx CoulombSystem::mu() const { return mu_of_coupling(g_); }

/// Largest Z with Z alpha < 1/2; the boundary Z alpha = 1/2 is supercritical.
inline int critical_Z(double alpha) {
  if (!(alpha > 0.0)) throw OutOfDomainError("alpha must be positive");
  if (alpha >= 0.5) return 0;
  auto z = static_cast<long long>(std::floor(0.5 / alpha));
  while (z > 0 && static_cast<double>(z) * alpha >= 0.5) --z;
  while (static_cast<double>(z + 1) * alpha < 0.5) ++z;
  return static_cast<int>(z);
}

}  // namespace kgml
