#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "kgml/asymptotics.hpp"
#include "kgml/specialfn.hpp"
#include "kgml/spectra.hpp"

using namespace kgml;

namespace {

// psi'' = psi
fuchsian::RationalCoeffODE exponential_ode() { return fuchsian::RationalCoeffODE({}, CPoly{}, CPoly{-1.0}); }

Trajectory synthetic(double lo, double hi, int points, cplx (*f)(double), cplx (*df)(double)) {
  Trajectory tr;
  for (int i = 0; i < points; ++i) {
    const double u = lo * std::pow(hi / lo, double(i) / (points - 1));
    tr.grid.push_back(u);
    tr.values.push_back(f(u));
    tr.derivatives.push_back(df(u));
  }
  return tr;
}

double bound_eta_z1() { return energy_closed_form(kFineStructure, 0); }

}  // namespace

TEST(Integrate, ManufacturedExponential) {
  const auto tr = integrate(exponential_ode(), 0.0, 1.0, 1.0, 1.0, 1e-12);
  EXPECT_NEAR(std::abs(tr.values.back() - std::exp(1.0)), 0.0, 1e-11);
  EXPECT_EQ(tr.grid.back(), 1.0);
  for (std::size_t i = 1; i < tr.grid.size(); ++i) EXPECT_GT(tr.grid[i], tr.grid[i - 1]);
  // Backward runs come back on an increasing grid as well.
  const auto back = integrate(exponential_ode(), 1.0, std::exp(1.0), std::exp(1.0), 0.0, 1e-12);
  EXPECT_EQ(back.grid.front(), 0.0);
  EXPECT_NEAR(std::abs(back.values.front() - 1.0), 0.0, 1e-11);
}

TEST(Integrate, ConvergenceWithTolerance) {
  // Global error of the exponential after integrating to u = 5, tracked over
  // four decades of tol. DP45 with local extrapolation: the error follows tol
  // roughly linearly, so each factor 100 in tol buys more than a factor 20.
  double prev = 0.0;
  for (double tol : {1e-5, 1e-7, 1e-9, 1e-11}) {
    const auto tr = integrate(exponential_ode(), 0.0, 1.0, 1.0, 5.0, tol);
    const double err = std::abs(tr.values.back() - std::exp(5.0)) / std::exp(5.0);
    if (prev > 0.0) {
      EXPECT_LT(err, prev / 20.0) << tol;
    }
    EXPECT_LT(err, 1e3 * tol);
    prev = err;
  }
}

TEST(Integrate, OrdinaryEquationAgainstClosedForm) {
  const auto sys = CoulombSystem(1, kFineStructure, bound_eta_z1());
  const auto model = build_ordinary_kg(sys);
  const auto s = psi_ordinary_derivative(sys, 5.0);
  const auto tr = integrate(model.ode, 5.0, s.value, s.derivative, 50.0, 1e-12);
  const cplx want = psi_ordinary(sys, 50.0);
  EXPECT_NEAR(std::abs(tr.values.back() / want - 1.0), 0.0, 1e-6);
}

TEST(Integrate, Errors) {
  const auto model = build_deformed_zero_energy(0.3, {0.05, 0.05});
  EXPECT_THROW(integrate(model.ode, -1.0, 1.0, 0.0, 1.0, 1e-8), OutOfDomainError);
  EXPECT_THROW(integrate(model.ode, 1.0, 1.0, 0.0, 2.0, 0.0), OutOfDomainError);
  // Pole at 1 + 2e-12 i with exponents {0, -4}: just far enough off the axis
  // not to count as on the path, far too close for any acceptable step.
  const cplx z0(1.0, 2e-12);
  const fuchsian::RationalCoeffODE near({{CPoly{-z0, 1.0}, 1}}, CPoly{5.0}, CPoly{1.0});
  try {
    integrate(near, 0.0, 1.0, 0.0, 2.0, 1e-10);
    ADD_FAILURE() << "no IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_NE(std::string(e.what()).find("u = 0.99999"), std::string::npos) << e.what();
  }
  EXPECT_THROW(integrate(exponential_ode(), 0.0, 1.0, 1.0, 50.0, 1e-10, "", 10), IntegrationError);
}

TEST(FitExponent, ExactPowerLaw) {
  const auto tr = synthetic(
      10.0, 1e5, 200, [](double u) { return cplx(std::pow(u, -4.0)); },
      [](double u) { return cplx(-4.0 * std::pow(u, -5.0)); });
  const auto fit = fit_exponent(tr, 1e2, 1e4);
  EXPECT_NEAR(fit.exponent, -4.0, 1e-6);
  EXPECT_LT(fit.standard_error, 1e-10);
  EXPECT_EQ(fit.sign_changes, 0);
  EXPECT_THROW(fit_exponent(tr, 1.0, 1e4), OutOfDomainError);
  EXPECT_THROW(fit_exponent(tr, 1e2, 1e6), OutOfDomainError);
}

TEST(FitExponent, TwoRealPowersDoNotOscillate) {
  const auto tr = synthetic(
      1.0, 1e6, 400, [](double u) { return cplx(std::pow(u, -2.0) + std::pow(u, -4.0)); },
      [](double u) { return cplx(-2.0 * std::pow(u, -3.0) - 4.0 * std::pow(u, -5.0)); });
  EXPECT_NO_THROW(fit_exponent(tr, 1.0, 1e6));
}

TEST(FitExponent, ComplexPairOscillates) {
  // u^(-5/2) (u^(i m) + 0.5 u^(-i m)), m = 1: |psi| wobbles with period 2 pi in ln u.
  const auto tr = synthetic(
      1.0, 1e8, 2000,
      [](double u) {
        const cplx r(-2.5, 1.0);
        return std::pow(u, r) + 0.5 * std::pow(u, std::conj(r));
      },
      [](double u) {
        const cplx r(-2.5, 1.0);
        return r * std::pow(u, r - 1.0) + 0.5 * std::conj(r) * std::pow(u, std::conj(r) - 1.0);
      });
  EXPECT_THROW(fit_exponent(tr, 1.0, 1e8), OscillationError);
}

TEST(Branches, ZeroEnergyDominantAndGeneric) {
  const auto model = build_deformed_zero_energy(0.3, {0.05, 0.05});
  const auto dom = fit_branch_exponent(model, Branch::dominant, 1e2, 1e4);
  EXPECT_NEAR(dom.exponent / -4.0 - 1.0, 0.0, 0.01);
  const auto gen = fit_branch_exponent(model, Branch::generic, 1e2, 1e4);
  EXPECT_NEAR(gen.exponent / -2.0 - 1.0, 0.0, 0.01);
}

TEST(Branches, TrajectoryIsPsiAndFinite) {
  const auto sys = CoulombSystem::from_coupling(0.3, 0.9);
  const auto model = build_deformed_first_order(sys, 0.02);
  const auto tr = track_branch(model, Branch::dominant, 1e2, 1e4);
  ASSERT_GT(tr.grid.size(), 3u);
  EXPECT_EQ(tr.ode_id, "deformed-first-order");
  EXPECT_LE(tr.seed_residual, 1e-8);
  for (std::size_t i = 0; i < tr.grid.size(); ++i) {
    EXPECT_TRUE(std::isfinite(std::abs(tr.values[i])));
    if (i) {
      EXPECT_GT(tr.grid[i], tr.grid[i - 1]);
    }
  }
}

TEST(Branches, FitMatchesIndicialExponentForEveryBuilder) {
  const std::vector<KgModel> models{
      build_ordinary_kg(CoulombSystem(1, kFineStructure, bound_eta_z1())),
      build_ordinary_kg(CoulombSystem(30, kFineStructure, 0.9)),
      build_deformed_zero_energy(0.3, {0.05, 0.05}),
      build_deformed_zero_energy(0.8, {0.02, 0.07}),
      build_deformed_first_order(CoulombSystem::from_coupling(0.3, 0.9), 0.02),
  };
  for (const auto& m : models) {
    const double want = m.psi_exponents_at_infinity()[1].real();
    const auto fit = fit_branch_exponent(m, Branch::dominant, 1e2, 1e4);
    EXPECT_NEAR(fit.exponent / want - 1.0, 0.0, 0.01) << m.id;
  }
}

TEST(Branches, FirstOrderTruncationDiscrepancy) {
  const double theta = 0.02;
  const auto first = build_deformed_first_order(CoulombSystem::from_coupling(0.3, 0.9), theta);
  EXPECT_NEAR(fit_branch_exponent(first, Branch::dominant, 1e2, 1e4).exponent / (-10.0 / 3.0) - 1.0, 0.0, 0.01);
  const auto exact = build_deformed_zero_energy(0.3, {theta, 2.0 * theta});
  EXPECT_NEAR(fit_branch_exponent(exact, Branch::dominant, 1e2, 1e4).exponent / (-11.0 / 3.0) - 1.0, 0.0, 0.01);
}

TEST(Branches, SupercriticalOrdinaryOscillatesOnWideWindow) {
  // Z = 100: Im(mu) ~ 0.53, so ln u needs ~3 periods of 2 pi / (2 Im mu).
  const auto sys = CoulombSystem(100, kFineStructure, 0.5);
  const auto model = build_ordinary_kg(sys);
  const double hi = 1e2 * std::exp(3.0 * 2.0 * std::numbers::pi / (2.0 * sys.mu().imag()));
  EXPECT_THROW(fit_branch_exponent(model, Branch::generic, 1e2, hi), OscillationError);
}

TEST(Classify, Examples) {
  const auto z1 = classify(kFineStructure);
  EXPECT_EQ(z1.regime, Regime::ordinary_subcritical);
  EXPECT_EQ(z1.conclusion, Conclusion::unique_selection);
  const double mu = mu_of_coupling(kFineStructure).real();
  EXPECT_NEAR(std::abs(z1.dominant_exponent - (-2.5 - mu)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(z1.subdominant_exponent - (-2.5 + mu)), 0.0, 1e-12);
  EXPECT_TRUE(z1.z_dependent);

  const auto z100 = classify(100 * kFineStructure);
  EXPECT_EQ(z100.regime, Regime::ordinary_supercritical);
  EXPECT_EQ(z100.conclusion, Conclusion::phase_ambiguous);
  EXPECT_NEAR(std::abs(z100.dominant_exponent - std::conj(z100.subdominant_exponent)), 0.0, 1e-12);
  EXPECT_EQ(z100.dominant_exponent.real(), -2.5);
  EXPECT_NE(z100.note.find("qualitative"), std::string::npos);

  for (int Z : {1, 68, 100, 300}) {
    const auto d = classify(Z * kFineStructure, DeformationParams{0.05, 0.05});
    EXPECT_EQ(d.regime, Regime::deformed);
    EXPECT_EQ(d.conclusion, Conclusion::regularized);
    EXPECT_FALSE(d.z_dependent);
    EXPECT_NEAR(std::abs(d.subdominant_exponent + 2.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(d.dominant_exponent + 4.0), 0.0, 1e-12);
  }
}

TEST(Classify, CouplingSweep) {
  const DeformationParams dp{0.03, 0.04};
  const auto ref = classify(0.1, dp).dominant_exponent;
  for (double g : {0.5, 1.0}) EXPECT_NEAR(std::abs(classify(g, dp).dominant_exponent - ref), 0.0, 1e-12);
  const auto o1 = classify(0.1).dominant_exponent, o2 = classify(0.5).dominant_exponent, o3 = classify(1.0).dominant_exponent;
  EXPECT_NE(o1, o2);
  EXPECT_NE(o2, o3);
  EXPECT_NE(o1, o3);
}
