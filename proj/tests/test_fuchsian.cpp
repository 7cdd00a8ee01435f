#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kgml/fuchsian.hpp"
#include "kgml/kgmodels.hpp"
#include "kgml/specialfn.hpp"

using namespace kgml;
using namespace kgml::fuchsian;

namespace {

bool has_point(const std::vector<SingularPoint>& sps, cplx z, double tol = 1e-12) {
  for (const auto& sp : sps)
    if (!sp.location.infinite && std::abs(sp.location.z - z) < tol) return true;
  return false;
}

}  // namespace

TEST(SingularPoints, HypergeometricEquation) {
  const auto ode = hypergeometric_ode(0.3, 0.7, 1.4);
  const auto sps = singular_points(ode);
  ASSERT_EQ(sps.size(), 3u);
  EXPECT_NEAR(std::abs(sps[0].location.z), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(sps[1].location.z - 1.0), 0.0, 1e-14);
  EXPECT_TRUE(sps[2].location.infinite);
  for (const auto& sp : sps) EXPECT_EQ(sp.kind, PointKind::regular);
  EXPECT_NEAR(std::abs(sps[0].exponents[0] - 0.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(sps[0].exponents[1] - (1.0 - 1.4)), 0.0, 1e-14);
  // Growth exponents at infinity are -a, -b.
  EXPECT_NEAR(std::abs(sps[2].exponents[0] + 0.3), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(sps[2].exponents[1] + 0.7), 0.0, 1e-14);
}

TEST(SingularPoints, GeneralizedHeunCensus) {
  const auto sys = CoulombSystem::from_coupling(0.3, 0.9);
  const auto red = to_generalized_heun(sys, 0.01);
  const auto sps = singular_points(generalized_heun_ode(red.params));
  ASSERT_EQ(sps.size(), 5u);
  EXPECT_TRUE(has_point(sps, 0.0));
  EXPECT_TRUE(has_point(sps, 1.0));
  EXPECT_TRUE(has_point(sps, red.params.x1));
  EXPECT_TRUE(has_point(sps, red.params.x2));
  EXPECT_TRUE(sps.back().location.infinite);
  for (const auto& sp : sps) EXPECT_EQ(sp.kind, PointKind::regular);
  const double eps = sys.eps_tilde();
  EXPECT_NEAR(red.params.x1.real(), 0.5 * (1 + std::sqrt(0.06) * eps), 1e-15);
}

TEST(SingularPoints, IrregularPointDetected) {
  // w'' + w'/z^3 + w = 0, multiplied by z^3.
  const RationalCoeffODE ode({{CPoly{0.0, 1.0}, 3}}, CPoly{1.0}, CPoly{0.0, 0.0, 0.0, 1.0});
  const auto sps = singular_points(ode);
  ASSERT_FALSE(sps.empty());
  EXPECT_EQ(sps[0].kind, PointKind::irregular);
  EXPECT_EQ(sps[0].p1_pole_order, 3);
  EXPECT_THROW(indicial_exponents(ode, Point::at(0.0)), IrregularPointError);
  EXPECT_THROW(frobenius_series(ode, Point::at(0.0), 0.0), IrregularPointError);
}

TEST(SingularPoints, ApparentFactorsAreDropped) {
  // (z - 2) w'' + (z - 2) w = 0 is the harmonic oscillator in disguise.
  const RationalCoeffODE ode({{CPoly{-2.0, 1.0}, 1}}, CPoly{}, CPoly{-2.0, 1.0});
  for (const auto& sp : singular_points(ode)) EXPECT_TRUE(sp.location.infinite);
}

TEST(IndicialExponents, OrdinaryModelAtInfinity) {
  const auto sys = CoulombSystem(1, kFineStructure, 0.7);
  const auto e = build_ordinary_kg(sys).psi_exponents_at_infinity();
  const cplx mu = sys.mu();
  EXPECT_NEAR(std::abs(e[0] - (-2.5 + mu)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(e[1] - (-2.5 - mu)), 0.0, 1e-12);
}

TEST(IndicialExponents, ZeroEnergyModelAtInfinity) {
  const auto e = build_deformed_zero_energy(0.3, {0.05, 0.05}).psi_exponents_at_infinity();
  EXPECT_NEAR(std::abs(e[0] + 2.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(e[1] + 4.0), 0.0, 1e-12);
}

TEST(IndicialExponents, FirstOrderModelAtInfinity) {
  for (double theta : {0.001, 0.02, 0.3}) {
    const auto model = build_deformed_first_order(CoulombSystem::from_coupling(0.4, 0.8), theta);
    const auto phi = indicial_exponents(model.ode, Point::infinity());
    EXPECT_NEAR(std::abs(phi[0] + 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(phi[1] + 7.0 / 3.0), 0.0, 1e-12);
    const auto psi = model.psi_exponents_at_infinity();
    EXPECT_NEAR(std::abs(psi[0] + 2.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(psi[1] + 10.0 / 3.0), 0.0, 1e-12);
  }
}

TEST(IndicialExponents, SumMatchesResidueOnGeneralizedHeun) {
  const auto red = to_generalized_heun(CoulombSystem::from_coupling(0.3, 0.9), 0.01);
  const auto ode = generalized_heun_ode(red.params);
  for (const auto& sp : singular_points(ode)) {
    const cplx res = p1_residue(ode, sp.location);
    const cplx sum = sp.exponents[0] + sp.exponents[1];
    // Local exponents add up to 1 - residue; growth exponents at infinity are their negatives.
    const cplx local = sp.location.infinite ? -sum : sum;
    EXPECT_NEAR(std::abs(local - (1.0 - res)), 0.0, 1e-12) << to_string(sp.location);
  }
}

TEST(IndicialExponents, OrderingIsDeterministic) {
  const auto ode = build_ordinary_kg(CoulombSystem(100, kFineStructure, 0.5)).ode;
  const auto a = indicial_exponents(ode, Point::infinity());
  for (int i = 0; i < 10; ++i) {
    const auto b = indicial_exponents(ode, Point::infinity());
    EXPECT_EQ(a[0], b[0]);
    EXPECT_EQ(a[1], b[1]);
  }
  EXPECT_GT(a[0].imag(), a[1].imag());  // equal real parts: larger imaginary first
}

TEST(Frobenius, HypergeometricTaylorCoefficients) {
  const cplx a = 0.3, b = -0.7, c = 1.9;
  const auto sol = frobenius_series(hypergeometric_ode(a, b, c), Point::at(0.0), 0.0, 3);
  ASSERT_EQ(sol.coefficients.size(), 4u);
  EXPECT_NEAR(std::abs(sol.coefficients[0] - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(sol.coefficients[1] - a * b / c), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(sol.coefficients[2] - a * (a + 1.0) * b * (b + 1.0) / (2.0 * c * (c + 1.0))), 0.0, 1e-15);
  EXPECT_NEAR(sol.radius, 1.0, 1e-14);
}

TEST(Frobenius, HeunFirstCoefficientMatchesSubstitution) {
  // Substituting f = 1 + c1 xi + ... into the Heun equation, the xi^-1 terms
  // give c xi0 c1 + q = 0 (numerator a b xi + q).
  const auto red = to_heun(0.2, {0.05, 0.05});
  const auto& p = red.params;
  const auto sol = frobenius_series(heun_ode(p), Point::at(0.0), 0.0, 5);
  EXPECT_NEAR(std::abs(sol.coefficients[1] - (-p.q / (p.c * p.xi0))), 0.0, 1e-13);
}

TEST(Frobenius, OrderOneAndTruncationIndependence) {
  const auto ode = build_deformed_zero_energy(0.4, {0.02, 0.05}).ode;
  const auto e = indicial_exponents(ode, Point::infinity());
  const auto s1 = frobenius_series(ode, Point::infinity(), e[1], 1);
  EXPECT_EQ(s1.coefficients.size(), 2u);
  const auto s40 = frobenius_series(ode, Point::infinity(), e[1], 40);
  const auto s10 = frobenius_series(ode, Point::infinity(), e[1], 10);
  for (int k = 0; k <= 10; ++k) EXPECT_EQ(s40.coefficients[k], s10.coefficients[k]);
  EXPECT_EQ(s40.coefficients[1], s1.coefficients[1]);
  EXPECT_THROW(frobenius_series(ode, Point::infinity(), e[1], 0), OutOfDomainError);
}

TEST(Frobenius, ResonanceAndBadExponent) {
  const auto ode = hypergeometric_ode(1.0, 1.0, 2.0);  // exponents 0 and -1 at z = 0
  EXPECT_NO_THROW(frobenius_series(ode, Point::at(0.0), 0.0));
  EXPECT_THROW(frobenius_series(ode, Point::at(0.0), -1.0), ResonantExponentError);
  EXPECT_THROW(frobenius_series(ode, Point::at(0.0), 0.5), OutOfDomainError);
}

TEST(Evaluate, ExpansionPointAndLogIdentity) {
  const auto sol = frobenius_series(hypergeometric_ode(1.0, 1.0, 2.0), Point::at(0.0), 0.0, 200);
  EXPECT_EQ(evaluate(sol, 0.0).value, cplx(1.0));
  const auto v = evaluate(sol, 0.5);
  EXPECT_NEAR(std::abs(v.value - 2.0 * std::log(2.0)), 0.0, 1e-13);
  EXPECT_THROW(evaluate(sol, 1.5), OutOfDomainError);
}

TEST(Evaluate, AgreesWithHyp2f1OnDisk) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> P(0.1, 1.7), Z(-0.7, 0.7);
  for (int trial = 0; trial < 20; ++trial) {
    const cplx a(P(rng), 0.2 * P(rng)), b(P(rng), 0.0), c(P(rng) + 0.3, 0.0);
    const auto sol = frobenius_series(hypergeometric_ode(a, b, c), Point::at(0.0), 0.0, 160);
    for (int k = 0; k < 5; ++k) {
      cplx z(Z(rng), Z(rng));
      if (std::abs(z) > 0.7) z *= 0.7 / std::abs(z);
      const cplx want = hyp2f1(a, b, c, z);
      EXPECT_NEAR(std::abs(evaluate(sol, z).value - want), 0.0, 1e-10 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(Evaluate, InfinityBranchDerivativesSatisfyOde) {
  const auto ode = build_deformed_zero_energy(0.3, {0.05, 0.05}).ode;
  const auto e = indicial_exponents(ode, Point::infinity());
  const auto sol = frobenius_series(ode, Point::infinity(), e[1], 64);
  for (double u : {10.0, 100.0, 1e4}) EXPECT_LE(residual(ode, u, evaluate(sol, u)), 1e-10) << u;
  // The slower branch u^-2 sits an integer below u^-4 and needs a logarithm.
  EXPECT_THROW(frobenius_series(ode, Point::infinity(), e[0], 64), ResonantExponentError);
}

TEST(Residual, ExactPolynomialSolution) {
  // Legendre: (1 - z^2) w'' - 2 z w' + 6 w = 0 with w = (3 z^2 - 1)/2.
  const RationalCoeffODE ode({{CPoly{1.0, 0.0, -1.0}, 1}}, CPoly{0.0, -2.0}, CPoly{6.0});
  for (double z : {0.1, 0.4, 0.8}) {
    const cplx w = 0.5 * (3 * z * z - 1), dw = 3 * z, d2w = 3.0;
    EXPECT_LE(residual(ode, z, w, dw, d2w), 1e-15);
  }
}

TEST(Residual, OrderToleranceProfile) {
  // Heun series around 0: radius |xi0|. Order 20 at a quarter of the radius
  // and the default order at half of it both stay below 1e-8; at 95% of the
  // radius the truncated series is visibly worse.
  const auto red = to_heun(0.3, {0.02, 0.05});
  const auto ode = heun_ode(red.params);
  const double R = std::abs(red.params.xi0);
  const auto s20 = frobenius_series(ode, Point::at(0.0), 0.0, 20);
  const auto s64 = frobenius_series(ode, Point::at(0.0), 0.0, kDefaultOrder);
  EXPECT_LE(residual(ode, 0.25 * R, evaluate(s20, 0.25 * R)), kDefaultResidualTol);
  EXPECT_LE(residual(ode, 0.5 * R, evaluate(s64, 0.5 * R)), kDefaultResidualTol);
  EXPECT_GT(residual(ode, 0.95 * R, evaluate(s20, 0.95 * R)), residual(ode, 0.25 * R, evaluate(s20, 0.25 * R)));
}

TEST(Residual, OrdinaryPointSeriesMatchesHyp2f1) {
  const auto ode = hypergeometric_ode(0.5, 0.25, 1.5);
  const double z0 = 0.3;
  const auto F = hyp2f1_derivatives(0.5, 0.25, 1.5, z0);
  const auto s = ordinary_point_series(ode, z0, F.value, F.derivative, 80);
  EXPECT_NEAR(s.radius, 0.3, 1e-14);
  const auto v = evaluate(s, 0.5);
  EXPECT_NEAR(std::abs(v.value - hyp2f1(0.5, 0.25, 1.5, 0.5)), 0.0, 1e-12);
  EXPECT_THROW(ordinary_point_series(ode, 0.0, 1.0, 0.0), OutOfDomainError);
}
