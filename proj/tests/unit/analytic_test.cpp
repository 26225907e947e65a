#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "egmc/analytic.hpp"
#include "support/oracles.hpp"

using egmc::ChannelGeometry;

namespace {
const ChannelGeometry kGeom(10, 30, 80);
}

TEST(ChannelGeometry, ValidatesParameters) {
  EXPECT_THROW(ChannelGeometry(0, 30, 80), egmc::DomainError);
  EXPECT_THROW(ChannelGeometry(10, 10, 80), egmc::DomainError);
  EXPECT_THROW(ChannelGeometry(10, 5, 80), egmc::DomainError);
  EXPECT_THROW(ChannelGeometry(10, 30, 0), egmc::DomainError);
  EXPECT_DOUBLE_EQ(kGeom.gap(), 20.0);
  EXPECT_DOUBLE_EQ(kGeom.asymptote(), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(kGeom.peak_time(), 400.0 / 480.0);
}

TEST(Erfc, LibraryValuesAreAccurate) {
  // Reference values to 20 digits.
  EXPECT_NEAR(std::erfc(0.5) / 0.47950012218695346232 - 1.0, 0.0, 1e-10);
  EXPECT_NEAR(std::erfc(2.0) / 0.0046777349810472658379 - 1.0, 0.0, 1e-10);
  EXPECT_NEAR(std::erfc(5.0) / 1.5374597944280348502e-12 - 1.0, 0.0, 1e-10);
}

TEST(HitRate, LimitsAndDomain) {
  EXPECT_EQ(egmc::hit_rate(kGeom, 0.0), 0.0);
  EXPECT_THROW(egmc::hit_rate(kGeom, -1.0), egmc::DomainError);
  EXPECT_LT(egmc::hit_rate(kGeom, 1e-3), 1e-300);
  EXPECT_LT(egmc::hit_rate(kGeom, 1e12), 1e-15);
  EXPECT_GT(egmc::hit_rate(kGeom, kGeom.peak_time()), 0.0);
}

TEST(HitRate, PeaksAtPeakTime) {
  const double tp = kGeom.peak_time();
  EXPECT_GT(egmc::hit_rate(kGeom, tp), egmc::hit_rate(kGeom, tp * 0.99));
  EXPECT_GT(egmc::hit_rate(kGeom, tp), egmc::hit_rate(kGeom, tp * 1.01));
}

TEST(CumulativeAbsorbed, LimitsAndDomain) {
  EXPECT_EQ(egmc::cumulative_absorbed(kGeom, 0.0), 0.0);
  EXPECT_THROW(egmc::cumulative_absorbed(kGeom, -0.1), egmc::DomainError);
  EXPECT_NEAR(egmc::cumulative_absorbed(kGeom, 1e16) / kGeom.asymptote(), 1.0, 1e-6);
}

TEST(CumulativeAbsorbed, EqualsIntegralOfHitRate) {
  for (double t : {1.0, 5.0, 100.0}) {
    const double tp = kGeom.peak_time();
    std::vector<double> edges{0.0};
    for (double e : {0.25 * tp, 0.5 * tp, tp, 2 * tp, 5 * tp, 20 * tp}) {
      if (e < t) edges.push_back(e);
    }
    edges.push_back(t);
    const double q = oracle::integrate_pieces([](double s) { return egmc::hit_rate(kGeom, s); }, edges);
    EXPECT_NEAR(q / egmc::cumulative_absorbed(kGeom, t), 1.0, 1e-6) << "t=" << t;
  }
}

TEST(PdfPseudoReal, VanishesOnReceiverSurface) {
  for (double t : {0.1, 1.0, 10.0}) EXPECT_NEAR(egmc::pdf_pseudo_real(kGeom, kGeom.radius(), t), 0.0, 1e-20);
  EXPECT_THROW(egmc::pdf_pseudo_real(kGeom, 9.0, 1.0), egmc::DomainError);
  EXPECT_THROW(egmc::pdf_pseudo_real(kGeom, 20.0, 0.0), egmc::DomainError);
}

TEST(PdfPseudoReal, SurfaceFluxEqualsHitRate) {
  // The density is only defined for r >= R, so use the second-order
  // one-sided stencil there.
  const double h = 1e-3, t = 1.0, R = kGeom.radius();
  auto P = [&](double r) { return egmc::pdf_pseudo_real(kGeom, r, t); };
  const double dPdr = (-3.0 * P(R) + 4.0 * P(R + h) - P(R + 2.0 * h)) / (2.0 * h);
  const double flux = 4.0 * std::numbers::pi * R * R * kGeom.diffusion() * dPdr;
  EXPECT_NEAR(flux / egmc::hit_rate(kGeom, t), 1.0, 1e-4);
}

TEST(PdfPseudoReal, ConservesProbability) {
  for (double t : {0.3, 1.0, 4.0}) {
    const double width = std::sqrt(4.0 * kGeom.diffusion() * t);
    const double L = kGeom.distance();
    auto f = [&](double r) { return egmc::pdf_pseudo_real(kGeom, r, t) * 4.0 * std::numbers::pi * r * r; };
    const double survival =
        oracle::integrate_pieces(f, {kGeom.radius(), std::max(kGeom.radius(), L - 10 * width), L, L + 12 * width});
    EXPECT_NEAR(survival + egmc::cumulative_absorbed(kGeom, t), 1.0, 1e-5) << "t=" << t;
  }
}

TEST(AlphaApproximation, MatchesClosedForms) {
  const auto a = egmc::alpha_approximation_1d();
  EXPECT_NEAR(a.erfc_integral, 1.0 / std::sqrt(std::numbers::pi), 1e-12);
  EXPECT_NEAR(a.xi_erfc_integral, 0.25, 1e-12);
  EXPECT_NEAR(egmc::alpha_analytic_1d(), std::sqrt(std::numbers::pi) / 2.0, 1e-6);
  EXPECT_NEAR(a.alpha, 2.0 * a.alpha_prime, 1e-15);
}

TEST(Discretize, CellsTelescope) {
  const auto c = egmc::discretize(kGeom, 0.02, 300);
  ASSERT_EQ(c.size(), 300u);
  double sum = 0.0;
  for (double f : c.per_step_fraction) {
    EXPECT_GE(f, 0.0);
    sum += f;
  }
  EXPECT_NEAR(sum, egmc::cumulative_absorbed(kGeom, 300 * 0.02), 1e-15);
  EXPECT_DOUBLE_EQ(c.times.front(), 0.02);
  EXPECT_DOUBLE_EQ(c.times.back(), 6.0);
  EXPECT_DOUBLE_EQ(c.cumulative.back(), egmc::cumulative_absorbed(kGeom, 6.0));
}

TEST(Discretize, SingleCell) {
  const auto c = egmc::discretize(kGeom, 0.7, 1);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.per_step_fraction[0], egmc::cumulative_absorbed(kGeom, 0.7));
  EXPECT_THROW(egmc::discretize(kGeom, 0.0, 3), egmc::DomainError);
  EXPECT_THROW(egmc::discretize(kGeom, 0.1, 0), egmc::DomainError);
}

TEST(HitRate, IsTimeDerivativeOfCumulative) {
  for (double t : {0.2, 0.8, 3.0, 50.0}) {
    const double h = 1e-4 * t;
    const double d = (egmc::cumulative_absorbed(kGeom, t + h) - egmc::cumulative_absorbed(kGeom, t - h)) / (2.0 * h);
    EXPECT_NEAR(d / egmc::hit_rate(kGeom, t), 1.0, 1e-4) << "t=" << t;
  }
}

TEST(CumulativeAbsorbed, RisesMonotonicallyTowardAsymptote) {
  double previous = 0.0;
  for (double t = 0.05; t < 1e6; t *= 1.3) {
    const double c = egmc::cumulative_absorbed(kGeom, t);
    EXPECT_GE(c, previous);
    EXPECT_LE(c, kGeom.asymptote());
    previous = c;
  }
}
