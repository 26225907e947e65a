#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "egmc/fitting.hpp"

using namespace egmc;

TEST(FitLine, ExactOnNoiseFreeData) {
  std::vector<double> x, y;
  for (int i = 0; i < 13; ++i) {
    x.push_back(0.125 * i);
    y.push_back(-0.8235 + 1.0 * x.back());
  }
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 1.0, 1e-12);
  EXPECT_NEAR(f.intercept, -0.8235, 1e-12);
  EXPECT_NEAR(f.root(), 0.8235, 1e-12);
  EXPECT_NEAR(f.root_stderr(), 0.0, 1e-10);
}

TEST(FitLine, RootErrorGrowsWithNoise) {
  std::vector<double> x{0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5}, y;
  const double noise[] = {0.01, -0.02, 0.015, -0.005, 0.0, 0.02, -0.01};
  for (std::size_t i = 0; i < x.size(); ++i) y.push_back(2.0 * x[i] - 1.0 + noise[i]);
  const auto f = fit_line(x, y);
  EXPECT_NEAR(f.root(), 0.5, 0.02);
  EXPECT_GT(f.root_stderr(), 0.0);
  EXPECT_LT(f.root_stderr(), 0.02);
}

TEST(FitParabola, ExactOnNoiseFreeData) {
  std::vector<double> x, y;
  for (int i = 0; i < 9; ++i) {
    x.push_back(0.4 + 0.1 * i);
    y.push_back(3.0 * x.back() * x.back() - 4.8 * x.back() + 2.02);
  }
  const auto f = fit_parabola(x, y);
  EXPECT_NEAR(f.a, 3.0, 1e-12);
  EXPECT_NEAR(f.b, -4.8, 1e-12);
  EXPECT_NEAR(f.c, 2.02, 1e-12);
  EXPECT_TRUE(f.convex());
  EXPECT_NEAR(f.vertex(), 0.8, 1e-12);
}

TEST(Fits, RejectBadShapes) {
  const std::vector<double> a{1, 2, 3}, b{1, 2};
  EXPECT_THROW(fit_line(a, b), ShapeError);
  EXPECT_THROW(fit_parabola(a, b), ShapeError);
  EXPECT_THROW(fit_line(std::vector<double>{1}, std::vector<double>{1}), CalibrationError);
  EXPECT_THROW(fit_parabola(b, b), CalibrationError);
}
