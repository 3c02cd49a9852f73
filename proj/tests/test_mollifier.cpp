#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fnls/experiments.hpp"
#include "fnls/mollifier.hpp"

using namespace fnls;

TEST(Kernel, ValuesAndSymmetry) {
  EXPECT_EQ(kernel_value(0.0), 1.0);
  for (double xi = -20.0; xi <= 20.0; xi += 0.37) {
    const double v = kernel_value(xi);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_EQ(v, kernel_value(-xi));
  }
  // Faster than any polynomial: xi^20 phi(xi) -> 0.
  EXPECT_LT(std::pow(12.0, 20) * kernel_value(12.0), 1e-30);
}

TEST(Kernel, FlatAtOrigin) {
  const double h = 0.08;
  auto f = [](double x) { return kernel_value(x); };
  const double d1 = (f(h) - f(-h)) / (2 * h);
  const double d2 = (f(h) - 2 * f(0) + f(-h)) / (h * h);
  const double d3 = (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2 * h * h * h);
  const double d4 = (f(2 * h) - 4 * f(h) + 6 * f(0) - 4 * f(-h) + f(-2 * h)) / std::pow(h, 4);
  for (double d : {d1, d2, d3, d4}) EXPECT_LT(std::abs(d), 1e-8);
}

TEST(Kernel, WeightedSupBounded) {
  // sup_xi <xi>^l phi(xi) is finite, which gives ||phi_eps||_{H^{m+l}} <= C eps^{-l} ||phi||_{H^m}.
  for (int l = 1; l <= 4; ++l) {
    double sup = 0.0;
    for (double xi = 0.0; xi <= 50.0; xi += 1e-3) {
      sup = std::max(sup, std::pow(1 + xi * xi, 0.5 * l) * kernel_value(xi));
    }
    EXPECT_TRUE(std::isfinite(sup));
    EXPECT_LT(sup, 100.0);
  }
}

TEST(Mollify, SingleModeAndLimit) {
  const GridSpec g(64);
  SpectralField psi(g);
  psi[7] = Complex(0.3, -0.4);
  const auto m = mollify(psi, 0.2);
  EXPECT_NEAR(std::abs(m[7] - kernel_value(0.2 * 7) * psi[7]), 0.0, 1e-16);
  for (double eps : {1e-2, 1e-3}) {
    EXPECT_LT(std::abs(mollify(psi, eps)[7] - psi[7]), 1e-15);
  }
  EXPECT_THROW((void)mollify(psi, 0.0), std::invalid_argument);
  EXPECT_THROW((void)mollify(psi, 1.5), std::invalid_argument);
}

TEST(Mollify, ErrorBoundedByData) {
  const auto data = critical_decay_data(GridSpec(1024), 3);
  for (double eps : {1.0, 0.1, 0.01}) {
    EXPECT_LE(sobolev_norm(data - mollify(data, eps), 3), sobolev_norm(data, 3));
  }
}

TEST(Mollify, CriticalDataDecay) {
  const GridSpec g(64);
  const auto d = critical_decay_data(g, 2, 0.6);
  EXPECT_DOUBLE_EQ(d[0].real(), 1.0);
  EXPECT_NEAR(d[3].real(), std::pow(10.0, -1.3), 1e-15);
  EXPECT_EQ(d[g.nyquist_mode()], Complex(0.0));
}

TEST(Mollify, RatesOnSmallGrid) {
  const int m = 2;
  const auto data = critical_decay_data(GridSpec(1 << 14), m);
  const auto ladder = dyadic_ladder(1, 6);
  for (int l = 1; l <= 2; ++l) {
    std::vector<double> errs;
    for (double eps : ladder) errs.push_back(sobolev_norm(data - mollify(data, eps), m - l));
    const auto fit = fit_rate(ladder, errs);
    EXPECT_NEAR(fit.slope, l, 0.15 * l);
  }
}
