#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "nlsf/errors.hpp"
#include "nlsf/nonlinearity.hpp"

using namespace nlsf;

namespace {

std::string message_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const ConfigError &e) {
    return e.what();
  }
  return {};
}

} // namespace

TEST(Nonlinearity, CubicValues) {
  const auto g = NonlinearitySpec::power(1, 4, 2, 3);
  EXPECT_DOUBLE_EQ(g.g(2.0), -2 + 8);
  EXPECT_DOUBLE_EQ(g.G(2.0), -2 + 4);
  EXPECT_DOUBLE_EQ(g.g(-1.5), -g.g(1.5));
  EXPECT_DOUBLE_EQ(g.G(-1.5), g.G(1.5));
}

TEST(Nonlinearity, RejectsNonpositiveMass) {
  const auto msg = message_of([] { NonlinearitySpec::power(0, 4, 2, 3); });
  EXPECT_NE(msg.find("(g1)"), std::string::npos) << msg;
  EXPECT_THROW(NonlinearitySpec::power(-1, 4, 2, 3), ConfigError);
}

TEST(Nonlinearity, RejectsCriticalCubicInFourDimensions) {
  // 2* = 4 in R^4: s^3 is critical, g(s)/s^{2*-1} -> 1.
  const auto msg = message_of([] { NonlinearitySpec::power(1, 4, 2, 4); });
  EXPECT_NE(msg.find("(g2)"), std::string::npos) << msg;
  EXPECT_THROW(NonlinearitySpec::power(1, 5, 2, 4), ConfigError);
  EXPECT_NO_THROW(NonlinearitySpec::power(1, 3, 2, 4));
}

TEST(Nonlinearity, RejectsNonpositivePrimitiveAtXi0) {
  // G(1) = -1/2 + 1/4 < 0 for the cubic.
  const auto msg = message_of([] { NonlinearitySpec::power(1, 4, 1, 3); });
  EXPECT_NE(msg.find("(g3)"), std::string::npos) << msg;
}

TEST(Nonlinearity, RejectsLowDimension) {
  EXPECT_THROW(NonlinearitySpec::power(1, 4, 2, 2), ConfigError);
}

TEST(Nonlinearity, CubicQuinticTruncationPoint) {
  // -s + 4 s^3 - s^5 = 0 at s^2 = 2 + sqrt(3).
  const auto spec =
      truncate(NonlinearitySpec::cubic_quintic(1, 4, 1, 1.5, 3));
  EXPECT_NEAR(spec.xi1(), std::sqrt(2 + std::sqrt(3.0)), 1e-10);
  EXPECT_EQ(spec.g(spec.xi1() + 1), 0.0);
  // G is frozen beyond xi1.
  EXPECT_DOUBLE_EQ(spec.G(spec.xi1() + 3), spec.G(spec.xi1()));
}

TEST(Nonlinearity, PowerIsNotTruncated) {
  const auto spec = truncate(NonlinearitySpec::power(1, 4, 2, 3));
  EXPECT_TRUE(std::isinf(spec.xi1()));
  EXPECT_TRUE(spec.truncated());
}

TEST(Nonlinearity, TruncateIsIdempotent) {
  const auto once = truncate(NonlinearitySpec::cubic_quintic(1, 4, 1, 1.5, 3));
  const auto twice = truncate(once);
  EXPECT_EQ(once.xi1(), twice.xi1());
  for (double s : {0.3, 1.0, 1.9, 2.5, 7.0})
    EXPECT_EQ(once.g(s), twice.g(s));
}

// Property: G' = g, g = g1 - g2 with g1, g2 >= 0 on s >= 0, G1 - G2 = G.
TEST(NonlinearityProperty, PrimitiveAndSplitting) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> S(-4, 4);
  const std::vector<NonlinearitySpec> specs = {
      truncate(NonlinearitySpec::power(1, 4, 2, 3)),
      truncate(NonlinearitySpec::power(2, 3, 4, 4)),
      truncate(NonlinearitySpec::cubic_quintic(1, 4, 1, 1.5, 3))};
  for (const auto &spec : specs) {
    const auto [g1, g2] = split(spec);
    for (int i = 0; i < 200; ++i) {
      const double s = S(rng);
      const double h = 1e-5;
      const double dG = (spec.G(s + h) - spec.G(s - h)) / (2 * h);
      if (std::abs(std::abs(s) - spec.xi1()) > 1e-3)
        EXPECT_NEAR(dG, spec.g(s), 1e-6 * (1 + std::abs(spec.g(s))));
      EXPECT_NEAR(g1(s) - g2(s), spec.g(s), 1e-12 * (1 + std::abs(s)));
      if (s >= 0) {
        EXPECT_GE(g1(s), 0.0);
        EXPECT_GE(g2(s), 0.0);
      }
      EXPECT_NEAR(spec.G1(s) - spec.G2(s), spec.G(s),
                  1e-10 * (1 + std::abs(spec.G(s))));
      EXPECT_GE(spec.G2(s), -1e-12);
    }
  }
}

TEST(Nonlinearity, TabulatedMatchesPower) {
  std::vector<double> s, g;
  for (int i = 0; i <= 400; ++i) {
    s.push_back(i * 0.01);
    g.push_back(-s.back() + std::pow(s.back(), 3));
  }
  const auto tab = NonlinearitySpec::tabulated(s, g, 1, 2, 3);
  const auto exact = NonlinearitySpec::power(1, 4, 2, 3);
  for (double x : {0.05, 0.5, 1.234, 2.0, 3.5})
    EXPECT_NEAR(tab.g(x), exact.g(x), 1e-5 * (1 + std::abs(exact.g(x))));
  EXPECT_NEAR(tab.G(2.0), exact.G(2.0), 1e-5);
}

TEST(Nonlinearity, FromCsv) {
  const auto path =
      std::filesystem::temp_directory_path() / "nlsf_test_table.csv";
  {
    std::ofstream out(path);
    out << "# cubic\ns,g\n";
    for (int i = 0; i <= 400; ++i) {
      const double x = i * 0.01;
      out << x << "," << -x + x * x * x << "\n";
    }
  }
  const auto spec = NonlinearitySpec::from_csv(path, 1, 2, 3);
  EXPECT_NEAR(spec.g(1.5), -1.5 + 3.375, 1e-5);
  std::filesystem::remove(path);
}
