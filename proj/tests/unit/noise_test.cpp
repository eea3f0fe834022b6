#include <support/test_support.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace binviz;

namespace {

constexpr int kDraws = 100000;

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

template <typename Draw>
Moments moments(Draw draw, std::vector<double>* keep = nullptr) {
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < kDraws; ++i) {
    const double x = draw();
    sum += x;
    sq += x * x;
    if (keep) keep->push_back(x);
  }
  Moments m;
  m.mean = sum / kDraws;
  m.variance = (sq - kDraws * m.mean * m.mean) / (kDraws - 1);
  return m;
}

/// Poisson pmf straight from lambda^k e^-lambda / k!.
double poisson_pmf(double lambda, int k) {
  return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

}  // namespace

TEST(Gaussian, ZeroRatioIsAlwaysZero) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_gaussian(0.0, rng), 0.0);
}

TEST(Gaussian, MomentsAtRatio02) {
  Rng rng(20240501);
  auto m = moments([&] { return sample_gaussian(0.2, rng); });
  EXPECT_NEAR(m.mean, 0.0, 0.5);
  EXPECT_NEAR(std::sqrt(m.variance), 51.0, 0.02 * 51.0);
}

TEST(Gaussian, SameSeedSameSequence) {
  Rng a(77), b(77), c(78);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = sample_gaussian(0.3, a);
    EXPECT_EQ(x, sample_gaussian(0.3, b));
    differs |= x != sample_gaussian(0.3, c);
  }
  EXPECT_TRUE(differs);
}

TEST(Poisson, ZeroRatioIsAlwaysZero) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_poisson(0.0, rng), 0u);
}

TEST(Poisson, MeanEqualsVarianceAtRatio02) {
  Rng rng(3);
  auto m = moments([&] { return static_cast<double>(sample_poisson(0.2, rng)); });
  EXPECT_NEAR(m.mean, 51.0, 0.02 * 51.0);
  EXPECT_NEAR(m.variance, 51.0, 0.05 * 51.0);
}

TEST(Poisson, ProbabilityOfZeroAtLambdaOne) {
  Rng rng(4);
  int zeros = 0;
  for (int i = 0; i < kDraws; ++i) zeros += sample_poisson(1.0 / 255.0, rng) == 0;
  EXPECT_NEAR(static_cast<double>(zeros) / kDraws, std::exp(-1.0), 0.01);
}

TEST(Poisson, FrequenciesFollowPmfAcrossBothAlgorithms) {
  // lambda 3 exercises the multiplication method, 51 and 255 the rejection one.
  for (double lambda : {3.0, 51.0, 255.0}) {
    Rng rng(static_cast<std::uint64_t>(lambda * 1000));
    std::map<std::uint64_t, int> counts;
    for (int i = 0; i < kDraws; ++i) ++counts[poisson_draw(lambda, rng)];
    // Compare the pmf mass on the central band, bin by bin, at 5 sigma.
    const int lo = std::max(0, static_cast<int>(lambda - 2 * std::sqrt(lambda)));
    const int hi = static_cast<int>(lambda + 2 * std::sqrt(lambda));
    for (int k = lo; k <= hi; ++k) {
      const double p = poisson_pmf(lambda, k);
      const double expected = p * kDraws;
      const double sd = std::sqrt(kDraws * p * (1 - p));
      EXPECT_NEAR(counts[static_cast<std::uint64_t>(k)], expected, 5 * sd) << "lambda=" << lambda << " k=" << k;
    }
  }
}

TEST(Laplace, ZeroRatioIsAlwaysZero) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_laplace(0.0, rng), 0.0);
}

TEST(Laplace, MomentsAndMedianAtRatio01) {
  Rng rng(6);
  std::vector<double> draws;
  auto m = moments([&] { return sample_laplace(0.1, rng); }, &draws);
  const double b = 25.5;
  EXPECT_NEAR(m.mean, 0.0, 1.0);
  EXPECT_NEAR(m.variance, 2 * b * b, 0.05 * 2 * b * b);  // 1300.5
  std::nth_element(draws.begin(), draws.begin() + kDraws / 2, draws.end());
  EXPECT_NEAR(draws[kDraws / 2], 0.0, 1.0);
}

TEST(Laplace, TailFollowsDensity) {
  // P(|X| > b) = exp(-1) for the two-sided exponential.
  Rng rng(8);
  const double b = 0.4 * 255;
  int beyond = 0;
  for (int i = 0; i < kDraws; ++i) beyond += std::abs(sample_laplace(0.4, rng)) > b;
  EXPECT_NEAR(static_cast<double>(beyond) / kDraws, std::exp(-1.0), 0.01);
}

TEST(Samplers, RejectRatioOutsideUnitInterval) {
  Rng rng(9);
  EXPECT_THROW(sample_gaussian(-0.1, rng), ValidationError);
  EXPECT_THROW(sample_poisson(1.5, rng), ValidationError);
  EXPECT_THROW(sample_laplace(std::nan(""), rng), ValidationError);
}

TEST(Rng, UniformRanges) {
  Rng rng(10);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    const double v = rng.uniform_open();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
    ASSERT_LT(rng.below(7), 7u);
  }
}

TEST(Rng, StreamSeedDependsOnSeedAndSource) {
  EXPECT_EQ(stream_seed(42, "a/b.bin"), stream_seed(42, "a/b.bin"));
  EXPECT_NE(stream_seed(42, "a/b.bin"), stream_seed(43, "a/b.bin"));
  EXPECT_NE(stream_seed(42, "a/b.bin"), stream_seed(42, "a/c.bin"));
}
