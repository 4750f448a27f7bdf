#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rodnn/error.hpp"
#include "rodnn/wavefield.hpp"

using namespace rodnn;

namespace {

GridSpec grid(int nx, int ny) { return GridSpec{nx, ny, 1.0, 1.55}; }

}  // namespace

TEST(TotalPower, ZeroField) { EXPECT_EQ(total_power(WaveField(grid(4, 4))), 0.0); }

TEST(TotalPower, OnesField) {
  WaveField f(grid(4, 4));
  for (auto& s : f.samples()) s = 1.0;
  EXPECT_EQ(total_power(f), 16.0);
}

TEST(TotalPower, SingleSample) {
  WaveField f(grid(4, 4));
  f.at(2, 1) = Complex(3.0, 4.0);
  EXPECT_DOUBLE_EQ(total_power(f), 25.0);
}

TEST(GridSpec, RejectsInvalid) {
  EXPECT_THROW(grid(0, 4).validate(), InvalidArgument);
  EXPECT_THROW((GridSpec{4, 4, 0.0, 1.55}).validate(), InvalidArgument);
  EXPECT_THROW((GridSpec{4, 4, 1.0, -1.0}).validate(), InvalidArgument);
  EXPECT_NO_THROW(GridSpec{}.validate());
}

TEST(GridSpec, SampleCentres) {
  const GridSpec g{4, 2, 2.0, 1.55};
  EXPECT_DOUBLE_EQ(g.x_center(0), -3.0);
  EXPECT_DOUBLE_EQ(g.x_center(3), 3.0);
  EXPECT_DOUBLE_EQ(g.y_center(0), -1.0);
  EXPECT_DOUBLE_EQ(g.extent_x(), 8.0);
}

TEST(WaveField, SampleCountMustMatchGrid) {
  EXPECT_THROW(WaveField(grid(4, 4), std::vector<Complex>(15)), DimensionError);
}

TEST(SpatialFrequency, Wraparound) {
  EXPECT_DOUBLE_EQ(spatial_frequency(0, 8, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(spatial_frequency(1, 8, 1.0), 0.125);
  EXPECT_DOUBLE_EQ(spatial_frequency(7, 8, 1.0), -0.125);
  EXPECT_DOUBLE_EQ(spatial_frequency(5, 8, 2.0), -3.0 / 16.0);
}

TEST(SpectralTransform, ConstantIsDcOnly) {
  WaveField f(grid(8, 6));
  for (auto& s : f.samples()) s = Complex(0.3, -1.2);
  const auto spec = spectral_transform(f);
  for (std::size_t i = 1; i < spec.size(); ++i) EXPECT_LT(std::abs(spec[i]), 1e-13) << i;
  EXPECT_NEAR(std::abs(spec[0]), std::abs(Complex(0.3, -1.2)) * std::sqrt(48.0), 1e-12);
}

TEST(SpectralTransform, RoundTrip) {
  const auto f = oracle::random_field(grid(8, 8), 3);
  const auto back = inverse_spectral_transform(f.grid(), spectral_transform(f));
  EXPECT_LT(oracle::max_abs_diff(f, back), 1e-12);
}

TEST(SpectralTransform, RoundTripNonSquare) {
  const auto f = oracle::random_field(grid(12, 5), 4);
  EXPECT_LT(oracle::max_abs_diff(f, inverse_spectral_transform(f.grid(), spectral_transform(f))), 1e-12);
}

TEST(SpectralTransform, SingleFrequencyOneBin) {
  const GridSpec g = grid(8, 8);
  WaveField f(g);
  const int kx = 3, ky = 6;
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) f.at(y, x) = std::polar(1.0, oracle::kTwoPi * (kx * x + ky * y) / 8.0);
  }
  const auto spec = spectral_transform(f);
  std::vector<Complex> in(f.samples().begin(), f.samples().end());
  const auto ref = oracle::dft(in, 8, 8, -1);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    EXPECT_LT(std::abs(spec[i] - ref[i]), 1e-12);
    if (i == static_cast<std::size_t>(ky * 8 + kx)) EXPECT_NEAR(std::abs(spec[i]), 8.0, 1e-12);
    else EXPECT_LT(std::abs(spec[i]), 1e-12);
  }
}

TEST(SpectralTransform, MatchesDirectDft) {
  const auto f = oracle::random_field(grid(6, 10), 9);
  const auto spec = spectral_transform(f);
  const auto ref = oracle::dft({f.samples().begin(), f.samples().end()}, 10, 6, -1);
  for (std::size_t i = 0; i < spec.size(); ++i) EXPECT_LT(std::abs(spec[i] - ref[i]), 1e-12);
}

TEST(SpectralTransform, Parseval) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = oracle::random_field(grid(16, 9), seed);
    double ps = 0.0;
    for (const auto& c : spectral_transform(f)) ps += std::norm(c);
    EXPECT_NEAR(ps / total_power(f), 1.0, 1e-10);
  }
}
