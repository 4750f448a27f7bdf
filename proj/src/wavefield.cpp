#include "rodnn/wavefield.hpp"

#include <cmath>
#include <string>

#include "rodnn/error.hpp"
#include "rodnn/fft.hpp"

namespace rodnn {

void GridSpec::validate() const {
  if (nx < 1 || ny < 1) {
    throw InvalidArgument("grid: nx and ny must be >= 1 (got " + std::to_string(nx) + "x" +
                          std::to_string(ny) + ")");
  }
  if (!(pitch > 0.0) || !std::isfinite(pitch)) throw InvalidArgument("grid: pitch must be > 0");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
    throw InvalidArgument("grid: wavelength must be > 0");
  }
}

WaveField::WaveField(const GridSpec& grid) : grid_(grid), samples_(grid.size()) { grid_.validate(); }

WaveField::WaveField(const GridSpec& grid, std::vector<Complex> samples)
    : grid_(grid), samples_(std::move(samples)) {
  grid_.validate();
  if (samples_.size() != grid_.size()) {
    throw DimensionError("wavefield: " + std::to_string(samples_.size()) +
                         " samples for a grid of " + std::to_string(grid_.size()));
  }
}

WaveField& WaveField::operator*=(Complex c) {
  for (auto& s : samples_) s *= c;
  return *this;
}

double total_power(const WaveField& field) {
  double sum = 0.0;
  for (const auto& s : field.samples()) sum += std::norm(s);
  return sum;
}

double spatial_frequency(int k, int n, double pitch) {
  const int signed_k = (k <= n / 2) ? k : k - n;
  return signed_k / (n * pitch);
}

namespace {

fft::AlignedBuffer transform_copy(std::span<const Complex> in, int ny, int nx, fft::Direction dir) {
  fft::AlignedBuffer buf(in.size());
  std::copy(in.begin(), in.end(), buf.data());
  fft::transform_2d(buf, ny, nx, dir);
  const double scale = 1.0 / std::sqrt(static_cast<double>(in.size()));
  for (auto& v : buf.span()) v *= scale;
  return buf;
}

}  // namespace

std::vector<Complex> spectral_transform(const WaveField& field) {
  const auto& g = field.grid();
  auto buf = transform_copy(field.samples(), g.ny, g.nx, fft::Direction::forward);
  return {buf.data(), buf.data() + buf.size()};
}

WaveField inverse_spectral_transform(const GridSpec& grid, std::span<const Complex> spectrum) {
  if (spectrum.size() != grid.size()) {
    throw DimensionError("inverse_spectral_transform: spectrum size does not match grid");
  }
  auto buf = transform_copy(spectrum, grid.ny, grid.nx, fft::Direction::inverse);
  return WaveField(grid, std::vector<Complex>(buf.data(), buf.data() + buf.size()));
}

}  // namespace rodnn
