#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace rodnn {

using Complex = std::complex<double>;

/// Uniform sampling grid of one optical plane. Lengths are in micrometres.
struct GridSpec {
  int nx = 120;
  int ny = 120;
  double pitch = 1.0;
  double wavelength = 1.55;

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  double extent_x() const { return nx * pitch; }
  double extent_y() const { return ny * pitch; }

  // Sample centres are symmetric about the optical axis.
  double x_center(int ix) const { return (ix + 0.5 - nx / 2.0) * pitch; }
  double y_center(int iy) const { return (iy + 0.5 - ny / 2.0) * pitch; }

  bool same_shape(const GridSpec& other) const { return nx == other.nx && ny == other.ny; }

  /// Throws InvalidArgument when a count is < 1 or a length is not positive.
  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

/// Complex scalar field on a GridSpec, stored row-major as (iy, ix).
class WaveField {
 public:
  explicit WaveField(const GridSpec& grid);
  WaveField(const GridSpec& grid, std::vector<Complex> samples);

  const GridSpec& grid() const { return grid_; }

  std::span<const Complex> samples() const { return samples_; }
  std::span<Complex> samples() { return samples_; }

  const Complex& at(int iy, int ix) const { return samples_[index(iy, ix)]; }
  Complex& at(int iy, int ix) { return samples_[index(iy, ix)]; }

  std::size_t index(int iy, int ix) const {
    return static_cast<std::size_t>(iy) * static_cast<std::size_t>(grid_.nx) + static_cast<std::size_t>(ix);
  }

  WaveField& operator*=(Complex c);

 private:
  GridSpec grid_;
  std::vector<Complex> samples_;
};

/// Sum of |sample|^2 over the grid (no area weighting).
double total_power(const WaveField& field);

/// Physical spatial frequency (1/um) of DFT bin k on an n-point axis, with
/// indices above n/2 wrapped to negative frequencies.
double spatial_frequency(int k, int n, double pitch);

/// Unitary 2D DFT: forward and inverse both scale by 1/sqrt(nx*ny), so the
/// round trip is the identity and sum |x|^2 == sum |X|^2.
std::vector<Complex> spectral_transform(const WaveField& field);
WaveField inverse_spectral_transform(const GridSpec& grid, std::span<const Complex> spectrum);

}  // namespace rodnn
