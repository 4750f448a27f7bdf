#pragma once

#include <array>
#include <complex>
#include <numbers>
#include <span>
#include <variant>
#include <vector>

#include "rodnn/propagation.hpp"
#include "rodnn/wavefield.hpp"

namespace rodnn {

inline constexpr int kNumClasses = 10;
using ClassVector = std::array<double, kNumClasses>;

/// Two-state neuron response: the crystalline state is shifted by
/// theta_max relative to the amorphous reference and its power transmittance
/// is k_ratio times the reference.
struct NeuronPhysics {
  double theta_max = std::numbers::pi;
  double k_ratio = 1.0;

  void validate() const;
  bool operator==(const NeuronPhysics&) const = default;
};

enum class NeuronState { amorphous, crystalline };

/// Eq. T = k e^{i theta} for a binary neuron: 1 for amorphous,
/// sqrt(K) e^{i Theta} for crystalline.
Complex neuron_transmission(NeuronState state, const NeuronPhysics& physics);

/// One plane of neurons. `phase` holds theta (radians) per neuron and
/// `amplitude` holds k; both are row-major on `grid`.
struct DiffractiveLayer {
  GridSpec grid;
  std::vector<double> phase;
  std::vector<double> amplitude;

  explicit DiffractiveLayer(const GridSpec& g)
      : grid(g), phase(g.size(), 0.0), amplitude(g.size(), 1.0) {}

  bool operator==(const DiffractiveLayer&) const = default;
};

/// out_i = field_i * k_i * exp(i theta_i). Throws DimensionError on grid mismatch.
WaveField apply_layer(const WaveField& field, const DiffractiveLayer& layer);

/// Square detector centred at (cx, cy) with side `side`, all in um. A sample
/// belongs to the region when its centre lies in [c - side/2, c + side/2)
/// along both axes.
struct DetectorRegion {
  double cx = 0.0;
  double cy = 0.0;
  double side = 10.0;

  bool contains(double x, double y) const;
  bool operator==(const DetectorRegion&) const = default;
};

struct DetectorLayout {
  std::array<DetectorRegion, kNumClasses> regions{};

  /// Ten squares in a 3-4-3 row arrangement centred on the axis. Rows sit at
  /// y = -row_spacing, 0, +row_spacing; neighbours in a row are col_pitch apart.
  static DetectorLayout rows_3_4_3(double side, double row_spacing, double col_pitch);

  /// Regions must lie inside the grid extent and not overlap.
  void validate(const GridSpec& grid) const;

  /// Flat sample indices belonging to each region.
  std::array<std::vector<std::size_t>, kNumClasses> masks(const GridSpec& grid) const;

  bool operator==(const DetectorLayout&) const = default;
};

/// Stack of diffractive layers between an input plane and a detector plane.
/// distances[0] is input -> first layer, distances.back() is last layer -> detectors.
struct DiffractiveNetwork {
  GridSpec grid;
  std::vector<DiffractiveLayer> layers;
  std::vector<double> distances;
  NeuronPhysics physics;
  DetectorLayout detectors;
  PropagationParams propagation;
  bool binarized = false;

  /// Zero-phase, unit-amplitude layers with every gap equal to `distance`.
  static DiffractiveNetwork uniform(const GridSpec& grid, int num_layers, double distance,
                                    const DetectorLayout& detectors);

  void validate() const;
  bool operator==(const DiffractiveNetwork&) const = default;
};

/// Integrated |field|^2 * pitch^2 over each detector region.
ClassVector detect(const WaveField& field, const DetectorLayout& layout);

/// Argmax with ties going to the lowest index.
int classify(std::span<const double> scores);

struct ForwardResult {
  ClassVector powers{};
  WaveField output;
};

ForwardResult forward(const DiffractiveNetwork& net, const WaveField& input);

/// All planes visited by forward(): the input, the field leaving each layer,
/// and the detector-plane field.
struct ForwardTrace {
  WaveField input;
  std::vector<WaveField> layer_outputs;
  WaveField detector_field;
  ClassVector powers{};
};

ForwardTrace forward_trace(const DiffractiveNetwork& net, const WaveField& input);

/// A network prepared for many evaluations: the per-neuron coefficients
/// k e^{i theta} and the detector masks are computed once. Holds its own copy
/// of everything it needs; safe to share read-only across threads.
class ForwardModel {
 public:
  explicit ForwardModel(const DiffractiveNetwork& net);

  ForwardResult forward(const WaveField& input) const;
  ForwardTrace trace(const WaveField& input) const;
  ClassVector detect(const WaveField& field) const;

  const GridSpec& grid() const { return grid_; }
  std::size_t num_layers() const { return transmission_.size(); }
  std::span<const Complex> transmission(std::size_t layer) const { return transmission_[layer]; }
  double distance(std::size_t gap) const { return distances_[gap]; }
  const PropagationParams& propagation() const { return propagation_; }
  const std::array<std::vector<std::size_t>, kNumClasses>& masks() const { return masks_; }

 private:
  void check_input(const WaveField& input) const;

  GridSpec grid_;
  std::vector<std::vector<Complex>> transmission_;
  std::vector<double> distances_;
  PropagationParams propagation_;
  std::array<std::vector<std::size_t>, kNumClasses> masks_;
};

/// Geometry of one PCM-filled etch (lengths in um).
struct NeuronGeometry {
  double thickness = 1.0;
  double side = 0.8;
  double pitch = 1.0;
  double n_crystalline = 3.28;
  double n_amorphous = 4.05;
  double n_clad = 1.444;
  double wavelength = 1.55;

  bool operator==(const NeuronGeometry&) const = default;
};

/// Thin-slab estimate of (Theta, K): Theta = 2 pi t (n_a - n_c) / lambda wrapped to
/// [0, 2 pi), K = 1. Throws InvalidArgument for non-positive lengths or side > pitch.
NeuronPhysics slab_phase_model(const NeuronGeometry& geometry);

struct AxialShift {
  std::vector<double> delta;  // one entry per gap, um
};
struct PhaseDifference {
  double theta;
};
struct TransmittanceRatio {
  double k_ratio;
};
struct GeometryError {
  NeuronGeometry geometry;
};
using ErrorSpec = std::variant<AxialShift, PhaseDifference, TransmittanceRatio, GeometryError>;

/// Returns a perturbed copy. Crystalline neurons (non-zero phase) take
/// the new Theta' / sqrt(K'); the input network is not modified. Requires a
/// binarized network for neuron errors. Throws InvalidArgument if a gap would
/// become non-positive.
DiffractiveNetwork inject_error(const DiffractiveNetwork& net, const ErrorSpec& spec);

}  // namespace rodnn
