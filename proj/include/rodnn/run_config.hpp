#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rodnn/dataio.hpp"
#include "rodnn/optical_net.hpp"
#include "rodnn/training.hpp"

namespace rodnn {

/// Every tunable of a run. Defaults reproduce the 120x120, three-layer,
/// 50 um setup; see docs/CONFIG.md for the key reference.
struct RunConfig {
  GridSpec grid;
  int num_layers = 3;
  std::vector<double> distances{50.0, 50.0, 50.0, 50.0};
  NeuronPhysics physics;
  NeuronGeometry geometry;
  DetectorLayout detectors = DetectorLayout::rows_3_4_3(10.0, 20.0, 20.0);
  PropagationParams propagation;

  OpticalTrainConfig optical;
  CorrectingTrainConfig correcting;

  std::size_t train_samples = 0;  // 0: everything not held out for validation
  std::size_t val_samples = 5000;  // tail of the training file
  std::size_t correcting_samples = 0;  // 0: same as the optical training subset
  std::size_t eval_samples = 0;  // 0: the whole test file

  int sweep_retrain_epochs = 20;
  std::size_t sweep_retrain_samples = 10000;

  std::uint64_t seed = 1;
  std::filesystem::path dataset_dir = "data/mnist";
  std::filesystem::path output_dir = "out";
  std::optional<std::filesystem::path> fft_wisdom;

  /// Network with zero-phase layers built from the geometry keys.
  DiffractiveNetwork make_network() const;

  /// Applies one `key = value` setting. Throws InvalidArgument for unknown
  /// keys or unparsable values.
  void set(std::string_view key, std::string_view value);

  /// Checks every module precondition before any work starts.
  void validate() const;

  /// Flat text that parse_config() reads back into an equal config.
  std::string to_text() const;
};

/// Parses `key = value` lines; blank lines and `#` comments are ignored.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// Parses a real number, accepting a trailing "pi" factor ("0.8pi", "pi").
double parse_real(std::string_view text);
std::vector<double> parse_real_list(std::string_view text);

}  // namespace rodnn
