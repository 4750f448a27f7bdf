#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rodnn/run_config.hpp"

namespace rodnn {

/// Training subset, held-out validation tail, and test set of one dataset.
struct DataSplits {
  Dataset train;
  Dataset validation;
  Dataset test;
};

/// Splits a training file and a test file according to the sample counts in
/// `config`: validation is the last val_samples items of `train_file`, the
/// optical training subset is taken from the front of the remainder.
DataSplits make_splits(const RunConfig& config, const Dataset& train_file, const Dataset& test_file);

/// make_splits on the IDX files found in config.dataset_dir.
DataSplits load_splits(const RunConfig& config);

/// Applies config.fft_wisdom to the FFT planner.
void configure_fft(const RunConfig& config);

std::string metrics_csv(const std::vector<EpochMetrics>& history);
std::string confusion_csv(const ConfusionMatrix& cm);

struct TrainOpticalOutput {
  OpticalTrainResult result;
  std::filesystem::path checkpoint;
  std::filesystem::path metrics;
};

/// Trains the optical section and writes network.rodn, metrics.csv and
/// config.txt into config.output_dir.
TrainOpticalOutput cmd_train_optical(const RunConfig& config, const DataSplits& data, std::ostream& log);

struct TrainCorrectingOutput {
  Checkpoint checkpoint;
  CorrectingTrainResult result;
  double val_accuracy_optical = 0.0;
  double val_accuracy_corrected = 0.0;
  std::filesystem::path checkpoint_path;
};

/// Trains the correcting layer on a frozen binarized checkpoint, writes the
/// checkpoint with W appended to <output_dir>/network.rodn and the per-epoch
/// history to correcting_metrics.csv. Refuses non-binarized checkpoints.
TrainCorrectingOutput cmd_train_correcting(const RunConfig& config, const std::filesystem::path& checkpoint,
                                           const DataSplits& data, std::ostream& log);

struct EvalOutput {
  ConfusionMatrix confusion;
  bool used_correcting = false;
};

/// Evaluates `data` and writes confusion.csv and eval.csv into output_dir.
EvalOutput cmd_eval(const RunConfig& config, const std::filesystem::path& checkpoint, const Dataset& data,
                    bool use_correcting, std::ostream& log);

enum class SweepKind { axial, theta, kratio, geometry, distance, layers };

SweepKind parse_sweep_kind(std::string_view name);

struct SweepSpec {
  SweepKind kind = SweepKind::axial;
  std::vector<double> values;
  bool retrain_correcting = false;
  std::string geometry_param = "thickness";  // thickness | side | n_amorphous | n_crystalline
};

struct SweepRow {
  double value = 0.0;
  double accuracy = 0.0;  // optical only (argmax of detector powers)
  std::optional<double> accuracy_after_retrain;
};

/// Evaluates the checkpoint under each perturbation in spec.values, in order.
/// axial adds the value to every gap; theta/kratio replace Theta/K; geometry
/// sets one NeuronGeometry field and maps it through slab_phase_model;
/// distance and layers retrain the optical section from scratch per point.
/// Writes sweep.csv into output_dir.
std::vector<SweepRow> cmd_sweep(const RunConfig& config, const std::filesystem::path& checkpoint,
                                const DataSplits& data, const SweepSpec& spec, std::ostream& log);

std::string sweep_csv(const std::vector<SweepRow>& rows);

struct ExportOutput {
  std::vector<double> plane_power;
  ClassVector detector_powers{};
};

/// Writes |field|^2 of every plane (input, after each layer, detector plane)
/// as plane_<k>.csv, their powers as planes.csv, and the detector overlay
/// with integrated powers as detectors.csv. Throws InvalidArgument when the
/// sample index is out of range.
ExportOutput cmd_export_field(const RunConfig& config, const std::filesystem::path& checkpoint,
                              const Dataset& data, std::size_t index, std::ostream& log);

}  // namespace rodnn
