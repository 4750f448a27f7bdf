#include "rodnn/commands.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "rodnn/error.hpp"
#include "rodnn/fft.hpp"

namespace rodnn {

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("write failed for " + path.string());
}

Checkpoint load_checked(const RunConfig& config, const std::filesystem::path& path) {
  Checkpoint ck = load_checkpoint(path);
  ck.network.validate();
  if (!ck.network.grid.same_shape(config.grid)) {
    throw InvalidArgument("checkpoint grid " + std::to_string(ck.network.grid.nx) + "x" +
                          std::to_string(ck.network.grid.ny) + " does not match config grid");
  }
  return ck;
}

Dataset head(const Dataset& data, std::size_t count) {
  return count == 0 ? data : data.slice(0, count);
}

}  // namespace

DataSplits make_splits(const RunConfig& config, const Dataset& train_file, const Dataset& test_file) {
  if (config.val_samples >= train_file.size()) {
    throw InvalidArgument("train.val_samples (" + std::to_string(config.val_samples) +
                          ") must be smaller than the training file (" + std::to_string(train_file.size()) + ")");
  }
  const std::size_t rest = train_file.size() - config.val_samples;
  const std::size_t n_train = config.train_samples == 0 ? rest : std::min(config.train_samples, rest);
  DataSplits splits;
  splits.train = train_file.slice(0, n_train);
  splits.validation = train_file.slice(rest, config.val_samples);
  splits.test = head(test_file, config.eval_samples);
  return splits;
}

DataSplits load_splits(const RunConfig& config) {
  return make_splits(config, load_idx_dir(config.dataset_dir, Split::train),
                     load_idx_dir(config.dataset_dir, Split::test));
}

void configure_fft(const RunConfig& config) {
  if (config.fft_wisdom) {
    fft::configure_planner(fft::PlannerEffort::measure, config.fft_wisdom);
  } else {
    fft::configure_planner(fft::PlannerEffort::estimate);
  }
}

std::string metrics_csv(const std::vector<EpochMetrics>& history) {
  std::string out = "epoch,gamma,train_loss,train_acc,val_acc\n";
  for (const auto& m : history) {
    out += fmt::format("{},{:.9g},{:.9g},{:.6f},{:.6f}\n", m.epoch, m.gamma, m.train_loss, m.train_accuracy,
                       m.val_accuracy);
  }
  return out;
}

std::string confusion_csv(const ConfusionMatrix& cm) {
  std::string out = "true\\predicted";
  for (int j = 0; j < kNumClasses; ++j) out += fmt::format(",{}", j);
  out += '\n';
  for (int i = 0; i < kNumClasses; ++i) {
    out += std::to_string(i);
    for (int j = 0; j < kNumClasses; ++j) out += fmt::format(",{}", cm.counts[i][j]);
    out += '\n';
  }
  return out;
}

TrainOpticalOutput cmd_train_optical(const RunConfig& config, const DataSplits& data, std::ostream& log) {
  config.validate();
  const DiffractiveNetwork initial = config.make_network();
  log << fmt::format("training optical section: {} train / {} validation samples, {} epochs\n", data.train.size(),
                     data.validation.size(), config.optical.schedule.total_epochs());
  auto on_epoch = [&](const EpochMetrics& m) {
    log << fmt::format("epoch {:4d}  gamma {:+.3e}  loss {:.5f}  train {:.4f}  val {:.4f}\n", m.epoch, m.gamma,
                       m.train_loss, m.train_accuracy, m.val_accuracy)
        << std::flush;
  };
  TrainOpticalOutput out;
  out.result = train_optical(initial, data.train, data.validation, config.optical, config.seed, on_epoch);
  log << fmt::format("validation accuracy: real-valued {:.4f}, binarized {:.4f}\n", out.result.val_accuracy_real,
                     out.result.val_accuracy_binary);

  std::filesystem::create_directories(config.output_dir);
  out.checkpoint = config.output_dir / "network.rodn";
  out.metrics = config.output_dir / "metrics.csv";
  save_network(out.result.network, out.checkpoint);
  write_text(out.metrics, metrics_csv(out.result.history));
  write_text(config.output_dir / "config.txt", config.to_text());
  return out;
}

TrainCorrectingOutput cmd_train_correcting(const RunConfig& config, const std::filesystem::path& checkpoint,
                                           const DataSplits& data, std::ostream& log) {
  config.validate();
  TrainCorrectingOutput out;
  out.checkpoint = load_checked(config, checkpoint);
  const auto& net = out.checkpoint.network;
  if (!net.binarized) throw InvalidArgument("train-correcting: checkpoint is not binarized");

  const Dataset train = head(data.train, config.correcting_samples);
  const int threads = config.optical.threads;
  log << fmt::format("computing frozen optical outputs for {} + {} samples\n", train.size(), data.validation.size());
  const auto train_x = detector_outputs(net, train, config.optical.encoding, threads);
  const auto val_x = detector_outputs(net, data.validation, config.optical.encoding, threads);

  out.result = train_correcting(train_x, train.labels, config.correcting, config.seed, val_x, data.validation.labels);
  out.checkpoint.correcting = out.result.layer;
  out.val_accuracy_optical = evaluate_outputs(val_x, data.validation.labels).accuracy();
  out.val_accuracy_corrected = evaluate_outputs(val_x, data.validation.labels, &out.result.layer).accuracy();
  log << fmt::format("validation accuracy: optical only {:.4f}, with correcting layer {:.4f}\n",
                     out.val_accuracy_optical, out.val_accuracy_corrected);

  std::filesystem::create_directories(config.output_dir);
  out.checkpoint_path = config.output_dir / "network.rodn";
  save_network(out.checkpoint, out.checkpoint_path);
  write_text(config.output_dir / "correcting_metrics.csv", metrics_csv(out.result.history));
  return out;
}

EvalOutput cmd_eval(const RunConfig& config, const std::filesystem::path& checkpoint, const Dataset& data,
                    bool use_correcting, std::ostream& log) {
  const Checkpoint ck = load_checked(config, checkpoint);
  EvalOutput out;
  out.used_correcting = use_correcting && ck.correcting.has_value();
  if (use_correcting && !ck.correcting) log << "checkpoint has no correcting layer; evaluating optical only\n";
  out.confusion = evaluate(ck.network, data, config.optical.encoding, config.optical.threads,
                           out.used_correcting ? &*ck.correcting : nullptr);
  std::filesystem::create_directories(config.output_dir);
  write_text(config.output_dir / "confusion.csv", confusion_csv(out.confusion));
  write_text(config.output_dir / "eval.csv",
             fmt::format("samples,correct,accuracy,correcting\n{},{},{:.6f},{}\n", out.confusion.total(),
                         out.confusion.correct(), out.confusion.accuracy(), out.used_correcting ? 1 : 0));
  log << fmt::format("accuracy {:.6f} ({} / {}){}\n", out.confusion.accuracy(), out.confusion.correct(),
                     out.confusion.total(), out.used_correcting ? " with correcting layer" : "");
  return out;
}

SweepKind parse_sweep_kind(std::string_view name) {
  if (name == "axial") return SweepKind::axial;
  if (name == "theta") return SweepKind::theta;
  if (name == "kratio") return SweepKind::kratio;
  if (name == "geometry") return SweepKind::geometry;
  if (name == "distance") return SweepKind::distance;
  if (name == "layers") return SweepKind::layers;
  throw InvalidArgument("unknown sweep kind '" + std::string(name) + "'");
}

namespace {

NeuronGeometry with_param(NeuronGeometry g, const std::string& param, double value) {
  if (param == "thickness") g.thickness = value;
  else if (param == "side") g.side = value;
  else if (param == "n_amorphous") g.n_amorphous = value;
  else if (param == "n_crystalline") g.n_crystalline = value;
  else throw InvalidArgument("unknown geometry parameter '" + param + "'");
  return g;
}

}  // namespace

std::vector<SweepRow> cmd_sweep(const RunConfig& config, const std::filesystem::path& checkpoint,
                                const DataSplits& data, const SweepSpec& spec, std::ostream& log) {
  config.validate();
  const Checkpoint ck = load_checked(config, checkpoint);
  const bool from_scratch = spec.kind == SweepKind::distance || spec.kind == SweepKind::layers;

  // Reject bad grid values before any point runs.
  for (double v : spec.values) {
    switch (spec.kind) {
      case SweepKind::axial:
        inject_error(ck.network, AxialShift{std::vector<double>(ck.network.distances.size(), v)});
        break;
      case SweepKind::theta: NeuronPhysics{v, 1.0}.validate(); break;
      case SweepKind::kratio: NeuronPhysics{std::numbers::pi, v}.validate(); break;
      case SweepKind::geometry: slab_phase_model(with_param(config.geometry, spec.geometry_param, v)); break;
      case SweepKind::distance:
        if (!(v > 0.0)) throw InvalidArgument("sweep: distances must be > 0");
        break;
      case SweepKind::layers:
        if (v < 1.0 || v != std::floor(v)) throw InvalidArgument("sweep: layer counts must be positive integers");
        break;
    }
  }

  const Dataset retrain_set = head(data.train, config.sweep_retrain_samples);
  CorrectingTrainConfig retrain_cfg = config.correcting;
  retrain_cfg.epochs = config.sweep_retrain_epochs;
  const int threads = config.optical.threads;
  const auto& enc = config.optical.encoding;

  std::vector<SweepRow> rows;
  for (double v : spec.values) {
    DiffractiveNetwork net;
    if (from_scratch) {
      RunConfig point = config;
      if (spec.kind == SweepKind::layers) point.set("network.layers", std::to_string(static_cast<int>(v)));
      const double d = spec.kind == SweepKind::distance ? v : config.distances.front();
      point.distances.assign(static_cast<std::size_t>(point.num_layers) + 1, d);
      net = train_optical(point.make_network(), data.train, data.validation, point.optical, point.seed).network;
    } else {
      ErrorSpec err;
      switch (spec.kind) {
        case SweepKind::axial: err = AxialShift{std::vector<double>(ck.network.distances.size(), v)}; break;
        case SweepKind::theta: err = PhaseDifference{v}; break;
        case SweepKind::kratio: err = TransmittanceRatio{v}; break;
        default: err = GeometryError{with_param(config.geometry, spec.geometry_param, v)}; break;
      }
      net = inject_error(ck.network, err);
    }
    SweepRow row;
    row.value = v;
    row.accuracy = evaluate(net, data.test, enc, threads).accuracy();
    if (spec.retrain_correcting) {
      const auto x = detector_outputs(net, retrain_set, enc, threads);
      const auto w = train_correcting(x, retrain_set.labels, retrain_cfg, config.seed).layer;
      row.accuracy_after_retrain = evaluate(net, data.test, enc, threads, &w).accuracy();
    }
    log << fmt::format("value {:.6g}: accuracy {:.4f}", v, row.accuracy);
    if (row.accuracy_after_retrain) log << fmt::format(", after retraining {:.4f}", *row.accuracy_after_retrain);
    log << '\n' << std::flush;
    rows.push_back(row);
  }
  write_text(config.output_dir / "sweep.csv", sweep_csv(rows));
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "value,accuracy,accuracy_after_retrain\n";
  for (const auto& r : rows) {
    out += fmt::format("{:.9g},{:.6f},", r.value, r.accuracy);
    if (r.accuracy_after_retrain) out += fmt::format("{:.6f}", *r.accuracy_after_retrain);
    out += '\n';
  }
  return out;
}

ExportOutput cmd_export_field(const RunConfig& config, const std::filesystem::path& checkpoint, const Dataset& data,
                              std::size_t index, std::ostream& log) {
  if (index >= data.size()) {
    throw InvalidArgument("export-field: sample " + std::to_string(index) + " out of range (dataset has " +
                          std::to_string(data.size()) + ")");
  }
  const Checkpoint ck = load_checked(config, checkpoint);
  const auto& net = ck.network;
  const WaveField input = encode_image(data.image(index), data.rows, data.cols, config.optical.encoding, net.grid);
  const ForwardTrace trace = forward_trace(net, input);

  std::vector<const WaveField*> planes{&trace.input};
  std::vector<std::string> names{"input"};
  for (std::size_t l = 0; l < trace.layer_outputs.size(); ++l) {
    planes.push_back(&trace.layer_outputs[l]);
    names.push_back(fmt::format("after_layer_{}", l + 1));
  }
  planes.push_back(&trace.detector_field);
  names.push_back("detector");

  std::filesystem::create_directories(config.output_dir);
  ExportOutput out;
  out.detector_powers = trace.powers;
  std::string summary = "plane,name,z_um,total_power\n";
  double z = 0.0;
  for (std::size_t k = 0; k < planes.size(); ++k) {
    if (k > 0) z += net.distances[k - 1];
    const WaveField& f = *planes[k];
    std::string grid_text;
    for (int iy = 0; iy < f.grid().ny; ++iy) {
      for (int ix = 0; ix < f.grid().nx; ++ix) {
        grid_text += fmt::format("{}{:.9g}", ix ? "," : "", std::norm(f.at(iy, ix)));
      }
      grid_text += '\n';
    }
    write_text(config.output_dir / fmt::format("plane_{}.csv", k), grid_text);
    const double p = total_power(f);
    out.plane_power.push_back(p);
    summary += fmt::format("{},{},{:.9g},{:.12g}\n", k, names[k], z, p);
  }
  write_text(config.output_dir / "planes.csv", summary);

  std::string det = "detector,cx_um,cy_um,side_um,power\n";
  for (int d = 0; d < kNumClasses; ++d) {
    const auto& r = net.detectors.regions[d];
    det += fmt::format("{},{:.9g},{:.9g},{:.9g},{:.12g}\n", d, r.cx, r.cy, r.side, trace.powers[d]);
  }
  write_text(config.output_dir / "detectors.csv", det);
  log << fmt::format("exported {} planes for sample {} (label {})\n", planes.size(), index, data.labels[index]);
  return out;
}

}  // namespace rodnn
