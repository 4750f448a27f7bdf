#include "rodnn/run_config.hpp"

#include <fmt/format.h>

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "rodnn/error.hpp"

namespace rodnn {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

long long parse_int(std::string_view text) {
  const std::string s(trim(text));
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || errno != 0 || end != s.c_str() + s.size()) throw InvalidArgument("not an integer: '" + s + "'");
  return v;
}

std::size_t parse_count(std::string_view text) {
  const auto v = parse_int(text);
  if (v < 0) throw InvalidArgument("expected a non-negative count, got " + std::to_string(v));
  return static_cast<std::size_t>(v);
}

bool parse_bool(std::string_view text) {
  const auto s = trim(text);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw InvalidArgument("not a boolean: '" + std::string(s) + "'");
}

std::string fmt_real(double v) { return fmt::format("{}", v); }

std::string fmt_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + fmt_real(values[i]);
  return out;
}

}  // namespace

double parse_real(std::string_view text) {
  std::string s(trim(text));
  double factor = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    factor = std::numbers::pi;
    s.resize(s.size() - 2);
    s = std::string(trim(s));
    if (s.empty() || s == "+") return factor;
    if (s == "-") return -factor;
    if (s.back() == '*') s.pop_back();
  }
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || errno != 0 || end != s.c_str() + s.size() || !std::isfinite(v)) {
    throw InvalidArgument("not a number: '" + std::string(trim(text)) + "'");
  }
  return v * factor;
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (auto item : split(text, ',')) {
    if (!item.empty()) out.push_back(parse_real(item));
  }
  return out;
}

DiffractiveNetwork RunConfig::make_network() const {
  DiffractiveNetwork net;
  net.grid = grid;
  net.layers.assign(static_cast<std::size_t>(num_layers), DiffractiveLayer(grid));
  net.distances = distances;
  net.physics = physics;
  net.detectors = detectors;
  net.propagation = propagation;
  net.validate();
  return net;
}

void RunConfig::set(std::string_view raw_key, std::string_view value) {
  const auto key = trim(raw_key);
  auto& opt = optical;
  try {
    if (key == "grid.nx") grid.nx = static_cast<int>(parse_int(value));
    else if (key == "grid.ny") grid.ny = static_cast<int>(parse_int(value));
    else if (key == "grid.pitch_um") grid.pitch = parse_real(value);
    else if (key == "grid.wavelength_um") grid.wavelength = parse_real(value);
    else if (key == "network.layers") {
      num_layers = static_cast<int>(parse_int(value));
      const double d = distances.empty() ? 50.0 : distances.front();
      distances.assign(static_cast<std::size_t>(std::max(num_layers, 0)) + 1, d);
    } else if (key == "network.distance_um") {
      distances.assign(static_cast<std::size_t>(std::max(num_layers, 0)) + 1, parse_real(value));
    } else if (key == "network.distances_um") {
      distances = parse_real_list(value);
    } else if (key == "physics.theta") physics.theta_max = parse_real(value);
    else if (key == "physics.k_ratio") physics.k_ratio = parse_real(value);
    else if (key == "geometry.thickness_um") geometry.thickness = parse_real(value);
    else if (key == "geometry.side_um") geometry.side = parse_real(value);
    else if (key == "geometry.pitch_um") geometry.pitch = parse_real(value);
    else if (key == "geometry.n_crystalline") geometry.n_crystalline = parse_real(value);
    else if (key == "geometry.n_amorphous") geometry.n_amorphous = parse_real(value);
    else if (key == "geometry.n_clad") geometry.n_clad = parse_real(value);
    else if (key == "geometry.wavelength_um") geometry.wavelength = parse_real(value);
    else if (key == "detector.layout") {
      // "side,row_spacing,col_pitch" for the 3-4-3 arrangement
      const auto v = parse_real_list(value);
      if (v.size() != 3) throw InvalidArgument("detector.layout needs side,row_spacing,col_pitch");
      detectors = DetectorLayout::rows_3_4_3(v[0], v[1], v[2]);
    } else if (key == "detector.regions") {
      const auto items = split(value, ';');
      if (items.size() != kNumClasses) throw InvalidArgument("detector.regions needs 10 cx:cy:side entries");
      for (int i = 0; i < kNumClasses; ++i) {
        const auto parts = split(items[i], ':');
        if (parts.size() != 3) throw InvalidArgument("detector region must be cx:cy:side");
        detectors.regions[i] = {parse_real(parts[0]), parse_real(parts[1]), parse_real(parts[2])};
      }
    } else if (key == "propagation.pad_factor") propagation.pad_factor = static_cast<int>(parse_int(value));
    else if (key == "propagation.evanescent") {
      const auto v = trim(value);
      if (v == "zero_out") propagation.evanescent = EvanescentPolicy::zero_out;
      else if (v == "keep_decaying") propagation.evanescent = EvanescentPolicy::keep_decaying;
      else throw InvalidArgument("evanescent must be zero_out or keep_decaying");
    } else if (key == "penalty.gamma_start") opt.schedule.gamma_start = parse_real(value);
    else if (key == "penalty.gamma_max") opt.schedule.gamma_max = parse_real(value);
    else if (key == "penalty.ramp_epochs") opt.schedule.ramp_epochs = static_cast<int>(parse_int(value));
    else if (key == "penalty.hold_epochs") opt.schedule.hold_epochs = static_cast<int>(parse_int(value));
    else if (key == "penalty.form") {
      const auto v = trim(value);
      if (v == "double_well") opt.penalty_form = PenaltyForm::double_well;
      else if (v == "literal") opt.penalty_form = PenaltyForm::literal;
      else throw InvalidArgument("penalty.form must be double_well or literal");
    } else if (key == "train.mode") {
      const auto v = trim(value);
      if (v == "penalty") opt.mode = TrainingMode::penalty;
      else if (v == "ste") opt.mode = TrainingMode::straight_through;
      else throw InvalidArgument("train.mode must be penalty or ste");
    } else if (key == "train.ste_jacobian") {
      const auto v = trim(value);
      if (v == "latent") opt.ste_jacobian = SteJacobian::latent;
      else if (v == "binarized") opt.ste_jacobian = SteJacobian::binarized;
      else throw InvalidArgument("train.ste_jacobian must be latent or binarized");
    } else if (key == "train.batch_size") opt.batch_size = static_cast<int>(parse_int(value));
    else if (key == "train.learning_rate") opt.adam.learning_rate = parse_real(value);
    else if (key == "train.beta1") opt.adam.beta1 = parse_real(value);
    else if (key == "train.beta2") opt.adam.beta2 = parse_real(value);
    else if (key == "train.epsilon") opt.adam.epsilon = parse_real(value);
    else if (key == "train.logit_scale") opt.logits.scale = parse_real(value);
    else if (key == "train.logit_normalize") opt.logits.normalize = parse_bool(value);
    else if (key == "train.samples") train_samples = parse_count(value);
    else if (key == "train.val_samples") val_samples = parse_count(value);
    else if (key == "train.threads") opt.threads = static_cast<int>(parse_int(value));
    else if (key == "encoding.upsample") opt.encoding.upsample = static_cast<int>(parse_int(value));
    else if (key == "correcting.learning_rate") correcting.adam.learning_rate = parse_real(value);
    else if (key == "correcting.epochs") correcting.epochs = static_cast<int>(parse_int(value));
    else if (key == "correcting.batch_size") correcting.batch_size = static_cast<int>(parse_int(value));
    else if (key == "correcting.bias") correcting.use_bias = parse_bool(value);
    else if (key == "correcting.init") {
      const auto v = trim(value);
      if (v == "random") correcting.identity_init = false;
      else if (v == "identity") correcting.identity_init = true;
      else throw InvalidArgument("correcting.init must be random or identity");
    } else if (key == "correcting.samples") correcting_samples = parse_count(value);
    else if (key == "eval.samples") eval_samples = parse_count(value);
    else if (key == "sweep.retrain_epochs") sweep_retrain_epochs = static_cast<int>(parse_int(value));
    else if (key == "sweep.retrain_samples") sweep_retrain_samples = parse_count(value);
    else if (key == "seed") seed = static_cast<std::uint64_t>(parse_int(value));
    else if (key == "dataset.dir") dataset_dir = std::string(trim(value));
    else if (key == "output.dir") output_dir = std::string(trim(value));
    else if (key == "fft.wisdom") {
      const auto v = trim(value);
      fft_wisdom = v.empty() ? std::nullopt : std::optional<std::filesystem::path>(std::string(v));
    } else {
      throw InvalidArgument("unknown config key '" + std::string(key) + "'");
    }
  } catch (const InvalidArgument& e) {
    const std::string msg = e.what();
    if (msg.rfind("unknown config key", 0) == 0) throw;
    throw InvalidArgument("config key '" + std::string(key) + "': " + msg);
  }
}

void RunConfig::validate() const {
  grid.validate();
  if (num_layers < 1) throw InvalidArgument("network.layers must be >= 1");
  make_network();
  if (optical.mode == TrainingMode::penalty) optical.schedule.validate();
  if (optical.schedule.ramp_epochs < 0 || optical.schedule.hold_epochs < 0) {
    throw InvalidArgument("penalty epochs must be >= 0");
  }
  if (optical.batch_size < 1) throw InvalidArgument("train.batch_size must be >= 1");
  if (optical.threads < 1) throw InvalidArgument("train.threads must be >= 1");
  if (!(optical.adam.learning_rate > 0.0)) throw InvalidArgument("train.learning_rate must be > 0");
  if (!(optical.logits.scale > 0.0)) throw InvalidArgument("train.logit_scale must be > 0");
  if (optical.encoding.upsample < 1) throw InvalidArgument("encoding.upsample must be >= 1");
  if (28 * optical.encoding.upsample > grid.nx || 28 * optical.encoding.upsample > grid.ny) {
    throw InvalidArgument("encoding.upsample: a 28x28 image does not fit the grid");
  }
  if (correcting.epochs < 0 || correcting.batch_size < 1) throw InvalidArgument("correcting epochs/batch invalid");
  if (!(correcting.adam.learning_rate > 0.0)) throw InvalidArgument("correcting.learning_rate must be > 0");
  if (sweep_retrain_epochs < 0) throw InvalidArgument("sweep.retrain_epochs must be >= 0");
  slab_phase_model(geometry);
}

std::string RunConfig::to_text() const {
  const auto& opt = optical;
  std::string regions;
  for (int i = 0; i < kNumClasses; ++i) {
    const auto& r = detectors.regions[i];
    regions += fmt::format("{}{}:{}:{}", i ? ";" : "", fmt_real(r.cx), fmt_real(r.cy), fmt_real(r.side));
  }
  std::string out;
  auto put = [&](std::string_view k, const std::string& v) { out += fmt::format("{} = {}\n", k, v); };
  put("grid.nx", std::to_string(grid.nx));
  put("grid.ny", std::to_string(grid.ny));
  put("grid.pitch_um", fmt_real(grid.pitch));
  put("grid.wavelength_um", fmt_real(grid.wavelength));
  put("network.layers", std::to_string(num_layers));
  put("network.distances_um", fmt_list(distances));
  put("physics.theta", fmt_real(physics.theta_max));
  put("physics.k_ratio", fmt_real(physics.k_ratio));
  put("geometry.thickness_um", fmt_real(geometry.thickness));
  put("geometry.side_um", fmt_real(geometry.side));
  put("geometry.pitch_um", fmt_real(geometry.pitch));
  put("geometry.n_crystalline", fmt_real(geometry.n_crystalline));
  put("geometry.n_amorphous", fmt_real(geometry.n_amorphous));
  put("geometry.n_clad", fmt_real(geometry.n_clad));
  put("geometry.wavelength_um", fmt_real(geometry.wavelength));
  put("detector.regions", regions);
  put("propagation.pad_factor", std::to_string(propagation.pad_factor));
  put("propagation.evanescent", propagation.evanescent == EvanescentPolicy::zero_out ? "zero_out" : "keep_decaying");
  put("penalty.gamma_start", fmt_real(opt.schedule.gamma_start));
  put("penalty.gamma_max", fmt_real(opt.schedule.gamma_max));
  put("penalty.ramp_epochs", std::to_string(opt.schedule.ramp_epochs));
  put("penalty.hold_epochs", std::to_string(opt.schedule.hold_epochs));
  put("penalty.form", opt.penalty_form == PenaltyForm::double_well ? "double_well" : "literal");
  put("train.mode", opt.mode == TrainingMode::penalty ? "penalty" : "ste");
  put("train.ste_jacobian", opt.ste_jacobian == SteJacobian::latent ? "latent" : "binarized");
  put("train.batch_size", std::to_string(opt.batch_size));
  put("train.learning_rate", fmt_real(opt.adam.learning_rate));
  put("train.beta1", fmt_real(opt.adam.beta1));
  put("train.beta2", fmt_real(opt.adam.beta2));
  put("train.epsilon", fmt_real(opt.adam.epsilon));
  put("train.logit_scale", fmt_real(opt.logits.scale));
  put("train.logit_normalize", opt.logits.normalize ? "true" : "false");
  put("train.samples", std::to_string(train_samples));
  put("train.val_samples", std::to_string(val_samples));
  put("train.threads", std::to_string(opt.threads));
  put("encoding.upsample", std::to_string(opt.encoding.upsample));
  put("correcting.learning_rate", fmt_real(correcting.adam.learning_rate));
  put("correcting.epochs", std::to_string(correcting.epochs));
  put("correcting.batch_size", std::to_string(correcting.batch_size));
  put("correcting.bias", correcting.use_bias ? "true" : "false");
  put("correcting.init", correcting.identity_init ? "identity" : "random");
  put("correcting.samples", std::to_string(correcting_samples));
  put("eval.samples", std::to_string(eval_samples));
  put("sweep.retrain_epochs", std::to_string(sweep_retrain_epochs));
  put("sweep.retrain_samples", std::to_string(sweep_retrain_samples));
  put("seed", std::to_string(seed));
  put("dataset.dir", dataset_dir.string());
  put("output.dir", output_dir.string());
  put("fft.wisdom", fft_wisdom ? fft_wisdom->string() : "");
  return out;
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw FormatError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      base.set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

}  // namespace rodnn
