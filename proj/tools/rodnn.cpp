#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "rodnn/commands.hpp"
#include "rodnn/error.hpp"

namespace {

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string dataset_dir;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "key = value config file")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "RNG seed");
  app->add_option("--out", c.out, "output directory");
  app->add_option("--dataset-dir", c.dataset_dir, "directory with the four IDX files");
  app->add_option("--set", c.overrides, "override one config key (key=value), repeatable");
}

rodnn::RunConfig build_config(const Common& c) {
  rodnn::RunConfig cfg = c.config.empty() ? rodnn::RunConfig{} : rodnn::load_config(c.config);
  for (const auto& kv : c.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw rodnn::InvalidArgument("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (!c.dataset_dir.empty()) cfg.dataset_dir = c.dataset_dir;
  cfg.validate();
  rodnn::configure_fft(cfg);
  return cfg;
}

const rodnn::Dataset& pick(const rodnn::DataSplits& d, const std::string& split) {
  if (split == "test") return d.test;
  if (split == "validation") return d.validation;
  if (split == "train") return d.train;
  throw rodnn::InvalidArgument("unknown split '" + split + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and trainer for binarized phase-change diffractive networks"};
  app.require_subcommand(1);

  Common train_c, corr_c, eval_c, sweep_c, export_c;
  std::string corr_ckpt, eval_ckpt, sweep_ckpt, export_ckpt;
  std::string eval_split = "test", export_split = "test";
  bool no_correcting = false;
  std::string sweep_kind, sweep_grid, geometry_param = "thickness";
  bool retrain = false;
  std::size_t sample = 0;

  auto* train = app.add_subcommand("train-optical", "train the diffractive layers");
  add_common(train, train_c);

  auto* corr = app.add_subcommand("train-correcting", "train the 10x10 correcting layer on a frozen network");
  add_common(corr, corr_c);
  corr->add_option("--checkpoint", corr_ckpt, "binarized network file")->required();

  auto* eval = app.add_subcommand("eval", "accuracy and confusion matrix");
  add_common(eval, eval_c);
  eval->add_option("--checkpoint", eval_ckpt, "network file")->required();
  eval->add_option("--split", eval_split, "test | validation | train");
  eval->add_flag("--no-correcting", no_correcting, "ignore a stored correcting layer");

  auto* sweep = app.add_subcommand("sweep", "accuracy under injected hardware errors");
  add_common(sweep, sweep_c);
  sweep->add_option("--checkpoint", sweep_ckpt, "network file")->required();
  sweep->add_option("--kind", sweep_kind, "axial | theta | kratio | geometry | distance | layers")->required();
  sweep->add_option("--grid", sweep_grid, "comma-separated values (\"0.8pi\" allowed)")->required();
  sweep->add_flag("--retrain-correcting", retrain, "retrain the correcting layer at every point");
  sweep->add_option("--geometry-param", geometry_param, "thickness | side | n_amorphous | n_crystalline");

  auto* exp = app.add_subcommand("export-field", "per-plane intensity of one sample");
  add_common(exp, export_c);
  exp->add_option("--checkpoint", export_ckpt, "network file")->required();
  exp->add_option("--sample", sample, "sample index");
  exp->add_option("--split", export_split, "test | validation | train");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      const auto cfg = build_config(train_c);
      rodnn::cmd_train_optical(cfg, rodnn::load_splits(cfg), std::cout);
    } else if (*corr) {
      const auto cfg = build_config(corr_c);
      rodnn::cmd_train_correcting(cfg, corr_ckpt, rodnn::load_splits(cfg), std::cout);
    } else if (*eval) {
      const auto cfg = build_config(eval_c);
      const auto data = rodnn::load_splits(cfg);
      rodnn::cmd_eval(cfg, eval_ckpt, pick(data, eval_split), !no_correcting, std::cout);
    } else if (*sweep) {
      const auto cfg = build_config(sweep_c);
      rodnn::SweepSpec spec;
      spec.kind = rodnn::parse_sweep_kind(sweep_kind);
      spec.values = rodnn::parse_real_list(sweep_grid);
      spec.retrain_correcting = retrain;
      spec.geometry_param = geometry_param;
      rodnn::cmd_sweep(cfg, sweep_ckpt, rodnn::load_splits(cfg), spec, std::cout);
    } else if (*exp) {
      const auto cfg = build_config(export_c);
      const auto data = rodnn::load_splits(cfg);
      rodnn::cmd_export_field(cfg, export_ckpt, pick(data, export_split), sample, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
