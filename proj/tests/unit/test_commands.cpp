#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "rodnn/commands.hpp"
#include "rodnn/error.hpp"

using namespace rodnn;
namespace fs = std::filesystem;

namespace {

void put_be32(std::ofstream& o, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) o.put(static_cast<char>((v >> s) & 0xff));
}

// 28x28 images: class c lights a 6x6 block whose position depends on c.
void write_toy_idx(const fs::path& dir, const std::string& prefix, int count, std::uint64_t seed) {
  fs::create_directories(dir);
  std::ofstream img(dir / (prefix + "-images-idx3-ubyte"), std::ios::binary);
  std::ofstream lab(dir / (prefix + "-labels-idx1-ubyte"), std::ios::binary);
  put_be32(img, 0x803);
  put_be32(img, static_cast<std::uint32_t>(count));
  put_be32(img, 28);
  put_be32(img, 28);
  put_be32(lab, 0x801);
  put_be32(lab, static_cast<std::uint32_t>(count));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> noise(0, 40);
  for (int i = 0; i < count; ++i) {
    const int c = i % 10;
    const int by = 2 + (c / 4) * 8, bx = 2 + (c % 4) * 6;
    for (int y = 0; y < 28; ++y) {
      for (int x = 0; x < 28; ++x) {
        const bool on = y >= by && y < by + 6 && x >= bx && x < bx + 6;
        img.put(static_cast<char>(on ? 255 : noise(rng)));
      }
    }
    lab.put(static_cast<char>(c));
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Commands : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / "rodnn_cmd_test";
    fs::remove_all(root_);
    write_toy_idx(root_ / "data", "train", 120, 1);
    write_toy_idx(root_ / "data", "t10k", 40, 2);
  }

  RunConfig config(const std::string& out) const {
    RunConfig c = parse_config(
        "grid.nx = 32\n grid.ny = 32\n encoding.upsample = 1\n network.layers = 2\n network.distance_um = 10\n"
        "detector.layout = 3,8,6\n penalty.ramp_epochs = 2\n penalty.hold_epochs = 1\n train.val_samples = 20\n"
        "train.batch_size = 16\n train.learning_rate = 0.05\n correcting.epochs = 30\n correcting.learning_rate = 0.05\n"
        "sweep.retrain_epochs = 10\n");
    c.dataset_dir = root_ / "data";
    c.output_dir = root_ / out;
    return c;
  }

  const fs::path& trained(std::ostream& log) {
    if (!fs::exists(root_ / "base" / "network.rodn")) {
      const auto c = config("base");
      cmd_train_optical(c, load_splits(c), log);
    }
    static const fs::path p = root_ / "base" / "network.rodn";
    return p;
  }

  static inline fs::path root_;
  std::ostringstream log_;
};

}  // namespace

TEST(RunConfig, DefaultsAreValid) {
  const RunConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.grid.nx, 120);
  EXPECT_EQ(c.distances, std::vector<double>(4, 50.0));
  EXPECT_EQ(c.optical.schedule.ramp_epochs, 300);
  EXPECT_EQ(c.optical.schedule.hold_epochs, 200);
  EXPECT_EQ(c.optical.encoding.upsample, 4);
}

TEST(RunConfig, TextRoundTrip) {
  RunConfig c;
  c.set("grid.nx", "64");
  c.set("physics.theta", "0.9pi");
  c.set("network.distances_um", "10, 20.5, 30, 40");
  c.set("detector.layout", "6,14,12");
  c.set("train.mode", "ste");
  c.set("fft.wisdom", "/tmp/w");
  c.set("correcting.bias", "true");
  const RunConfig back = parse_config(c.to_text());
  EXPECT_EQ(back.to_text(), c.to_text());
  EXPECT_EQ(back.grid.nx, 64);
  EXPECT_DOUBLE_EQ(back.physics.theta_max, 0.9 * std::numbers::pi);
  EXPECT_EQ(back.detectors, c.detectors);
  EXPECT_EQ(back.optical.mode, TrainingMode::straight_through);
  EXPECT_TRUE(back.correcting.use_bias);
}

TEST(RunConfig, CommentsAndErrors) {
  const auto c = parse_config("# comment\n\nseed = 42  \n");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_THROW(parse_config("nope = 1\n"), InvalidArgument);
  EXPECT_THROW(parse_config("grid.nx 5\n"), FormatError);
  EXPECT_THROW(parse_config("grid.nx = five\n"), InvalidArgument);
}

TEST(RunConfig, ValidateCatchesModulePreconditions) {
  EXPECT_THROW(parse_config("physics.k_ratio = 0\n").validate(), InvalidArgument);
  EXPECT_THROW(parse_config("network.distances_um = 50,50\n").validate(), InvalidArgument);
  EXPECT_THROW(parse_config("penalty.gamma_start = 0.1\n").validate(), InvalidArgument);
  EXPECT_THROW(parse_config("grid.nx = 64\n").validate(), InvalidArgument);  // detectors and image do not fit
  EXPECT_THROW(parse_config("geometry.side_um = 2\n").validate(), InvalidArgument);
}

TEST(ParseReal, PiSuffix) {
  EXPECT_DOUBLE_EQ(parse_real("0.8pi"), 0.8 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(parse_real("pi"), std::numbers::pi);
  EXPECT_DOUBLE_EQ(parse_real("-pi"), -std::numbers::pi);
  EXPECT_DOUBLE_EQ(parse_real(" 1.5 "), 1.5);
  EXPECT_THROW(parse_real("1.5x"), InvalidArgument);
  EXPECT_EQ(parse_real_list("1, 2,0.5pi").size(), 3u);
}

TEST_F(Commands, SplitsAreDisjoint) {
  auto c = config("splits");
  c.train_samples = 50;
  const auto d = load_splits(c);
  EXPECT_EQ(d.train.size(), 50u);
  EXPECT_EQ(d.validation.size(), 20u);
  EXPECT_EQ(d.test.size(), 40u);
  EXPECT_EQ(d.validation.labels.front(), 100 % 10);
  c.val_samples = 120;
  EXPECT_THROW(load_splits(c), InvalidArgument);
}

TEST_F(Commands, ZeroEpochTraining) {
  auto c = config("zero");
  c.optical.schedule.ramp_epochs = c.optical.schedule.hold_epochs = 0;
  const auto out = cmd_train_optical(c, load_splits(c), log_);
  EXPECT_EQ(slurp(out.metrics), "epoch,gamma,train_loss,train_acc,val_acc\n");
  const auto net = load_network(out.checkpoint);
  EXPECT_TRUE(net.binarized);
  EXPECT_EQ(net, out.result.network);
  EXPECT_EQ(parse_config(slurp(c.output_dir / "config.txt")).to_text(), c.to_text());
}

TEST_F(Commands, TrainingCsvIsByteReproducible) {
  const auto a = config("rep_a"), b = config("rep_b");
  const auto ra = cmd_train_optical(a, load_splits(a), log_);
  const auto rb = cmd_train_optical(b, load_splits(b), log_);
  EXPECT_EQ(slurp(ra.metrics), slurp(rb.metrics));
  EXPECT_EQ(slurp(ra.checkpoint), slurp(rb.checkpoint));
  EXPECT_EQ(ra.result.history.size(), 3u);
}

TEST_F(Commands, CorrectingRefusesRealValuedCheckpoint) {
  const auto c = config("refuse");
  fs::create_directories(c.output_dir);
  save_network(c.make_network(), c.output_dir / "real.rodn");
  EXPECT_THROW(cmd_train_correcting(c, c.output_dir / "real.rodn", load_splits(c), log_), InvalidArgument);
}

TEST_F(Commands, CorrectingIdentityZeroEpochsMatchesOptical) {
  auto c = config("ident");
  c.correcting.identity_init = true;
  c.correcting.epochs = 0;
  const auto out = cmd_train_correcting(c, trained(log_), load_splits(c), log_);
  EXPECT_EQ(out.val_accuracy_corrected, out.val_accuracy_optical);
}

TEST_F(Commands, CorrectingAppendsLayerAndEvalUsesIt) {
  const auto c = config("corr");
  const auto data = load_splits(c);
  const auto out = cmd_train_correcting(c, trained(log_), data, log_);
  const auto ck = load_checkpoint(out.checkpoint_path);
  ASSERT_TRUE(ck.correcting.has_value());
  EXPECT_EQ(*ck.correcting, out.result.layer);
  EXPECT_TRUE(fs::exists(c.output_dir / "correcting_metrics.csv"));

  const auto with = cmd_eval(c, out.checkpoint_path, data.test, true, log_);
  const auto without = cmd_eval(c, out.checkpoint_path, data.test, false, log_);
  EXPECT_TRUE(with.used_correcting);
  EXPECT_FALSE(without.used_correcting);
  const auto direct = evaluate(ck.network, data.test, c.optical.encoding, 1, &*ck.correcting);
  EXPECT_EQ(with.confusion.counts, direct.counts);
}

TEST_F(Commands, EvalConfusionConsistent) {
  const auto c = config("eval");
  const auto data = load_splits(c);
  const auto out = cmd_eval(c, trained(log_), data.test, true, log_);
  EXPECT_EQ(out.confusion.total(), 40);
  for (int i = 0; i < kNumClasses; ++i) {
    std::int64_t row = 0;
    for (auto v : out.confusion.counts[i]) row += v;
    EXPECT_EQ(row, 4);
  }
  const auto eval_csv = slurp(c.output_dir / "eval.csv");
  EXPECT_NE(eval_csv.find(fmt::format("{:.6f}", static_cast<double>(out.confusion.correct()) / 40)), std::string::npos);
  const auto conf = slurp(c.output_dir / "confusion.csv");
  EXPECT_EQ(std::count(conf.begin(), conf.end(), '\n'), 11);
}

TEST_F(Commands, EvalSingleSample) {
  const auto c = config("single");
  const auto data = load_splits(c);
  const auto out = cmd_eval(c, trained(log_), data.test.slice(3, 1), false, log_);
  int nonzero = 0;
  for (const auto& r : out.confusion.counts) {
    for (auto v : r) nonzero += v != 0;
  }
  EXPECT_EQ(nonzero, 1);
}

TEST_F(Commands, EvalOnTrainingAtLeastValidation) {
  const auto c = config("trainacc");
  const auto data = load_splits(c);
  const auto tr = cmd_eval(c, trained(log_), data.train, false, log_).confusion.accuracy();
  const auto va = cmd_eval(c, trained(log_), data.validation, false, log_).confusion.accuracy();
  EXPECT_GE(tr, va);
}

TEST_F(Commands, SweepAtNominalEqualsEval) {
  const auto c = config("sweep0");
  const auto data = load_splits(c);
  const double acc = cmd_eval(c, trained(log_), data.test, false, log_).confusion.accuracy();
  for (auto kind : {SweepKind::axial, SweepKind::theta, SweepKind::kratio}) {
    SweepSpec s;
    s.kind = kind;
    s.values = {kind == SweepKind::axial ? 0.0 : kind == SweepKind::theta ? std::numbers::pi : 1.0};
    const auto rows = cmd_sweep(c, trained(log_), data, s, log_);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].accuracy, acc);
    EXPECT_FALSE(rows[0].accuracy_after_retrain);
  }
}

TEST_F(Commands, SweepRowsInGridOrderWithRetrain) {
  const auto c = config("sweep1");
  SweepSpec s;
  s.kind = SweepKind::kratio;
  s.values = {1.2, 0.8, 1.0};
  s.retrain_correcting = true;
  const auto rows = cmd_sweep(c, trained(log_), load_splits(c), s, log_);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].value, 0.8);
  for (const auto& r : rows) EXPECT_TRUE(r.accuracy_after_retrain.has_value());
  const auto csv = slurp(c.output_dir / "sweep.csv");
  EXPECT_EQ(csv, sweep_csv(rows));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "value,accuracy,accuracy_after_retrain");
}

TEST_F(Commands, SweepRejectsBadGrid) {
  const auto c = config("sweepbad");
  const auto data = load_splits(c);
  SweepSpec s;
  s.kind = SweepKind::kratio;
  s.values = {1.0, -0.5};
  EXPECT_THROW(cmd_sweep(c, trained(log_), data, s, log_), InvalidArgument);
  s.kind = SweepKind::axial;
  s.values = {-20.0};
  EXPECT_THROW(cmd_sweep(c, trained(log_), data, s, log_), InvalidArgument);
  s.kind = SweepKind::layers;
  s.values = {1.5};
  EXPECT_THROW(cmd_sweep(c, trained(log_), data, s, log_), InvalidArgument);
  EXPECT_FALSE(fs::exists(c.output_dir / "sweep.csv"));
  EXPECT_THROW(parse_sweep_kind("radial"), InvalidArgument);
}

TEST_F(Commands, SweepLayersRetrainsFromScratch) {
  const auto c = config("sweeplayers");
  SweepSpec s;
  s.kind = SweepKind::layers;
  s.values = {1, 2};
  const auto rows = cmd_sweep(c, trained(log_), load_splits(c), s, log_);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_GT(rows[1].accuracy, 0.1);
}

TEST_F(Commands, ExportField) {
  const auto c = config("export");
  const auto data = load_splits(c);
  const auto out = cmd_export_field(c, trained(log_), data.test, 5, log_);
  ASSERT_EQ(out.plane_power.size(), 4u);  // input, two layers, detector plane
  for (std::size_t k = 1; k < out.plane_power.size(); ++k) EXPECT_LE(out.plane_power[k], out.plane_power[k - 1] * (1 + 1e-12));
  EXPECT_NEAR(out.plane_power[0], 1.0, 1e-12);
  const auto ck = load_network(trained(log_));
  const auto x = detector_outputs(ck, data.test.slice(5, 1), c.optical.encoding)[0];
  for (int i = 0; i < kNumClasses; ++i) EXPECT_NEAR(out.detector_powers[i], x[i], 1e-15);
  const auto plane = slurp(c.output_dir / "plane_0.csv");
  EXPECT_EQ(std::count(plane.begin(), plane.end(), '\n'), 32);
  const auto det = slurp(c.output_dir / "detectors.csv");
  EXPECT_EQ(std::count(det.begin(), det.end(), '\n'), 11);
  EXPECT_THROW(cmd_export_field(c, trained(log_), data.test, 40, log_), InvalidArgument);
}

TEST_F(Commands, ExportZeroInput) {
  const auto c = config("export0");
  Dataset blank;
  blank.pixels.assign(784, 0);
  blank.labels = {0};
  const auto out = cmd_export_field(c, trained(log_), blank, 0, log_);
  for (double p : out.plane_power) EXPECT_EQ(p, 0.0);
  for (int k = 0; k < 4; ++k) {
    const auto text = slurp(c.output_dir / fmt::format("plane_{}.csv", k));
    EXPECT_EQ(text.find_first_not_of("0,\n"), std::string::npos);
  }
}

#ifdef RODNN_CLI_PATH
TEST_F(Commands, CliExitStatus) {
  const std::string cli = RODNN_CLI_PATH;
  const std::string common = " --dataset-dir " + (root_ / "data").string() + " --out " + (root_ / "cli").string() +
                             " --set grid.nx=32 --set grid.ny=32 --set encoding.upsample=1 --set detector.layout=3,8,6"
                             " --set train.val_samples=20 > /dev/null 2>&1";
  EXPECT_EQ(std::system((cli + " train-optical --set penalty.ramp_epochs=0 --set penalty.hold_epochs=0" + common).c_str()), 0);
  EXPECT_TRUE(fs::exists(root_ / "cli" / "network.rodn"));
  EXPECT_EQ(std::system((cli + " eval --checkpoint " + (root_ / "cli" / "network.rodn").string() + common).c_str()), 0);
  EXPECT_NE(std::system((cli + " eval --checkpoint /nonexistent.rodn" + common).c_str()), 0);
  EXPECT_NE(std::system((cli + " train-optical --set physics.k_ratio=-1" + common).c_str()), 0);
  EXPECT_NE(std::system((cli + " sweep --kind bogus --grid 1 --checkpoint " + (root_ / "cli" / "network.rodn").string() +
                         common).c_str()),
            0);
  EXPECT_NE(std::system((cli + " export-field --sample 999 --checkpoint " + (root_ / "cli" / "network.rodn").string() +
                         common).c_str()),
            0);
}
#endif
