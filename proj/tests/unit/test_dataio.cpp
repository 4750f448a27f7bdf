#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "rodnn/dataio.hpp"
#include "rodnn/error.hpp"
#include "rodnn/training.hpp"

using namespace rodnn;

namespace {

void put_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) b.push_back(static_cast<std::uint8_t>(v >> s));
}

std::vector<std::uint8_t> idx_images(std::uint32_t magic, std::uint32_t count, std::uint32_t rows, std::uint32_t cols,
                                     std::uint8_t fill = 7) {
  std::vector<std::uint8_t> b;
  put_be32(b, magic);
  put_be32(b, count);
  put_be32(b, rows);
  put_be32(b, cols);
  for (std::uint32_t i = 0; i < count * rows * cols; ++i) b.push_back(static_cast<std::uint8_t>(fill + i));
  return b;
}

std::vector<std::uint8_t> idx_labels(std::uint32_t magic, std::uint32_t count) {
  std::vector<std::uint8_t> b;
  put_be32(b, magic);
  put_be32(b, count);
  for (std::uint32_t i = 0; i < count; ++i) b.push_back(static_cast<std::uint8_t>(i % 10));
  return b;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

DiffractiveNetwork sample_net(bool binary) {
  const GridSpec g{20, 16, 0.8, 1.31};
  auto net = DiffractiveNetwork::uniform(g, 2, 7.5, DetectorLayout::rows_3_4_3(2.0, 4.0, 3.0));
  net.distances = {7.5, 8.25, 9.125};
  net.physics = {0.9 * std::numbers::pi, 1.3};
  net.propagation = {3, EvanescentPolicy::keep_decaying};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (auto& l : net.layers) {
    for (auto& p : l.phase) p = u(rng);
  }
  return binary ? binarize_network(net) : net;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("rodnn_test_" + name);
}

}  // namespace

TEST(ParseIdx, Basic) {
  const auto d = parse_idx(idx_images(kIdxImageMagic, 3, 28, 28), idx_labels(kIdxLabelMagic, 3), Split::test);
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.rows, 28);
  EXPECT_EQ(d.split, Split::test);
  EXPECT_EQ(d.labels, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(d.image(1)[0], static_cast<std::uint8_t>(7 + 784));
}

TEST(ParseIdx, WrongImageMagic) {
  const auto msg = error_of([] { parse_idx(idx_labels(kIdxLabelMagic, 3), idx_labels(kIdxLabelMagic, 3)); });
  EXPECT_NE(msg.find("magic"), std::string::npos);
  EXPECT_NE(msg.find("image"), std::string::npos);
}

TEST(ParseIdx, WrongLabelMagic) {
  const auto msg = error_of([] { parse_idx(idx_images(kIdxImageMagic, 2, 28, 28), idx_labels(0x803, 2)); });
  EXPECT_NE(msg.find("label file: magic"), std::string::npos);
}

TEST(ParseIdx, CountMismatch) {
  const auto msg = error_of([] { parse_idx(idx_images(kIdxImageMagic, 2, 28, 28), idx_labels(kIdxLabelMagic, 3)); });
  EXPECT_NE(msg.find("count"), std::string::npos);
}

TEST(ParseIdx, Truncated) {
  auto img = idx_images(kIdxImageMagic, 2, 28, 28);
  img.pop_back();
  EXPECT_NE(error_of([&] { parse_idx(img, idx_labels(kIdxLabelMagic, 2)); }).find("truncated"), std::string::npos);
  auto lab = idx_labels(kIdxLabelMagic, 2);
  lab.resize(5);
  EXPECT_NE(error_of([&] { parse_idx(idx_images(kIdxImageMagic, 2, 28, 28), lab); }).find("truncated"), std::string::npos);
}

TEST(ParseIdx, LabelOutOfRange) {
  auto lab = idx_labels(kIdxLabelMagic, 2);
  lab.back() = 10;
  EXPECT_THROW(parse_idx(idx_images(kIdxImageMagic, 2, 28, 28), lab), FormatError);
}

TEST(ParseIdx, HeaderMutationsRejected) {
  const auto img = idx_images(kIdxImageMagic, 4, 28, 28);
  const auto lab = idx_labels(kIdxLabelMagic, 4);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> pos(0, 7), bit(0, 7);
  for (int t = 0; t < 300; ++t) {
    auto i2 = img;
    auto l2 = lab;
    const int p = pos(rng);
    const auto flip = static_cast<std::uint8_t>(1u << bit(rng));
    if (t % 2) i2[p] ^= flip;
    else l2[p] ^= flip;
    EXPECT_THROW(parse_idx(i2, l2), FormatError) << "byte " << p << (t % 2 ? " image" : " label");
  }
}

TEST(LoadIdx, MissingFile) {
  EXPECT_THROW(load_idx("/nonexistent/a", "/nonexistent/b"), FormatError);
}

TEST(Dataset, Slice) {
  const auto d = parse_idx(idx_images(kIdxImageMagic, 5, 2, 2), idx_labels(kIdxLabelMagic, 5));
  const auto s = d.slice(3, 10);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.labels[0], 3);
  EXPECT_EQ(s.image(0)[0], d.image(3)[0]);
}

#ifdef RODNN_DATASET_DIR
TEST(LoadIdx, RealMnist) {
  const std::filesystem::path dir = std::filesystem::path(RODNN_DATASET_DIR) / "mnist";
  if (!std::filesystem::exists(dir / "train-images-idx3-ubyte")) GTEST_SKIP() << "MNIST not present in " << dir;
  const auto train = load_idx_dir(dir, Split::train);
  const auto test = load_idx_dir(dir, Split::test);
  EXPECT_EQ(train.size(), 60000u);
  EXPECT_EQ(test.size(), 10000u);
  EXPECT_EQ(train.labels[0], 5);
  EXPECT_EQ(test.labels[0], 7);
}
#endif

TEST(EncodeImage, ZeroImage) {
  const std::vector<std::uint8_t> img(784, 0);
  const auto f = encode_image(img, 28, 28, {}, GridSpec{});
  EXPECT_EQ(total_power(f), 0.0);
}

TEST(EncodeImage, FullImage) {
  const std::vector<std::uint8_t> img(784, 255);
  const auto f = encode_image(img, 28, 28, {}, GridSpec{});
  EXPECT_NEAR(total_power(f), 1.0, 1e-12);
  const double a = 1.0 / 112.0;
  for (int y = 0; y < 120; ++y) {
    for (int x = 0; x < 120; ++x) {
      const bool in = y >= 4 && y < 116 && x >= 4 && x < 116;
      EXPECT_NEAR(f.at(y, x).real(), in ? a : 0.0, 1e-15);
      EXPECT_EQ(f.at(y, x).imag(), 0.0);
    }
  }
}

TEST(EncodeImage, SinglePixelBlock) {
  std::vector<std::uint8_t> img(784, 0);
  img[10 * 28 + 3] = 100;
  const auto f = encode_image(img, 28, 28, {}, GridSpec{});
  EXPECT_NEAR(total_power(f), 1.0, 1e-12);
  int lit = 0;
  for (int y = 0; y < 120; ++y) {
    for (int x = 0; x < 120; ++x) {
      if (f.at(y, x) != Complex(0.0)) {
        ++lit;
        EXPECT_NEAR(f.at(y, x).real(), 0.25, 1e-15);
        EXPECT_TRUE(y >= 4 + 40 && y < 4 + 44 && x >= 4 + 12 && x < 4 + 16);
      }
    }
  }
  EXPECT_EQ(lit, 16);
}

TEST(EncodeImage, PowerIsZeroOrOne) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> px(0, 255), keep(0, 9);
  for (int t = 0; t < 20; ++t) {
    std::vector<std::uint8_t> img(784);
    for (auto& p : img) p = keep(rng) == 0 ? static_cast<std::uint8_t>(px(rng)) : 0;
    const double p = total_power(encode_image(img, 28, 28, {2}, GridSpec{64, 64, 1.0, 1.55}));
    EXPECT_TRUE(p == 0.0 || std::abs(p - 1.0) < 1e-12);
  }
}

TEST(EncodeImage, TooLarge) {
  const std::vector<std::uint8_t> img(784, 1);
  EXPECT_THROW(encode_image(img, 28, 28, {5}, GridSpec{}), DimensionError);
}

TEST(Rodn, RoundTrip) {
  for (bool binary : {false, true}) {
    Checkpoint ck{sample_net(binary), std::nullopt};
    if (binary) {
      CorrectingLayer w;
      w.use_bias = true;
      for (int i = 0; i < 100; ++i) w.weights[i] = std::sin(i * 1.7);
      for (int i = 0; i < 10; ++i) w.bias[i] = i * 0.1 - 0.3;
      ck.correcting = w;
    }
    const auto path = temp_path(binary ? "bin.rodn" : "real.rodn");
    save_network(ck, path);
    const auto back = load_checkpoint(path);
    EXPECT_EQ(back.network, ck.network);
    EXPECT_EQ(back.correcting, ck.correcting);
    EXPECT_EQ(serialize_checkpoint(back), serialize_checkpoint(ck));
    std::filesystem::remove(path);
  }
}

TEST(Rodn, HeaderLayout) {
  const auto net = sample_net(false);
  const auto bytes = serialize_checkpoint({net, std::nullopt});
  ASSERT_GT(bytes.size(), 20u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "RODN");
  EXPECT_EQ(bytes[4], kRodnFormatVersion);
  EXPECT_EQ(bytes[5], 20);  // nx, little-endian
  EXPECT_EQ(bytes[6], 0);
  EXPECT_EQ(bytes[9], 16);
  // header: 5 + 8 + 16 + 4 + 3*8 + 16 + 4 + 1 + 4 + 10*24 + 1, payload, trailer
  const std::size_t header = 5 + 8 + 16 + 4 + 3 * 8 + 16 + 4 + 1 + 4 + 240 + 1;
  EXPECT_EQ(bytes.size(), header + 2 * 2 * 320 * 8 + 1);
  double first;
  std::memcpy(&first, bytes.data() + header, 8);
  EXPECT_EQ(first, net.layers[0].phase[0]);
}

TEST(Rodn, TruncationReportsOffset) {
  const auto bytes = serialize_checkpoint({sample_net(true), std::nullopt});
  for (std::size_t cut : {std::size_t{3}, std::size_t{40}, bytes.size() / 2, bytes.size() - 1}) {
    std::vector<std::uint8_t> t(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(cut));
    const auto msg = error_of([&] { deserialize_checkpoint(t); });
    EXPECT_NE(msg.find("byte offset"), std::string::npos) << cut << ": " << msg;
  }
}

TEST(Rodn, BadMagicAndVersion) {
  auto bytes = serialize_checkpoint({sample_net(false), std::nullopt});
  auto m = bytes;
  m[0] = 'X';
  EXPECT_NE(error_of([&] { deserialize_checkpoint(m); }).find("magic"), std::string::npos);
  auto v = bytes;
  v[4] = 9;
  EXPECT_NE(error_of([&] { deserialize_checkpoint(v); }).find("version"), std::string::npos);
  bytes.push_back(0);
  EXPECT_THROW(deserialize_checkpoint(bytes), FormatError);
}

TEST(Rodn, BinaryFlagWithNonBinaryWeight) {
  const auto net = sample_net(true);
  auto bytes = serialize_checkpoint({net, std::nullopt});
  const std::size_t header = 5 + 8 + 16 + 4 + 3 * 8 + 16 + 4 + 1 + 4 + 240 + 1;
  const double bad = 0.5;
  std::memcpy(bytes.data() + header + 8 * 7, &bad, 8);
  EXPECT_NE(error_of([&] { deserialize_checkpoint(bytes); }).find("outside {0, Theta}"), std::string::npos);
}
