#include "rodnn/dataio.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "rodnn/error.hpp"

namespace rodnn {

// ---------------------------------------------------------------------------
// Datasets

std::span<const std::uint8_t> Dataset::image(std::size_t i) const {
  const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  return {pixels.data() + i * n, n};
}

Dataset Dataset::slice(std::size_t first, std::size_t count) const {
  Dataset out;
  out.rows = rows;
  out.cols = cols;
  out.split = split;
  first = std::min(first, size());
  count = std::min(count, size() - first);
  const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  out.pixels.assign(pixels.begin() + static_cast<std::ptrdiff_t>(first * n),
                    pixels.begin() + static_cast<std::ptrdiff_t>((first + count) * n));
  out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(first),
                    labels.begin() + static_cast<std::ptrdiff_t>(first + count));
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset, const char* what,
                        const char* file) {
  if (bytes.size() < offset + 4) {
    throw FormatError(std::string(file) + ": truncated while reading " + what + " at byte " +
                      std::to_string(offset));
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

std::string hex32(std::uint32_t v) {
  std::ostringstream os;
  os << "0x" << std::hex;
  os.width(8);
  os.fill('0');
  os << v;
  return os.str();
}

}  // namespace

Dataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels, Split split) {
  const auto image_magic = read_be32(images, 0, "magic", "image file");
  if (image_magic != kIdxImageMagic) {
    throw FormatError("image file: magic " + hex32(image_magic) + " (expected " + hex32(kIdxImageMagic) + ")");
  }
  const auto label_magic = read_be32(labels, 0, "magic", "label file");
  if (label_magic != kIdxLabelMagic) {
    throw FormatError("label file: magic " + hex32(label_magic) + " (expected " + hex32(kIdxLabelMagic) + ")");
  }
  const auto count = read_be32(images, 4, "count", "image file");
  const auto rows = read_be32(images, 8, "rows", "image file");
  const auto cols = read_be32(images, 12, "cols", "image file");
  const auto label_count = read_be32(labels, 4, "count", "label file");
  if (count != label_count) {
    throw FormatError("count mismatch: image file has " + std::to_string(count) + ", label file has " +
                      std::to_string(label_count));
  }
  if (rows == 0 || cols == 0 || rows > 4096 || cols > 4096) {
    throw FormatError("image file: implausible rows/cols " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  const std::size_t pixels = std::size_t{count} * rows * cols;
  if (images.size() < 16 + pixels) {
    throw FormatError("image file: truncated, need " + std::to_string(16 + pixels) + " bytes, have " +
                      std::to_string(images.size()));
  }
  if (labels.size() < 8 + std::size_t{count}) {
    throw FormatError("label file: truncated, need " + std::to_string(8 + std::size_t{count}) + " bytes, have " +
                      std::to_string(labels.size()));
  }

  Dataset ds;
  ds.rows = static_cast<int>(rows);
  ds.cols = static_cast<int>(cols);
  ds.split = split;
  ds.pixels.assign(images.begin() + 16, images.begin() + 16 + static_cast<std::ptrdiff_t>(pixels));
  ds.labels.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const int label = labels[8 + i];
    if (label > 9) throw FormatError("label file: label " + std::to_string(label) + " at item " + std::to_string(i));
    ds.labels.push_back(label);
  }
  return ds;
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels, Split split) {
  return parse_idx(read_file(images), read_file(labels), split);
}

Dataset load_idx_dir(const std::filesystem::path& dir, Split split) {
  const std::string prefix = split == Split::train ? "train" : "t10k";
  return load_idx(dir / (prefix + "-images-idx3-ubyte"), dir / (prefix + "-labels-idx1-ubyte"), split);
}

// ---------------------------------------------------------------------------
// Encoding

WaveField encode_image(std::span<const std::uint8_t> pixels, int rows, int cols, const EncodingSpec& spec,
                       const GridSpec& grid) {
  if (spec.upsample < 1) throw InvalidArgument("encoding: upsample must be >= 1");
  if (pixels.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw DimensionError("encode_image: pixel count does not match rows x cols");
  }
  const int h = rows * spec.upsample;
  const int w = cols * spec.upsample;
  if (h > grid.ny || w > grid.nx) {
    throw DimensionError("encoding: " + std::to_string(w) + "x" + std::to_string(h) + " image does not fit a " +
                          std::to_string(grid.nx) + "x" + std::to_string(grid.ny) + " grid");
  }
  const int oy = (grid.ny - h) / 2;
  const int ox = (grid.nx - w) / 2;
  WaveField field(grid);
  double power = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double a = pixels[static_cast<std::size_t>(r) * cols + c] / 255.0;
      if (a == 0.0) continue;
      for (int dy = 0; dy < spec.upsample; ++dy) {
        for (int dx = 0; dx < spec.upsample; ++dx) {
          field.at(oy + r * spec.upsample + dy, ox + c * spec.upsample + dx) = a;
        }
      }
      power += a * a * spec.upsample * spec.upsample;
    }
  }
  if (power > 0.0) field *= 1.0 / std::sqrt(power);
  return field;
}

// ---------------------------------------------------------------------------
// RODN files

namespace {

class ByteWriter {
 public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
  }
  void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8(const char* what) {
    need(1, what);
    return bytes_[pos_++];
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::size_t offset() const { return pos_; }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n, const char* what) const {
    if (pos_ + n > bytes_.size()) {
      throw FormatError(std::string("RODN: truncated at byte offset ") + std::to_string(pos_) + " reading " + what);
    }
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

constexpr std::string_view kMagic = "RODN";

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& checkpoint) {
  const auto& net = checkpoint.network;
  ByteWriter w;
  w.raw(kMagic);
  w.u8(kRodnFormatVersion);
  w.u32(static_cast<std::uint32_t>(net.grid.nx));
  w.u32(static_cast<std::uint32_t>(net.grid.ny));
  w.f64(net.grid.pitch);
  w.f64(net.grid.wavelength);
  w.u32(static_cast<std::uint32_t>(net.layers.size()));
  for (double d : net.distances) w.f64(d);
  w.f64(net.physics.theta_max);
  w.f64(net.physics.k_ratio);
  w.u32(static_cast<std::uint32_t>(net.propagation.pad_factor));
  w.u8(net.propagation.evanescent == EvanescentPolicy::zero_out ? 0 : 1);
  w.u32(kNumClasses);
  for (const auto& r : net.detectors.regions) {
    w.f64(r.cx);
    w.f64(r.cy);
    w.f64(r.side);
  }
  w.u8(net.binarized ? 1 : 0);
  for (const auto& layer : net.layers) {
    for (double v : layer.phase) w.f64(v);
    for (double v : layer.amplitude) w.f64(v);
  }
  w.u8(checkpoint.correcting ? 1 : 0);
  if (checkpoint.correcting) {
    w.u8(checkpoint.correcting->use_bias ? 1 : 0);
    for (double v : checkpoint.correcting->weights) w.f64(v);
    for (double v : checkpoint.correcting->bias) w.f64(v);
  }
  return w.take();
}

Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  for (char c : kMagic) {
    if (r.u8("magic") != static_cast<std::uint8_t>(c)) throw FormatError("RODN: bad magic");
  }
  const auto version = r.u8("version");
  if (version != kRodnFormatVersion) {
    throw FormatError("RODN: unsupported version " + std::to_string(version));
  }
  Checkpoint ck;
  auto& net = ck.network;
  net.grid.nx = static_cast<int>(r.u32("nx"));
  net.grid.ny = static_cast<int>(r.u32("ny"));
  net.grid.pitch = r.f64("pitch");
  net.grid.wavelength = r.f64("wavelength");
  if (net.grid.nx < 1 || net.grid.ny < 1 || net.grid.nx > 1 << 15 || net.grid.ny > 1 << 15) {
    throw FormatError("RODN: implausible grid " + std::to_string(net.grid.nx) + "x" + std::to_string(net.grid.ny));
  }
  const auto num_layers = r.u32("layer count");
  if (num_layers > 1024) throw FormatError("RODN: implausible layer count " + std::to_string(num_layers));
  net.distances.resize(num_layers + 1);
  for (auto& d : net.distances) d = r.f64("distances");
  net.physics.theta_max = r.f64("theta");
  net.physics.k_ratio = r.f64("k_ratio");
  net.propagation.pad_factor = static_cast<int>(r.u32("pad factor"));
  const auto policy = r.u8("evanescent policy");
  if (policy > 1) throw FormatError("RODN: unknown evanescent policy " + std::to_string(policy));
  net.propagation.evanescent = policy == 0 ? EvanescentPolicy::zero_out : EvanescentPolicy::keep_decaying;
  const auto num_detectors = r.u32("detector count");
  if (num_detectors != kNumClasses) {
    throw FormatError("RODN: expected 10 detectors, got " + std::to_string(num_detectors));
  }
  for (auto& region : net.detectors.regions) {
    region.cx = r.f64("detector cx");
    region.cy = r.f64("detector cy");
    region.side = r.f64("detector side");
  }
  const auto binary = r.u8("binary flag");
  if (binary > 1) throw FormatError("RODN: bad binary flag");
  net.binarized = binary == 1;
  net.layers.assign(num_layers, DiffractiveLayer(net.grid));
  for (std::size_t l = 0; l < num_layers; ++l) {
    auto& layer = net.layers[l];
    for (auto& v : layer.phase) {
      const std::size_t at = r.offset();
      v = r.f64("layer phase");
      if (net.binarized && v != 0.0 && v != net.physics.theta_max) {
        throw FormatError("RODN: binarized file has weight " + std::to_string(v) + " outside {0, Theta} at byte " +
                          std::to_string(at));
      }
    }
    for (auto& v : layer.amplitude) v = r.f64("layer amplitude");
  }
  const auto has_correcting = r.u8("correcting flag");
  if (has_correcting > 1) throw FormatError("RODN: bad correcting flag");
  if (has_correcting == 1) {
    CorrectingLayer c;
    c.use_bias = r.u8("correcting bias flag") == 1;
    for (auto& v : c.weights) v = r.f64("correcting weights");
    for (auto& v : c.bias) v = r.f64("correcting bias");
    ck.correcting = c;
  }
  if (!r.at_end()) throw FormatError("RODN: trailing bytes after offset " + std::to_string(r.offset()));
  try {
    net.validate();
  } catch (const Error& e) {
    throw FormatError(std::string("RODN: invalid network: ") + e.what());
  }
  return ck;
}

void save_network(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  const auto bytes = serialize_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

void save_network(const DiffractiveNetwork& net, const std::filesystem::path& path) {
  save_network(Checkpoint{net, std::nullopt}, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) { return deserialize_checkpoint(read_file(path)); }

DiffractiveNetwork load_network(const std::filesystem::path& path) { return load_checkpoint(path).network; }

}  // namespace rodnn
