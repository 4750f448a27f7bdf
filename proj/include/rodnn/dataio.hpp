#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rodnn/correcting_layer.hpp"
#include "rodnn/optical_net.hpp"

namespace rodnn {

// ---------------------------------------------------------------------------
// Datasets

enum class Split { train, test };

/// Grayscale images (row-major bytes) with class labels 0..9.
struct Dataset {
  int rows = 28;
  int cols = 28;
  std::vector<std::uint8_t> pixels;  // size() * rows * cols
  std::vector<int> labels;
  Split split = Split::train;

  std::size_t size() const { return labels.size(); }
  std::span<const std::uint8_t> image(std::size_t i) const;

  /// Items [first, first + count), clamped to the end.
  Dataset slice(std::size_t first, std::size_t count) const;
};

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// Parses a big-endian IDX image/label pair. Throws FormatError naming the
/// offending field on a bad magic, truncation, or count mismatch.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 Split split = Split::train);

/// Same as load_idx, but on in-memory file contents.
Dataset parse_idx(std::span<const std::uint8_t> images, std::span<const std::uint8_t> labels,
                  Split split = Split::train);

/// Loads <dir>/train-*-ubyte or <dir>/t10k-*-ubyte.
Dataset load_idx_dir(const std::filesystem::path& dir, Split split);

// ---------------------------------------------------------------------------
// Input encoding

/// Pixel/255 becomes the field amplitude (zero phase) after nearest-neighbour
/// upsampling; the image is centred and the field normalized to unit power.
struct EncodingSpec {
  int upsample = 4;
};

/// Throws InvalidArgument when the upsampled image does not fit the grid.
WaveField encode_image(std::span<const std::uint8_t> pixels, int rows, int cols,
                       const EncodingSpec& spec, const GridSpec& grid);

// ---------------------------------------------------------------------------
// Network files

/// A network plus the optional correcting layer trained on top of it.
struct Checkpoint {
  DiffractiveNetwork network;
  std::optional<CorrectingLayer> correcting;
};

inline constexpr std::uint8_t kRodnFormatVersion = 1;

/// Writes the RODN format described in docs/FORMATS.md.
void save_network(const Checkpoint& checkpoint, const std::filesystem::path& path);
void save_network(const DiffractiveNetwork& net, const std::filesystem::path& path);

std::vector<std::uint8_t> serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint deserialize_checkpoint(std::span<const std::uint8_t> bytes);

/// Throws FormatError on bad magic/version, truncation (with byte offset), or
/// a binarized file whose weights are not all in {0, Theta}.
Checkpoint load_checkpoint(const std::filesystem::path& path);
DiffractiveNetwork load_network(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace rodnn
