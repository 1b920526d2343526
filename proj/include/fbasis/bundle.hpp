#pragma once

/// @file
/// FRMB bundle files: a fixed little-endian container for frames, Jacobians,
/// and latent vectors.
///
///   offset  size  field
///   0       4     magic "FRMB"
///   4       4     version (u32) = 1
///   8       1     kind (u8): 0 frames, 1 jacobians, 2 latent vectors
///   9       4     rows (u32)
///   13      4     cols (u32)
///   17      4     count (u32)
///   21      8·count·rows·cols  float64 payload, row-major per item
///   then optionally: u32 byte length + UTF-8 JSON metadata
///
/// Metadata bytes are kept verbatim so that write(read(f)) reproduces f.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fbasis/frames.hpp"

namespace fbasis {

enum class BundleKind : std::uint8_t { Frames = 0, Jacobians = 1, Latents = 2 };

inline constexpr std::uint32_t kBundleVersion = 1;
inline constexpr std::size_t kBundleHeaderSize = 21;
inline constexpr double kBundleFrameTol = 1e-8;

struct FrameBundle {
  BundleKind kind = BundleKind::Frames;
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<Matrix> items;
  std::optional<std::string> metadata;
};

std::vector<std::uint8_t> encode_bundle(const FrameBundle& bundle);
/// Validates the header, payload length, finiteness, metadata JSON, and the
/// orthonormality of kind-0 items. Errors name the byte offset involved.
FrameBundle decode_bundle(std::span<const std::uint8_t> bytes);

FrameBundle read_bundle(const std::filesystem::path& path);
void write_bundle(const std::filesystem::path& path, const FrameBundle& bundle);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

FrameBundle make_bundle(BundleKind kind, std::vector<Matrix> items,
                        std::optional<std::string> metadata = std::nullopt);
FrameBundle make_frame_bundle(std::span<const Frame> frames,
                              std::optional<std::string> metadata = std::nullopt);

/// Kind-0 items as Frames (throws Format for other kinds).
std::vector<Frame> bundle_frames(const FrameBundle& bundle);

}  // namespace fbasis
