// Point cloud and label file readers/writers.
//
// XYZI text: one `x y z intensity` record per line, `#` comments and blank
// lines skipped. PLY: ascii or binary_little_endian, vertex element with x/y/z
// and an `intensity` or `scalar_intensity` property. Label files hold one `0`
// (wood) or `1` (leaf) per line.
#pragma once

#include <filesystem>
#include <vector>

#include "woodleaf/types.hpp"

namespace woodleaf {

enum class CloudFileFormat { XyziText, PlyAscii, PlyBinaryLittleEndian };

/// Guesses the format from the extension and, for PLY, the header's format line.
CloudFileFormat detect_format(const std::filesystem::path& path);

/// Reads a cloud and centers it on `scanner_position`. Labels are all Unassigned.
LabeledCloud read_cloud(const std::filesystem::path& path, CloudFileFormat format,
                        Vec3 scanner_position = {});

/// Writes positions (de-centered) and intensity without labels.
void write_cloud(const LabeledCloud& cloud, const std::filesystem::path& path,
                 CloudFileFormat format);

/// Writes a PLY with per-point RGB: wood (139,69,19), leaf (34,139,34).
void write_cloud_colored(const LabeledCloud& cloud, const std::filesystem::path& path,
                         CloudFileFormat format);

struct Rgb {
  std::uint8_t r, g, b;
};
inline constexpr Rgb kWoodColor{139, 69, 19};
inline constexpr Rgb kLeafColor{34, 139, 34};

std::vector<ClassLabel> read_labels(const std::filesystem::path& path);
void write_labels(std::span<const ClassLabel> labels, const std::filesystem::path& path);

}  // namespace woodleaf
