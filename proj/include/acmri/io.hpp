#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "acmri/coil_stack.hpp"
#include "acmri/geometry.hpp"
#include "acmri/types.hpp"

namespace acmri {

// CoilStack files: one line of JSON header
//   {"n":..,"m":..,"coils":..,"maps":..,"kind":"kspace"|"image"|"sensitivity"}
// terminated by '\n', followed by coils*maps*n*m samples, each two
// little-endian float64 (re, im). Order: coil, map, row, column (column fastest).
void write_coil_stack(const std::filesystem::path& path, const CoilStack& stack);
CoilStack read_coil_stack(const std::filesystem::path& path);

std::string encode_coil_stack(const CoilStack& stack);
CoilStack decode_coil_stack(std::string_view bytes);

// Mask files: {"n": int, "acs": int, "acquired": [ascending line indices]}.
nlohmann::json mask_to_json(const SamplingMask& mask);
SamplingMask mask_from_json(const nlohmann::json& j);
void write_mask(const std::filesystem::path& path, const SamplingMask& mask);
SamplingMask read_mask(const std::filesystem::path& path);

nlohmann::json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

// 8-bit grayscale PNG of image / scale, clamped to [0, 1].
void write_png(const std::filesystem::path& path, const RMatrix& image, double scale);
// 8-bit RGB PNG from a row-major rgb buffer.
void write_png_rgb(const std::filesystem::path& path, int width, int height,
                   const std::vector<unsigned char>& rgb);
// Gray PNG decode, used for checks.
RMatrix read_png_gray(const std::filesystem::path& path);

// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

}  // namespace acmri
