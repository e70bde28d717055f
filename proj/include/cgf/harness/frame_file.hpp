#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "cgf/gframe.hpp"

namespace cgf {

inline constexpr int kFrameFormatVersion = 1;

/// On-disk form of a family with optional controllers:
///   {format_version: 1, field: "complex", n,
///    blocks: [{rows, entries: [[[re, im], ...], ...]}],
///    controllers: {T: entries, U: entries}}
/// Unknown keys are rejected. Doubles are written in shortest round-trip form,
/// so load(save(x)) is bit-exact.
struct FrameFile {
  GFrame frame;
  std::optional<Matrix> t;
  std::optional<Matrix> u;
  int format_version = kFrameFormatVersion;
};

nlohmann::json matrix_to_json(const Matrix& m);
// Throws ParseError on malformed or non-finite entries.
Matrix matrix_from_json(const nlohmann::json& j, const std::string& what);

nlohmann::json to_json(const FrameFile& file);
// Throws ParseError, VersionMismatch, or ShapeError.
FrameFile frame_file_from_json(const nlohmann::json& j);

void save_frame(const std::filesystem::path& path, const FrameFile& file);
FrameFile load_frame(const std::filesystem::path& path);

// Signal files: {format_version: 1, vector: [[re, im], ...]}.
void save_signal(const std::filesystem::path& path, const Vector& v);
Vector load_signal(const std::filesystem::path& path);

nlohmann::json parse_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace cgf
