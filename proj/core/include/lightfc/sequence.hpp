#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lightfc/box.hpp"

namespace lightfc {

// One line per frame. Entries that are empty, NaN or non-positive in size stay nullopt.
using BoxTrack = std::vector<std::optional<Box>>;

// Lines are `x,y,w,h` with a 1-based top-left corner; results are 0-based. Tabs and
// spaces are accepted as separators too. Malformed lines throw InputError.
BoxTrack parse_boxes(std::string_view text);
BoxTrack read_boxes(const std::filesystem::path& path);

// Shortest round-trip decimal, 1-based, written atomically. Absent boxes become `nan,nan,nan,nan`.
std::string format_boxes(const BoxTrack& boxes);
void write_boxes(const BoxTrack& boxes, const std::filesystem::path& path);

struct SequenceRecord {
  std::string name;
  std::vector<std::filesystem::path> frames;
  BoxTrack groundtruth;
};

inline constexpr const char* kGroundtruthFile = "groundtruth.txt";

// Image files (png, jpg, jpeg, bmp) in dir/img if present, else in dir, sorted by name.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

// Frames plus dir/groundtruth.txt. Throws InputError unless the counts match and the
// first frame has a valid box.
SequenceRecord load_sequence(const std::filesystem::path& dir);

// Writes `text` to a sibling temporary and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace lightfc
