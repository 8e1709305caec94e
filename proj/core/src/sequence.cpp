#include "lightfc/sequence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lightfc/error.hpp"

namespace fs = std::filesystem;

namespace lightfc {

namespace {

bool is_sep(char c) { return c == ',' || c == ' ' || c == '\t' || c == ';'; }

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_value(std::string_view tok, std::size_t line_no) {
  if (tok == "nan" || tok == "NaN" || tok == "NAN") return std::nan("");
  double v = 0.0;
  const char* b = tok.data();
  if (!tok.empty() && tok.front() == '+') ++b;
  const auto [ptr, ec] = std::from_chars(b, tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || b == tok.data() + tok.size()) {
    throw InputError("box line " + std::to_string(line_no) + ": bad number '" +
                     std::string(tok) + "'");
  }
  return v;
}

}  // namespace

BoxTrack parse_boxes(std::string_view text) {
  BoxTrack out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::vector<double> vals;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_sep(line[i])) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && !is_sep(line[j])) ++j;
      vals.push_back(parse_value(line.substr(i, j - i), line_no));
      i = j;
    }
    if (vals.empty()) {
      out.emplace_back(std::nullopt);
      continue;
    }
    if (vals.size() != 4) {
      throw InputError("box line " + std::to_string(line_no) + ": expected 4 values, got " +
                       std::to_string(vals.size()));
    }
    const Box b{vals[0] - 1.0, vals[1] - 1.0, vals[2], vals[3]};
    const bool finite = std::isfinite(b.x) && std::isfinite(b.y) && std::isfinite(b.w) &&
                        std::isfinite(b.h);
    out.emplace_back(finite && b.valid() ? std::optional<Box>(b) : std::nullopt);
  }
  return out;
}

BoxTrack read_boxes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open box file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_boxes(ss.str());
}

std::string format_boxes(const BoxTrack& boxes) {
  std::string out;
  for (const auto& b : boxes) {
    if (!b) {
      out += "nan,nan,nan,nan\n";
      continue;
    }
    out += fmt(b->x + 1.0) + ',' + fmt(b->y + 1.0) + ',' + fmt(b->w) + ',' + fmt(b->h) + '\n';
  }
  return out;
}

void write_file_atomic(const fs::path& path, std::string_view text) {
  fs::path tmp = path;
  tmp += ".tmp";
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw InputError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void write_boxes(const BoxTrack& boxes, const fs::path& path) {
  write_file_atomic(path, format_boxes(boxes));
}

std::vector<fs::path> list_frames(const fs::path& dir) {
  fs::path root = fs::is_directory(dir / "img") ? dir / "img" : dir;
  if (!fs::is_directory(root)) throw InputError("not a directory: " + dir.string());
  std::vector<fs::path> frames;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp") {
      frames.push_back(entry.path());
    }
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

SequenceRecord load_sequence(const fs::path& dir) {
  SequenceRecord rec;
  rec.name = dir.filename().string();
  if (rec.name.empty()) rec.name = dir.parent_path().filename().string();
  rec.frames = list_frames(dir);
  if (rec.frames.empty()) throw InputError("no frames in " + dir.string());
  rec.groundtruth = read_boxes(dir / kGroundtruthFile);
  if (rec.groundtruth.size() != rec.frames.size()) {
    throw InputError(dir.string() + ": " + std::to_string(rec.frames.size()) + " frames but " +
                     std::to_string(rec.groundtruth.size()) + " ground-truth lines");
  }
  if (!rec.groundtruth.front()) {
    throw InputError(dir.string() + ": first frame has no valid box");
  }
  return rec;
}

}  // namespace lightfc
