#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "lightfc/losses.hpp"
#include "lightfc/model.hpp"
#include "lightfc/tracker.hpp"

namespace lightfc {

// Everything a run depends on, read from a flat `section.key = value` file.
struct RunConfig {
  EcmConfig ecm;
  HeadConfig head;
  LossConfig loss;
  PipelineConfig pipeline;
  std::uint64_t seed = 1;

  // Template feature size follows the configured template resolution.
  ModelConfig model() const;
  bool operator==(const RunConfig&) const = default;
};

// Blank lines and `#` comments are ignored. Unknown keys, duplicates and unparsable
// values throw InputError with the line number.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);
std::string to_text(const RunConfig& cfg);

}  // namespace lightfc
