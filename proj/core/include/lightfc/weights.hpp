#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lightfc/model.hpp"

namespace lightfc {

// Named float32 array as stored in a weights file.
struct NamedArray {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t numel() const;
  bool operator==(const NamedArray&) const = default;
};

using ParamMap = std::map<std::string, NamedArray>;

inline constexpr char kWeightsMagic[4] = {'L', 'F', 'C', 'W'};
inline constexpr std::uint32_t kWeightsVersion = 1;
inline constexpr float kBnEpsilon = 1e-5f;

// Little-endian container bytes; see docs/weights_format.md.
std::string encode_weights(const ParamMap& params);
ParamMap decode_weights(std::string_view bytes);

// Writes to a temporary sibling and renames it into place.
void write_weights(const ParamMap& params, const std::filesystem::path& path);
ParamMap read_weights(const std::filesystem::path& path);

std::size_t total_values(const ParamMap& params);

ParamMap export_params(const Model& m);
// Builds a model with cfg's structure from named arrays. Each rep slot may be stored in
// train form (*.branchK.*) or deploy form (*.fused.*). Missing, unknown or mis-shaped
// entries throw InputError listing the offending names.
Model import_params(const ParamMap& params, const ModelConfig& cfg);

// ECM plus head without a backbone, for fusion widths no full model can have (add-reuse
// needs template cells == search channels).
struct FusionStack {
  EcmParams ecm;
  Head head;
};
struct FusionConfig {
  EcmConfig ecm;
  HeadConfig head;
  std::size_t corr_channels = 64;
  std::size_t search_channels = 96;
};
ParamMap export_params(const FusionStack& f);
FusionStack import_fusion(const ParamMap& params, const FusionConfig& cfg);

// True when any entry belongs to a train-form rep branch.
bool has_train_form(const ParamMap& params);

}  // namespace lightfc
