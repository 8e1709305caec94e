#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lightfc/model.hpp"

namespace lightfc {

// One counted operation. Names follow the weights naming scheme; backbone entries carry
// an `@template` or `@search` suffix because the backbone runs once per input.
struct LayerStat {
  std::string name;
  std::string op;  // conv, bn, se, corr, add
  std::uint64_t params = 0;
  std::uint64_t macs = 0;
  Shape output;
};

struct ModelStats {
  std::vector<LayerStat> layers;
  std::uint64_t params = 0;  // each parameter once, even though the backbone runs twice
  std::uint64_t macs = 0;    // one forward over a template and a search crop

  const LayerStat* find(const std::string& name) const;
};

// Counts follow docs/mac_formulas.md. The model is walked as it stands, so pass fuse(m)
// for deploy-form numbers.
ModelStats compute_stats(const Model& m, const PipelineConfig& pipeline);

struct StatsReport {
  ModelStats train;
  ModelStats deploy;
};

StatsReport stats_for(const ModelConfig& cfg, const PipelineConfig& pipeline);

// Published totals for the reference model, printed for comparison only.
inline constexpr double kReferenceParamsM = 3.16;
inline constexpr double kReferenceGflops = 0.95;

std::string stats_json(const StatsReport& r, const PipelineConfig& pipeline);
std::string stats_text(const StatsReport& r);

}  // namespace lightfc
