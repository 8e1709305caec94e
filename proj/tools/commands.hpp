#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "lightfc/config.hpp"
#include "lightfc/metrics.hpp"
#include "lightfc/synth.hpp"

namespace lightfc::cli {

namespace fs = std::filesystem;

RunConfig config_or_default(const std::optional<fs::path>& path);

enum class WeightSource { file, random_init, rigged };

struct TrackArgs {
  std::optional<fs::path> config;
  std::optional<fs::path> weights;
  WeightSource source = WeightSource::file;
  fs::path sequence;
  fs::path out;
};
// Returns the number of frames written.
std::size_t run_track(const TrackArgs& a, std::ostream& log);

struct EvalArgs {
  fs::path results;
  fs::path annotations;
  fs::path report;
};
MetricReport run_eval(const EvalArgs& a, std::ostream& log);

struct FuseArgs {
  std::optional<fs::path> config;
  fs::path weights;
  fs::path out;
  std::size_t check_pairs = 10;
  std::uint64_t check_seed = 2024;
};
struct FuseSummary {
  std::size_t train_values = 0;
  std::size_t deploy_values = 0;
  double max_abs_diff = 0.0;
};
inline constexpr double kFuseTolerance = 1e-3;
// Throws InputError for already-fused input; Error when the equivalence check fails, in
// which case nothing is written.
FuseSummary run_fuse(const FuseArgs& a, std::ostream& log);

struct StatsArgs {
  std::optional<fs::path> config;
  std::optional<fs::path> json;
};
void run_stats(const StatsArgs& a, std::ostream& out);

struct SynthArgs {
  fs::path out;
  SynthOptions options;
};
void run_synth(const SynthArgs& a, std::ostream& log);

struct InitArgs {
  std::optional<fs::path> config;
  fs::path out;
  bool deploy = false;
};
void run_init(const InitArgs& a, std::ostream& log);

}  // namespace lightfc::cli
