#include "commands.hpp"

#include <memory>
#include <ostream>

#include "lightfc/error.hpp"
#include "lightfc/rigged.hpp"
#include "lightfc/sequence.hpp"
#include "lightfc/stats.hpp"
#include "lightfc/weights.hpp"

namespace lightfc::cli {

RunConfig config_or_default(const std::optional<fs::path>& path) {
  return path ? load_config(*path) : RunConfig{};
}

namespace {

Model load_model(const fs::path& weights, const RunConfig& cfg) {
  if (!fs::is_regular_file(weights)) throw InputError("weights file not found: " + weights.string());
  return import_params(read_weights(weights), cfg.model());
}

}  // namespace

std::size_t run_track(const TrackArgs& a, std::ostream& log) {
  const RunConfig cfg = config_or_default(a.config);
  std::optional<Model> model;
  std::unique_ptr<Predictor> predictor;
  switch (a.source) {
    case WeightSource::file:
      if (!a.weights) throw InputError("track: --weights is required");
      model = load_model(*a.weights, cfg);
      predictor = std::make_unique<NetworkPredictor>(*model);
      break;
    case WeightSource::random_init:
      model = make_model(cfg.model());
      predictor = std::make_unique<NetworkPredictor>(*model);
      break;
    case WeightSource::rigged:
      predictor = std::make_unique<ChromaOraclePredictor>(cfg.pipeline);
      break;
  }

  const SequenceRecord seq = load_sequence(a.sequence);
  BoxTrack results;
  results.reserve(seq.frames.size());
  TrackerState state = init(*predictor, cfg.pipeline, load_image(seq.frames.front()),
                            *seq.groundtruth.front());
  results.emplace_back(state.box);
  for (std::size_t f = 1; f < seq.frames.size(); ++f) {
    results.emplace_back(track(*predictor, state, load_image(seq.frames[f])).box);
  }
  write_boxes(results, a.out);
  log << seq.name << ": " << results.size() << " frames -> " << a.out.string() << '\n';
  return results.size();
}

MetricReport run_eval(const EvalArgs& a, std::ostream& log) {
  MetricReport r = evaluate_directories(a.results, a.annotations);
  write_file_atomic(a.report, report_json(r));
  for (const auto& s : r.sequences) {
    log << s.name << ": auc " << s.success.summary << "  p20 " << s.precision.summary
        << "  pnorm " << s.norm_precision.summary << '\n';
  }
  log << "aggregate (" << r.sequences.size() << " sequences): auc " << r.success.summary
      << "  p20 " << r.precision.summary << "  pnorm " << r.norm_precision.summary << '\n';
  return r;
}

FuseSummary run_fuse(const FuseArgs& a, std::ostream& log) {
  const RunConfig cfg = config_or_default(a.config);
  if (!fs::is_regular_file(a.weights)) {
    throw InputError("weights file not found: " + a.weights.string());
  }
  const ParamMap train_params = read_weights(a.weights);
  if (!has_train_form(train_params)) {
    throw InputError("fuse: " + a.weights.string() + " is already in deploy form");
  }
  const Model train = import_params(train_params, cfg.model());
  const Model deploy = fuse(train);
  const ParamMap deploy_params = export_params(deploy);

  FuseSummary s;
  s.train_values = total_values(train_params);
  s.deploy_values = total_values(deploy_params);
  Rng rng(a.check_seed);
  const auto& p = cfg.pipeline;
  for (std::size_t i = 0; i < a.check_pairs; ++i) {
    const Tensor z = random_tensor(rng, {1, 3, p.template_size, p.template_size}, -2.0, 2.0);
    const Tensor x = random_tensor(rng, {1, 3, p.search_size, p.search_size}, -2.0, 2.0);
    const HeadOutput ot = forward(train, z, x);
    const HeadOutput od = forward(deploy, z, x);
    s.max_abs_diff = std::max({s.max_abs_diff, max_abs_diff(ot.response, od.response),
                               max_abs_diff(ot.offset, od.offset), max_abs_diff(ot.size, od.size)});
  }
  log << "fuse check: " << a.check_pairs << " random input pairs, max |train - deploy| = "
      << s.max_abs_diff << " (tolerance " << kFuseTolerance << ")\n";
  if (!(s.max_abs_diff <= kFuseTolerance)) {
    throw Error("fuse: deploy form deviates from train form beyond tolerance");
  }
  write_weights(deploy_params, a.out);
  log << "values: train " << s.train_values << ", deploy " << s.deploy_values << " -> "
      << a.out.string() << '\n';
  return s;
}

void run_stats(const StatsArgs& a, std::ostream& out) {
  const RunConfig cfg = config_or_default(a.config);
  const StatsReport r = stats_for(cfg.model(), cfg.pipeline);
  out << stats_text(r);
  const std::string json = stats_json(r, cfg.pipeline);
  if (a.json) {
    write_file_atomic(*a.json, json);
  } else {
    out << json;
  }
}

void run_synth(const SynthArgs& a, std::ostream& log) {
  const SynthSequence seq = make_synth(a.options);
  write_synth(seq, a.out);
  log << "wrote " << seq.frames.size() << " frames (" << to_string(a.options.motion)
      << ") to " << a.out.string() << '\n';
}

void run_init(const InitArgs& a, std::ostream& log) {
  const RunConfig cfg = config_or_default(a.config);
  Model m = make_model(cfg.model());
  if (a.deploy) m = fuse(m);
  const ParamMap params = export_params(m);
  write_weights(params, a.out);
  log << "wrote " << params.size() << " arrays (" << total_values(params) << " values, "
      << (a.deploy ? "deploy" : "train") << " form) to " << a.out.string() << '\n';
}

}  // namespace lightfc::cli
