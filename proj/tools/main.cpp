#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "lightfc/error.hpp"

namespace {

template <class T>
void optional_path(CLI::App* sub, const char* flag, std::optional<T>& slot, const char* help) {
  sub->add_option_function<std::string>(
      flag, [&slot](const std::string& v) { slot = T(v); }, help);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace lightfc::cli;
  CLI::App app{"lightfc: correlation-fusion tracker toolkit"};
  app.require_subcommand(1);

  TrackArgs track;
  bool rigged = false;
  bool random_init = false;
  auto* t = app.add_subcommand("track", "Track one sequence and write a result file");
  optional_path(t, "--config", track.config, "Run configuration file");
  optional_path(t, "--weights", track.weights, "LFCW weights (train or deploy form)");
  t->add_flag("--rigged", rigged, "Use the chroma oracle predictor instead of weights");
  t->add_flag("--random-init", random_init, "Use seeded random weights");
  t->add_option("--sequence", track.sequence, "Sequence directory")->required();
  t->add_option("--out", track.out, "Result file")->required();

  EvalArgs eval;
  auto* e = app.add_subcommand("eval", "Compute success, precision and normalized precision");
  e->add_option("--results", eval.results, "Directory of <name>.txt result files")->required();
  e->add_option("--annotations", eval.annotations, "Ground-truth directory")->required();
  e->add_option("--report", eval.report, "JSON report path")->required();

  FuseArgs fuse;
  auto* f = app.add_subcommand("fuse", "Convert train-form weights to deploy form");
  optional_path(f, "--config", fuse.config, "Run configuration file");
  f->add_option("--weights", fuse.weights, "Train-form LFCW weights")->required();
  f->add_option("--out", fuse.out, "Deploy-form output")->required();
  f->add_option("--check-pairs", fuse.check_pairs, "Random input pairs for the equivalence check");

  StatsArgs stats;
  auto* s = app.add_subcommand("stats", "Parameter and multiply-accumulate counts");
  optional_path(s, "--config", stats.config, "Run configuration file");
  optional_path(s, "--json", stats.json, "Write the JSON document here instead of stdout");

  SynthArgs synth;
  std::string motion = "linear";
  auto* y = app.add_subcommand("synth", "Generate a synthetic sequence");
  y->add_option("--out", synth.out, "Output directory")->required();
  y->add_option("--frames", synth.options.frames, "Frame count (>= 2)")->required();
  y->add_option("--motion", motion, "linear or sine")->check(CLI::IsMember({"linear", "sine"}));
  y->add_option("--seed", synth.options.seed, "Scene seed");
  y->add_option("--width", synth.options.width, "Frame width");
  y->add_option("--height", synth.options.height, "Frame height");
  y->add_option("--target-size", synth.options.target_size, "Target side in pixels");

  InitArgs init;
  auto* i = app.add_subcommand("init", "Write seeded random weights");
  optional_path(i, "--config", init.config, "Run configuration file");
  i->add_option("--out", init.out, "Weights output")->required();
  i->add_flag("--deploy", init.deploy, "Write deploy form");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::Error& err) {
    app.exit(err);
    return 2;
  }

  try {
    if (*t) {
      if (rigged && random_init) throw lightfc::InputError("--rigged and --random-init conflict");
      if (rigged) track.source = WeightSource::rigged;
      if (random_init) track.source = WeightSource::random_init;
      run_track(track, std::cerr);
    } else if (*e) {
      run_eval(eval, std::cout);
    } else if (*f) {
      run_fuse(fuse, std::cerr);
    } else if (*s) {
      run_stats(stats, std::cout);
    } else if (*y) {
      synth.options.motion = lightfc::parse_motion(motion);
      run_synth(synth, std::cerr);
    } else if (*i) {
      run_init(init, std::cerr);
    }
  } catch (const lightfc::InputError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
