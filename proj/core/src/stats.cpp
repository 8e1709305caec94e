#include "lightfc/stats.hpp"

#include <cstdio>
#include <nlohmann/json.hpp>

#include "lightfc/error.hpp"

namespace lightfc {

const LayerStat* ModelStats::find(const std::string& name) const {
  for (const auto& l : layers) {
    if (l.name == name) return &l;
  }
  return nullptr;
}

namespace {

class Counter {
 public:
  ModelStats stats;
  // Backbone runs twice; its parameters are counted on the first pass only.
  bool count_params = true;

  Shape conv(const std::string& name, const Conv2dParams& c, Shape in) {
    if (in.c != c.in_channels()) {
      throw ShapeError("stats: " + name + " expects " + std::to_string(c.in_channels()) +
                       " channels, gets " + in.str());
    }
    const std::size_t k = c.kernel();
    const Shape out{in.n, c.out_channels(), conv_output_size(in.h, k, c.stride, c.padding),
                    conv_output_size(in.w, k, c.stride, c.padding)};
    const std::uint64_t weights = c.weight.numel();
    const std::uint64_t per_out = (c.in_channels() / c.groups) * k * k;
    push(name, "conv", weights + c.bias.size(), out.plane() * out.c * per_out, out);
    return out;
  }
  Shape bn(const std::string& name, const BatchNormParams& b, Shape in) {
    push(name, "bn", 2 * b.channels(), in.plane() * in.c, in);
    return in;
  }
  Shape add(const std::string& name, Shape in, std::uint64_t times = 1) {
    push(name, "add", 0, times * in.plane() * in.c, in);
    return in;
  }
  Shape cbr(const std::string& p, const CbrBlock& b, Shape in) {
    return bn(p + ".bn", b.bn, conv(p + ".conv", b.conv, in));
  }
  Shape se(const std::string& p, const SeBlock& s, Shape in) {
    // pooling, reduce, expand, gating
    const std::uint64_t params = s.reduce.weight.numel() + s.reduce.bias.size() +
                                 s.expand.weight.numel() + s.expand.bias.size();
    const std::uint64_t macs = in.plane() * in.c + s.reduce.weight.numel() +
                               s.expand.weight.numel() + in.plane() * in.c;
    push(p, "se", params, macs, in);
    return in;
  }
  Shape rep(const std::string& p, const RepUnit& u, Shape in) {
    if (const auto* f = std::get_if<FusedConv>(&u)) return conv(p + ".fused.conv", f->conv, in);
    const auto& spec = std::get<RepBranchSpec>(u);
    Shape out;
    for (std::size_t k = 0; k < spec.branches.size(); ++k) {
      const std::string b = p + ".branch" + std::to_string(k);
      out = bn(b + ".bn", spec.branches[k].bn, conv(b + ".conv", spec.branches[k].conv, in));
    }
    if (spec.branches.size() > 1) add(p + ".sum", out, spec.branches.size() - 1);
    return out;
  }
  Shape backbone(const Backbone& net, Shape in, const std::string& tag) {
    Shape x = cbr("backbone.stem", net.stem, in);
    rename_last(2, tag);
    for (std::size_t i = 0; i < net.stages.size(); ++i) {
      for (std::size_t j = 0; j < net.stages[i].size(); ++j) {
        const auto& b = net.stages[i][j];
        const std::string p =
            "backbone.stage" + std::to_string(i + 1) + ".block" + std::to_string(j);
        const std::size_t before = stats.layers.size();
        Shape h = x;
        if (b.expand) h = cbr(p + ".expand", *b.expand, h);
        h = cbr(p + ".depthwise", b.depthwise, h);
        h = cbr(p + ".project", b.project, h);
        if (b.use_skip) add(p + ".skip", h);
        rename_last(stats.layers.size() - before, tag);
        x = h;
      }
    }
    return x;
  }
  Shape branch(const std::string& p, const HeadBranch& b, Shape in) {
    Shape x = rep(p + ".stage1", b.stage1, in);
    if (b.se) x = se(p + ".se", *b.se, x);
    for (std::size_t i = 0; i < b.stage2.size(); ++i) {
      x = rep(p + ".stage2.block" + std::to_string(i + 2), b.stage2[i], x);
    }
    return conv(p + ".stage2.block5.conv", b.output, x);
  }

 private:
  void push(const std::string& name, const char* op, std::uint64_t params, std::uint64_t macs,
            Shape out) {
    const std::uint64_t p = count_params ? params : 0;
    stats.layers.push_back({name, op, p, macs, out});
    stats.params += p;
    stats.macs += macs;
  }
  void rename_last(std::size_t n, const std::string& tag) {
    for (std::size_t i = stats.layers.size() - n; i < stats.layers.size(); ++i) {
      stats.layers[i].name += tag;
    }
  }
};

}  // namespace

ModelStats compute_stats(const Model& m, const PipelineConfig& pipeline) {
  Counter c;
  const Shape zin{1, 3, pipeline.template_size, pipeline.template_size};
  const Shape xin{1, 3, pipeline.search_size, pipeline.search_size};
  const Shape z = c.backbone(m.backbone, zin, "@template");
  c.count_params = false;
  const Shape x = c.backbone(m.backbone, xin, "@search");
  c.count_params = true;
  if (z.c != x.c) throw ShapeError("stats: template and search widths differ");

  const EcmConfig& cfg = m.config.ecm;
  const Shape corr{1, z.plane(), x.h, x.w};
  // Scaling is applied to the template once, the correlation itself is z.c MACs per output.
  c.stats.layers.push_back({"ecm.corr.scale", "corr", 0, z.plane() * z.c, {1, z.c, z.h, z.w}});
  c.stats.macs += z.plane() * z.c;
  c.stats.layers.push_back({"ecm.corr", "corr", 0, corr.plane() * corr.c * z.c, corr});
  c.stats.macs += corr.plane() * corr.c * z.c;

  Shape f = c.se("ecm.se", m.ecm.se, corr);
  if (cfg.use_scf && m.ecm.scf) {
    f = c.rep("ecm.scf", *m.ecm.scf, f);
    if (cfg.scf_skip) c.add("ecm.scf.skip", f);
  }
  if (cfg.use_iab && m.ecm.iab) {
    const Shape h = c.cbr("ecm.iab.expand", m.ecm.iab->expand, f);
    f = c.cbr("ecm.iab.project", m.ecm.iab->project, h);
    if (cfg.iab_skip) c.add("ecm.iab.skip", f);
  }
  auto reuse = [&](bool enabled, const char* name) {
    if (!enabled || cfg.reuse_mode == ReuseMode::none) return f;
    if (cfg.reuse_mode == ReuseMode::add) return c.add(name, f);
    return Shape{1, f.c + x.c, f.h, f.w};
  };
  const Shape cls_in = reuse(cfg.reuse_cls, "ecm.reuse.cls");
  const Shape box_in = reuse(cfg.reuse_box, "ecm.reuse.box");
  c.branch("head.cls", m.head.cls, cls_in);
  c.branch("head.offset", m.head.offset, box_in);
  c.branch("head.size", m.head.size, box_in);
  return std::move(c.stats);
}

StatsReport stats_for(const ModelConfig& cfg, const PipelineConfig& pipeline) {
  const Model m = make_model(cfg);
  return {compute_stats(m, pipeline), compute_stats(fuse(m), pipeline)};
}

namespace {

nlohmann::ordered_json form_json(const ModelStats& s) {
  nlohmann::ordered_json j;
  j["params"] = s.params;
  j["macs"] = s.macs;
  j["params_m"] = static_cast<double>(s.params) / 1e6;
  j["gmacs"] = static_cast<double>(s.macs) / 1e9;
  auto layers = nlohmann::ordered_json::array();
  for (const auto& l : s.layers) {
    nlohmann::ordered_json e;
    e["name"] = l.name;
    e["op"] = l.op;
    e["params"] = l.params;
    e["macs"] = l.macs;
    e["output"] = {l.output.c, l.output.h, l.output.w};
    layers.push_back(e);
  }
  j["layers"] = layers;
  return j;
}

}  // namespace

std::string stats_json(const StatsReport& r, const PipelineConfig& pipeline) {
  nlohmann::ordered_json j;
  j["template_size"] = pipeline.template_size;
  j["search_size"] = pipeline.search_size;
  j["train"] = form_json(r.train);
  j["deploy"] = form_json(r.deploy);
  j["reference"] = {{"params_m", kReferenceParamsM}, {"gflops", kReferenceGflops}};
  return j.dump(2) + '\n';
}

std::string stats_text(const StatsReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "form     params        MACs\n"
                "train    %-12llu  %llu\n"
                "deploy   %-12llu  %llu\n"
                "deploy: %.3f M params, %.3f G MACs (published: %.2f M, %.2f G)\n",
                static_cast<unsigned long long>(r.train.params),
                static_cast<unsigned long long>(r.train.macs),
                static_cast<unsigned long long>(r.deploy.params),
                static_cast<unsigned long long>(r.deploy.macs),
                static_cast<double>(r.deploy.params) / 1e6,
                static_cast<double>(r.deploy.macs) / 1e9, kReferenceParamsM, kReferenceGflops);
  return buf;
}

}  // namespace lightfc
