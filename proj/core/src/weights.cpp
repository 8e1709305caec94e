#include "lightfc/weights.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "lightfc/error.hpp"
#include "lightfc/sequence.hpp"

namespace lightfc {

static_assert(sizeof(float) == 4);

std::size_t NamedArray::numel() const {
  std::size_t n = 1;
  for (std::uint32_t d : dims) n *= d;
  return n;
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw InputError(std::string("weights: truncated while reading ") + what);
    }
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<std::uint8_t>(bytes_[pos_++]);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string encode_weights(const ParamMap& params) {
  std::string out(kWeightsMagic, 4);
  put_u32(out, kWeightsVersion);
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& [name, arr] : params) {
    if (arr.data.size() != arr.numel()) {
      throw ShapeError("weights: entry " + name + " has inconsistent data length");
    }
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out += name;
    out.push_back(0);  // dtype: float32
    out.push_back(static_cast<char>(arr.dims.size()));
    for (std::uint32_t d : arr.dims) put_u32(out, d);
    for (float f : arr.data) put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

ParamMap decode_weights(std::string_view bytes) {
  Reader r(bytes);
  if (r.take(4, "magic") != std::string_view(kWeightsMagic, 4)) {
    throw InputError("weights: bad magic (not an LFCW container)");
  }
  const std::uint32_t version = r.u32("version");
  if (version != kWeightsVersion) {
    throw InputError("weights: unsupported container version " + std::to_string(version));
  }
  const std::uint32_t count = r.u32("entry count");
  ParamMap params;
  for (std::uint32_t e = 0; e < count; ++e) {
    const std::uint32_t len = r.u32("name length");
    std::string name(r.take(len, "name"));
    const std::uint8_t dtype = r.u8("dtype");
    if (dtype != 0) throw InputError("weights: entry " + name + " has unknown dtype");
    const std::uint8_t rank = r.u8("rank");
    NamedArray arr;
    for (std::uint8_t i = 0; i < rank; ++i) arr.dims.push_back(r.u32("dims"));
    const std::size_t n = arr.numel();
    std::string_view raw = r.take(n * 4, "data");
    arr.data.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(raw[4 * i + b])) << (8 * b);
      }
      arr.data[i] = std::bit_cast<float>(bits);
    }
    if (!params.emplace(std::move(name), std::move(arr)).second) {
      throw InputError("weights: duplicate entry name");
    }
  }
  if (!r.done()) throw InputError("weights: trailing bytes after last entry");
  return params;
}

void write_weights(const ParamMap& params, const std::filesystem::path& path) {
  write_file_atomic(path, encode_weights(params));
}

ParamMap read_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open weights file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_weights(ss.str());
}

std::size_t total_values(const ParamMap& params) {
  std::size_t n = 0;
  for (const auto& [name, arr] : params) n += arr.data.size();
  return n;
}

bool has_train_form(const ParamMap& params) {
  for (const auto& [name, arr] : params) {
    if (name.find(".branch") != std::string::npos) return true;
  }
  return false;
}

// ---- export ---------------------------------------------------------------------------

namespace {

NamedArray array_of(const Tensor& t) {
  const Shape& s = t.shape();
  return {{static_cast<std::uint32_t>(s.n), static_cast<std::uint32_t>(s.c),
           static_cast<std::uint32_t>(s.h), static_cast<std::uint32_t>(s.w)},
          t.values()};
}

NamedArray array_of(const std::vector<float>& v) {
  return {{static_cast<std::uint32_t>(v.size())}, v};
}

class Exporter {
 public:
  ParamMap params;

  void conv(const std::string& p, const Conv2dParams& c) {
    params[p + ".weight"] = array_of(c.weight);
    params[p + ".bias"] = array_of(c.bias);
  }
  void bn(const std::string& p, const BatchNormParams& b) {
    params[p + ".gamma"] = array_of(b.gamma);
    params[p + ".beta"] = array_of(b.beta);
    params[p + ".mean"] = array_of(b.running_mean);
    params[p + ".var"] = array_of(b.running_var);
  }
  void cbr(const std::string& p, const CbrBlock& b) {
    conv(p + ".conv", b.conv);
    bn(p + ".bn", b.bn);
  }
  void se(const std::string& p, const SeBlock& s) {
    conv(p + ".reduce", s.reduce);
    conv(p + ".expand", s.expand);
  }
  void rep(const std::string& p, const RepUnit& u) {
    if (const auto* f = std::get_if<FusedConv>(&u)) {
      conv(p + ".fused.conv", f->conv);
      return;
    }
    const auto& spec = std::get<RepBranchSpec>(u);
    for (std::size_t k = 0; k < spec.branches.size(); ++k) {
      const std::string b = p + ".branch" + std::to_string(k);
      conv(b + ".conv", spec.branches[k].conv);
      bn(b + ".bn", spec.branches[k].bn);
    }
  }
  void branch(const std::string& p, const HeadBranch& b) {
    rep(p + ".stage1", b.stage1);
    if (b.se) se(p + ".se", *b.se);
    for (std::size_t i = 0; i < b.stage2.size(); ++i) {
      rep(p + ".stage2.block" + std::to_string(i + 2), b.stage2[i]);
    }
    conv(p + ".stage2.block5.conv", b.output);
  }
};

// ---- import ---------------------------------------------------------------------------

class Importer {
 public:
  explicit Importer(const ParamMap& params) : params_(params) {}

  bool has(const std::string& name) const { return params_.count(name) != 0; }

  std::vector<float> vec(const std::string& name, std::size_t len) {
    const NamedArray* a = find(name);
    if (!a) return std::vector<float>(len, 0.0f);
    if (a->dims.size() != 1 || a->dims[0] != len) {
      bad_shape_.push_back(name + " (expected [" + std::to_string(len) + "])");
      return std::vector<float>(len, 0.0f);
    }
    return a->data;
  }

  Tensor tensor(const std::string& name, Shape s) {
    const NamedArray* a = find(name);
    if (!a) return Tensor(s);
    const std::vector<std::uint32_t> want{static_cast<std::uint32_t>(s.n),
                                          static_cast<std::uint32_t>(s.c),
                                          static_cast<std::uint32_t>(s.h),
                                          static_cast<std::uint32_t>(s.w)};
    if (a->dims != want) {
      bad_shape_.push_back(name + " (expected " + s.str() + ")");
      return Tensor(s);
    }
    return Tensor(s, a->data);
  }

  // Overwrites values of `c` in place, keeping its geometry.
  void conv(const std::string& p, Conv2dParams& c) {
    c.weight = tensor(p + ".weight", c.weight.shape());
    c.bias = vec(p + ".bias", c.out_channels());
  }
  void bn(const std::string& p, BatchNormParams& b) {
    const std::size_t n = b.channels();
    b.gamma = vec(p + ".gamma", n);
    b.beta = vec(p + ".beta", n);
    b.running_mean = vec(p + ".mean", n);
    b.running_var = vec(p + ".var", n);
    b.epsilon = kBnEpsilon;
  }
  void cbr(const std::string& p, CbrBlock& b) {
    conv(p + ".conv", b.conv);
    bn(p + ".bn", b.bn);
  }
  void se(const std::string& p, SeBlock& s) {
    conv(p + ".reduce", s.reduce);
    conv(p + ".expand", s.expand);
  }
  // `u` arrives in train form from the template model; stored form decides the result.
  void rep(const std::string& p, RepUnit& u) {
    auto& spec = std::get<RepBranchSpec>(u);
    if (has(p + ".fused.conv.weight")) {
      FusedConv f;
      f.conv.weight = Tensor({spec.out_channels(), spec.in_channels(), 3, 3});
      f.conv.padding = 1;
      conv(p + ".fused.conv", f.conv);
      u = f;
      return;
    }
    for (std::size_t k = 0; k < spec.branches.size(); ++k) {
      const std::string b = p + ".branch" + std::to_string(k);
      conv(b + ".conv", spec.branches[k].conv);
      bn(b + ".bn", spec.branches[k].bn);
    }
  }
  void branch(const std::string& p, HeadBranch& b) {
    rep(p + ".stage1", b.stage1);
    if (b.se) se(p + ".se", *b.se);
    for (std::size_t i = 0; i < b.stage2.size(); ++i) {
      rep(p + ".stage2.block" + std::to_string(i + 2), b.stage2[i]);
    }
    conv(p + ".stage2.block5.conv", b.output);
  }

  void finish() const {
    std::ostringstream msg;
    bool failed = false;
    auto list = [&](const char* title, const std::vector<std::string>& names) {
      if (names.empty()) return;
      failed = true;
      msg << title << ":";
      for (const auto& n : names) msg << "\n  " << n;
      msg << '\n';
    };
    std::vector<std::string> unknown;
    for (const auto& [name, arr] : params_) {
      if (!used_.count(name)) unknown.push_back(name);
    }
    list("missing entries", missing_);
    list("unknown entries", unknown);
    list("mis-shaped entries", bad_shape_);
    if (failed) throw InputError("weights do not match the configured model\n" + msg.str());
  }

 private:
  const NamedArray* find(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) {
      missing_.push_back(name);
      return nullptr;
    }
    used_.insert(name);
    return &it->second;
  }

  const ParamMap& params_;
  std::set<std::string> used_;
  std::vector<std::string> missing_;
  std::vector<std::string> bad_shape_;
};

template <class Visitor, class EcmRef, class HeadRef>
void visit_fusion(Visitor& v, EcmRef& ecm, HeadRef& head) {
  v.se("ecm.se", ecm.se);
  if (ecm.scf) v.rep("ecm.scf", *ecm.scf);
  if (ecm.iab) {
    v.cbr("ecm.iab.expand", ecm.iab->expand);
    v.cbr("ecm.iab.project", ecm.iab->project);
  }
  v.branch("head.cls", head.cls);
  v.branch("head.offset", head.offset);
  v.branch("head.size", head.size);
}

template <class Visitor, class ModelRef>
void visit_model(Visitor& v, ModelRef& m) {
  v.cbr("backbone.stem", m.backbone.stem);
  for (std::size_t i = 0; i < m.backbone.stages.size(); ++i) {
    for (std::size_t j = 0; j < m.backbone.stages[i].size(); ++j) {
      auto& block = m.backbone.stages[i][j];
      const std::string p = "backbone.stage" + std::to_string(i + 1) + ".block" + std::to_string(j);
      if (block.expand) v.cbr(p + ".expand", *block.expand);
      v.cbr(p + ".depthwise", block.depthwise);
      v.cbr(p + ".project", block.project);
    }
  }
  visit_fusion(v, m.ecm, m.head);
}

}  // namespace

ParamMap export_params(const Model& m) {
  Exporter e;
  visit_model(e, m);
  return std::move(e.params);
}

Model import_params(const ParamMap& params, const ModelConfig& cfg) {
  Model m = make_model(cfg, InitOptions{0.0, false, false});
  Importer im(params);
  visit_model(im, m);
  im.finish();
  return m;
}

ParamMap export_params(const FusionStack& f) {
  Exporter e;
  visit_fusion(e, f.ecm, f.head);
  return std::move(e.params);
}

FusionStack import_fusion(const ParamMap& params, const FusionConfig& cfg) {
  Rng rng(0);
  const InitOptions blank{0.0, false, false};
  FusionStack f{make_ecm(rng, cfg.ecm, cfg.corr_channels, cfg.search_channels, blank), {}};
  f.head = make_head(rng, cfg.head,
                     ecm_output_channels(cfg.ecm, cfg.corr_channels, cfg.search_channels, true),
                     ecm_output_channels(cfg.ecm, cfg.corr_channels, cfg.search_channels, false),
                     blank);
  Importer im(params);
  visit_fusion(im, f.ecm, f.head);
  im.finish();
  return f;
}

}  // namespace lightfc
