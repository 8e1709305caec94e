#include "lightfc/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "lightfc/error.hpp"

namespace lightfc {

ModelConfig RunConfig::model() const {
  ModelConfig m;
  m.ecm = ecm;
  m.head = head;
  m.template_feature = pipeline.template_feature();
  m.seed = seed;
  return m;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InputError("expected a boolean, got '" + std::string(v) + "'");
}

template <class T>
T parse_number(std::string_view v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw InputError("expected a number, got '" + std::string(v) + "'");
  }
  return out;
}

template <class T>
std::string fmt(T v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

// One table drives both parsing and printing so the two cannot drift apart.
struct Field {
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field number_field(T RunConfig::*sect, auto member) {
  using V = std::remove_cvref_t<decltype(std::declval<T&>().*member)>;
  return {[=](RunConfig& c, std::string_view v) { (c.*sect).*member = parse_number<V>(v); },
          [=](const RunConfig& c) { return fmt((c.*sect).*member); }};
}

template <class T>
Field bool_field(T RunConfig::*sect, bool T::*member) {
  return {[=](RunConfig& c, std::string_view v) { (c.*sect).*member = parse_bool(v); },
          [=](const RunConfig& c) { return fmt((c.*sect).*member); }};
}

Field channel_field(std::array<float, 3> PipelineConfig::*member, int ch) {
  return {[=](RunConfig& c, std::string_view v) {
            (c.pipeline.*member)[ch] = parse_number<float>(v);
          },
          [=](const RunConfig& c) { return fmt((c.pipeline.*member)[ch]); }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = [] {
    std::vector<std::pair<std::string, Field>> t;
    t.emplace_back("model.seed",
                   Field{[](RunConfig& c, std::string_view v) {
                           c.seed = parse_number<std::uint64_t>(v);
                         },
                         [](const RunConfig& c) { return std::to_string(c.seed); }});

    t.emplace_back("ecm.use_scf", bool_field(&RunConfig::ecm, &EcmConfig::use_scf));
    t.emplace_back("ecm.use_iab", bool_field(&RunConfig::ecm, &EcmConfig::use_iab));
    t.emplace_back("ecm.scf_skip", bool_field(&RunConfig::ecm, &EcmConfig::scf_skip));
    t.emplace_back("ecm.iab_skip", bool_field(&RunConfig::ecm, &EcmConfig::iab_skip));
    t.emplace_back("ecm.reuse_mode",
                   Field{[](RunConfig& c, std::string_view v) {
                           c.ecm.reuse_mode = parse_reuse_mode(v);
                         },
                         [](const RunConfig& c) {
                           return std::string(to_string(c.ecm.reuse_mode));
                         }});
    t.emplace_back("ecm.reuse_cls", bool_field(&RunConfig::ecm, &EcmConfig::reuse_cls));
    t.emplace_back("ecm.reuse_box", bool_field(&RunConfig::ecm, &EcmConfig::reuse_box));
    t.emplace_back("ecm.iab_expansion", number_field(&RunConfig::ecm, &EcmConfig::iab_expansion));
    t.emplace_back("ecm.se_ratio", number_field(&RunConfig::ecm, &EcmConfig::se_ratio));

    auto rep_field = [](RepKind HeadConfig::*member) {
      return Field{[=](RunConfig& c, std::string_view v) { c.head.*member = parse_rep_kind(v); },
                   [=](const RunConfig& c) { return std::string(to_string(c.head.*member)); }};
    };
    t.emplace_back("head.stage1", rep_field(&HeadConfig::stage1));
    t.emplace_back("head.stage2", rep_field(&HeadConfig::stage2));
    t.emplace_back("head.use_se", bool_field(&RunConfig::head, &HeadConfig::use_se));
    t.emplace_back("head.width", number_field(&RunConfig::head, &HeadConfig::width));
    t.emplace_back("head.se_ratio", number_field(&RunConfig::head, &HeadConfig::se_ratio));

    t.emplace_back("loss.iou_kind",
                   Field{[](RunConfig& c, std::string_view v) {
                           c.loss.iou_kind = parse_iou_kind(v);
                         },
                         [](const RunConfig& c) { return std::string(to_string(c.loss.iou_kind)); }});
    t.emplace_back("loss.lambda_iou", number_field(&RunConfig::loss, &LossConfig::lambda_iou));
    t.emplace_back("loss.lambda_l1", number_field(&RunConfig::loss, &LossConfig::lambda_l1));
    t.emplace_back("loss.focal_alpha", number_field(&RunConfig::loss, &LossConfig::focal_alpha));
    t.emplace_back("loss.focal_beta", number_field(&RunConfig::loss, &LossConfig::focal_beta));

    t.emplace_back("pipeline.template_factor",
                   number_field(&RunConfig::pipeline, &PipelineConfig::template_factor));
    t.emplace_back("pipeline.template_size",
                   number_field(&RunConfig::pipeline, &PipelineConfig::template_size));
    t.emplace_back("pipeline.search_factor",
                   number_field(&RunConfig::pipeline, &PipelineConfig::search_factor));
    t.emplace_back("pipeline.search_size",
                   number_field(&RunConfig::pipeline, &PipelineConfig::search_size));
    t.emplace_back("pipeline.window_weight",
                   number_field(&RunConfig::pipeline, &PipelineConfig::window_weight));
    const char* rgb[] = {"r", "g", "b"};
    for (int ch = 0; ch < 3; ++ch) {
      t.emplace_back(std::string("pipeline.mean_") + rgb[ch],
                     channel_field(&PipelineConfig::norm_mean, ch));
    }
    for (int ch = 0; ch < 3; ++ch) {
      t.emplace_back(std::string("pipeline.std_") + rgb[ch],
                     channel_field(&PipelineConfig::norm_std, ch));
    }
    return t;
  }();
  return table;
}

void check(const RunConfig& c) {
  const auto& p = c.pipeline;
  if (p.template_size == 0 || p.template_size % 16 != 0 || p.search_size == 0 ||
      p.search_size % 16 != 0) {
    throw InputError("pipeline sizes must be positive multiples of 16");
  }
  if (!(p.template_factor > 0.0) || !(p.search_factor > 0.0)) {
    throw InputError("pipeline crop factors must be positive");
  }
  if (!(p.window_weight >= 0.0 && p.window_weight <= 1.0)) {
    throw InputError("pipeline.window_weight must lie in [0, 1]");
  }
  for (float s : p.norm_std) {
    if (!(s > 0.0f)) throw InputError("pipeline std values must be positive");
  }
  try {
    validate(c.head);
  } catch (const Error& e) {
    throw InputError(std::string("head: ") + e.what());
  }
  if (c.ecm.se_ratio == 0 || c.head.se_ratio == 0 || !(c.ecm.iab_expansion > 0.0)) {
    throw InputError("se ratios and iab expansion must be positive");
  }
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  std::map<std::string_view, const Field*> by_name;
  for (const auto& [name, field] : fields()) by_name[name] = &field;

  RunConfig cfg;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw InputError(where + "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    auto it = by_name.find(key);
    if (it == by_name.end()) throw InputError(where + "unknown key '" + key + "'");
    if (!seen.insert(key).second) throw InputError(where + "duplicate key '" + key + "'");
    try {
      it->second->set(cfg, value);
    } catch (const Error& e) {
      throw InputError(where + key + ": " + e.what());
    }
  }
  check(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const RunConfig& cfg) {
  std::string out;
  std::string section;
  for (const auto& [name, field] : fields()) {
    const std::string s = name.substr(0, name.find('.'));
    if (s != section) {
      if (!section.empty()) out += '\n';
      section = s;
    }
    out += name + " = " + field.get(cfg) + '\n';
  }
  return out;
}

}  // namespace lightfc
