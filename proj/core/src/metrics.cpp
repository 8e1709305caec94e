#include "lightfc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>

#include "lightfc/error.hpp"

namespace fs = std::filesystem;

namespace lightfc {

namespace {

constexpr std::size_t kSuccessSteps = 21;
constexpr std::size_t kPrecisionSteps = 51;
constexpr std::size_t kPrecisionAt = 20;

void require_same(const std::vector<Box>& pred, const std::vector<Box>& gt) {
  if (pred.size() != gt.size()) {
    throw InputError("prediction and ground truth lengths differ (" + std::to_string(pred.size()) +
                     " vs " + std::to_string(gt.size()) + ")");
  }
  if (gt.empty()) throw InputError("cannot evaluate an empty sequence");
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

Curve fraction_curve(const std::vector<double>& scores, std::vector<double> thresholds,
                     bool strict_above) {
  Curve c;
  c.thresholds = std::move(thresholds);
  const double n = static_cast<double>(scores.size());
  for (double t : c.thresholds) {
    std::size_t hits = 0;
    for (double s : scores) hits += strict_above ? (s > t) : (s <= t);
    c.values.push_back(n > 0 ? static_cast<double>(hits) / n : 0.0);
  }
  return c;
}

}  // namespace

double overlap(const Box& a, const Box& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double center_distance(const Box& a, const Box& b) {
  return std::hypot(a.cx() - b.cx(), a.cy() - b.cy());
}

Curve success_curve(const std::vector<Box>& pred, const std::vector<Box>& gt) {
  require_same(pred, gt);
  std::vector<double> ious;
  for (std::size_t i = 0; i < gt.size(); ++i) ious.push_back(overlap(pred[i], gt[i]));
  std::vector<double> t;
  for (std::size_t i = 0; i < kSuccessSteps; ++i) t.push_back(static_cast<double>(i) / 20.0);
  Curve c = fraction_curve(ious, std::move(t), true);
  c.summary = mean(c.values);
  return c;
}

Curve precision_curve(const std::vector<Box>& pred, const std::vector<Box>& gt) {
  require_same(pred, gt);
  std::vector<double> dist;
  for (std::size_t i = 0; i < gt.size(); ++i) dist.push_back(center_distance(pred[i], gt[i]));
  std::vector<double> t;
  for (std::size_t i = 0; i < kPrecisionSteps; ++i) t.push_back(static_cast<double>(i));
  Curve c = fraction_curve(dist, std::move(t), false);
  c.summary = c.values[kPrecisionAt];
  return c;
}

Curve norm_precision_curve(const std::vector<Box>& pred, const std::vector<Box>& gt,
                           std::size_t* skipped) {
  require_same(pred, gt);
  std::vector<double> dist;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!(gt[i].w > 0.0) || !(gt[i].h > 0.0)) {
      ++dropped;
      continue;
    }
    const double dx = (pred[i].cx() - gt[i].cx()) / gt[i].w;
    const double dy = (pred[i].cy() - gt[i].cy()) / gt[i].h;
    dist.push_back(std::hypot(dx, dy));
  }
  if (skipped) *skipped = dropped;
  std::vector<double> t;
  for (std::size_t i = 0; i < kPrecisionSteps; ++i) t.push_back(static_cast<double>(i) / 100.0);
  Curve c = fraction_curve(dist, std::move(t), false);
  c.summary = mean(c.values);
  return c;
}

SequenceMetrics evaluate_sequence(const std::string& name, const BoxTrack& pred,
                                  const BoxTrack& gt) {
  if (pred.size() != gt.size()) {
    throw InputError(name + ": " + std::to_string(pred.size()) + " result lines but " +
                     std::to_string(gt.size()) + " ground-truth lines");
  }
  std::vector<Box> p;
  std::vector<Box> g;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!gt[i]) continue;
    p.push_back(pred[i].value_or(Box{}));
    g.push_back(*gt[i]);
  }
  if (g.empty()) throw InputError(name + ": no frame has valid ground truth");
  SequenceMetrics m;
  m.name = name;
  m.frames = gt.size();
  m.evaluated = g.size();
  m.success = success_curve(p, g);
  m.precision = precision_curve(p, g);
  m.norm_precision = norm_precision_curve(p, g, &m.norm_skipped);
  return m;
}

MetricReport aggregate(std::vector<SequenceMetrics> sequences) {
  if (sequences.empty()) throw InputError("no sequences to aggregate");
  MetricReport r;
  auto average = [&](Curve SequenceMetrics::*member) {
    Curve c;
    c.thresholds = (sequences.front().*member).thresholds;
    c.values.assign(c.thresholds.size(), 0.0);
    double summary = 0.0;
    for (const auto& s : sequences) {
      const Curve& sc = s.*member;
      for (std::size_t i = 0; i < c.values.size(); ++i) c.values[i] += sc.values[i];
      summary += sc.summary;
    }
    const double n = static_cast<double>(sequences.size());
    for (double& v : c.values) v /= n;
    c.summary = summary / n;
    return c;
  };
  r.success = average(&SequenceMetrics::success);
  r.precision = average(&SequenceMetrics::precision);
  r.norm_precision = average(&SequenceMetrics::norm_precision);
  r.sequences = std::move(sequences);
  return r;
}

MetricReport evaluate_directories(const fs::path& results, const fs::path& annotations) {
  if (!fs::is_directory(results)) throw InputError("not a directory: " + results.string());
  if (!fs::is_directory(annotations)) {
    throw InputError("not a directory: " + annotations.string());
  }
  std::map<std::string, fs::path> res;
  for (const auto& e : fs::directory_iterator(results)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") {
      res[e.path().stem().string()] = e.path();
    }
  }
  std::map<std::string, fs::path> ann;
  for (const auto& e : fs::directory_iterator(annotations)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") {
      ann[e.path().stem().string()] = e.path();
    } else if (e.is_directory() && fs::is_regular_file(e.path() / kGroundtruthFile)) {
      ann[e.path().filename().string()] = e.path() / kGroundtruthFile;
    }
  }
  std::vector<std::string> only_res;
  std::vector<std::string> only_ann;
  for (const auto& [k, v] : res) {
    if (!ann.count(k)) only_res.push_back(k);
  }
  for (const auto& [k, v] : ann) {
    if (!res.count(k)) only_ann.push_back(k);
  }
  if (!only_res.empty() || !only_ann.empty()) {
    std::string msg = "sequence sets differ\n  results only:";
    for (const auto& n : only_res) msg += " " + n;
    if (only_res.empty()) msg += " (none)";
    msg += "\n  annotations only:";
    for (const auto& n : only_ann) msg += " " + n;
    if (only_ann.empty()) msg += " (none)";
    throw InputError(msg);
  }
  if (res.empty()) throw InputError("no result files in " + results.string());
  std::vector<SequenceMetrics> seqs;
  for (const auto& [name, path] : res) {
    seqs.push_back(evaluate_sequence(name, read_boxes(path), read_boxes(ann.at(name))));
  }
  return aggregate(std::move(seqs));
}

std::string report_json(const MetricReport& report) {
  using nlohmann::ordered_json;
  auto curve = [](const Curve& c, const char* summary_key) {
    ordered_json j;
    j["thresholds"] = c.thresholds;
    j["values"] = c.values;
    j[summary_key] = c.summary;
    return j;
  };
  auto block = [&](ordered_json& j, const Curve& s, const Curve& p, const Curve& n) {
    j["auc"] = s.summary;
    j["precision_20"] = p.summary;
    j["norm_precision"] = n.summary;
    j["success"] = curve(s, "auc");
    j["precision"] = curve(p, "precision_20");
    j["normalized_precision"] = curve(n, "norm_precision");
  };
  ordered_json root;
  root["format"] = "lightfc-report";
  root["version"] = 1;
  ordered_json agg;
  agg["sequences"] = report.sequences.size();
  block(agg, report.success, report.precision, report.norm_precision);
  root["aggregate"] = agg;
  ordered_json seqs = ordered_json::array();
  for (const auto& s : report.sequences) {
    ordered_json j;
    j["name"] = s.name;
    j["frames"] = s.frames;
    j["evaluated"] = s.evaluated;
    j["norm_skipped"] = s.norm_skipped;
    block(j, s.success, s.precision, s.norm_precision);
    seqs.push_back(j);
  }
  root["sequences"] = seqs;
  return root.dump(2) + '\n';
}

}  // namespace lightfc
