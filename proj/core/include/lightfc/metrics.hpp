#pragma once

#include <string>
#include <vector>

#include "lightfc/sequence.hpp"

namespace lightfc {

struct Curve {
  std::vector<double> thresholds;
  std::vector<double> values;
  double summary = 0.0;
};

// 21 thresholds 0.00..1.00; fraction of frames with IoU strictly above each; summary is
// the mean over thresholds (AUC).
Curve success_curve(const std::vector<Box>& pred, const std::vector<Box>& gt);
// 51 thresholds 0..50 px; fraction with center distance <= t; summary is the value at 20.
Curve precision_curve(const std::vector<Box>& pred, const std::vector<Box>& gt);
// Center error divided by ground-truth (w, h); 51 thresholds 0..0.5; summary is the mean.
// Frames whose ground truth has zero size are dropped and counted in `skipped`.
Curve norm_precision_curve(const std::vector<Box>& pred, const std::vector<Box>& gt,
                           std::size_t* skipped = nullptr);

double overlap(const Box& a, const Box& b);
double center_distance(const Box& a, const Box& b);

struct SequenceMetrics {
  std::string name;
  std::size_t frames = 0;
  std::size_t evaluated = 0;  // frames with valid ground truth
  std::size_t norm_skipped = 0;
  Curve success;
  Curve precision;
  Curve norm_precision;
};

struct MetricReport {
  std::vector<SequenceMetrics> sequences;
  // Equal-weight mean of the per-sequence curves.
  Curve success;
  Curve precision;
  Curve norm_precision;
};

// Frames without valid ground truth are excluded. Throws InputError on length mismatch
// or when no frame is left.
SequenceMetrics evaluate_sequence(const std::string& name, const BoxTrack& pred,
                                  const BoxTrack& gt);
MetricReport aggregate(std::vector<SequenceMetrics> sequences);

// Pairs results/<name>.txt with annotations/<name>.txt or annotations/<name>/groundtruth.txt.
// Any name present on one side only is reported, listing both sides.
MetricReport evaluate_directories(const std::filesystem::path& results,
                                  const std::filesystem::path& annotations);

// Schema in docs/report_schema.md.
std::string report_json(const MetricReport& report);

}  // namespace lightfc
