#pragma once

#include <array>
#include <string_view>

#include "lightfc/box.hpp"
#include "lightfc/head.hpp"
#include "lightfc/tensor.hpp"

namespace lightfc {

enum class IouKind { giou, ciou, eiou, siou, wiou };

std::string_view to_string(IouKind kind);
IouKind parse_iou_kind(std::string_view name);
inline constexpr IouKind kAllIouKinds[] = {IouKind::giou, IouKind::ciou, IouKind::eiou,
                                           IouKind::siou, IouKind::wiou};

struct LossConfig {
  double lambda_iou = 2.0;
  double lambda_l1 = 5.0;
  IouKind iou_kind = IouKind::wiou;
  double focal_alpha = 2.0;
  double focal_beta = 4.0;

  bool operator==(const LossConfig&) const = default;
};

// Loss value and its gradient with respect to the predicted (cx, cy, w, h).
struct BoxLoss {
  double value = 0.0;
  std::array<double, 4> grad{};
};

struct FocalLoss {
  double value = 0.0;
  Tensor grad;  // d loss / d pred, same shape as pred
};

struct GaussianTarget {
  Tensor heatmap;  // (1, 1, Hs, Ws), exactly one cell equal to 1
  std::size_t row = 0;
  std::size_t col = 0;
  int radius = 0;
  double sigma = 0.0;
};

// Radius in cells such that a box shifted by it keeps IoU >= min_overlap with the original.
double gaussian_radius(double height, double width, double min_overlap = 0.7);

// Heatmap centered on the cell containing the normalized box center.
GaussianTarget make_gaussian_target(const CenterBox& gt_norm, std::size_t hs, std::size_t ws,
                                    double min_overlap = 0.7);

// pred holds probabilities; values are clamped to [1e-7, 1 - 1e-7]. The sum is divided by
// max(1, number of cells equal to 1).
FocalLoss weighted_focal_loss(const Tensor& pred, const Tensor& target, const LossConfig& cfg);

// Mean absolute difference over (cx, cy, w, h).
BoxLoss l1_box_loss(const CenterBox& pred, const CenterBox& gt);

double iou(const Box& a, const Box& b);
double iou(const CenterBox& a, const CenterBox& b);

// pred w, h are clamped to >= 1e-6; a gt box with non-positive size throws InputError.
BoxLoss giou_loss(const CenterBox& pred, const CenterBox& gt);
BoxLoss ciou_loss(const CenterBox& pred, const CenterBox& gt);
BoxLoss eiou_loss(const CenterBox& pred, const CenterBox& gt);
BoxLoss siou_loss(const CenterBox& pred, const CenterBox& gt);
// exp(rho^2 / D) * (1 - IoU); D, the squared enclosing diagonal, carries no gradient.
BoxLoss wiou_loss(const CenterBox& pred, const CenterBox& gt);
BoxLoss iou_loss(IouKind kind, const CenterBox& pred, const CenterBox& gt);

struct LossBreakdown {
  double cls = 0.0;
  double iou = 0.0;
  double l1 = 0.0;
  double total = 0.0;
};

// cls + lambda_iou * iou + lambda_l1 * l1; fills `total`.
LossBreakdown combine(LossBreakdown components, const LossConfig& cfg);

struct LossTargets {
  CenterBox box;  // normalized search coordinates
  GaussianTarget heatmap;
};

LossTargets make_targets(const CenterBox& gt_norm, std::size_t hs, std::size_t ws);

// Classification on sigmoid(response); box terms read offset/size at the target cell.
LossBreakdown total_loss(const HeadOutput& out, const LossTargets& targets,
                         const LossConfig& cfg);

}  // namespace lightfc
