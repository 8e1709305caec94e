#pragma once

// Central finite-difference checks for the loss gradients, shared by the unit and
// acceptance suites.

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>

#include "lightfc/losses.hpp"
#include "lightfc/random.hpp"

namespace gradcheck {

using namespace lightfc;


inline constexpr double kStep = 1e-3;       // focal maps
inline constexpr double kBoxStep = 1e-5;    // box losses
inline constexpr double kKinkMargin = 0.02;
inline constexpr double kRelTol = 1e-3;

// |a - n| / max(|a|, |n|, floor); the floor keeps near-zero components from dominating.
inline double rel_error(double a, double n, double floor = 1e-3) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor});
}

inline double coord(const CenterBox& b, int i) {
  switch (i) {
    case 0: return b.cx;
    case 1: return b.cy;
    case 2: return b.w;
    default: return b.h;
  }
}

inline CenterBox nudged(CenterBox b, int i, double d) {
  switch (i) {
    case 0: b.cx += d; break;
    case 1: b.cy += d; break;
    case 2: b.w += d; break;
    default: b.h += d; break;
  }
  return b;
}

inline bool far(double a, double b) { return std::abs(a - b) > kKinkMargin; }

// Keeps every kink (equal coordinates, touching edges, the SIoU angle switch) away from the
// finite-difference stencil.
inline bool smooth_pair(const CenterBox& p, const CenterBox& g) {
  for (int i = 0; i < 4; ++i) {
    if (!far(coord(p, i), coord(g, i))) return false;
  }
  const double pe[] = {p.cx - p.w / 2, p.cx + p.w / 2};
  const double ge[] = {g.cx - g.w / 2, g.cx + g.w / 2};
  const double pv[] = {p.cy - p.h / 2, p.cy + p.h / 2};
  const double gv[] = {g.cy - g.h / 2, g.cy + g.h / 2};
  for (double a : pe) {
    for (double b : ge) {
      if (!far(a, b)) return false;
    }
  }
  for (double a : pv) {
    for (double b : gv) {
      if (!far(a, b)) return false;
    }
  }
  const double dx = g.cx - p.cx;
  const double dy = g.cy - p.cy;
  const double s = std::abs(dx) / std::hypot(dx, dy);
  return std::abs(s - std::sqrt(0.5)) > 0.02;
}

inline std::pair<CenterBox, CenterBox> random_pair(Rng& rng) {
  for (;;) {
    const CenterBox g{rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7), rng.uniform(0.1, 0.5),
                      rng.uniform(0.1, 0.5)};
    const CenterBox p{g.cx + rng.uniform(-0.25, 0.25), g.cy + rng.uniform(-0.25, 0.25),
                      g.w * rng.uniform(0.5, 1.6), g.h * rng.uniform(0.5, 1.6)};
    if (smooth_pair(p, g)) return {p, g};
  }
}

inline double worst_box_gradient(const std::function<BoxLoss(const CenterBox&, const CenterBox&)>& fn,
                          std::uint64_t seed, int cases) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < cases; ++k) {
    const auto [p, g] = random_pair(rng);
    const BoxLoss l = fn(p, g);
    for (int i = 0; i < 4; ++i) {
      const double n = (fn(nudged(p, i, kBoxStep), g).value - fn(nudged(p, i, -kBoxStep), g).value) /
                       (2 * kBoxStep);
      worst = std::max(worst, rel_error(l.grad[i], n));
    }
  }
  return worst;
}

// WIoU with the enclosing diagonal frozen at the (p0, g) value, matching the detached D.
inline double wiou_fixed_d(const CenterBox& p, const CenterBox& g, const CenterBox& p0) {
  const Box a = to_corner(p0);
  const Box b = to_corner(g);
  const double cw = std::max(a.right(), b.right()) - std::min(a.x, b.x);
  const double ch = std::max(a.bottom(), b.bottom()) - std::min(a.y, b.y);
  const double rho2 = (p.cx - g.cx) * (p.cx - g.cx) + (p.cy - g.cy) * (p.cy - g.cy);
  return std::exp(rho2 / (cw * cw + ch * ch)) * (1.0 - iou(p, g));
}

inline double worst_wiou_gradient(std::uint64_t seed, int cases) {
  Rng rng(seed);
  double worst = 0.0;
  for (int k = 0; k < cases; ++k) {
    const auto [p, g] = random_pair(rng);
    const BoxLoss l = wiou_loss(p, g);
    for (int i = 0; i < 4; ++i) {
      const double n = (wiou_fixed_d(nudged(p, i, kBoxStep), g, p) -
                        wiou_fixed_d(nudged(p, i, -kBoxStep), g, p)) /
                       (2 * kBoxStep);
      worst = std::max(worst, rel_error(l.grad[i], n));
    }
  }
  return worst;
}

inline double worst_iou_gradient(IouKind kind, std::uint64_t seed, int cases) {
  if (kind == IouKind::wiou) return worst_wiou_gradient(seed, cases);
  return worst_box_gradient(
      [kind](const CenterBox& p, const CenterBox& g) { return iou_loss(kind, p, g); }, seed, cases);
}

// Worst relative error of the focal gradient over `cases` random 8x8 maps.
inline double worst_focal_gradient(std::uint64_t seed, int cases) {
  Rng rng(seed);
  double worst = 0.0;
  for (int n = 0; n < cases; ++n) {
    const CenterBox gt{rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.6),
                       rng.uniform(0.2, 0.6)};
    const Tensor target = make_gaussian_target(gt, 8, 8).heatmap;
    Tensor pred = random_tensor(rng, {1, 1, 8, 8}, 0.05, 0.95);
    const FocalLoss l = weighted_focal_loss(pred, target, LossConfig{});
    for (std::size_t i = 0; i < pred.numel(); ++i) {
      const float p0 = pred.data()[i];
      const float hi = p0 + float(kStep);
      const float lo = p0 - float(kStep);
      pred.data()[i] = hi;
      const double fh = weighted_focal_loss(pred, target, LossConfig{}).value;
      pred.data()[i] = lo;
      const double fl = weighted_focal_loss(pred, target, LossConfig{}).value;
      pred.data()[i] = p0;
      const double fd = (fh - fl) / (double(hi) - double(lo));
      worst = std::max(worst, rel_error(l.grad.data()[i], fd));
    }
  }
  return worst;
}

// Worst absolute error of the L1 subgradient, away from ties.
inline double worst_l1_gradient(std::uint64_t seed, int cases) {
  Rng rng(seed);
  double worst = 0.0;
  for (int n = 0; n < cases; ++n) {
    const auto [p, g] = random_pair(rng);
    const BoxLoss l = l1_box_loss(p, g);
    for (int i = 0; i < 4; ++i) {
      const double fd = (l1_box_loss(nudged(p, i, kBoxStep), g).value -
                         l1_box_loss(nudged(p, i, -kBoxStep), g).value) /
                        (2 * kBoxStep);
      worst = std::max(worst, std::abs(fd - l.grad[i]));
    }
  }
  return worst;
}

}  // namespace gradcheck
