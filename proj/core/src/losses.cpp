#include "lightfc/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lightfc/error.hpp"

namespace lightfc {

std::string_view to_string(IouKind kind) {
  switch (kind) {
    case IouKind::giou: return "giou";
    case IouKind::ciou: return "ciou";
    case IouKind::eiou: return "eiou";
    case IouKind::siou: return "siou";
    case IouKind::wiou: return "wiou";
  }
  return "?";
}

IouKind parse_iou_kind(std::string_view name) {
  for (IouKind k : kAllIouKinds) {
    if (to_string(k) == name) return k;
  }
  throw InputError("unknown iou loss '" + std::string(name) +
                   "' (expected giou, ciou, eiou, siou or wiou)");
}

namespace {

// Value with its gradient over the four predicted coordinates.
struct Var {
  double v = 0.0;
  std::array<double, 4> d{};

  static Var constant(double x) { return {x, {}}; }
  static Var input(double x, int i) {
    Var r{x, {}};
    r.d[i] = 1.0;
    return r;
  }
};

Var operator+(const Var& a, const Var& b) {
  Var r{a.v + b.v, {}};
  for (int i = 0; i < 4; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}
Var operator-(const Var& a, const Var& b) {
  Var r{a.v - b.v, {}};
  for (int i = 0; i < 4; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}
Var operator*(const Var& a, const Var& b) {
  Var r{a.v * b.v, {}};
  for (int i = 0; i < 4; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
Var operator/(const Var& a, const Var& b) {
  Var r{a.v / b.v, {}};
  for (int i = 0; i < 4; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) / (b.v * b.v);
  return r;
}
Var operator-(double a, const Var& b) { return Var::constant(a) - b; }
Var operator*(double a, const Var& b) { return Var::constant(a) * b; }
Var operator-(const Var& a, double b) { return a - Var::constant(b); }

// Applies f with derivative df element-wise through the chain rule.
template <class F, class DF>
Var chain(const Var& a, F f, DF df) {
  Var r{f(a.v), {}};
  const double k = df(a.v);
  for (int i = 0; i < 4; ++i) r.d[i] = k * a.d[i];
  return r;
}

Var exp(const Var& a) {
  const double e = std::exp(a.v);
  return chain(a, [e](double) { return e; }, [e](double) { return e; });
}
Var sqrt(const Var& a) {
  const double s = std::sqrt(a.v);
  return chain(a, [s](double) { return s; }, [s](double) { return s > 0.0 ? 0.5 / s : 0.0; });
}
Var atan(const Var& a) {
  return chain(a, [](double x) { return std::atan(x); },
               [](double x) { return 1.0 / (1.0 + x * x); });
}
Var asin(const Var& a) {
  return chain(a, [](double x) { return std::asin(x); },
               [](double x) { return 1.0 / std::sqrt(1.0 - x * x); });
}
Var cos(const Var& a) {
  return chain(a, [](double x) { return std::cos(x); }, [](double x) { return -std::sin(x); });
}
Var abs(const Var& a) {
  return chain(a, [](double x) { return std::abs(x); },
               [](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}
Var square(const Var& a) { return a * a; }
Var pow4(const Var& a) { return square(square(a)); }
// Ties pick the first argument.
Var min(const Var& a, const Var& b) { return b.v < a.v ? b : a; }
Var max(const Var& a, const Var& b) { return b.v > a.v ? b : a; }
Var detach(const Var& a) { return Var::constant(a.v); }

constexpr double kMinSize = 1e-6;

void check_gt(const CenterBox& gt) {
  if (!(gt.w > 0.0) || !(gt.h > 0.0)) {
    throw InputError("box loss: ground-truth box has non-positive size");
  }
}

// Shared geometry of a (pred, gt) pair, differentiable in the prediction.
struct PairGeometry {
  Var pcx, pcy, pw, ph;
  double gcx, gcy, gw, gh;
  Var iou;
  Var union_area;
  Var enclose_w, enclose_h;
  Var rho2;  // squared center distance

  PairGeometry(const CenterBox& pred, const CenterBox& gt) {
    check_gt(gt);
    pcx = Var::input(pred.cx, 0);
    pcy = Var::input(pred.cy, 1);
    pw = Var::input(std::max(pred.w, kMinSize), 2);
    ph = Var::input(std::max(pred.h, kMinSize), 3);
    if (pred.w < kMinSize) pw.d[2] = 0.0;
    if (pred.h < kMinSize) ph.d[3] = 0.0;
    gcx = gt.cx;
    gcy = gt.cy;
    gw = gt.w;
    gh = gt.h;

    const Var px1 = pcx - 0.5 * pw;
    const Var px2 = pcx + 0.5 * pw;
    const Var py1 = pcy - 0.5 * ph;
    const Var py2 = pcy + 0.5 * ph;
    const Var gx1 = Var::constant(gcx - 0.5 * gw);
    const Var gx2 = Var::constant(gcx + 0.5 * gw);
    const Var gy1 = Var::constant(gcy - 0.5 * gh);
    const Var gy2 = Var::constant(gcy + 0.5 * gh);

    const Var iw = max(Var::constant(0.0), min(px2, gx2) - max(px1, gx1));
    const Var ih = max(Var::constant(0.0), min(py2, gy2) - max(py1, gy1));
    const Var inter = iw * ih;
    union_area = pw * ph + Var::constant(gw * gh) - inter;
    iou = inter / union_area;
    enclose_w = max(px2, gx2) - min(px1, gx1);
    enclose_h = max(py2, gy2) - min(py1, gy1);
    rho2 = square(pcx - gcx) + square(pcy - gcy);
  }
};

BoxLoss result(const Var& loss) { return {loss.v, loss.d}; }

}  // namespace

double gaussian_radius(double height, double width, double min_overlap) {
  const double a1 = 1.0;
  const double b1 = height + width;
  const double c1 = width * height * (1.0 - min_overlap) / (1.0 + min_overlap);
  const double r1 = (b1 + std::sqrt(b1 * b1 - 4.0 * a1 * c1)) / 2.0;

  const double a2 = 4.0;
  const double b2 = 2.0 * (height + width);
  const double c2 = (1.0 - min_overlap) * width * height;
  const double r2 = (b2 + std::sqrt(b2 * b2 - 4.0 * a2 * c2)) / 2.0;

  const double a3 = 4.0 * min_overlap;
  const double b3 = -2.0 * min_overlap * (height + width);
  const double c3 = (min_overlap - 1.0) * width * height;
  const double r3 = (b3 + std::sqrt(b3 * b3 - 4.0 * a3 * c3)) / 2.0;
  return std::min({r1, r2, r3});
}

GaussianTarget make_gaussian_target(const CenterBox& gt_norm, std::size_t hs, std::size_t ws,
                                    double min_overlap) {
  if (hs == 0 || ws == 0) throw ShapeError("gaussian target: empty map");
  check_gt(gt_norm);
  GaussianTarget t;
  t.heatmap = Tensor({1, 1, hs, ws});
  const auto cell = [](double v, std::size_t n) {
    const double c = std::floor(v * static_cast<double>(n));
    return static_cast<std::size_t>(std::clamp(c, 0.0, static_cast<double>(n - 1)));
  };
  t.col = cell(gt_norm.cx, ws);
  t.row = cell(gt_norm.cy, hs);
  const double r = gaussian_radius(gt_norm.h * static_cast<double>(hs),
                                   gt_norm.w * static_cast<double>(ws), min_overlap);
  t.radius = std::max(0, static_cast<int>(r));
  t.sigma = (2.0 * t.radius + 1.0) / 6.0;
  const long rad = t.radius;
  for (long dy = -rad; dy <= rad; ++dy) {
    for (long dx = -rad; dx <= rad; ++dx) {
      const long y = static_cast<long>(t.row) + dy;
      const long x = static_cast<long>(t.col) + dx;
      if (y < 0 || x < 0 || y >= static_cast<long>(hs) || x >= static_cast<long>(ws)) continue;
      const double g = std::exp(-static_cast<double>(dx * dx + dy * dy) / (2.0 * t.sigma * t.sigma));
      t.heatmap.at(0, 0, y, x) = static_cast<float>(g);
    }
  }
  t.heatmap.at(0, 0, t.row, t.col) = 1.0f;
  return t;
}

FocalLoss weighted_focal_loss(const Tensor& pred, const Tensor& target, const LossConfig& cfg) {
  if (pred.shape() != target.shape()) {
    throw ShapeError("focal loss: pred " + pred.shape().str() + " vs target " +
                     target.shape().str());
  }
  constexpr double kEps = 1e-7;
  const double alpha = cfg.focal_alpha;
  const double beta = cfg.focal_beta;
  auto p_in = pred.data();
  auto y_in = target.data();
  std::size_t positives = 0;
  for (float y : y_in) positives += y == 1.0f ? 1 : 0;
  const double norm = static_cast<double>(std::max<std::size_t>(1, positives));

  FocalLoss out;
  out.grad = Tensor(pred.shape());
  auto g = out.grad.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < p_in.size(); ++i) {
    const double raw = p_in[i];
    const double p = std::clamp(raw, kEps, 1.0 - kEps);
    const bool clamped = raw < kEps || raw > 1.0 - kEps;
    const double y = y_in[i];
    double dl = 0.0;
    if (y == 1.0) {
      const double q = 1.0 - p;
      sum += -std::pow(q, alpha) * std::log(p);
      // d/dp [-(1-p)^a log p] = a (1-p)^(a-1) log p - (1-p)^a / p
      const double qa1 = alpha == 0.0 ? 0.0 : alpha * std::pow(q, alpha - 1.0);
      dl = qa1 * std::log(p) - std::pow(q, alpha) / p;
    } else {
      const double w = std::pow(1.0 - y, beta);
      sum += -w * std::pow(p, alpha) * std::log(1.0 - p);
      // d/dp [-w p^a log(1-p)] = -w (a p^(a-1) log(1-p) - p^a / (1-p))
      const double pa1 = alpha == 0.0 ? 0.0 : alpha * std::pow(p, alpha - 1.0);
      dl = -w * (pa1 * std::log(1.0 - p) - std::pow(p, alpha) / (1.0 - p));
    }
    g[i] = clamped ? 0.0f : static_cast<float>(dl / norm);
  }
  out.value = sum / norm;
  return out;
}

BoxLoss l1_box_loss(const CenterBox& pred, const CenterBox& gt) {
  const std::array<double, 4> p{pred.cx, pred.cy, pred.w, pred.h};
  const std::array<double, 4> q{gt.cx, gt.cy, gt.w, gt.h};
  BoxLoss out;
  for (int i = 0; i < 4; ++i) {
    const double d = p[i] - q[i];
    out.value += std::abs(d) / 4.0;
    out.grad[i] = d > 0.0 ? 0.25 : (d < 0.0 ? -0.25 : 0.0);
  }
  return out;
}

double iou(const Box& a, const Box& b) {
  const double iw = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double ih = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double iou(const CenterBox& a, const CenterBox& b) { return iou(to_corner(a), to_corner(b)); }

BoxLoss giou_loss(const CenterBox& pred, const CenterBox& gt) {
  const PairGeometry g(pred, gt);
  const Var enclose = g.enclose_w * g.enclose_h;
  return result(1.0 - g.iou + (enclose - g.union_area) / enclose);
}

BoxLoss ciou_loss(const CenterBox& pred, const CenterBox& gt) {
  const PairGeometry g(pred, gt);
  const Var diag2 = square(g.enclose_w) + square(g.enclose_h);
  const double k = 4.0 / (std::numbers::pi * std::numbers::pi);
  const Var v = k * square(Var::constant(std::atan(g.gw / g.gh)) - atan(g.pw / g.ph));
  const Var denom = 1.0 - g.iou + v;
  const Var alpha_v = denom.v > 0.0 ? square(v) / denom : Var::constant(0.0);
  return result(1.0 - g.iou + g.rho2 / diag2 + alpha_v);
}

BoxLoss eiou_loss(const CenterBox& pred, const CenterBox& gt) {
  const PairGeometry g(pred, gt);
  const Var cw2 = square(g.enclose_w);
  const Var ch2 = square(g.enclose_h);
  return result(1.0 - g.iou + g.rho2 / (cw2 + ch2) + square(g.pw - g.gw) / cw2 +
                square(g.ph - g.gh) / ch2);
}

BoxLoss siou_loss(const CenterBox& pred, const CenterBox& gt) {
  const PairGeometry g(pred, gt);
  const Var dx = Var::constant(g.gcx) - g.pcx;
  const Var dy = Var::constant(g.gcy) - g.pcy;
  const Var sigma = sqrt(square(dx) + square(dy));
  Var angle = Var::constant(0.0);
  if (sigma.v > 0.0) {
    const Var sin_x = abs(dx) / sigma;
    const Var sin_y = abs(dy) / sigma;
    const Var sin_alpha = sin_x.v > std::sqrt(0.5) ? sin_y : sin_x;
    angle = cos(2.0 * asin(sin_alpha) - std::numbers::pi / 2.0);
  }
  const Var gamma = angle - 2.0;
  const Var rho_x = square(dx / g.enclose_w);
  const Var rho_y = square(dy / g.enclose_h);
  const Var distance = 2.0 - exp(gamma * rho_x) - exp(gamma * rho_y);
  const Var omega_w = abs(g.pw - g.gw) / max(g.pw, Var::constant(g.gw));
  const Var omega_h = abs(g.ph - g.gh) / max(g.ph, Var::constant(g.gh));
  const Var shape = pow4(1.0 - exp(-1.0 * omega_w)) + pow4(1.0 - exp(-1.0 * omega_h));
  return result(1.0 - g.iou + 0.5 * (distance + shape));
}

BoxLoss wiou_loss(const CenterBox& pred, const CenterBox& gt) {
  const PairGeometry g(pred, gt);
  const Var diag2 = detach(square(g.enclose_w) + square(g.enclose_h));
  return result(exp(g.rho2 / diag2) * (1.0 - g.iou));
}

BoxLoss iou_loss(IouKind kind, const CenterBox& pred, const CenterBox& gt) {
  switch (kind) {
    case IouKind::giou: return giou_loss(pred, gt);
    case IouKind::ciou: return ciou_loss(pred, gt);
    case IouKind::eiou: return eiou_loss(pred, gt);
    case IouKind::siou: return siou_loss(pred, gt);
    case IouKind::wiou: return wiou_loss(pred, gt);
  }
  throw InputError("unknown iou kind");
}

LossBreakdown combine(LossBreakdown c, const LossConfig& cfg) {
  c.total = c.cls + cfg.lambda_iou * c.iou + cfg.lambda_l1 * c.l1;
  return c;
}

LossTargets make_targets(const CenterBox& gt_norm, std::size_t hs, std::size_t ws) {
  return {gt_norm, make_gaussian_target(gt_norm, hs, ws)};
}

LossBreakdown total_loss(const HeadOutput& out, const LossTargets& targets,
                         const LossConfig& cfg) {
  const Shape& s = out.response.shape();
  if (targets.heatmap.heatmap.shape() != s) {
    throw ShapeError("total loss: target heatmap does not match response map");
  }
  if (out.offset.shape() != Shape{1, 2, s.h, s.w} || out.size.shape() != Shape{1, 2, s.h, s.w}) {
    throw ShapeError("total loss: offset/size maps do not match response map");
  }
  LossBreakdown c;
  c.cls = weighted_focal_loss(sigmoid(out.response), targets.heatmap.heatmap, cfg).value;
  const std::size_t r = targets.heatmap.row;
  const std::size_t k = targets.heatmap.col;
  const CenterBox pred{(static_cast<double>(k) + out.offset.at(0, 0, r, k)) / static_cast<double>(s.w),
                       (static_cast<double>(r) + out.offset.at(0, 1, r, k)) / static_cast<double>(s.h),
                       out.size.at(0, 0, r, k), out.size.at(0, 1, r, k)};
  c.iou = iou_loss(cfg.iou_kind, pred, targets.box).value;
  c.l1 = l1_box_loss(pred, targets.box).value;
  return combine(c, cfg);
}

}  // namespace lightfc
