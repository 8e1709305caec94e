#include "lightfc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "lightfc/error.hpp"
#include "lightfc/random.hpp"
#include "lightfc/sequence.hpp"

namespace fs = std::filesystem;

namespace lightfc {

std::string_view to_string(Motion m) { return m == Motion::linear ? "linear" : "sine"; }

Motion parse_motion(std::string_view name) {
  if (name == "linear") return Motion::linear;
  if (name == "sine") return Motion::sine;
  throw InputError("unknown motion '" + std::string(name) + "' (expected linear, sine)");
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Grating {
  double fx, fy, phase, amp;
};

Image make_background(const SynthOptions& opt, Rng& rng) {
  std::vector<Grating> gratings;
  for (int i = 0; i < 4; ++i) {
    const double angle = rng.uniform(0.0, std::numbers::pi);
    const double period = rng.uniform(18.0, 90.0);
    gratings.push_back({std::cos(angle) / period, std::sin(angle) / period,
                        rng.uniform(0.0, kTwoPi), rng.uniform(0.04, 0.09)});
  }
  Image img(opt.width, opt.height);
  for (std::size_t y = 0; y < opt.height; ++y) {
    for (std::size_t x = 0; x < opt.width; ++x) {
      double v = 0.5;
      for (const auto& g : gratings) {
        v += g.amp * std::sin(kTwoPi * (g.fx * static_cast<double>(x) + g.fy * static_cast<double>(y)) +
                              g.phase);
      }
      v += rng.uniform(-0.03, 0.03);
      const float gray = static_cast<float>(std::clamp(v, 0.05, 0.95));
      for (std::size_t c = 0; c < 3; ++c) img.at(c, y, x) = gray;
    }
  }
  return img;
}

// Length of [a, a + 1) inside [lo, hi).
double coverage(double a, double lo, double hi) {
  return std::max(0.0, std::min(a + 1.0, hi) - std::max(a, lo));
}

// Checkerboard in target coordinates, 8 px cells.
float texture(double u, double v) {
  const long cu = static_cast<long>(std::floor(u / 8.0));
  const long cv = static_cast<long>(std::floor(v / 8.0));
  return ((cu + cv) & 1) ? 0.70f : 0.30f;
}

void paint_target(Image& img, const Box& b) {
  const long x0 = std::max(0L, static_cast<long>(std::floor(b.x)));
  const long y0 = std::max(0L, static_cast<long>(std::floor(b.y)));
  const long x1 = std::min(static_cast<long>(img.width), static_cast<long>(std::ceil(b.right())));
  const long y1 = std::min(static_cast<long>(img.height), static_cast<long>(std::ceil(b.bottom())));
  for (long y = y0; y < y1; ++y) {
    const double cy = coverage(static_cast<double>(y), b.y, b.bottom());
    for (long x = x0; x < x1; ++x) {
      const double a = coverage(static_cast<double>(x), b.x, b.right()) * cy;
      if (a <= 0.0) continue;
      const float t[3] = {kTargetRed,
                          texture(static_cast<double>(x) + 0.5 - b.x, static_cast<double>(y) + 0.5 - b.y),
                          kTargetBlue};
      for (std::size_t c = 0; c < 3; ++c) {
        float& p = img.at(c, static_cast<std::size_t>(y), static_cast<std::size_t>(x));
        p = static_cast<float>(a * t[c] + (1.0 - a) * p);
      }
    }
  }
}

}  // namespace

SynthSequence make_synth(const SynthOptions& opt) {
  if (opt.frames < 2) throw InputError("synth: need at least 2 frames");
  const double s = opt.target_size;
  const double W = static_cast<double>(opt.width);
  const double H = static_cast<double>(opt.height);
  if (!(s >= 4.0) || 3.0 * s > W || 3.0 * s > H) {
    throw InputError("synth: target size does not fit the frame");
  }
  Rng rng(opt.seed);
  const Image background = make_background(opt, rng);

  // Center path kept at least one target side away from the border.
  const double lo_x = s, hi_x = W - s, lo_y = s, hi_y = H - s;
  const double start_x = rng.uniform(lo_x, hi_x);
  const double start_y = rng.uniform(lo_y, hi_y);
  const double heading = rng.uniform(0.0, kTwoPi);
  const double speed = rng.uniform(2.0, 3.5);
  const double phase = rng.uniform(0.0, kTwoPi);

  auto reflect = [](double v, double lo, double hi) {
    const double span = hi - lo;
    double t = std::fmod(v - lo, 2.0 * span);
    if (t < 0.0) t += 2.0 * span;
    return lo + (t <= span ? t : 2.0 * span - t);
  };

  SynthSequence seq;
  for (std::size_t f = 0; f < opt.frames; ++f) {
    const double t = static_cast<double>(f);
    double cx = 0.0;
    double cy = 0.0;
    if (opt.motion == Motion::linear) {
      cx = reflect(start_x + speed * std::cos(heading) * t, lo_x, hi_x);
      cy = reflect(start_y + speed * std::sin(heading) * t, lo_y, hi_y);
    } else {
      const double ax = 0.5 * (hi_x - lo_x);
      const double ay = 0.5 * (hi_y - lo_y);
      const double w = kTwoPi / 90.0;
      cx = 0.5 * (lo_x + hi_x) + ax * std::sin(w * t + phase);
      cy = 0.5 * (lo_y + hi_y) + ay * std::sin(2.0 * w * t + phase);
    }
    const Box b{cx - 0.5 * s, cy - 0.5 * s, s, s};
    Image img = background;
    paint_target(img, b);
    seq.frames.push_back(std::move(img));
    seq.boxes.push_back(b);
  }
  return seq;
}

void write_synth(const SynthSequence& seq, const fs::path& dir) {
  fs::create_directories(dir / "img");
  for (std::size_t f = 0; f < seq.frames.size(); ++f) {
    char name[32];
    std::snprintf(name, sizeof name, "%08zu.png", f + 1);
    save_image(seq.frames[f], dir / "img" / name);
  }
  BoxTrack gt(seq.boxes.begin(), seq.boxes.end());
  write_boxes(gt, dir / kGroundtruthFile);
}

}  // namespace lightfc
