#include "lightfc/head.hpp"

#include <string>

#include "lightfc/error.hpp"

namespace lightfc {

void validate(const HeadConfig& cfg) {
  if (cfg.width < 8 || cfg.width % 8 != 0) {
    throw ShapeError("head: width " + std::to_string(cfg.width) + " must be a positive multiple of 8");
  }
  if (cfg.use_se && (cfg.se_ratio == 0 || cfg.width % cfg.se_ratio != 0)) {
    throw ShapeError("head: se ratio does not divide width");
  }
}

Tensor branch_forward(const Tensor& f, const HeadBranch& branch) {
  if (f.shape().c != in_channels(branch.stage1)) {
    throw ShapeError("head branch: input has " + std::to_string(f.shape().c) +
                     " channels, stage 1 expects " + std::to_string(in_channels(branch.stage1)));
  }
  Tensor x = relu(rep_forward(f, branch.stage1));
  if (branch.se) x = se_forward(x, *branch.se);
  for (const RepUnit& block : branch.stage2) x = relu(rep_forward(x, block));
  return conv2d(x, branch.output);
}

HeadOutput head_forward(const Tensor& cls_in, const Tensor& box_in, const Head& head) {
  return {branch_forward(cls_in, head.cls), sigmoid(branch_forward(box_in, head.offset)),
          sigmoid(branch_forward(box_in, head.size))};
}

std::size_t argmax_index(const Tensor& scores) {
  auto v = scores.data();
  if (v.empty()) throw ShapeError("decode: empty score map");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

Decoded decode_scores(const Tensor& scores, const Tensor& offset, const Tensor& size) {
  const Shape& s = scores.shape();
  if (s.numel() == 0) throw ShapeError("decode: empty maps");
  if (s.n != 1 || s.c != 1 || offset.shape() != Shape{1, 2, s.h, s.w} ||
      size.shape() != Shape{1, 2, s.h, s.w}) {
    throw ShapeError("decode: inconsistent map shapes " + s.str() + ", " +
                     offset.shape().str() + ", " + size.shape().str());
  }
  const std::size_t idx = argmax_index(scores);
  Decoded d;
  d.row = idx / s.w;
  d.col = idx % s.w;
  d.score = scores.data()[idx];
  const double cx = (static_cast<double>(d.col) + offset.at(0, 0, d.row, d.col)) /
                    static_cast<double>(s.w);
  const double cy = (static_cast<double>(d.row) + offset.at(0, 1, d.row, d.col)) /
                    static_cast<double>(s.h);
  const double w = size.at(0, 0, d.row, d.col);
  const double h = size.at(0, 1, d.row, d.col);
  d.box = {cx - 0.5 * w, cy - 0.5 * h, w, h};
  return d;
}

Decoded decode_box(const HeadOutput& out, const Tensor* window) {
  if (out.response.numel() == 0) throw ShapeError("decode: empty response map");
  Tensor scores = sigmoid(out.response);
  if (window) {
    if (window->numel() != scores.numel()) {
      throw ShapeError("decode: window " + window->shape().str() + " does not match response " +
                       scores.shape().str());
    }
    auto s = scores.data();
    auto w = window->data();
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= w[i];
  }
  return decode_scores(scores, out.offset, out.size);
}

HeadBranch make_branch(Rng& rng, const HeadConfig& cfg, std::size_t c_in, std::size_t out_ch,
                       const InitOptions& opt) {
  validate(cfg);
  const std::size_t c = cfg.width;
  HeadBranch b{make_rep(cfg.stage1, rng, c_in, c, opt),
               std::nullopt,
               {make_rep(cfg.stage2, rng, c, c / 2, opt), make_rep(cfg.stage2, rng, c / 2, c / 4, opt),
                make_rep(cfg.stage2, rng, c / 4, c / 8, opt)},
               {}};
  if (cfg.use_se) b.se = make_se(rng, c, cfg.se_ratio, opt);
  b.output = make_conv(rng, c / 8, out_ch, 3, 1, 1, opt);
  return b;
}

Head make_head(Rng& rng, const HeadConfig& cfg, std::size_t cls_in, std::size_t box_in,
               const InitOptions& opt) {
  Head h;
  h.cls = make_branch(rng, cfg, cls_in, 1, opt);
  h.offset = make_branch(rng, cfg, box_in, 2, opt);
  h.size = make_branch(rng, cfg, box_in, 2, opt);
  return h;
}

HeadBranch fuse(const HeadBranch& branch) {
  HeadBranch out = branch;
  out.stage1 = fuse(branch.stage1);
  for (std::size_t i = 0; i < out.stage2.size(); ++i) out.stage2[i] = fuse(branch.stage2[i]);
  return out;
}

Head fuse(const Head& head) { return {fuse(head.cls), fuse(head.offset), fuse(head.size)}; }

}  // namespace lightfc
