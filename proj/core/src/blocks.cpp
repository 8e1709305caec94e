#include "lightfc/blocks.hpp"

#include <string>

#include "lightfc/error.hpp"

namespace lightfc {

void CbrBlock::validate() const {
  if (conv.out_channels() != bn.channels()) {
    throw ShapeError("cbr: conv emits " + std::to_string(conv.out_channels()) +
                     " channels but bn has " + std::to_string(bn.channels()));
  }
}

std::size_t InvertedResidual::in_channels() const {
  return expand ? expand->conv.in_channels() : depthwise.conv.in_channels();
}

Tensor cbr_forward(const Tensor& x, const CbrBlock& b) {
  b.validate();
  Tensor y = batchnorm_infer(conv2d(x, b.conv), b.bn);
  return b.activation == Activation::relu ? relu(y) : y;
}

Tensor se_gate(const Tensor& x, const SeBlock& s) {
  if (x.shape().c != s.channels() || s.reduce.in_channels() != s.channels()) {
    throw ShapeError("se: input has " + std::to_string(x.shape().c) + " channels, block expects " +
                     std::to_string(s.channels()));
  }
  return sigmoid(conv2d(relu(conv2d(global_avg_pool(x), s.reduce)), s.expand));
}

Tensor se_forward(const Tensor& x, const SeBlock& s) { return mul_channels(x, se_gate(x, s)); }

Tensor inverted_residual_forward(const Tensor& x, const InvertedResidual& b) {
  Tensor h = b.expand ? cbr_forward(x, *b.expand) : x;
  h = cbr_forward(h, b.depthwise);
  h = cbr_forward(h, b.project);
  return b.use_skip ? add(h, x) : h;
}

CbrBlock make_cbr(Rng& rng, std::size_t c_in, std::size_t c_out, std::size_t kernel,
                  std::size_t stride, std::size_t groups, Activation act,
                  const InitOptions& opt) {
  CbrBlock b;
  b.conv = make_conv(rng, c_in, c_out, kernel, stride, groups, opt);
  b.bn = make_bn(rng, c_out, opt);
  b.activation = act;
  return b;
}

SeBlock make_se(Rng& rng, std::size_t channels, std::size_t ratio, const InitOptions& opt) {
  if (ratio == 0 || channels % ratio != 0) {
    throw ShapeError("se: reduction ratio " + std::to_string(ratio) + " does not divide " +
                     std::to_string(channels) + " channels");
  }
  SeBlock s;
  s.ratio = ratio;
  s.reduce = make_conv(rng, channels, channels / ratio, 1, 1, 1, opt);
  s.expand = make_conv(rng, channels / ratio, channels, 1, 1, 1, opt);
  return s;
}

InvertedResidual make_inverted_residual(Rng& rng, std::size_t c_in, std::size_t c_out,
                                        std::size_t stride, std::size_t expansion,
                                        const InitOptions& opt) {
  InvertedResidual b;
  const std::size_t hidden = c_in * expansion;
  if (expansion != 1) b.expand = make_cbr(rng, c_in, hidden, 1, 1, 1, Activation::relu, opt);
  b.depthwise = make_cbr(rng, hidden, hidden, 3, stride, hidden, Activation::relu, opt);
  b.project = make_cbr(rng, hidden, c_out, 1, 1, 1, Activation::none, opt);
  b.use_skip = stride == 1 && c_in == c_out;
  return b;
}

}  // namespace lightfc
