#include <doctest.h>

#include "lightfc/backbone.hpp"
#include "lightfc/error.hpp"
#include "oracles.hpp"

using namespace lightfc;

namespace {

CbrBlock identity_cbr(std::size_t c, Activation act) {
  CbrBlock b;
  b.conv.weight = Tensor({c, c, 1, 1});
  for (std::size_t i = 0; i < c; ++i) b.conv.weight.at(i, i, 0, 0) = 1.0f;
  b.conv.bias.assign(c, 0.0f);
  b.bn = BatchNormParams::identity(c);
  b.activation = act;
  return b;
}

}  // namespace

TEST_CASE("cbr: identity block on non-negative input") {
  Rng rng(1);
  const Tensor x = random_tensor(rng, {1, 3, 5, 5}, 0.0, 2.0);
  CHECK(cbr_forward(x, identity_cbr(3, Activation::relu)) == x);
}

TEST_CASE("cbr: negative constant through relu is zero") {
  const Tensor y = cbr_forward(Tensor({1, 2, 3, 3}, -0.5f), identity_cbr(2, Activation::relu));
  for (float v : y.data()) CHECK(v == 0.0f);
}

TEST_CASE("cbr: equals composing the primitive ops") {
  Rng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    const CbrBlock b = make_cbr(rng, 4, 6, trial % 2 ? 3 : 1, 1 + trial % 2, 1,
                                trial % 3 ? Activation::relu : Activation::none);
    const Tensor x = random_tensor(rng, {1, 4, 7, 7});
    Tensor ref = batchnorm_infer(conv2d(x, b.conv), b.bn);
    if (b.activation == Activation::relu) ref = relu(ref);
    CHECK(cbr_forward(x, b) == ref);
  }
}

TEST_CASE("se: zero expand gives a half gate") {
  Rng rng(3);
  SeBlock s = make_se(rng, 8, 4);
  for (float& v : s.expand.weight.data()) v = 0.0f;
  s.expand.bias.assign(8, 0.0f);
  const Tensor x = random_tensor(rng, {1, 8, 4, 4});
  CHECK(se_forward(x, s) == scale(x, 0.5f));
  const Tensor zero({1, 8, 4, 4});
  CHECK(se_forward(zero, make_se(rng, 8, 4)) == zero);
}

TEST_CASE("se: equals step-by-step composition and gates lie in (0, 1)") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const SeBlock s = make_se(rng, 16, 4);
    const Tensor x = random_tensor(rng, {1, 16, 5, 5}, -3.0, 3.0);
    const Tensor gate = sigmoid(conv2d(relu(conv2d(global_avg_pool(x), s.reduce)), s.expand));
    CHECK(se_forward(x, s) == mul_channels(x, gate));
    const Tensor gates = se_gate(x, s);
    for (float g : gates.data()) {
      CHECK(g > 0.0f);
      CHECK(g < 1.0f);
    }
  }
}

TEST_CASE("se: reduction ratio must divide channels") {
  Rng rng(5);
  CHECK_THROWS_AS(make_se(rng, 10, 4), ShapeError);
  CHECK_THROWS_AS(se_forward(Tensor({1, 4, 2, 2}), make_se(rng, 8, 4)), ShapeError);
}

TEST_CASE("inverted residual: skip rule and shapes") {
  Rng rng(6);
  const InvertedResidual keep = make_inverted_residual(rng, 16, 16, 1, 6);
  CHECK(keep.use_skip);
  CHECK(keep.expand.has_value());
  CHECK(keep.depthwise.conv.groups == 96);
  const Tensor x = random_tensor(rng, {1, 16, 8, 8});
  CHECK(inverted_residual_forward(x, keep).shape() == x.shape());

  const InvertedResidual down = make_inverted_residual(rng, 16, 24, 2, 6);
  CHECK_FALSE(down.use_skip);
  CHECK(inverted_residual_forward(x, down).shape() == Shape{1, 24, 4, 4});

  const InvertedResidual widen = make_inverted_residual(rng, 16, 24, 1, 1);
  CHECK_FALSE(widen.use_skip);
  CHECK_FALSE(widen.expand.has_value());
}

TEST_CASE("inverted residual: skip adds the input") {
  Rng rng(7);
  InvertedResidual b = make_inverted_residual(rng, 8, 8, 1, 6);
  const Tensor x = random_tensor(rng, {1, 8, 6, 6});
  Tensor body = cbr_forward(cbr_forward(cbr_forward(x, *b.expand), b.depthwise), b.project);
  CHECK(inverted_residual_forward(x, b) == add(body, x));
  b.use_skip = false;
  CHECK(inverted_residual_forward(x, b) == body);
}

TEST_CASE("backbone: stride 16 and 96 output channels") {
  Rng rng(8);
  const Backbone net = make_backbone(rng);
  CHECK(backbone_forward(random_tensor(rng, {1, 3, 256, 256}), net).shape() ==
        Shape{1, 96, 16, 16});
  CHECK(backbone_forward(random_tensor(rng, {1, 3, 128, 128}), net).shape() ==
        Shape{1, 96, 8, 8});
  for (std::size_t hw : {16u, 48u, 80u}) {
    const Tensor y = backbone_forward(random_tensor(rng, {1, 3, hw, 2 * hw}), net);
    CHECK(y.shape() == Shape{1, 96, hw / 16, hw / 8});
  }
}

TEST_CASE("backbone: layer table") {
  Rng rng(9);
  const Backbone net = make_backbone(rng);
  CHECK(net.stem.conv.stride == 2);
  CHECK(net.stem.conv.out_channels() == kStemChannels);
  REQUIRE(net.stages.size() == 5);
  std::size_t stride = 2;
  for (std::size_t i = 0; i < net.stages.size(); ++i) {
    CHECK(net.stages[i].size() == kBackboneStages[i].repeats);
    stride *= net.stages[i].front().stride();
    CHECK(net.stages[i].front().expand.has_value() == (kBackboneStages[i].expansion != 1));
    for (const auto& b : net.stages[i]) CHECK(b.out_channels() == kBackboneStages[i].channels);
  }
  CHECK(stride == kBackboneStride);
  CHECK(net.stages.back().back().out_channels() == kBackboneChannels);
}

TEST_CASE("backbone: zero input with zero shifts gives zero output") {
  Rng rng(10);
  const Backbone net = make_backbone(rng, InitOptions{0.0, true, false});
  const Tensor y = backbone_forward(Tensor({1, 3, 64, 64}), net);
  for (float v : y.data()) CHECK(v == 0.0f);
}

TEST_CASE("backbone: indivisible input is rejected") {
  Rng rng(11);
  const Backbone net = make_backbone(rng);
  CHECK_THROWS_AS(backbone_forward(Tensor({1, 3, 40, 64}), net), ShapeError);
  CHECK_THROWS_AS(backbone_forward(Tensor({1, 1, 64, 64}), net), ShapeError);
}
