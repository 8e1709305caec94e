#include <doctest.h>

#include "lightfc/ecm.hpp"
#include "lightfc/error.hpp"
#include "oracles.hpp"

using namespace lightfc;

TEST_CASE("corr: zero template gives zeros") {
  Rng rng(1);
  const Tensor y = pixelwise_corr(Tensor({1, 4, 2, 3}), random_tensor(rng, {1, 4, 5, 5}));
  CHECK(y.shape() == Shape{1, 6, 5, 5});
  for (float v : y.data()) CHECK(v == 0.0f);
}

TEST_CASE("corr: single unit kernel reproduces the search map") {
  Rng rng(2);
  const Tensor x = random_tensor(rng, {1, 1, 4, 6});
  CHECK(pixelwise_corr(Tensor({1, 1, 1, 1}, 1.0f), x) == x);
}

TEST_CASE("corr: matches the loop oracle") {
  Rng rng(3);
  const Tensor z = random_tensor(rng, {1, 2, 2, 2});
  const Tensor x = random_tensor(rng, {1, 2, 3, 3});
  CHECK(oracle::max_abs(pixelwise_corr(z, x), oracle::correlation(z, x)) <= 1e-6);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t c = 1 + rng.index(12);
    const Tensor zz = random_tensor(rng, {1, c, 1 + rng.index(4), 1 + rng.index(4)});
    const Tensor xx = random_tensor(rng, {1, c, 1 + rng.index(8), 1 + rng.index(8)});
    CHECK(oracle::max_abs(pixelwise_corr(zz, xx), oracle::correlation(zz, xx)) <= 1e-5);
  }
}

TEST_CASE("corr: linear in the search features") {
  Rng rng(4);
  const Tensor z = random_tensor(rng, {1, 8, 3, 3});
  const Tensor x = random_tensor(rng, {1, 8, 6, 6});
  const float a = 0.625f;
  const Tensor lhs = pixelwise_corr(z, scale(x, a));
  const Tensor rhs = scale(pixelwise_corr(z, x), a);
  CHECK(max_abs_diff(lhs, rhs) <= 1e-6);
}

TEST_CASE("corr: channel mismatch") {
  CHECK_THROWS_AS(pixelwise_corr(Tensor({1, 3, 2, 2}), Tensor({1, 4, 4, 4})), ShapeError);
}

TEST_CASE("scf: zero branches with skip return the input") {
  Rng rng(5);
  RepBranchSpec s = make_scf(rng, 6, InitOptions{0.0, false, false});
  for (auto& b : s.branches) {
    for (float& v : b.conv.weight.data()) v = 0.0f;
  }
  const Tensor f = random_tensor(rng, {1, 6, 4, 4});
  CHECK(scf_forward(f, RepUnit{s}, true) == f);
}

TEST_CASE("scf: skip adds exactly f, fused form agrees") {
  Rng rng(6);
  const RepUnit s = make_scf(rng, 8);
  const Tensor f = random_tensor(rng, {1, 8, 5, 5});
  CHECK(scf_forward(f, s, true) == add(scf_forward(f, s, false), f));
  CHECK(max_abs_diff(scf_forward(f, fuse(s), true), scf_forward(f, s, true)) <= 1e-4);
}

TEST_CASE("iab: zero projection with skip is the identity, zero input stays zero") {
  Rng rng(7);
  const InitOptions zero_shift{0.0, false, false};
  Iab iab{make_cbr(rng, 4, 16, 1, 1, 1, Activation::relu, zero_shift),
          make_cbr(rng, 16, 4, 1, 1, 1, Activation::none, zero_shift)};
  const Tensor f = random_tensor(rng, {1, 4, 3, 3});
  const Tensor zero({1, 4, 3, 3});
  CHECK(iab_forward(zero, iab, false) == zero);
  for (float& v : iab.project.conv.weight.data()) v = 0.0f;
  CHECK(iab_forward(f, iab, true) == f);
}

TEST_CASE("iab: equals composing the primitive ops") {
  Rng rng(8);
  const Iab iab{make_cbr(rng, 4, 16, 1), make_cbr(rng, 16, 4, 1, 1, 1, Activation::none)};
  const Tensor f = random_tensor(rng, {1, 4, 3, 3});
  const Tensor h = relu(batchnorm_infer(conv2d(f, iab.expand.conv), iab.expand.bn));
  const Tensor y = batchnorm_infer(conv2d(h, iab.project.conv), iab.project.bn);
  CHECK(iab_forward(f, iab, false) == y);
  CHECK(iab_forward(f, iab, true) == add(y, f));
}

TEST_CASE("iab: width must be an integer") {
  EcmConfig cfg;
  cfg.iab_expansion = 1.3;
  CHECK_THROWS_AS(iab_hidden_channels(cfg, 5), ShapeError);
  cfg.iab_expansion = 4.0;
  CHECK(iab_hidden_channels(cfg, 64) == 256);
}

TEST_CASE("ecm: default output shapes") {
  Rng rng(9);
  const EcmConfig cfg;
  const EcmParams p = make_ecm(rng, cfg, 64, 96);
  const Tensor z = random_tensor(rng, {1, 96, 8, 8});
  const Tensor x = random_tensor(rng, {1, 96, 16, 16});
  const EcmOutput out = ecm_forward(z, x, p, cfg);
  CHECK(out.cls_in.shape() == Shape{1, 160, 16, 16});
  CHECK(out.box_in.shape() == Shape{1, 160, 16, 16});
  CHECK(slice_channels(out.cls_in, 64, 96) == x);

  EcmConfig none = cfg;
  none.reuse_mode = ReuseMode::none;
  const EcmOutput plain = ecm_forward(z, x, p, none);
  CHECK(plain.cls_in.shape() == Shape{1, 64, 16, 16});
  CHECK(ecm_output_channels(none, 64, 96, true) == 64);
}

TEST_CASE("ecm: baseline with every toggle off is correlation plus SE") {
  Rng rng(10);
  EcmConfig cfg;
  cfg.use_scf = cfg.use_iab = cfg.scf_skip = cfg.iab_skip = false;
  cfg.reuse_mode = ReuseMode::none;
  cfg.reuse_cls = cfg.reuse_box = false;
  const EcmParams p = make_ecm(rng, cfg, 16, 8);
  CHECK_FALSE(p.scf.has_value());
  CHECK_FALSE(p.iab.has_value());
  const Tensor z = random_tensor(rng, {1, 8, 4, 4});
  const Tensor x = random_tensor(rng, {1, 8, 8, 8});
  const EcmOutput out = ecm_forward(z, x, p, cfg);
  CHECK(out.cls_in == se_forward(pixelwise_corr(z, x), p.se));
}

TEST_CASE("ecm: per-branch reuse flags") {
  Rng rng(11);
  EcmConfig cfg;
  cfg.reuse_cls = false;
  const EcmParams p = make_ecm(rng, cfg, 16, 8);
  const EcmOutput out =
      ecm_forward(random_tensor(rng, {1, 8, 4, 4}), random_tensor(rng, {1, 8, 6, 6}), p, cfg);
  CHECK(out.cls_in.shape().c == 16);
  CHECK(out.box_in.shape().c == 24);
}

TEST_CASE("ecm: add reuse needs equal widths") {
  Rng rng(12);
  EcmConfig cfg;
  cfg.reuse_mode = ReuseMode::add;
  CHECK_THROWS_AS(make_ecm(rng, cfg, 64, 96), ShapeError);
  const EcmParams p = make_ecm(rng, cfg, 16, 16);
  const Tensor z = random_tensor(rng, {1, 16, 4, 4});
  const Tensor x = random_tensor(rng, {1, 16, 8, 8});
  const EcmOutput out = ecm_forward(z, x, p, cfg);
  EcmConfig none = cfg;
  none.reuse_mode = ReuseMode::none;
  CHECK(out.cls_in == add(ecm_forward(z, x, p, none).cls_in, x));
}

TEST_CASE("ecm: spatial dims follow the search features for every toggle") {
  Rng rng(13);
  for (int mask = 0; mask < 64; ++mask) {
    EcmConfig cfg;
    cfg.use_scf = mask & 1;
    cfg.use_iab = mask & 2;
    cfg.scf_skip = mask & 4;
    cfg.iab_skip = mask & 8;
    cfg.reuse_cls = mask & 16;
    cfg.reuse_box = mask & 32;
    const EcmParams p = make_ecm(rng, cfg, 4, 8);
    const Tensor x = random_tensor(rng, {1, 8, 5, 7});
    const EcmOutput out = ecm_forward(random_tensor(rng, {1, 8, 2, 2}), x, p, cfg);
    CHECK(out.cls_in.shape() == Shape{1, ecm_output_channels(cfg, 4, 8, true), 5, 7});
    CHECK(out.box_in.shape() == Shape{1, ecm_output_channels(cfg, 4, 8, false), 5, 7});
  }
}
