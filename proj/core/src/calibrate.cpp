#include <cmath>

#include "lightfc/model.hpp"

namespace lightfc {

namespace {

class Calibrator {
 public:
  explicit Calibrator(Rng& rng) : rng_(rng) {}

  void stats(const Tensor& pre, BatchNormParams& bn) {
    const Shape& s = pre.shape();
    for (std::size_t c = 0; c < s.c; ++c) {
      double sum = 0.0;
      double sq = 0.0;
      for (std::size_t n = 0; n < s.n; ++n) {
        const float* p = pre.plane(n, c);
        for (std::size_t i = 0; i < s.plane(); ++i) {
          sum += p[i];
          sq += static_cast<double>(p[i]) * p[i];
        }
      }
      const double count = static_cast<double>(s.n * s.plane());
      const double mean = sum / count;
      const double var = std::max(sq / count - mean * mean, 1e-4);
      bn.running_mean[c] = static_cast<float>(mean + 0.1 * std::sqrt(var) * rng_.uniform(-1.0, 1.0));
      bn.running_var[c] = static_cast<float>(var * rng_.uniform(0.7, 1.4));
    }
  }

  Tensor cbr(const Tensor& x, CbrBlock& b) {
    Tensor y = conv2d(x, b.conv);
    stats(y, b.bn);
    y = batchnorm_infer(y, b.bn);
    return b.activation == Activation::relu ? relu(y) : y;
  }

  Tensor rep(const Tensor& x, RepUnit& u) {
    auto* spec = std::get_if<RepBranchSpec>(&u);
    if (!spec) return rep_forward(x, u);
    for (RepBranch& br : spec->branches) stats(conv2d(x, br.conv), br.bn);
    return rep_forward(x, *spec);
  }

  Tensor backbone(const Tensor& img, Backbone& net) {
    Tensor x = cbr(img, net.stem);
    for (auto& stage : net.stages) {
      for (auto& b : stage) {
        Tensor h = b.expand ? cbr(x, *b.expand) : x;
        h = cbr(h, b.depthwise);
        h = cbr(h, b.project);
        x = b.use_skip ? add(h, x) : h;
      }
    }
    return x;
  }

  void branch(const Tensor& f, HeadBranch& b) {
    Tensor x = relu(rep(f, b.stage1));
    if (b.se) x = se_forward(x, *b.se);
    for (RepUnit& u : b.stage2) x = relu(rep(x, u));
  }

 private:
  Rng& rng_;
};

}  // namespace

void calibrate_bn(Model& m, Rng& rng) {
  const std::size_t tz = m.config.template_feature * kBackboneStride;
  Calibrator cal(rng);
  const Tensor x_img = random_tensor(rng, {1, 3, 2 * tz, 2 * tz}, -2.0, 2.0);
  const Tensor z_img = random_tensor(rng, {1, 3, tz, tz}, -2.0, 2.0);
  const Tensor x = cal.backbone(x_img, m.backbone);
  const Tensor z = backbone_forward(z_img, m.backbone);

  const EcmConfig& cfg = m.config.ecm;
  Tensor f = se_forward(pixelwise_corr(z, x), m.ecm.se);
  if (cfg.use_scf && m.ecm.scf) {
    Tensor y = cal.rep(f, *m.ecm.scf);
    f = cfg.scf_skip ? add(y, f) : y;
  }
  if (cfg.use_iab && m.ecm.iab) {
    Tensor y = cal.cbr(cal.cbr(f, m.ecm.iab->expand), m.ecm.iab->project);
    f = cfg.iab_skip ? add(y, f) : y;
  }
  const EcmOutput out = ecm_forward(z, x, m.ecm, cfg);
  cal.branch(out.cls_in, m.head.cls);
  cal.branch(out.box_in, m.head.offset);
  cal.branch(out.box_in, m.head.size);
}

}  // namespace lightfc
