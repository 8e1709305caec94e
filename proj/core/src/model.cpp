#include "lightfc/model.hpp"

#include "lightfc/error.hpp"

namespace lightfc {

Model make_model(const ModelConfig& cfg, const InitOptions& opt) {
  Rng rng(cfg.seed);
  Model m;
  m.config = cfg;
  const std::size_t corr = cfg.corr_channels();
  m.backbone = make_backbone(rng, opt);
  m.ecm = make_ecm(rng, cfg.ecm, corr, kBackboneChannels, opt);
  m.head = make_head(rng, cfg.head, ecm_output_channels(cfg.ecm, corr, kBackboneChannels, true),
                     ecm_output_channels(cfg.ecm, corr, kBackboneChannels, false), opt);
  if (opt.calibrate) calibrate_bn(m, rng);
  return m;
}

Tensor encode_template(const Model& m, const Tensor& template_image) {
  Tensor z = backbone_forward(template_image, m.backbone);
  if (z.shape().h != m.config.template_feature || z.shape().w != m.config.template_feature) {
    throw ShapeError("model: template features " + z.shape().str() + " do not match the " +
                     std::to_string(m.config.template_feature) + "x" +
                     std::to_string(m.config.template_feature) + " the model was built for");
  }
  return z;
}

HeadOutput predict(const Model& m, const Tensor& template_features, const Tensor& search_image) {
  const Tensor x = backbone_forward(search_image, m.backbone);
  const EcmOutput fused = ecm_forward(template_features, x, m.ecm, m.config.ecm);
  return head_forward(fused.cls_in, fused.box_in, m.head);
}

HeadOutput forward(const Model& m, const Tensor& template_image, const Tensor& search_image) {
  return predict(m, encode_template(m, template_image), search_image);
}

Model fuse(const Model& m) {
  Model out = m;
  if (out.ecm.scf) out.ecm.scf = fuse(*out.ecm.scf);
  out.head = fuse(m.head);
  return out;
}

bool is_deploy_form(const Model& m) {
  auto branch_fused = [](const HeadBranch& b) {
    if (!is_fused(b.stage1)) return false;
    for (const RepUnit& u : b.stage2) {
      if (!is_fused(u)) return false;
    }
    return true;
  };
  if (m.ecm.scf && !is_fused(*m.ecm.scf)) return false;
  return branch_fused(m.head.cls) && branch_fused(m.head.offset) && branch_fused(m.head.size);
}

Tensor NetworkPredictor::encode_template(const Tensor& patch) const {
  return lightfc::encode_template(model_, patch);
}

HeadOutput NetworkPredictor::predict(const Tensor& template_features,
                                     const Tensor& search_patch) const {
  return lightfc::predict(model_, template_features, search_patch);
}

}  // namespace lightfc
