#include "noisypairs/train/loss_functions.hpp"

#include <stdexcept>

#include "noisypairs/losses/dense.hpp"
#include "noisypairs/losses/feature_map.hpp"
#include "noisypairs/losses/info_nce.hpp"
#include "noisypairs/losses/label_grid.hpp"

namespace noisypairs::train {
namespace {

using torch::autograd::AutogradContext;
using torch::autograd::variable_list;

std::vector<double> to_doubles(const torch::Tensor& t) {
  auto c = t.detach().to(torch::kFloat64).contiguous();
  return {c.data_ptr<double>(), c.data_ptr<double>() + c.numel()};
}

torch::Tensor from_doubles(const std::vector<double>& v, torch::IntArrayRef shape) {
  return torch::from_blob(const_cast<double*>(v.data()), shape, torch::kFloat64).clone().to(torch::kFloat32);
}

// (B, C, d, d) -> per item, position-major grids.
std::vector<losses::FeatureMap> grids(const torch::Tensor& f) {
  const int B = f.size(0), C = f.size(1), d = f.size(2);
  const auto values = to_doubles(f.permute({0, 2, 3, 1}));
  std::vector<losses::FeatureMap> out;
  const std::size_t per = static_cast<std::size_t>(d) * d * C;
  for (int b = 0; b < B; ++b) {
    out.emplace_back(d, C, std::vector<double>(values.begin() + b * per, values.begin() + (b + 1) * per));
  }
  return out;
}

std::vector<losses::DenseLabelGrid> label_grids(const torch::Tensor& labels) {
  const int B = labels.size(0), d = labels.size(1);
  auto c = labels.to(torch::kInt64).contiguous();
  const auto* p = c.data_ptr<std::int64_t>();
  std::vector<losses::DenseLabelGrid> out;
  for (int b = 0; b < B; ++b) {
    losses::DenseLabelGrid g;
    g.side = d;
    g.classes.assign(p + b * d * d, p + (b + 1) * d * d);
    out.push_back(std::move(g));
  }
  return out;
}

// Gradient buffers are position-major; return them as (B, C, d, d).
torch::Tensor grid_gradient(const std::vector<double>& flat, const torch::Tensor& like) {
  const auto B = like.size(0), C = like.size(1), d = like.size(2);
  return from_doubles(flat, {B, d, d, C}).permute({0, 3, 1, 2}).contiguous();
}

struct InfoNceFn : torch::autograd::Function<InfoNceFn> {
  static torch::Tensor forward(AutogradContext* ctx, torch::Tensor q, torch::Tensor k, torch::Tensor negatives,
                               double temperature) {
    const auto r = losses::info_nce_batch(to_doubles(q), to_doubles(k), to_doubles(negatives),
                                          static_cast<int>(q.size(1)), temperature);
    ctx->saved_data["grad"] = from_doubles(r.grad_queries, q.sizes());
    return torch::tensor(static_cast<float>(r.loss));
  }
  static variable_list backward(AutogradContext* ctx, variable_list grad_out) {
    return {ctx->saved_data["grad"].toTensor() * grad_out[0], {}, {}, {}};
  }
};

struct DenseFn : torch::autograd::Function<DenseFn> {
  // An empty `other` means the within-image loss.
  static torch::Tensor forward(AutogradContext* ctx, torch::Tensor anchor, torch::Tensor view, torch::Tensor other,
                               torch::Tensor anchor_labels, torch::Tensor view_labels, torch::Tensor other_labels,
                               double temperature) {
    const auto fa = grids(anchor), fv = grids(view);
    const auto ya = label_grids(anchor_labels), yv = label_grids(view_labels);
    const bool cross = other.numel() > 0;
    std::vector<losses::FeatureMap> fo;
    std::vector<losses::DenseLabelGrid> yo;
    if (cross) {
      fo = grids(other);
      yo = label_grids(other_labels);
    }
    const auto B = static_cast<double>(fa.size());
    double total = 0.0;
    std::vector<double> ga, gv, go;
    for (std::size_t b = 0; b < fa.size(); ++b) {
      const auto r = cross ? losses::cross_image_loss(fa[b], fv[b], fo[b], ya[b], yv[b], yo[b], temperature, true)
                           : losses::within_image_loss(fa[b], fv[b], ya[b], yv[b], temperature, true);
      total += r.loss;
      ga.insert(ga.end(), r.grad_anchor.begin(), r.grad_anchor.end());
      gv.insert(gv.end(), r.grad_view.begin(), r.grad_view.end());
      if (cross) go.insert(go.end(), r.grad_other.begin(), r.grad_other.end());
    }
    for (auto* g : {&ga, &gv, &go})
      for (auto& x : *g) x /= B;
    ctx->saved_data["ga"] = grid_gradient(ga, anchor);
    ctx->saved_data["gv"] = grid_gradient(gv, view);
    ctx->saved_data["cross"] = cross;
    if (cross) ctx->saved_data["go"] = grid_gradient(go, other);
    return torch::tensor(static_cast<float>(total / B));
  }
  static variable_list backward(AutogradContext* ctx, variable_list grad_out) {
    const auto g = grad_out[0];
    torch::Tensor go;
    if (ctx->saved_data["cross"].toBool()) go = ctx->saved_data["go"].toTensor() * g;
    return {ctx->saved_data["ga"].toTensor() * g, ctx->saved_data["gv"].toTensor() * g, go, {}, {}, {}, {}};
  }
};

void check_grid(const torch::Tensor& f, const torch::Tensor& labels) {
  if (f.dim() != 4 || f.size(2) != f.size(3)) throw std::invalid_argument("feature grid must be (B, C, d, d)");
  if (labels.dim() != 3 || labels.size(0) != f.size(0) || labels.size(1) != f.size(2) || labels.size(2) != f.size(3)) {
    throw std::invalid_argument("label grid must be (B, d, d) matching the features");
  }
}

}  // namespace

torch::Tensor info_nce_loss(const torch::Tensor& queries, const torch::Tensor& positives,
                            const torch::Tensor& negatives, double temperature) {
  if (queries.sizes() != positives.sizes() || queries.dim() != 2) throw std::invalid_argument("queries and keys must be (B, D)");
  return InfoNceFn::apply(queries, positives.detach(), negatives.detach(), temperature);
}

torch::Tensor within_image_loss(const torch::Tensor& anchor, const torch::Tensor& view,
                                const torch::Tensor& anchor_labels, const torch::Tensor& view_labels,
                                double temperature) {
  check_grid(anchor, anchor_labels);
  check_grid(view, view_labels);
  const auto none = torch::empty({0});
  return DenseFn::apply(anchor, view, none, anchor_labels, view_labels, none, temperature);
}

torch::Tensor cross_image_loss(const torch::Tensor& anchor, const torch::Tensor& view,
                               const torch::Tensor& anchor_labels, const torch::Tensor& view_labels,
                               double temperature) {
  check_grid(anchor, anchor_labels);
  check_grid(view, view_labels);
  const auto other = torch::roll(view, {-1}, {0});
  const auto other_labels = torch::roll(view_labels, {-1}, {0});
  return DenseFn::apply(anchor, view, other, anchor_labels, view_labels, other_labels, temperature);
}

}  // namespace noisypairs::train
