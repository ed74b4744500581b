#include "noisypairs/losses/dense.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace noisypairs::losses {
namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMatrix>;

ConstRowMap rows_of(const FeatureMap& map) {
  return ConstRowMap(map.values().data(), map.positions(), map.channels());
}

void check_pair(const FeatureMap& features, const DenseLabelGrid& labels, const char* what) {
  if (features.positions() != labels.positions()) {
    throw std::invalid_argument(std::string(what) + ": label grid does not match the feature grid");
  }
}

/// Shared kernel. `other` may be null (within-image). Per anchor p with class c:
///   U_p = all pixels of Î  ∪  pixels of Ĵ with class c    (softmax support)
///   P_p = pixels of Î with class c ∪ pixels of Ĵ with class c  (positives)
///   ℓ_p = (1/|P_p|) Σ_{u∈P_p} (logsumexp_{U_p} s − s_u)
/// and the loss is the mean of ℓ_p over anchors with |P_p| > 0.
DenseLoss dense_contrast(const FeatureMap& anchor, const FeatureMap& view, const FeatureMap* other,
                         const DenseLabelGrid& anchor_labels, const DenseLabelGrid& view_labels,
                         const DenseLabelGrid* other_labels, double temperature, bool with_gradients) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::invalid_argument("temperature must be positive, got " + std::to_string(temperature));
  }
  check_pair(anchor, anchor_labels, "anchor");
  check_pair(view, view_labels, "view");
  if (anchor.channels() != view.channels()) throw std::invalid_argument("feature dimensions differ");
  if (other != nullptr) {
    check_pair(*other, *other_labels, "other");
    if (other->channels() != anchor.channels()) throw std::invalid_argument("feature dimensions differ");
  }

  const auto a = rows_of(anchor);
  const auto v = rows_of(view);
  const RowMatrix s_view = a * v.transpose() / temperature;
  RowMatrix s_other;
  if (other != nullptr) s_other = a * rows_of(*other).transpose() / temperature;

  const Eigen::Index n_anchor = a.rows();
  const Eigen::Index n_view = v.rows();
  const Eigen::Index n_other = other != nullptr ? other->positions() : 0;

  RowMatrix g_view, g_other;
  if (with_gradients) {
    g_view = RowMatrix::Zero(n_anchor, n_view);
    g_other = RowMatrix::Zero(n_anchor, n_other);
  }

  DenseLoss out;
  double total = 0.0;
  Eigen::RowVectorXd mask_other(n_other);
  for (Eigen::Index p = 0; p < n_anchor; ++p) {
    const int cls = anchor_labels.classes[p];
    int positives = 0;
    for (Eigen::Index q = 0; q < n_view; ++q) positives += view_labels.classes[q] == cls;
    for (Eigen::Index q = 0; q < n_other; ++q) {
      mask_other(q) = other_labels->classes[q] == cls ? 1.0 : 0.0;
      positives += other_labels->classes[q] == cls;
    }
    if (positives == 0) continue;
    ++out.effective_anchors;

    double shift = s_view.row(p).maxCoeff();
    for (Eigen::Index q = 0; q < n_other; ++q) {
      if (mask_other(q) != 0.0) shift = std::max(shift, s_other(p, q));
    }
    const Eigen::RowVectorXd exp_view = (s_view.row(p).array() - shift).exp();
    Eigen::RowVectorXd exp_other(n_other);
    for (Eigen::Index q = 0; q < n_other; ++q) {
      exp_other(q) = mask_other(q) != 0.0 ? std::exp(s_other(p, q) - shift) : 0.0;
    }
    const double denom = exp_view.sum() + exp_other.sum();
    const double log_denom = shift + std::log(denom);

    double positive_logits = 0.0;
    for (Eigen::Index q = 0; q < n_view; ++q) {
      if (view_labels.classes[q] == cls) positive_logits += s_view(p, q);
    }
    for (Eigen::Index q = 0; q < n_other; ++q) {
      if (mask_other(q) != 0.0) positive_logits += s_other(p, q);
    }
    total += log_denom - positive_logits / positives;

    if (with_gradients) {
      // dℓ_p/ds_u = softmax_u − [u ∈ P_p] / |P_p|, restricted to U_p.
      g_view.row(p) = exp_view / denom;
      for (Eigen::Index q = 0; q < n_view; ++q) {
        if (view_labels.classes[q] == cls) g_view(p, q) -= 1.0 / positives;
      }
      if (n_other > 0) g_other.row(p) = exp_other / denom - mask_other / positives;
    }
  }

  if (out.effective_anchors == 0) {
    if (with_gradients) {
      out.grad_anchor.assign(anchor.values().size(), 0.0);
      out.grad_view.assign(view.values().size(), 0.0);
      if (other != nullptr) out.grad_other.assign(other->values().size(), 0.0);
    }
    return out;
  }
  out.loss = total / out.effective_anchors;

  if (with_gradients) {
    const double scale = 1.0 / (out.effective_anchors * temperature);
    RowMatrix grad_a = g_view * v * scale;
    const RowMatrix grad_v = g_view.transpose() * a * scale;
    if (other != nullptr) {
      const auto o = rows_of(*other);
      grad_a += g_other * o * scale;
      const RowMatrix grad_o = g_other.transpose() * a * scale;
      out.grad_other.assign(grad_o.data(), grad_o.data() + grad_o.size());
    }
    out.grad_anchor.assign(grad_a.data(), grad_a.data() + grad_a.size());
    out.grad_view.assign(grad_v.data(), grad_v.data() + grad_v.size());
  }
  return out;
}

}  // namespace

DenseLoss within_image_loss(const FeatureMap& anchor, const FeatureMap& view,
                            const DenseLabelGrid& anchor_labels, const DenseLabelGrid& view_labels,
                            double temperature, bool with_gradients) {
  return dense_contrast(anchor, view, nullptr, anchor_labels, view_labels, nullptr, temperature,
                        with_gradients);
}

DenseLoss cross_image_loss(const FeatureMap& anchor, const FeatureMap& view,
                           const FeatureMap& other, const DenseLabelGrid& anchor_labels,
                           const DenseLabelGrid& view_labels, const DenseLabelGrid& other_labels,
                           double temperature, bool with_gradients) {
  return dense_contrast(anchor, view, &other, anchor_labels, view_labels, &other_labels,
                        temperature, with_gradients);
}

}  // namespace noisypairs::losses
