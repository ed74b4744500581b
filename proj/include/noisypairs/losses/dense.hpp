#pragma once

#include <vector>

#include "noisypairs/losses/feature_map.hpp"
#include "noisypairs/losses/label_grid.hpp"

namespace noisypairs::losses {

/// Value and gradients of a dense pixel-level contrastive loss. Gradients are
/// with respect to the feature vectors, laid out like FeatureMap::values().
struct DenseLoss {
  double loss = 0.0;
  /// Anchors whose class occurs among the positives; the outer average runs
  /// over these only. Zero means the loss is 0.
  int effective_anchors = 0;
  std::vector<double> grad_anchor;
  std::vector<double> grad_view;
  std::vector<double> grad_other;  // empty for the within-image loss
};

/// Within-image loss between an anchor view I and a second view Î of the same
/// image. For every anchor pixel p, same-class pixels q of Î are positives,
/// all pixels of Î form the softmax denominator, and each anchor's positives
/// are weighted by 1/N^Î_{y_p}. Anchors whose class is absent from Î
/// contribute nothing. Throws std::invalid_argument for τ ≤ 0 or mismatched
/// shapes.
DenseLoss within_image_loss(const FeatureMap& anchor, const FeatureMap& view,
                            const DenseLabelGrid& anchor_labels, const DenseLabelGrid& view_labels,
                            double temperature, bool with_gradients = false);

/// Cross-image loss: extends the within-image loss with a different image Ĵ.
/// Same-class pixels of Ĵ are additional positives and are the only pixels of
/// Ĵ that enter the denominator; weights become 1/(N^Î_y + N^Ĵ_y).
DenseLoss cross_image_loss(const FeatureMap& anchor, const FeatureMap& view,
                           const FeatureMap& other, const DenseLabelGrid& anchor_labels,
                           const DenseLabelGrid& view_labels, const DenseLabelGrid& other_labels,
                           double temperature, bool with_gradients = false);

}  // namespace noisypairs::losses
