#pragma once

#include <torch/torch.h>

namespace noisypairs::train {

/// Batch-mean InfoNCE over unit queries (B, D) with their positive keys
/// (B, D) and a negative pool (K, D). Only the queries receive gradients.
torch::Tensor info_nce_loss(const torch::Tensor& queries, const torch::Tensor& positives,
                            const torch::Tensor& negatives, double temperature);

/// Batch-mean within-image loss. Features are unit-normalized grids
/// (B, C, d, d); labels are int64 (B, d, d).
torch::Tensor within_image_loss(const torch::Tensor& anchor, const torch::Tensor& view,
                                const torch::Tensor& anchor_labels, const torch::Tensor& view_labels,
                                double temperature);

/// Batch-mean cross-image loss where the third image of item i is the second
/// view of item (i + 1) mod B.
torch::Tensor cross_image_loss(const torch::Tensor& anchor, const torch::Tensor& view,
                               const torch::Tensor& anchor_labels, const torch::Tensor& view_labels,
                               double temperature);

}  // namespace noisypairs::train
