#pragma once

#include <span>
#include <vector>

namespace noisypairs::losses {

/// InfoNCE for one query:
///   −log( exp(q·k₊/τ) / Σ_{i=0..K} exp(q·kᵢ/τ) ),  k₀ = k₊
/// `negatives` holds K keys row-major (K × dim). K may be zero, in which case
/// the loss is exactly 0. Throws std::invalid_argument for τ ≤ 0, mismatched
/// sizes or inputs that are not unit vectors.
double info_nce(std::span<const double> query, std::span<const double> positive,
                std::span<const double> negatives, double temperature);

struct InfoNceGradients {
  double loss = 0.0;
  std::vector<double> query;      // dim
  std::vector<double> positive;   // dim
  std::vector<double> negatives;  // K × dim
};

InfoNceGradients info_nce_with_gradients(std::span<const double> query,
                                         std::span<const double> positive,
                                         std::span<const double> negatives, double temperature);

/// Batched form used in training: B queries, B matching positives, a shared
/// pool of K negatives (the key queue). Loss is the batch mean. Negatives do
/// not receive gradients (they come from the momentum encoder's queue).
struct InfoNceBatch {
  double loss = 0.0;
  std::vector<double> grad_queries;    // B × dim
  std::vector<double> grad_positives;  // B × dim
};

InfoNceBatch info_nce_batch(std::span<const double> queries, std::span<const double> positives,
                            std::span<const double> negatives, int dim, double temperature);

}  // namespace noisypairs::losses
