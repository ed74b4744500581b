#pragma once

#include <span>
#include <vector>

#include "noisypairs/common/rng.hpp"

namespace noisypairs::losses {

/// key ← m·key + (1−m)·query, elementwise. Requires 0 ≤ m < 1 and equal sizes.
void momentum_update(std::span<float> key, std::span<const float> query, double momentum);

/// Fixed-capacity FIFO of unit-normalized key vectors (the MoCo negative pool).
class KeyQueue {
 public:
  /// Starts filled with random unit vectors drawn from `rng`.
  KeyQueue(int capacity, int dim, Rng& rng);

  int capacity() const { return capacity_; }
  int dim() const { return dim_; }

  /// Pushes a B×dim batch, overwriting the oldest entries. Throws if a key is
  /// not unit-normalized.
  void enqueue(std::span<const float> keys);

  /// Raw ring storage (capacity × dim); row order is not FIFO order.
  std::span<const float> storage() const { return storage_; }

  /// Entries ordered oldest → newest.
  std::vector<float> fifo_contents() const;

  /// Index of the row the next enqueue will overwrite.
  int head() const { return head_; }

  /// Restores a queue from a previously saved storage/head pair.
  void restore(std::vector<float> storage, int head);

 private:
  int capacity_;
  int dim_;
  int head_ = 0;
  std::vector<float> storage_;
};

}  // namespace noisypairs::losses
